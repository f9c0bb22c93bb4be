"""Run the congruence engine on the block pairs used by the absorption lemmas."""
import argparse
import time
from dataclasses import dataclass

from cfcsolve.blocks import BlockSum, Gamma, GammaT, HT, materialize
from cfcsolve.congruence import find_congruence


@dataclass
class DemoConfig:
    k_max: int = 5
    seed: int = 20210611


def pairs(cfg: DemoConfig):
    for k in range(1, cfg.k_max + 1):
        yield HT(4 * k, -1), BlockSum.of((GammaT(2 * k), 2))
        yield HT(4 * k - 2, 1), BlockSum.of((GammaT(2 * k - 1), 2))
        yield Gamma(k), GammaT(k)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k-max", type=int, default=DemoConfig.k_max)
    p.add_argument("--seed", type=int, default=DemoConfig.seed)
    a = p.parse_args()
    cfg = DemoConfig(a.k_max, a.seed)
    print(f"{'source':<12}{'target':<12}{'method':<28}{'mode':<9}{'residual':>10}{'sec':>8}")
    for src, dst in pairs(cfg):
        t0 = time.perf_counter()
        w = find_congruence(materialize(src, True), materialize(dst, True), seed=cfg.seed)
        dt = time.perf_counter() - t0
        print(f"{str(src):<12}{str(dst):<12}{w.method:<28}{w.mode:<9}"
              f"{w.residual_norm:>10.1e}{dt:>8.3f}")


if __name__ == "__main__":
    main()
