"""Print tau and upsilon for single canonical blocks of growing size."""
import argparse
from dataclasses import dataclass

from cfcsolve.blocks import Gamma, GammaT, H, HT, J
from cfcsolve.invariants import tau_upsilon
from cfcsolve.kernel import parse_scalar


@dataclass
class InvariantsConfig:
    k_max: int = 8
    mu: str = "2"


def rows(cfg: InvariantsConfig):
    mu = parse_scalar(cfg.mu)
    yield H(2, -1)
    for k in range(1, cfg.k_max + 1):
        yield from (J(2 * k), J(2 * k + 1), Gamma(2 * k - 1), Gamma(2 * k), GammaT(2 * k),
                    HT(4 * k + 2, -1), HT(4 * k, 1), HT(2 * k, mu))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k-max", type=int, default=InvariantsConfig.k_max)
    p.add_argument("--mu", default=InvariantsConfig.mu)
    cfg = InvariantsConfig(**{k.replace("-", "_"): v for k, v in vars(p.parse_args()).items()})
    print(f"{'block':<14}{'size':>6}{'tau':>6}{'upsilon':>9}")
    for b in rows(cfg):
        inv = tau_upsilon(b)
        print(f"{str(b):<14}{b.size:>6}{inv.tau:>6}{inv.upsilon:>9}")


if __name__ == "__main__":
    main()
