"""Random sweep: solve at m = min(tau, upsilon), decide at m + 1.

Writes one JSON line per instance when --jsonl is given and prints a
summary with counts by status and construction mode.
"""
import argparse
import json
import logging
import random
import time
from collections import Counter
from dataclasses import asdict, dataclass

from cfcsolve.blocks import materialize
from cfcsolve.invariants import tau_upsilon
from cfcsolve.kernel import Matrix
from cfcsolve.sampling import random_blocksum
from cfcsolve.solver import CONSISTENT, INCONSISTENT, decide, solve, verify

_log = logging.getLogger("bound_sweep")


@dataclass
class SweepConfig:
    samples: int = 100
    max_n: int = 32
    max_block: int = 8
    allow_h4: bool = False
    seed: int = 20210611
    tolerance: float = 1e-9
    jsonl: str | None = None


def run_sweep(cfg: SweepConfig) -> Counter:
    rng = random.Random(cfg.seed)
    stats = Counter()
    out = open(cfg.jsonl, "w") if cfg.jsonl else None
    try:
        for i in range(cfg.samples):
            s = random_blocksum(rng, cfg.max_n, cfg.max_block, cfg.allow_h4)
            m = tau_upsilon(s).min_bound
            t0 = time.perf_counter()
            dec = solve(s, m=m, seed=cfg.seed + i, tolerance=cfg.tolerance)
            elapsed = time.perf_counter() - t0
            ok = dec.status == CONSISTENT and verify(
                materialize(s, True), dec.X, Matrix.identity(m), cfg.tolerance).ok
            above = decide(s, m + 1).status
            stats[dec.status] += 1
            stats[f"mode:{dec.mode}"] += 1
            stats["verified"] += ok
            stats["refused_above"] += above == INCONSISTENT
            _log.debug("%s m=%d %s %.3fs", s, m, dec.status, elapsed)
            if out:
                out.write(json.dumps({"blocks": str(s), "m": m, "status": dec.status,
                                      "mode": dec.mode, "case": dec.case, "verified": ok,
                                      "status_above": above, "seconds": elapsed}) + "\n")
    finally:
        if out:
            out.close()
    return stats


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in asdict(SweepConfig()).items():
        flag = "--" + name.replace("_", "-")
        if isinstance(default, bool):
            p.add_argument(flag, action="store_true")
        else:
            p.add_argument(flag, type=type(default) if default is not None else str,
                           default=default)
    p.add_argument("-v", "--verbose", action="store_true")
    args = vars(p.parse_args())
    logging.basicConfig(level=logging.DEBUG if args.pop("verbose") else logging.INFO)
    cfg = SweepConfig(**args)
    t0 = time.perf_counter()
    stats = run_sweep(cfg)
    print(json.dumps({"config": asdict(cfg), "stats": dict(stats),
                      "seconds": round(time.perf_counter() - t0, 3)}, indent=2))


if __name__ == "__main__":
    main()
