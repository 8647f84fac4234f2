"""Run the standard verification campaigns and write one JSON-lines report per campaign.

    python scripts/run_campaigns.py --out runs/ --seed 0
"""
import argparse
import sys
from pathlib import Path

from hh_opverify.campaign import SuiteConfig, emit_report, run_suite

CAMPAIGNS = [
    SuiteConfig("gelfand", function="exp", dims=tuple(range(1, 9)), trials=200),
    SuiteConfig("invex", eta="eta1", dims=(1, 2, 3), trials=100),
    SuiteConfig("condition-c", eta="eta1", dims=(1, 2, 3, 4), trials=50),
    SuiteConfig("condition-c", eta="eta2", dims=(1, 2, 3, 4), trials=50),
    SuiteConfig("condition-c", eta="eta3", dims=(1, 2), trials=50),
    SuiteConfig("preinvex", eta="eta1", function="square", dims=(1,), trials=100),
    SuiteConfig("preinvex", eta="eta1", function="affine(5,2)", dims=(1,), trials=50),
    SuiteConfig("preinvex", eta="eta2", function="identity", dims=(1,), trials=50),
    SuiteConfig("preinvex", eta="eta2", function="constant(3)", dims=(1, 2, 3), trials=50),
    SuiteConfig("preinvex", eta="eta3", function="abs-neg", dims=(1,), trials=100),
    SuiteConfig("preinvex", eta="eta3", function="abs-neg", dims=(2, 3), trials=100),
    SuiteConfig("chain", eta="convex", dims=tuple(range(1, 7)), trials=500),
    SuiteConfig("chain", eta="eta1", dims=tuple(range(1, 7)), trials=200),
    SuiteConfig("corollary1", eta="convex", dims=tuple(range(1, 7)), trials=500),
    SuiteConfig("estimate", eta="eta1", dims=(1, 2, 3, 4), trials=100),
    SuiteConfig("estimate", eta="convex", dims=(1, 2, 3, 4), trials=100),
    SuiteConfig("scalar-oracles", function="square", trials=50),
    SuiteConfig("falsify", eta="convex", function="cube", dims=(2,), trials=1000),
]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--out", type=Path, default=Path("runs"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    args = p.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    worst = 0
    for base in CAMPAIGNS:
        cfg = SuiteConfig(**{**base.__dict__, "seed": args.seed, "threads": args.threads})
        rep = run_suite(cfg)
        name = f"{cfg.suite}_{cfg.eta}_{cfg.function}_d{'-'.join(map(str, cfg.dims))}.jsonl"
        (args.out / name.replace("(", "_").replace(")", "").replace(",", "_")).write_bytes(
            emit_report(rep, "jsonl"))
        c = rep.counts()
        print(f"{cfg.suite:<15} {cfg.eta:<7} {cfg.function:<12} expect={rep.expectation:<7} "
              f"pass={c['pass']:<4} violation={c['violation']:<4} error={c['error']:<3} "
              f"{rep.status} ({rep.wall_time:.1f}s)")
        worst = max(worst, rep.exit_code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
