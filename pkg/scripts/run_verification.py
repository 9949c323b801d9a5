"""Run every seeded verification suite and print a one-line summary per suite.

Exit status is 0 only if all suites pass.
"""

import argparse
import sys
import time

from ringcert.suites import SUITES, run_suite


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--trials", type=int, default=100)
    args = p.parse_args(argv)

    all_ok = True
    for name in SUITES:
        t0 = time.perf_counter()
        rep = run_suite(name, args.seed, args.trials)
        dt = time.perf_counter() - t0
        status = "PASS" if rep.passed else "FAIL"
        print(f"{name:9s} {status}  failures={len(rep.failures)}  max_residual={rep.max_residual:.2e}  {dt:.1f}s")
        for f in rep.failures[:10]:
            print(f"    {f['case']}: {f['residual']:.3e}")
        for flag in rep.flags[:3]:
            print(f"    note: {flag}")
        all_ok &= rep.passed
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
