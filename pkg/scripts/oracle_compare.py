"""Gaussian engine against the truncated-Fock oracle as a function of time and occupation caps.

Prints the worst absolute moment error and the top-layer leakage for each
cap setting, which shows how far in time a given truncation can be trusted.
"""

import argparse
from dataclasses import replace

from bragg_entanglement import crosscheck
from bragg_entanglement.fock_oracle import MemoryCeilingError, TruncationSpec
from bragg_entanglement.model import SystemConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-probe", type=float, nargs="+", default=[0.0, 1.0, 2.0])
    ap.add_argument("--times", type=float, nargs="+", default=[0.1, 0.2, 0.3, 0.4, 0.5])
    ap.add_argument("--caps", type=int, nargs="+", default=[6, 8, 10])
    ap.add_argument("--probe-cap-extra", type=int, default=10, help="probe cap = quasiparticle cap + this")
    args = ap.parse_args()
    print(f"{'n_p':>4} {'cap':>4} {'t':>5} {'worst abs':>10} {'worst rel':>10} {'leakage':>10} ok")
    for n_p in args.n_probe:
        cfg = replace(SystemConfig.working_point(), n_probe=n_p)
        for cap in args.caps:
            try:
                spec = TruncationSpec(crosscheck.default_caps(cfg, cap, cap + args.probe_cap_extra))
            except MemoryCeilingError as exc:
                print(f"{n_p:4g} {cap:4d}  skipped: {exc}")
                continue
            for t in args.times:
                rows = crosscheck.compare(cfg, [t], spec)
                s = crosscheck.summarize(rows)
                print(f"{n_p:4g} {cap:4d} {t:5.2f} {s['worst_abs_error']:10.3g} {s['worst_rel_error']:10.3g} "
                      f"{s['max_leakage']:10.3g} {s['failures'] == 0}")


if __name__ == "__main__":
    main()
