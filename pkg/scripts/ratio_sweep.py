"""Coupling-ratio sweep: writes the CSV and reports where each parameter first drops below one."""

import argparse
import csv

from bragg_entanglement import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/ratio_sweep.yaml")
    ap.add_argument("--out")
    args = ap.parse_args()
    path, cfg = cli.run(cli.load_config(args.config), out=args.out)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    tag = f"{cfg['pairs'][0]}_{cfg['pictures'][0]}"
    print(f"wrote {path}  (t = {cfg['sweep_time']} us)")
    for name in ("xi_n", "xi_p"):
        below = [float(r["ratio"]) for r in rows if float(r[f"{name}_{tag}"]) < 1.0]
        span = f"{min(below):.2f} .. {max(below):.2f}" if below else "never"
        print(f"{name}_{tag} < 1 for ratio in {span}")
    for r in rows:
        print(f"  ratio {float(r['ratio']):.2f}  xi_n {float(r[f'xi_n_{tag}']):8.4f}  xi_p {float(r[f'xi_p_{tag}']):8.4f}")


if __name__ == "__main__":
    main()
