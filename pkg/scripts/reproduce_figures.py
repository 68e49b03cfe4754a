"""Write the outage, BER and capacity sweeps for the built-in scenarios as CSV.

    python3 scripts/reproduce_figures.py --out figures/

One file per (figure, scenario) is written, e.g. ``fig1_outage_scenario2-L4.csv``,
followed by a short qualitative check (monotone in rho, ordered in L) on stdout.
Monte Carlo is off by default; pass ``--mc`` to include it.
"""
import argparse
import sys
from dataclasses import replace
from pathlib import Path

from llsc.cli import emit_csv, load_config, run_sweep
from llsc.metrics import Method

FIGURES = {"fig1": "outage", "fig2": "ber", "fig3": "capacity"}
SCENARIOS = ("scenario1", "scenario2-L1", "scenario2-L2", "scenario2-L4")


def best(row):
    for m in (Method.EXACT_H, Method.QUADRATURE):
        v = row.get(m)
        if v is not None:
            return v
    return None


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--rho-max", type=float, default=60.0)
    ap.add_argument("--mc", action="store_true", help="also run Monte Carlo")
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)

    methods = [Method.EXACT_H, Method.QUADRATURE, Method.ASYMPTOTIC]
    if args.mc:
        methods.append(Method.MONTE_CARLO)

    curves = {}
    for fig, metric in FIGURES.items():
        for name in SCENARIOS:
            cfg = load_config(name)
            cfg = replace(cfg, sweep=(cfg.sweep[0], args.rho_max, cfg.sweep[2]))
            rows = run_sweep(cfg, metrics=[metric], methods=methods, workers=args.workers)
            path = args.out / f"{fig}_{metric}_{name}.csv"
            emit_csv(rows, str(path))
            curves[metric, name] = [best(r) for r in rows]
            print(f"wrote {path}")

    ok = True
    for metric in FIGURES.values():
        rising = metric == "capacity"
        for name in SCENARIOS:
            ys = curves[metric, name]
            mono = all((b > a) if rising else (b < a) for a, b in zip(ys, ys[1:]))
            ok &= mono
            print(f"{metric:8s} {name:13s} monotone in rho: {mono}")
        l1, l2, l4 = (curves[metric, f"scenario2-L{L}"][1:] for L in (1, 2, 4))
        order = all(
            (c > b > a) if rising else (c < b < a) for a, b, c in zip(l1, l2, l4)
        )
        ok &= order
        print(f"{metric:8s} ordered in L (5 dB and up): {order}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
