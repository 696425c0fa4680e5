"""Continue m(s) along a real segment and compare with the closed form.

    python scripts/scan_m.py --lo 0.6 --hi 2.5 --n 20 --out scan.csv
"""
import argparse
import csv

import numpy as np

from eisencont.merocont import PoleProximityError
from eisencont.sl2 import continue_eisenstein
from eisencont.specfn import m_closed


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lo", type=float, default=0.6)
    ap.add_argument("--hi", type=float, default=2.5)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--im", type=float, default=0.0, help="fixed imaginary part")
    ap.add_argument("--out", help="CSV path (default: print only)")
    args = ap.parse_args()

    rows = []
    for re in np.linspace(args.lo, args.hi, args.n):
        s = complex(re, args.im)
        try:
            res = continue_eisenstein(s)
        except PoleProximityError:
            print(f"s = {s:.4f}: pole proximity")
            rows.append({"s_re": s.real, "s_im": s.imag, "status": "pole_proximity"})
            continue
        mc = m_closed(s)
        err = abs(res.m_estimate - mc) / abs(mc)
        print(f"s = {s:.4f}: m = {res.m_estimate:.10f}  rel err {err:.2e}  max residual {res.max_residual:.1e}")
        rows.append({"s_re": s.real, "s_im": s.imag, "status": "ok", "m_re": res.m_estimate.real,
                     "m_im": res.m_estimate.imag, "rel_err": err, "max_residual": res.max_residual})
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["s_re", "s_im", "status", "m_re", "m_im", "rel_err",
                                                    "max_residual"])
            writer.writeheader()
            writer.writerows(rows)


if __name__ == "__main__":
    main()
