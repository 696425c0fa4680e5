"""Locate the pole of the continued m near s = 1 and estimate its residue."""
import argparse
import math

from eisencont.sl2 import locate_pole


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=float, default=0.9)
    ap.add_argument("--hi", type=float, default=1.1)
    ap.add_argument("--n-scan", type=int, default=21)
    ap.add_argument("--radius", type=float, default=0.05, help="contour radius for the residue")
    args = ap.parse_args()

    rep = locate_pole(re_range=(args.lo, args.hi), n_scan=args.n_scan, contour_radius=args.radius)
    for x, d in rep.scan:
        print(f"  Re s = {x:.3f}   |d| = {abs(d):.3e}")
    print(f"pole    : {rep.location:.12f}")
    print(f"residue : {rep.residue:.10f}   (3/pi = {3 / math.pi:.10f})")


if __name__ == "__main__":
    main()
