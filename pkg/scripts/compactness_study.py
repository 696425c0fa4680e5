"""Singular values of the cuspidal block of the convolution operator under grid refinement."""
import argparse

from eisencont.config import GridConfig
from eisencont.sl2 import hs_compactness_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", default="16x40,32x80,64x160", help="comma-separated nx x ny grids")
    ap.add_argument("--threshold", type=float, default=1e-3)
    ap.add_argument("--margin", type=float, default=0.05)
    args = ap.parse_args()

    print(f"{'grid':>10} {'frobenius':>10} {'k0':>4} {'tail max':>10}  sigma_k/sigma_1 for k = 50..65")
    for level in args.levels.split(","):
        nx, ny = (int(v) for v in level.lower().split("x"))
        rep = hs_compactness_report(grid_cfg=GridConfig(nx=nx, ny=ny), tail_threshold=args.threshold,
                                    margin=args.margin)
        sv = rep.singular_values / rep.singular_values[0]
        window = " ".join(f"{v:.2e}" for v in sv[50:66:2])
        print(f"{level:>10} {rep.frobenius:10.5f} {rep.k0:4d} {sv[rep.k0:].max():10.2e}  {window}")


if __name__ == "__main__":
    main()
