"""Lengths of the short refutation vs the RML refutation r1 as n grows."""
import argparse

from mergeres.families import FamilyParams, build_res_ub, build_rml_r1, gen_family


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--l", type=int, default=4)
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 32, 64], help="m = n values")
    args = ap.parse_args()
    print(f"{'m=n':>5} {'vars':>6} {'clauses':>8} {'res_ub':>8} {'r1':>8} {'ratio':>7}")
    for n in args.sizes:
        prm = FamilyParams(args.l, n, n)
        f, _ = gen_family(prm)
        a, b = len(build_res_ub(prm)), len(build_rml_r1(prm))
        print(f"{n:>5} {f.num_vars:>6} {len(f.clauses):>8} {a:>8} {b:>8} {b / a:>7.2f}")


if __name__ == "__main__":
    main()
