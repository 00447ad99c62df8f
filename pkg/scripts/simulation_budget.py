"""Simulate the short resolution refutation in RML and LREML and compare with (2n+1)L+n."""
import argparse
import time

from mergeres.families import FamilyParams, build_res_ub, gen_family
from mergeres.proof import check_valid
from mergeres.systems import classify
from mergeres.transform import simulate_lreml, simulate_rml


def parse_lmn(s):
    l, m, n = (int(x) for x in s.split(","))
    return FamilyParams(l, m, n)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("instances", nargs="*", type=parse_lmn, default=None,
                    help="l,m,n triples (default 2,2,3 4,4,4 4,8,8)")
    args = ap.parse_args()
    insts = args.instances or [FamilyParams(2, 2, 3), FamilyParams(4, 4, 4), FamilyParams(4, 8, 8)]
    print(f"{'instance':>10} {'target':>6} {'L':>6} {'out':>6} {'budget':>8} {'valid':>5} {'flag':>5} {'secs':>6}")
    for prm in insts:
        f, _ = gen_family(prm)
        pi = build_res_ub(prm)
        budget = (2 * f.num_vars + 1) * len(pi) + f.num_vars
        for name, sim in (("rml", simulate_rml), ("lreml", simulate_lreml)):
            t0 = time.perf_counter()
            out = sim(pi, f)
            dt = time.perf_counter() - t0
            ok = bool(check_valid(out, f, require_refutation=True))
            flag = classify(out, f).flag(name)
            inst = f"{prm.l},{prm.m},{prm.n}"
            print(f"{inst:>10} {name:>6} {len(pi):>6} {len(out):>6} {budget:>8} "
                  f"{str(ok):>5} {str(flag):>5} {dt:>6.2f}")


if __name__ == "__main__":
    main()
