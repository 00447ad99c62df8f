"""Random block restrictions on a refutation of F_{l,m,n}: surviving blocks,
block width of the restricted clauses, and the first qualifying sample."""
import argparse
from collections import Counter

from mergeres.analysis import (find_respecting_restriction, is_k_respecting, mu_histogram,
                               sample_qualifies, sample_restriction)
from mergeres.families import FamilyParams, build_res_ub, build_rml_r1, gen_family


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--l", type=int, default=8)
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--proof", choices=("res-ub", "rml-r1"), default="rml-r1")
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    prm = FamilyParams(args.l, args.m, args.n)
    _, lay = gen_family(prm)
    p = (build_res_ub if args.proof == "res-ub" else build_rml_r1)(prm)
    print(f"proof={args.proof} length={len(p)} mu_histogram={mu_histogram(p, lay)}")
    surv, quals, resp = Counter(), 0, 0
    for t in range(args.samples):
        s = sample_restriction(lay, args.seed + t)
        surv[len(s.surviving)] += 1
        quals += sample_qualifies(p, lay, s)
        # strict isomorphism needs the last block free
        if s.surviving and s.J[-1] == "*":
            resp += is_k_respecting(s.restriction, lay, len(s.surviving))
    print(f"samples={args.samples} qualifying={quals} k_respecting(last block free)={resp}")
    print("surviving blocks histogram:", dict(sorted(surv.items())))
    s = find_respecting_restriction(p, lay, seed=args.seed)
    print("first qualifying sample:", "none" if s is None else f"seed={s.seed} J={s.J}")


if __name__ == "__main__":
    main()
