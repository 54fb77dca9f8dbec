"""Mutation sensitivity of the bundle checks: sampled or exhaustive over all mutation sites."""
import argparse
from collections import Counter

from hgsys.cache import Context
from hgsys.cartan import BUILTIN_DATA, heisenberg_datum, weyl_datum
from hgsys.constructions import kashiwara_bundle, sridharan_bundle
from hgsys.mutations import MutationOutcome, apply_mutation, mutation_sites, run_mutation_harness
from hgsys.verifier import check_bundle


def bundles(ctx):
    for name, c in BUILTIN_DATA.items():
        yield kashiwara_bundle(c, ctx)
    for datum in (weyl_datum, heisenberg_datum):
        yield sridharan_bundle(*datum(), ctx)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--exhaustive", action="store_true", help="try every site (slow on rank 2)")
    args = ap.parse_args()
    ctx = Context()
    for b in bundles(ctx):
        if args.exhaustive:
            outs = []
            for m in mutation_sites(b):
                rep = check_bundle(apply_mutation(b, m))
                f = rep.failures()
                outs.append(MutationOutcome(m, rep.status, f[0].label if f else ""))
        else:
            outs = run_mutation_harness(b, args.count, args.seed)
        caught = sum(o.caught for o in outs)
        print(f"{b.name:24s} caught {caught}/{len(outs)}")
        for o in outs:
            if not o.caught:
                print(f"    missed: {o.mutation.describe()} ({o.status})")
        by = Counter(o.caught_by.split(" ")[0] for o in outs if o.caught)
        print("    first failing check:", ", ".join(f"{k} x{v}" for k, v in by.most_common(5)))


if __name__ == "__main__":
    main()
