"""Cumulative dimensions of the built-in algebras, by rewriting and by linear algebra."""
import argparse

from hgsys.cache import Context
from hgsys.cartan import BUILTIN_DATA
from hgsys.constructions import kashiwara_presentation, uhat_presentation, uprime_presentation, uq_presentation
from hgsys.engine import graded_dimension
from hgsys.oracle import bruteforce_dimension

MAKERS = {"Uq": uq_presentation, "Uhat": uhat_presentation, "Uprime": uprime_presentation,
          "B": kashiwara_presentation}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--data", nargs="*", default=list(BUILTIN_DATA))
    ap.add_argument("--oracle-max-degree", type=int, default=3,
                    help="skip the linear-algebra count above this degree for rank > 1")
    args = ap.parse_args()
    ctx = Context()
    print(f"{'algebra':14s}" + "".join(f"{d:>12d}" for d in range(args.degree + 1)))
    for name in args.data:
        c = BUILTIN_DATA[name]
        for kind, make in MAKERS.items():
            pres = make(c)
            s = ctx.complete(pres)
            cells = []
            for d in range(args.degree + 1):
                a = graded_dimension(s, d)
                if c.rank > 1 and d > args.oracle_max_degree:
                    cells.append(f"{a}/-")
                else:
                    b = bruteforce_dimension(pres, d)
                    cells.append(f"{a}/{b}" + ("" if a == b else "!"))
            print(f"{pres.name:14s}" + "".join(f"{x:>12s}" for x in cells))


if __name__ == "__main__":
    main()
