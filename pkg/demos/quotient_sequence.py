"""Peel a code into the nested subcodes C_k generated by words of span at
most k+1, and show each quotient C / C_(k-1) as a trellis product."""

from groupsys import fixtures
from groupsys.signature import (
    column_terms,
    controllable_subcode,
    quotient_sequence_check,
    trellis_product_group,
)


def main():
    for name in ("s3chain", "h8"):
        system = fixtures.system(name)
        print(f"{name}: |C| = {system.code.size}, ell = {system.ell}")
        for k in range(system.ell + 1):
            low = controllable_subcode(system, k - 1)
            P = trellis_product_group(system, column_terms(system, k))
            print(f"  k={k}: |C_(k-1)| = {len(low):3d}   |C / C_(k-1)| = {P.order}")
        rep = quotient_sequence_check(system)
        print("  " + rep.format().replace("\n", "\n  "))


if __name__ == "__main__":
    main()
