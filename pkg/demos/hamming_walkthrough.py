"""Analyze the extended Hamming code as a group system over V4.

Shows the trellis profile, the generator basis in its textbook form, one
encode/decode round and the four cosets of the kernel of the map onto two
corner groups.
"""

from groupsys import fixtures
from groupsys.encoder import analyze
from groupsys.generators import format_basis, selection_of, tensor_from_selection
from groupsys.signature import hom_C_to_product


def main():
    code = fixtures.h8()
    system = analyze(code, prefer=fixtures.H8_PREFERRED)
    tr = system.trellis
    print(f"{code.name}: {code.size} codewords of length {code.length}")
    print("states:", [s.order for s in tr.states], "branches:", [g.order for g in tr.groups])
    print(format_basis(system.basis))

    # pick the span-4 generator and the middle span-2 generator
    sel = {(0, 3): 1, (1, 1): 1}
    c = system.encode_codeword(tensor_from_selection(system.basis, sel))
    print("\nencode", sel, "->", code.word(c))
    print("decode back ->", selection_of(system.decode_codeword(c)))

    hom = hom_C_to_product(system, [(3, 0), (1, 1)])
    print(f"\nC -> product of two corners: image {hom.product.order}, kernel {len(hom.kernel)}")
    for fiber in hom.fibers:
        print("  ", " ".join("".join(map(str, code.word(w))) for w in fiber))


if __name__ == "__main__":
    main()
