import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from groupsys import fixtures as F
from groupsys.algebra import check_isomorphism_via_bijection
from groupsys.encoder import analyze, chain_order, encode_order, triangle_positions
from groupsys.errors import ForeignRepresentative, ShiftViolation
from groupsys.generators import RepStaticMatrix, tensor_from_selection
from oracles import small_codes


def all_selections(basis):
    keys = [key for key, gens in sorted(basis.gens.items()) if len(gens) > 1]
    for choice in itertools.product(*(range(len(basis.gens[key])) for key in keys)):
        yield {key: p for key, p in zip(keys, choice) if p}


def check_bijection(system):
    seen = set()
    for sel in all_selections(system.basis):
        tensor = tensor_from_selection(system.basis, sel)
        c = system.encode_codeword(tensor)
        assert c == system.encode_by_generators(sel)
        assert system.decode_codeword(c) == tensor
        seen.add(c)
    assert len(seen) == system.code.size
    for c in range(system.code.size):
        path = system.trellis.path_of(c)
        assert system.encode_path(system.decode_path(path)) == path


def test_orders():
    assert encode_order(1) == [(1, 1), (0, 1), (0, 0)]
    assert chain_order(1) == [(0, 0), (0, 1), (1, 1)]
    assert triangle_positions(0, 0, 1) == [(0, 1), (1, 1), (0, 0)]
    assert triangle_positions(1, 2, 3) == [(1, 3), (2, 3), (1, 2)]


@pytest.mark.parametrize("name", F.CODES)
def test_fixture_encoder_bijection(name):
    check_bijection(F.system(name))


@settings(max_examples=20, deadline=None)
@given(small_codes(max_size=32))
def test_random_encoder_bijection(code):
    check_bijection(analyze(code))


def test_induced_group_transports_branch_group():
    sys_ = F.system("s3chain")
    for t in range(sys_.length):
        comp = sys_.component_group(t)
        B = comp.group
        for a, b in itertools.product(range(B.order), repeat=2):
            prod = sys_.induced_product(comp.carrier[a], comp.carrier[b])
            assert prod == comp.carrier[B.mul(a, b)]


def test_triangle_groups_are_quotients():
    sys_ = F.system("h8")
    for t in range(sys_.length):
        for j, k in [(j, k) for k in range(sys_.ell + 1) for j in range(k + 1)]:
            tri = sys_.triangle_group(j, k, t, "r")
            assert tri.order == sys_.triangle_order_expected(j, k, t)
            assert len(np.unique(tri.of_branch)) == tri.order


def test_congruent_map_is_isomorphism():
    sys_ = F.system("z2rate1")
    f = sys_.congruent_map(0, 1, 1)
    A = sys_.triangle_group(0, 1, 1)
    B = sys_.triangle_group(1, 1, 2)
    assert check_isomorphism_via_bijection(f, A.group, B.group)


def test_rejects_bad_tensors():
    sys_ = F.system("h8")
    tensor = list(tensor_from_selection(sys_.basis, {(0, 3): 1}))
    m = tensor[1]
    bad = RepStaticMatrix(m.t, m.ell, tuple(7 if i == 0 else v for i, v in enumerate(m.values)), m.prov)
    with pytest.raises(ForeignRepresentative):
        sys_.encode_component(bad)
    tensor[1] = tensor_from_selection(sys_.basis, {})[1]
    with pytest.raises(ShiftViolation):
        sys_.encode_path(tuple(tensor))
