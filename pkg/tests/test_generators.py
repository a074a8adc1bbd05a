import pytest
from hypothesis import given, settings

from groupsys import fixtures as F
from groupsys.errors import TransversalDeficit
from groupsys.generators import (
    _check_transversal,
    build_basis,
    granule,
    selection_of,
    slots,
    tensor_from_selection,
    validate_tensor,
)
from groupsys.system import build_canonic_trellis
from oracles import granule_order, small_codes


def test_slot_order():
    assert slots(1) == [(0, 1), (1, 1), (0, 0)]
    assert slots(2)[:3] == [(0, 2), (1, 2), (2, 2)]


@pytest.mark.parametrize("name", F.CODES)
def test_granule_orders_match_oracle(name):
    sys_ = F.system(name)
    code = sys_.code
    for (s, k), gens in sys_.basis.gens.items():
        assert len(gens) == granule_order(code, s, k), (s, k)


@settings(max_examples=20, deadline=None)
@given(small_codes(max_size=32))
def test_random_granules(code):
    basis = build_basis(build_canonic_trellis(code))
    total = 1
    for (s, k), gens in basis.gens.items():
        assert len(gens) == granule_order(code, s, k)
        total *= len(gens)
    assert total == code.size


def test_h8_generators():
    sys_ = F.system("h8")
    code = sys_.code
    spans = {key: len(g) for key, g in sys_.basis.gens.items()}
    assert spans[(0, 3)] == 2
    assert all(spans[(s, 1)] == 2 for s in range(3))
    assert all(spans[(s, k)] == 1 for (s, k) in spans if k in (0, 2))
    words = sorted(code.word(g.codeword) for g in sys_.basis.nontrivial())
    assert words == sorted(F.H8_PREFERRED)


def test_least_codeword_default():
    basis = build_basis(build_canonic_trellis(F.h8()))
    longest = basis.at(0, 3)[1]
    assert basis.trellis.code.word(longest.codeword) == (1, 1, 1, 1)
    gam = granule(basis.trellis.code, 0, 3)
    assert gam.order == 2


def test_selection_round_trip():
    sys_ = F.system("s3chain")
    for (s, k), gens in sys_.basis.gens.items():
        for p in range(1, len(gens)):
            tensor = tensor_from_selection(sys_.basis, {(s, k): p})
            assert validate_tensor(tensor, sys_.basis)
            assert selection_of(tensor) == {(s, k): p}
    with pytest.raises(IndexError):
        tensor_from_selection(sys_.basis, {(0, 1): 99})


def test_transversal_deficit():
    B = F.system("h8").trellis.groups[1]
    with pytest.raises(TransversalDeficit):
        _check_transversal([0], B.whole(), B.trivial(), "demo")
