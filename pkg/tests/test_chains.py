import pytest
from hypothesis import given, settings

from groupsys import fixtures as F
from groupsys.chains import (
    compute_X,
    compute_Y,
    controllability_index,
    delta,
    static_entry,
    static_matrix,
    verify_chain_properties,
)
from groupsys.system import build_canonic_trellis
from oracles import ell_oracle, small_codes


@pytest.mark.parametrize("name", F.CODES)
def test_ell_matches_span_oracle(name):
    code = F.load_code(name)
    assert controllability_index(build_canonic_trellis(code)) == ell_oracle(code)


@pytest.mark.parametrize("name", F.CODES)
def test_chain_certificate(name):
    rep = verify_chain_properties(F.system(name).trellis)
    assert rep.ok, rep.format()


@settings(max_examples=20, deadline=None)
@given(small_codes(max_size=32))
def test_random_codes_chain_certificate(code):
    tr = build_canonic_trellis(code)
    assert controllability_index(tr) == ell_oracle(code)
    rep = verify_chain_properties(tr)
    assert rep.ok, rep.format()


def test_chain_ends():
    tr = F.system("h8").trellis
    ell = controllability_index(tr)
    for t in range(tr.length):
        B = tr.groups[t]
        assert compute_X(tr, t, -1) == B.trivial() and compute_Y(tr, t, -1) == B.trivial()
        assert len(compute_X(tr, t, ell)) == B.order
        assert len(compute_Y(tr, t, ell)) == B.order


def test_h8_chain_orders():
    tr = F.system("h8").trellis
    assert [len(compute_X(tr, 1, j)) for j in range(-1, 4)] == [1, 2, 8, 8, 8]
    assert [len(compute_Y(tr, 1, i)) for i in range(-1, 4)] == [1, 2, 4, 8, 8]
    # span-4 segment words at time 0 give the only nontrivial delta there
    assert [len(delta(tr, 0, k)) for k in range(4)] == [1, 2, 2, 4]


def test_static_matrix_columns_nest():
    tr = F.system("s3chain").trellis
    m = static_matrix(tr, 1)
    for j in range(m.ell + 2):
        col = m.column(j)
        assert all(a.issubset(b) for a, b in zip(col, col[1:]))
    assert static_entry(tr, 1, 0, -1) == tr.groups[1].trivial()
