import numpy as np
import pytest

from groupsys import fixtures as F
from groupsys.algebra import is_normal
from groupsys.errors import NotTimeInvariant, OverlapConflict
from groupsys.signature import (
    CompressedTensor,
    InducedSequence,
    block_report,
    cartesian_gap,
    check_product_projection,
    check_signature_sequence,
    codeword_of_compressed,
    compress_codeword,
    controllable_subcode,
    expand,
    hom_C_to_product,
    induced_sequence,
    quotient_sequence_check,
    selection_of_compressed,
    signature_group,
    sliding_compress,
    trellis_product_group,
    u_of_codeword,
    verify_signature_group,
    verify_signature_sequence,
)
from oracles import elementary_abelian_2, span_subcode

FIBER_QUARTETS = [
    {"0000", "0033", "3300", "3333"},
    {"0303", "0330", "3003", "3030"},
    {"1111", "1122", "2211", "2222"},
    {"1212", "1221", "2112", "2121"},
]


def word_str(code, c):
    return "".join(map(str, code.word(c)))


@pytest.mark.parametrize("name", F.CODES)
def test_signature_sequence_on_fixtures(name):
    rep = verify_signature_sequence(F.system(name))
    assert rep.ok, rep.format()


def test_signature_group_on_period1_fixture():
    sys_ = F.system("z2rate1")
    rep = verify_signature_group(sys_)
    assert rep.ok, rep.format()
    _, G = signature_group(sys_)
    assert G.order == 4 and elementary_abelian_2(G.table)


def test_signature_group_needs_time_invariance():
    with pytest.raises(NotTimeInvariant):
        verify_signature_group(F.system("h8"))


def test_corrupted_table_is_caught():
    seq = induced_sequence(F.system("h8"))
    tables = [t.copy() for t in seq.tables]
    T = tables[1]
    a, b = 1, 2
    T[a, b], T[a, b + 1] = T[a, b + 1], T[a, b]
    bad = InducedSequence(seq.ell, seq.rows, tables)
    rep = check_signature_sequence(bad)
    assert not rep.ok
    assert check_signature_sequence(seq).ok


def test_broken_slice_equality_is_caught():
    seq = induced_sequence(F.system("z2rate1"))
    rows = [r.copy() for r in seq.rows]
    # relabel the (1,1) slot at time 2 so it no longer repeats (0,1) at time 1
    rows[2][:, 1] = np.where(rows[2][:, 1] > 0, rows[2][:, 1] + 5, 0)
    rep = check_signature_sequence(InducedSequence(seq.ell, rows, seq.tables))
    assert any(name.startswith("(ii)c") for name, ok, _ in rep.failures())


def test_fibers_over_two_corners():
    sys_ = F.system("h8")
    hom = hom_C_to_product(sys_, [(3, 0), (1, 1)])
    assert hom.ok
    got = [{word_str(sys_.code, c) for c in f} for f in hom.fibers]
    assert got == FIBER_QUARTETS
    assert is_normal(hom.kernel)


def test_h8_subcode_and_gap():
    sys_ = F.system("h8")
    assert len(controllable_subcode(sys_, 1)) == len(span_subcode(sys_.code, 1)) == 8
    assert cartesian_gap(sys_, [(3, 0), (1, 1)]) == (4, 8)


@pytest.mark.parametrize("name", F.CODES)
def test_quotient_sequence(name):
    sys_ = F.system(name)
    rep = quotient_sequence_check(sys_)
    assert rep.ok, rep.format()
    for k in range(sys_.ell + 1):
        assert len(controllable_subcode(sys_, k)) == len(span_subcode(sys_.code, k))


def test_products_project_onto_nested_terms():
    sys_ = F.system("h8")
    assert check_product_projection(sys_, [(0, 1), (1, 2)], [(1, 1), (3, 2)])
    with pytest.raises(ValueError):
        check_product_projection(sys_, [(1, 1)], [(0, 1)])


def test_product_order_times_kernel():
    sys_ = F.system("s3chain")
    for terms in ([(1, 0)], [(1, 0), (0, 1)], [(0, 1), (1, 2)]):
        P = trellis_product_group(sys_, terms)
        hom = hom_C_to_product(sys_, terms)
        assert hom.ok and P.order * len(hom.kernel) == sys_.code.size


@pytest.mark.parametrize("name", ["h8", "s3chain", "z2rate1"])
def test_sliding_compression(name):
    sys_ = F.system(name)
    seen = set()
    for c in range(sys_.code.size):
        cu = compress_codeword(sys_, c)
        assert codeword_of_compressed(sys_, cu) == c
        assert expand(sys_, cu) == u_of_codeword(sys_, c)
        seen.add(cu)
    assert len(seen) == sys_.code.size


def test_compression_rejects_disagreement():
    sys_ = F.system("h8")
    u = list(u_of_codeword(sys_, sys_.code.index_of((2, 2, 2, 2))))
    comp = u[1]
    vals = list(comp.values)
    vals[1] = vals[1] + 1  # slot (1,3) disagrees with slot (0,3) one step earlier
    u[1] = type(comp)(comp.t, comp.ell, tuple(vals))
    with pytest.raises(OverlapConflict):
        sliding_compress(u)
    with pytest.raises(OverlapConflict):
        selection_of_compressed(sys_, CompressedTensor(3, (((0, 3), 99),)))


def test_h8_block_report():
    rep = block_report(F.system("h8"))
    assert rep.checks.ok, rep.checks.format()
    assert [[o for _, _, o in row] for row in rep.stack] == [[2], [2, 2], [4, 4, 4], [4, 8, 8, 4]]
    terms = [f.terms for f in rep.singles]
    assert len(terms) == 10 and len(rep.products) == 17
    text = rep.format()
    assert "H_{0,3}^{t} (2)" in text
    assert "[0 0 0 3 0 2] <- 1 1 1 1, 1 1 2 2, 1 2 1 2, 1 2 2 1" in text
    assert sorted(p.order for p in rep.products) == [8] * 8 + [16] * 9
