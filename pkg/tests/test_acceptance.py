"""Acceptance criteria, one test each.

Every test prints a single `PASS criterion N: ...` or `FAIL criterion N: ...`
line, and the run ends with the same lines collected in a summary section.
Run `pytest tests/test_acceptance.py -s` to see them inline, or execute this
file directly.
"""

import itertools
import time
from contextlib import contextmanager

import pytest

import conftest
from groupsys import fixtures as F
from groupsys.algebra import is_normal
from groupsys.chains import controllability_index, verify_chain_properties
from groupsys.encoder import analyze
from groupsys.generators import granule, tensor_from_selection
from groupsys.signature import (
    block_report,
    column_terms,
    controllable_subcode,
    hom_C_to_product,
    quotient_sequence_check,
    trellis_product_group,
    verify_signature_group,
    verify_signature_sequence,
)
from groupsys.synthesis import realize, synthesize
from oracles import ell_oracle, granule_order, span_subcode


@contextmanager
def criterion(n, text):
    try:
        yield
    except BaseException:
        conftest.ACCEPTANCE[n] = (False, text)
        print(f"FAIL criterion {n}: {text}")
        raise
    # a parametrized criterion passes only if every case does
    if conftest.ACCEPTANCE.get(n, (True,))[0]:
        conftest.ACCEPTANCE[n] = (True, text)
    print(f"PASS criterion {n}: {text}")


def synthesized(name):
    return realize(synthesize(F.load_spec(name)))


def word_str(code, c):
    return "".join(map(str, code.word(c)))


def test_criterion_1_hamming():
    with criterion(1, "H8 has 16 codewords, ell = 3 and the expected granule orders, in under 1 s"):
        start = time.perf_counter()
        code = F.h8()
        system = analyze(code, prefer=F.H8_PREFERRED)
        want = {(0, 3): 2, (0, 1): 2, (1, 1): 2, (2, 1): 2}
        got = {(t, k): granule(code, t, k).order for k in range(4) for t in range(4 - k)}
        elapsed = time.perf_counter() - start
        assert code.size == 16
        assert system.ell == 3 == ell_oracle(code)
        for (t, k), order in got.items():
            assert order == want.get((t, k), 1), (t, k)
            assert order == granule_order(code, t, k)
        assert elapsed < 1.0, f"{elapsed:.2f} s"


FIBER_QUARTETS = [
    {"0000", "0033", "3300", "3333"},
    {"0303", "0330", "3003", "3030"},
    {"1111", "1122", "2211", "2222"},
    {"1212", "1221", "2112", "2121"},
]


def test_criterion_2_fibers():
    with criterion(2, "fibers over ((0,3)@0, (0,1)@1) are the four quartets; the first is normal"):
        system = F.system("h8")
        hom = hom_C_to_product(system, [(3, 0), (1, 1)])
        assert hom.ok
        got = [{word_str(system.code, c) for c in f} for f in hom.fibers]
        assert got == FIBER_QUARTETS
        assert set(hom.kernel.members) == set(hom.fibers[0])
        assert is_normal(hom.kernel)


STACK = [
    ["H_{0,2}^{t}"],
    ["H_{0,1}^{t+1}", "H_{0,1}^{t}"],
    ["H_{0,0}^{t+2}", "H_{0,0}^{t+1}", "H_{0,0}^{t}"],
]

SINGLES = {
    "tri_{0,2}^{t}": "{r_{0,2}^{t}}",
    "tri_{0,1}^{t}": "{r_{0,1}^{t}} x {r_{0,2}^{t}} x 1_{0,2}^{t-1}",
    "tri_{0,1}^{t+1}": "{r_{0,1}^{t+1}} x 1_{0,2}^{t+1} x {r_{0,2}^{t}}",
    "tri_{0,0}^{t}": "{r_{0,0}^{t}} x {r_{0,1}^{t}} x {r_{0,2}^{t}} x 1_{0,1}^{t-1} x 1_{0,2}^{t-1} x 1_{0,2}^{t-2}",
    "tri_{0,0}^{t+1}": "{r_{0,0}^{t+1}} x {r_{0,1}^{t+1}} x 1_{0,2}^{t+1} x {r_{0,1}^{t}} x {r_{0,2}^{t}} x 1_{0,2}^{t-1}",
    "tri_{0,0}^{t+2}": "{r_{0,0}^{t+2}} x 1_{0,1}^{t+2} x 1_{0,2}^{t+2} x {r_{0,1}^{t+1}} x 1_{0,2}^{t+1} x {r_{0,2}^{t}}",
}

PRODUCTS = {
    "tri_{0,1}^{t+1} join tri_{0,1}^{t}": "{r_{0,1}^{t+1}} x {r_{0,1}^{t}} x {r_{0,2}^{t}}",
    "tri_{0,1}^{t+1} join tri_{0,0}^{t}": "{r_{0,1}^{t+1}} x {r_{0,0}^{t}} x {r_{0,1}^{t}} x {r_{0,2}^{t}}",
    "tri_{0,0}^{t+1} join tri_{0,0}^{t}":
        "{r_{0,0}^{t+1}} x {r_{0,1}^{t+1}} x {r_{0,0}^{t}} x {r_{0,1}^{t}} x {r_{0,2}^{t}}",
    "tri_{0,0}^{t+2} join tri_{0,1}^{t}": "{r_{0,0}^{t+2}} x {r_{0,1}^{t+1}} x {r_{0,1}^{t}} x {r_{0,2}^{t}}",
    "tri_{0,0}^{t+2} join tri_{0,0}^{t}":
        "{r_{0,0}^{t+2}} x {r_{0,1}^{t+1}} x {r_{0,0}^{t}} x {r_{0,1}^{t}} x {r_{0,2}^{t}}",
    "tri_{0,0}^{t+2} join tri_{0,0}^{t+1}":
        "{r_{0,0}^{t+2}} x {r_{0,0}^{t+1}} x {r_{0,1}^{t+1}} x {r_{0,1}^{t}} x {r_{0,2}^{t}}",
    "tri_{0,0}^{t+2} join tri_{0,0}^{t+1} join tri_{0,0}^{t}":
        "{r_{0,0}^{t+2}} x {r_{0,0}^{t+1}} x {r_{0,1}^{t+1}} x {r_{0,0}^{t}} x {r_{0,1}^{t}} x {r_{0,2}^{t}}",
}


def parse_rows(text, section):
    lines = text.split("\n")
    start = lines.index(section) + 1
    rows = {}
    for ln in lines[start:]:
        if not ln.strip():
            break
        name, comp, _ = [p.strip() for p in ln.split("|")]
        rows[name] = comp
    return rows


def test_criterion_3_block_template():
    with criterion(3, "ell = 2 block report matches the group stack and set compositions"):
        real = synthesized("block2")
        rep = block_report(real.system)
        assert rep.checks.ok, rep.checks.format()
        text = rep.format()
        lines = text.split("\n")
        top = lines.index("group stack") + 1
        stack = [[tok for tok in ln.split() if tok.startswith("H_")] for ln in lines[top:top + 3]]
        assert stack == STACK
        singles = parse_rows(text, "single corners")
        assert singles == SINGLES
        assert parse_rows(text, "corner products") == PRODUCTS
        sizes = {(n, k): len(lab) for (n, k), lab in real.signature.points.items()}
        for row in rep.singles + rep.products:
            want = 1
            for m, k in row.live:
                want *= sizes.get((m, k), 1)
            assert row.order == want


def encoder_bijection(system):
    basis = system.basis
    keys = [key for key, gens in sorted(basis.gens.items()) if len(gens) > 1]
    seen = set()
    for choice in itertools.product(*(range(len(basis.gens[key])) for key in keys)):
        sel = {key: p for key, p in zip(keys, choice) if p}
        tensor = tensor_from_selection(basis, sel)
        c = system.encode_codeword(tensor)
        assert system.decode_codeword(c) == tensor
        seen.add(c)
    assert len(seen) == system.code.size
    for c in range(system.code.size):
        path = system.trellis.path_of(c)
        assert system.encode_path(system.decode_path(path)) == path


def test_criterion_4_encoder_bijection():
    with criterion(4, "encoder is a bijection on every fixture and synthesized system"):
        for name in F.CODES:
            encoder_bijection(F.system(name))
        for name in F.SPECS:
            encoder_bijection(synthesized(name).system)


def test_criterion_5_chain_properties():
    with criterion(5, "diagonal identity, shift property, equal row indices and rectangles on all fixtures"):
        for name in F.CODES:
            tr = F.system(name).trellis
            assert controllability_index(tr) == ell_oracle(F.load_code(name))
            rep = verify_chain_properties(tr)
            assert rep.ok, rep.format()
            for head in ("diagonal identity", "shift property", "equal row indices", "rectangle"):
                assert rep.summary()[head][0] > 0


def test_criterion_6_signatures():
    with criterion(6, "signature sequence on every fixture; signature group on period-1 fixtures"):
        period1 = 0
        for name in F.CODES:
            system = F.system(name)
            rep = verify_signature_sequence(system)
            assert rep.ok, rep.format()
            if system.code.period1:
                period1 += 1
                assert verify_signature_group(system).ok
        real = synthesized("z2group")
        assert real.code.period1 and verify_signature_group(real.system).ok
        assert period1 >= 1


def test_criterion_7_quotient_sequence():
    with criterion(7, "C/C_(k-1) matches U(i_k) for every k; H8 has |C_1| = 8"):
        for name in F.CODES:
            system = F.system(name)
            rep = quotient_sequence_check(system)
            assert rep.ok, rep.format()
            for k in range(system.ell + 1):
                low = len(controllable_subcode(system, k - 1))
                U = trellis_product_group(system, column_terms(system, k))
                assert low * U.order == system.code.size
                assert low == len(span_subcode(system.code, k - 1))
            assert len(controllable_subcode(system, system.ell)) == system.code.size
        h8 = F.system("h8")
        assert len(controllable_subcode(h8, 1)) == 8 == len(span_subcode(h8.code, 1))


@pytest.mark.parametrize("name", ["trivial", "z2seq", "z2group", "block2"])
def test_criterion_8_round_trip(name):
    n = 8
    text = "analysis of each realized signature (trivial, z2seq, z2group, block2) gives it back, each under 60 s"
    with criterion(n, text):
        start = time.perf_counter()
        spec = F.load_spec(name)
        real = realize(synthesize(spec))
        assert real.ok
        assert real.system.ell == spec.ell
        assert time.perf_counter() - start < 60


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
