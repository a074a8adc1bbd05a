"""Command-line entry point: `groupsys <command> ...`.

Exit status is 0 when every certificate a command prints passes, 1 when one
fails, and 2 for unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from .chains import (
    format_chains,
    format_matrix,
    shift_matrix,
    static_matrix,
    verify_chain_properties,
)
from .encoder import GroupSystem, analyze
from .errors import FormatError, GroupSysError
from .generators import format_basis, format_tensor, selection_of, tensor_from_selection
from .signature import (
    block_report,
    controllable_subcode,
    column_terms,
    hom_C_to_product,
    quotient_sequence_check,
    signature_group,
    trellis_product_group,
    verify_signature_group,
    verify_signature_sequence,
)
from .synthesis import (
    DEFAULT_BUDGET,
    format_signature,
    load_level_spec,
    realize,
    synthesize,
    verify_construction,
)
from .system import BlockCode, load_block_code, write_block_code


class _Out:
    """Collects report text; `ok` tracks every certificate seen."""

    def __init__(self):
        self.lines: list[str] = []
        self.ok = True

    def __call__(self, text: str = "") -> None:
        self.lines.append(text.rstrip("\n"))

    def cert(self, report) -> None:
        self(report.format())
        self.ok = self.ok and report.ok

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


# input helpers

def parse_symbols(tokens: Sequence[str], code: BlockCode, where: str = "") -> tuple[int, ...]:
    """Symbols as integers; a 0/1 string is read in binary when the integer
    reading falls outside an alphabet of order 2^len (so `10` is 2 in V4)."""
    out = []
    if len(tokens) != code.length:
        raise FormatError(f"{where}word has {len(tokens)} symbols, expected {code.length}")
    for t, (tok, A) in enumerate(zip(tokens, code.alphabets)):
        try:
            x = int(tok)
        except ValueError:
            raise FormatError(f"{where}bad symbol {tok!r}") from None
        if not 0 <= x < A.order and set(tok) <= {"0", "1"} and 2 ** len(tok) == A.order:
            x = int(tok, 2)
        if not 0 <= x < A.order:
            raise FormatError(f"{where}symbol {tok!r} at {t} outside alphabet {A.name}")
        out.append(x)
    return tuple(out)


def _word_tokens(line: str) -> list[str]:
    for ch in "(),":
        line = line.replace(ch, " ")
    return line.split()


def read_words(path: str, code: BlockCode) -> list[tuple[int, ...]]:
    """One word per non-blank line; parentheses and commas are ignored."""
    words = []
    with open(path, encoding="utf-8") as fh:
        for no, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                words.append(parse_symbols(_word_tokens(line), code, f"{path}:{no}: "))
    return words


def parse_selection(text: str, system: GroupSystem, path: str | None = None) -> dict:
    """Tensor file: `tensor`, then `gen <start> <k> <index>` lines or
    `t <time>` headers followed by `r <j> <k> <branch>` lines, then `end`."""
    lines = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines or lines[0][1] != "tensor":
        raise FormatError("expected 'tensor'", lines[0][0] if lines else None, path)
    if lines[-1][1] != "end":
        raise FormatError("missing 'end'", None, path)
    basis = system.basis
    sel: dict = {}
    t = None

    def choose(no: int, key: tuple, p: int) -> None:
        if not 0 <= p < len(basis.at(*key)):
            raise FormatError(f"no generator {p} at start {key[0]}, k={key[1]}", no, path)
        if sel.get(key, p) != p:
            raise FormatError(f"conflicting generators at start {key[0]}, k={key[1]}", no, path)
        if p:
            sel[key] = p

    for no, ln in lines[1:-1]:
        parts = ln.split()
        try:
            nums = [int(x) for x in parts[1:]]
        except ValueError:
            raise FormatError(f"bad line {ln!r}", no, path) from None
        if parts[0] == "t" and len(nums) == 1:
            t = nums[0]
        elif parts[0] == "gen" and len(nums) == 3:
            choose(no, (nums[0], nums[1]), nums[2])
        elif parts[0] == "r" and len(nums) == 3 and t is not None:
            j, k, v = nums
            if not 0 <= j <= k <= system.ell:
                raise FormatError(f"slot ({j},{k}) outside ell = {system.ell}", no, path)
            comps = [g.components[j] for g in basis.at(t - j, k)]
            if v not in comps:
                raise FormatError(f"branch {v} is no generator component for slot ({j},{k}) at {t}", no, path)
            choose(no, (t - j, k), comps.index(v))
        else:
            raise FormatError(f"unexpected line {ln!r}", no, path)
    return sel


def generator_names(system: GroupSystem) -> dict:
    """g1, g2, ... by start, then longest span first."""
    keys = sorted(system.basis.gens, key=lambda sk: (sk[0], -sk[1]))
    names = {}
    for key in keys:
        for p in range(1, len(system.basis.at(*key))):
            names[(key, p)] = f"g{len(names) + 1}"
    return names


def parse_terms(items: Sequence[str]) -> list[tuple[int, int]]:
    """`k,t` pairs (or `k@t`)."""
    out = []
    for item in items:
        for tok in item.replace(";", " ").split():
            a, sep, b = tok.replace("@", ",").partition(",")
            if not sep:
                raise FormatError(f"index term {tok!r} should be k,t")
            out.append((int(a), int(b)))
    return out


def _load(args) -> BlockCode:
    return load_block_code(args.code, period1=True if args.period1 else None)


def _system(args) -> GroupSystem:
    code = _load(args)
    prefer = [parse_symbols(_word_tokens(w), code, "--prefer: ") for w in (args.prefer or [])]
    return analyze(code, prefer=prefer)


# commands

def cmd_analyze(args, out: _Out) -> None:
    system = _system(args)
    code, tr = system.code, system.trellis
    out(f"code {code.name}: length {code.length}, {code.size} codewords")
    out(f"ell {system.ell}")
    out("state profile: " + " ".join(str(s.order) for s in tr.states))
    out("branch group orders: " + " ".join(str(g.order) for g in tr.groups))
    out(format_chains(tr))
    for t in range(code.length):
        out(format_matrix(static_matrix(tr, t), f"static matrix t={t}"))
    for t in range(code.length):
        try:
            out(format_matrix(shift_matrix(tr, t), f"shift matrix t={t}"))
        except GroupSysError:
            break
    out.cert(verify_chain_properties(tr))


def cmd_generators(args, out: _Out) -> None:
    system = _system(args)
    out(format_basis(system.basis))
    code = system.code
    for (key, p), name in generator_names(system).items():
        g = system.basis.at(*key)[p]
        out(f"{name} = gen t={key[0]} k={key[1]} : {' '.join(map(str, code.word(g.codeword)))}")


def cmd_encode(args, out: _Out) -> None:
    system = _system(args)
    with open(args.tensor, encoding="utf-8") as fh:
        sel = parse_selection(fh.read(), system, args.tensor)
    tensor = tensor_from_selection(system.basis, sel)
    path = system.encode_path(tensor)
    c = system.trellis.codeword_of_path(path)
    out(" ".join(map(str, system.code.word(c))))
    out.ok = system.decode_codeword(c) == tensor


def cmd_decode(args, out: _Out) -> None:
    system = _system(args)
    names = generator_names(system)
    for w in read_words(args.words, system.code):
        c = system.code.index_of(w)
        tensor = system.decode_codeword(c)
        sel = selection_of(tensor)
        picked = [names[(key, p)] for key, p in sorted(sel.items(), key=lambda kv: (kv[0][0], -kv[0][1]))]
        out(f"word {' '.join(map(str, w))}")
        out("selected generators: " + (" ".join(picked) if picked else "none"))
        out(format_tensor(tensor))
        out.ok = out.ok and system.trellis.codeword_of_path(system.encode_path(tensor)) == c


def cmd_verify(args, out: _Out) -> None:
    system = _system(args)
    out.cert(verify_chain_properties(system.trellis))
    out.cert(verify_signature_sequence(system))
    if system.code.period1:
        rep = verify_signature_group(system)
        out.cert(rep)
        if rep.ok:
            values, G = signature_group(system)
            out(f"signature group order {G.order}")


def cmd_block_report(args, out: _Out) -> None:
    system = _system(args)
    fibers = [parse_terms([args.index])] if args.index else None
    rep = block_report(system, fibers)
    out(rep.format())
    out.ok = rep.checks.ok


def cmd_quotient(args, out: _Out) -> None:
    system = _system(args)
    code = system.code
    if args.index:
        hom = hom_C_to_product(system, parse_terms(args.index))
        P = hom.product
        out("terms: " + " ".join(f"{k}@{t}" for k, t in P.terms))
        out(f"order {P.order}, kernel {len(hom.kernel)}, |C| {code.size}")
        for i, (x, words) in enumerate(zip(P.carrier, hom.fibers)):
            vals = " | ".join(" ".join(map(str, s)) for s in x)
            out(f"  [{vals}] <- " + ", ".join("".join(map(str, code.word(c))) for c in words))
        out("table")
        for row in P.group.table:
            out("  " + " ".join(str(int(v)) for v in row))
        out(f"homomorphism: {'pass' if hom.ok else 'FAIL'}")
        out.ok = hom.ok and P.order * len(hom.kernel) == code.size
        return
    for k in range(system.ell + 1):
        low = controllable_subcode(system, k - 1)
        P = trellis_product_group(system, column_terms(system, k))
        out(f"k={k}: |C_(k-1)| = {len(low)}, |U(i_k)| = {P.order}, |C_k| = {len(controllable_subcode(system, k))}")
    out.cert(quotient_sequence_check(system))


def cmd_synthesize(args, out: _Out) -> None:
    spec = load_level_spec(args.spec)
    if args.period1 and spec.mode == "sequence":
        spec.mode = "group"
    sig = synthesize(spec, args.window, args.budget)
    out(format_signature(sig))
    out.cert(verify_construction(sig))
    real = realize(sig)
    out.cert(real.analysis)
    out.cert(real.round_trip)
    out(f"realized code {real.code.name}: length {real.code.length}, {real.code.size} codewords, "
        f"ell {real.system.ell}")
    if args.out:
        out(f"wrote {write_block_code(real.code, args.out)}")


COMMANDS = {
    "analyze": (cmd_analyze, "chains, matrices and the chain certificate"),
    "generators": (cmd_generators, "generator basis with granule orders"),
    "encode": (cmd_encode, "tensor file to codeword"),
    "decode": (cmd_decode, "codewords to tensors and selected generators"),
    "verify": (cmd_verify, "chain and signature certificates"),
    "block-report": (cmd_block_report, "group stack, corner products and fibers"),
    "quotient": (cmd_quotient, "trellis product for index terms, or the quotient sequence"),
    "synthesize": (cmd_synthesize, "construct a signature and realize it as a code"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="groupsys", description="Analyze and synthesize group codes.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        if name == "synthesize":
            p.add_argument("spec", help="signature spec file")
            p.add_argument("--window", type=int, help="number of times to build (default 2*ell+2)")
            p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search node budget")
            p.add_argument("--out", help="directory for the realized code file")
            p.add_argument("--period1", action="store_true", help="build a signature group")
            continue
        p.add_argument("code", help="code file")
        if name == "encode":
            p.add_argument("tensor", help="tensor file")
        if name == "decode":
            p.add_argument("words", help="file with one codeword per line")
        if name == "quotient":
            p.add_argument("--index", action="append", help="term k,t (repeatable)")
        if name == "block-report":
            p.add_argument("--index", help="terms 'k,t k,t ...' to show fibers for")
        p.add_argument("--period1", action="store_true", help="treat the code as time-invariant")
        p.add_argument("--prefer", action="append", help="codeword to use as a generator where it fits")
        p.add_argument("--out", help="also write the report to this file")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = _Out()
    try:
        COMMANDS[args.command][0](args, out)
    except (GroupSysError, OSError) as e:
        sys.stdout.write(out.text() if out.lines else "")
        print(f"error: {e}", file=sys.stderr)
        return 2
    text = out.text()
    sys.stdout.write(text)
    if args.out and args.command != "synthesize":
        d = os.path.dirname(os.path.abspath(args.out))
        os.makedirs(d, exist_ok=True)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0 if out.ok else 1


if __name__ == "__main__":
    sys.exit(main())
