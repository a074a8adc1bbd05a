"""Block codes over group alphabets and their canonic trellises.

Coordinates run over the window 0..L-1; states live at times 0..L.  Outside
the window every alphabet is trivial and every codeword is the identity.
Codewords are kept sorted lexicographically by element index, so codeword 0
is the identity word and "least codeword" means least index.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra import (
    ElementSet,
    FiniteGroup,
    QuotientGroup,
    builtin_group,
    check_homomorphism,
    check_isomorphism_via_bijection,
    format_group,
    parse_group,
    quotient,
    set_product,
    validate_group,
)
from .errors import (
    AlphabetMismatch,
    DuplicateCodeword,
    FormatError,
    NotClosed,
    OutOfWindow,
)

_KEY_LIMIT = 2 ** 62


class _Keyer:
    """Mixed-radix integer keys for words; key order equals lexicographic order."""

    def __init__(self, alphabets: Sequence[FiniteGroup]):
        sizes = [A.order for A in alphabets]
        total = 1
        for s in sizes:
            total *= s
        self.exact = total < _KEY_LIMIT
        radix = []
        acc = 1
        for s in reversed(sizes):
            radix.append(acc)
            acc *= s
        self.radix = np.array(list(reversed(radix)), dtype=np.int64) if self.exact else None

    def keys(self, words: np.ndarray) -> np.ndarray:
        return words @ self.radix


class BlockCode:
    """A group code on a finite window, with its codeword group."""

    def __init__(self, name: str, alphabets: Sequence[FiniteGroup], words: Iterable[Sequence[int]],
                 period1: bool = False):
        self.name = name
        self.alphabets = tuple(alphabets)
        self.length = len(self.alphabets)
        if self.length == 0:
            raise FormatError("a code needs at least one coordinate")
        self.period1 = bool(period1)
        arr = np.array([list(w) for w in words], dtype=np.int64).reshape(-1, self.length)
        for t, A in enumerate(self.alphabets):
            col = arr[:, t]
            if col.size and (col.min() < 0 or col.max() >= A.order):
                bad = int(np.flatnonzero((col < 0) | (col >= A.order))[0])
                raise AlphabetMismatch(
                    f"word {arr[bad].tolist()}: coordinate {t} outside alphabet {A.name}")
        order = np.lexsort(arr.T[::-1]) if arr.size else np.arange(0)
        arr = arr[order]
        if len(arr) > 1:
            same = (arr[1:] == arr[:-1]).all(axis=1)
            if same.any():
                raise DuplicateCodeword(f"codeword {arr[int(np.argmax(same))].tolist()} listed twice")
        if len(arr) == 0 or arr[0].any():
            raise NotClosed("the identity word is missing")
        arr.setflags(write=False)
        self.words = arr
        keyer = _Keyer(self.alphabets)
        # huge alphabets fall back to tuple lookups
        self._keyer = keyer if keyer.exact else None
        self._keys = keyer.keys(arr) if keyer.exact else None
        self.group = self._build_group()
        nz = arr != 0
        self.first = np.where(nz.any(axis=1), nz.argmax(axis=1), self.length)
        self.last = np.where(nz.any(axis=1), self.length - 1 - nz[:, ::-1].argmax(axis=1), -1)

    @property
    def size(self) -> int:
        return len(self.words)

    def __len__(self) -> int:
        return self.size

    def word(self, i: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.words[i])

    def index_of(self, word: Sequence[int]) -> int:
        w = np.array(list(word), dtype=np.int64).reshape(1, -1)
        if w.shape[1] != self.length:
            raise AlphabetMismatch(f"word {list(word)} has length {w.shape[1]}, expected {self.length}")
        if self._keyer is None:
            for i, row in enumerate(self.words):
                if np.array_equal(row, w[0]):
                    return i
            raise KeyError(tuple(word))
        k = self._keyer.keys(w)[0]
        pos = int(np.searchsorted(self._keys, k))
        if pos < len(self._keys) and self._keys[pos] == k and np.array_equal(self.words[pos], w[0]):
            return pos
        raise KeyError(tuple(word))

    def contains(self, word: Sequence[int]) -> bool:
        try:
            self.index_of(word)
            return True
        except KeyError:
            return False

    def multiply_words(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple(A.mul(x, y) for A, x, y in zip(self.alphabets, a, b))

    def _build_group(self) -> FiniteGroup:
        n = self.size
        W = self.words
        if self._keyer is None:
            lookup = {tuple(w): i for i, w in enumerate(W.tolist())}
            table = np.zeros((n, n), dtype=np.int64)
            for i in range(n):
                for j in range(n):
                    w = self.multiply_words(W[i], W[j])
                    if w not in lookup:
                        raise NotClosed(f"{W[i].tolist()} * {W[j].tolist()} = {list(w)} is not a codeword")
                    table[i, j] = lookup[w]
            return validate_group(table, self.name)
        keys = np.zeros((n, n), dtype=np.int64)
        for t, A in enumerate(self.alphabets):
            col = W[:, t]
            keys += A.table[np.ix_(col, col)] * self._keyer.radix[t]
        pos = np.searchsorted(self._keys, keys)
        pos = np.minimum(pos, n - 1)
        ok = self._keys[pos] == keys
        if not ok.all():
            i, j = (int(x) for x in np.argwhere(~ok)[0])
            w = self.multiply_words(W[i], W[j])
            raise NotClosed(f"{W[i].tolist()} * {W[j].tolist()} = {list(w)} is not a codeword")
        return validate_group(pos, self.name)

    def subcode(self, mask) -> ElementSet:
        return ElementSet(self.group, tuple(int(i) for i in np.flatnonzero(mask)))

    def __repr__(self) -> str:
        return f"BlockCode({self.name!r}, length={self.length}, size={self.size})"


def close_words(alphabets: Sequence[FiniteGroup], gens: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    """Smallest componentwise-closed word set containing the generators."""
    L = len(alphabets)
    gens = [tuple(int(x) for x in g) for g in gens]
    for g in gens:
        if len(g) != L:
            raise AlphabetMismatch(f"generator {list(g)} has length {len(g)}, expected {L}")
        for t, (A, x) in enumerate(zip(alphabets, g)):
            if not 0 <= x < A.order:
                raise AlphabetMismatch(f"generator {list(g)}: coordinate {t} outside alphabet {A.name}")
    ident = (0,) * L
    found = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for w in frontier:
            for g in gens:
                p = tuple(A.mul(x, y) for A, x, y in zip(alphabets, w, g))
                if p not in found:
                    found.add(p)
                    nxt.append(p)
        frontier = nxt
    return sorted(found)


# code file format

GroupResolver = Callable[[str], FiniteGroup]


def make_resolver(search_dirs: Sequence[str] = (), extra: dict | None = None) -> GroupResolver:
    """Resolve alphabet names: explicit groups, then `<name>.group` files, then built-ins."""
    cache: dict[str, FiniteGroup] = dict(extra or {})

    def resolve(name: str) -> FiniteGroup:
        if name in cache:
            return cache[name]
        for d in search_dirs:
            path = os.path.join(d, f"{name}.group")
            if os.path.exists(path):
                with open(path, encoding="utf-8") as fh:
                    G = parse_group(fh.read(), path)
                cache[name] = G
                return G
        G = builtin_group(name)
        if G is None:
            raise AlphabetMismatch(f"unknown alphabet group {name!r}")
        cache[name] = G
        return G

    return resolve


def parse_block_code(text: str, resolver: GroupResolver | None = None, path: str | None = None,
                     period1: bool | None = None) -> BlockCode:
    resolver = resolver or make_resolver()
    lines = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    pos = 0

    def take() -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(lines):
            raise FormatError("unexpected end of file", None, path)
        no, ln = lines[pos]
        pos += 1
        return no, ln.split()

    no, parts = take()
    if parts[0] != "code" or len(parts) != 2:
        raise FormatError("expected 'code <name>'", no, path)
    name = parts[1]
    no, parts = take()
    if parts[0] != "length" or len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
        raise FormatError("expected 'length <L>'", no, path)
    L = int(parts[1])
    alph: list[FiniteGroup] = []
    flag = False
    mode = None
    while mode is None:
        no, parts = take()
        if parts[0] == "alphabet" and len(parts) == 2:
            try:
                alph.append(resolver(parts[1]))
            except (AlphabetMismatch, FormatError) as e:
                raise FormatError(str(e), no, path) from None
        elif parts[0] == "period1" and len(parts) == 1:
            flag = True
        elif parts[0] in ("generators", "codewords") and len(parts) == 1:
            mode = parts[0]
        else:
            raise FormatError(f"unexpected line {' '.join(parts)!r}", no, path)
    if len(alph) == 1:
        alph = alph * L
    if len(alph) != L:
        raise FormatError(f"need 1 or {L} alphabet lines, got {len(alph)}", no, path)
    words = []
    while True:
        no, parts = take()
        if parts == ["end"]:
            break
        try:
            w = [int(x) for x in parts]
        except ValueError:
            raise FormatError(f"bad word {' '.join(parts)!r}", no, path) from None
        if len(w) != L:
            raise FormatError(f"word has {len(w)} symbols, expected {L}", no, path)
        for t, (A, x) in enumerate(zip(alph, w)):
            if not 0 <= x < A.order:
                raise FormatError(f"coordinate {t} value {x} outside alphabet {A.name}", no, path)
        words.append(tuple(w))
    if pos != len(lines):
        raise FormatError("trailing content after 'end'", lines[pos][0], path)
    if period1 is not None:
        flag = flag or period1
    if mode == "generators":
        words = close_words(alph, words)
    else:
        seen = set()
        for w in words:
            if w in seen:
                raise DuplicateCodeword(f"codeword {list(w)} listed twice")
            seen.add(w)
        if (0,) * L not in seen:
            words.append((0,) * L)
    return BlockCode(name, alph, words, period1=flag)


def load_block_code(path: str, period1: bool | None = None, extra_groups: dict | None = None) -> BlockCode:
    """Read a code file; alphabet groups resolve against files next to it."""
    d = os.path.dirname(os.path.abspath(path))
    resolver = make_resolver([d], extra_groups)
    with open(path, encoding="utf-8") as fh:
        return parse_block_code(fh.read(), resolver, path, period1)


def format_block_code(code: BlockCode) -> str:
    out = [f"code {code.name}", f"length {code.length}"]
    names = [A.name for A in code.alphabets]
    if len(set(names)) == 1:
        out.append(f"alphabet {names[0]}")
    else:
        out += [f"alphabet {n}" for n in names]
    if code.period1:
        out.append("period1")
    out.append("codewords")
    out += [" ".join(str(int(x)) for x in w) for w in code.words]
    out.append("end")
    return "\n".join(out) + "\n"


def write_block_code(code: BlockCode, directory: str) -> str:
    """Write `<name>.code` plus a `.group` file for every non-built-in alphabet."""
    os.makedirs(directory, exist_ok=True)
    for A in {A.name: A for A in code.alphabets}.values():
        b = builtin_group(A.name)
        if b is None or not b.same_table(A):
            with open(os.path.join(directory, f"{A.name}.group"), "w", encoding="utf-8") as fh:
                fh.write(format_group(A))
    path = os.path.join(directory, f"{code.name}.code")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_block_code(code))
    return path


# states and the canonic trellis

def _check_time(code: BlockCode, t: int, lo: int, hi: int) -> None:
    if not lo <= t <= hi:
        raise OutOfWindow(f"time {t} outside {lo}..{hi}")


def past_future_subcodes(code: BlockCode, t: int) -> tuple[ElementSet, ElementSet]:
    """(C^{t-}, C^{t+}): words that are identity at and after t / before t."""
    _check_time(code, t, 0, code.length)
    return code.subcode(code.last < t), code.subcode(code.first >= t)


def state_space(code: BlockCode, t: int) -> QuotientGroup:
    past, future = past_future_subcodes(code, t)
    return quotient(code.group, set_product(past, future), name=f"S{t}")


@dataclass(frozen=True, eq=False)
class Branch:
    left: int
    label: int
    right: int


@dataclass(eq=False)
class GroupTrellis:
    """Canonic trellis of a block code.

    `chi[t][c]` is the branch index of codeword c at time t; branches are
    sorted as (left, label, right) triples so the identity branch is 0.
    """

    code: BlockCode
    states: list[QuotientGroup]
    groups: list[FiniteGroup]
    left: list[np.ndarray]
    label: list[np.ndarray]
    right: list[np.ndarray]
    chi: list[np.ndarray]
    rep: list[np.ndarray] = field(default_factory=list)

    @property
    def length(self) -> int:
        return self.code.length

    def branch(self, t: int, b: int) -> Branch:
        return Branch(int(self.left[t][b]), int(self.label[t][b]), int(self.right[t][b]))

    def branch_count(self, t: int) -> int:
        return self.groups[t].order

    def path_of(self, c: int) -> tuple[int, ...]:
        return tuple(int(self.chi[t][c]) for t in range(self.length))

    def codeword_of_path(self, path: Sequence[int]) -> int:
        word = [int(self.label[t][b]) for t, b in enumerate(path)]
        c = self.code.index_of(word)
        if self.path_of(c) != tuple(int(b) for b in path):
            raise KeyError(f"{list(path)} is not a path")
        return c

    def image(self, t: int, codewords: ElementSet | Iterable[int]) -> ElementSet:
        """Time-t branches of a set of codewords."""
        idx = np.fromiter((int(c) for c in codewords), dtype=np.int64)
        return ElementSet.of(self.groups[t], self.chi[t][idx].tolist())

    def count_paths(self) -> int:
        """Number of branch sequences with matching states, by dynamic programming."""
        ways = np.zeros(self.states[0].order, dtype=object)
        ways[0] = 1
        for t in range(self.length):
            nxt = np.zeros(self.states[t + 1].order, dtype=object)
            for b in range(self.groups[t].order):
                nxt[self.right[t][b]] += ways[self.left[t][b]]
            ways = nxt
        return int(ways[0])


def build_canonic_trellis(code: BlockCode) -> GroupTrellis:
    L = code.length
    states = [state_space(code, t) for t in range(L + 1)]
    groups, lefts, labels, rights, chis, reps = [], [], [], [], [], []
    for t in range(L):
        S0, S1, A = states[t], states[t + 1], code.alphabets[t]
        triples = np.stack([S0.projection, code.words[:, t], S1.projection], axis=1)
        uniq, chi = np.unique(triples, axis=0, return_inverse=True)
        chi = chi.reshape(-1).astype(np.int64)
        m = len(uniq)
        rep = np.full(m, -1, dtype=np.int64)
        for c in range(code.size - 1, -1, -1):
            rep[chi[c]] = c
        # product via codeword representatives
        table = chi[code.group.table[np.ix_(rep, rep)]]
        # the same product computed componentwise in S^t x A^t x S^{t+1}
        l, a, r = uniq[:, 0], uniq[:, 1], uniq[:, 2]
        comp = np.stack([
            S0.quotient.table[np.ix_(l, l)],
            A.table[np.ix_(a, a)],
            S1.quotient.table[np.ix_(r, r)],
        ], axis=-1)
        expect = uniq[table]
        if not np.array_equal(comp, expect):
            raise NotClosed(f"time {t}: branch products disagree with the componentwise product")
        B = validate_group(table, f"B{t}")
        if not check_homomorphism(chi, code.group, B):
            raise NotClosed(f"time {t}: codeword-to-branch map is not a homomorphism")
        for arr in (l, a, r, chi, rep):
            arr.setflags(write=False)
        groups.append(B)
        lefts.append(np.ascontiguousarray(l))
        labels.append(np.ascontiguousarray(a))
        rights.append(np.ascontiguousarray(r))
        chis.append(chi)
        reps.append(rep)
    tr = GroupTrellis(code, states, groups, lefts, labels, rights, chis, reps)
    n_paths = tr.count_paths()
    distinct = len({tr.path_of(c) for c in range(code.size)})
    if n_paths != code.size or distinct != code.size:
        raise NotClosed(f"trellis has {n_paths} paths for {code.size} codewords")
    return tr


def branch_kernels(trellis: GroupTrellis, t: int) -> tuple[ElementSet, ElementSet]:
    """(X_0^t, Y_0^t): branches leaving / entering the identity state."""
    _check_time(trellis.code, t, 0, trellis.length - 1)
    B = trellis.groups[t]
    X0 = ElementSet(B, tuple(int(b) for b in np.flatnonzero(trellis.left[t] == 0)))
    Y0 = ElementSet(B, tuple(int(b) for b in np.flatnonzero(trellis.right[t] == 0)))
    return X0, Y0


def check_state_isomorphism(trellis: GroupTrellis, t: int) -> bool:
    """B^{t-1}/Y_0^{t-1} and B^t/X_0^t are both isomorphic to the state space at t."""
    _check_time(trellis.code, t, 1, trellis.length - 1)
    S = trellis.states[t].quotient
    X0, _ = branch_kernels(trellis, t)
    _, Y0 = branch_kernels(trellis, t - 1)
    for B, kernel, proj in ((trellis.groups[t], X0, trellis.left[t]),
                            (trellis.groups[t - 1], Y0, trellis.right[t - 1])):
        if not check_homomorphism(proj, B, S):
            return False
        Q = quotient(B, kernel)
        induced = np.array([proj[r] for r in Q.reps], dtype=np.int64)
        # the induced map must be well defined on every coset
        for i, cos in enumerate(Q.cosets):
            if len({int(proj[b]) for b in cos}) != 1:
                return False
        if not check_isomorphism_via_bijection(induced, Q.quotient, S):
            return False
    return True


def check_axiom_of_state(trellis: GroupTrellis) -> bool:
    """Splicing the past of one codeword onto the future of another that
    shares its state at time t always yields a codeword."""
    code = trellis.code
    W = code.words
    L = code.length
    lookup = set(map(tuple, W.tolist()))
    for t in range(1, L):
        proj = trellis.states[t].projection
        for s in range(trellis.states[t].order):
            cls = np.flatnonzero(proj == s)
            heads = {tuple(w) for w in W[cls, :t].tolist()}
            tails = {tuple(w) for w in W[cls, t:].tolist()}
            for h in heads:
                for tl in tails:
                    if h + tl not in lookup:
                        return False
    return True
