"""Splitting and merging chains of a canonic trellis and what is built on them.

X_j^t collects the time-t branches of paths that are the identity before
t-j, Y_i^t those of paths that are the identity after t+i.  Times outside
the window carry a trivial branch group, so every formula can be applied at
any integer time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    ElementSet,
    FiniteGroup,
    QuotientGroup,
    intersect,
    is_normal,
    quotient,
    set_product,
    trivial_group,
    validate_group,
)
from .errors import NotControllableInWindow, OutOfWindow
from .system import GroupTrellis

_TRIVIAL = trivial_group()


def _cache(trellis: GroupTrellis) -> dict:
    return trellis.__dict__.setdefault("_chain_cache", {})


def in_window(trellis: GroupTrellis, t: int) -> bool:
    return 0 <= t < trellis.length


def branch_group(trellis: GroupTrellis, t: int) -> FiniteGroup:
    """B^t, or the trivial group outside the window."""
    return trellis.groups[t] if in_window(trellis, t) else _TRIVIAL


def _require(trellis: GroupTrellis, t: int) -> None:
    if not in_window(trellis, t):
        raise OutOfWindow(f"time {t} outside 0..{trellis.length - 1}")


def _x(trellis: GroupTrellis, t: int, j: int) -> ElementSet:
    B = branch_group(trellis, t)
    if j < 0 or not in_window(trellis, t):
        return B.trivial()
    key = ("X", t, j)
    c = _cache(trellis)
    if key not in c:
        code = trellis.code
        c[key] = trellis.image(t, np.flatnonzero(code.first >= t - j))
    return c[key]


def _y(trellis: GroupTrellis, t: int, i: int) -> ElementSet:
    B = branch_group(trellis, t)
    if i < 0 or not in_window(trellis, t):
        return B.trivial()
    key = ("Y", t, i)
    c = _cache(trellis)
    if key not in c:
        code = trellis.code
        c[key] = trellis.image(t, np.flatnonzero(code.last <= t + i))
    return c[key]


def compute_X(trellis: GroupTrellis, t: int, j: int) -> ElementSet:
    """Branches at t of paths that are the identity before time t-j."""
    _require(trellis, t)
    X = _x(trellis, t, j)
    if not is_normal(X):
        raise AssertionError(f"X_{j}^{t} is not normal")
    return X


def compute_Y(trellis: GroupTrellis, t: int, i: int) -> ElementSet:
    """Branches at t of paths that are the identity after time t+i."""
    _require(trellis, t)
    Y = _y(trellis, t, i)
    if not is_normal(Y):
        raise AssertionError(f"Y_{i}^{t} is not normal")
    return Y


def controllability_index(trellis: GroupTrellis) -> int:
    """Least l with X_l^t equal to the whole branch group at every time."""
    c = _cache(trellis)
    if "ell" in c:
        return c["ell"]
    L = trellis.length
    for l in range(L + 1):
        if all(len(_x(trellis, t, l)) == trellis.groups[t].order for t in range(L)):
            if trellis.code.period1 and L < 2 * l + 2:
                raise NotControllableInWindow(
                    f"period-1 code needs a window of at least {2 * l + 2}, got {L}")
            c["ell"] = l
            return l
    raise NotControllableInWindow("no index within the window")  # pragma: no cover


def delta(trellis: GroupTrellis, t: int, k: int) -> ElementSet:
    """X_0^t meet Y_k^t, cross-checked against the segment subcode on [t, t+k]."""
    B = branch_group(trellis, t)
    if k < 0 or not in_window(trellis, t):
        return B.trivial()
    D = intersect(_x(trellis, t, 0), _y(trellis, t, k))
    code = trellis.code
    seg = np.flatnonzero((code.first >= t) & (code.last <= t + k))
    if trellis.image(t, seg) != D:
        raise AssertionError(f"Delta_{k}^{t} differs from the span-{k + 1} segment branches")
    return D


def static_entry(trellis: GroupTrellis, t: int, j: int, k: int) -> ElementSet:
    """X_{j-1}^t (X_j^t meet Y_{k-j}^t)."""
    key = ("S", t, j, k)
    c = _cache(trellis)
    if key not in c:
        c[key] = set_product(_x(trellis, t, j - 1), intersect(_x(trellis, t, j), _y(trellis, t, k - j)))
    return c[key]


def matrix_slots(ell: int) -> list[tuple[int, int]]:
    """(j, k) for 0<=j<=ell+1, j-1<=k<=ell."""
    return [(j, k) for j in range(ell + 2) for k in range(j - 1, ell + 1)]


@dataclass(frozen=True, eq=False)
class StaticMatrix:
    t: int
    ell: int
    entries: dict = field(repr=False)

    def __getitem__(self, jk: tuple[int, int]) -> ElementSet:
        return self.entries[jk]

    def column(self, j: int) -> list[ElementSet]:
        """Entries (j, j-1), (j, j), ..., (j, ell): bottom to top."""
        return [self.entries[(j, k)] for k in range(j - 1, self.ell + 1)]


@dataclass(frozen=True, eq=False)
class ShiftMatrix:
    """Entry (j, k) lives at time t + j."""

    t: int
    ell: int
    entries: dict = field(repr=False)

    def __getitem__(self, jk: tuple[int, int]) -> ElementSet:
        return self.entries[jk]


def static_matrix(trellis: GroupTrellis, t: int) -> StaticMatrix:
    ell = controllability_index(trellis)
    entries = {(j, k): static_entry(trellis, t, j, k) for j, k in matrix_slots(ell)}
    m = StaticMatrix(t, ell, entries)
    for j in range(ell + 2):
        col = m.column(j)
        for lo, hi in zip(col, col[1:]):
            if not lo.issubset(hi):
                raise AssertionError(f"static matrix at {t}: column {j} is not nested")
    return m


def shift_matrix(trellis: GroupTrellis, t: int) -> ShiftMatrix:
    ell = controllability_index(trellis)
    entries = {(j, k): static_entry(trellis, t + j, j, k) for j, k in matrix_slots(ell)}
    return ShiftMatrix(t, ell, entries)


def follower(trellis: GroupTrellis, t: int, H: ElementSet) -> ElementSet:
    """Branches at t+1 whose left state is the right state of some branch in H."""
    B1 = branch_group(trellis, t + 1)
    if not in_window(trellis, t + 1):
        return B1.trivial()
    if in_window(trellis, t):
        states = {int(trellis.right[t][b]) for b in H}
    else:
        states = {0}
    left = trellis.left[t + 1]
    return ElementSet(B1, tuple(int(b) for b in np.flatnonzero(np.isin(left, list(states)))))


def follower_power(trellis: GroupTrellis, t: int, H: ElementSet, j: int) -> ElementSet:
    """F^j(H) at time t + j; F^0 is the identity."""
    for step in range(j):
        H = follower(trellis, t + step, H)
    return H


# path segments

@dataclass(frozen=True, eq=False)
class SegmentGroup:
    """Restrictions of all codewords to the times [t, t+k].

    `rows[s]` is the branch tuple of segment s; segment 0 is the identity.
    `of_codeword[c]` is the segment of codeword c.
    """

    t: int
    k: int
    rows: np.ndarray
    group: FiniteGroup
    of_codeword: np.ndarray

    def of(self, codewords) -> ElementSet:
        return ElementSet.of(self.group, self.of_codeword[np.asarray(list(codewords), dtype=np.int64)].tolist())

    def component(self, s: int, j: int) -> int:
        """Branch at time t + j of segment s."""
        return int(self.rows[s, j])


def segment_group(trellis: GroupTrellis, t: int, k: int) -> SegmentGroup:
    key = ("seg", t, k)
    c = _cache(trellis)
    if key in c:
        return c[key]
    code = trellis.code
    n = code.size
    cols = []
    for tt in range(t, t + k + 1):
        cols.append(trellis.chi[tt] if in_window(trellis, tt) else np.zeros(n, dtype=np.int64))
    mat = np.stack(cols, axis=1)
    rows, inv = np.unique(mat, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    rep = np.full(len(rows), -1, dtype=np.int64)
    for cw in range(n - 1, -1, -1):
        rep[inv[cw]] = cw
    table = inv[code.group.table[np.ix_(rep, rep)]]
    G = validate_group(table, f"seg[{t},{t + k}]")
    # componentwise product of branch tuples must agree with the table
    for jj, tt in enumerate(range(t, t + k + 1)):
        Bt = branch_group(trellis, tt)
        col = rows[:, jj]
        if not np.array_equal(Bt.table[np.ix_(col, col)], rows[table, jj]):
            raise AssertionError(f"segment product is not componentwise at time {tt}")
    sg = SegmentGroup(t, k, rows, G, inv)
    c[key] = sg
    return sg


def segment_follower(trellis: GroupTrellis, t: int, k: int, H: ElementSet) -> ElementSet:
    """F^{[0,k]}(H): segments on [t, t+k] of paths whose time-t branch is in H."""
    sg = segment_group(trellis, t, k)
    if in_window(trellis, t):
        mask = H.mask()[trellis.chi[t]]
        cws = np.flatnonzero(mask)
    else:
        cws = np.arange(trellis.code.size)
    return sg.of(cws)


def lambda_quotient(trellis: GroupTrellis, t: int, k: int) -> QuotientGroup:
    """F^{[0,k]}(Delta_k^t) / F^{[0,k]}(Delta_{k-1}^t) as a quotient of segments."""
    sg = segment_group(trellis, t, k)
    top = segment_follower(trellis, t, k, delta(trellis, t, k))
    bot = segment_follower(trellis, t, k, delta(trellis, t, k - 1))
    return quotient(sg.group, bot, within=top, name=f"Lambda[{t},{t + k}]")


# verification

@dataclass
class Report:
    """Named pass/fail entries; `ok` is true iff every entry passed."""

    title: str
    entries: list = field(default_factory=list)
    notes: list = field(default_factory=list)  # observations that do not affect `ok`

    def add(self, name: str, passed: bool, detail: str = "") -> bool:
        self.entries.append((name, bool(passed), detail))
        return bool(passed)

    @property
    def ok(self) -> bool:
        return all(p for _, p, _ in self.entries)

    def failures(self) -> list:
        return [e for e in self.entries if not e[1]]

    def summary(self) -> dict:
        out: dict[str, list[int]] = {}
        for name, passed, _ in self.entries:
            head = name.split("[", 1)[0].strip()
            tally = out.setdefault(head, [0, 0])
            tally[0 if passed else 1] += 1
        return out

    def format(self, verbose: bool = False) -> str:
        lines = [f"{self.title}: {'pass' if self.ok else 'FAIL'}"]
        for head, (good, bad) in self.summary().items():
            lines.append(f"  {head}: {good} pass, {bad} fail")
        shown = self.entries if verbose else self.failures()
        for name, passed, detail in shown:
            tail = f" ({detail})" if detail else ""
            lines.append(f"  {'pass' if passed else 'FAIL'} {name}{tail}")
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


def _index(big: ElementSet, small: ElementSet) -> int:
    return len(big) // len(small)


def _rectangle_projection(trellis: GroupTrellis, t: int, j: int, k: int) -> bool:
    """Time-(t+j) projection of Lambda onto F^j(Delta_k)/F^j(Delta_{k-1}) is a bijection."""
    lam = lambda_quotient(trellis, t, k)
    sg = segment_group(trellis, t, k)
    top = follower_power(trellis, t, delta(trellis, t, k), j)
    bot = follower_power(trellis, t, delta(trellis, t, k - 1), j)
    target = quotient(top.parent, bot, within=top)
    image = []
    for cos in lam.cosets:
        labels = {int(target.projection[sg.component(s, j)]) for s in cos}
        if len(labels) != 1 or -1 in labels:
            return False
        image.append(labels.pop())
    return sorted(image) == list(range(target.order))


def verify_chain_properties(trellis: GroupTrellis) -> Report:
    ell = controllability_index(trellis)
    L = trellis.length
    rep = Report("chain properties")
    for t in range(L):
        B = trellis.groups[t]
        for name, fn in (("X", _x), ("Y", _y)):
            prev = B.trivial()
            for j in range(-1, ell + 1):
                cur = fn(trellis, t, j)
                rep.add(f"normal chain {name} [t={t} j={j}]", is_normal(cur) and prev.issubset(cur))
                prev = cur
        for j in range(ell + 1):
            rep.add(f"diagonal identity [t={t} j={j}]", static_entry(trellis, t, j, ell) == _x(trellis, t, j))
    for t in range(-1, L):
        for k in range(ell + 1):
            for j in range(k + 1):
                here = static_entry(trellis, t + j, j, k)
                there = static_entry(trellis, t + j + 1, j + 1, k)
                rep.add(f"shift property [t={t} j={j} k={k}]",
                        follower(trellis, t + j, here) == there)
    for t in range(L):
        sm = shift_matrix(trellis, t)
        for k in range(ell + 1):
            Dk = delta(trellis, t, k)
            for j in range(ell + 3):
                Fj = follower_power(trellis, t, Dk, j)
                want = sm[(j, k)] if j <= k + 1 else _x(trellis, t + j, j - 1)
                rep.add(f"follower of delta [t={t} j={j} k={k}]", Fj == want)
            D1 = delta(trellis, t, k - 1)
            idx = [_index(follower_power(trellis, t, Dk, j), follower_power(trellis, t, D1, j))
                   for j in range(k + 1)]
            rep.add(f"equal row indices [t={t} k={k}]", len(set(idx)) == 1, f"indices {idx}")
            lam = lambda_quotient(trellis, t, k)
            for j in range(k + 1):
                same = lam.order == idx[j] == _index(Dk, D1)
                rep.add(f"rectangle [t={t} j={j} k={k}]",
                        same and _rectangle_projection(trellis, t, j, k))
    return rep


def format_chains(trellis: GroupTrellis) -> str:
    ell = controllability_index(trellis)
    lines = []
    for t in range(trellis.length):
        xs = " ".join(str(len(_x(trellis, t, j))) for j in range(-1, ell + 1))
        ys = " ".join(str(len(_y(trellis, t, i))) for i in range(-1, ell + 1))
        lines.append(f"t={t} |X_j| j=-1..{ell}: {xs}")
        lines.append(f"t={t} |Y_i| i=-1..{ell}: {ys}")
    return "\n".join(lines)


def format_matrix(m, label: str) -> str:
    """Orders of the entries, row k descending, column j ascending."""
    lines = [label]
    for k in range(m.ell, -2, -1):
        cells = []
        for j in range(m.ell + 2):
            cells.append(f"{len(m.entries[(j, k)]):>4}" if (j, k) in m.entries else "    ")
        lines.append(f"  k={k:>2}:" + "".join(cells))
    return "\n".join(lines)
