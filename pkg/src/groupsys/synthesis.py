"""Building signature sequences and groups from slot point sets.

A corner (j, k) at time t is the set of u-slices over `triangle_positions`;
each position holds a point of one generator, so the carrier is the product
of the point sets and an element is indexed in mixed radix with the first
position most significant.  The apex (j, k) is the last position, hence an
element index is `q * s + x` with q the index over the other positions and
x the apex point.

Corners are built row by row from the top.  Below the top row, the two
projections onto the corners above fix every coordinate of a product except
the apex, so the search only chooses that one coordinate.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import FiniteGroup, check_homomorphism, check_isomorphism_via_bijection, validate_group
from .chains import Report
from .encoder import GroupSystem, triangle_positions
from .errors import BudgetExceeded, FormatError, GroupSysError, NoCompletion, RealizationMismatch
from .signature import InducedSequence, check_signature_sequence, verify_signature_sequence
from .system import BlockCode, GroupTrellis

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7
MAX_REALIZED_WORDS = 1 << 16
MODES = ("sequence", "group", "block")


# spec files

@dataclass
class LevelSpec:
    """Point labels per slot (identity first) and optional corner tables.

    In sequence and group modes a slot key (j, k) names the generator seen
    in slot (j, k) of the anchor component.  In block mode the key (n, k)
    names the generator of span k+1 starting n steps into the block.
    """

    ell: int
    mode: str
    points: dict
    tables: dict = field(default_factory=dict)
    name: str = "sig"

    def slot_points(self, j: int, k: int) -> tuple:
        return self.points.get((j, k), ("e",))


def parse_level_spec(text: str, path: str | None = None) -> LevelSpec:
    lines = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines or lines[0][1].split()[0] != "sigspec":
        raise FormatError("expected 'sigspec [name]'", lines[0][0] if lines else None, path)
    head = lines[0][1].split()
    name = head[1] if len(head) > 1 else "sig"
    ell = None
    mode = "sequence"
    raw_points: list = []
    tables: dict = {}
    pos = 1
    ended = False
    while pos < len(lines):
        no, ln = lines[pos]
        parts = ln.split()
        pos += 1
        if parts[0] == "ell" and len(parts) == 2 and parts[1].isdigit():
            ell = int(parts[1])
        elif parts[0] == "mode" and len(parts) == 2:
            if parts[1] not in MODES:
                raise FormatError(f"mode must be one of {', '.join(MODES)}", no, path)
            mode = parts[1]
        elif parts[0] == "slot":
            if ":" not in parts or parts.index(":") != 3:
                raise FormatError("usage: slot <j> <k> : <labels>", no, path)
            labels = tuple(parts[4:])
            if not labels or len(set(labels)) != len(labels):
                raise FormatError("slot needs distinct point labels", no, path)
            raw_points.append((no, parts[1], parts[2], labels))
        elif parts[0] == "table" and len(parts) == 3:
            try:
                key = (int(parts[1]), int(parts[2]))
            except ValueError:
                raise FormatError("usage: table <j> <k>", no, path) from None
            rows = []
            while pos < len(lines):
                rno, rln = lines[pos]
                if not rln.split()[0].lstrip("-").isdigit():
                    break
                rows.append([int(x) for x in rln.split()])
                pos += 1
            if not rows or any(len(r) != len(rows) for r in rows):
                raise FormatError(f"table {key} must be square", no, path)
            tables[key] = np.array(rows, dtype=np.int64)
        elif parts == ["end"]:
            ended = True
            break
        else:
            raise FormatError(f"unexpected line {ln!r}", no, path)
    if not ended:
        raise FormatError("missing 'end'", None, path)
    if pos != len(lines):
        raise FormatError("trailing content after 'end'", lines[pos][0], path)
    if ell is None:
        raise FormatError("missing 'ell <n>'", None, path)
    points: dict = {}
    for no, a, b, labels in raw_points:
        if not b.isdigit() or not (a.isdigit() or (a == "*" and mode != "sequence")):
            raise FormatError("slot indices must be integers ('*' not in sequence mode)", no, path)
        k = int(b)
        if k > ell:
            raise FormatError(f"slot row {k} above ell = {ell}", no, path)
        if a == "*":
            keys = [(n, k) for n in range(ell - k + 1 if mode == "block" else k + 1)]
        else:
            keys = [(int(a), k)]
        for key in keys:
            if mode == "block" and key[0] + key[1] > ell:
                raise FormatError(f"block slot {key} ends after the block", no, path)
            if mode != "block" and key[0] > key[1]:
                raise FormatError(f"slot {key} needs j <= k", no, path)
            points[key] = labels
    if mode == "group":
        for k in range(ell + 1):
            given = {points[(j, k)] for j in range(k + 1) if (j, k) in points}
            if len(given) > 1:
                raise FormatError(f"group mode needs one point set per row; row {k} has {len(given)}", None, path)
            if given:
                for j in range(k + 1):
                    points[(j, k)] = next(iter(given))
    return LevelSpec(ell, mode, points, tables, name)


def load_level_spec(path: str) -> LevelSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_level_spec(fh.read(), path)


def format_level_spec(spec: LevelSpec) -> str:
    out = [f"sigspec {spec.name}", f"ell {spec.ell}", f"mode {spec.mode}"]
    for (a, k), labels in sorted(spec.points.items(), key=lambda kv: (-kv[0][1], kv[0][0])):
        out.append(f"slot {a} {k} : {' '.join(labels)}")
    for (a, k), tab in sorted(spec.tables.items()):
        out.append(f"table {a} {k}")
        out += [" ".join(str(int(x)) for x in row) for row in tab]
    out.append("end")
    return "\n".join(out) + "\n"


# table search

class _TableSearch:
    """Complete a group table whose quotient by the apex coordinate is known.

    `qprod` multiplies the quotient indices; element g = q * s + x.  Cells
    are decided in row-major order with apex values ascending, and every
    decision is followed by forcing through associativity and the Latin
    property, so the first completion found is the lexicographically least.
    """

    def __init__(self, qprod: np.ndarray, s: int, budget: int):
        nq = len(qprod)
        self.s, self.n = s, nq * s
        self.budget = budget
        self.nodes = 0
        g = np.arange(self.n)
        q = g // s
        self.q = q
        self.blk = qprod[np.ix_(q, q)]
        # qcol[a_q, r] = b_q with a_q * b_q = r; qrow[b_q, r] = a_q
        self.qcol = np.argsort(qprod, axis=1)
        self.qrow = np.argsort(qprod.T, axis=1)
        n = self.n
        self.T = np.full((n, n), -1, dtype=np.int64)
        self.rw = np.full((n, n), -1, dtype=np.int64)  # rw[x, e] = y with x*y = e
        self.cw = np.full((n, n), -1, dtype=np.int64)  # cw[e, y] = x with x*y = e
        self.trail: list = []
        self.queue: list = []

    def _assign(self, a: int, b: int, e: int) -> bool:
        T = self.T
        if T[a, b] >= 0:
            return T[a, b] == e
        if e // self.s != self.blk[a, b] or self.rw[a, e] >= 0 or self.cw[e, b] >= 0:
            return False
        T[a, b] = e
        self.rw[a, e] = b
        self.cw[e, b] = a
        self.trail.append((a, b))
        self.queue.append((a, b))
        return True

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            a, b = self.trail.pop()
            e = self.T[a, b]
            self.T[a, b] = -1
            self.rw[a, e] = -1
            self.cw[e, b] = -1
        self.queue.clear()

    def _pairs(self, lhs, rhs, on_lhs, on_rhs) -> bool:
        """Force lhs == rhs elementwise; -1 marks unknown."""
        both = (lhs >= 0) & (rhs >= 0)
        if (lhs[both] != rhs[both]).any():
            return False
        for i in np.flatnonzero((lhs < 0) & (rhs >= 0)):
            if not on_lhs(i, rhs[i]):
                return False
        for i in np.flatnonzero((lhs >= 0) & (rhs < 0)):
            if not on_rhs(i, lhs[i]):
                return False
        return True

    def _latin(self, a: int, b: int, e: int) -> bool:
        s, T = self.s, self.T
        r = e // s
        vals = r * s + np.arange(s)
        cols = self.qcol[self.q[a], r] * s + np.arange(s)
        open_c = cols[T[a, cols] < 0]
        if len(open_c) == 1:
            free = vals[self.rw[a, vals] < 0]
            if len(free) != 1 or not self._assign(a, int(open_c[0]), int(free[0])):
                return False
        rows = self.qrow[self.q[b], r] * s + np.arange(s)
        open_r = rows[T[rows, b] < 0]
        if len(open_r) == 1:
            free = vals[self.cw[vals, b] < 0]
            if len(free) != 1 or not self._assign(int(open_r[0]), b, int(free[0])):
                return False
        return True

    def _propagate(self) -> bool:
        T, rw, cw = self.T, self.rw, self.cw
        while self.queue:
            a, b = self.queue.pop()
            c = int(T[a, b])
            if not self._latin(a, b, c):
                return False
            # (a b) z = a (b z)
            zs = np.flatnonzero(T[b] >= 0)
            bz = T[b, zs]
            if not self._pairs(T[c, zs], T[a, bz],
                               lambda i, v: self._assign(c, int(zs[i]), int(v)),
                               lambda i, v: self._assign(a, int(bz[i]), int(v))):
                return False
            # (x a) b = x (a b)
            xs = np.flatnonzero(T[:, a] >= 0)
            xa = T[xs, a]
            if not self._pairs(T[xa, b], T[xs, c],
                               lambda i, v: self._assign(int(xa[i]), b, int(v)),
                               lambda i, v: self._assign(int(xs[i]), c, int(v))):
                return False
            # a = x y: x (y b) = c
            xs = np.flatnonzero(rw[:, a] >= 0)
            ys = rw[xs, a]
            yb = T[ys, b]
            got = np.where(yb >= 0, T[xs, np.maximum(yb, 0)], -1)
            want_col = rw[xs, c]
            for i in range(len(xs)):
                if yb[i] >= 0:
                    if got[i] >= 0 and got[i] != c:
                        return False
                    if got[i] < 0 and not self._assign(int(xs[i]), int(yb[i]), c):
                        return False
                elif want_col[i] >= 0 and not self._assign(int(ys[i]), b, int(want_col[i])):
                    return False
            # b = y z: (a y) z = c
            ys = np.flatnonzero(rw[:, b] >= 0)
            zs = rw[ys, b]
            ay = T[a, ys]
            got = np.where(ay >= 0, T[np.maximum(ay, 0), zs], -1)
            want_row = cw[c, zs]
            for i in range(len(ys)):
                if ay[i] >= 0:
                    if got[i] >= 0 and got[i] != c:
                        return False
                    if got[i] < 0 and not self._assign(int(ay[i]), int(zs[i]), c):
                        return False
                elif want_row[i] >= 0 and not self._assign(a, int(ys[i]), int(want_row[i])):
                    return False
        return True

    def _next_cell(self):
        open_ = np.flatnonzero(self.T.reshape(-1) < 0)
        if not open_.size:
            return None
        return divmod(int(open_[0]), self.n)

    def run(self, limit: int = 1, keep: bool = False,
            soft_budget: bool = False) -> tuple[list, int, bool]:
        """Enumerate completions in order: (tables kept, count, exhausted).

        Only the first table is kept unless `keep`.  With `soft_budget`, an
        exhausted budget after a first solution ends the count early instead
        of raising.
        """
        found: list = []
        count = 0
        for g in range(self.n):
            if not (self._assign(0, g, g) and self._assign(g, 0, g)):
                return found, 0, True
        if not self._propagate():
            return found, 0, True
        stack: list = []
        descend = True
        while True:
            if descend:
                cell = self._next_cell()
                if cell is None:
                    count += 1
                    if keep or not found:
                        found.append(self.T.copy())
                    if count >= limit:
                        return found, count, False
                    descend = False
                else:
                    stack.append([cell[0], cell[1], 0, len(self.trail)])
            if not stack:
                return found, count, True
            frame = stack[-1]
            a, b, v, mark = frame
            self._undo(mark)
            base = int(self.blk[a, b]) * self.s
            ok = False
            while v < self.s:
                self.nodes += 1
                if self.nodes > self.budget:
                    if soft_budget and found:
                        return found, count, False
                    raise BudgetExceeded(f"table search used more than {self.budget} nodes")
                ok = self._assign(a, b, base + v) and self._propagate()
                v += 1
                if ok:
                    break
                self._undo(mark)
            frame[2] = v
            if ok:
                descend = True
            else:
                stack.pop()
                descend = False


def complete_table(qprod: np.ndarray, s: int, budget: int = DEFAULT_BUDGET,
                   limit: int = 1) -> tuple[np.ndarray, int, bool]:
    """Least group table over `qprod` extended by s apex values, the number of
    completions found (up to `limit`) and whether that count is exhaustive."""
    search = _TableSearch(np.asarray(qprod, dtype=np.int64), s, budget)
    tables, count, exhausted = search.run(limit, soft_budget=limit > 1)
    if not tables:
        raise NoCompletion(f"no group extends the given quotient by {s} apex values")
    validate_group(tables[0], "completion")
    return tables[0], count, exhausted


def all_completions(qprod: np.ndarray, s: int, budget: int = DEFAULT_BUDGET, limit: int = 1 << 20) -> list:
    """Every completion in enumeration order (up to `limit`)."""
    search = _TableSearch(np.asarray(qprod, dtype=np.int64), s, budget)
    return search.run(limit, keep=True)[0]


# constructed corners

@dataclass(eq=False)
class CornerGroup:
    j: int
    k: int
    t: int
    positions: tuple
    sizes: tuple
    table: np.ndarray

    @property
    def order(self) -> int:
        return len(self.table)

    def decode(self, idx: int) -> tuple[int, ...]:
        out = []
        for s in reversed(self.sizes):
            idx, x = divmod(idx, s)
            out.append(x)
        return tuple(reversed(out))

    def encode(self, pts: Sequence[int]) -> int:
        idx = 0
        for x, s in zip(pts, self.sizes):
            idx = idx * s + int(x)
        return idx

    def elements(self) -> np.ndarray:
        """Point tuples of all elements, in index order."""
        if not self.sizes:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(self.sizes).reshape(len(self.sizes), -1).T
        return grids.astype(np.int64)

    def group(self, name: str | None = None) -> FiniteGroup:
        return validate_group(self.table, name or f"U({self.j},{self.k})@{self.t}")


@dataclass(eq=False)
class ConstructedSignature:
    """Corner groups per time for the window 0..length-1 (trivial outside)."""

    ell: int
    mode: str
    length: int
    points: dict  # (start, k) -> labels, identity first
    corners: dict  # (t, j, k) -> CornerGroup
    name: str = "sig"
    anchor: int = 0
    alternatives: dict = field(default_factory=dict)

    @property
    def period1(self) -> bool:
        return self.mode == "group"

    def size(self, s: int, k: int) -> int:
        return len(self.points.get((s, k), ("e",)))

    def component(self, t: int) -> CornerGroup:
        return self.corners[(t, 0, 0)]

    def induced(self) -> InducedSequence:
        rows, tables = [], []
        for t in range(self.length):
            c = self.component(t)
            rows.append(c.elements())
            tables.append(c.table)
        return InducedSequence(self.ell, rows, tables)

    def order_profile(self) -> list[int]:
        return [self.component(t).order for t in range(self.length)]


def _positions(ell: int, j: int, k: int) -> tuple:
    return tuple(triangle_positions(j, k, ell))


def _sizes(sig: ConstructedSignature, t: int, positions) -> tuple:
    return tuple(sig.size(t - m, n) for m, n in positions)


def _quotient_product(sig: ConstructedSignature, t: int, j: int, k: int, positions, sizes) -> np.ndarray:
    """Products over the non-apex positions, from the two corners above."""
    if k == sig.ell:
        return np.zeros((1, 1), dtype=np.int64)
    A = sig.corners[(t, j, k + 1)]
    B = sig.corners[(t, j + 1, k + 1)]
    qpos, qsizes = positions[:-1], sizes[:-1]
    grid = np.indices(qsizes).reshape(len(qsizes), -1).T if qsizes else np.zeros((1, 0), dtype=np.int64)
    col = {p: i for i, p in enumerate(qpos)}
    a_idx = np.array([A.encode(row[[col[p] for p in A.positions]]) for row in grid], dtype=np.int64)
    b_idx = np.array([B.encode(row[[col[p] for p in B.positions]]) for row in grid], dtype=np.int64)
    pair = np.full((A.order, B.order), -1, dtype=np.int64)
    pair[a_idx, b_idx] = np.arange(len(grid))
    qprod = pair[A.table[np.ix_(a_idx, a_idx)], B.table[np.ix_(b_idx, b_idx)]]
    if (qprod < 0).any():
        raise NoCompletion(f"corners above ({j},{k}) at {t} disagree on their overlap")
    return qprod


def _projection(child: CornerGroup, parent: CornerGroup) -> np.ndarray:
    cols = [child.positions.index(p) for p in parent.positions]
    els = child.elements()
    return np.array([parent.encode(row[cols]) for row in els], dtype=np.int64)


def _build_corner(sig: ConstructedSignature, t: int, j: int, k: int, budget: int,
                  user_table: np.ndarray | None = None, count: int = 1) -> CornerGroup:
    positions = _positions(sig.ell, j, k)
    sizes = _sizes(sig, t, positions)
    qprod = _quotient_product(sig, t, j, k, positions, sizes)
    s = sizes[-1]
    if user_table is not None:
        n = len(qprod) * s
        if user_table.shape != (n, n):
            raise NoCompletion(f"table for ({j},{k}) must be {n}x{n}")
        try:
            validate_group(user_table, f"table ({j},{k})")
        except GroupSysError as e:
            raise NoCompletion(f"table for ({j},{k}) is not a group: {e}") from None
        q = np.arange(n) // s
        if not np.array_equal(user_table // s, qprod[np.ix_(q, q)]):
            raise NoCompletion(f"table for ({j},{k}) does not project onto the corners above it")
        table = user_table
    else:
        table, found, exhausted = complete_table(qprod, s, budget, limit=count)
        if count > 1:
            sig.alternatives[(t, j, k)] = (found, exhausted)
            log.info("corner (%d,%d) at %d: %d completion(s)%s", j, k, t, found,
                     "" if exhausted else " or more")
    corner = CornerGroup(j, k, t, positions, sizes, table)
    sig.corners[(t, j, k)] = corner
    return corner


def _shifted(corner: CornerGroup, t: int, d: int) -> CornerGroup:
    """The same group seen d steps later (d may be negative)."""
    pos = tuple((m + d, n) for m, n in corner.positions)
    return CornerGroup(corner.j + d, corner.k, t, pos, corner.sizes, corner.table)


def _pairs(ell: int):
    return [(j, k) for k in range(ell + 1) for j in range(k + 1)]


def _trivial_component(sig: ConstructedSignature, t: int) -> None:
    for j, k in _pairs(sig.ell):
        pos = _positions(sig.ell, j, k)
        sizes = _sizes(sig, t, pos)
        if any(x != 1 for x in sizes):
            raise NoCompletion(f"time {t} should be trivial but sees live points")
        sig.corners[(t, j, k)] = CornerGroup(j, k, t, pos, sizes, np.zeros((1, 1), dtype=np.int64))


def construct_component_group(sig: ConstructedSignature, t: int, budget: int = DEFAULT_BUDGET,
                              tables: dict | None = None) -> CornerGroup:
    """All corners at time t, top row first; returns the (0,0) corner."""
    tables = tables or {}
    for k in range(sig.ell, -1, -1):
        for j in range(k + 1):
            _build_corner(sig, t, j, k, budget, tables.get((j, k)))
    return sig.component(t)


def extend_signature_sequence(sig: ConstructedSignature, direction: str, budget: int = DEFAULT_BUDGET,
                              tables: dict | None = None, count_alternatives: int = 16) -> CornerGroup:
    """Add one time on the right (after the last built time) or on the left.

    Generators first seen by the new time repeat the point sets of their
    neighbours at the same span.  The window `length` is left unchanged.
    """
    built = sorted({t for t, _, _ in sig.corners})
    tables = tables or {}
    ell = sig.ell
    if direction in ("right", "left"):
        t = built[-1] + 1 if direction == "right" else built[0] - 1
        step = -1 if direction == "right" else 1
        for k in range(ell + 1):
            for s in (range(t - ell, t + 1) if direction == "right" else range(t, t - ell - 1, -1)):
                if (s, k) not in sig.points and (s + step, k) in sig.points:
                    sig.points[(s, k)] = sig.points[(s + step, k)]
    if direction == "right":
        for j, k in _pairs(ell):
            if j >= 1:
                sig.corners[(t, j, k)] = _shifted(sig.corners[(t - 1, j - 1, k)], t, 1)
        for k in range(ell, -1, -1):
            _build_corner(sig, t, 0, k, budget, tables.get((0, k)))
    elif direction == "left":
        for j, k in _pairs(ell):
            if j < k:
                sig.corners[(t, j, k)] = _shifted(sig.corners[(t + 1, j + 1, k)], t, -1)
        for k in range(ell, -1, -1):
            _build_corner(sig, t, k, k, budget, tables.get((k, k)), count=count_alternatives)
    else:
        raise ValueError("direction must be 'left' or 'right'")
    return sig.component(t)


def _sequence_points(spec: LevelSpec, anchor: int, length: int) -> dict:
    """Generator points for every start seen by times 0..length-1."""
    pts = {}
    for k in range(spec.ell + 1):
        for s in range(-spec.ell, length):
            j = min(max(anchor - s, 0), k)
            pts[(s, k)] = spec.slot_points(j, k)
    return pts


def construct_signature_sequence(spec: LevelSpec, length: int | None = None, budget: int = DEFAULT_BUDGET,
                                 anchor: int | None = None) -> ConstructedSignature:
    """Full component at the anchor, extended one time at a time right then left.

    New generators on the right take the points of slot (0,k); new ones on
    the left take the points of slot (k,k).
    """
    ell = spec.ell
    length = length if length is not None else 2 * ell + 2
    anchor = anchor if anchor is not None else min(ell, length - 1)
    sig = ConstructedSignature(ell, "sequence", length, _sequence_points(spec, anchor, length), {},
                               spec.name, anchor)
    construct_component_group(sig, anchor, budget, spec.tables)
    for _ in range(anchor + 1, length):
        extend_signature_sequence(sig, "right", budget)
    for _ in range(anchor):
        extend_signature_sequence(sig, "left", budget)
    return sig


def construct_block_signature(spec: LevelSpec, budget: int = DEFAULT_BUDGET) -> ConstructedSignature:
    """Block system on [0, ell]: trivial before 0, then right extensions whose
    new columns can only use generators that end inside the block."""
    ell = spec.ell
    if len(spec.slot_points(0, ell)) < 2:
        raise NoCompletion(f"a block spec needs a nontrivial generator of span {ell + 1} at the start")
    pts = {key: lab for key, lab in spec.points.items()}
    sig = ConstructedSignature(ell, "block", ell + 1, pts, {}, spec.name, 0)
    _trivial_component(sig, -1)
    for n in range(ell + 1):
        t = n
        for j, k in _pairs(ell):
            if j >= 1:
                sig.corners[(t, j, k)] = _shifted(sig.corners[(t - 1, j - 1, k)], t, 1)
        for k in range(ell, -1, -1):
            _build_corner(sig, t, 0, k, budget, spec.tables.get((n, k)))
    for key in list(sig.corners):
        if key[0] < 0:
            del sig.corners[key]
    for (s, k), lab in pts.items():
        if len(lab) > 1 and not (0 <= s and s + k <= ell):
            raise NoCompletion(f"generator ({s},{k}) leaves the block")
    return sig


def construct_signature_group(spec: LevelSpec, length: int | None = None,
                              budget: int = DEFAULT_BUDGET) -> ConstructedSignature:
    """One component built diagonal first, each row copied down from its
    diagonal corner; the same group is used at every time."""
    ell = spec.ell
    for k in range(ell + 1):
        if len({len(spec.slot_points(j, k)) for j in range(k + 1)}) != 1:
            raise NoCompletion(f"row {k} needs equal point sets for a signature group")
    length = length if length is not None else 2 * ell + 2
    pts = {(s, k): spec.slot_points(k, k) for k in range(ell + 1) for s in range(-ell, length)}
    sig = ConstructedSignature(ell, "group", length, pts, {}, spec.name, 0)
    t0 = 0
    for k in range(ell, -1, -1):
        _build_corner(sig, t0, k, k, budget, spec.tables.get((k, k)))
        for j in range(k - 1, -1, -1):
            above = sig.corners[(t0, j + 1, k)]
            user = spec.tables.get((j, k))
            if user is not None and not np.array_equal(user, above.table):
                raise NoCompletion(f"table for ({j},{k}) differs from its row")
            sig.corners[(t0, j, k)] = CornerGroup(j, k, t0, _positions(ell, j, k), above.sizes, above.table)
    for t in range(1, length):
        for j, k in _pairs(ell):
            c = sig.corners[(t0, j, k)]
            sig.corners[(t, j, k)] = CornerGroup(j, k, t, c.positions, c.sizes, c.table)
    return sig


def synthesize(spec: LevelSpec, length: int | None = None, budget: int = DEFAULT_BUDGET) -> ConstructedSignature:
    if spec.mode == "block":
        return construct_block_signature(spec, budget)
    if spec.mode == "group":
        return construct_signature_group(spec, length, budget)
    return construct_signature_sequence(spec, length, budget)


# verification of a construction

def verify_construction(sig: ConstructedSignature) -> Report:
    """Projection homomorphisms between rows, (0,0) onto every corner, and
    the signature conditions of the mode."""
    rep = Report(f"construction {sig.name} ({sig.mode})")
    ell = sig.ell
    for t in range(sig.length):
        for j, k in _pairs(ell):
            c = sig.corners[(t, j, k)]
            try:
                G = c.group()
            except GroupSysError as e:
                rep.add(f"corner group[{j},{k}@{t}]", False, str(e))
                continue
            if k < ell:
                for m in (j, j + 1):
                    p = sig.corners[(t, m, k + 1)]
                    rep.add(f"row projection[{j},{k}->{m},{k + 1}@{t}]",
                            check_homomorphism(_projection(c, p), G, p.group()))
            top = sig.component(t)
            rep.add(f"component projection[{j},{k}@{t}]",
                    check_homomorphism(_projection(top, c), top.group(), G))
    if sig.mode == "group":
        for j, k in _pairs(ell):
            if j < k:
                a, b = sig.corners[(0, j, k)], sig.corners[(0, j + 1, k)]
                rep.add(f"(ii)e slice equality[{j},{k}]",
                        a.sizes == b.sizes and np.array_equal(a.table, b.table))
        times = range(0, sig.length - 1)
    elif sig.mode == "block":
        times = range(-1, sig.length)
        for (s, k), lab in sig.points.items():
            if len(lab) > 1:
                rep.add(f"block support[{s},{k}]", s >= 0 and s + k <= ell)
    else:
        times = range(0, sig.length - 1)
    check_signature_sequence(sig.induced(), rep, times)
    return rep


# realization

def realize_code(sig: ConstructedSignature) -> BlockCode:
    """Codewords are all point choices for generators lying inside the window;
    the symbol at time t is the element of the (0,0) corner it induces."""
    L = sig.length
    live = [(s, k) for (s, k), lab in sorted(sig.points.items())
            if len(lab) > 1 and s >= 0 and s + k <= L - 1]
    total = 1
    for key in live:
        total *= sig.size(*key)
    if total > MAX_REALIZED_WORDS:
        raise BudgetExceeded(f"realization would have {total} codewords")
    comps = [sig.component(t) for t in range(L)]
    if sig.period1:
        G = comps[0].group("U")
        alph = [G] * L
    else:
        alph = [c.group(f"U{t}") for t, c in enumerate(comps)]
    idx = {key: i for i, key in enumerate(live)}
    words = []
    for choice in itertools.product(*(range(sig.size(*key)) for key in live)):
        w = []
        for t, c in enumerate(comps):
            pts = [choice[idx[(t - m, n)]] if (t - m, n) in idx else 0 for m, n in c.positions]
            w.append(c.encode(pts))
        words.append(tuple(w))
    return BlockCode(sig.name, alph, words, period1=sig.period1)


def compare_times(sig: ConstructedSignature) -> range:
    """Times whose components only involve generators inside the window."""
    if sig.mode == "block":
        return range(sig.length)
    return range(sig.ell, sig.length - sig.ell)


def compare_with_analysis(sig: ConstructedSignature, system: GroupSystem) -> Report:
    """Analyzed u-corners against constructed corners, matched through the
    code symbols: each analyzed slice must correspond to exactly one
    constructed slice, and the correspondence must carry one corner table
    onto the other."""
    rep = Report(f"round trip {sig.name}")
    rep.add("controllability index", system.ell == sig.ell, f"{system.ell} vs {sig.ell}")
    if system.ell != sig.ell:
        return rep
    tr = system.trellis
    for t in compare_times(sig):
        comp = sig.component(t)
        B = tr.groups[t]
        U = comp.group()
        lab = tr.label[t]
        rep.add(f"branch symbols[{t}]", len(set(lab.tolist())) == B.order == U.order and
                check_homomorphism(lab, B, U))
        if sig.ell >= 1:
            left, right = sig.corners[(t, 1, 1)].order, sig.corners[(t, 0, 1)].order
        else:
            left = right = 1
        rep.add(f"state counts[{t}]",
                (tr.states[t].order, tr.states[t + 1].order) == (left, right),
                f"{tr.states[t].order},{tr.states[t + 1].order} vs {left},{right}")
        els = comp.elements()
        for j, k in _pairs(sig.ell):
            ana = system.triangle_group(j, k, t, "u")
            con = sig.corners[(t, j, k)]
            cols = [comp.positions.index(p) for p in con.positions]
            con_of = np.array([con.encode(els[e][cols]) for e in lab], dtype=np.int64)
            f = np.full(ana.order, -1, dtype=np.int64)
            ok = True
            for b in range(B.order):
                a = ana.of_branch[b]
                if f[a] not in (-1, con_of[b]):
                    ok = False
                f[a] = con_of[b]
            ok = ok and check_isomorphism_via_bijection(f, ana.group, con.group())
            rep.add(f"corner match[{j},{k}@{t}]", ok, f"orders {ana.order} vs {con.order}")
    return rep


@dataclass(eq=False)
class Realization:
    signature: ConstructedSignature
    code: BlockCode
    system: GroupSystem
    construction: Report
    analysis: Report
    round_trip: Report

    @property
    def ok(self) -> bool:
        return self.construction.ok and self.analysis.ok and self.round_trip.ok


def realize(sig: ConstructedSignature) -> Realization:
    """Build the code, re-analyze it and compare; raises RealizationMismatch
    when the analysis does not give back the construction."""
    construction = verify_construction(sig)
    code = realize_code(sig)
    system = GroupSystem(code)
    analysis = verify_signature_sequence(system)
    trip = compare_with_analysis(sig, system)
    real = Realization(sig, code, system, construction, analysis, trip)
    if not real.ok:
        bad = (construction.failures() + analysis.failures() + trip.failures())[:3]
        raise RealizationMismatch(f"{sig.name}: " + "; ".join(f"{n} {d}".strip() for n, _, d in bad))
    return real


def realize_trellis(sig: ConstructedSignature) -> GroupTrellis:
    return realize(sig).system.trellis


def format_signature(sig: ConstructedSignature) -> str:
    lines = [f"signature {sig.name}: mode {sig.mode}, ell {sig.ell}, window {sig.length}",
             "component orders: " + " ".join(str(x) for x in sig.order_profile())]
    for t in range(sig.length):
        parts = []
        for k in range(sig.ell, -1, -1):
            parts.append(" ".join(str(sig.corners[(t, j, k)].order) for j in range(k + 1)))
        lines.append(f"t {t}: corner orders by row " + " | ".join(parts))
    for (t, j, k), (n, exhausted) in sorted(sig.alternatives.items()):
        lines.append(f"left extension corner ({j},{k}) at {t}: {n}{'' if exhausted else '+'} completion(s)")
    return "\n".join(lines) + "\n"
