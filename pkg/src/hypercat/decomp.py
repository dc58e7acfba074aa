"""Exact (d,p,n)-decompositions of the open unit hypercube.

A :class:`Decomposition` is an immutable, canonically ordered tuple of boxes
whose endpoints are :class:`~hypercat.core.PAdicRational` values. Equality and
hashing are by that canonical tuple, so two split sequences that reach the same
set of boxes compare equal.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

from hypercat.core import DEFAULT_BUDGET, BudgetExceeded, HypercatError, PAdicRational, Params

Interval = tuple[PAdicRational, PAdicRational]
Box = tuple[Interval, ...]


class NoSplitAxis(HypercatError):
    """No axis slices a multi-box decomposition into p slabs."""


class UnsupportedDimension(HypercatError, ValueError):
    pass


class DecompositionFormatError(HypercatError, ValueError):
    pass


def _box_key(box: Box):
    return tuple(lo for lo, _ in box) + tuple(hi for _, hi in box)


@dataclass(frozen=True)
class Decomposition:
    params: Params
    boxes: tuple[Box, ...]

    def __post_init__(self):
        object.__setattr__(self, "boxes", tuple(sorted(self.boxes, key=_box_key)))

    def __len__(self):
        return len(self.boxes)

    @classmethod
    def trivial(cls, params: Params) -> Decomposition:
        zero, one = PAdicRational.zero(params.p), PAdicRational.one(params.p)
        return cls(params, (((zero, one),) * params.d,))

    @classmethod
    def from_fractions(cls, params: Params, boxes) -> Decomposition:
        """Build from boxes given as ``[((lo_num, lo_exp), (hi_num, hi_exp)), ...]`` per axis."""
        p = params.p
        return cls(params, tuple(
            tuple((PAdicRational(*lo, p), PAdicRational(*hi, p)) for lo, hi in box) for box in boxes
        ))

    def serialize(self) -> str:
        return dumps(self)


def split(dec: Decomposition, box_index: int, axis: int) -> Decomposition:
    """Replace box ``box_index`` by its ``p`` equal slabs along ``axis`` (1-based)."""
    d, p = dec.params.d, dec.params.p
    if not 0 <= box_index < len(dec.boxes):
        raise IndexError(f"box index {box_index} out of range")
    if not 1 <= axis <= d:
        raise IndexError(f"axis {axis} outside 1..{d}")
    box = dec.boxes[box_index]
    lo, hi = box[axis - 1]
    width = hi - lo
    cuts = [lo + width.times_fraction(j) for j in range(p + 1)]
    pieces = []
    for j in range(p):
        piece = list(box)
        piece[axis - 1] = (cuts[j], cuts[j + 1])
        pieces.append(tuple(piece))
    rest = dec.boxes[:box_index] + dec.boxes[box_index + 1:]
    return Decomposition(dec.params, rest + tuple(pieces))


def enumerate_decompositions(params: Params, n: int, budget: int = DEFAULT_BUDGET) -> Iterator[Decomposition]:
    """Yield every distinct (d,p,n)-decomposition once, in canonical order.

    Breadth-first over the number of splits; each frontier is deduplicated
    through the decompositions' canonical form. ``budget`` caps the total number
    of states held across levels.
    """
    if not params.is_admissible(n):
        return
    m = params.internal_nodes(n)
    frontier = {Decomposition.trivial(params)}
    seen = 1
    for _ in range(m):
        nxt = set()
        for dec in frontier:
            for idx in range(len(dec.boxes)):
                for axis in range(1, params.d + 1):
                    nxt.add(split(dec, idx, axis))
            if seen + len(nxt) > budget:
                raise BudgetExceeded(f"decomposition search exceeded budget {budget}")
        seen += len(nxt)
        frontier = nxt
    yield from sorted(frontier, key=lambda dec: tuple(_box_key(b) for b in dec.boxes))


def _slab_index(interval: Interval, p: int) -> int | None:
    """0-based slab ``j`` with ``j/p <= lo < hi <= (j+1)/p``, or None when the interval straddles a cut."""
    lo, hi = interval
    e = max(lo.exp, hi.exp, 1)
    a, b = lo.scaled_numerator(e), hi.scaled_numerator(e)
    unit = p ** (e - 1)
    j = a // unit
    return j if b <= (j + 1) * unit else None


def slices_along(dec: Decomposition, axis: int) -> bool:
    """True when every box lies inside one of the ``p`` slabs orthogonal to ``axis``."""
    p = dec.params.p
    return all(_slab_index(box[axis - 1], p) is not None for box in dec.boxes)


def _rescale(x: PAdicRational, j: int) -> PAdicRational:
    # p*x - j, exact; x lies in [j/p, (j+1)/p]
    if x.exp == 0:
        num = x.num * x.p - j
        return PAdicRational(num, 0, x.p)
    return PAdicRational(x.num - j * x.p ** (x.exp - 1), x.exp - 1, x.p)


def decomposition_to_tree(dec: Decomposition):
    """The canonical tree of ``dec``: at each level split along the largest slicing axis."""
    from hypercat.trees import LEAF, Tree

    d, p = dec.params.d, dec.params.p
    if len(dec.boxes) == 1:
        return LEAF
    for axis in range(d, 0, -1):
        slabs = [_slab_index(box[axis - 1], p) for box in dec.boxes]
        if any(j is None for j in slabs):
            continue
        parts: list[list[Box]] = [[] for _ in range(p)]
        for box, j in zip(dec.boxes, slabs):
            lo, hi = box[axis - 1]
            scaled = list(box)
            scaled[axis - 1] = (_rescale(lo, j), _rescale(hi, j))
            parts[j].append(tuple(scaled))
        if any(not part for part in parts):
            raise NoSplitAxis(f"slab along axis {axis} is empty; input is not a partition")
        children = tuple(decomposition_to_tree(Decomposition(dec.params, tuple(part))) for part in parts)
        return Tree(axis, children)
    raise NoSplitAxis("no axis slices the decomposition")


class Validation(NamedTuple):
    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


def validate(dec: Decomposition) -> Validation:
    """Check box bounds, pairwise disjointness, unit volume and the box-count congruence."""
    d, p = dec.params.d, dec.params.p
    zero, one = PAdicRational.zero(p), PAdicRational.one(p)
    if not dec.boxes:
        return Validation(False, "no boxes")
    for i, box in enumerate(dec.boxes):
        if len(box) != d:
            return Validation(False, f"box {i} has {len(box)} intervals, expected {d}")
        for axis, (lo, hi) in enumerate(box, start=1):
            if lo.p != p or hi.p != p:
                return Validation(False, f"box {i} axis {axis} uses a different base")
            if not (zero <= lo < hi <= one):
                return Validation(False, f"box {i} axis {axis} interval ({lo}, {hi}) is empty or outside [0, 1]")
    boxes = dec.boxes
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            if all(a_lo < b_hi and b_lo < a_hi for (a_lo, a_hi), (b_lo, b_hi) in zip(boxes[i], boxes[j])):
                return Validation(False, f"boxes {i} and {j} overlap")
    e = max(x.exp for box in boxes for iv in box for x in iv)
    volume = 0
    for box in boxes:
        v = 1
        for lo, hi in box:
            v *= hi.scaled_numerator(e) - lo.scaled_numerator(e)
        volume += v
    if volume != p ** (e * d):
        return Validation(False, f"total volume {volume}/{p}^{e * d} is not 1")
    if (len(boxes) - 1) % (p - 1):
        return Validation(False, f"{len(boxes)} boxes is not congruent to 1 mod {p - 1}")
    return Validation(True)


# --- text format ------------------------------------------------------------

def dumps(dec: Decomposition) -> str:
    """Header ``"d p n"`` then one box per line, intervals ``lo,hi`` joined by ``;``."""
    lines = [f"{dec.params.d} {dec.params.p} {len(dec.boxes)}"]
    for box in dec.boxes:
        lines.append(";".join(f"{lo},{hi}" for lo, hi in box))
    return "\n".join(lines) + "\n"


def loads(text: str) -> Decomposition:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DecompositionFormatError("empty input")
    try:
        d, p, n = (int(x) for x in lines[0].split())
        params = Params(d, p)
    except ValueError as exc:
        raise DecompositionFormatError(f"bad header {lines[0]!r}") from exc
    if len(lines) - 1 != n:
        raise DecompositionFormatError(f"header announces {n} boxes, found {len(lines) - 1}")
    boxes = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(";")
        if len(parts) != d:
            raise DecompositionFormatError(f"line {lineno}: expected {d} intervals")
        box = []
        for part in parts:
            try:
                lo_s, hi_s = part.split(",")
                box.append((PAdicRational.parse(lo_s, p), PAdicRational.parse(hi_s, p)))
            except ValueError as exc:
                raise DecompositionFormatError(f"line {lineno}: {exc}") from exc
        boxes.append(tuple(box))
    return Decomposition(params, tuple(boxes))


# --- SVG --------------------------------------------------------------------

def _px(x: PAdicRational, scale: int) -> str:
    value = x.num * scale / x.p**x.exp
    text = f"{value:.6f}".rstrip("0").rstrip(".")
    return text or "0"


def render_svg(dec: Decomposition) -> str:
    """Deterministic SVG drawing of a decomposition with ``d <= 2``."""
    d = dec.params.d
    if d > 2:
        raise UnsupportedDimension(f"cannot render d={d}")
    height = 1000 if d == 2 else 100
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1000 {height}" '
        f'width="1000" height="{height}">',
    ]
    for box in dec.boxes:
        (x0, x1) = box[0]
        if d == 2:
            y0, y1 = box[1]
            # axis 2 points up
            x, w = _px(x0, 1000), _px(x1 - x0, 1000)
            y, h = _px(PAdicRational.one(dec.params.p) - y1, 1000), _px(y1 - y0, 1000)
        else:
            x, w = _px(x0, 1000), _px(x1 - x0, 1000)
            y, h = "0", "100"
        out.append(f'  <rect x="{x}" y="{y}" width="{w}" height="{h}" '
                   f'fill="none" stroke="black" stroke-width="4"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
