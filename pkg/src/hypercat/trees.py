"""Labelled full p-ary trees and their relation to hypercube decompositions.

A tree is either :data:`LEAF` or a :class:`Tree` whose root carries an axis
label in ``1..d`` and exactly ``p`` ordered children. The map
:func:`tree_to_decomposition` places the children side by side along the root's
axis; two trees are interchange equivalent when they have the same image.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from hypercat.core import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    HypercatError,
    PAdicRational,
    Params,
    fuss_catalan,
)
from hypercat.decomp import Decomposition, decomposition_to_tree, slices_along


class MalformedTree(HypercatError, ValueError):
    pass


@dataclass(frozen=True)
class Tree:
    label: int = 0
    children: tuple = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> int:
        if self.is_leaf:
            return 1
        return sum(c.leaves() for c in self.children)

    def internal_nodes(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + sum(c.internal_nodes() for c in self.children)

    def __str__(self):
        return format_tree(self)


LEAF = Tree()


def node(label: int, *children: Tree) -> Tree:
    return Tree(label, tuple(children))


def check_tree(t: Tree, params: Params) -> None:
    """Raise :class:`MalformedTree` unless every label is in ``1..d`` and every node has ``p`` children."""
    if t.is_leaf:
        if t.label:
            raise MalformedTree("leaf carries a label")
        return
    if not 1 <= t.label <= params.d:
        raise MalformedTree(f"label {t.label} outside 1..{params.d}")
    if len(t.children) != params.p:
        raise MalformedTree(f"node has {len(t.children)} children, expected {params.p}")
    for c in t.children:
        check_tree(c, params)


# --- text format ------------------------------------------------------------

def format_tree(t: Tree) -> str:
    if t.is_leaf:
        return "*"
    return "(" + " ".join([str(t.label)] + [format_tree(c) for c in t.children]) + ")"


_TOKEN = re.compile(r"\(|\)|\*|\d+|\S")


def parse_tree(text: str, params: Params) -> Tree:
    """Parse ``tree := "*" | "(" label (" " tree){p} ")"``."""
    tokens = _TOKEN.findall(text)
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(tokens):
            raise MalformedTree("unexpected end of input")
        tok = tokens[pos]
        pos += 1
        return tok

    def parse():
        tok = take()
        if tok == "*":
            return LEAF
        if tok != "(":
            raise MalformedTree(f"unexpected token {tok!r}")
        label = take()
        if not label.isdigit():
            raise MalformedTree(f"expected a label, got {label!r}")
        children = []
        while pos < len(tokens) and tokens[pos] != ")":
            children.append(parse())
        if take() != ")":
            raise MalformedTree("missing ')'")
        if len(children) != params.p:
            raise MalformedTree(f"node labelled {label} has {len(children)} children, expected {params.p}")
        return Tree(int(label), tuple(children))

    tree = parse()
    if pos != len(tokens):
        raise MalformedTree(f"trailing input after position {pos}")
    check_tree(tree, params)
    return tree


# --- f: tree -> decomposition -------------------------------------------------

def _place(t: Tree, box: list, params: Params, out: list) -> None:
    if t.is_leaf:
        out.append(tuple(box))
        return
    if not 1 <= t.label <= params.d:
        raise MalformedTree(f"label {t.label} outside 1..{params.d}")
    if len(t.children) != params.p:
        raise MalformedTree(f"node has {len(t.children)} children, expected {params.p}")
    axis = t.label - 1
    lo, hi = box[axis]
    width = hi - lo
    for j, child in enumerate(t.children):
        sub = list(box)
        sub[axis] = (lo + width.times_fraction(j), lo + width.times_fraction(j + 1))
        _place(child, sub, params, out)


def tree_to_decomposition(t: Tree, params: Params) -> Decomposition:
    out: list = []
    zero, one = PAdicRational.zero(params.p), PAdicRational.one(params.p)
    _place(t, [(zero, one)] * params.d, params, out)
    return Decomposition(params, tuple(out))


# --- maximality and canonical form -----------------------------------------

def _blocking(t: Tree, bad: list) -> int:
    """Bitmask of labels present on every root-to-leaf path of ``t``; flags violations in ``bad``."""
    if t.is_leaf:
        return 0
    common = -1
    for c in t.children:
        common &= _blocking(c, bad)
    if common >> (t.label + 1):
        # some j > label blocks every path below this node
        bad.append(t)
    return common | (1 << t.label)


def is_interchange_maximal(t: Tree, params: Params | None = None) -> bool:
    """No subtree rooted at label ``i`` has a ``j > i`` on every path to its leaves."""
    bad: list = []
    _blocking(t, bad)
    return not bad


def canonicalize(t: Tree, params: Params) -> Tree:
    """The unique interchange-maximal tree with the same decomposition as ``t``."""
    return decomposition_to_tree(tree_to_decomposition(t, params))


def swap_at(t: Tree, path: Sequence[int]) -> Tree:
    """Apply the interchange-law swap at the node reached by ``path`` (child indices).

    The node (label ``i``) must have ``p`` internal children sharing one label
    ``j != i``. The result has root ``j``, children labelled ``i``, and the
    grandchildren transposed: new child ``a`` gets ``T_{1a}, ..., T_{pa}``.
    """
    if path:
        head, rest = path[0], path[1:]
        kids = list(t.children)
        kids[head] = swap_at(kids[head], rest)
        return Tree(t.label, tuple(kids))
    if t.is_leaf or any(c.is_leaf for c in t.children):
        raise MalformedTree("swap needs a node whose children are all internal")
    j = t.children[0].label
    if j == t.label or any(c.label != j for c in t.children):
        raise MalformedTree("children must share one label different from the root's")
    p = len(t.children)
    grid = [c.children for c in t.children]
    return Tree(j, tuple(Tree(t.label, tuple(grid[b][a] for b in range(p))) for a in range(p)))


def swap_sites(t: Tree, path: tuple = ()) -> Iterator[tuple]:
    """Yield the paths of every node where :func:`swap_at` applies."""
    if t.is_leaf:
        return
    kids = t.children
    if all(not c.is_leaf for c in kids) and len({c.label for c in kids}) == 1 and kids[0].label != t.label:
        yield path
    for i, c in enumerate(kids):
        yield from swap_sites(c, path + (i,))


# --- enumeration -------------------------------------------------------------

def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Weak compositions of ``total`` into ``parts`` parts, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _trees_with_internal(d: int, p: int, m: int) -> tuple[Tree, ...]:
    if m == 0:
        return (LEAF,)
    out = []
    for comp in _compositions(m - 1, p):
        for label in range(1, d + 1):
            for kids in itertools.product(*(_trees_with_internal(d, p, k) for k in comp)):
                out.append(Tree(label, kids))
    return tuple(out)


def tree_count(params: Params, n: int) -> int:
    """``|T_{d,p,n}| = d^m`` times the number of unlabelled full p-ary trees."""
    if not params.is_admissible(n):
        return 0
    return params.d ** params.internal_nodes(n) * fuss_catalan(params.p, n)


def enumerate_trees(params: Params, n: int, budget: int = DEFAULT_BUDGET) -> Iterator[Tree]:
    """Yield every tree in ``T_{d,p,n}`` once, in a deterministic order."""
    if not params.is_admissible(n):
        return
    total = tree_count(params, n)
    if total > budget:
        raise BudgetExceeded(f"{total} trees exceed budget {budget}")
    m = params.internal_nodes(n)
    if m == 0:
        yield LEAF
        return
    # stream the top level; only strictly smaller shapes are cached
    for comp in _compositions(m - 1, params.p):
        for label in range(1, params.d + 1):
            for kids in itertools.product(*(_trees_with_internal(params.d, params.p, k) for k in comp)):
                yield Tree(label, kids)


@dataclass(frozen=True)
class TreeClassReport:
    params: Params
    n: int
    total_trees: int
    maximal_trees: int
    class_count: int


def count_maximal(params: Params, n: int, budget: int = DEFAULT_BUDGET) -> TreeClassReport:
    """Count interchange-maximal trees and, independently, distinct images under f."""
    total = maximal = 0
    images = set()
    for t in enumerate_trees(params, n, budget):
        total += 1
        if is_interchange_maximal(t):
            maximal += 1
        images.add(tree_to_decomposition(t, params))
    report = TreeClassReport(params, n, total, maximal, len(images))
    if report.class_count != report.maximal_trees:
        raise AssertionError(f"maximal trees ({maximal}) != interchange classes ({len(images)}) for {params}, n={n}")
    return report


# --- U^S families -------------------------------------------------------------

def in_u_s(t: Tree, params: Params, s_set: Sequence[int], image: Decomposition | None = None) -> bool:
    """Membership of ``t`` in U^S: root ``s_1``, maximal root subtrees, and slicing along every other ``s_j``."""
    if t.is_leaf or t.label != s_set[0]:
        return False
    if not all(is_interchange_maximal(c) for c in t.children):
        return False
    if len(s_set) == 1:
        return True
    if image is None:
        image = tree_to_decomposition(t, params)
    return all(slices_along(image, s) for s in s_set[1:])


def _check_s_set(params: Params, s_set: Sequence[int]) -> tuple[int, ...]:
    s = tuple(s_set)
    if not s or any(b <= a for a, b in zip(s, s[1:])) or s[0] < 1 or s[-1] > params.d:
        raise ValueError(f"S must be a nonempty increasing subset of 1..{params.d}, got {s_set!r}")
    return s


def count_u_s(params: Params, n: int, s_set: Sequence[int], budget: int = DEFAULT_BUDGET) -> int:
    """Brute-force ``|U^S_{d,p,n}|``."""
    s = _check_s_set(params, s_set)
    return sum(1 for t in enumerate_trees(params, n, budget) if in_u_s(t, params, s))


def u_s_convolution(params: Params, n: int, k: int, maximal_counts: dict[int, int]) -> int:
    """Sum over ``n_1 + ... + n_{p^k} = n`` (all ``n_j >= 1``) of the product of ``|T+_{n_j}|``."""
    parts = params.p**k
    # coefficient n of w^parts with w = sum maximal_counts[i] x^i
    poly = {0: 1}
    for _ in range(parts):
        nxt: dict[int, int] = {}
        for a, ca in poly.items():
            for b, cb in maximal_counts.items():
                if a + b <= n and cb:
                    nxt[a + b] = nxt.get(a + b, 0) + ca * cb
        poly = nxt
    return poly.get(n, 0)


def maximal_counts_upto(params: Params, n: int, budget: int = DEFAULT_BUDGET) -> dict[int, int]:
    return {i: count_maximal(params, i, budget).maximal_trees if params.is_admissible(i) else 0
            for i in range(1, n + 1)}


def inclusion_exclusion_identity(params: Params, n: int, budget: int = DEFAULT_BUDGET) -> bool:
    """Check ``|T+| = sum_{i>=1} (-1)^(i-1) sum_{|S|=i} |U^S|`` by brute force."""
    if n < 2:
        raise ValueError("the identity needs n >= 2")
    trees = list(enumerate_trees(params, n, budget))
    images = {t: tree_to_decomposition(t, params) for t in trees}
    lhs = sum(1 for t in trees if is_interchange_maximal(t))
    rhs = 0
    for size in range(1, params.d + 1):
        for s in itertools.combinations(range(1, params.d + 1), size):
            count = sum(1 for t in trees if in_u_s(t, params, s, images[t]))
            rhs += (-1) ** (size - 1) * count
    return lhs == rhs
