"""Noncrossing partitions of ``{1..n}``.

Partitions are stored canonically: each block is a sorted tuple and the
blocks are ordered by their minimum, so structural equality is partition
equality. This module is the brute-force substrate that the fast series
recursions are checked against; nothing here is meant for large ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from freeprob.errors import DomainError, ResourceError

MAX_ENUMERATION = 14

Blocks = tuple  # tuple[tuple[int, ...], ...]


def canonical_blocks(p: Iterable[Iterable[int]], n: int | None = None) -> Blocks:
    """Validate a set partition and return its canonical block tuple.

    ``n`` defaults to the number of elements; the blocks must cover
    ``{1..n}`` exactly with no empty block.
    """
    blocks = [tuple(sorted(int(x) for x in b)) for b in p]
    if any(len(b) == 0 for b in blocks):
        raise DomainError("partition has an empty block")
    elems = [x for b in blocks for x in b]
    if n is None:
        n = len(elems)
    if sorted(elems) != list(range(1, n + 1)):
        raise DomainError(f"blocks do not partition {{1..{n}}}: {blocks}")
    return tuple(sorted(blocks))


def _has_crossing(blocks: Blocks) -> bool:
    # A partition is noncrossing iff the arcs joining consecutive elements of
    # each block are pairwise non-interleaved.
    arcs = [(b[i], b[i + 1], k) for k, b in enumerate(blocks) for i in range(len(b) - 1)]
    for i, (a, b, u) in enumerate(arcs):
        for c, d, v in arcs[i + 1:]:
            if u != v and (a < c < b < d or c < a < d < b):
                return True
    return False


def is_noncrossing(p: Iterable[Iterable[int]], n: int | None = None) -> bool:
    """True iff no ``i < j < k < l`` has ``i ~ k`` and ``j ~ l`` across two blocks."""
    return not _has_crossing(canonical_blocks(p, n))


@dataclass(frozen=True)
class NoncrossingPartition:
    n: int
    blocks: Blocks

    def __post_init__(self):
        blocks = canonical_blocks(self.blocks, self.n)
        if _has_crossing(blocks):
            raise DomainError(f"partition {blocks} is crossing")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "NoncrossingPartition":
        blocks = canonical_blocks(blocks)
        return cls(sum(len(b) for b in blocks), blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


@lru_cache(maxsize=None)
def _nc_blocks(k: int) -> tuple[Blocks, ...]:
    """All noncrossing partitions of ``{0..k-1}`` as raw block tuples.

    Decomposes on the block of 0: either 0 is a singleton, or its next
    element is ``j`` and the gap ``1..j-1`` is closed off from the rest.
    Blocks come out already sorted by minimum.
    """
    if k == 0:
        return ((),)
    out = []
    for rest in _nc_blocks(k - 1):
        out.append(((0,),) + tuple(tuple(x + 1 for x in b) for b in rest))
    for j in range(1, k):
        gaps = [tuple(tuple(x + 1 for x in b) for b in g) for g in _nc_blocks(j - 1)]
        tails = [tuple(tuple(x + j for x in b) for b in t) for t in _nc_blocks(k - j)]
        for t in tails:
            head = ((0,) + t[0],)
            for g in gaps:
                out.append(head + g + t[1:])
    return tuple(out)


@lru_cache(maxsize=None)
def enumerate_nc(n: int) -> tuple[NoncrossingPartition, ...]:
    """Every element of NC(n), in lexicographic order of the block encoding."""
    if not 1 <= n <= MAX_ENUMERATION:
        raise ResourceError(f"enumeration of NC({n}) outside 1 <= n <= {MAX_ENUMERATION}")
    raw = sorted(tuple(tuple(x + 1 for x in b) for b in p) for p in _nc_blocks(n))
    out = []
    for blocks in raw:
        # bypass validation: the generator only produces canonical NC partitions
        p = object.__new__(NoncrossingPartition)
        object.__setattr__(p, "n", n)
        object.__setattr__(p, "blocks", blocks)
        out.append(p)
    return tuple(out)


def _as_nc(p) -> NoncrossingPartition:
    if isinstance(p, NoncrossingPartition):
        return p
    return NoncrossingPartition.from_blocks(p)


def _cycles_to_blocks(perm: list[int]) -> Blocks:
    n = len(perm) - 1
    seen = [False] * (n + 1)
    blocks = []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            i = perm[i]
        blocks.append(tuple(sorted(cyc)))
    return tuple(sorted(blocks))


def kreweras(p) -> NoncrossingPartition:
    """Kreweras complement, with barred point ``i`` (between ``i`` and ``i+1``) relabeled ``i``.

    Computed as the cycle structure of ``P^{-1} o gamma``, where ``P`` sends
    each element to the next one of its block (cyclically) and ``gamma`` is
    the rotation ``i -> i+1 mod n``. The greedy interleaving construction
    :func:`kreweras_greedy` gives the same map and is kept as a cross-check.
    """
    p = _as_nc(p)
    n = p.n
    nxt = [0] * (n + 1)
    for b in p.blocks:
        for i, x in enumerate(b):
            nxt[x] = b[(i + 1) % len(b)]
    inv = [0] * (n + 1)
    for x in range(1, n + 1):
        inv[nxt[x]] = x
    perm = [0] + [inv[x % n + 1] for x in range(1, n + 1)]
    return NoncrossingPartition(n, _cycles_to_blocks(perm))


def _interleave(p_blocks: Blocks, q_blocks: Blocks) -> Blocks:
    # i -> 2i-1, barred i -> 2i on the 2n-point circle
    return tuple(
        [tuple(2 * x - 1 for x in b) for b in p_blocks]
        + [tuple(2 * x for x in b) for b in q_blocks]
    )


def kreweras_greedy(p) -> NoncrossingPartition:
    """Kreweras complement by greedy merging of barred points.

    Scans pairs ``(i, j)`` in increasing order and merges their blocks
    whenever the interleaved ``2n``-point partition stays noncrossing.
    ``O(n^4)``-ish; meant for certification, not production.
    """
    p = _as_nc(p)
    n = p.n
    label = list(range(n + 1))

    def blocks_of(lab):
        groups: dict[int, list[int]] = {}
        for x in range(1, n + 1):
            groups.setdefault(lab[x], []).append(x)
        return tuple(sorted(tuple(g) for g in groups.values()))

    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if label[i] == label[j]:
                continue
            trial = [label[i] if lab == label[j] else lab for lab in label]
            if not _has_crossing(tuple(sorted(_interleave(p.blocks, blocks_of(trial))))):
                label = trial
    return NoncrossingPartition(n, blocks_of(label))


def refines(p, q) -> bool:
    """True iff every block of ``p`` lies inside a block of ``q``."""
    pb = p.blocks if isinstance(p, NoncrossingPartition) else canonical_blocks(p)
    qb = q.blocks if isinstance(q, NoncrossingPartition) else canonical_blocks(q)
    np_ = sum(len(b) for b in pb)
    nq = sum(len(b) for b in qb)
    if np_ != nq:
        raise DomainError(f"ground sets differ: {np_} vs {nq}")
    owner = {x: k for k, b in enumerate(qb) for x in b}
    return all(len({owner[x] for x in b}) == 1 for b in pb)


def catalan(n: int) -> int:
    from math import comb

    return comb(2 * n, n) // (n + 1)
