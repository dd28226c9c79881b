"""Exact solver for splitting subsystems into two parts of balanced dimension.

A bipartition with part dimensions L and R = T / L supports a state of
Schmidt number up to min(L, R). All products are Python integers, so no
comparison ever goes through floating point. Instances below
``BRUTE_FORCE_LIMIT`` parts are enumerated directly; larger ones (up to
``MAX_PARTS``) use meet-in-the-middle over subset products.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadPartition, InstanceTooLarge
from .state import StateTensor, _check_partition

BRUTE_FORCE_LIMIT = 20
MAX_PARTS = 40


@dataclass(frozen=True)
class PartitionInstance:
    dims: tuple[int, ...]
    K: int = 1

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 2:
            raise BadPartition("need at least two subsystems")
        if any(d < 2 for d in dims):
            raise BadPartition(f"dimensions must be at least 2, got {dims}")
        if int(self.K) < 1:
            raise BadPartition(f"K must be positive, got {self.K}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "K", int(self.K))


@dataclass(frozen=True)
class Bipartition:
    left: tuple[int, ...]
    right: tuple[int, ...]
    left_product: int = field(compare=False)
    right_product: int = field(compare=False)

    @property
    def schmidt_bound(self) -> int:
        return min(self.left_product, self.right_product)


def _prod(dims, idx) -> int:
    return math.prod(dims[i] for i in idx)


def make_bipartition(dims: Sequence[int], left) -> Bipartition:
    left, right = _check_partition(len(dims), left)
    return Bipartition(left, right, _prod(dims, left), _prod(dims, right))


def _members(mask: int) -> tuple[int, ...]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _lex_less(a: int, b: int) -> bool:
    """Lexicographic order on the sorted member tuples of two bitmasks."""
    x = a ^ b
    if not x:
        return False
    low = x & -x
    # the sets agree below `low`; the one holding `low` is smaller unless
    # the other one has already ended
    if a & low:
        return (b & ~(low - 1)) != 0
    return (a & ~(low - 1)) == 0


def _subset_products(dims: Sequence[int]) -> list[int]:
    prods = [1] * (1 << len(dims))
    for mask in range(1, len(prods)):
        low = mask & -mask
        prods[mask] = prods[mask ^ low] * dims[low.bit_length() - 1]
    return prods


def _best_brute(dims: tuple[int, ...]) -> tuple[int, int]:
    total = math.prod(dims)
    full = (1 << len(dims)) - 1
    best, best_mask = 0, 0
    for mask, p in enumerate(_subset_products(dims)):
        if mask == 0 or mask == full:
            continue
        v = min(p, total // p)
        if v > best or (v == best and _lex_less(mask, best_mask)):
            best, best_mask = v, mask
    return best, best_mask


def _best_mitm(dims: tuple[int, ...]) -> tuple[int, int]:
    n = len(dims)
    h = n // 2
    total = math.prod(dims)
    root = math.isqrt(total)
    first = _subset_products(dims[:h])
    # lexicographically smallest second-half subset for each product
    by_product: dict[int, int] = {}
    for mask, p in enumerate(_subset_products(dims[h:])):
        cur = by_product.get(p)
        if cur is None or _lex_less(mask, cur):
            by_product[p] = mask
    keys = sorted(by_product)

    # K* is the largest subset product not exceeding sqrt(T); it is at least
    # 2 because the smaller side of any single-part cut qualifies
    best = 0
    for a in first:
        if a > root:
            continue
        j = bisect.bisect_right(keys, root // a) - 1
        if j >= 0:
            best = max(best, a * keys[j])

    best_mask = None
    for target in {best, total // best}:
        for m1, a in enumerate(first):
            if target % a:
                continue
            m2 = by_product.get(target // a)
            if m2 is None:
                continue
            mask = m1 | (m2 << h)
            if best_mask is None or _lex_less(mask, best_mask):
                best_mask = mask
    return best, best_mask


def _check_size(n: int) -> None:
    if n > MAX_PARTS:
        raise InstanceTooLarge(f"{n} subsystems exceeds the limit of {MAX_PARTS}")


def max_schmidt_partition(dims, method: str = "auto") -> tuple[Bipartition, int]:
    """Bipartition maximizing min(left product, right product).

    Ties go to the lexicographically smallest left index tuple.
    ``method`` is ``"auto"``, ``"brute"`` or ``"mitm"``.
    """
    if isinstance(dims, PartitionInstance):
        dims = dims.dims
    dims = PartitionInstance(dims).dims
    _check_size(len(dims))
    if method == "auto":
        method = "brute" if len(dims) < BRUTE_FORCE_LIMIT else "mitm"
    if method == "brute":
        best, mask = _best_brute(dims)
    elif method == "mitm":
        best, mask = _best_mitm(dims)
    else:
        raise ValueError(f"unknown method {method!r}")
    return make_bipartition(dims, _members(mask)), best


def solve_partition(inst: PartitionInstance, method: str = "auto") -> Bipartition | None:
    """A bipartition whose smaller side has dimension at least K, or None."""
    _check_size(len(inst.dims))
    bip, best = max_schmidt_partition(inst.dims, method)
    return bip if best >= inst.K else None


def witness_state(bip: Bipartition, dims: Sequence[int]) -> StateTensor:
    """Maximally entangled state across the cut, with min(L, R) equal terms."""
    dims = tuple(int(d) for d in dims)
    left, right = _check_partition(len(dims), bip.left)
    lp, rp = _prod(dims, left), _prod(dims, right)
    k = min(lp, rp)
    m = np.zeros((lp, rp), dtype=complex)
    m[np.arange(k), np.arange(k)] = 1 / np.sqrt(k)
    t = m.reshape([dims[i] for i in left + right])
    return StateTensor(dims, np.transpose(t, np.argsort(left + right)))
