"""Sparse exact linear algebra over Q(q).

Vectors are plain dicts ``{index: RatFun}`` with no stored zeros.  Pivots are
chosen deterministically (lowest column index), so every result is
reproducible run to run.
"""
from __future__ import annotations

import heapq
from typing import Hashable, Iterable

from .exactq import ONE, RatFun

Vec = dict  # index -> RatFun


def axpy(y: Vec, a: RatFun, x: Vec) -> None:
    """In place y += a*x."""
    if a.is_zero():
        return
    for k, v in x.items():
        w = y.get(k)
        if w is None:
            if not v.is_zero():
                y[k] = a * v
        else:
            s = w + a * v
            if s.is_zero():
                del y[k]
            else:
                y[k] = s


def vadd(x: Vec, y: Vec) -> Vec:
    out = dict(x)
    axpy(out, ONE, y)
    return out


def vsub(x: Vec, y: Vec) -> Vec:
    out = dict(x)
    axpy(out, -ONE, y)
    return out


def vscale(a: RatFun, x: Vec) -> Vec:
    if a.is_zero():
        return {}
    return {k: a * v for k, v in x.items()}


def vmap(f, x: Vec) -> Vec:
    out = {}
    for k, v in x.items():
        w = f(v)
        if not w.is_zero():
            out[k] = w
    return out


class Span:
    """Incrementally grown echelon basis of a subspace.

    Each accepted vector is stored reduced, together with its expression in
    terms of the generators that were accepted, so that ``coords`` returns
    coefficients relative to the accepted generators.
    """

    def __init__(self, track: bool = True):
        self.rows: list[tuple[Hashable, Vec, Vec]] = []  # (pivot, reduced vec, combination)
        self.pivot_of: dict[Hashable, int] = {}
        self.tags: list[Hashable] = []
        self.track = track

    def __len__(self) -> int:
        return len(self.rows)

    def _reduce(self, vec: Vec) -> tuple[Vec, Vec]:
        v = dict(vec)
        comb: Vec = {}
        # a stored row only has entries at or after its pivot, so one ascending sweep suffices
        heap = [(_order_key(k), k) for k in v if k in self.pivot_of]
        heapq.heapify(heap)
        seen = set()
        while heap:
            _, piv = heapq.heappop(heap)
            if piv in seen or piv not in v:
                continue
            seen.add(piv)
            _, row, rc = self.rows[self.pivot_of[piv]]
            a = -v[piv]
            for k in row:
                if k not in v and k in self.pivot_of and k not in seen:
                    heapq.heappush(heap, (_order_key(k), k))
            axpy(v, a, row)
            if self.track:
                axpy(comb, a, rc)
        return v, comb

    def add(self, vec: Vec, tag: Hashable = None) -> bool:
        """Accept ``vec`` if independent of the current span; returns acceptance."""
        v, comb = self._reduce(vec)
        if not v:
            return False
        piv = min(v, key=_order_key)
        inv = v[piv].inverse()
        v = {k: x * inv for k, x in v.items()}
        if self.track:
            comb = {k: x * inv for k, x in comb.items()}
            comb[len(self.tags)] = inv
        self.tags.append(tag)
        self.rows.append((piv, v, comb))
        self.pivot_of[piv] = len(self.rows) - 1
        return True

    def contains(self, vec: Vec) -> bool:
        v, _ = self._reduce(vec)
        return not v

    def coords(self, vec: Vec) -> Vec | None:
        """Coefficients c with vec = sum c[k] * (k-th accepted generator), or None."""
        v, comb = self._reduce(vec)
        if v:
            return None
        return {k: -x for k, x in comb.items()}


def _order_key(k):
    return (0, k) if isinstance(k, int) else (1, repr(k))


def rref(rows: Iterable[Vec]) -> tuple[list[Vec], list]:
    """Reduced row echelon form of a list of sparse rows.  Returns (rows, pivot columns)."""
    span = Span(track=False)
    for r in rows:
        span.add(r)
    # back-substitute so every pivot column is clean
    out = [dict(v) for _, v, _ in span.rows]
    pivs = [p for p, _, _ in span.rows]
    order = sorted(range(len(out)), key=lambda i: _order_key(pivs[i]))
    out = [out[i] for i in order]
    pivs = [pivs[i] for i in order]
    for i in range(len(out) - 1, -1, -1):
        for j in range(i):
            a = out[j].get(pivs[i])
            if a is not None:
                axpy(out[j], -a, out[i])
    return out, pivs


def nullspace(rows: Iterable[Vec], columns: Iterable[Hashable]) -> list[Vec]:
    """Basis of {x : row . x = 0 for all rows}, over the given column set."""
    red, pivs = rref(rows)
    pivset = set(pivs)
    basis = []
    for free in sorted(columns, key=_order_key):
        if free in pivset:
            continue
        v = {free: ONE}
        for r, p in zip(red, pivs):
            a = r.get(free)
            if a is not None:
                v[p] = -a
        basis.append(v)
    return basis


def solve(rows: list[Vec], rhs: list[RatFun], columns: Iterable[Hashable]) -> Vec | None:
    """One solution x of rows . x = rhs, or None if inconsistent."""
    aug = "__rhs__"
    ext = []
    for r, b in zip(rows, rhs):
        e = dict(r)
        if not b.is_zero():
            e[aug] = b
        ext.append(e)
    red, pivs = rref(ext)
    if aug in pivs:
        return None
    x = {}
    for r, p in zip(red, pivs):
        b = r.get(aug)
        if b is not None:
            x[p] = b
    return x


def rank(rows: Iterable[Vec]) -> int:
    span = Span(track=False)
    return sum(1 for r in rows if span.add(r))
