"""Finite-dimensional integrable U-modules as explicit sparse operator data.

Hopf conventions (fixed once, used everywhere):

    Delta(E_i) = E_i (x) 1 + K_i (x) E_i
    Delta(F_i) = F_i (x) K_i^-1 + 1 (x) F_i
    Delta(K_h) = K_h (x) K_h

with ``K_i = K_{d_i alpha_i^vee}``.  The contravariant form is the symmetric
form with ``(v_lam, v_lam) = 1`` and ``(F_i v, w) = (v, q_i K_i^-1 E_i w)``.
"""
from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .cartan import CartanDatum, Weight
from .exactq import (
    ONE,
    ZERO,
    RatFun,
    eval_at_infinity,
    is_laurent_integral,
    is_regular_at_infinity,
    is_strictly_small_at_infinity,
    qpow,
    quantum_factorial,
    quantum_int,
)
from .linalg import Span, Vec, axpy, nullspace, vscale

Op = list  # column-sparse operator: op[col] = {row: coeff}


class DimensionCapExceeded(RuntimeError):
    pass


class UndecidedError(RuntimeError):
    """Raised when an A-lattice question cannot be decided (no unit-pivot basis)."""


# ---------------------------------------------------------------------------
# Weight modules
# ---------------------------------------------------------------------------

class WeightModule:
    """Basis indexed by (weight, ordinal) with sparse E_i and F_i matrices over Q(q)."""

    def __init__(self, cartan: CartanDatum, weights: list[Weight], E: list[Op], F: list[Op],
                 highest: int | None = None, name: str = ""):
        self.cartan = cartan
        self.weights = [tuple(w) for w in weights]
        self.E = E
        self.F = F
        self.highest = highest
        self.name = name
        self.blocks: dict[Weight, list[int]] = defaultdict(list)
        for k, w in enumerate(self.weights):
            self.blocks[w].append(k)
        self.blocks = dict(self.blocks)
        self._cache: dict = {}

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def rank(self) -> int:
        return self.cartan.rank

    def d(self, i: int) -> int:
        return self.cartan.symmetrizer[i]

    def ordinal(self, k: int) -> int:
        return self.blocks[self.weights[k]].index(k)

    # -- actions ------------------------------------------------------------
    @staticmethod
    def _apply(op: Op, v: Vec) -> Vec:
        out: Vec = {}
        for col, a in v.items():
            for row, c in op[col].items():
                w = out.get(row)
                s = a * c if w is None else w + a * c
                if s.is_zero():
                    out.pop(row, None)
                else:
                    out[row] = s
        return out

    def e(self, i: int, v: Vec) -> Vec:
        return self._apply(self.E[i], v)

    def f(self, i: int, v: Vec) -> Vec:
        return self._apply(self.F[i], v)

    def k(self, h, v: Vec) -> Vec:
        """K_h for a coweight h in simple-coroot coordinates."""
        return {c: a * qpow(self.cartan.pair(h, self.weights[c])) for c, a in v.items()}

    def k_i(self, i: int, v: Vec, power: int = 1) -> Vec:
        di = self.d(i)
        return {c: a * qpow(power * di * self.weights[c][i]) for c, a in v.items()}

    def e_div(self, i: int, a: int, v: Vec) -> Vec:
        for _ in range(a):
            v = self.e(i, v)
        return vscale(ONE / quantum_factorial(a, self.d(i)), v) if a > 1 else v

    def f_div(self, i: int, a: int, v: Vec) -> Vec:
        for _ in range(a):
            v = self.f(i, v)
        return vscale(ONE / quantum_factorial(a, self.d(i)), v) if a > 1 else v

    def basis_vector(self, k: int) -> Vec:
        return {k: ONE}

    def top(self) -> Vec:
        return {self.highest: ONE}

    def weight_of(self, v: Vec) -> Weight | None:
        ws = {self.weights[k] for k in v}
        return ws.pop() if len(ws) == 1 else None

    def split_weights(self, v: Vec) -> dict[Weight, Vec]:
        out: dict[Weight, Vec] = defaultdict(dict)
        for k, a in v.items():
            out[self.weights[k]][k] = a
        return dict(out)

    def character(self) -> dict[Weight, int]:
        return {w: len(ix) for w, ix in self.blocks.items()}

    def ordered_weights(self) -> list[Weight]:
        return sorted(self.blocks, key=lambda w: (-sum(self.cartan.weight_to_root(w)), tuple(-x for x in w)))

    # -- serialization ----------------------------------------------------------
    def dumps(self) -> str:
        lines = [f"# module {self.name}", f"cartan {' ; '.join(' '.join(map(str, r)) for r in self.cartan.matrix)}",
                 f"dim {self.dim}", f"highest {self.highest if self.highest is not None else -1}"]
        for k, w in enumerate(self.weights):
            lines.append(f"basis {k} weight {' '.join(map(str, w))} ordinal {self.ordinal(k)}")
        for label, ops in (("E", self.E), ("F", self.F)):
            for i, op in enumerate(ops):
                for col in range(self.dim):
                    for row in sorted(op[col]):
                        lines.append(f"{label}{i + 1} {row} {col} {op[col][row]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "WeightModule":
        weights: list[Weight] = []
        E: list[Op] | None = None
        F: list[Op] | None = None
        cartan = None
        highest = None
        name = ""
        for line in text.splitlines():
            if not line.strip():
                continue
            if line.startswith("# module"):
                name = line[len("# module"):].strip()
                continue
            head, _, rest = line.partition(" ")
            if head == "cartan":
                cartan = CartanDatum.from_matrix([[int(x) for x in r.split()] for r in rest.split(";")])
            elif head == "dim":
                dim = int(rest)
                E = [[{} for _ in range(dim)] for _ in range(cartan.rank)]
                F = [[{} for _ in range(dim)] for _ in range(cartan.rank)]
            elif head == "highest":
                highest = int(rest) if int(rest) >= 0 else None
            elif head == "basis":
                parts = rest.split()
                w_start = parts.index("weight") + 1
                w_end = parts.index("ordinal")
                weights.append(tuple(int(x) for x in parts[w_start:w_end]))
            else:
                label, i = head[0], int(head[1:]) - 1
                row, col, coeff = rest.split(" ", 2)
                (E if label == "E" else F)[i][int(col)][int(row)] = RatFun.parse(coeff)
        return cls(cartan, weights, E, F, highest, name)


# ---------------------------------------------------------------------------
# Construction of simple modules
# ---------------------------------------------------------------------------

def _check_dominant(cartan: CartanDatum, lam, dim_cap: int) -> int:
    lam = tuple(lam)
    if len(lam) != cartan.rank or not cartan.is_dominant(lam):
        raise ValueError(f"{lam} is not a dominant weight")
    dim = cartan.weyl_dimension(lam)
    if dim > dim_cap:
        raise DimensionCapExceeded(f"dim L({lam}) = {dim} exceeds cap {dim_cap}")
    return dim


def build_simple(cartan: CartanDatum, lam, dim_cap: int = 3000, method: str = "auto") -> WeightModule:
    """L(lam) with its highest weight vector at index 0.

    ``method="radical"`` spans F-images weight layer by weight layer and
    discards the radical (vectors killed by every E_j); ``method="gt"`` uses
    the Gelfand-Tsetlin basis and is only available in type A.  ``auto``
    picks Gelfand-Tsetlin for type A.
    """
    dim = _check_dominant(cartan, lam, dim_cap)
    if method == "auto":
        method = "gt" if _is_type_a(cartan) else "radical"
    if method == "gt":
        M = _build_gt(cartan, tuple(lam))
    elif method == "radical":
        M = _build_radical(cartan, tuple(lam))
    else:
        raise ValueError(method)
    if M.dim != dim:
        raise RuntimeError(f"constructed dimension {M.dim} != Weyl dimension {dim}")
    return M


def _is_type_a(cartan: CartanDatum) -> bool:
    r = cartan.rank
    return all(cartan.matrix[i][j] == (2 if i == j else (-1 if abs(i - j) == 1 else 0))
               for i in range(r) for j in range(r))


def _build_radical(cartan: CartanDatum, lam: Weight) -> WeightModule:
    r = cartan.rank
    d = cartan.symmetrizer
    roots = [cartan.simple_root(i) for i in range(r)]
    weights: list[Weight] = [lam]
    blocks: dict[Weight, list[int]] = {lam: [0]}
    E: list[dict[int, dict[int, RatFun]]] = [defaultdict(dict) for _ in range(r)]
    F: list[dict[int, dict[int, RatFun]]] = [defaultdict(dict) for _ in range(r)]
    layer = [lam]
    while layer:
        cand_weights = sorted({tuple(a - b for a, b in zip(w, roots[i])) for w in layer for i in range(r)},
                              key=lambda w: tuple(-x for x in w))
        next_layer = []
        for mu in cand_weights:
            ups = {i: tuple(a + b for a, b in zip(mu, roots[i])) for i in range(r)}
            cands = [(i, u) for i in range(r) if ups[i] in blocks for u in blocks[ups[i]]]
            if not cands:
                continue
            span = Span()
            images = []
            for (i, u) in cands:
                img: Vec = {}
                for j in range(r):
                    # E_j F_i u = F_i E_j u + delta_ij [<alpha_i^vee, wt u>]_i u
                    part: Vec = {}
                    for col, a in E[j][u].items():
                        axpy(part, a, F[i][col])
                    if i == j:
                        axpy(part, quantum_int(ups[i][i], d[i]), {u: ONE})
                    for row, a in part.items():
                        img[(j, row)] = a
                images.append(img)
                span.add(img, (i, u))
            accepted = {tag: k for k, tag in enumerate(span.tags)}
            if not accepted:
                continue
            base = len(weights)
            idx = []
            for k, (i, u) in enumerate(span.tags):
                weights.append(mu)
                idx.append(base + k)
            blocks[mu] = idx
            next_layer.append(mu)
            for (i, u), img in zip(cands, images):
                if (i, u) in accepted:
                    F[i][u][base + accepted[(i, u)]] = ONE
                else:
                    co = span.coords(img)
                    for k, a in co.items():
                        F[i][u][base + k] = a
            for k, (i, u) in enumerate(span.tags):
                img = images[cands.index((i, u))]
                for (j, row), a in img.items():
                    E[j][base + k][row] = a
        layer = next_layer
    n = len(weights)
    Eo = [[dict(E[i].get(c, {})) for c in range(n)] for i in range(r)]
    Fo = [[dict(F[i].get(c, {})) for c in range(n)] for i in range(r)]
    return WeightModule(cartan, weights, Eo, Fo, 0, f"L{lam}")


def _gt_patterns(top: list[int]) -> list[tuple[tuple[int, ...], ...]]:
    """Gelfand-Tsetlin patterns with top row ``top``; rows are listed from longest to shortest."""
    out = []

    def rec(rows):
        last = rows[-1]
        if len(last) == 1:
            out.append(tuple(rows))
            return
        ranges = [range(last[k + 1], last[k] + 1) for k in range(len(last) - 1)]
        for row in itertools.product(*ranges):
            rec(rows + [tuple(row)])

    rec([tuple(top)])
    return out


def _build_gt(cartan: CartanDatum, lam: Weight) -> WeightModule:
    r = cartan.rank
    n = r + 1
    top = [sum(lam[k:]) for k in range(r)] + [0]
    pats = _gt_patterns(top)
    # m[j][i] for row j (1..n, j entries) and position i (1..j); stored 0-based
    def rows_of(p):
        return {n - t: p[t] for t in range(n)}

    def gl_weight(p):
        R = rows_of(p)
        return [sum(R[k]) - (sum(R[k - 1]) if k > 1 else 0) for k in range(1, n + 1)]

    def sl_weight(p):
        w = gl_weight(p)
        return tuple(w[k] - w[k + 1] for k in range(r))

    info = [(sl_weight(p), p) for p in pats]
    info.sort(key=lambda t: (cartan.height(t[0], lam), tuple(-x for x in t[0]), tuple(-x for row in t[1] for x in row)))
    index = {p: k for k, (_, p) in enumerate(info)}
    weights = [w for w, _ in info]
    dim = len(info)
    E = [[{} for _ in range(dim)] for _ in range(r)]
    F = [[{} for _ in range(dim)] for _ in range(r)]
    for col, (_, p) in enumerate(info):
        R = rows_of(p)
        L = {j: [R[j][i] - (i + 1) for i in range(j)] for j in R}
        for k in range(1, n):  # E_k raises row k, F_k lowers row k
            for i in range(k):
                lik = L[k][i]
                den = ONE
                for j in range(k):
                    if j != i:
                        den = den * quantum_int(L[k][j] - lik)
                # raising
                newrow = list(R[k])
                newrow[i] += 1
                q2 = _replace_row(p, n, k, tuple(newrow))
                if q2 in index:
                    num = ONE
                    for j in range(k + 1):
                        num = num * quantum_int(L[k + 1][j] - lik)
                    c = -num / den
                    if not c.is_zero():
                        E[k - 1][col][index[q2]] = c
                # lowering
                newrow = list(R[k])
                newrow[i] -= 1
                q2 = _replace_row(p, n, k, tuple(newrow))
                if q2 in index:
                    num = ONE
                    for j in range(k - 1):
                        num = num * quantum_int(L[k - 1][j] - lik)
                    c = num / den
                    if not c.is_zero():
                        F[k - 1][col][index[q2]] = c
    return WeightModule(cartan, weights, E, F, 0, f"L{lam}")


def _replace_row(p, n, k, row):
    t = n - k
    return p[:t] + (row,) + p[t + 1:]


# ---------------------------------------------------------------------------
# Relation checks
# ---------------------------------------------------------------------------

def check_relations(M: WeightModule, serre: bool = True) -> list[str]:
    """Verify the defining relations of U as matrix identities; returns a list of failures."""
    fails = []
    r = M.rank
    C = M.cartan.matrix
    for k in range(M.dim):
        v = {k: ONE}
        wt = M.weights[k]
        for i in range(r):
            for j in range(r):
                lhs = M.e(i, M.f(j, v))
                axpy(lhs, -ONE, M.f(j, M.e(i, v)))
                if i == j:
                    axpy(lhs, -ONE, {k: quantum_int(wt[i], M.d(i))})
                if lhs:
                    fails.append(f"[E{i + 1},F{j + 1}] on basis {k}")
        # weight bookkeeping
        for i in range(r):
            up = tuple(a + b for a, b in zip(wt, M.cartan.simple_root(i)))
            dn = tuple(a - b for a, b in zip(wt, M.cartan.simple_root(i)))
            if any(M.weights[row] != up for row in M.E[i][k]) or any(M.weights[row] != dn for row in M.F[i][k]):
                fails.append(f"weight grading of E/F{i + 1} on basis {k}")
        if serre:
            for i in range(r):
                for j in range(r):
                    if i == j:
                        continue
                    n = 1 - C[i][j]
                    for op, div in ((M.e, M.e_div), (M.f, M.f_div)):
                        tot: Vec = {}
                        for s in range(n + 1):
                            w = div(i, n - s, op(j, div(i, s, v)))
                            axpy(tot, ONE if s % 2 == 0 else -ONE, w)
                        if tot:
                            fails.append(f"Serre ({i + 1},{j + 1}) on basis {k}")
    # nilpotency
    for i in range(r):
        for k in range(M.dim):
            v = {k: ONE}
            for _ in range(M.dim + 1):
                v = M.e(i, v)
                if not v:
                    break
            if v:
                fails.append(f"E{i + 1} not nilpotent")
    return fails


# ---------------------------------------------------------------------------
# Tensor products, submodules, isomorphisms
# ---------------------------------------------------------------------------

def tensor(M: WeightModule, N: WeightModule) -> WeightModule:
    """M (x) N with the fixed coproduct; basis index a * dim N + b."""
    dn = N.dim
    r = M.rank
    weights = [tuple(x + y for x, y in zip(M.weights[a], N.weights[b])) for a in range(M.dim) for b in range(dn)]
    E = [[{} for _ in range(len(weights))] for _ in range(r)]
    F = [[{} for _ in range(len(weights))] for _ in range(r)]
    for i in range(r):
        di = M.d(i)
        for a in range(M.dim):
            ka = qpow(di * M.weights[a][i])
            for b in range(dn):
                col = a * dn + b
                kb_inv = qpow(-di * N.weights[b][i])
                e: Vec = {}
                for a2, c in M.E[i][a].items():
                    axpy(e, ONE, {a2 * dn + b: c})
                for b2, c in N.E[i][b].items():
                    axpy(e, ONE, {a * dn + b2: ka * c})
                f: Vec = {}
                for a2, c in M.F[i][a].items():
                    axpy(f, ONE, {a2 * dn + b: c * kb_inv})
                for b2, c in N.F[i][b].items():
                    axpy(f, ONE, {a * dn + b2: c})
                E[i][col] = e
                F[i][col] = f
    hi = None
    if M.highest is not None and N.highest is not None:
        hi = M.highest * dn + N.highest
    T = WeightModule(M.cartan, weights, E, F, hi, f"{M.name}(x){N.name}")
    T.factors = (M, N)
    return T


def tensor_vectors(M: WeightModule, N: WeightModule, v: Vec, w: Vec) -> Vec:
    dn = N.dim
    out: Vec = {}
    for a, x in v.items():
        for b, y in w.items():
            out[a * dn + b] = x * y
    return out


def gram_blocks(M: WeightModule) -> dict[Weight, dict[tuple[int, int], RatFun]]:
    """Contravariant form of a simple module (or of a tensor of simples), block by weight."""
    if "gram" in M._cache:
        return M._cache["gram"]
    if getattr(M, "factors", None):
        A, B = M.factors
        ga, gb = gram_blocks(A), gram_blocks(B)
        dn = B.dim
        G: dict = {}
        for w, ix in M.blocks.items():
            blk = {}
            for x in ix:
                a, b = divmod(x, dn)
                for y in ix:
                    a2, b2 = divmod(y, dn)
                    va = ga[A.weights[a]].get((a, a2))
                    vb = gb[B.weights[b]].get((b, b2))
                    if va is not None and vb is not None:
                        blk[(x, y)] = va * vb
            G[w] = blk
        M._cache["gram"] = G
        return G
    G = {M.weights[M.highest]: {(M.highest, M.highest): ONE}}
    for w in M.ordered_weights():
        if w in G:
            continue
        ix = M.blocks[w]
        # express the weight-space basis through F-images of higher weight spaces
        span = Span()
        for i in range(M.rank):
            up = tuple(a + b for a, b in zip(w, M.cartan.simple_root(i)))
            for u in M.blocks.get(up, []):
                span.add(M.f(i, {u: ONE}), (i, u))
                if len(span) == len(ix):
                    break
            if len(span) == len(ix):
                break
        if len(span) != len(ix):
            raise RuntimeError(f"F-images do not span weight {w}")
        # Gram between candidates c = F_i u and basis vectors y: (u, q_i K_i^-1 E_i y)
        cand_rows = []
        for (i, u) in span.tags:
            up = M.weights[u]
            di = M.d(i)
            gu = G[up]
            row = {}
            for y in ix:
                ey = M.e(i, {y: ONE})
                val = ZERO
                for z, a in ey.items():
                    g = gu.get((u, z))
                    if g is not None:
                        val = val + g * a
                val = val * qpow(di - di * up[i])
                if not val.is_zero():
                    row[y] = val
            cand_rows.append(row)
        blk = {}
        for x in ix:
            co = span.coords({x: ONE})
            for y in ix:
                val = ZERO
                for k, a in co.items():
                    g = cand_rows[k].get(y)
                    if g is not None:
                        val = val + a * g
                if not val.is_zero():
                    blk[(x, y)] = val
        G[w] = blk
    M._cache["gram"] = G
    return G


def form(M: WeightModule, v: Vec, w: Vec) -> RatFun:
    G = gram_blocks(M)
    tot = ZERO
    for x, a in v.items():
        blk = G[M.weights[x]]
        for y, b in w.items():
            if M.weights[y] != M.weights[x]:
                continue
            g = blk.get((x, y))
            if g is not None:
                tot = tot + a * b * g
    return tot


def contravariant_form(M: WeightModule) -> dict[tuple[int, int], RatFun]:
    """Full Gram matrix as a sparse dict (zero across distinct weights)."""
    out = {}
    for blk in gram_blocks(M).values():
        out.update(blk)
    return out


def check_contravariance(M: WeightModule, vectors: Iterable[tuple[Vec, Vec]]) -> bool:
    """(x v, w) = (v, rho(x) w) for x in {E_i, F_i} on the given vector pairs."""
    for v, w in vectors:
        for i in range(M.rank):
            di = M.d(i)
            # rho(E_i) = q_i K_i F_i, rho(F_i) = q_i K_i^-1 E_i
            lhs = form(M, M.e(i, v), w)
            rhs = form(M, v, vscale(qpow(di), M.k_i(i, M.f(i, w))))
            if lhs != rhs:
                return False
            lhs = form(M, M.f(i, v), w)
            rhs = form(M, v, vscale(qpow(di), M.k_i(i, M.e(i, w), -1)))
            if lhs != rhs:
                return False
    return True


def spanned_submodule(M: WeightModule, gen: Vec) -> tuple[WeightModule, list[Vec]]:
    """The submodule U^- . gen for a highest-weight vector gen, with its basis as vectors of M."""
    wt = M.weight_of(gen)
    basis_by_w: dict[Weight, list[Vec]] = {wt: [gen]}
    spans: dict[Weight, Span] = {}
    sp = Span()
    sp.add(gen)
    spans[wt] = sp
    order = [wt]
    head = 0
    while head < len(order):
        w = order[head]
        head += 1
        for i in range(M.rank):
            lo = tuple(a - b for a, b in zip(w, M.cartan.simple_root(i)))
            for v in basis_by_w[w]:
                x = M.f(i, v)
                if not x:
                    continue
                if lo not in spans:
                    spans[lo] = Span()
                    basis_by_w[lo] = []
                    order.append(lo)
                if spans[lo].add(x):
                    basis_by_w[lo].append(x)
    ws = sorted(basis_by_w, key=lambda w: (M.cartan.height(w, wt), tuple(-x for x in w)))
    vecs: list[Vec] = []
    weights: list[Weight] = []
    for w in ws:
        for v in basis_by_w[w]:
            vecs.append(v)
            weights.append(w)
    index_span = {w: Span() for w in ws}
    offsets = {}
    k = 0
    for w in ws:
        offsets[w] = k
        for v in basis_by_w[w]:
            index_span[w].add(v)
        k += len(basis_by_w[w])
    E = [[{} for _ in vecs] for _ in range(M.rank)]
    F = [[{} for _ in vecs] for _ in range(M.rank)]
    for col, (v, w) in enumerate(zip(vecs, weights)):
        for i in range(M.rank):
            for op, store, sign in ((M.e, E, 1), (M.f, F, -1)):
                img = op(i, v)
                if not img:
                    continue
                tw = tuple(a + sign * b for a, b in zip(w, M.cartan.simple_root(i)))
                co = index_span[tw].coords(img)
                if co is None:
                    raise RuntimeError("generated space is not a submodule")
                store[i][col] = {offsets[tw] + kk: a for kk, a in co.items()}
    sub = WeightModule(M.cartan, weights, E, F, 0, f"U.{M.name}")
    return sub, vecs


def express(M: WeightModule, basis: list[Vec], v: Vec) -> Vec | None:
    """Coordinates of v in a list of vectors of M (None if outside their span)."""
    key = ("span", id(basis))
    sp = M._cache.get(key)
    if sp is None or sp[0] is not basis:
        s = Span()
        for b in basis:
            s.add(b)
        sp = (basis, s)
        M._cache[key] = sp
    return sp[1].coords(v)


def highest_weight_isomorphism(M: WeightModule, vm: Vec, N: WeightModule, vn: Vec) -> Callable[[Vec], Vec]:
    """The U-map M -> N sending vm to vn (both simple of the same highest weight)."""
    words: list[tuple[tuple[int, ...], Vec, Vec]] = [((), vm, vn)]
    spans: dict[Weight, Span] = defaultdict(Span)
    images: dict[Weight, list[Vec]] = defaultdict(list)
    w0 = M.weight_of(vm)
    spans[w0].add(vm)
    images[w0].append(vn)
    queue = deque(words)
    while queue:
        word, a, b = queue.popleft()
        for i in range(M.rank):
            a2 = M.f(i, a)
            if not a2:
                continue
            w = M.weight_of(a2)
            if spans[w].add(a2):
                b2 = N.f(i, b)
                images[w].append(b2)
                queue.append((word + (i,), a2, b2))

    def phi(v: Vec) -> Vec:
        out: Vec = {}
        for w, part in M.split_weights(v).items():
            co = spans[w].coords(part)
            if co is None:
                raise ValueError("vector outside the generated module")
            for k, c in co.items():
                axpy(out, c, images[w][k])
        return out

    return phi


# ---------------------------------------------------------------------------
# Cartan projection
# ---------------------------------------------------------------------------

class CartanProjection:
    """Orthogonal projection of L(lam) (x) L(mu) onto N = U.(v_lam (x) v_mu) for the product form."""

    def __init__(self, T: WeightModule):
        self.T = T
        top = T.top()
        self.N, self.basis = spanned_submodule(T, top)
        G = gram_blocks(T)
        self._blocks: dict[Weight, tuple[list[int], list[Vec], Span]] = {}
        by_w: dict[Weight, list[int]] = defaultdict(list)
        for k, w in enumerate(self.N.weights):
            by_w[w].append(k)
        self._nidx = dict(by_w)
        # Gram of N-basis: g_{kl} = (b_k, b_l); solve (B^T G B) c = B^T G x per weight
        self._gram_n = {}
        for w, ks in self._nidx.items():
            rows = []
            for k in ks:
                rows.append({l: form(T, self.basis[k], self.basis[l]) for l in ks})
            self._gram_n[w] = (ks, rows)
        self._G = G

    def coords(self, x: Vec) -> Vec:
        """Coordinates of pi(x) in the basis of N."""
        out: Vec = {}
        for w, part in self.T.split_weights(x).items():
            if w not in self._nidx:
                continue
            ks, rows = self._gram_n[w]
            rhs = [form(self.T, self.basis[k], part) for k in ks]
            sol = _solve_square(rows, ks, rhs)
            for k, a in sol.items():
                if not a.is_zero():
                    out[k] = a
        return out

    def __call__(self, x: Vec) -> Vec:
        out: Vec = {}
        for k, a in self.coords(x).items():
            axpy(out, a, self.basis[k])
        return out

    def check_equivariant(self, samples: Iterable[Vec]) -> bool:
        T = self.T
        for x in samples:
            px = self(x)
            for i in range(T.rank):
                for op in (T.e, T.f):
                    if op(i, px) != self(op(i, x)):
                        return False
        return True


def _solve_square(rows: list[Vec], ks: list[int], rhs: list[RatFun]) -> Vec:
    from .linalg import solve

    sol = solve([{l: a for l, a in r.items() if not a.is_zero()} for r in rows], rhs, ks)
    if sol is None:
        raise RuntimeError("singular Gram block")
    return sol


def cartan_projection(M: WeightModule, N: WeightModule) -> CartanProjection:
    return CartanProjection(tensor(M, N))


# ---------------------------------------------------------------------------
# Braid group operators
# ---------------------------------------------------------------------------

def braid_apply(M: WeightModule, i: int, v: Vec, inverse: bool = False) -> Vec:
    """Braid operator T_i = T'_{i,1} (or its inverse T''_{i,-1}) on a vector.

    T_i z    = sum_{a-b+c=-n} (-1)^b q_i^{b-ac} E^(a) F^(b) E^(c) z
    T_i^-1 z = sum_{a-b+c=n}  (-1)^b q_i^{ac-b} F^(a) E^(b) F^(c) z
    for z of weight with <alpha_i^vee, wt z> = n.  Conjugation by T_i gives
    T_i(E_j) = E_i E_j - q_i^-1 E_j E_i when a_ij = -1.
    """
    out: Vec = {}
    di = M.d(i)
    bound = max(abs(w[i]) for w in M.blocks) + 1
    sign = 1 if inverse else -1
    X, Y = (M.f_div, M.e_div) if inverse else (M.e_div, M.f_div)
    for w, z in M.split_weights(v).items():
        n = sign * w[i]
        for b in range(bound + 1):
            for a in range(bound + 1):
                c = n + b - a
                if c < 0 or c > bound:
                    continue
                t = X(i, c, z)
                if t:
                    t = Y(i, b, t)
                if t:
                    t = X(i, a, t)
                if not t:
                    continue
                coeff = qpow(-sign * di * (b - a * c))
                axpy(out, -coeff if b % 2 else coeff, t)
    return out


def braid_word(M: WeightModule, word: Sequence[int], v: Vec, inverse: bool = False) -> Vec:
    """T_w = T_{w[0]} ... T_{w[-1]} (rightmost applied first); inverse reverses."""
    if not inverse:
        for i in reversed(word):
            v = braid_apply(M, i, v)
    else:
        for i in word:
            v = braid_apply(M, i, v, inverse=True)
    return v


def conjugated_e(M: WeightModule, word: Sequence[int], j: int, v: Vec) -> Vec:
    """Action of the algebra element T_w(E_j): v -> T_w E_j T_w^-1 v."""
    if not word:
        return M.e(j, v)
    return braid_word(M, word, M.e(j, braid_word(M, word, v, inverse=True)))


def braid_matrix(M: WeightModule, word: Sequence[int], inverse: bool = False) -> Op:
    return [braid_word(M, word, {k: ONE}, inverse) for k in range(M.dim)]


# ---------------------------------------------------------------------------
# Kashiwara operators and crystal lattices
# ---------------------------------------------------------------------------

def _kernel_e(M: WeightModule, i: int, w: Weight) -> list[Vec]:
    key = ("kerE", i, w)
    if key not in M._cache:
        ix = M.blocks.get(w, [])
        rows: dict = defaultdict(dict)
        for k in ix:
            for row, a in M.E[i][k].items():
                rows[row][k] = a
        M._cache[key] = nullspace(list(rows.values()), ix) if ix else []
    return M._cache[key]


def sl2_string_decompose(M: WeightModule, i: int, v: Vec) -> list[tuple[int, Vec]]:
    """Pairs (n, u_n) with v = sum F_i^(n) u_n and E_i u_n = 0."""
    out: dict[int, Vec] = defaultdict(dict)
    alpha = M.cartan.simple_root(i)
    for w, part in M.split_weights(v).items():
        gens = []
        n = 0
        while True:
            up = tuple(a + n * b for a, b in zip(w, alpha))
            if up not in M.blocks:
                break
            for u in _kernel_e(M, i, up):
                gens.append((n, u, M.f_div(i, n, u)))
            n += 1
        span = Span()
        kept = []
        for g in gens:
            if span.add(g[2]):
                kept.append(g)
        co = span.coords(part)
        if co is None:
            raise RuntimeError("string decomposition failed")
        for k, a in co.items():
            n, u, _ = kept[k]
            axpy(out[n], a, u)
    return sorted((n, u) for n, u in out.items() if u)


def kashiwara_f(M: WeightModule, i: int, v: Vec) -> Vec:
    out: Vec = {}
    for n, u in sl2_string_decompose(M, i, v):
        axpy(out, ONE, M.f_div(i, n + 1, u))
    return out


def kashiwara_e(M: WeightModule, i: int, v: Vec) -> Vec:
    out: Vec = {}
    for n, u in sl2_string_decompose(M, i, v):
        if n >= 1:
            axpy(out, ONE, M.f_div(i, n - 1, u))
    return out


@dataclass
class LatticeBasis:
    """Vectors spanning an A_inf- or A-lattice of a module."""

    module: WeightModule
    vectors: list[Vec]
    tag: str                     # "crystal" or "integral"
    words: list = field(default_factory=list)
    decided: bool = True
    spanning: list[Vec] = field(default_factory=list)
    _span: Span | None = None

    def coords(self, v: Vec) -> Vec:
        if self._span is None:
            self._span = Span()
            for b in self.vectors:
                self._span.add(b)
        co = self._span.coords(v)
        if co is None:
            raise ValueError("vector outside the span of the lattice basis")
        return co


def crystal_lattice_basis(M: WeightModule) -> LatticeBasis:
    """Closure of v_lam under the F~_i, keeping one representative per crystal class.

    Candidates at each weight are F~_i images of representatives one step
    higher.  A candidate is kept when its self-pairing is 1 at q = infinity and
    it is orthogonal at q = infinity to those already kept; the form is almost
    orthonormal on the crystal lattice, so this keeps distinct crystal classes.
    """
    if "crystal" in M._cache:
        return M._cache["crystal"]
    top = M.top()
    reps: dict[Weight, list[tuple[tuple[int, ...], Vec]]] = {M.weights[M.highest]: [((), top)]}
    for w in M.ordered_weights():
        if w in reps:
            continue
        kept: list[tuple[tuple[int, ...], Vec]] = []
        for i in range(M.rank):
            up = tuple(a + b for a, b in zip(w, M.cartan.simple_root(i)))
            for word, c in reps.get(up, []):
                x = kashiwara_f(M, i, c)
                if not x:
                    continue
                xx = eval_at_infinity(form(M, x, x))
                if xx != 1:
                    continue
                if any(eval_at_infinity(form(M, x, y)) != 0 for _, y in kept):
                    continue
                kept.append(((i,) + word, x))
                if len(kept) == len(M.blocks[w]):
                    break
            if len(kept) == len(M.blocks[w]):
                break
        if len(kept) != len(M.blocks[w]):
            raise RuntimeError(f"crystal closure incomplete at weight {w}")
        reps[w] = kept
    vecs, words = [], []
    for w in M.ordered_weights():
        for word, v in reps[w]:
            words.append(word)
            vecs.append(v)
    lb = LatticeBasis(M, vecs, "crystal", words)
    M._cache["crystal"] = lb
    return lb


RING_TESTS = {
    "Ainf": is_regular_at_infinity,
    "qinvAinf": is_strictly_small_at_infinity,
    "A": lambda f: is_laurent_integral(f) is not None,
}


def lattice_membership(v: Vec, basis: LatticeBasis, ring: str = "Ainf") -> tuple[bool, Vec]:
    """Whether v lies in the ring-span of the basis; returns the coefficient witness."""
    if basis.tag == "integral" and not basis.decided:
        raise UndecidedError("integral form basis is not decided")
    co = basis.coords(v)
    test = RING_TESTS[ring]
    return all(test(a) for a in co.values()), co


def equiv_infinity(v: Vec, w: Vec, basis: LatticeBasis) -> bool:
    diff = dict(v)
    axpy(diff, -ONE, w)
    ok, _ = lattice_membership(diff, basis, "qinvAinf")
    return ok


# ---------------------------------------------------------------------------
# Integral forms
# ---------------------------------------------------------------------------

def integral_form_basis(M: WeightModule, max_swaps: int = 200) -> LatticeBasis:
    """A-basis of the divided-power lattice A_L(lam) = A_U^- v_lam, weight by weight.

    Candidates at a weight are F_i^(a) applied to basis vectors at weight
    + a alpha_i.  An independent subset is chosen (larger divided powers
    first) and accepted only if every candidate has A-coordinates in it;
    otherwise a candidate whose coordinate is the inverse of an element of A
    is swapped in.  If that fails the result is flagged undecided.
    """
    if "integral" in M._cache:
        return M._cache["integral"]
    top = M.top()
    chosen: dict[Weight, list[Vec]] = {M.weights[M.highest]: [top]}
    spanning: list[Vec] = [top]
    decided = True
    for w in M.ordered_weights():
        if w in chosen:
            continue
        cands: list[tuple[int, Vec]] = []
        for i in range(M.rank):
            alpha = M.cartan.simple_root(i)
            a = 1
            while True:
                up = tuple(x + a * y for x, y in zip(w, alpha))
                if up not in M.blocks:
                    break
                for b in chosen.get(up, []):
                    x = M.f_div(i, a, b)
                    if x:
                        cands.append((a, x))
                a += 1
        cands.sort(key=lambda t: -t[0])
        vecs = [x for _, x in cands]
        spanning.extend(vecs)
        basis, ok = _unit_pivot_basis(vecs, len(M.blocks[w]), max_swaps)
        decided = decided and ok
        chosen[w] = basis
    out = []
    for w in M.ordered_weights():
        out.extend(chosen[w])
    lb = LatticeBasis(M, out, "integral", decided=decided, spanning=spanning)
    M._cache["integral"] = lb
    return lb


def _in_A(f: RatFun) -> bool:
    return is_laurent_integral(f) is not None


def _unit_pivot_basis(vecs: list[Vec], dim: int, max_swaps: int) -> tuple[list[Vec], bool]:
    basis: list[Vec] = []
    sp = Span()
    for v in vecs:
        if sp.add(v):
            basis.append(v)
        if len(basis) == dim:
            break
    if len(basis) != dim:
        raise RuntimeError("divided-power monomials do not span the weight space")
    for _ in range(max_swaps):
        sp = Span()
        for b in basis:
            sp.add(b)
        bad = None
        for v in vecs:
            co = sp.coords(v)
            if not all(_in_A(a) for a in co.values()):
                bad = (v, co)
                break
        if bad is None:
            return basis, True
        v, co = bad
        swapped = False
        for j, cj in sorted(co.items(), key=lambda t: t[0]):
            inv = cj.inverse()
            if _in_A(inv) and all(_in_A(a * inv) for a in co.values()):
                basis[j] = v
                swapped = True
                break
        if not swapped:
            return basis, False
    return basis, False


def dual_integral_membership(M: WeightModule, v: Vec) -> tuple[bool, list[RatFun]]:
    """v in A_L^up: (v, m) in A for every m in a spanning set of A_L."""
    ib = integral_form_basis(M)
    vals = [form(M, v, m) for m in (ib.vectors if ib.decided else ib.spanning)]
    return all(_in_A(x) for x in vals), vals


def weight_vectors(M: WeightModule) -> list[Vec]:
    return [{k: ONE} for k in range(M.dim)]
