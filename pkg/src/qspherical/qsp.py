"""The coideal subalgebra B acting on weight modules.

Generators are B_i (white i), E_j and F_j (black j) and K_h (h in the
i-coweight lattice), with

    B_i = F_i + c_i T_w(E_{tau i}) K_i^-1 + s_i K_i^-1

where T_w is the braid operator of the longest element of the black
subdiagram, realized on modules by conjugation.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

from .cartan import CartanError, SatakeDatum, Weight, rank_one_type
from .exactq import ONE, ZERO, RatFun, bar, is_unit, qpow, quantum_int
from .linalg import Span, Vec, axpy, vscale
from .umod import WeightModule, braid_word

# c_i for the rank-one diagram types that carry no integer parameter
_TABLE_C = {
    "AIII_b1": lambda size: qpow(-1),
    "AII_3": lambda size: qpow(1),
    "AIII_2": lambda size: ONE,
    "BII": lambda size: qpow(2 * size - 3),
    "CII": lambda size: qpow(size - 1),
    "DII": lambda size: qpow(size - 2),
    "FII": lambda size: qpow(5),
}


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class QSPParameters:
    c: dict          # white node -> RatFun (a unit of A)
    s: dict          # white node -> RatFun in A
    n: int = 0
    tag: str = ""
    overridden: bool = False

    def __post_init__(self):
        for i, ci in self.c.items():
            if not is_unit(ci):
                raise ParameterError(f"c_{i + 1} = {ci} is not a unit of Z[q, q^-1]")

    def with_values(self, c=None, s=None, overridden=True) -> "QSPParameters":
        return replace(self, c={**self.c, **(c or {})}, s={**self.s, **(s or {})}, overridden=overridden)


def default_parameters(sd: SatakeDatum, n: int = 0) -> QSPParameters:
    """Table parameters, with the integer n entering on the Hermitian orbit.

    Single-node orbits of type AI take c = q^-1 and s = [-n]_i.  The sign of
    the integer is fixed so that, under the coproduct used here, the chi_l
    labelling and the explicit rank-one spherical vectors hold.  Two-node
    orbits of type AIV take c_node = q^n and c_{tau node} = (-1)^m q^(m-1-n)
    with m the size of the rank-one diagram.
    """
    herm = sd.hermitian
    d = sd.cartan.symmetrizer
    c: dict = {}
    s: dict = {}
    for i in sd.white:
        kind, size = rank_one_type(sd, i)
        on_orbit = herm is not None and i in herm.orbit
        if kind == "AIV":
            if on_orbit:
                if i == herm.node:
                    c[i] = qpow(n)
                else:
                    c[i] = qpow(size - 1 - n) * (-1) ** size
            else:
                lead = sd.greater(i, sd.tau[i])
                c[i] = ONE if lead else qpow(size - 1) * (-1) ** size
            s[i] = ZERO
        elif kind == "AIII_b1":
            c[i] = qpow(-1)
            s[i] = quantum_int(-n, d[i]) if on_orbit else ZERO
        else:
            c[i] = _TABLE_C[kind](size)
            s[i] = ZERO
    return QSPParameters(c, s, n, herm.tag if herm else "")


class CoidealAction:
    """Operators of the generators of B on a weight module (columns computed lazily)."""

    def __init__(self, M: WeightModule, sd: SatakeDatum, params: QSPParameters):
        if M.cartan != sd.cartan:
            raise CartanError("module and diagram have different Cartan data")
        self.M = M
        self.sd = sd
        self.params = params
        self.word = sd.w_black
        self._cols: dict[int, dict[int, Vec]] = {i: {} for i in sd.white}

    # -- generators -------------------------------------------------------
    def b(self, i: int, v: Vec) -> Vec:
        out: Vec = {}
        cache = self._cols[i]
        for k, a in v.items():
            col = cache.get(k)
            if col is None:
                col = self._b_column(i, k)
                cache[k] = col
            axpy(out, a, col)
        return out

    def _b_column(self, i: int, k: int) -> Vec:
        M = self.M
        out = dict(M.f(i, {k: ONE}))
        kinv = M.k_i(i, {k: ONE}, -1)
        c = self.params.c[i]
        t = self.sd.tau[i]
        axpy(out, c, self.conjugated_e(t, kinv))
        axpy(out, self.params.s[i], kinv)
        return out

    def conjugated_e(self, j: int, v: Vec) -> Vec:
        """T_w(E_j) v computed as T_w E_j T_w^-1 v."""
        M = self.M
        if not self.word:
            return M.e(j, v)
        return braid_word(M, self.word, M.e(j, braid_word(M, self.word, v, inverse=True)))

    def e(self, j: int, v: Vec) -> Vec:
        return self.M.e(j, v)

    def f(self, j: int, v: Vec) -> Vec:
        return self.M.f(j, v)

    def k(self, h, v: Vec) -> Vec:
        return self.M.k(h, v)

    def generators(self) -> list[tuple[str, Callable[[Vec], Vec]]]:
        """(name, operator) for B_i, E_j, F_j and the Y^i basis."""
        gens = [(f"B{i + 1}", lambda v, i=i: self.b(i, v)) for i in self.sd.white]
        for j in sorted(self.sd.black):
            gens.append((f"E{j + 1}", lambda v, j=j: self.e(j, v)))
            gens.append((f"F{j + 1}", lambda v, j=j: self.f(j, v)))
        for h in self.sd.icoweight_basis:
            gens.append((f"K{h}", lambda v, h=h: self.k(h, v)))
        return gens

    # -- i-weights ----------------------------------------------------------
    def iweight_blocks(self) -> dict[Weight, list[int]]:
        return iweight_decompose(self.M, self.sd)

    def project(self, zeta: Weight, v: Vec) -> Vec:
        return {k: a for k, a in v.items() if self.sd.iweight(self.M.weights[k]) == zeta}

    # -- i-divided powers -------------------------------------------------------
    def idiv(self, i: int, zeta: Weight, a: int, v: Vec) -> Vec:
        """B_{i,zeta}^(a) v."""
        sd = self.sd
        d = sd.cartan.symmetrizer[i]
        v = self.project(zeta, v)
        if a == 0 or not v:
            return v
        if idiv_branch(sd, i) == 1:
            for _ in range(a):
                v = self.b(i, v)
            return vscale(ONE / _qfact(a, d), v)
        p = parity(sd, i, zeta)
        s = self.params.s[i]
        c = self.params.c[i]
        return self._idiv2(i, a, p, s, c, d, v)

    def _idiv2(self, i, a, p, s, c, d, v):
        if a == 0:
            return v
        if a == 1 and p == 0:
            out = self.b(i, v)
            axpy(out, -s, v)
            return out
        if p == a % 2:
            return vscale(ONE / quantum_int(a, d), self.b(i, self._idiv2(i, a - 1, p, s, c, d, v)))
        w = self._idiv2(i, a - 2, p, s, c, d, v)
        bw = self.b(i, w)
        out = self.b(i, bw)
        axpy(out, -(qpow(d * (a - 1)) + qpow(-d * (a - 1))) * s, bw)
        axpy(out, s * s - qpow(d) * c * quantum_int(a - 1, d) ** 2, w)
        return vscale(ONE / (quantum_int(a, d) * quantum_int(a - 1, d)), out)


def _qfact(a: int, d: int) -> RatFun:
    out = ONE
    for k in range(1, a + 1):
        out = out * quantum_int(k, d)
    return out


def iweight_decompose(M: WeightModule, sd: SatakeDatum) -> dict[Weight, list[int]]:
    out: dict[Weight, list[int]] = {}
    for k, w in enumerate(M.weights):
        out.setdefault(sd.iweight(w), []).append(k)
    return out


def idiv_branch(sd: SatakeDatum, i: int) -> int:
    """1 when alpha_i differs from tau alpha_i or from w_black alpha_i, else 2."""
    alpha = sd.cartan.simple_root(i)
    if sd.tau[i] != i or sd.apply_w_black(alpha) != alpha:
        return 1
    return 2


def parity(sd: SatakeDatum, i: int, zeta: Weight) -> int:
    """Parity of <alpha_i^vee, lam> for any representative lam of zeta (branch-2 nodes only)."""
    if idiv_branch(sd, i) != 2:
        raise ValueError(f"parity is only defined for nodes with tau i = i and w_black alpha_i = alpha_i (node {i + 1})")
    return zeta[i] % 2


def shift_of_basepoint(sd: SatakeDatum, params: QSPParameters, chi) -> QSPParameters:
    """Parameters (d, t) with d_i = c_i chi(K_{tau i} K_i^-1) and t_i = chi(B_i)."""
    d = sd.cartan.symmetrizer
    c, s = {}, {}
    for i in sd.white:
        t = sd.tau[i]
        h = tuple(d[i] * ((k == t) - (k == i)) for k in range(sd.rank))
        c[i] = params.c[i] * chi.k_value(h)
        s[i] = chi.b[i]
    return QSPParameters(c, s, params.n, params.tag, params.overridden)


# ---------------------------------------------------------------------------
# The i-bar involution on a simple module
# ---------------------------------------------------------------------------

class IBar:
    """The semilinear map psi with psi(v_lam) = v_lam commuting with B_i, E_j, F_j.

    Stored as its values on the standard basis; psi(sum x_k e_k) = sum bar(x_k) psi(e_k).
    """

    def __init__(self, action: CoidealAction):
        self.action = action
        M = action.M
        gens = [g for g in action.generators() if not g[0].startswith("K")]
        top = M.top()
        tree: list[tuple[Vec, Vec]] = [(top, top)]  # (vector, psi(vector))
        span = Span()
        span.add(top)
        head = 0
        while head < len(tree) and len(span) < M.dim:
            x, px = tree[head]
            head += 1
            for _, g in gens:
                y = g(x)
                if y and span.add(y):
                    tree.append((y, g(px)))
        if len(span) < M.dim:
            raise RuntimeError("v_lam does not generate the module under B")
        self.images: list[Vec] = []
        for k in range(M.dim):
            co = span.coords({k: ONE})
            img: Vec = {}
            for t, a in co.items():
                axpy(img, bar(a), tree[t][1])
            self.images.append(img)

    def __call__(self, v: Vec) -> Vec:
        out: Vec = {}
        for k, a in v.items():
            axpy(out, bar(a), self.images[k])
        return out

    def verify(self) -> list[str]:
        """Failures of psi(g v) = g psi(v), psi(K_h v) = K_-h psi(v) and psi^2 = id on the basis."""
        fails = []
        act = self.action
        M = act.M
        for k in range(M.dim):
            e = {k: ONE}
            if self(self(e)) != e:
                fails.append(f"psi^2 != id on basis {k}")
            for name, g in act.generators():
                if name.startswith("K"):
                    h = tuple(int(x) for x in name[2:-1].split(",") if x.strip())
                    lhs = self(g(e))
                    rhs = act.k(tuple(-x for x in h), self(e))
                else:
                    lhs = self(g(e))
                    rhs = g(self(e))
                if lhs != rhs:
                    fails.append(f"{name} on basis {k}")
        return fails


def ibar_involution(action: CoidealAction) -> IBar:
    return IBar(action)


# ---------------------------------------------------------------------------
# Coideal property on tensor products
# ---------------------------------------------------------------------------

def operator_algebra(M: WeightModule, ops: list[Callable[[Vec], Vec]]) -> Span:
    """Span in End(M) of all words in ``ops`` (matrices flattened as {(row, col): a})."""
    def matrix(f):
        out = {}
        for k in range(M.dim):
            for r, a in f({k: ONE}).items():
                out[(r, k)] = a
        return out

    gens = [matrix(g) for g in ops]
    ident = {(k, k): ONE for k in range(M.dim)}
    span = Span(track=False)
    span.add(ident)
    frontier = [ident]
    while frontier:
        nxt = []
        for X in frontier:
            for G in gens:
                Y: Vec = {}
                # Y = G X
                cols: dict[int, dict[int, RatFun]] = {}
                for (r, c), a in X.items():
                    cols.setdefault(c, {})[r] = a
                gcol: dict[int, dict[int, RatFun]] = {}
                for (r, c), a in G.items():
                    gcol.setdefault(c, {})[r] = a
                for c, col in cols.items():
                    for mid, a in col.items():
                        for r, g in gcol.get(mid, {}).items():
                            key = (r, c)
                            w = Y.get(key, ZERO) + g * a
                            if w.is_zero():
                                Y.pop(key, None)
                            else:
                                Y[key] = w
                if Y and span.add(Y):
                    nxt.append(Y)
        frontier = nxt
    return span


def coideal_defect(sd: SatakeDatum, params: QSPParameters, M: WeightModule, N: WeightModule) -> list[str]:
    """Check Delta(B_i) in B (x) U on M (x) N.

    Each B_i acting on M (x) N is split as sum_{a,b} A_ab (x) e_ab over the
    matrix units of N; every left factor A_ab must lie in the image of B in
    End(M).  Returns the nodes and matrix units where this fails.
    """
    from .umod import tensor

    T = tensor(M, N)
    act_T = CoidealAction(T, sd, params)
    act_M = CoidealAction(M, sd, params)
    alg = operator_algebra(M, [op for _, op in act_M.generators()])
    dn = N.dim
    fails = []
    for i in sd.white:
        parts: dict[tuple[int, int], dict] = {}
        for k in range(T.dim):
            x, a = divmod(k, dn)
            for r, val in act_T.b(i, {k: ONE}).items():
                y, b = divmod(r, dn)
                parts.setdefault((b, a), {})[(y, x)] = val
        for key, mat in sorted(parts.items()):
            if not alg.contains(mat):
                fails.append(f"B{i + 1} at N-unit {key}")
    return fails


def parameters_from_config(sd: SatakeDatum, overrides, n: int) -> QSPParameters:
    """Default parameters with ``c<node>``/``s<node>`` overrides (1-based node labels) applied."""
    from .exactq import RatFun

    params = default_parameters(sd, n)
    if not overrides:
        return params
    c, s = {}, {}
    for key, text in overrides:
        kind, node = key[0], int(key[1:]) - 1
        if node not in sd.white or kind not in "cs":
            raise ParameterError(f"cannot override {key}")
        (c if kind == "c" else s)[node] = RatFun.parse(text)
    return params.with_values(c=c, s=s)
