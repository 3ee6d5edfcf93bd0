"""Root data, Weyl-group combinatorics and Satake (admissible) pairs.

Conventions
-----------
* Nodes are labelled ``1..r`` in the public interface and ``0..r-1`` internally.
* Weights (elements of X) are integer tuples in the fundamental-weight basis,
  so ``<alpha_i^vee, lam> = lam[i]``.
* Coweights (elements of Y) are integer tuples in the simple-coroot basis, so
  ``<h, lam> = sum(h[i] * lam[i])``.  Y is the lattice dual to X.
* The simple root ``alpha_j`` has fundamental coordinates ``C[:, j]``.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from flint import fmpz_mat

Weight = tuple[int, ...]


# ---------------------------------------------------------------------------
# Cartan data
# ---------------------------------------------------------------------------

class CartanError(ValueError):
    pass


def _type_matrix(family: str, r: int) -> list[list[int]]:
    C = [[2 if i == j else 0 for j in range(r)] for i in range(r)]

    def link(i, j, cij=-1, cji=-1):
        C[i][j], C[j][i] = cij, cji

    if family == "A":
        for i in range(r - 1):
            link(i, i + 1)
    elif family == "B":
        if r < 2:
            raise CartanError("B_n needs n >= 2")
        for i in range(r - 2):
            link(i, i + 1)
        link(r - 2, r - 1, -1, -2)  # alpha_n short
    elif family == "C":
        if r < 2:
            raise CartanError("C_n needs n >= 2")
        for i in range(r - 2):
            link(i, i + 1)
        link(r - 2, r - 1, -2, -1)  # alpha_n long
    elif family == "D":
        if r < 4:
            raise CartanError("D_n needs n >= 4")
        for i in range(r - 2):
            link(i, i + 1)
        link(r - 3, r - 1)
    elif family == "E":
        if r not in (6, 7, 8):
            raise CartanError("E_n needs n in 6, 7, 8")
        link(0, 2)
        link(1, 3)
        for i in range(2, r - 1):
            link(i, i + 1)
    elif family == "F":
        if r != 4:
            raise CartanError("F_4 only")
        link(0, 1)
        link(1, 2, -1, -2)
        link(2, 3)
    elif family == "G":
        if r != 2:
            raise CartanError("G_2 only")
        link(0, 1, -3, -1)
    else:
        raise CartanError(f"unknown Cartan type {family}{r}")
    return C


def _parse_type(name: str) -> tuple[str, int]:
    name = name.strip().upper()
    return name[0], int(name[1:])


@dataclass(frozen=True)
class CartanDatum:
    """Symmetrizable finite Cartan matrix with its primitive symmetrizer."""

    matrix: tuple[tuple[int, ...], ...]
    symmetrizer: tuple[int, ...]
    name: str | None = None

    def __post_init__(self):
        C, d = self.matrix, self.symmetrizer
        r = len(C)
        if any(len(row) != r for row in C) or len(d) != r:
            raise CartanError("Cartan matrix must be square and match the symmetrizer")
        for i in range(r):
            if C[i][i] != 2:
                raise CartanError("diagonal entries must be 2")
            if d[i] < 1:
                raise CartanError("symmetrizer entries must be positive")
            for j in range(r):
                if i != j:
                    if C[i][j] > 0:
                        raise CartanError("off-diagonal entries must be <= 0")
                    if (C[i][j] == 0) != (C[j][i] == 0):
                        raise CartanError("zero pattern must be symmetric")
                    if d[i] * C[i][j] != d[j] * C[j][i]:
                        raise CartanError("D*C must be symmetric")
        if math.gcd(*d) != 1:
            raise CartanError("symmetrizer must be primitive")

    @classmethod
    def of_type(cls, name: str) -> "CartanDatum":
        fam, r = _parse_type(name)
        return cls.from_matrix(_type_matrix(fam, r), name=f"{fam}{r}")

    @classmethod
    def from_matrix(cls, matrix, name: str | None = None) -> "CartanDatum":
        C = tuple(tuple(int(x) for x in row) for row in matrix)
        return cls(C, _symmetrizer(C), name)

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def c(self, i: int, j: int) -> int:
        return self.matrix[i][j]

    def simple_root(self, j: int) -> Weight:
        return tuple(self.matrix[i][j] for i in range(self.rank))

    def fundamental(self, i: int) -> Weight:
        return tuple(1 if k == i else 0 for k in range(self.rank))

    def pair(self, h, lam) -> int:
        return sum(a * b for a, b in zip(h, lam))

    def pair_root(self, h, j: int) -> int:
        """<h, alpha_j> for a coweight h."""
        return sum(h[k] * self.matrix[k][j] for k in range(self.rank))

    def reflect(self, i: int, lam):
        a = self.simple_root(i)
        return tuple(x - lam[i] * y for x, y in zip(lam, a))

    def reflect_coweight(self, i: int, h):
        t = self.pair_root(h, i)
        return tuple(x - (t if k == i else 0) for k, x in enumerate(h))

    def root_to_weight(self, coeffs) -> Weight:
        """Convert simple-root coordinates to fundamental-weight coordinates."""
        r = self.rank
        return tuple(sum(self.matrix[i][j] * coeffs[j] for j in range(r)) for i in range(r))

    def weight_to_root(self, lam) -> tuple[Fraction, ...]:
        """Rational simple-root coordinates of a weight (inverse Cartan matrix)."""
        inv = self._cinv
        return tuple(sum(inv[j][i] * lam[i] for i in range(self.rank)) for j in range(self.rank))

    @cached_property
    def _cinv(self):
        r = self.rank
        M = [[Fraction(self.matrix[i][j]) for j in range(r)] + [Fraction(int(i == k)) for k in range(r)] for i in range(r)]
        for col in range(r):
            piv = next(i for i in range(col, r) if M[i][col] != 0)
            M[col], M[piv] = M[piv], M[col]
            pv = M[col][col]
            M[col] = [x / pv for x in M[col]]
            for i in range(r):
                if i != col and M[i][col] != 0:
                    f = M[i][col]
                    M[i] = [a - f * b for a, b in zip(M[i], M[col])]
        return [row[r:] for row in M]

    def is_dominant(self, lam) -> bool:
        return all(x >= 0 for x in lam)

    def leq(self, lam, mu) -> bool:
        """Dominance order: lam <= mu iff mu - lam is a non-negative integer sum of simple roots."""
        diff = self.weight_to_root(tuple(b - a for a, b in zip(lam, mu)))
        return all(x.denominator == 1 and x >= 0 for x in diff)

    def height(self, lam, top) -> int:
        """Height of top - lam in simple roots (assumes it is in the root lattice)."""
        return int(sum(self.weight_to_root(tuple(b - a for a, b in zip(lam, top)))))

    @cached_property
    def positive_roots(self) -> list[tuple[int, ...]]:
        """Positive roots in simple-root coordinates, ordered by height then lexicographically."""
        r = self.rank
        simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
        roots = set(simple)
        frontier = list(simple)
        while frontier:
            nxt = []
            for beta in frontier:
                wt = self.root_to_weight(beta)
                for i in range(r):
                    # beta + alpha_i is a root iff the i-string through beta extends upward
                    p = 0
                    down = list(beta)
                    while True:
                        down[i] -= 1
                        if tuple(down) in roots:
                            p += 1
                        else:
                            break
                    qq = p - wt[i]
                    if qq > 0:
                        up = tuple(b + (k == i) for k, b in enumerate(beta))
                        if up not in roots:
                            roots.add(up)
                            nxt.append(up)
            frontier = nxt
        return sorted(roots, key=lambda b: (sum(b), b))

    @cached_property
    def roots(self) -> list[tuple[int, ...]]:
        pos = self.positive_roots
        return pos + [tuple(-x for x in b) for b in pos]

    def weyl_dimension(self, lam) -> int:
        """Weyl dimension formula over the positive coroots."""
        # (omega_i, alpha_j) = d_j delta_ij for the symmetrized form
        num, den = 1, 1
        d = self.symmetrizer
        for beta in self.positive_roots:
            num *= sum(beta[i] * d[i] * (lam[i] + 1) for i in range(self.rank))
            den *= sum(beta[i] * d[i] for i in range(self.rank))
        return num // den


def _symmetrizer(C) -> tuple[int, ...]:
    r = len(C)
    d: list[Fraction | None] = [None] * r
    for start in range(r):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(r):
                if i != j and C[i][j] != 0 and d[j] is None:
                    d[j] = d[i] * C[i][j] / C[j][i]
                    stack.append(j)
    den = math.lcm(*(x.denominator for x in d))
    ints = [int(x * den) for x in d]
    g = math.gcd(*ints)
    return tuple(x // g for x in ints)


# ---------------------------------------------------------------------------
# Integer lattice helpers (FLINT HNF)
# ---------------------------------------------------------------------------

def integer_kernel(rows: list[list[int]], ncols: int) -> list[tuple[int, ...]]:
    """Saturated Z-basis of {x in Z^ncols : rows . x = 0}."""
    m = len(rows)
    if m == 0:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    aug = [[rows[k][i] for k in range(m)] + [int(i == j) for j in range(ncols)] for i in range(ncols)]
    H = fmpz_mat(aug).hnf().tolist()
    out = []
    for row in H:
        if all(x == 0 for x in row[:m]) and any(x != 0 for x in row[m:]):
            out.append(tuple(int(x) for x in row[m:]))
    return out


def hnf_rows(vectors: list[tuple[int, ...]], ncols: int) -> list[tuple[int, ...]]:
    if not vectors:
        return []
    H = fmpz_mat([list(v) for v in vectors]).hnf().tolist()
    return [tuple(int(x) for x in row) for row in H if any(x != 0 for x in row)]


def reduce_mod_lattice(v, hnf: list[tuple[int, ...]]) -> tuple[int, ...]:
    """Canonical representative of v modulo the row lattice of an HNF basis."""
    v = list(v)
    for row in hnf:
        p = next(k for k, x in enumerate(row) if x != 0)
        f = v[p] // row[p]
        if f:
            v = [a - f * b for a, b in zip(v, row)]
    return tuple(v)


# ---------------------------------------------------------------------------
# Admissible pairs
# ---------------------------------------------------------------------------

class AdmissibilityError(ValueError):
    condition = 0


class DiagramSymmetryError(AdmissibilityError):
    """tau is not a diagram automorphism."""
    condition = 1


class BlackInvolutionError(AdmissibilityError):
    """tau restricted to the black nodes differs from -w_black."""
    condition = 2


class HalfSumError(AdmissibilityError):
    """<rho_black^vee, alpha_i> is not integral for some tau-fixed white node."""
    condition = 3


class ReducibleError(AdmissibilityError):
    """The pair is not irreducible."""
    condition = 4


def parse_cycles(text: str, r: int) -> tuple[int, ...]:
    """Permutation of 0..r-1 from 1-based cycle notation such as ``(1 3)(2)``; ``id`` or ``()`` is the identity."""
    perm = list(range(r))
    text = text.strip()
    if text in ("", "id", "()"):
        return tuple(perm)
    for cyc in text.replace(")", "").split("("):
        cyc = cyc.replace(",", " ").split()
        if not cyc:
            continue
        nodes = [int(x) - 1 for x in cyc]
        for a, b in zip(nodes, nodes[1:] + nodes[:1]):
            perm[a] = b
    if sorted(perm) != list(range(r)):
        raise ValueError(f"not a permutation: {text}")
    return tuple(perm)


def format_cycles(perm: tuple[int, ...]) -> str:
    seen = set()
    parts = []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            seen.add(i)
            continue
        cyc = [i]
        seen.add(i)
        j = perm[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = perm[j]
        parts.append("(" + " ".join(str(x + 1) for x in cyc) + ")")
    return "".join(parts) if parts else "id"


@dataclass(frozen=True)
class HermitianClass:
    tag: str            # AI, AIV, AIII_a, AIII_b, BI, CI, DI, DIII_b, EIII, EVII
    family: str         # Table row name
    orbit: tuple[int, ...]   # I_otimes, 0-based, sorted
    node: int           # the representative i in I_otimes with i >= tau i


@dataclass(frozen=True)
class SatakeDatum:
    """A validated irreducible admissible pair together with its derived data."""

    cartan: CartanDatum
    black: frozenset
    tau: tuple[int, ...]
    order: tuple[int, ...] = ()          # nodes from greatest to least under the fixed linear order
    w_black: tuple[int, ...] = ()        # reduced word, applied right to left
    meta: dict = field(default_factory=dict, compare=False)

    # -- basic derived data ----------------------------------------------
    @property
    def rank(self) -> int:
        return self.cartan.rank

    @property
    def white(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.rank) if i not in self.black)

    def apply_w_black(self, lam):
        for i in reversed(self.w_black):
            lam = self.cartan.reflect(i, lam)
        return lam

    def apply_w_black_coweight(self, h):
        for i in reversed(self.w_black):
            h = self.cartan.reflect_coweight(i, h)
        return h

    def tau_weight(self, lam):
        out = [0] * self.rank
        for i, x in enumerate(lam):
            out[self.tau[i]] = x
        return tuple(out)

    def theta(self, lam) -> Weight:
        return tuple(-x for x in self.apply_w_black(self.tau_weight(lam)))

    def theta_coweight(self, h):
        return tuple(-x for x in self.apply_w_black_coweight(self.tau_weight(h)))

    @cached_property
    def _quotient_hnf(self):
        r = self.rank
        gens = []
        for i in range(r):
            w = self.cartan.fundamental(i)
            t = self.theta(w)
            gens.append(tuple(a - b for a, b in zip(w, t)))
        return hnf_rows(gens, r)

    def iweight(self, lam) -> Weight:
        """Canonical representative of the class of lam in X / (1 - theta) X."""
        return reduce_mod_lattice(lam, self._quotient_hnf)

    def is_spherical(self, lam) -> bool:
        return all(x == 0 for x in self.iweight(lam))

    @cached_property
    def icoweight_basis(self) -> list[tuple[int, ...]]:
        """Z-basis of Y^i = {h : theta h = h}."""
        r = self.rank
        cols = []
        for i in range(r):
            e = tuple(int(k == i) for k in range(r))
            t = self.theta_coweight(e)
            cols.append([t[k] - e[k] for k in range(r)])
        rows = [[cols[j][k] for j in range(r)] for k in range(r)]
        return integer_kernel(rows, r)

    # -- restricted roots ---------------------------------------------------
    def theta_root(self, beta) -> tuple[Fraction, ...]:
        wt = self.cartan.root_to_weight(beta)
        return self.cartan.weight_to_root(self.theta(wt))

    @cached_property
    def restricted_roots(self) -> frozenset:
        out = set()
        for beta in self.cartan.roots:
            t = self.theta_root(beta)
            v = tuple((Fraction(b) - x) / 2 for b, x in zip(beta, t))
            if any(v):
                out.add(v)
        return frozenset(out)

    @property
    def is_reduced(self) -> bool:
        sig = self.restricted_roots
        return not any(tuple(2 * x for x in v) in sig for v in sig)

    # -- Hermitian data -------------------------------------------------------
    @cached_property
    def hermitian(self) -> HermitianClass | None:
        return classify_hermitian(self)

    def mu(self, l: int) -> Weight:
        """Bottom weight mu_l."""
        h = self.hermitian
        if h is None:
            raise CartanError("pair is not of Hermitian type")
        i = h.node
        if self.is_reduced:
            return tuple(abs(l) if k == i else 0 for k in range(self.rank))
        j = i if l >= 0 else self.tau[i]
        return tuple(abs(l) if k == j else 0 for k in range(self.rank))

    def greater(self, i: int, j: int) -> bool:
        """i >= j in the fixed linear order."""
        return self.order.index(i) <= self.order.index(j)

    @property
    def label(self) -> str:
        blk = ",".join(str(i + 1) for i in sorted(self.black))
        return f"{self.cartan.name or 'custom'} black={{{blk}}} tau={format_cycles(self.tau)}"


def longest_word(cartan: CartanDatum, nodes) -> tuple[int, ...]:
    """Reduced word for the longest element of the parabolic subgroup, by greedy descent.

    Start from rho_J = sum of fundamental weights of J and reflect while some
    J-coordinate is positive; the reflections used form a reduced word of w_J.
    The returned word is to be applied right to left.
    """
    nodes = sorted(nodes)
    lam = tuple(1 if i in nodes else 0 for i in range(cartan.rank))
    word: list[int] = []
    while True:
        i = next((j for j in nodes if lam[j] > 0), None)
        if i is None:
            break
        lam = cartan.reflect(i, lam)
        word.append(i)
    return tuple(reversed(word))


def validate_admissible_pair(cartan: CartanDatum, black, tau, order=None) -> SatakeDatum:
    """Check the admissibility conditions and build the derived Satake data.

    ``black`` is a set of 0-based nodes and ``tau`` a 0-based permutation tuple.
    Each violated condition raises its own ``AdmissibilityError`` subclass.
    """
    r = cartan.rank
    tau = tuple(tau)
    black = frozenset(black)
    if sorted(tau) != list(range(r)) or any(tau[tau[i]] != i for i in range(r)):
        raise ValueError("tau must be an involution of the node set")
    C = cartan.matrix
    if any(C[i][j] != C[tau[i]][tau[j]] for i in range(r) for j in range(r)):
        raise DiagramSymmetryError("c_ij != c_{tau i, tau j}")
    w = longest_word(cartan, black)
    sd = SatakeDatum(cartan, black, tau, tuple(order) if order else tuple(range(r)), w)
    for j in black:
        img = tuple(-x for x in sd.apply_w_black(cartan.simple_root(j)))
        if img != cartan.simple_root(tau[j]):
            raise BlackInvolutionError(f"tau({j + 1}) != -w_black on node {j + 1}")
    if black:
        sub = sorted(black)
        dual = CartanDatum.from_matrix([[C[b][a] for b in sub] for a in sub])
        total = [0] * r
        for beta in dual.positive_roots:
            for k, b in enumerate(beta):
                total[sub[k]] += b
        for i in range(r):
            if i not in black and tau[i] == i:
                val = sum(total[k] * C[k][i] for k in range(r))
                if val % 2:
                    raise HalfSumError(f"<rho_black^vee, alpha_{i + 1}> = {val}/2 is not an integer")
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(r):
            if j not in seen and (C[i][j] != 0 or tau[i] == j):
                seen.add(j)
                stack.append(j)
    if len(seen) != r:
        raise ReducibleError("admissible pair is not irreducible")
    return sd


# ---------------------------------------------------------------------------
# Table of Hermitian shapes, and rank-one shapes for parameter lookup
# ---------------------------------------------------------------------------

def _isomorphisms(C, D):
    """All node bijections p with C[i][j] == D[p i][p j]."""
    r = len(C)
    if len(D) != r:
        return
    sig = lambda M, i: sorted(M[i][j] for j in range(r) if j != i)
    cand = [[j for j in range(r) if sig(C, i) == sig(D, j)] for i in range(r)]

    def rec(i, used, p):
        if i == r:
            yield tuple(p)
            return
        for j in cand[i]:
            if j in used:
                continue
            if all(C[i][k] == D[j][p[k]] and C[k][i] == D[p[k]][j] for k in range(i)):
                p.append(j)
                used.add(j)
                yield from rec(i + 1, used, p)
                used.discard(j)
                p.pop()

    yield from rec(0, set(), [])


def _flip(r):
    return tuple(r - 1 - i for i in range(r))


def _hermitian_shapes(cartan: CartanDatum):
    """Yield (tag, family, type name, black set, tau, I_otimes) for Table-1 shapes of this rank."""
    r = cartan.rank
    ident = tuple(range(r))
    if r == 1:
        yield "AI", "AIII_b", "A1", frozenset(), ident, (0,)
    if r >= 2:
        # AIII_a: A_r, tau flip, p white pairs on the ends, black in the middle
        for p in range(1, (r + 1) // 2 + 1):
            if 2 * p > r + 1:
                break
            black = frozenset(range(p, r - p))
            if 2 * p == r + 1:
                continue  # tau would fix the middle white node: AIII_b
            tag = "AIV" if p == 1 else "AIII_a"
            yield tag, "AIII_a", f"A{r}", black, _flip(r), tuple(sorted({p - 1, r - p}))
        if r % 2 == 1:
            p = (r + 1) // 2
            yield "AIII_b", "AIII_b", f"A{r}", frozenset(), _flip(r), (p - 1,)
        if r >= 3:
            yield "BI", "BI", f"B{r}", frozenset(range(2, r)), ident, (0,)
        yield "CI", "CI", f"C{r}", frozenset(), ident, (r - 1,)
    if r >= 4:
        black = frozenset(range(2, r))
        if (r - 2) % 2 == 1:
            tau = tuple(list(range(r - 2)) + [r - 1, r - 2])
        else:
            tau = ident
        yield "DI", "DI", f"D{r}", black, tau, (0,)
    if r >= 5 and r % 2 == 1:
        black = frozenset(range(0, r - 2, 2))
        tau = tuple(list(range(r - 2)) + [r - 1, r - 2])
        yield "DIII_b", "DIII_b", f"D{r}", black, tau, (r - 2, r - 1)
    if r == 6:
        yield "EIII", "EIII", "E6", frozenset({2, 3, 4}), (5, 1, 4, 3, 2, 0), (0, 5)
    if r == 7:
        yield "EVII", "EVII", "E7", frozenset({1, 2, 3, 4}), ident, (6,)


def classify_hermitian(sd: SatakeDatum) -> HermitianClass | None:
    """Match the pair against the Hermitian table up to diagram isomorphism."""
    C = sd.cartan.matrix
    for tag, fam, tname, black, tau, orbit in _hermitian_shapes(sd.cartan):
        try:
            D = CartanDatum.of_type(tname).matrix
        except CartanError:
            continue
        for p in _isomorphisms(C, D):
            if frozenset(p[i] for i in sd.black) != black:
                continue
            if any(p[sd.tau[i]] != tau[p[i]] for i in range(sd.rank)):
                continue
            inv = {p[i]: i for i in range(sd.rank)}
            orb = tuple(sorted(inv[k] for k in orbit))
            node = min(orb, key=sd.order.index)
            return HermitianClass(tag, fam, orb, node)
    return None


def rank_one_component(sd: SatakeDatum, i: int) -> tuple[list[int], frozenset, tuple[int, ...]]:
    """Nodes, black set and tau of the irreducible rank-one pair induced by the white node i."""
    nodes = set(sd.black) | {i, sd.tau[i]}
    comp = {i}
    stack = [i]
    C = sd.cartan.matrix
    while stack:
        a = stack.pop()
        for b in nodes:
            if b not in comp and (C[a][b] != 0 or sd.tau[a] == b):
                comp.add(b)
                stack.append(b)
    comp_l = sorted(comp)
    return comp_l, frozenset(sd.black & comp), tuple(sd.tau[k] for k in comp_l)


def rank_one_type(sd: SatakeDatum, i: int) -> tuple[str, int]:
    """Name and size of the rank-one pair induced by the white node i."""
    comp, black, tau_c = rank_one_component(sd, i)
    idx = {k: n for n, k in enumerate(comp)}
    C = [[sd.cartan.matrix[a][b] for b in comp] for a in comp]
    blk = frozenset(idx[k] for k in black)
    tau = tuple(idx[t] for t in tau_c)
    r = len(comp)
    ident = tuple(range(r))
    shapes = []
    if r == 1:
        shapes.append(("AIII_b1", None, frozenset(), ident))
    if r == 2 and C[0][1] == 0:
        shapes.append(("AIII_2", None, frozenset(), (1, 0)))
    if r >= 2:
        shapes.append(("AIV", f"A{r}", frozenset(range(1, r - 1)), _flip(r)))
    if r == 3:
        shapes.append(("AII_3", "A3", frozenset({0, 2}), ident))
    if r >= 2:
        shapes.append(("BII", f"B{r}", frozenset(range(1, r)), ident))
        shapes.append(("CII", f"C{r}", frozenset({0} | set(range(2, r))), ident))
    if r >= 4:
        btau = ident if (r - 1) % 2 == 0 else tuple(list(range(r - 2)) + [r - 1, r - 2])
        shapes.append(("DII", f"D{r}", frozenset(range(1, r)), btau))
    if r == 4:
        shapes.append(("FII", "F4", frozenset({0, 1, 2}), ident))
    for tag, tname, sblack, stau in shapes:
        if tname is None:
            D = [[2 if a == b else 0 for b in range(r)] for a in range(r)]
        else:
            try:
                D = CartanDatum.of_type(tname).matrix
            except CartanError:
                continue
        for p in _isomorphisms(C, D):
            if frozenset(p[k] for k in blk) == sblack and all(p[tau[k]] == stau[p[k]] for k in range(r)):
                return tag, r
    raise CartanError(f"unsupported rank-one diagram at node {i + 1}")


# ---------------------------------------------------------------------------
# Diagram configuration files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiagramConfig:
    """Textual diagram description: Cartan type or matrix, black nodes, tau, n, order, overrides."""

    cartan_type: str | None = None
    matrix: tuple[tuple[int, ...], ...] | None = None
    black: tuple[int, ...] = ()          # 1-based
    tau: str = "id"
    n: int = 0
    order: tuple[int, ...] | None = None  # 1-based, greatest first
    overrides: tuple[tuple[str, str], ...] = ()  # ("c3", laurent text) pairs

    def cartan(self) -> CartanDatum:
        if self.cartan_type:
            return CartanDatum.of_type(self.cartan_type)
        if self.matrix is None:
            raise CartanError("config needs a type or a matrix")
        return CartanDatum.from_matrix(self.matrix)

    def satake(self) -> SatakeDatum:
        C = self.cartan()
        order = tuple(x - 1 for x in self.order) if self.order else None
        return validate_admissible_pair(C, {b - 1 for b in self.black}, parse_cycles(self.tau, C.rank), order)

    def dumps(self) -> str:
        lines = ["[diagram]"]
        if self.cartan_type:
            lines.append(f"type = {self.cartan_type}")
        if self.matrix is not None:
            lines.append("matrix = " + "; ".join(" ".join(str(x) for x in row) for row in self.matrix))
        lines.append("black = " + " ".join(str(b) for b in self.black))
        lines.append(f"tau = {self.tau}")
        lines.append(f"n = {self.n}")
        if self.order:
            lines.append("order = " + " ".join(str(x) for x in self.order))
        if self.overrides:
            lines.append("")
            lines.append("[parameters]")
            for k, v in self.overrides:
                lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "DiagramConfig":
        cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
        cp.optionxform = str
        cp.read_string(text)
        d = cp["diagram"]
        matrix = None
        if "matrix" in d:
            matrix = tuple(tuple(int(x) for x in row.split()) for row in d["matrix"].split(";"))
        order = tuple(int(x) for x in d["order"].split()) if d.get("order", "").strip() else None
        overrides = tuple((k, v) for k, v in cp["parameters"].items()) if cp.has_section("parameters") else ()
        return cls(
            cartan_type=d.get("type") or None,
            matrix=matrix,
            black=tuple(int(x) for x in d.get("black", "").split()),
            tau=d.get("tau", "id").strip() or "id",
            n=int(d.get("n", "0")),
            order=order,
            overrides=overrides,
        )

    @classmethod
    def load(cls, path) -> "DiagramConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def satake(type_name: str, black=(), tau: str = "id") -> SatakeDatum:
    """Convenience constructor with 1-based node labels."""
    C = CartanDatum.of_type(type_name)
    return validate_admissible_pair(C, {b - 1 for b in black}, parse_cycles(tau, C.rank))


def table_instances() -> list[tuple[str, DiagramConfig]]:
    """Smallest-rank instance of every Hermitian table row (plus the rank-one AI and AIV)."""
    return [
        ("AI", DiagramConfig("A1")),
        ("AIV", DiagramConfig("A2", tau="(1 2)")),
        ("AIV", DiagramConfig("A3", black=(2,), tau="(1 3)")),
        ("AIII_a", DiagramConfig("A4", black=(), tau="(1 4)(2 3)")),
        ("AIII_b", DiagramConfig("A3", tau="(1 3)")),
        ("BI", DiagramConfig("B3", black=(3,))),
        ("CI", DiagramConfig("C2")),
        ("DI", DiagramConfig("D4", black=(3, 4))),
        ("DIII_b", DiagramConfig("D5", black=(1, 3), tau="(4 5)")),
        ("EIII", DiagramConfig("E6", black=(3, 4, 5), tau="(1 6)(3 5)")),
        ("EVII", DiagramConfig("E7", black=(2, 3, 4, 5))),
    ]
