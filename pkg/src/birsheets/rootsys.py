"""Classical root systems, Weyl groups and integer lattices.

Roots live in the orthogonal coordinates of the Bourbaki tables:

    A_n  e_i - e_j                 in Z^(n+1)
    B_n  +-e_i +- e_j, +-e_i       in Z^n
    C_n  +-e_i +- e_j, +-2e_i      in Z^n
    D_n  +-e_i +- e_j              in Z^n

Every root also carries its coefficient vector on the simple roots; the
group-level code works with those, pairing them against points written in
fundamental-coweight coordinates.  All arithmetic is exact.
"""
from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial
from operator import mul

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp

from .errors import CapExceeded, UnsupportedType

RANK_CAP = 6
KINDS = ("A", "B", "C", "D")


def _dot(u, v):
    return sum(map(mul, u, v))


# ---------------------------------------------------------------------------
# integer lattices


class IntLattice:
    """Z-span of integer row vectors in Z^dim.

    Built on a Smith decomposition D = U B V.  A vector v lies in the
    lattice iff vV is divisible coordinatewise by the diagonal of D (and
    vanishes past the rank); reducing vV modulo that diagonal gives a
    canonical key for the coset v + L, also for rational v.
    """

    def __init__(self, rows, dim):
        rows = [tuple(int(x) for x in r) for r in rows]
        self.rows = tuple(rows)
        self.dim = dim
        if not rows or dim == 0:
            self.rank = 0
            self.diag = ()
            self.U = Matrix.eye(len(rows)) if rows else Matrix.zeros(0, 0)
            self.V = Matrix.eye(dim)
            return
        B = Matrix(rows)
        D, U, V = smith_normal_decomp(B)
        diag = []
        for i in range(min(D.shape)):
            if D[i, i] != 0:
                diag.append(abs(int(D[i, i])))
        self.rank = len(diag)
        self.diag = tuple(diag)
        self.U = U
        self.V = V

    @property
    def _vcols(self):
        cols = self.__dict__.get("_vc")
        if cols is None:
            cols = [[int(self.V[i, j]) for i in range(self.dim)] for j in range(self.dim)]
            self.__dict__["_vc"] = cols
        return cols

    def _coords(self, v):
        return [sum(a * b for a, b in zip(v, col) if b) for col in self._vcols]

    def contains(self, v):
        if any(Fraction(x).denominator != 1 for x in v):
            return False
        w = self._coords(v)
        for j, x in enumerate(w):
            if j < self.rank:
                if x % self.diag[j]:
                    return False
            elif x != 0:
                return False
        return True

    def reduce(self, v):
        """Canonical key of the coset v + L."""
        w = self._coords(v)
        out = []
        for j, x in enumerate(w):
            x = Fraction(x)
            out.append(x % self.diag[j] if j < self.rank else x)
        return tuple(out)

    def left_kernel(self):
        """Z-basis of {m : m B = 0} as integer tuples."""
        n = len(self.rows)
        return [tuple(int(self.U[i, j]) for j in range(n)) for i in range(self.rank, n)]


@dataclass(frozen=True)
class LatticeQuotient:
    relations: tuple
    invariant_factors: tuple
    torsion_order: int
    free_rank: int


def lattice_quotient(relations) -> LatticeQuotient:
    """Structure of Z^n / (row span of relations), n = number of columns."""
    rel = tuple(tuple(int(x) for x in r) for r in relations)
    n = len(rel[0]) if rel else 0
    lat = IntLattice(rel, n)
    torsion = 1
    for d in lat.diag:
        torsion *= d
    return LatticeQuotient(rel, lat.diag, torsion, n - lat.rank)


def _rref(rows):
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rational_rank(rows):
    return len(_rref(rows)[1])


def nullspace(rows, ncols):
    """Basis (rows of Fractions) of {x : rows . x = 0}."""
    red, piv = _rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, piv):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve_particular(rows, rhs, ncols):
    """One rational solution of rows . x = rhs (free variables set to 0)."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, piv = _rref(aug)
    if ncols in piv:
        raise ValueError("inconsistent linear system")
    x = [Fraction(0)] * ncols
    for row, p in zip(red, piv):
        x[p] = row[ncols]
    return tuple(x)


# ---------------------------------------------------------------------------
# root systems


def _simple_roots(kind, n):
    if kind == "A":
        d = n + 1
    else:
        d = n
    out = []
    for i in range(n - 1 if kind != "A" else n):
        v = [0] * d
        v[i], v[i + 1] = 1, -1
        out.append(tuple(v))
    if kind == "B":
        v = [0] * d
        v[n - 1] = 1
        out.append(tuple(v))
    elif kind == "C":
        v = [0] * d
        v[n - 1] = 2
        out.append(tuple(v))
    elif kind == "D":
        v = [0] * d
        v[n - 2], v[n - 1] = 1, 1
        out.append(tuple(v))
    return out


def _classical_roots(kind, n):
    d = n + 1 if kind == "A" else n
    roots = set()
    for i, j in combinations(range(d), 2):
        v = [0] * d
        v[i], v[j] = 1, -1
        roots.add(tuple(v))
        roots.add(tuple(-x for x in v))
        if kind != "A":
            v = [0] * d
            v[i], v[j] = 1, 1
            roots.add(tuple(v))
            roots.add(tuple(-x for x in v))
    if kind in "BC":
        a = 1 if kind == "B" else 2
        for i in range(d):
            v = [0] * d
            v[i] = a
            roots.add(tuple(v))
            roots.add(tuple(-x for x in v))
    return roots


@dataclass(frozen=True)
class RootSystem:
    kind: str
    rank: int
    simple_roots: tuple
    all_roots: tuple
    lowest_root: tuple
    cartan: tuple
    weight_basis: tuple
    coweight_basis: tuple
    coeffs: tuple
    note: str | None = None
    _index: dict = field(default=None, compare=False, repr=False, hash=False)

    @property
    def ambient_dim(self):
        return len(self.simple_roots[0])

    @property
    def highest_root(self):
        return tuple(-x for x in self.lowest_root)

    def index(self, root):
        return self._index[tuple(root)]

    def height(self, i):
        return sum(self.coeffs[i])

    def positive(self):
        return [i for i in range(len(self.all_roots)) if self.height(i) > 0]

    def simple_index(self, j):
        return self._index[self.simple_roots[j]]

    @property
    def lowest_index(self):
        return self._index[self.lowest_root]

    def extended(self):
        """Extended simple roots: index 0 is alpha_0, then alpha_1..alpha_n."""
        return (self.lowest_root,) + self.simple_roots

    def extended_cartan(self):
        ext = self.extended()
        return tuple(
            tuple(2 * _dot(a, b) // _dot(a, a) for b in ext) for a in ext)

    def label(self):
        return f"{self.kind}{self.rank}"


def _coeff_vector(root, simple):
    n = len(simple)
    cols = list(zip(*simple))
    x = solve_particular([list(c) for c in cols], list(root), n)
    assert all(c.denominator == 1 for c in x)
    return tuple(int(c) for c in x)


def check_type(kind, rank, cap=RANK_CAP):
    if kind not in KINDS:
        raise UnsupportedType(f"type {kind}{rank} is outside the classical scope A/B/C/D")
    if not isinstance(rank, int) or rank < 1:
        raise UnsupportedType(f"rank must be a positive integer, got {rank!r}")
    if kind in "BC" and rank < 2:
        raise UnsupportedType(f"{kind}1 is not used; write A1")
    if kind == "D" and rank < 3:
        raise UnsupportedType("type D needs rank >= 3")
    if rank > cap:
        raise UnsupportedType(f"rank {rank} exceeds the configured cap {cap}")


_lock = threading.Lock()


@lru_cache(maxsize=None)
def _build(kind, rank):
    simple = _simple_roots(kind, rank)
    roots = _classical_roots(kind, rank)
    coeffs = {r: _coeff_vector(r, simple) for r in roots}
    order = sorted(roots, key=lambda r: (sum(coeffs[r]), coeffs[r], r))
    cartan = tuple(
        tuple(2 * _dot(a, b) // _dot(a, a) for b in simple) for a in simple)
    lowest = order[0]
    index = {r: i for i, r in enumerate(order)}
    return RootSystem(
        kind=kind, rank=rank,
        simple_roots=tuple(simple),
        all_roots=tuple(order),
        lowest_root=lowest,
        cartan=cartan,
        weight_basis=tuple(tuple(r) for r in cartan),
        coweight_basis=tuple(tuple(r) for r in zip(*cartan)),
        coeffs=tuple(coeffs[r] for r in order),
        _index=index,
    )


def build_root_system(kind, rank, cap=RANK_CAP) -> RootSystem:
    """Root system of type kind+rank.  D3 is returned as A3, with a warning."""
    check_type(kind, rank, cap)
    if kind == "D" and rank == 3:
        warnings.warn("D3 is normalized to A3", stacklevel=2)
        rs = _build("A", 3)
        return RootSystem(**{**rs.__dict__, "note": "normalized from D3"})
    with _lock:
        return _build(kind, rank)


def normalize_type(kind, rank):
    if kind == "D" and rank == 3:
        return "A", 3
    return kind, rank


# ---------------------------------------------------------------------------
# Weyl groups


def weyl_order(kind, n):
    if kind == "A":
        return factorial(n + 1)
    if kind in "BC":
        return 2 ** n * factorial(n)
    return 2 ** (n - 1) * factorial(n)


def _simple_signed(kind, n):
    """Simple reflections as signed permutations of coordinates."""
    d = n + 1 if kind == "A" else n
    ident = [(i, 1) for i in range(d)]
    gens = []
    for i in range(n - 1 if kind != "A" else n):
        g = list(ident)
        g[i], g[i + 1] = (i + 1, 1), (i, 1)
        gens.append(tuple(g))
    if kind in "BC":
        g = list(ident)
        g[n - 1] = (n - 1, -1)
        gens.append(tuple(g))
    elif kind == "D":
        g = list(ident)
        g[n - 2], g[n - 1] = (n - 1, -1), (n - 2, -1)
        gens.append(tuple(g))
    return gens


def _compose(g, h):
    """g after h."""
    out = []
    for j, s in h:
        k, t = g[j]
        out.append((k, s * t))
    return tuple(out)


def apply_signed(g, v):
    out = [0] * len(v)
    for i, x in enumerate(v):
        j, s = g[i]
        out[j] = s * x
    return tuple(out)


@dataclass(frozen=True)
class WeylGroup:
    kind: str
    rank: int
    elements: tuple          # root permutations: elements[w][i] = index of w(root_i)
    signed: tuple            # the same elements as signed coordinate permutations
    order: int
    generators: tuple        # indices of the simple reflections in elements

    def inverse_perm(self, w):
        p = self.elements[w]
        inv = [0] * len(p)
        for i, j in enumerate(p):
            inv[j] = i
        return tuple(inv)


_weyl_cache: dict = {}


def weyl_group(rs: RootSystem, cap=RANK_CAP) -> WeylGroup:
    if rs.rank > cap:
        raise CapExceeded(f"Weyl group enumeration capped at rank {cap}")
    key = (rs.kind, rs.rank)
    hit = _weyl_cache.get(key)
    if hit is not None:
        return hit
    gens = _simple_signed(rs.kind, rs.rank)
    d = rs.ambient_dim
    ident = tuple((i, 1) for i in range(d))
    seen = {ident: 0}
    order = [ident]
    k = 0
    while k < len(order):
        g = order[k]
        k += 1
        for s in gens:
            h = _compose(g, s)
            if h not in seen:
                seen[h] = len(order)
                order.append(h)
    perms = tuple(
        tuple(rs.index(apply_signed(g, r)) for r in rs.all_roots) for g in order)
    W = WeylGroup(rs.kind, rs.rank, perms, tuple(order), len(order),
                  tuple(seen[s] for s in gens))
    _weyl_cache.setdefault(key, W)
    return _weyl_cache[key]


def act_on_point(rs: RootSystem, perm, c):
    """Image of a point (fundamental-coweight coordinates) under w.

    <alpha_j, w x> = <w^-1 alpha_j, x>, and w^-1 alpha_j is read off the
    root permutation.
    """
    inv = {j: i for i, j in enumerate(perm)}
    out = []
    for j in range(rs.rank):
        src = inv[rs.simple_index(j)]
        out.append(_dot(rs.coeffs[src], c))
    return tuple(Fraction(x) for x in out)


# ---------------------------------------------------------------------------
# subsystems


def _lattice_of(rs, idx):
    rows = [rs.coeffs[i] for i in sorted(idx)]
    return IntLattice(rows, rs.rank)


def closure_indices(rs: RootSystem, seed) -> frozenset:
    """Indices of the roots in Z(seed) intersected with Phi."""
    seed = frozenset(seed)
    if not seed:
        return frozenset()
    lat = _lattice_of(rs, seed)
    return frozenset(i for i, k in enumerate(rs.coeffs) if lat.contains(k))


def subsystem_closure(rs: RootSystem, seed) -> frozenset:
    """Z-span of the seed roots intersected with Phi (roots as vectors)."""
    idx = closure_indices(rs, [rs.index(r) for r in seed])
    return frozenset(rs.all_roots[i] for i in idx)


def subsystem_base(rs: RootSystem, idx) -> tuple:
    """Simple roots of a closed subsystem, positivity inherited from Phi."""
    pos = [i for i in idx if rs.height(i) > 0]
    posset = set(pos)
    simple = []
    for i in pos:
        k = rs.coeffs[i]
        decomposable = False
        for j in pos:
            if j == i:
                continue
            rest = tuple(a - b for a, b in zip(k, rs.coeffs[j]))
            if sum(rest) > 0 and rest in _coeff_index(rs) and _coeff_index(rs)[rest] in posset:
                decomposable = True
                break
        if not decomposable:
            simple.append(i)
    return tuple(sorted(simple))


@lru_cache(maxsize=None)
def _coeff_index_cached(kind, rank, note):
    rs = _build(kind, rank)
    return {k: i for i, k in enumerate(rs.coeffs)}


def _coeff_index(rs):
    return _coeff_index_cached(rs.kind, rs.rank, None)


def root_by_coeffs(rs, k):
    return _coeff_index(rs).get(tuple(k))


# ---------------------------------------------------------------------------
# shifted subtori


@dataclass(frozen=True, eq=False)
class ShiftedSubtorus:
    """x + span(direction) + L inside Q^n / L.

    Coordinates are fundamental-coweight coordinates and L is the coroot
    lattice (rows of the Cartan matrix).
    """
    direction: tuple
    translation: tuple
    lattice: tuple

    def _key(self):
        n = len(self.translation)
        red, _ = _rref(self.direction)
        dir_key = tuple(tuple(r) for r in red)
        ann = nullspace(list(self.direction), n) if self.direction else [
            tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
        # integer annihilator rows
        ann_int = []
        for a in ann:
            den = 1
            for x in a:
                den = den * x.denominator // _gcd(den, x.denominator)
            ann_int.append(tuple(int(x * den) for x in a))
        images = [tuple(_dot(a, row) for a in ann_int) for row in self.lattice]
        lat = IntLattice(images, len(ann_int))
        t = tuple(_dot(a, self.translation) for a in ann_int)
        return dir_key, lat.reduce(t) if ann_int else ()

    def __eq__(self, other):
        if not isinstance(other, ShiftedSubtorus):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def dimension(self):
        return rational_rank(self.direction) if self.direction else 0


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def coroot_rows(rs: RootSystem):
    """Simple coroots in fundamental-coweight coordinates."""
    return tuple(tuple(r) for r in rs.cartan)


def to_json(rs: RootSystem) -> dict:
    return {
        "kind": rs.kind,
        "rank": rs.rank,
        "simple_roots": [list(r) for r in rs.simple_roots],
        "roots": [list(r) for r in rs.all_roots],
        "lowest_root": list(rs.lowest_root),
        "cartan": [list(r) for r in rs.cartan],
        "note": rs.note,
    }
