"""Pseudo-Levi subgroups, centre components and decomposition data.

Points of the maximal torus of the simply connected group are written in
fundamental-coweight coordinates: c in Q^n stands for exp(2 pi i x) with
<alpha_j, x> = c_j, so a root alpha is trivial at the point iff
coeffs(alpha) . c is an integer.  Two points are the same torus element
iff they differ by an integer combination of simple coroots (the rows of
the Cartan matrix).

Subsystems are frozensets of root indices.  Their simple factors are read
off in the orthogonal coordinates: a factor is either a GL_k-type block on
k coordinates with signs (roots eps_i e_i - eps_j e_j) or a classical
B/C/D factor on a set of coordinates.
"""
from __future__ import annotations

import threading
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import gcd
from operator import mul

from .errors import InconsistentEmbedding, PointOutsideComponent, UnsupportedType
from .orbits import (
    ClassicalOrbit, induce_shape, make_shape, orbit_dim, orbits_of,
)
from .rootsys import (
    IntLattice, ShiftedSubtorus, _compose, _simple_signed, apply_signed,
    build_root_system, check_type, coroot_rows, nullspace, solve_particular,
    subsystem_base,
)

SC = "simply-connected"


def _dot(u, v):
    return sum(map(mul, u, v))


def _frac(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# the group


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    rank: int
    isogeny: str = SC
    note: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.isogeny != SC:
            raise UnsupportedType(
                "only simply connected groups are modelled: centralizers of "
                "semisimple elements are then connected, which the bir/wbir "
                "identification relies on")
        check_type(self.kind, self.rank)
        if self.kind == "D" and self.rank == 3:
            warnings.warn("D3 is normalized to A3", stacklevel=2)
            object.__setattr__(self, "kind", "A")
            object.__setattr__(self, "note", "normalized from D3")

    @classmethod
    def parse(cls, text):
        text = text.strip().upper()
        if len(text) < 2 or not text[1:].isdigit():
            raise UnsupportedType(f"cannot read group {text!r}; expected e.g. C3")
        return cls(text[0], int(text[1:]))

    @property
    def label(self):
        return f"{self.kind}{self.rank}"

    @property
    def rs(self):
        return build_root_system(self.kind, self.rank)

    @property
    def dim(self):
        return self.rank + len(self.rs.all_roots)


def _signed_inverse(g):
    inv = [None] * len(g)
    for i, (j, s) in enumerate(g):
        inv[j] = (i, s)
    return tuple(inv)


class _Engine:
    """Per-group caches.  Everything is deterministic; the lock only guards
    the lazily filled tables."""

    def __init__(self, kind, rank):
        self.G = GroupSpec(kind, rank)
        self.rs = rs = build_root_system(kind, rank)
        self.n = rank
        self.cartan = coroot_rows(rs)
        self.gens = tuple(_simple_signed(kind, rank))
        self.ident = tuple((i, 1) for i in range(rs.ambient_dim))
        self.gen_perms = tuple(self.root_perm(g) for g in self.gens)
        self.lock = threading.RLock()
        self._lattices = {}
        self._spans = {}
        self._classes = None       # list of PseudoLevi
        self._members = {}         # subsystem -> (class index, transporter)
        self._data = None

    def root_perm(self, g):
        rs = self.rs
        return tuple(rs.index(apply_signed(g, r)) for r in rs.all_roots)

    def image(self, g, idx):
        rs = self.rs
        return frozenset(rs.index(apply_signed(g, rs.all_roots[i])) for i in idx)

    def act(self, g, c):
        """Point g.c; <alpha_j, g x> = <g^-1 alpha_j, x>."""
        rs = self.rs
        ginv = _signed_inverse(g)
        out = []
        for a in rs.simple_roots:
            k = rs.coeffs[rs.index(apply_signed(ginv, a))]
            out.append(Fraction(_dot(k, c)))
        return tuple(out)

    def value(self, i, c):
        return _dot(self.rs.coeffs[i], c)

    def centralizer(self, c):
        return frozenset(i for i in range(len(self.rs.all_roots))
                         if Fraction(self.value(i, c)).denominator == 1)

    # -- lattices attached to a subsystem --------------------------------
    def lattice(self, idx):
        """(ordered base, IntLattice of <beta_j, alpha_i^v>) for a subsystem."""
        hit = self._lattices.get(idx)
        if hit is not None:
            return hit
        base = subsystem_base(self.rs, idx)
        rows = [[_dot(self.rs.coeffs[b], cor) for b in base] for cor in self.cartan]
        lat = IntLattice(rows, len(base)) if base else None
        self._lattices[idx] = (base, lat)
        return base, lat

    def key(self, idx, c):
        base, lat = self.lattice(idx)
        if not base:
            return ()
        return lat.reduce([self.value(b, c) for b in base])

    def key_scaled(self, idx, X, D):
        """key(idx, X / D) for an integer vector X, without fractions."""
        base, lat = self.lattice(idx)
        if not base:
            return ()
        coeffs = self.rs.coeffs
        w = lat._coords([_dot(coeffs[b], X) for b in base])
        out = []
        for j, x in enumerate(w):
            out.append(Fraction(x % (lat.diag[j] * D), D) if j < lat.rank else Fraction(x, D))
        return tuple(out)

    def span_of(self, direction):
        """Roots vanishing on every vector of an integer direction list."""
        key = tuple(sorted(direction))
        hit = self._spans.get(key)
        if hit is None:
            coeffs = self.rs.coeffs
            hit = frozenset(i for i in range(len(coeffs))
                            if all(_dot(coeffs[i], v) == 0 for v in direction))
            self._spans[key] = hit
        return hit

    def direction(self, idx):
        base, _ = self.lattice(idx)
        return nullspace([self.rs.coeffs[b] for b in base], self.n) if base else [
            tuple(Fraction(int(i == j)) for j in range(self.n)) for i in range(self.n)]

    def in_span(self, idx, i, direction=None):
        direction = self.direction(idx) if direction is None else direction
        k = self.rs.coeffs[i]
        return all(_dot(k, v) == 0 for v in direction)

    def span_closure(self, idx):
        d = self.direction(idx)
        return frozenset(i for i in range(len(self.rs.all_roots)) if self.in_span(idx, i, d))


@lru_cache(maxsize=None)
def _engine(kind, rank):
    return _Engine(kind, rank)


def engine(G: GroupSpec) -> _Engine:
    return _engine(G.kind, G.rank)


# ---------------------------------------------------------------------------
# simple factors of a subsystem


@dataclass(frozen=True, order=True)
class Factor:
    kind: str          # "A" for a GL_k block, else the classical kind
    coords: tuple
    signs: tuple

    @property
    def size(self):
        return len(self.coords)

    @property
    def rank(self):
        return self.size - 1 if self.kind == "A" else self.size

    @property
    def nonabelian(self):
        return self.kind != "A" or self.size > 1

    def label(self):
        if self.kind == "A":
            return f"A{self.size - 1}"
        return f"{self.kind}{self.size}"

    def orbits(self):
        return orbits_of(self.kind, self.rank)

    def to_json(self):
        return {"type": self.label(), "coords": list(self.coords), "signs": list(self.signs)}


def factors_of(G: GroupSpec, idx) -> tuple:
    """Simple factors (plus GL_1 pieces) of a closed subsystem."""
    return _factors(G.kind, G.rank, frozenset(idx))


@lru_cache(maxsize=None)
def _factors(kind, rank, idx):
    rs = build_root_system(kind, rank)
    d = rs.ambient_dim
    marked = set()
    adj = defaultdict(list)
    for i in idx:
        r = rs.all_roots[i]
        nz = [(k, x) for k, x in enumerate(r) if x]
        if len(nz) == 1:
            marked.add(nz[0][0])
        else:
            (a, x), (b, y) = nz
            rel = -x * y          # eps_b = rel * eps_a
            adj[a].append((b, rel))
            adj[b].append((a, rel))
    seen = {}
    out = []
    for start in range(d):
        if start in seen:
            continue
        seen[start] = 1
        comp = [start]
        clash = False
        k = 0
        while k < len(comp):
            a = comp[k]
            k += 1
            for b, rel in adj[a]:
                want = seen[a] * rel
                if b in seen:
                    clash = clash or seen[b] != want
                else:
                    seen[b] = want
                    comp.append(b)
        comp.sort()
        if clash or any(c in marked for c in comp):
            if kind == "C":
                fk = "C"
            elif kind == "B":
                fk = "B" if any(c in marked for c in comp) else "D"
            else:
                fk = "D"
            out.append(Factor(fk, tuple(comp), (1,) * len(comp)))
        else:
            s0 = seen[comp[0]]
            out.append(Factor("A", tuple(comp), tuple(seen[c] * s0 for c in comp)))
    return tuple(sorted(out))


def _root_count(f: Factor):
    k = f.size
    if f.kind == "A":
        return k * (k - 1)
    if f.kind in "BC":
        return 2 * k * k
    return 2 * k * (k - 1)


def transport_factor(g, f: Factor):
    """Image of a factor under a signed permutation, and whether a D factor
    picks up an odd number of sign changes (which swaps very even labels)."""
    pairs = []
    parity = 1
    for c, e in zip(f.coords, f.signs):
        j, s = g[c]
        pairs.append((j, s * e))
        parity *= s
    pairs.sort()
    coords = tuple(j for j, _ in pairs)
    if f.kind == "A":
        s0 = pairs[0][1]
        signs = tuple(s * s0 for _, s in pairs)
    else:
        signs = (1,) * len(pairs)
    return Factor(f.kind, coords, signs), (f.kind == "D" and parity == -1)


def _flip(o: ClassicalOrbit):
    if o.very_even_label is None:
        return o
    lab = "II" if o.very_even_label == "I" else "I"
    return ClassicalOrbit(o.kind, o.partition, lab, o.label_ambiguous)


def transport_orbit(g, assignment):
    out = []
    for f, o in assignment:
        f2, flip = transport_factor(g, f)
        out.append((f2, _flip(o) if flip else o))
    return tuple(sorted(out, key=_assign_sort))


def _orbit_sort(o: ClassicalOrbit):
    return (o.kind, o.partition.parts, o.very_even_label or "", o.label_ambiguous)


def _assign_sort(item):
    f, o = item
    return (f, _orbit_sort(o))


def assignment_sort_key(assignment):
    return tuple(_assign_sort(x) for x in assignment)


def orbit_assignments(factors):
    """Every class of the subgroup with these factors."""
    nab = [f for f in factors if f.nonabelian]
    for combo in product(*(f.orbits() for f in nab)):
        yield tuple(zip(nab, combo))


def trivial_assignment(factors):
    return tuple((f, f.orbits()[-1]) for f in factors if f.nonabelian)


def describe_assignment(assignment):
    if not assignment:
        return "trivial"
    return "x".join(f"{f.label()}{o}" for f, o in assignment)


def factors_label(factors):
    nab = [f.label() for f in factors if f.nonabelian]
    return "x".join(nab) if nab else "T"


# ---------------------------------------------------------------------------
# pseudo-Levi subgroups


@dataclass(frozen=True, eq=False)
class PseudoLevi:
    index: int
    theta: tuple              # extended-node indices, 0 = alpha_0
    subsystem: frozenset
    base: tuple
    factors: tuple
    is_levi: bool
    envelope: tuple           # factors of C_G(Z(M)^o)
    rank: int
    group: GroupSpec

    @property
    def label(self):
        return factors_label(self.factors)

    @property
    def isolated(self):
        return self.rank == self.group.rank

    def to_json(self):
        return {"index": self.index, "theta": list(self.theta), "type": self.label,
                "rank": self.rank, "roots": len(self.subsystem), "is_levi": self.is_levi,
                "envelope": factors_label(self.envelope),
                "factors": [f.to_json() for f in self.factors if f.nonabelian]}


def _ext_index(rs, j):
    return rs.lowest_index if j == 0 else rs.simple_index(j - 1)


def _orbit_with_transporters(E: _Engine, idx):
    trans = {idx: E.ident}
    queue = [idx]
    k = 0
    while k < len(queue):
        S = queue[k]
        k += 1
        for s, sp in zip(E.gens, E.gen_perms):
            T = frozenset(sp[i] for i in S)
            if T not in trans:
                trans[T] = _compose(s, trans[S])
                queue.append(T)
    return trans


def enumerate_pseudo_levis(G: GroupSpec) -> list:
    """Standard pseudo-Levis Theta (proper subsets of the extended base) up
    to Weyl conjugacy."""
    E = engine(G)
    with E.lock:
        if E._classes is not None:
            return list(E._classes)
        rs = E.rs
        nodes = range(G.rank + 1)
        found = []       # (theta, idx)
        members = {}
        for size in range(G.rank + 1):
            for theta in combinations(nodes, size):
                seed = [_ext_index(rs, j) for j in theta]
                from .rootsys import closure_indices
                idx = closure_indices(rs, seed)
                if idx in members:
                    continue
                trans = _orbit_with_transporters(E, idx)
                cid = len(found)
                for S, g in trans.items():
                    members[S] = (cid, g)
                found.append((theta, idx))
        rows = []
        for cid, (theta, idx) in enumerate(found):
            base, _ = E.lattice(idx)
            span = E.span_closure(idx)
            fs = factors_of(G, idx)
            assert sum(_root_count(f) for f in fs if f.nonabelian) == len(idx), fs
            rows.append((len(base), len(idx), factors_label(fs), theta, cid, idx, base, fs, span))
        rows.sort(key=lambda r: r[:4])
        remap = {}
        classes = []
        for new, (rk, _, _, theta, cid, idx, base, fs, span) in enumerate(rows):
            remap[cid] = new
            classes.append(PseudoLevi(new, tuple(theta), idx, base, fs, span == idx,
                                      factors_of(G, span), rk, G))
        E._members = {S: (remap[c], g) for S, (c, g) in members.items()}
        E._classes = classes
        return list(classes)


def classify(G: GroupSpec, idx):
    """(class, g) with g(class subsystem) = idx."""
    E = engine(G)
    enumerate_pseudo_levis(G)
    hit = E._members.get(frozenset(idx))
    if hit is None:
        raise InconsistentEmbedding("not the root system of a pseudo-Levi subgroup")
    cid, g = hit
    return E._classes[cid], g


def pseudo_levi_by_theta(G: GroupSpec, theta):
    """Class of the standard pseudo-Levi generated by extended nodes theta."""
    from .rootsys import closure_indices
    E = engine(G)
    idx = closure_indices(E.rs, [_ext_index(E.rs, j) for j in theta])
    return classify(G, idx)


def stabilizer_generators(G: GroupSpec, M: PseudoLevi):
    """Schreier generators of N_W(M) (as signed permutations)."""
    E = engine(G)
    trans = _orbit_with_transporters(E, M.subsystem)
    out = set()
    for S, gS in trans.items():
        for s, sp in zip(E.gens, E.gen_perms):
            T = frozenset(sp[i] for i in S)
            h = _compose(_signed_inverse(trans[T]), _compose(s, gS))
            if h != E.ident:
                out.add(h)
    return sorted(out)


# ---------------------------------------------------------------------------
# centre components


@dataclass(frozen=True, eq=False)
class CenterComponent:
    pseudo_levi: PseudoLevi
    key: tuple
    point: tuple              # representative in fundamental-coweight coordinates
    rp: bool
    generic: tuple | None     # certified generic sample point (rp only)

    @property
    def component(self) -> ShiftedSubtorus:
        E = engine(self.pseudo_levi.group)
        return ShiftedSubtorus(tuple(E.direction(self.pseudo_levi.subsystem)),
                               self.point, E.cartan)

    def to_json(self):
        E = engine(self.pseudo_levi.group)
        basis = [[_frac(x) for x in v] for v in _integral_basis(
            E.direction(self.pseudo_levi.subsystem))] if self.pseudo_levi.rank < E.n else []
        return {"key": [_frac(x) for x in self.key], "basis": basis,
                "translation": [_frac(x) for x in self.point], "rp": self.rp}


def _integral_basis(vectors):
    out = []
    for v in vectors:
        den = 1
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
        w = [int(x * den) for x in v]
        g = 0
        for x in w:
            g = gcd(g, x)
        out.append(tuple(Fraction(x // g) for x in w) if g else tuple(Fraction(x) for x in w))
    return out


def _coset_points(E: _Engine, idx):
    """One point in each component of Z(M), keyed by component key."""
    base, lat = E.lattice(idx)
    if not base:
        return [((), tuple(Fraction(0) for _ in range(E.n)))]
    r = len(base)
    Vinv = lat.V.inv()
    rows = [E.rs.coeffs[b] for b in base]
    out = []
    for w in product(*(range(d) for d in lat.diag)):
        v = [sum(w[i] * int(Vinv[i, j]) for i in range(r)) for j in range(r)]
        x = solve_particular(rows, v, E.n)
        out.append((E.key(idx, x), x))
    out.sort()
    return out


def generic_point(G: GroupSpec, idx, x0, skip=0, bound=400):
    """Rational point of x0 + span(direction) whose centralizer is exactly idx.

    Candidates x0 + sum_k t_k v_k run over small denominators in a fixed
    order; the first hit (or the hit after skipping some) is returned.
    Genericity is certified by comparing centralizer subsystems.
    """
    E = engine(G)
    idx = frozenset(idx)
    direction = _integral_basis(E.direction(idx)) if len(E.lattice(idx)[0]) < E.n else []
    if not direction:
        return tuple(x0) if E.centralizer(x0) == idx else None
    hits = 0
    for q in range(2, bound):
        ts = [Fraction(k + 1, q * (k + 2) + 1) for k in range(len(direction))]
        x = tuple(Fraction(a) + sum(t * v[j] for t, v in zip(ts, direction))
                  for j, a in enumerate(x0))
        if E.centralizer(x) == idx:
            if hits == skip:
                return x
            hits += 1
    return None


def _rp_formula(E: _Engine, idx, x0):
    """Roots constant on the coset x0 Z(M)^o and trivial there, versus M."""
    span = E.span_closure(idx)
    generic = frozenset(i for i in span if Fraction(E.value(i, x0)).denominator == 1)
    return generic == idx


def center_components(G: GroupSpec, M: PseudoLevi) -> list:
    E = engine(G)
    out = []
    for key, x in _coset_points(E, M.subsystem):
        rp = _rp_formula(E, M.subsystem, x)
        gen = None
        if rp:
            gen = generic_point(G, M.subsystem, x)
            if gen is None:
                raise RuntimeError(f"no certified generic point for {M.label} at {key}")
            # M is a Levi of the centralizer of the representative
            cz = E.centralizer(x)
            assert E.span_closure(M.subsystem) & cz == M.subsystem
        out.append(CenterComponent(M, key, x, rp, gen))
    return out


def center_of_group(G: GroupSpec):
    """Points of Z(G) (one per element)."""
    E = engine(G)
    full = frozenset(range(len(E.rs.all_roots)))
    return [x for _, x in _coset_points(E, full)]


# ---------------------------------------------------------------------------
# decomposition data


@dataclass(frozen=True, eq=False)
class DecompositionDatum:
    index: int
    pseudo_levi: PseudoLevi
    component: CenterComponent
    orbit: tuple              # ((Factor, ClassicalOrbit), ...) on nonabelian factors

    @property
    def ident(self):
        return (self.pseudo_levi.index, self.component.key, assignment_sort_key(self.orbit))

    def describe(self):
        key = ",".join(_frac(x) for x in self.component.key)
        return f"({self.pseudo_levi.label}, [{key}], {describe_assignment(self.orbit)})"

    def to_json(self):
        return {"index": self.index, "theta": list(self.pseudo_levi.theta),
                "pseudo_levi": self.pseudo_levi.label, "component": self.component.to_json(),
                "orbit": [{"factor": f.label(), "coords": list(f.coords), "orbit": o.to_json()}
                          for f, o in self.orbit]}


class _UF:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, a):
        while self.p[a] != a:
            self.p[a] = self.p[self.p[a]]
            a = self.p[a]
        return a

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            if b < a:
                a, b = b, a
            self.p[b] = a


def enumerate_decomposition_data(G: GroupSpec) -> list:
    """Triples (M, rp component of Z(M), class of M) up to Weyl conjugacy."""
    E = engine(G)
    with E.lock:
        if E._data is not None:
            return list(E._data[0])
        lookup = {}
        data = []
        for M in enumerate_pseudo_levis(G):
            comps = [c for c in center_components(G, M) if c.rp]
            if not comps:
                continue
            items = []
            for c in comps:
                for a in orbit_assignments(M.factors):
                    items.append((c, tuple(sorted(a, key=_assign_sort))))
            pos = {(c.key, a): k for k, (c, a) in enumerate(items)}
            uf = _UF(len(items))
            for h in stabilizer_generators(G, M):
                for k, (c, a) in enumerate(items):
                    key2 = E.key(M.subsystem, E.act(h, c.point))
                    a2 = transport_orbit(h, a)
                    uf.union(k, pos[(key2, a2)])
            reps = {}
            for k, (c, a) in enumerate(items):
                reps.setdefault(uf.find(k), (c, a))
            local = {}
            for r, (c, a) in sorted(reps.items()):
                d = DecompositionDatum(len(data), M, c, a)
                local[r] = d
                data.append(d)
            for k, (c, a) in enumerate(items):
                lookup[(M.index, c.key, a)] = local[uf.find(k)]
        E._data = (data, lookup)
        return list(data)


def canonical_datum(G: GroupSpec, idx, point, assignment):
    """The enumerated datum conjugate to (subsystem idx, component of point, class)."""
    E = engine(G)
    enumerate_decomposition_data(G)
    M, g = classify(G, idx)
    ginv = _signed_inverse(g)
    x = E.act(ginv, point)
    key = E.key(M.subsystem, x)
    a = transport_orbit(ginv, assignment)
    hit = E._data[1].get((M.index, key, a))
    if hit is None:
        raise InconsistentEmbedding("no (RP) datum for this locus")
    return hit


def center_translate(G: GroupSpec, d: DecompositionDatum, z):
    """The datum translated by a central element z."""
    x = tuple(Fraction(a) + Fraction(b) for a, b in zip(d.component.point, z))
    return canonical_datum(G, d.pseudo_levi.subsystem, x, d.orbit)


# ---------------------------------------------------------------------------
# induction between nested subsystems


def levi_shapes_between(G: GroupSpec, big, small, assignment):
    """For each nonabelian factor F of the big subsystem, the LeviShape of
    (small inside F, class of small inside F)."""
    big_f = factors_of(G, big)
    orbit_of = dict(assignment)
    small_f = factors_of(G, small)
    out = []
    for F in big_f:
        if not F.nonabelian:
            continue
        cs = set(F.coords)
        inside = [f for f in small_f if set(f.coords) <= cs]
        if sum(f.size for f in inside) != F.size:
            raise InconsistentEmbedding(f"{factors_label(small_f)} is not inside {F.label()}")
        blocks = []
        classical = None
        minus = 0
        for f in inside:
            o = orbit_of.get(f)
            if f.kind == "A":
                blocks.append((f.size, o.partition if o is not None else (1,) * f.size))
                minus += sum(1 for s in f.signs if s < 0)
            else:
                if f.kind != F.kind or classical is not None:
                    raise InconsistentEmbedding(f"{f.label()} is not a Levi factor of {F.label()}")
                classical = o
        if F.kind == "A":
            shape = make_shape("A", F.size - 1, blocks)
        else:
            dcl = "II" if minus % 2 else "I"
            shape = make_shape(F.kind, F.size, blocks, classical, dcl)
        out.append((F, shape))
    return out


def induce_between(G: GroupSpec, big, small, assignment):
    """Ind from the small subsystem's subgroup to the big one, per factor."""
    out = []
    for F, shape in levi_shapes_between(G, big, small, assignment):
        out.append((F, induce_shape(shape)))
    return tuple(sorted(out, key=_assign_sort))


def assignment_dim(assignment):
    return sum(orbit_dim(o.kind, o.rank, o) for _, o in assignment)


@dataclass(frozen=True)
class ClassSkeleton:
    point: tuple
    subsystem: frozenset
    orbit: tuple
    generic: bool = False

    @property
    def factors(self):
        return tuple(f for f, _ in self.orbit)

    def describe(self, G=None):
        fs = factors_of(G, self.subsystem) if G is not None else self.factors
        pt = ",".join(_frac(x) for x in self.point)
        return f"s=({pt}) C={factors_label(fs)} u={describe_assignment(self.orbit)}"


def class_dim(G: GroupSpec, skel: ClassSkeleton):
    """dim of the conjugacy class of s u."""
    return G.dim - (G.rank + len(skel.subsystem)) + assignment_dim(skel.orbit)


def jordan_dim(G: GroupSpec, d: DecompositionDatum):
    M = d.pseudo_levi
    return G.dim - (G.rank + len(M.subsystem)) + assignment_dim(d.orbit) + (G.rank - M.rank)


def in_component(G: GroupSpec, d: DecompositionDatum, z):
    E = engine(G)
    idx = d.pseudo_levi.subsystem
    if any(Fraction(E.value(b, z)).denominator != 1 for b in idx):
        return False
    return E.key(idx, z) == d.component.key


def induce_class(G: GroupSpec, d: DecompositionDatum, z=None) -> ClassSkeleton:
    """Skeleton of z . Ind_M^{C_G(z)} O^M for z in the datum's component
    (the certified generic point when z is None)."""
    E = engine(G)
    if z is None:
        z = d.component.generic
    z = tuple(Fraction(x) for x in z)
    if not in_component(G, d, z):
        raise PointOutsideComponent("point is not in the datum's centre component")
    cz = E.centralizer(z)
    orbit = induce_between(G, cz, d.pseudo_levi.subsystem, d.orbit)
    return ClassSkeleton(z, cz, orbit, cz == d.pseudo_levi.subsystem)


# ---------------------------------------------------------------------------
# the poset of centre components above a datum


@dataclass
class PosetNode:
    subsystem: frozenset
    point: tuple
    key: tuple
    isolated: bool
    label: str = ""
    verdict: object = None        # filled in by sheets.mark_birationality
    induced: tuple = ()


@dataclass
class ComponentPoset:
    group: GroupSpec
    datum: DecompositionDatum
    nodes: list
    covers: list              # (upper, lower): lower is a codim-one subtorus of upper
    below: list = None        # below[i] = bitmask of nodes contained in node i (strictly)
    violations: list = field(default_factory=list)

    def leq(self, i, j):
        """Node i contained in node j."""
        return i == j or bool(self.below[j] >> i & 1)

    def __len__(self):
        return len(self.nodes)


def _primitive(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        return v
    if next(x for x in v if x) < 0:
        g = -g
    return tuple(x // g for x in v)


def _sub_flats(E: _Engine, idx, c):
    """Codimension-one subtori of the component through c, one per root and
    residue: the loci <alpha, x> = k inside c + V."""
    base, lat = E.lattice(idx)
    if len(base) == E.n:
        return []
    n = E.n
    rs = E.rs
    coeffs = rs.coeffs
    direction = [tuple(int(x) for x in v) for v in _integral_basis(E.direction(idx))]
    # lattice V cap coroots: left kernel of <beta_j, alpha_i^v>
    if lat is None:
        lam = [tuple(row) for row in E.cartan]
    else:
        lam = [tuple(sum(m[i] * E.cartan[i][j] for i in range(n)) for j in range(n))
               for m in lat.left_kernel()]
    Dc = 1
    for ci in c:
        Dc = Dc * Fraction(ci).denominator // gcd(Dc, Fraction(ci).denominator)
    C = [int(Fraction(ci) * Dc) for ci in c]
    out = []
    seen = set()
    for a in rs.positive():
        k = coeffs[a]
        vals = [_dot(k, v) for v in direction]
        if not any(vals):
            continue
        g = 0
        for v in lam:
            g = gcd(g, _dot(k, v))
        p = next(i for i, x in enumerate(vals) if x)
        b, pb = direction[p], vals[p]
        new_dir = [_primitive(tuple(pb * y - x * z for y, z in zip(v, b)))
                   for v, x in zip(direction, vals) if v is not b]
        span = E.span_of(new_dir)
        kC = _dot(k, C)
        for r in range(g):
            # x = c + (r - <alpha, c>) / <alpha, b> * b, kept as X / D
            X = [ci * pb + (r * Dc - kC) * bi for ci, bi in zip(C, b)]
            D = pb * Dc
            sub = frozenset(i for i in span if _dot(coeffs[i], X) % D == 0)
            key = E.key_scaled(sub, X, D)
            if (sub, key) not in seen:
                seen.add((sub, key))
                out.append((sub, key, tuple(Fraction(xi, D) for xi in X)))
    return out


def component_poset(G: GroupSpec, d: DecompositionDatum, limit=None) -> ComponentPoset:
    """Centre components Z(M_i)^o s_i inside the datum's component, ordered
    by inclusion.  Node 0 is the datum's own component."""
    E = engine(G)
    idx = d.pseudo_levi.subsystem
    root = (idx, d.component.key)
    nodes = [PosetNode(idx, d.component.point, d.component.key, d.pseudo_levi.rank == G.rank)]
    where = {root: 0}
    covers = []
    k = 0
    while k < len(nodes):
        nd = nodes[k]
        for sub, key, x in _sub_flats(E, nd.subsystem, nd.point):
            j = where.get((sub, key))
            if j is None:
                j = len(nodes)
                where[(sub, key)] = j
                base, _ = E.lattice(sub)
                nodes.append(PosetNode(sub, x, key, len(base) == G.rank))
                if limit is not None and len(nodes) > limit:
                    from .errors import CapExceeded
                    raise CapExceeded(f"component poset exceeds {limit} nodes")
            covers.append((k, j))
        k += 1
    for nd in nodes:
        nd.label = factors_label(factors_of(G, nd.subsystem))
    below = [0] * len(nodes)
    # nodes were discovered in order of increasing codimension; close downwards
    children = defaultdict(set)
    for u, l in covers:
        children[u].add(l)
    for i in sorted(range(len(nodes)), key=lambda i: -len(E.lattice(nodes[i].subsystem)[0])):
        m = 0
        for c in children[i]:
            m |= (1 << c) | below[c]
        below[i] = m
    covers = sorted(set(covers))
    return ComponentPoset(G, d, nodes, covers, below)


def geometric_leq(G: GroupSpec, P: ComponentPoset, i, j):
    """Independent inclusion test of node i in node j: direction of i inside
    direction of j, and the point of i on the coset of j."""
    E = engine(G)
    ni, nj = P.nodes[i], P.nodes[j]
    dir_i = E.direction(ni.subsystem)
    base_j, _ = E.lattice(nj.subsystem)
    if not all(_dot(E.rs.coeffs[b], v) == 0 for b in base_j for v in dir_i):
        return False
    Sj = ShiftedSubtorus(tuple(E.direction(nj.subsystem)), nj.point, E.cartan)
    Si = ShiftedSubtorus(tuple(E.direction(nj.subsystem)), ni.point, E.cartan)
    return Sj == Si


def e_point(G: GroupSpec, x):
    """Coweight coordinates of the torus point with orthogonal coordinates x
    (t_i = exp(2 pi i x_i))."""
    rs = engine(G).rs
    return tuple(Fraction(_dot(a, [Fraction(v) for v in x])) for a in rs.simple_roots)


def subsystem_from_roots(G: GroupSpec, roots):
    from .rootsys import closure_indices
    rs = engine(G).rs
    return closure_indices(rs, [rs.index(tuple(r)) for r in roots])
