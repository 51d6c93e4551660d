"""Three-valued birationality verdicts for Lusztig-Spaltenstein induction.

decide_birational_induction runs a layered decider, first hit wins:

  1. type A ambient                          -> Birational
  2. trivial component group of the result   -> Birational
  3. comparison of birational data: replace (L, O^L) by the datum of O^L
     inside L and compare with the datum of the induced class; uniqueness
     of that datum plus transitivity make the comparison decisive
  4. fixture table
  5. Unknown

The datum search (birational_datum_of) only uses the non-circular layers
(2 and 4) on its candidates, so layer 3 never feeds on itself.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from itertools import product

from .errors import InconsistentEmbedding, InvalidInstance, UniquenessViolation
from .orbits import (
    ClassicalOrbit, LeviOrbit, LeviShape, Partition, _same_class,
    component_group_order, dual_partition, induce_shape, is_very_even,
    levi_shapes, make_orbit, make_shape, orbits_of, partitions_of,
    trivial_orbit, validate_orbit,
)
from .rootsys import check_type

BIRATIONAL = "Birational"
NOT_BIRATIONAL = "NotBirational"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    value: str
    provenance: str = "none"

    def __post_init__(self):
        if self.value not in (BIRATIONAL, NOT_BIRATIONAL, UNKNOWN):
            raise ValueError(self.value)
        if self.value == UNKNOWN and self.provenance != "none":
            object.__setattr__(self, "provenance", "none")
        if self.value != UNKNOWN and self.provenance == "none":
            raise ValueError("definite verdicts need a provenance")

    @property
    def definite(self):
        return self.value != UNKNOWN

    def to_json(self):
        return {"verdict": self.value, "provenance": self.provenance}


UNDECIDED = Verdict(UNKNOWN)


# ---------------------------------------------------------------------------
# standard Levis given by subsets of simple roots


@dataclass(frozen=True)
class StdLevi:
    """Standard Levi of X_r cut out by a set of simple-root indices (1-based).

    blocks: coordinate blocks (start, size) of the GL factors, in order.
    m: rank of the classical factor on the last m coordinates.
    """
    kind: str
    rank: int
    theta: frozenset
    blocks: tuple
    m: int
    d_class: str | None

    def gl_sizes(self):
        return tuple(s for _, s in self.blocks)

    def shape(self, gl_orbits=None, classical=None):
        """LeviShape with the given partitions on the GL blocks (trivial by default)."""
        if gl_orbits is None:
            gl_orbits = [Partition((1,) * s) for s in self.gl_sizes()]
        if self.m and classical is None:
            classical = trivial_orbit(self.kind, self.m)
        return make_shape(self.kind, self.rank, list(zip(self.gl_sizes(), gl_orbits)),
                          classical if self.m else None, self.d_class)

    def orbit_assignments(self):
        gl = [tuple(partitions_of(s)) for s in self.gl_sizes()]
        cl = orbits_of(self.kind, self.m) if self.m else (None,)
        for fs in product(*gl):
            for c in cl:
                yield fs, c


def std_levi(kind, rank, theta) -> StdLevi:
    theta = frozenset(int(t) for t in theta)
    if any(t < 1 or t > rank for t in theta):
        raise InvalidInstance(f"simple root indices must lie in 1..{rank}")
    if kind == "A":
        ncoord = rank + 1
        links = {i for i in range(1, rank + 1) if i in theta}  # alpha_i joins i, i+1
        m = 0
        tail = ncoord
    else:
        ncoord = rank
        m = 0
        if kind in "BC" and rank in theta:
            m = 1
            i = rank - 1
            while i >= 1 and i in theta:
                m += 1
                i -= 1
        elif kind == "D" and rank in theta and rank - 1 in theta:
            m = 2
            i = rank - 2
            while i >= 1 and i in theta:
                m += 1
                i -= 1
        tail = rank - m
        links = {i for i in range(1, tail) if i in theta}
        if kind == "D" and m == 0 and rank in theta:
            links.add(rank - 1)  # alpha_r = e_(r-1) + e_r also joins r-1, r
    blocks = []
    start = 1
    for c in range(1, tail + 1):
        if c == tail or c not in links:
            blocks.append((start, c - start + 1))
            start = c + 1
    d_class = None
    if kind == "D" and m == 0 and blocks and all(s % 2 == 0 for _, s in blocks):
        d_class = "II" if rank in theta else "I"
    return StdLevi(kind, rank, theta, tuple(blocks), m, d_class)


def standard_levis(kind, rank):
    from itertools import combinations
    out = []
    for k in range(rank + 1):
        for th in combinations(range(1, rank + 1), k):
            out.append(std_levi(kind, rank, th))
    return out


# ---------------------------------------------------------------------------
# instances and data


@dataclass(frozen=True)
class InductionInstance:
    ambient: tuple
    levi: frozenset
    levi_orbit: LeviOrbit

    def std(self):
        return std_levi(self.ambient[0], self.ambient[1], self.levi)

    def shape(self) -> LeviShape:
        kind, rank = self.ambient
        sl = self.std()
        gl = []
        classical = None
        for (k, r), o in self.levi_orbit.factors:
            if k == "A":
                gl.append((r + 1, o.partition))
            elif k == kind and r == sl.m:
                classical = o
            else:
                raise InvalidInstance(f"factor {k}{r} is not a factor of the Levi")
        sizes = sorted(sl.gl_sizes(), reverse=True)
        nontriv = sorted((a for a, _ in gl), reverse=True)
        pool = list(sizes)
        for a in nontriv:
            if a not in pool:
                raise InvalidInstance(f"the Levi has no GL{a} factor")
            pool.remove(a)
        if any(a > 1 for a in pool):
            raise InvalidInstance("every nonabelian Levi factor needs an orbit")
        gl += [(1, Partition((1,)))] * len(pool)
        if sl.m and classical is None:
            raise InvalidInstance(f"missing orbit for the {kind}{sl.m} factor")
        try:
            return make_shape(kind, rank, gl, classical if sl.m else None, sl.d_class)
        except InconsistentEmbedding as exc:
            raise InvalidInstance(str(exc)) from exc


def instance_from_shape(shape: LeviShape, theta) -> InductionInstance:
    return InductionInstance((shape.kind, shape.rank), frozenset(theta), shape.to_levi_orbit())


@dataclass(frozen=True)
class BirationalDatum:
    levi: LeviShape          # trivial on GL blocks, birationally rigid class on X_m
    induced: ClassicalOrbit
    provenance: str

    @property
    def orbit(self):
        return self.levi.to_levi_orbit()

    def is_identity(self):
        return not self.levi.is_proper()

    def to_json(self):
        return {"levi_blocks": list(self.levi.block_sizes()), "m": self.levi.m,
                "d_class": self.levi.d_class,
                "orbit": self.levi.classical.to_json() if self.levi.classical else None,
                "induced": self.induced.to_json(), "provenance": self.provenance}


UNKNOWN_DATUM = None


# ---------------------------------------------------------------------------
# fixtures and curated tables


def parse_orbit_descriptor(text, sl: StdLevi):
    """Parse "trivial" or factors like "A1[2]xC1[1,1]" against a standard Levi.

    Factors not mentioned carry the trivial class.
    """
    text = text.strip()
    gl = {}
    classical = None
    if text and text != "trivial":
        for tok in text.split("x"):
            tok = tok.strip()
            if "[" not in tok or not tok.endswith(("]", "]I", "]II")):
                raise InvalidInstance(f"cannot parse orbit factor {tok!r}")
            head, rest = tok.split("[", 1)
            body, label = rest.split("]", 1)
            parts = [int(x) for x in body.split(",") if x.strip()]
            k, r = head[0], int(head[1:])
            if k == "A":
                gl.setdefault(r + 1, []).append(Partition.of(parts))
            elif k == sl.kind and r == sl.m:
                if not validate_orbit(k, parts, r):
                    raise InvalidInstance(f"{tok} is not a class of {k}{r}")
                classical = make_orbit(k, parts, label or None)
            else:
                raise InvalidInstance(f"{k}{r} is not a factor of this Levi")
    assigned = []
    for s in sl.gl_sizes():
        if gl.get(s):
            assigned.append(gl[s].pop(0))
        else:
            assigned.append(Partition((1,) * s))
    if any(v for v in gl.values()):
        raise InvalidInstance("more GL factors given than the Levi has")
    if sl.m and classical is None:
        classical = trivial_orbit(sl.kind, sl.m)
    return sl.shape(assigned, classical)


def _parse_group(text):
    text = text.strip().upper()
    return text[0], int(text[1:])


def load_fixture_doc(doc):
    table = {}
    for entry in doc["fixtures"]:
        kind, rank = _parse_group(entry["ambient"])
        sl = std_levi(kind, rank, entry["levi"])
        shape = parse_orbit_descriptor(entry["orbit"], sl)
        v = entry["verdict"]
        if v not in (BIRATIONAL, NOT_BIRATIONAL):
            raise ValueError(f"fixture verdict must be definite, got {v}")
        prev = table.get(shape)
        if prev is not None and prev[0] != v:
            raise ValueError(f"conflicting fixtures for {shape}")
        table[shape] = (v, entry["id"], entry["source"])
    return table


def _data_json(name):
    with resources.files("birsheets.data").joinpath(name).open() as fh:
        return json.load(fh)


def default_fixture_doc():
    return _data_json("fixtures.json")


def load_rigid_table():
    table = {}
    for entry in _data_json("rigid_table.json")["entries"]:
        kind, rank = _parse_group(entry["ambient"])
        orb = make_orbit(kind, entry["partition"], entry.get("very_even"))
        table[(kind, rank, orb)] = (entry["birationally_rigid"], entry["source"])
    return table


# ---------------------------------------------------------------------------
# the decider


class Decider:
    """Verdict engine bound to one fixture table; results are memoized."""

    def __init__(self, fixture_doc=None, use_rigid_table=True):
        self.fixture_doc = fixture_doc if fixture_doc is not None else default_fixture_doc()
        self.fixtures = load_fixture_doc(self.fixture_doc)
        self.rigid_table = load_rigid_table() if use_rigid_table else {}
        self._datum_cache = {}
        self._rigid_cache = {}
        self._decide_cache = {}

    # -- non-circular layers -------------------------------------------------
    def _cheap(self, shape: LeviShape, induced: ClassicalOrbit):
        if shape.kind == "A":
            return Verdict(BIRATIONAL, "type-A")
        if shape.kind == "D" and shape.rank <= 3:
            return Verdict(BIRATIONAL, "type-A[D2=A1xA1,D3=A3]")
        if not shape.is_proper():
            return Verdict(BIRATIONAL, "identity")
        if component_group_order(shape.kind, shape.rank, induced) == 1:
            return Verdict(BIRATIONAL, "trivial-component-group")
        return None

    def _fixture(self, shape):
        hit = self.fixtures.get(shape)
        if hit is None:
            return None
        return Verdict(hit[0], f"fixture:{hit[1]}")

    # -- birational data -------------------------------------------------------
    def birational_datum_of(self, kind, rank, orbit):
        if not isinstance(orbit, ClassicalOrbit):
            orbit = make_orbit(kind, orbit)
        key = (kind, rank, orbit)
        if key in self._datum_cache:
            return self._datum_cache[key]
        res = self._datum_search(kind, rank, orbit)
        self._datum_cache[key] = res
        return res

    def _datum_search(self, kind, rank, orbit):
        if kind == "A":
            blocks = [(b, Partition((1,) * b)) for b in dual_partition(orbit.partition).parts]
            return BirationalDatum(make_shape("A", rank, blocks), orbit, "type-A")
        found = []
        open_ = []
        for sh in levi_shapes(kind, rank):
            if not sh.is_trivial_on_blocks():
                continue
            if sh.classical is not None and not sh.classical.is_trivial():
                r = self.is_birationally_rigid(kind, sh.m, sh.classical)
                if r == "no":
                    continue
            else:
                r = "yes"
            induced = induce_shape(sh)
            if not _same_class(induced, orbit):
                continue
            if is_very_even(kind, orbit.partition) and induced.label_ambiguous:
                return UNKNOWN_DATUM
            v = self._cheap(sh, orbit) or self._fixture(sh) or UNDECIDED
            if v.value == BIRATIONAL and r == "yes":
                found.append((sh, v))
            elif v.value == BIRATIONAL or r == "unknown" or v.value == UNKNOWN:
                open_.append((sh, v, r))
        if len(found) > 1:
            raise UniquenessViolation(
                f"{kind}{rank} {orbit}: several birational data {[str(s) for s, _ in found]}")
        if found:
            sh, v = found[0]
            return BirationalDatum(sh, orbit, f"unique-birational-candidate[{v.provenance}]")
        if open_:
            return UNKNOWN_DATUM
        full = make_shape(kind, rank, [], orbit)
        return BirationalDatum(full, orbit, "no-birational-candidate")

    def is_birationally_rigid(self, kind, rank, orbit):
        if not isinstance(orbit, ClassicalOrbit):
            orbit = make_orbit(kind, orbit)
        key = (kind, rank, orbit)
        if key in self._rigid_cache:
            return self._rigid_cache[key]
        if kind == "A" or (kind == "D" and rank <= 3):
            res = "yes" if orbit.is_trivial() else "no"
        elif orbit.is_trivial():
            res = "yes"
        else:
            d = self.birational_datum_of(kind, rank, orbit)
            if d is UNKNOWN_DATUM:
                res = "unknown"
            else:
                res = "yes" if d.is_identity() else "no"
            tab = self.rigid_table.get(key)
            if tab is not None:
                tv = "yes" if tab[0] else "no"
                if res == "unknown":
                    res = tv
                elif res != tv:
                    raise UniquenessViolation(
                        f"rigid table disagrees with the exhaustive search on {kind}{rank} {orbit}")
        self._rigid_cache[key] = res
        return res

    def datum_of_shape(self, shape: LeviShape):
        """Birational datum of the Levi class itself, read as a Levi of the ambient."""
        blocks = []
        for a, f in shape.blocks:
            blocks += [(b, Partition((1,) * b)) for b in dual_partition(f).parts]
        if shape.kind == "A":
            return make_shape("A", shape.rank, blocks), "type-A"
        if shape.classical is None:
            return make_shape(shape.kind, shape.rank, blocks, None, shape.d_class), "type-A"
        inner = self.birational_datum_of(shape.kind, shape.m, shape.classical)
        if inner is UNKNOWN_DATUM:
            return None, None
        blocks += list(inner.levi.blocks)
        d_class = inner.levi.d_class or shape.d_class
        return (make_shape(shape.kind, shape.rank, blocks, inner.levi.classical, d_class),
                inner.provenance)

    # -- the layered decider ---------------------------------------------------
    def decide_shape(self, shape: LeviShape) -> Verdict:
        if shape in self._decide_cache:
            return self._decide_cache[shape]
        induced = induce_shape(shape)
        v = self._cheap(shape, induced)
        if v is None:
            v = self._by_datum(shape, induced)
        if v is None:
            v = self._fixture(shape)
        if v is None:
            v = UNDECIDED
        self._decide_cache[shape] = v
        return v

    def _by_datum(self, shape, induced):
        if induced.label_ambiguous:
            return None
        mine, prov = self.datum_of_shape(shape)
        if mine is None:
            return None
        target = self.birational_datum_of(shape.kind, shape.rank, induced)
        if target is UNKNOWN_DATUM:
            return None
        if mine.kind == "D" and (mine.d_class or target.levi.d_class):
            if mine.d_class != target.levi.d_class:
                return None
        same = (mine.blocks == target.levi.blocks and mine.m == target.levi.m
                and mine.classical == target.levi.classical)
        tag = f"datum-comparison[{target.provenance}]"
        return Verdict(BIRATIONAL if same else NOT_BIRATIONAL, tag)

    def decide(self, inst: InductionInstance) -> Verdict:
        try:
            shape = inst.shape()
        except InconsistentEmbedding as exc:
            raise InvalidInstance(str(exc)) from exc
        return self.decide_shape(shape)


_default = None


def default_decider() -> Decider:
    global _default
    if _default is None:
        _default = Decider()
    return _default


def decide_birational_induction(inst: InductionInstance, decider=None) -> Verdict:
    check_type(*inst.ambient)
    return (decider or default_decider()).decide(inst)


def birational_datum_of(kind, rank, orbit, decider=None):
    check_type(kind, rank)
    return (decider or default_decider()).birational_datum_of(kind, rank, orbit)


def is_birationally_rigid(kind, rank, orbit, decider=None):
    return (decider or default_decider()).is_birationally_rigid(kind, rank, orbit)


def decide_shape(shape, decider=None):
    return (decider or default_decider()).decide_shape(shape)


# ---------------------------------------------------------------------------
# transitivity


@dataclass
class TransitivityReport:
    checked: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)
    induction_failures: list = field(default_factory=list)

    @property
    def consistent(self):
        return not self.failures and not self.induction_failures


def split_levi(outer: StdLevi, inner: StdLevi, gl_orbits, classical):
    """Express the inner Levi class inside each factor of the outer Levi.

    Returns (list of (outer GL block size, list of inner partitions)) and the
    inner shape inside the outer classical factor (or None).
    """
    inner_blocks = list(zip(inner.blocks, gl_orbits))
    gl_parts = []
    for start, size in outer.blocks:
        inside = [f for (s, z), f in inner_blocks if s >= start and s + z <= start + size]
        if sum(f.size for f in inside) != size:
            raise InconsistentEmbedding("inner Levi does not refine the outer one")
        gl_parts.append((size, inside))
    cl_shape = None
    if outer.m:
        off = outer.rank - outer.m
        sub = std_levi(outer.kind, outer.m, {t - off for t in inner.theta if t > off})
        inside = [f for (s, z), f in inner_blocks if s > off]
        cl_shape = sub.shape(inside, classical if inner.m else None)
    return gl_parts, cl_shape


def verify_transitivity(kind, rank, inner_theta, outer_theta, gl_orbits=None, classical=None,
                        decider=None, report=None):
    """Check plain composition and the birational biconditional for L <= M <= G."""
    decider = decider or default_decider()
    report = report or TransitivityReport()
    L = std_levi(kind, rank, inner_theta)
    M = std_levi(kind, rank, outer_theta)
    if not L.theta <= M.theta:
        raise InconsistentEmbedding("inner Levi is not contained in the outer one")
    if gl_orbits is None:
        gl_orbits = [Partition((1,) * s) for s in L.gl_sizes()]
    shape_LG = L.shape(gl_orbits, classical)
    gl_parts, cl_shape = split_levi(M, L, gl_orbits, classical)
    # induce L -> M factor by factor
    m_gl = []
    for size, parts in gl_parts:
        tot = []
        for f in parts:
            n = max(len(tot), len(f.parts))
            tot = [(tot[i] if i < len(tot) else 0) + (f.parts[i] if i < len(f.parts) else 0)
                   for i in range(n)]
        m_gl.append(Partition.of(tot))
    m_cl = induce_shape(cl_shape) if cl_shape is not None else None
    if m_cl is not None and m_cl.label_ambiguous:
        report.skipped += 1
        return report
    shape_MG = M.shape(m_gl, m_cl)
    direct = induce_shape(shape_LG)
    composed = induce_shape(shape_MG)
    if not _same_class(direct, composed):
        report.induction_failures.append((str(shape_LG), str(shape_MG), str(direct), str(composed)))
    v_LG = decider.decide_shape(shape_LG)
    v_MG = decider.decide_shape(shape_MG)
    if cl_shape is not None:
        v_LM = decider.decide_shape(cl_shape)
    else:
        v_LM = Verdict(BIRATIONAL, "type-A")
    vals = (v_LG, v_LM, v_MG)
    lg = v_LG.value == BIRATIONAL
    if v_LG.definite and v_LM.definite and v_MG.definite:
        report.checked += 1
        if lg != (v_LM.value == BIRATIONAL and v_MG.value == BIRATIONAL):
            report.failures.append((str(shape_LG), str(shape_MG), [v.value for v in vals]))
    elif (v_LG.value == BIRATIONAL and (v_LM.value == NOT_BIRATIONAL or v_MG.value == NOT_BIRATIONAL)) \
            or (v_LG.value == NOT_BIRATIONAL and v_LM.value == BIRATIONAL and v_MG.value == BIRATIONAL):
        report.checked += 1
        report.failures.append((str(shape_LG), str(shape_MG), [v.value for v in vals]))
    else:
        report.skipped += 1
    return report


def all_chains(kind, rank):
    """Every nested pair of standard Levis with every class on the inner one."""
    levis = standard_levis(kind, rank)
    for L in levis:
        for M in levis:
            if not L.theta <= M.theta:
                continue
            for fs, c in L.orbit_assignments():
                yield L.theta, M.theta, list(fs), c
