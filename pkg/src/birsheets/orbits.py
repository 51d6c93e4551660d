"""Partition calculus for nilpotent (equivalently unipotent) classes.

A class of a classical simple factor is a partition of the natural
representation's dimension, subject to the usual parity rules; in type D
an all-even partition carries a label I or II.  Induction is the
block-sum-then-collapse algorithm and every induced instance can be
certified by the codimension identity codim_G(Ind) = codim_L(O^L).
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import InconsistentEmbedding, InvalidOrbit, NoValidPartition


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple

    def __post_init__(self):
        p = tuple(int(x) for x in self.parts)
        if any(x <= 0 for x in p):
            raise ValueError(f"parts must be positive: {p}")
        if any(p[i] < p[i + 1] for i in range(len(p) - 1)):
            raise ValueError(f"parts must be weakly decreasing: {p}")
        object.__setattr__(self, "parts", p)

    @classmethod
    def of(cls, parts):
        return cls(tuple(sorted((int(x) for x in parts if x), reverse=True)))

    @property
    def size(self):
        return sum(self.parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def multiplicities(self):
        return Counter(self.parts)

    def dual(self):
        return dual_partition(self)

    def dominates(self, other):
        a, b = 0, 0
        for i in range(max(len(self), len(other))):
            a += self.parts[i] if i < len(self) else 0
            b += other.parts[i] if i < len(other) else 0
            if a < b:
                return False
        return True

    def __str__(self):
        return "[" + ",".join(str(x) for x in self.parts) + "]"


def dual_partition(p) -> Partition:
    parts = p.parts if isinstance(p, Partition) else tuple(p)
    if not parts:
        return Partition(())
    return Partition(tuple(sum(1 for x in parts if x > i) for i in range(parts[0])))


def partitions_of(n, max_part=None):
    """All partitions of n, in reverse lexicographic order."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield Partition(())
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions_of(n - first, first):
            yield Partition((first,) + rest.parts)


def natural_size(kind, rank):
    if kind == "A":
        return rank + 1
    if kind == "B":
        return 2 * rank + 1
    return 2 * rank


def group_dim(kind, rank):
    if kind == "A":
        return (rank + 1) ** 2 - 1
    if kind in "BC":
        return rank * (2 * rank + 1)
    return rank * (2 * rank - 1)


def _bad_parts(kind, parts):
    mult = Counter(parts)
    if kind == "C":
        return sorted((x for x, m in mult.items() if x % 2 == 1 and m % 2 == 1), reverse=True)
    if kind in "BD":
        return sorted((x for x, m in mult.items() if x % 2 == 0 and m % 2 == 1), reverse=True)
    return []


def _size_ok(kind, size):
    if kind == "B":
        return size % 2 == 1
    if kind in "CD":
        return size % 2 == 0
    return True


def validate_orbit(kind, partition, rank=None) -> bool:
    p = partition if isinstance(partition, Partition) else Partition.of(partition)
    if rank is not None and p.size != natural_size(kind, rank):
        return False
    if not _size_ok(kind, p.size):
        return False
    return not _bad_parts(kind, p.parts)


def is_very_even(kind, partition):
    p = partition if isinstance(partition, Partition) else Partition.of(partition)
    return kind == "D" and p.size > 0 and all(x % 2 == 0 for x in p.parts)


@dataclass(frozen=True, order=True)
class ClassicalOrbit:
    kind: str
    partition: Partition
    very_even_label: str | None = None
    label_ambiguous: bool = False

    def __post_init__(self):
        if not isinstance(self.partition, Partition):
            object.__setattr__(self, "partition", Partition.of(self.partition))
        ve = is_very_even(self.kind, self.partition)
        if ve and self.very_even_label not in ("I", "II"):
            raise InvalidOrbit(f"very even partition {self.partition} needs a label")
        if not ve and self.very_even_label is not None:
            raise InvalidOrbit(f"label only allowed on very even partitions: {self.partition}")

    @property
    def rank(self):
        n = self.partition.size
        if self.kind == "A":
            return n - 1
        return n // 2

    def is_trivial(self):
        return all(x == 1 for x in self.partition.parts)

    def to_json(self):
        out = {"kind": self.kind, "partition": list(self.partition.parts),
               "very_even": self.very_even_label}
        if self.label_ambiguous:
            out["label_ambiguous"] = True
        return out

    def __str__(self):
        s = str(self.partition)
        if self.very_even_label:
            s += self.very_even_label + ("?" if self.label_ambiguous else "")
        return s


def make_orbit(kind, parts, label=None):
    p = parts if isinstance(parts, Partition) else Partition.of(parts)
    if is_very_even(kind, p) and label is None:
        label = "I"
    return ClassicalOrbit(kind, p, label)


def trivial_orbit(kind, rank):
    return make_orbit(kind, [1] * natural_size(kind, rank))


def regular_orbit(kind, rank):
    n = natural_size(kind, rank)
    if kind == "D":
        return make_orbit(kind, [n - 1, 1])
    return make_orbit(kind, [n])


@lru_cache(maxsize=None)
def orbits_of(kind, rank):
    """All classes of the factor, very even ones listed with both labels."""
    out = []
    for p in partitions_of(natural_size(kind, rank)):
        if not validate_orbit(kind, p):
            continue
        if is_very_even(kind, p):
            out.append(ClassicalOrbit(kind, p, "I"))
            out.append(ClassicalOrbit(kind, p, "II"))
        else:
            out.append(ClassicalOrbit(kind, p))
    return tuple(out)


def _check(kind, rank, orbit):
    if orbit.kind != kind or orbit.partition.size != natural_size(kind, rank) \
            or not validate_orbit(kind, orbit.partition):
        raise InvalidOrbit(f"{orbit} is not a class of {kind}{rank}")


def orbit_dim(kind, rank, orbit) -> int:
    """Dimension of the adjoint orbit, from the dual-partition formula."""
    if not isinstance(orbit, ClassicalOrbit):
        orbit = make_orbit(kind, orbit)
    _check(kind, rank, orbit)
    p = orbit.partition
    sq = sum(x * x for x in dual_partition(p).parts)
    if kind == "A":
        return natural_size(kind, rank) ** 2 - sq
    odd = sum(1 for x in p.parts if x % 2)
    if kind == "C":
        return group_dim(kind, rank) - (sq + odd) // 2
    return group_dim(kind, rank) - (sq - odd) // 2


def collapse(kind, p) -> ClassicalOrbit:
    """Largest partition of the given kind dominated by p."""
    parts = list(p.parts if isinstance(p, Partition) else Partition.of(p).parts)
    if not _size_ok(kind, sum(parts)):
        raise NoValidPartition(f"no {kind}-partition of size {sum(parts)}")
    while True:
        bad = _bad_parts(kind, parts)
        if not bad:
            break
        q = bad[0]
        i = max(k for k, x in enumerate(parts) if x == q)
        parts[i] -= 1
        parts.append(0)
        j = next(k for k in range(i + 1, len(parts)) if parts[k] < q - 1)
        parts[j] += 1
        parts = [x for x in parts if x]
    return make_orbit(kind, parts)


def springer_transfer(orbit):
    """Unipotent and nilpotent classes share the partition encoding."""
    return orbit


# ---------------------------------------------------------------------------
# Levi subgroups of a classical simple factor


@dataclass(frozen=True, order=True)
class LeviOrbit:
    """Class of a Levi subgroup: one orbit per nonabelian factor.

    factors holds ((kind, rank), ClassicalOrbit) pairs; GL_a blocks appear
    as A_(a-1) factors and GL_1 blocks only through torus_rank.
    """
    factors: tuple
    torus_rank: int

    def to_json(self):
        return {"factors": [{"type": f"{k}{r}", "orbit": o.to_json()}
                            for (k, r), o in self.factors],
                "torus_rank": self.torus_rank}


@dataclass(frozen=True, order=True)
class LeviShape:
    """A standard Levi GL_a1 x ... x GL_ak x X_m of X_r with a class on it.

    blocks: sorted (a, partition of a) pairs, GL_1 blocks included.
    classical: the class on X_m (None when m = 0).
    d_class: for type D with m = 0 and all blocks even, which of the two
    non-conjugate Levi classes is meant ("I" if alpha_(r-1) is used).
    """
    kind: str
    rank: int
    blocks: tuple
    m: int
    classical: ClassicalOrbit | None = None
    d_class: str | None = None

    def is_proper(self):
        if self.kind == "A":
            return len(self.blocks) > 1
        return bool(self.blocks)

    def block_sizes(self):
        return tuple(a for a, _ in self.blocks)

    def levi_dim(self):
        d = sum(a * a for a, _ in self.blocks)
        if self.kind == "A":
            return d - 1
        return d + (group_dim(self.kind, self.m) if self.m else 0)

    def orbit_dim(self):
        d = sum(orbit_dim("A", a - 1, make_orbit("A", f)) for a, f in self.blocks if a > 1)
        if self.classical is not None:
            d += orbit_dim(self.kind, self.m, self.classical)
        return d

    def codim(self):
        return self.levi_dim() - self.orbit_dim()

    def is_trivial_on_blocks(self):
        return all(all(x == 1 for x in f.parts) for _, f in self.blocks)

    def to_levi_orbit(self):
        factors = [(("A", a - 1), make_orbit("A", f)) for a, f in self.blocks if a > 1]
        if self.classical is not None:
            factors.append(((self.kind, self.m), self.classical))
        torus = len(self.blocks) - (1 if self.kind == "A" else 0)
        return LeviOrbit(tuple(sorted(factors)), torus)

    def __str__(self):
        parts = [f"GL{a}{f}" for a, f in self.blocks]
        if self.m:
            parts.append(f"{self.kind}{self.m}{self.classical}")
        tag = f"<{self.d_class}>" if self.d_class else ""
        return "x".join(parts) + tag if parts else f"{self.kind}{self.rank}"


def _needs_d_class(kind, m, sizes):
    return kind == "D" and m == 0 and sizes and all(a % 2 == 0 for a in sizes)


def make_shape(kind, rank, blocks, classical=None, d_class=None):
    blocks = tuple(sorted((int(a), f if isinstance(f, Partition) else Partition.of(f))
                          for a, f in blocks))
    for a, f in blocks:
        if f.size != a:
            raise InconsistentEmbedding(f"block GL{a} carries partition {f}")
    m = 0 if classical is None else classical.rank
    if kind == "A":
        if classical is not None:
            raise InconsistentEmbedding("type A Levis have no classical factor")
        if sum(a for a, _ in blocks) != rank + 1:
            raise InconsistentEmbedding("block sizes do not add up to n+1")
    else:
        if sum(a for a, _ in blocks) + m != rank:
            raise InconsistentEmbedding(f"blocks and X_{m} do not fit in {kind}{rank}")
        if classical is not None and classical.kind != kind:
            raise InconsistentEmbedding("classical factor of the wrong kind")
        if kind == "D" and m == 1:
            raise InconsistentEmbedding("D_1 is a torus; use a GL_1 block")
    if _needs_d_class(kind, m, [a for a, _ in blocks]):
        d_class = d_class or "I"
    else:
        d_class = None
    return LeviShape(kind, rank, blocks, m, classical, d_class)


def _add_columns(parts, b, inc):
    parts = list(parts) + [0] * max(0, b - len(parts))
    for i in range(b):
        parts[i] += inc
    return [x for x in parts if x]


def induce_shape(shape: LeviShape) -> ClassicalOrbit:
    """Lusztig-Spaltenstein induction from a standard Levi class."""
    kind = shape.kind
    if kind == "A":
        total = []
        for a, f in shape.blocks:
            total = [x + y for x, y in _zip_pad(total, f.parts)]
        return make_orbit("A", total)
    if shape.classical is not None:
        cur = list(shape.classical.partition.parts)
    else:
        cur = [1] if kind == "B" else []
    steps = []
    for a, f in sorted(shape.blocks, reverse=True):
        steps.extend(dual_partition(f).parts)
    for b in steps:
        cur = list(collapse(kind, _add_columns(cur, b, 2)).partition.parts)
    result = Partition.of(cur)
    if not is_very_even(kind, result):
        return ClassicalOrbit(kind, result)
    c = shape.classical
    if c is not None and c.very_even_label is not None and not c.label_ambiguous:
        return ClassicalOrbit(kind, result, c.very_even_label)
    if shape.rank == 2 and shape.m == 0:
        # D2 = A1 x A1: the GL2 Levi of class X is one of the two A1 factors,
        # and inducing its zero orbit gives the very even class labelled X
        return ClassicalOrbit(kind, result, shape.d_class)
    return ClassicalOrbit(kind, result, "I", label_ambiguous=True)


def _zip_pad(a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return zip(a, b)


def shape_from_levi_orbit(levi: LeviOrbit, ambient) -> LeviShape:
    kind, rank = ambient
    blocks = []
    classical = None
    for (k, r), o in levi.factors:
        if k == "A":
            blocks.append((r + 1, o.partition))
        elif k == kind:
            if classical is not None:
                raise InconsistentEmbedding("two classical factors in a Levi of a simple group")
            classical = o
        else:
            raise InconsistentEmbedding(f"factor {k}{r} cannot sit in a Levi of {kind}{rank}")
    used = sum(a for a, _ in blocks) + (classical.rank if classical is not None else 0)
    total = rank + 1 if kind == "A" else rank
    ones = total - used
    if ones < 0:
        raise InconsistentEmbedding("Levi factors exceed the ambient rank")
    blocks += [(1, Partition((1,)))] * ones
    nblocks = len(blocks)
    expected_torus = nblocks - 1 if kind == "A" else nblocks
    if levi.torus_rank != expected_torus:
        raise InconsistentEmbedding(
            f"torus rank {levi.torus_rank} does not match the block structure ({expected_torus})")
    return make_shape(kind, rank, blocks, classical)


def ls_induce(levi, ambient) -> ClassicalOrbit:
    """Induce a Levi class (LeviOrbit or LeviShape) to the ambient (kind, rank)."""
    if isinstance(levi, LeviShape):
        shape = levi
        if (shape.kind, shape.rank) != tuple(ambient):
            raise InconsistentEmbedding("shape belongs to another ambient group")
    else:
        shape = shape_from_levi_orbit(levi, ambient)
    return induce_shape(shape)


def _block_multisets(total, min_part=1):
    """Multisets of positive block sizes summing to total, as sorted tuples."""
    if total == 0:
        yield ()
        return
    for first in range(min_part, total + 1):
        for rest in _block_multisets(total - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def levi_classes(kind, rank):
    """Standard Levi classes of X_r as (block sizes, m, d_class) triples."""
    out = []
    if kind == "A":
        for sizes in _block_multisets(rank + 1):
            out.append((sizes, 0, None))
        return tuple(out)
    for m in range(rank, -1, -1):
        if kind == "D" and m == 1:
            continue
        if kind == "D" and m == 0 and rank == 1:
            continue
        for sizes in _block_multisets(rank - m):
            if _needs_d_class(kind, m, sizes):
                out.append((sizes, m, "I"))
                out.append((sizes, m, "II"))
            else:
                out.append((sizes, m, None))
    return tuple(out)


def _orbit_choices(kind, sizes, m):
    from itertools import product
    gl = [tuple(partitions_of(a)) for a in sizes]
    cl = orbits_of(kind, m) if m else (None,)
    for fs in product(*gl):
        for c in cl:
            yield fs, c


@lru_cache(maxsize=None)
def levi_shapes(kind, rank, proper_only=True):
    """Every (standard Levi class, class of the Levi), deduplicated."""
    seen = set()
    out = []
    for sizes, m, dc in levi_classes(kind, rank):
        if proper_only and (len(sizes) <= 1 if kind == "A" else not sizes):
            continue
        for fs, c in _orbit_choices(kind, sizes, m):
            sh = make_shape(kind, rank, list(zip(sizes, fs)), c, dc)
            if sh not in seen:
                seen.add(sh)
                out.append(sh)
    return tuple(out)


def _same_class(a: ClassicalOrbit, b: ClassicalOrbit):
    if a.kind != b.kind or a.partition != b.partition:
        return False
    if a.very_even_label is None or a.label_ambiguous or b.label_ambiguous:
        return True
    return a.very_even_label == b.very_even_label


def inducing_shapes(kind, rank, orbit):
    """Proper Levi classes inducing the orbit."""
    return [sh for sh in levi_shapes(kind, rank) if _same_class(induce_shape(sh), orbit)]


def is_rigid(kind, rank, orbit) -> bool:
    """True iff no proper Levi class induces the orbit (exhaustive)."""
    from .rootsys import RANK_CAP
    from .errors import CapExceeded
    if rank > RANK_CAP:
        raise CapExceeded(f"rigidity search capped at rank {RANK_CAP}")
    _check(kind, rank, orbit)
    return not inducing_shapes(kind, rank, orbit)


# ---------------------------------------------------------------------------
# component groups in the adjoint group


@lru_cache(maxsize=None)
def _component_rules():
    with resources.files("birsheets.data").joinpath("component_groups.json").open() as fh:
        return json.load(fh)


def component_group_order(kind, rank, orbit) -> int:
    """|C(nu)/C(nu)^o| in the adjoint group, from the partition rule table."""
    if not isinstance(orbit, ClassicalOrbit):
        orbit = make_orbit(kind, orbit)
    _check(kind, rank, orbit)
    rule = _component_rules()["rules"][kind]
    if rule["rule"] == "trivial":
        return 1
    parity = 1 if rule["parity"] == "odd" else 0
    mult = orbit.partition.multiplicities()
    distinct = [x for x in mult if x % 2 == parity]
    exponent = len(distinct) - rule["base"]
    if any(mult[x] % 2 == 1 for x in distinct):
        exponent -= rule["extra_if_odd_multiplicity"]
    return 2 ** max(0, exponent)
