import random
from collections import Counter
from fractions import Fraction
from itertools import combinations, product
from math import comb, gcd

import pytest

from birsheets.errors import UnsupportedType
from birsheets.groups import (
    GroupSpec, canonical_datum, center_components, center_of_group, component_poset,
    engine, enumerate_decomposition_data, enumerate_pseudo_levis, factors_of,
    geometric_leq, induce_class, class_dim, jordan_dim, pseudo_levi_by_theta,
    stabilizer_generators, transport_orbit,
)
from birsheets.rootsys import build_root_system
from oracles import partitions, reflect, reflection_closure


def oracle_pseudo_levi_classes(kind, rank):
    """Subsystems spanned by proper subsets of the extended base, up to W,
    by closing under reflections and walking simple-reflection orbits."""
    rs = build_root_system(kind, rank)
    ext = rs.extended()
    classes = []
    for size in range(rank + 1):
        for theta in combinations(range(rank + 1), size):
            R = frozenset(reflection_closure([ext[j] for j in theta]))
            if any(R in c for c in classes):
                continue
            orbit = {R}
            todo = [R]
            while todo:
                S = todo.pop()
                for a in rs.simple_roots:
                    T = frozenset(tuple(int(x) for x in reflect(a, r)) for r in S)
                    if T not in orbit:
                        orbit.add(T)
                        todo.append(T)
            classes.append(orbit)
    return len(classes)


@pytest.mark.parametrize("kind,rank", [("A", 1), ("A", 2), ("A", 3), ("A", 4), ("B", 2),
                                       ("C", 2), ("B", 3), ("C", 3), ("D", 4), ("C", 4)])
def test_pseudo_levi_count(kind, rank):
    assert len(enumerate_pseudo_levis(GroupSpec(kind, rank))) == oracle_pseudo_levi_classes(kind, rank)


def test_type_a_pseudo_levis_are_levis():
    for n in range(1, 6):
        pls = enumerate_pseudo_levis(GroupSpec("A", n))
        assert all(M.is_levi for M in pls)
        assert len(pls) == len(list(partitions(n + 1)))


def type_a_data_count(n):
    """sum over Levi block multisets mu of n: gcd(mu) components times the
    multisets of classes on equal blocks."""
    total = 0
    for mu in partitions(n):
        g = 0
        for x in mu:
            g = gcd(g, x)
        ways = g
        for size, m in Counter(mu).items():
            p = len(list(partitions(size)))
            ways *= comb(p + m - 1, m)
        total += ways
    return total


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_type_a_data_count(n):
    assert len(enumerate_decomposition_data(GroupSpec("A", n - 1))) == type_a_data_count(n)


def test_sl2_by_hand():
    G = GroupSpec("A", 1)
    assert len(enumerate_pseudo_levis(G)) == 2
    assert len(enumerate_decomposition_data(G)) == 5


@pytest.mark.parametrize("kind,rank,order", [("A", 1, 2), ("A", 4, 5), ("B", 3, 2), ("C", 3, 2),
                                             ("D", 4, 4), ("D", 5, 4)])
def test_center_order(kind, rank, order):
    assert len(center_of_group(GroupSpec(kind, rank))) == order


def test_sp4_pseudo_levis():
    G = GroupSpec("C", 2)
    pls = enumerate_pseudo_levis(G)
    assert len(pls) == 5
    M, _ = pseudo_levi_by_theta(G, (0, 2))
    assert M.label == "C1xC1" and not M.is_levi
    comps = center_components(G, M)
    assert len(comps) == 4 and sum(c.rp for c in comps) == 2
    assert [m.label for m in pls if m.is_levi] == ["T", "A1", "C1", "C2"]


def test_group_spec():
    with pytest.raises(UnsupportedType):
        GroupSpec("C", 2, isogeny="adjoint")
    with pytest.raises(UnsupportedType):
        GroupSpec.parse("E6")
    with pytest.warns(UserWarning):
        G = GroupSpec("D", 3)
    assert G.label == "A3" and G.note


@pytest.mark.parametrize("kind,rank", [("C", 3), ("B", 3), ("A", 3), ("D", 4)])
def test_canonical_datum_is_conjugation_invariant(kind, rank):
    G = GroupSpec(kind, rank)
    E = engine(G)
    rng = random.Random(7)
    data = enumerate_decomposition_data(G)
    for d in rng.sample(data, min(25, len(data))):
        g = E.ident
        for _ in range(rng.randrange(1, 8)):
            s = rng.choice(E.gens)
            from birsheets.rootsys import _compose
            g = _compose(s, g)
        idx = E.image(g, d.pseudo_levi.subsystem)
        x = E.act(g, d.component.point)
        a = transport_orbit(g, d.orbit)
        assert canonical_datum(G, idx, x, a).index == d.index


def test_stabilizer_preserves_subsystem():
    G = GroupSpec("C", 3)
    E = engine(G)
    for M in enumerate_pseudo_levis(G):
        for h in stabilizer_generators(G, M):
            assert E.image(h, M.subsystem) == M.subsystem


def test_jordan_class_dimension():
    G = GroupSpec("C", 2)
    for d in enumerate_decomposition_data(G):
        skel = induce_class(G, d)
        assert skel.generic
        assert jordan_dim(G, d) == class_dim(G, skel) + (G.rank - d.pseudo_levi.rank)


def sampled_nodes(G, d, q):
    """(subsystem, key) of points on a grid over the component."""
    E = engine(G)
    from birsheets.groups import _integral_basis
    M = d.pseudo_levi
    dirs = _integral_basis(E.direction(M.subsystem)) if M.rank < G.rank else []
    span = q * len(center_of_group(G))
    out = set()
    for ts in product(range(span), repeat=len(dirs)):
        x = tuple(Fraction(a) + sum(Fraction(t, q) * v[j] for t, v in zip(ts, dirs))
                  for j, a in enumerate(d.component.point))
        c = E.centralizer(x)
        out.add((c, E.key(c, x)))
    return out


@pytest.mark.parametrize("kind,rank,q", [("C", 2, 12), ("B", 2, 12), ("A", 2, 12), ("C", 3, 6)])
def test_poset_nodes_match_grid_sampling(kind, rank, q):
    G = GroupSpec(kind, rank)
    for d in enumerate_decomposition_data(G):
        if G.rank - d.pseudo_levi.rank > 2:
            continue
        P = component_poset(G, d)
        nodes = {(nd.subsystem, nd.key) for nd in P.nodes}
        assert sampled_nodes(G, d, q) == nodes, d.describe()


@pytest.mark.parametrize("kind,rank", [("A", 3), ("C", 2), ("B", 3), ("C", 3)])
def test_poset_inclusion_is_geometric(kind, rank):
    G = GroupSpec(kind, rank)
    for d in enumerate_decomposition_data(G)[:40]:
        P = component_poset(G, d)
        for i in range(len(P.nodes)):
            for j in range(len(P.nodes)):
                assert P.leq(i, j) == geometric_leq(G, P, i, j)
        assert all(P.leq(i, 0) for i in range(len(P.nodes)))


def test_factors_cover_subsystem():
    G = GroupSpec("B", 3)
    for M in enumerate_pseudo_levis(G):
        fs = factors_of(G, M.subsystem)
        assert sum(f.size for f in fs) == 3
