import pytest
from hypothesis import given, settings, strategies as st

from birsheets.errors import InvalidOrbit, NoValidPartition
from birsheets.orbits import (
    ClassicalOrbit, Partition, collapse, component_group_order, dual_partition, group_dim,
    induce_shape, is_rigid, levi_shapes, make_orbit, make_shape, orbit_dim, orbits_of,
    partitions_of, regular_orbit, trivial_orbit, validate_orbit,
)
from oracles import brute_collapse, dominated, nilpotent_dims, partitions, valid_partition


def test_partitions_count():
    assert [len(list(partitions_of(n))) for n in range(1, 9)] == [1, 2, 3, 5, 7, 11, 15, 22]


@pytest.mark.parametrize("kind,rank", [("C", 2), ("C", 3), ("B", 2), ("B", 3)])
def test_orbit_dim_matches_matrix_rank(kind, rank):
    for o in orbits_of(kind, rank):
        dim_g, dim_o = nilpotent_dims(kind, o.partition.parts)
        assert dim_g == group_dim(kind, rank)
        assert orbit_dim(kind, rank, o) == dim_o, o


@pytest.mark.parametrize("n", range(1, 11))
def test_collapse_matches_dominance_search(n):
    for kind in "BCD":
        if kind == "B" and n % 2 == 0 or kind in "CD" and n % 2:
            with pytest.raises(NoValidPartition):
                collapse(kind, Partition.of([n]))
            continue
        for p in partitions(n):
            assert collapse(kind, p).partition.parts == brute_collapse(kind, p), (kind, p)


def test_validate_orbit():
    assert validate_orbit("C", [2, 2, 1, 1], 3)
    assert not validate_orbit("C", [3, 1], 2)
    assert validate_orbit("B", [3, 1, 1], 2)
    assert not validate_orbit("B", [2, 1, 1, 1], 2)
    assert not validate_orbit("D", [2, 1, 1], 2)
    with pytest.raises(InvalidOrbit):
        orbit_dim("C", 2, make_orbit("C", [3, 1]))


def test_very_even_labels():
    labels = [o.very_even_label for o in orbits_of("D", 4) if o.partition.parts == (2, 2, 2, 2)]
    assert labels == ["I", "II"]
    assert make_orbit("D", [4, 4]).very_even_label == "I"
    assert make_orbit("D", [3, 1]).very_even_label is None


def test_component_group_sp4_subregular():
    assert component_group_order("C", 2, [2, 2]) == 2
    assert component_group_order("C", 2, [4]) == 1
    assert component_group_order("A", 3, [2, 2]) == 1


CODIM_CASES = [("A", n) for n in range(1, 6)] + [("B", 2), ("B", 3), ("C", 2), ("C", 3),
                                                ("D", 4)]


@pytest.mark.parametrize("kind,rank", CODIM_CASES)
def test_codimension_identity(kind, rank):
    dg = group_dim(kind, rank)
    for sh in levi_shapes(kind, rank):
        o = induce_shape(sh)
        assert validate_orbit(kind, o.partition, rank)
        assert dg - orbit_dim(kind, rank, o) == sh.codim(), sh


@pytest.mark.parametrize("kind,rank", [("A", 4), ("B", 3), ("C", 3), ("D", 4)])
def test_borel_and_identity_induction(kind, rank):
    n = rank + 1 if kind == "A" else rank
    borel = make_shape(kind, rank, [(1, [1])] * n)
    assert induce_shape(borel).partition == regular_orbit(kind, rank).partition
    for o in orbits_of(kind, rank):
        full = make_shape(kind, rank, [(rank + 1, o.partition)]) if kind == "A" \
            else make_shape(kind, rank, [], o)
        assert induce_shape(full).partition == o.partition


def test_sp6_example_class():
    o = make_orbit("C", [2, 2, 1, 1])
    sh = make_shape("C", 3, [(1, [1])], trivial_orbit("C", 2))
    assert induce_shape(sh) == o
    assert not is_rigid("C", 3, o)
    assert is_rigid("C", 3, trivial_orbit("C", 3))
    assert is_rigid("C", 3, make_orbit("C", [2, 1, 1, 1, 1]))


def test_induction_is_dominance_monotone_in_type_a():
    # inducing a bigger class from the same Levi gives a bigger class
    for sizes in [(2, 2), (3, 1), (2, 1, 1)]:
        choices = [list(partitions_of(a)) for a in sizes]
        from itertools import product
        res = {}
        for fs in product(*choices):
            res[fs] = induce_shape(make_shape("A", sum(sizes) - 1, list(zip(sizes, fs))))
        for a in res:
            for b in res:
                if all(dominated(x.parts, y.parts) for x, y in zip(a, b)):
                    assert dominated(res[a].partition.parts, res[b].partition.parts)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 14).flatmap(lambda n: st.sampled_from(list(partitions(n)))))
def test_dual_partition_involution(p):
    q = dual_partition(p)
    assert dual_partition(q).parts == tuple(p)
    assert q.size == sum(p)
    # transposition reverses dominance against the single row
    assert dominated(q.parts, (sum(p),)) and dominated((1,) * sum(p), q.parts)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from("BCD"), st.integers(1, 12).flatmap(lambda n: st.sampled_from(list(partitions(n)))))
def test_collapse_properties(kind, p):
    n = sum(p)
    if (kind == "B") != (n % 2 == 1):
        return
    c = collapse(kind, p).partition.parts
    assert valid_partition(kind, c)
    assert dominated(c, p)
    assert collapse(kind, c).partition.parts == c
    if valid_partition(kind, p):
        assert c == tuple(p)


def test_classical_orbit_ordering_is_total():
    os = sorted(orbits_of("D", 4))
    assert len(os) == len(set(os))
    assert all(isinstance(o, ClassicalOrbit) for o in os)
