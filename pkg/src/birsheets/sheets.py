"""Birational closures of Jordan classes and birational sheets.

A Jordan class is identified with its decomposition datum tau = (M, Z(M)^o z,
O^M).  Its component poset lists the subtori Z(M_i)^o s_i inside Z(M)^o z;
the node i carries the class Ind_M^{M_i} O^M of M_i and a verdict on whether
that induction is birational.  The birational closure keeps the Birational
nodes; the birational sheet of tau (O^M birationally rigid) is that closure.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .birational import (
    BIRATIONAL, NOT_BIRATIONAL, UNKNOWN, Decider, Verdict, default_decider,
)
from .errors import IncompletePoset, Undecidable
from .groups import (
    ClassSkeleton, ComponentPoset, GroupSpec, _frac, canonical_datum,
    center_of_group, center_translate, component_poset, describe_assignment,
    enumerate_decomposition_data, engine, factors_label, factors_of, geometric_leq,
    induce_between, levi_shapes_between, subsystem_from_roots,
)
from .orbits import ClassicalOrbit, is_rigid

__all__ = [
    "ComponentPoset", "BirationalSheet", "LocalModel", "mark_birationality",
    "wbir_set", "birational_closure", "enumerate_birational_sheets",
    "verify_partition", "poset_law_failures", "compare_sheet", "locate_class", "local_model",
]


# ---------------------------------------------------------------------------
# verdicts on the poset


def induction_verdict(G, big, small, assignment, decider=None):
    """Verdict for Ind from the small subsystem to the big one: birational
    iff it is so on every simple factor of the big one."""
    decider = decider or default_decider()
    provs = []
    worst = BIRATIONAL
    for F, shape in levi_shapes_between(G, big, small, assignment):
        v = decider.decide_shape(shape)
        if v.value == NOT_BIRATIONAL:
            worst = NOT_BIRATIONAL
        elif v.value == UNKNOWN and worst == BIRATIONAL:
            worst = UNKNOWN
        if v.definite:
            provs.append(f"{F.label()}:{v.provenance}")
    if worst == UNKNOWN:
        return Verdict(UNKNOWN)
    return Verdict(worst, ";".join(provs) if provs else "identity")


def mark_birationality(P: ComponentPoset, decider=None) -> ComponentPoset:
    """Fill node verdicts, then close them under the stratum rules: bad at a
    node stays bad on its subtori, good at a node stays good above it."""
    G = P.group
    d = P.datum
    small = d.pseudo_levi.subsystem
    for nd in P.nodes:
        nd.induced = induce_between(G, nd.subsystem, small, d.orbit)
        nd.verdict = induction_verdict(G, nd.subsystem, small, d.orbit, decider)
    P.violations = []
    n = len(P.nodes)
    bad = [i for i in range(n) if P.nodes[i].verdict.value == NOT_BIRATIONAL]
    good = [i for i in range(n) if P.nodes[i].verdict.value == BIRATIONAL]
    for i in range(n):
        nd = P.nodes[i]
        hit_bad = next((j for j in bad if j != i and P.leq(i, j)), None)
        hit_good = next((j for j in good if j != i and P.leq(j, i)), None)
        if nd.verdict.value == UNKNOWN:
            if hit_bad is not None and hit_good is not None:
                P.violations.append((i, hit_bad, hit_good))
            elif hit_bad is not None:
                nd.verdict = Verdict(NOT_BIRATIONAL, f"propagated-from-node-{hit_bad}")
            elif hit_good is not None:
                nd.verdict = Verdict(BIRATIONAL, f"propagated-from-node-{hit_good}")
        elif nd.verdict.value == BIRATIONAL and hit_bad is not None:
            P.violations.append((i, hit_bad, None))
        elif nd.verdict.value == NOT_BIRATIONAL and hit_good is not None:
            P.violations.append((i, None, hit_good))
    return P


def propagation_holds(P: ComponentPoset):
    """NotBirational closed under passing to subtori, Birational under
    passing to larger subtori."""
    n = len(P.nodes)
    for i in range(n):
        for j in range(n):
            if i == j or not P.leq(i, j):
                continue
            vi, vj = P.nodes[i].verdict.value, P.nodes[j].verdict.value
            if vj == NOT_BIRATIONAL and vi == BIRATIONAL:
                return False
            if vi == BIRATIONAL and vj == NOT_BIRATIONAL:
                return False
    return True


def poset_law_failures(P: ComponentPoset):
    """Order laws of a marked poset: inclusion agrees with the geometric
    test and reverses centralizers, verdicts propagate, and the maximal
    NotBirational nodes form an antichain."""
    G = P.group
    out = []
    n = len(P.nodes)
    for i in range(n):
        for j in range(n):
            le = P.leq(i, j)
            if le != geometric_leq(G, P, i, j):
                out.append(("inclusion", i, j))
            if le and not P.nodes[j].subsystem <= P.nodes[i].subsystem:
                out.append(("centralizer", i, j))
            if le and i != j and P.nodes[j].subsystem == P.nodes[i].subsystem:
                out.append(("strict", i, j))
    if P.nodes and P.nodes[0].verdict is not None and not propagation_holds(P):
        out.append(("propagation", None, None))
    top = maximal_bad(P) if P.nodes and P.nodes[0].verdict is not None else []
    for a in top:
        for b in top:
            if a != b and P.leq(a, b):
                out.append(("antichain", a, b))
    return out


def unknown_nodes(P):
    return [i for i, nd in enumerate(P.nodes) if nd.verdict.value == UNKNOWN]


def maximal_bad(P: ComponentPoset):
    bad = [i for i, nd in enumerate(P.nodes) if nd.verdict.value == NOT_BIRATIONAL]
    return [i for i in bad if not any(j != i and P.leq(i, j) for j in bad)]


def wbir_set(P: ComponentPoset):
    """The antichain of maximal NotBirational subtori; wbir is the component
    minus their union (the whole component when the list is empty)."""
    if unknown_nodes(P):
        raise IncompletePoset(f"{len(unknown_nodes(P))} undecided nodes")
    return maximal_bad(P)


def node_data(G, P: ComponentPoset, i):
    """Candidate data of the Jordan class at node i (two when a very even
    label could not be resolved)."""
    nd = P.nodes[i]
    if any(o.label_ambiguous for _, o in nd.induced):
        out = []
        for flip in ("I", "II"):
            a = tuple((f, ClassicalOrbit(o.kind, o.partition, flip) if o.label_ambiguous else o)
                      for f, o in nd.induced)
            out.append(canonical_datum(G, nd.subsystem, nd.point, a))
        return out, True
    return [canonical_datum(G, nd.subsystem, nd.point, nd.induced)], False


def birational_closure(G, d, decider=None, P=None):
    """Jordan-class data making up the birational closure of J(tau)."""
    if P is None:
        P = mark_birationality(component_poset(G, d), decider)
    if unknown_nodes(P):
        raise IncompletePoset(f"{len(unknown_nodes(P))} undecided nodes")
    out = {}
    for i, nd in enumerate(P.nodes):
        if nd.verdict.value == BIRATIONAL:
            for x in node_data(G, P, i)[0]:
                out[x.index] = x
    return [out[k] for k in sorted(out)]


# ---------------------------------------------------------------------------
# birational sheets


def rigid_in(G, assignment, decider=None, ordinary=False):
    """yes/no/unknown: is the class of M (given per factor) birationally rigid
    (or rigid, with ordinary=True)?"""
    decider = decider or default_decider()
    res = "yes"
    for f, o in assignment:
        if ordinary:
            r = "yes" if is_rigid(o.kind, o.rank, o) else "no"
        elif o.kind == "A":
            r = "yes" if o.is_trivial() else "no"
        else:
            r = decider.is_birationally_rigid(o.kind, o.rank, o)
        if r == "no":
            return "no"
        if r == "unknown":
            res = "unknown"
    return res


def _node_json(G, P, i):
    nd = P.nodes[i]
    return {"node": i, "pseudo_levi": nd.label, "isolated": nd.isolated,
            "point": [_frac(x) for x in nd.point],
            "induced": describe_assignment(nd.induced),
            "verdict": nd.verdict.value, "provenance": nd.verdict.provenance}


@dataclass
class BirationalSheet:
    group: str
    datum: int
    description: str
    rigid: str                              # "yes" or "unknown"
    jordan_classes: list                    # data of Birational nodes
    maybe: list                             # data of undecided nodes
    excluded: list                          # maximal NotBirational nodes (as dicts)
    complete: bool
    nodes: int
    violations: int = 0
    notes: list = field(default_factory=list)

    def to_json(self):
        return {"datum": self.datum, "description": self.description, "rigid": self.rigid,
                "strata": list(self.jordan_classes), "maybe": list(self.maybe),
                "excluded": self.excluded, "complete": self.complete, "nodes": self.nodes,
                "violations": self.violations,
                "flags": {"unibranch": True, "normalization_smooth": True, "smooth": True}}


def build_sheet(G, d, decider=None, rigid=None):
    decider = decider or default_decider()
    if rigid is None:
        rigid = rigid_in(G, d.orbit, decider)
    P = mark_birationality(component_poset(G, d), decider)
    good, maybe = set(), set()
    ambiguous = False
    for i, nd in enumerate(P.nodes):
        if nd.verdict.value == NOT_BIRATIONAL:
            continue
        cands, amb = node_data(G, P, i)
        ambiguous = ambiguous or amb
        target = good if nd.verdict.value == BIRATIONAL and not amb and rigid == "yes" else maybe
        for x in cands:
            target.add(x.index)
    maybe -= good
    undecided = unknown_nodes(P)
    excluded = [_node_json(G, P, i) for i in maximal_bad(P)]
    complete = rigid == "yes" and not undecided and not ambiguous and not P.violations
    notes = []
    if undecided:
        notes.append(f"{len(undecided)} undecided nodes")
    if ambiguous:
        notes.append("unresolved very even label")
    if rigid != "yes":
        notes.append("birational rigidity of the class undecided")
    return BirationalSheet(G.label, d.index, d.describe(), rigid, sorted(good), sorted(maybe),
                           excluded, complete, len(P.nodes), len(P.violations), notes), P


def _sheet_worker(args):
    kind, rank, index, fixture_doc = args
    G = GroupSpec(kind, rank)
    decider = Decider(fixture_doc) if fixture_doc is not None else default_decider()
    d = enumerate_decomposition_data(G)[index]
    return build_sheet(G, d, decider)[0]


def bb_data(G, decider=None):
    """Data whose class is birationally rigid, with rigidity yes/unknown."""
    decider = decider or default_decider()
    out = []
    for d in enumerate_decomposition_data(G):
        r = rigid_in(G, d.orbit, decider)
        if r != "no":
            out.append((d, r))
    return out


def resolve_parallelism(p):
    if p in (None, "auto"):
        return max(1, min(8, os.cpu_count() or 1))
    return max(1, int(p))


def enumerate_birational_sheets(G, decider=None, parallelism=1, fixture_doc=None):
    """One sheet per birationally rigid datum (and one flagged incomplete
    sheet per datum whose rigidity is undecided)."""
    decider = decider or (Decider(fixture_doc) if fixture_doc is not None else default_decider())
    todo = bb_data(G, decider)
    workers = resolve_parallelism(parallelism)
    if workers > 1 and len(todo) > 1:
        args = [(G.kind, G.rank, d.index, fixture_doc) for d, _ in todo]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            sheets = list(ex.map(_sheet_worker, args))
    else:
        sheets = [build_sheet(G, d, decider, r)[0] for d, r in todo]
    sheets.sort(key=lambda s: s.datum)
    return sheets


# ---------------------------------------------------------------------------
# the partition check


def _center_orbits(G, indices):
    """Classes of data under translation by the centre."""
    data = enumerate_decomposition_data(G)
    zs = center_of_group(G)
    seen = {}
    classes = 0
    for k in indices:
        if k in seen:
            continue
        classes += 1
        for z in zs:
            seen[center_translate(G, data[k], z).index] = True
    return classes


def verify_partition(G, decider=None, sheets=None, parallelism=1, fixture_doc=None):
    """Every datum should lie in exactly one birational sheet."""
    decider = decider or (Decider(fixture_doc) if fixture_doc is not None else default_decider())
    data = enumerate_decomposition_data(G)
    if sheets is None:
        sheets = enumerate_birational_sheets(G, decider, parallelism, fixture_doc)
    definite = {d.index: [] for d in data}
    possible = {d.index: [] for d in data}
    for s in sheets:
        for k in s.jordan_classes:
            (definite if s.complete else possible)[k].append(s.datum)
        for k in s.maybe:
            possible[k].append(s.datum)
    failures, blocked = [], []
    for d in data:
        k = d.index
        if len(definite[k]) > 1:
            failures.append({"datum": k, "description": d.describe(), "problem": "in several sheets",
                             "sheets": definite[k]})
        elif not definite[k] and not possible[k]:
            failures.append({"datum": k, "description": d.describe(), "problem": "in no sheet"})
        elif possible[k]:
            blocked.append({"datum": k, "description": d.describe(),
                            "definite": definite[k], "possible": sorted(set(possible[k]))})
    for s in sheets:
        if s.complete and s.datum not in s.jordan_classes:
            failures.append({"datum": s.datum, "problem": "sheet misses its own datum"})
        if s.violations:
            failures.append({"datum": s.datum, "problem": "verdict propagation violated"})
    complete = [s.datum for s in sheets if s.complete]
    ordinary = [d.index for d in data if rigid_in(G, d.orbit, decider, ordinary=True) == "yes"]
    if failures:
        status = "fail"
    elif blocked or len(complete) < len(sheets):
        status = "pass-with-unknowns"
    else:
        status = "pass"
    return {
        "group": G.label, "note": G.note, "status": status,
        "data": len(data), "sheets": len(sheets), "complete_sheets": len(complete),
        "sheets_mod_center": _center_orbits(G, [s.datum for s in sheets]),
        "ordinary_sheets": len(ordinary),
        "ordinary_sheets_mod_center": _center_orbits(G, ordinary),
        "checked": len(data) - len(blocked), "hard_failures": failures,
        "unknown_blocked": blocked,
    }


# ---------------------------------------------------------------------------
# comparison with ordinary sheets, locating classes, local models


def compare_sheet(G, d, decider=None):
    """Regular closure versus birational closure for a rigid datum."""
    if rigid_in(G, d.orbit, decider, ordinary=True) != "yes":
        raise ValueError("compare_sheet needs a datum with a rigid class")
    P = mark_birationality(component_poset(G, d), decider)
    bad = [i for i, nd in enumerate(P.nodes) if nd.verdict.value != BIRATIONAL]
    iso = [_node_json(G, P, i) for i, nd in enumerate(P.nodes) if nd.isolated]
    undecided = unknown_nodes(P)
    return {
        "datum": d.index, "description": d.describe(),
        "equal": None if undecided else not bad,
        "witnesses": [_node_json(G, P, i) for i in bad],
        "isolated": iso,
        "isolated_all_birational": all(x["verdict"] == BIRATIONAL for x in iso),
    }


def _realize(G, F, shape):
    """Concrete simple roots of a standard Levi shape placed on factor F."""
    coords = list(F.coords)
    signs = list(F.signs)
    roots = []
    d = engine(G).rs.ambient_dim

    def vec(pairs):
        v = [0] * d
        for c, x in pairs:
            v[c] += x
        return tuple(v)

    pos = 0
    blocks = list(shape.blocks)
    for bi, (a, _) in enumerate(blocks):
        cs = coords[pos:pos + a]
        ss = signs[pos:pos + a]
        if F.kind == "D" and shape.d_class == "II" and bi == len(blocks) - 1:
            ss = ss[:-1] + [-ss[-1]]
        for k in range(a - 1):
            roots.append(vec([(cs[k], ss[k]), (cs[k + 1], -ss[k + 1])]))
        pos += a
    tail = coords[pos:]
    m = len(tail)
    if m:
        for k in range(m - 1):
            roots.append(vec([(tail[k], 1), (tail[k + 1], -1)]))
        if F.kind == "C":
            roots.append(vec([(tail[-1], 2)]))
        elif F.kind == "B":
            roots.append(vec([(tail[-1], 1)]))
        elif F.kind == "D" and m >= 2:
            roots.append(vec([(tail[-2], 1), (tail[-1], 1)]))
    return roots, tail


def birational_induction_datum(G, skel: ClassSkeleton, decider=None):
    """(L, class of L): L a Levi of C_G(s) with a birationally rigid class
    inducing the unipotent part birationally, factor by factor."""
    decider = decider or default_decider()
    roots = []
    classical = {}
    for F, o in skel.orbit:
        if F.kind == "A":
            from .orbits import Partition, make_shape
            shape = make_shape("A", F.size - 1,
                               [(b, Partition((1,) * b)) for b in o.partition.dual().parts])
            r, _ = _realize(G, F, shape)
            roots += r
            continue
        dat = decider.birational_datum_of(F.kind, F.rank, o)
        if dat is None:
            raise Undecidable(f"no definite birational datum for {F.label()}{o}")
        r, tail = _realize(G, F, dat.levi)
        roots += r
        if dat.levi.classical is not None and tail:
            classical[tuple(tail)] = dat.levi.classical
    L = subsystem_from_roots(G, roots)
    assignment = []
    for f in factors_of(G, L):
        if not f.nonabelian:
            continue
        if f.kind != "A":
            assignment.append((f, classical[tuple(f.coords)]))
        else:
            assignment.append((f, f.orbits()[-1]))
    return L, tuple(assignment)


def locate_class(G, skel: ClassSkeleton, decider=None, sheets=None):
    """The birational sheet containing the class of the skeleton."""
    decider = decider or default_decider()
    L, assignment = birational_induction_datum(G, skel, decider)
    d = canonical_datum(G, L, skel.point, assignment)
    if sheets is None:
        sheet = build_sheet(G, d, decider)[0]
    else:
        sheet = next((s for s in sheets if s.datum == d.index), None)
    if sheet is None or sheet.rigid != "yes":
        raise Undecidable("the located datum is not a definite birational-sheet datum")
    return sheet


def skeleton_datum(G, skel: ClassSkeleton):
    """The Jordan-class datum of a skeleton (its own centralizer and class)."""
    return canonical_datum(G, skel.subsystem, skel.point, skel.orbit)


@dataclass
class LocalModel:
    node: int
    reductive_part: str                 # factors of c_g(r)
    levi: str                           # c = Lie(C)
    orbit: str                          # O^c
    orbit_birationally_rigid: str
    verdict: str
    flags: dict

    def to_json(self):
        return dict(self.__dict__)


def local_model(G, d, node, decider=None, P=None):
    """Local datum of the birational sheet of tau at a poset node."""
    if P is None:
        P = mark_birationality(component_poset(G, d), decider)
    nd = P.nodes[node]
    if not nd.verdict.definite:
        raise Undecidable("node verdict undecided")
    classical = all(k in "ABCD" for k in G.kind)
    return LocalModel(
        node=node,
        reductive_part=factors_label(factors_of(G, nd.subsystem)),
        levi=d.pseudo_levi.label,
        orbit=describe_assignment(d.orbit),
        orbit_birationally_rigid=rigid_in(G, d.orbit, decider),
        verdict=nd.verdict.value,
        flags={"unibranch": True, "normalization_smooth": True,
               "smooth": True if classical else "unknown"},
    )


def sheet_of_datum(G, d, decider=None):
    return build_sheet(G, d, decider)
