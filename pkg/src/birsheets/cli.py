"""Command line front end.

    birsheets enumerate --group C2 --output table
    birsheets verify --group A3
    birsheets decide --group C2 --levi 1 --orbit trivial

Exit codes: 0 ok, 2 usage or domain error, 3 verification failure,
4 undecided verdict.  JSON output is canonical (sorted keys, fixed
ordering, no timestamps) so repeated runs are byte-identical.
"""
from __future__ import annotations

import hashlib
import json
import sys
import warnings
from dataclasses import dataclass
from importlib import resources
from itertools import combinations
from pathlib import Path

import click
import jsonschema

from .birational import (
    UNKNOWN, Decider, TransitivityReport, all_chains, load_fixture_doc,
    parse_orbit_descriptor, std_levi, verify_transitivity,
)
from .errors import BirsheetsError
from .groups import (
    GroupSpec, center_components, center_of_group, enumerate_decomposition_data,
    enumerate_pseudo_levis, pseudo_levi_by_theta,
)
from .orbits import induce_shape
from .rootsys import RANK_CAP, weyl_order
from .sheets import (
    bb_data, component_poset, enumerate_birational_sheets, mark_birationality,
    poset_law_failures, verify_partition,
)

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_UNDECIDED = 0, 2, 3, 4
CACHE_VERSION = 1
TABLE_WIDTH = 24


class UsageError(Exception):
    pass


def load_schema(name):
    with resources.files("birsheets.data").joinpath("schemas", f"{name}.schema.json").open() as fh:
        return json.load(fh)


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    group: tuple
    rank_cap: int = RANK_CAP
    output: str = "json"
    cache_dir: Path | None = None
    fixture_path: Path | None = None
    parallelism: int | str = 1
    wide: bool = False

    def __post_init__(self):
        self._fixtures = False
        self.spec()
        if self.group[1] > self.rank_cap:
            raise UsageError(f"rank {self.group[1]} exceeds the cap {self.rank_cap}")
        if self.output not in ("json", "table"):
            raise UsageError(f"unknown output format {self.output}")
        p = self.parallelism
        if p != "auto" and (not str(p).isdigit() or int(p) < 1):
            raise UsageError("--parallelism takes a positive integer or 'auto'")

    def spec(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return GroupSpec(*self.group)

    def fixture_doc(self):
        """The fixture document, schema-checked before anything is computed."""
        if self._fixtures is not False:
            return self._fixtures
        self._fixtures = None
        if self.fixture_path is None:
            return None
        try:
            doc = json.loads(Path(self.fixture_path).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read fixtures: {exc}") from exc
        try:
            jsonschema.validate(doc, load_schema("fixtures"))
        except jsonschema.ValidationError as exc:
            raise UsageError(f"fixture file invalid: {exc.message}") from exc
        try:
            load_fixture_doc(doc)
        except (BirsheetsError, ValueError) as exc:
            raise UsageError(f"fixture file invalid: {exc}") from exc
        self._fixtures = doc
        return doc

    def decider(self):
        return Decider(self.fixture_doc())


def parse_group(text):
    text = text.strip().upper()
    if len(text) < 2 or not text[1:].isdigit():
        raise UsageError(f"cannot read group {text!r}; expected e.g. C3")
    return text[0], int(text[1:])


# ---------------------------------------------------------------------------
# cache of Weyl classes of extended-node subsets


def _theta_classes(G):
    groups = {}
    for size in range(G.rank + 1):
        for theta in combinations(range(G.rank + 1), size):
            M, _ = pseudo_levi_by_theta(G, theta)
            groups.setdefault(M.index, []).append(list(theta))
    return [groups[k] for k in sorted(groups)]


def _payload_hash(payload):
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def _valid_classes(G, classes):
    if not isinstance(classes, list):
        return False
    seen = []
    for c in classes:
        if not isinstance(c, list) or not c:
            return False
        for t in c:
            if not isinstance(t, list) or not all(isinstance(x, int) for x in t):
                return False
            seen.append(tuple(t))
    expected = [t for s in range(G.rank + 1) for t in combinations(range(G.rank + 1), s)]
    return sorted(seen) == sorted(expected)


def theta_classes(G, cache_dir=None):
    """Partition of the proper extended-node subsets into Weyl classes.

    Returns (classes, status) with status hit, miss, corrupt or off.  A cache
    entry is used only if its stored hash matches its payload and the payload
    is a partition of the right subsets; anything else is recomputed.
    """
    if cache_dir is None:
        return _theta_classes(G), "off"
    path = Path(cache_dir) / f"theta-{G.kind}{G.rank}.json"
    status = "miss"
    if path.exists():
        try:
            doc = json.loads(path.read_text())
            payload = doc["payload"]
            ok = (doc.get("version") == CACHE_VERSION
                  and doc.get("group") == [G.kind, G.rank]
                  and doc.get("sha256") == _payload_hash(payload)
                  and _valid_classes(G, payload))
        except (OSError, ValueError, KeyError, TypeError):
            ok = False
        if ok:
            return payload, "hit"
        status = "corrupt"
    classes = _theta_classes(G)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        doc = {"version": CACHE_VERSION, "group": [G.kind, G.rank],
               "sha256": _payload_hash(classes), "payload": classes}
        path.write_text(json.dumps(doc, sort_keys=True))
    except OSError:
        pass
    return classes, status


# ---------------------------------------------------------------------------
# reports


def enumerate_report(cfg: RunConfig):
    G = cfg.spec()
    decider = cfg.decider()
    classes, _ = theta_classes(G, cfg.cache_dir)
    pls = []
    for M in enumerate_pseudo_levis(G):
        row = M.to_json()
        row["components"] = [c.to_json() for c in center_components(G, M)]
        pls.append(row)
    data = enumerate_decomposition_data(G)
    bb = bb_data(G, decider)
    sheets = enumerate_birational_sheets(G, decider, cfg.parallelism, cfg.fixture_doc())
    return {
        "schema": "birsheets/enumerate/1",
        "group": {"label": G.label, "kind": G.kind, "rank": G.rank, "note": G.note,
                  "roots": len(G.rs.all_roots), "weyl_order": weyl_order(G.kind, G.rank),
                  "center_order": len(center_of_group(G))},
        "pseudo_levis": pls,
        "theta_classes": classes,
        "decomposition_data": [d.to_json() for d in data],
        "bb": [{"datum": d.index, "rigid": r} for d, r in bb],
        "sheets": [s.to_json() for s in sheets],
        "sheet_counts": {"sheets": len(sheets),
                         "complete": sum(1 for s in sheets if s.complete)},
    }


def poset_report(G, decider, data):
    posets = nodes = 0
    failures = []
    for d in data:
        P = mark_birationality(component_poset(G, d), decider)
        posets += 1
        nodes += len(P.nodes)
        for law, i, j in poset_law_failures(P):
            failures.append({"datum": d.index, "law": law, "nodes": [i, j]})
    return {"posets": posets, "nodes": nodes, "failures": failures}


def verify_report(cfg: RunConfig):
    G = cfg.spec()
    decider = cfg.decider()
    part = verify_partition(G, decider, parallelism=cfg.parallelism,
                            fixture_doc=cfg.fixture_doc())
    rep = TransitivityReport()
    for L, M, fs, c in all_chains(G.kind, G.rank):
        verify_transitivity(G.kind, G.rank, L, M, fs, c, decider, rep)
    data = enumerate_decomposition_data(G)
    # every datum at small rank, the sheet data beyond
    if G.rank > 3:
        keep = {d.index for d, _ in bb_data(G, decider)}
        data = [d for d in data if d.index in keep]
    posets = poset_report(G, decider, data)
    hard = part["hard_failures"] or rep.failures or rep.induction_failures or posets["failures"]
    if hard:
        status = "fail"
    elif part["status"] != "pass":
        status = "pass-with-unknowns"
    else:
        status = "pass"
    return {
        "schema": "birsheets/verify/1", "group": G.label, "status": status,
        "partition": part,
        "transitivity": {"checked": rep.checked, "skipped": rep.skipped,
                         "failures": [list(map(str, f)) for f in rep.failures],
                         "induction_failures": [list(f) for f in rep.induction_failures]},
        "posets": posets,
    }


def parse_levi(text):
    text = text.strip()
    if not text:
        return []
    try:
        return sorted({int(x) for x in text.split(",")})
    except ValueError as exc:
        raise UsageError(f"cannot read simple roots {text!r}") from exc


def decide_report(cfg: RunConfig, levi, orbit):
    G = cfg.spec()
    decider = cfg.decider()
    sl = std_levi(G.kind, G.rank, levi)
    shape = parse_orbit_descriptor(orbit, sl)
    v = decider.decide_shape(shape)
    return {"schema": "birsheets/decide/1", "group": G.label, "levi": list(levi),
            "levi_shape": str(shape), "orbit": orbit, "induced": induce_shape(shape).to_json(),
            "verdict": v.value, "provenance": v.provenance}


# ---------------------------------------------------------------------------
# tables


def _cell(x, wide):
    s = x if isinstance(x, str) else json.dumps(x, separators=(",", ":"))
    if not wide and len(s) > TABLE_WIDTH:
        s = s[:TABLE_WIDTH - 3] + "..."
    return s


def _table(headers, rows, wide):
    rows = [[_cell(x, wide) for x in r] for r in rows]
    widths = [max([len(h)] + [len(r[k]) for r in rows]) for k, h in enumerate(headers)]
    line = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
    return "\n".join([line(headers), line(["-" * w for w in widths])] + [line(r) for r in rows])


def enumerate_table(rep, wide=False):
    g = rep["group"]
    out = [f"group {g['label']}  roots {g['roots']}  |W| {g['weyl_order']}  |Z| {g['center_order']}"]
    if g["note"]:
        out.append(f"note: {g['note']}")
    out += ["", "pseudo-Levis"]
    out.append(_table(["#", "theta", "type", "levi", "components", "rp"],
                      [[str(p["index"]), p["theta"], p["type"], "yes" if p["is_levi"] else "no",
                        str(len(p["components"])), str(sum(c["rp"] for c in p["components"]))]
                       for p in rep["pseudo_levis"]], wide))
    out += ["", "decomposition data"]
    out.append(_table(["#", "pseudo-Levi", "component", "class"],
                      [[str(d["index"]), d["pseudo_levi"], d["component"]["key"],
                        " x ".join(f"{o['factor']}{o['orbit']['partition']}" for o in d["orbit"])
                        or "-"] for d in rep["decomposition_data"]], wide))
    out += ["", "birational sheets"]
    out.append(_table(["datum", "rigid", "complete", "strata", "excluded"],
                      [[str(s["datum"]), s["rigid"], "yes" if s["complete"] else "no",
                        s["strata"], str(len(s["excluded"]))] for s in rep["sheets"]], wide))
    return "\n".join(out) + "\n"


def verify_table(rep, wide=False):
    p, t, q = rep["partition"], rep["transitivity"], rep["posets"]
    rows = [
        ["partition", p["status"], f"data {p['data']} sheets {p['sheets']} "
         f"(mod center {p['sheets_mod_center']}) hard {len(p['hard_failures'])} "
         f"blocked {len(p['unknown_blocked'])}"],
        ["transitivity", "fail" if t["failures"] or t["induction_failures"] else "pass",
         f"checked {t['checked']} skipped {t['skipped']}"],
        ["posets", "fail" if q["failures"] else "pass", f"{q['posets']} posets {q['nodes']} nodes"],
    ]
    body = _table(["check", "status", "detail"], rows, True)
    extra = [f"blocked datum {b['datum']}: {_cell(b['description'], wide)}"
             for b in p["unknown_blocked"]]
    return f"{rep['group']}: {rep['status']}\n{body}\n" + "".join(x + "\n" for x in extra)


def decide_table(rep, wide=False):
    return (f"{rep['group']} {rep['levi_shape']} -> {rep['induced']['partition']}: "
            f"{rep['verdict']} ({rep['provenance']})\n")


# ---------------------------------------------------------------------------
# click commands


def _config(group, output, fixtures, cache_dir, parallelism, wide, rank_cap=RANK_CAP):
    return RunConfig(parse_group(group), rank_cap, output, cache_dir, fixtures, parallelism, wide)


def _run(build, render, code_of, **opts):
    try:
        cfg = _config(**opts)
        cfg.fixture_doc()
        rep = build(cfg)
    except (UsageError, BirsheetsError) as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return EXIT_USAGE
    click.echo(dumps(rep) if cfg.output == "json" else render(rep, cfg.wide), nl=False)
    return code_of(rep)


def common(f):
    opts = [
        click.option("--group", required=True, help="Group such as A3, C2 or B3."),
        click.option("--output", type=click.Choice(["json", "table"]), default="json"),
        click.option("--fixtures", type=click.Path(dir_okay=False), default=None,
                     help="Birationality fixture table (JSON)."),
        click.option("--cache-dir", type=click.Path(file_okay=False), default=None),
        click.option("--parallelism", default="1", help="Worker count or 'auto'."),
        click.option("--wide", is_flag=True, help="Do not truncate table cells."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Pseudo-Levis, decomposition data and birational sheets."""


@main.command("enumerate")
@common
def enumerate_cmd(**opts):
    """Pseudo-Levis, decomposition data, BB(G) and birational sheets."""
    sys.exit(_run(enumerate_report, enumerate_table, lambda r: EXIT_OK, **opts))


@main.command("verify")
@common
def verify_cmd(**opts):
    """Partition check, transitivity suite and poset laws."""
    sys.exit(_run(verify_report, verify_table,
                  lambda r: EXIT_VERIFY if r["status"] == "fail" else EXIT_OK, **opts))


@main.command("decide")
@common
@click.option("--levi", required=True, help="Simple roots of the Levi, e.g. '2,3'.")
@click.option("--orbit", default="trivial", help="'trivial' or factors like 'A1[2]xC1[2]'.")
def decide_cmd(levi, orbit, **opts):
    """Is the induction from a standard Levi class birational?"""
    def build(cfg):
        return decide_report(cfg, parse_levi(levi), orbit)
    sys.exit(_run(build, decide_table,
                  lambda r: EXIT_UNDECIDED if r["verdict"] == UNKNOWN else EXIT_OK, **opts))


if __name__ == "__main__":
    main()
