"""Random adaptable graphs, random monoid elements, and a system corpus.

Graphs are assembled bottom-up from a small gadget vocabulary (sinks,
looped free vertices, torsion loops, mutually fed pairs), so they are
adaptable by construction.  The corpus generator extracts systems from
random graphs and keeps the ones inside the requested parameter ranges;
every emitted system therefore has a realization by construction.
"""

from __future__ import annotations

import random

from .graph import SepGraph, check_adaptable
from .isystem import ISystem, extract_isystem, canonicalized, serialize_isystem
from .posets import Poset
from .rewrite import FreeElement, step_targets


DEFAULT_GROUPS = ("0", "Z", "Z/2", "Z/3", "Z/4", "Z/2 + Z/2", "Z + Z/3")


def random_adaptable(rng: random.Random, max_classes: int = 4,
                     max_payload: int = 2) -> SepGraph:
    """Random adaptable graph with at most max_classes condensation classes."""
    n = rng.randint(1, max_classes)
    vertices = []
    edges = []
    blocks = []
    classes = []        # list of vertex lists, one per built class
    vc = 0
    ec = 0

    def new_vertex():
        nonlocal vc
        vc += 1
        v = f"v{vc}"
        vertices.append(v)
        return v

    def add_edge(s, d):
        nonlocal ec
        ec += 1
        edges.append((f"e{ec}", s, d))
        return f"e{ec}"

    for _ in range(n):
        lower = [v for vs in classes if rng.random() < 0.5 for v in vs]
        if rng.random() < 0.5:
            # free class: sink when minimal, else blocks of loop+connectors
            v = new_vertex()
            if lower:
                for _ in range(rng.randint(1, 2)):
                    ids = [add_edge(v, v)]
                    for _ in range(rng.randint(1, 2)):
                        ids.append(add_edge(v, rng.choice(lower)))
                    blocks.append(tuple(ids))
            classes.append([v])
        else:
            shape = rng.choice(["tors", "pair", "triv"])
            if shape == "pair":
                a, b = new_vertex(), new_vertex()
                for u, w in ((a, b), (b, a)):
                    ids = [add_edge(u, u), add_edge(u, u), add_edge(u, w)]
                    for _ in range(rng.randint(0, max_payload) if lower else 0):
                        ids.append(add_edge(u, rng.choice(lower)))
                    blocks.append(tuple(ids))
                classes.append([a, b])
            else:
                v = new_vertex()
                nloops = rng.randint(2, 5) if shape == "tors" else 2
                ids = [add_edge(v, v) for _ in range(nloops)]
                for _ in range(rng.randint(0, max_payload) if lower else 0):
                    ids.append(add_edge(v, rng.choice(lower)))
                blocks.append(tuple(ids))
                classes.append([v])
    g = SepGraph(vertices, edges, blocks)
    rep = check_adaptable(g)
    if not rep.ok:
        raise RuntimeError(f"generator produced a non-adaptable graph: {rep.violations}")
    return g


def random_element(rng: random.Random, g: SepGraph, max_total: int = 6,
                   nonzero: bool = True) -> FreeElement:
    verts = list(g.vertices)
    total = rng.randint(1 if nonzero else 0, max_total)
    return FreeElement.from_vertices(rng.choice(verts) for _ in range(total))


def random_trace(rng: random.Random, g: SepGraph, x: FreeElement, steps: int):
    """Apply up to `steps` random rewrites; returns (result, trace)."""
    trace = []
    for _ in range(steps):
        opts = step_targets(g, x)
        if not opts:
            break
        v, bi, y = rng.choice(opts)
        trace.append((v, bi))
        x = y
    return x, tuple(trace)


def random_walk(rng: random.Random, g: SepGraph, x: FreeElement,
                steps: int) -> FreeElement:
    return random_trace(rng, g, x, steps)[0]


def random_equal_pair(rng: random.Random, g: SepGraph, max_total: int = 5,
                      steps: int = 4):
    """(x, y) equal in the monoid: both are rewrite descendants of a seed."""
    seed = random_element(rng, g, max_total)
    x = random_walk(rng, g, seed, rng.randint(0, steps))
    y = random_walk(rng, g, seed, rng.randint(0, steps))
    return x, y


def relabel_system(sysm: ISystem, prefix: str = "p") -> ISystem:
    """Copy with primes renamed p1, p2, ... along a linear extension."""
    order = sysm.poset.linear_extension()
    names = {p: f"{prefix}{i + 1}" for i, p in enumerate(order)}
    poset = Poset([names[p] for p in order],
                  [(names[a], names[b]) for a, b in sysm.poset.covers()])
    kind = {names[p]: sysm.kind[p] for p in order}
    group = {names[p]: sysm.group[p] for p in order}
    maps = {(names[hi], names[lo]): cm for (hi, lo), cm in sysm.maps.items()}
    labels = {names[p]: lab for p, lab in sysm.generator_labels.items()}
    return ISystem(poset, kind, group, maps, labels)


def corpus_systems(seed: int, count: int = 30, max_classes: int = 4,
                   allowed_groups=DEFAULT_GROUPS, free_rank_max: int = 1,
                   max_tries: int = 20000):
    """Distinct extracted systems within the parameter ranges, with witnesses.

    Returns a list of (system, witness_graph) pairs.  Systems are
    canonicalized, relabeled, and deduplicated by their serialization.
    """
    rng = random.Random(seed)
    allowed = set(allowed_groups)
    out = []
    seen = set()
    for _ in range(max_tries):
        if len(out) >= count:
            break
        g = random_adaptable(rng, max_classes)
        sysm = extract_isystem(g)
        if len(list(sysm.poset)) > max_classes:
            continue
        ok = True
        for p in sysm.poset:
            grp = sysm.group[p]
            if grp.canonical_name() not in allowed or grp.free_rank > free_rank_max:
                ok = False
                break
        if not ok:
            continue
        canon = relabel_system(canonicalized(sysm))
        key = serialize_isystem(canon)
        if key in seen:
            continue
        seen.add(key)
        out.append((canon, g))
    if len(out) < count:
        raise RuntimeError(f"only found {len(out)} distinct systems in {max_tries} tries")
    return out
