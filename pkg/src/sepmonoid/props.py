"""Randomized property suites for the monoid of an adaptable graph.

Each suite draws instances with a caller-supplied RNG, exercises one
algebraic law, and reports counts plus any concrete counterexamples.
Failures carry serialized elements so a run can be replayed by hand.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .graph import SepGraph
from .isystem import COUNTEREXAMPLE, extract_isystem, validate_isystem
from .randgen import random_element, random_trace, random_walk
from .rewrite import (FreeElement, RewriteError, antisym_nf, confluence_equal,
                      eq_exact, monoid_context, refinement_witness,
                      serialize_element, split_trace)


@dataclass
class SuiteResult:
    name: str
    samples: int = 0
    checked: int = 0          # instances where the law actually bit
    skipped: int = 0          # vacuous instances
    failures: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    log: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        state = "ok" if self.ok else f"FAIL({len(self.failures)})"
        extra = "".join(f" {k}={v}" for k, v in sorted(self.notes.items()))
        return (f"{self.name}: {state} samples={self.samples} "
                f"checked={self.checked} skipped={self.skipped}{extra}")


def split_random(rng: random.Random, x: FreeElement):
    """Split a multiset into two parts summing to it."""
    da, db = {}, {}
    for v, n in x.items():
        k = rng.randint(0, n)
        if k:
            da[v] = k
        if n - k:
            db[v] = n - k
    return FreeElement(da), FreeElement(db)


def refinement_suite(g: SepGraph, rng: random.Random, instances: int = 200,
                     depth: int = 12, max_total: int = 5, walk: int = 4) -> SuiteResult:
    """a+b and c+d rewritten from a common seed must refine into a 2x2 grid."""
    res = SuiteResult("refinement")
    for _ in range(instances):
        seed = random_element(rng, g, max_total)
        x = random_walk(rng, g, seed, rng.randint(0, walk))
        y = random_walk(rng, g, seed, rng.randint(0, walk))
        a, b = split_random(rng, x)
        c, d = split_random(rng, y)
        res.samples += 1
        w = refinement_witness(g, a, b, c, d, depth=depth)
        if w.status != "ok":
            res.failures.append((w.status,) + tuple(
                serialize_element(e) for e in (a, b, c, d)))
            continue
        (x11, x12), (x21, x22) = w.pieces
        subs = ((a, x11 + x12), (b, x21 + x22), (c, x11 + x21), (d, x12 + x22))
        if all(eq_exact(g, lhs, rhs) for lhs, rhs in subs):
            res.checked += 1
        else:
            res.failures.append(("sub-equality",) + tuple(
                serialize_element(e) for e in (a, b, c, d)))
    return res


def oracle_agreement_suite(g: SepGraph, rng: random.Random, pairs: int = 1000,
                           depth: int = 12, node_budget: int = 4000,
                           max_total: int = 4, walk: int = 4) -> SuiteResult:
    """Confluence search vs the exact normal-form decision.

    Search-equal with exact-false is a failure outright.  Exact-true pairs
    the search cannot confirm are logged, not failed; the caller applies
    whatever confirmation ratio it needs from the notes.
    """
    res = SuiteResult("oracle-agreement")
    eq_true = confirmed = search_equal = 0
    for _ in range(pairs):
        if rng.random() < 0.5:
            seed = random_element(rng, g, max_total)
            x = random_walk(rng, g, seed, rng.randint(0, walk))
            y = random_walk(rng, g, seed, rng.randint(0, walk))
        else:
            x = random_element(rng, g, max_total, nonzero=False)
            y = random_element(rng, g, max_total, nonzero=False)
        res.samples += 1
        found = confluence_equal(g, x, y, depth, node_budget)
        eq = eq_exact(g, x, y)
        if found.status == "equal":
            search_equal += 1
            if not eq:
                res.failures.append(("search-equal-exact-false",
                                     serialize_element(x), serialize_element(y)))
                continue
        res.checked += 1
        if eq:
            eq_true += 1
            if found.status == "equal":
                confirmed += 1
            else:
                res.log.append((found.status,
                                serialize_element(x), serialize_element(y)))
    res.notes = {"search_equal": search_equal, "eq_true": eq_true,
                 "confirmed": confirmed, "unconfirmed": eq_true - confirmed}
    return res


def antisym_le(g: SepGraph, x: FreeElement, y: FreeElement) -> bool:
    """Order of the antisymmetrized monoid, decided on archimedean classes."""
    if x.is_zero():
        return True
    if y.is_zero():
        return False
    pos = monoid_context(g).cond.poset
    cy = antisym_nf(g, y).entries
    return all(any(pos.le(cx, cls) for cls, _, _ in cy)
               for cx, _, _ in antisym_nf(g, x).entries)


def primeness_suite(g: SepGraph, rng: random.Random, samples: int = 500,
                    max_total: int = 4) -> SuiteResult:
    """Every generator class is prime for the antisymmetrized order."""
    res = SuiteResult("primeness")
    verts = list(g.vertices)
    for _ in range(samples):
        v = FreeElement({rng.choice(verts): 1})
        a1 = random_element(rng, g, max_total, nonzero=False)
        a2 = random_element(rng, g, max_total, nonzero=False)
        res.samples += 1
        if not antisym_le(g, v, a1 + a2):
            res.skipped += 1
            continue
        if antisym_le(g, v, a1) or antisym_le(g, v, a2):
            res.checked += 1
        else:
            res.failures.append((serialize_element(v),
                                 serialize_element(a1), serialize_element(a2)))
    return res


def conicality_suite(g: SepGraph, rng: random.Random, samples: int = 500,
                     max_total: int = 3) -> SuiteResult:
    """x + y == 0 forces x == y == 0."""
    res = SuiteResult("conicality")
    for _ in range(samples):
        x = random_element(rng, g, max_total, nonzero=False)
        y = random_element(rng, g, max_total, nonzero=False)
        res.samples += 1
        s = x + y
        if s.is_zero():
            res.skipped += 1
            continue
        if eq_exact(g, s, FreeElement()):
            res.failures.append((serialize_element(x), serialize_element(y)))
        else:
            res.checked += 1
    return res


def separativity_suite(g: SepGraph, rng: random.Random, samples: int = 500,
                       max_total: int = 4, walk: int = 3) -> SuiteResult:
    """2x == x+y == 2y forces x == y."""
    res = SuiteResult("separativity")
    for _ in range(samples):
        x = random_element(rng, g, max_total, nonzero=False)
        if rng.random() < 0.5:
            y = random_walk(rng, g, x, rng.randint(0, walk))
        else:
            y = random_element(rng, g, max_total, nonzero=False)
        res.samples += 1
        s = x + y
        if not (eq_exact(g, x.scale(2), s) and eq_exact(g, s, y.scale(2))):
            res.skipped += 1
            continue
        if eq_exact(g, x, y):
            res.checked += 1
        else:
            res.failures.append((serialize_element(x), serialize_element(y)))
    return res


def division_suite(g: SepGraph, rng: random.Random, samples: int = 500,
                   max_total: int = 5, walk: int = 4) -> SuiteResult:
    """Any split of the source survives along a rewriting trace."""
    res = SuiteResult("division")
    for _ in range(samples):
        a1 = random_element(rng, g, max_total // 2 + 1, nonzero=False)
        a2 = random_element(rng, g, max_total // 2 + 1, nonzero=False)
        alpha = a1 + a2
        res.samples += 1
        if alpha.is_zero():
            res.skipped += 1
            continue
        beta, trace = random_trace(rng, g, alpha, rng.randint(0, walk))
        ser = (serialize_element(a1), serialize_element(a2),
               serialize_element(beta))
        try:
            b1, b2 = split_trace(g, a1, a2, trace)
        except RewriteError as exc:
            res.failures.append(("split-failed", str(exc)) + ser)
            continue
        if b1 + b2 == beta and eq_exact(g, a1, b1) and eq_exact(g, a2, b2):
            res.checked += 1
        else:
            res.failures.append(("bad-split",) + ser)
    return res


def extraction_validity_suite(g: SepGraph, box: int = 3) -> SuiteResult:
    """The system extracted from an adaptable graph must pass validation."""
    res = SuiteResult("extraction-validity")
    res.samples = 1
    rep = validate_isystem(extract_isystem(g), box=box)
    res.notes["status"] = rep.status
    if rep.status == COUNTEREXAMPLE:
        res.failures.extend((f.axiom, f.detail) for f in rep.failures)
    else:
        res.checked = 1
    return res


def run_suites(g: SepGraph, seed: int = 0, samples: int = 200,
               pairs: int = 500, depth: int = 12):
    """The full battery with one shared RNG; returns a list of SuiteResult."""
    rng = random.Random(seed)
    return [
        refinement_suite(g, rng, instances=samples, depth=depth),
        oracle_agreement_suite(g, rng, pairs=pairs, depth=depth),
        primeness_suite(g, rng, samples=samples),
        conicality_suite(g, rng, samples=samples),
        separativity_suite(g, rng, samples=samples),
        division_suite(g, rng, samples=samples),
        extraction_validity_suite(g),
    ]
