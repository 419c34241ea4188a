"""Small finite posets.

Everything in this package works with posets that have a handful of
elements, so the code below favors clarity over asymptotic cleverness.
Elements can be any hashable, mutually orderable values (we use strings).
"""

from __future__ import annotations


class PosetError(ValueError):
    pass


class Poset:
    """Finite poset built from a set of elements and a generating relation.

    The generating pairs (a, b) are read as a <= b.  The constructor takes
    the reflexive-transitive closure and rejects cycles through distinct
    elements (antisymmetry would fail).
    """

    def __init__(self, elements, relations=()):
        self.elements = tuple(sorted(set(elements)))
        known = set(self.elements)
        adj = {p: set() for p in self.elements}
        for a, b in relations:
            if a not in known or b not in known:
                raise PosetError(f"relation ({a!r}, {b!r}) mentions an unknown element")
            adj[a].add(b)
        reach = {}
        for p in self.elements:
            seen = set()
            stack = [p]
            while stack:
                x = stack.pop()
                if x in seen:
                    continue
                seen.add(x)
                stack.extend(adj[x])
            reach[p] = seen
        for a in self.elements:
            for b in reach[a]:
                if a != b and a in reach[b]:
                    raise PosetError(f"antisymmetry fails: {a!r} and {b!r} lie on a cycle")
        self._up = {p: frozenset(reach[p]) for p in self.elements}
        down = {p: set() for p in self.elements}
        for a in self.elements:
            for b in self._up[a]:
                down[b].add(a)
        self._down = {p: frozenset(v) for p, v in down.items()}

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, p):
        return p in self._up

    def le(self, a, b) -> bool:
        return b in self._up[a]

    def lt(self, a, b) -> bool:
        return a != b and b in self._up[a]

    def comparable(self, a, b) -> bool:
        return self.le(a, b) or self.le(b, a)

    def upset(self, p) -> frozenset:
        """All q with p <= q, including p."""
        return self._up[p]

    def downset(self, p) -> frozenset:
        """All q with q <= p, including p."""
        return self._down[p]

    def strict_up(self, p) -> frozenset:
        return self._up[p] - {p}

    def strict_down(self, p) -> frozenset:
        return self._down[p] - {p}

    def covers(self) -> list:
        """All cover pairs (a, b): a < b with nothing strictly between."""
        out = []
        for a in self.elements:
            for b in self.elements:
                if not self.lt(a, b):
                    continue
                if any(self.lt(a, c) and self.lt(c, b) for c in self.elements):
                    continue
                out.append((a, b))
        return out

    def lower_covers(self, p) -> list:
        return sorted(a for a, b in self.covers() if b == p)

    def upper_covers(self, p) -> list:
        return sorted(b for a, b in self.covers() if a == p)

    def maximals(self, subset=None) -> list:
        pool = set(self.elements if subset is None else subset)
        return sorted(p for p in pool if not any(self.lt(p, q) for q in pool))

    def minimals(self, subset=None) -> list:
        pool = set(self.elements if subset is None else subset)
        return sorted(p for p in pool if not any(self.lt(q, p) for q in pool))

    def is_minimal(self, p) -> bool:
        return not self.strict_down(p)

    def is_maximal(self, p) -> bool:
        return not self.strict_up(p)

    def is_antichain(self, subset) -> bool:
        items = list(subset)
        for i, a in enumerate(items):
            for b in items[i + 1:]:
                if self.comparable(a, b):
                    return False
        return True

    def linear_extension(self) -> list:
        """Deterministic linear extension: always emit the least ready element."""
        emitted = set()
        out = []
        remaining = set(self.elements)
        while remaining:
            ready = sorted(p for p in remaining if self.strict_down(p) <= emitted)
            p = ready[0]
            out.append(p)
            emitted.add(p)
            remaining.discard(p)
        return out

    def restrict(self, subset) -> "Poset":
        keep = set(subset)
        if not keep <= set(self.elements):
            raise PosetError("restriction to elements outside the poset")
        rel = [(a, b) for a in keep for b in keep if self.lt(a, b)]
        return Poset(keep, rel)

    def isomorphisms(self, other, color=None, other_color=None):
        """Yield all order isomorphisms onto `other` as dicts.

        color/other_color assign an arbitrary label to each element; matched
        elements must carry equal labels.  Pass both or neither.
        """
        if len(self.elements) != len(other.elements):
            return
        cs = color or (lambda p: None)
        co = other_color or (lambda p: None)

        def sig(poset, cf, p):
            return (len(poset.downset(p)), len(poset.upset(p)), cf(p))

        mine = list(self.elements)
        theirs = list(other.elements)
        sig_mine = {p: sig(self, cs, p) for p in mine}
        sig_theirs = {q: sig(other, co, q) for q in theirs}
        assignment = {}
        used = set()

        def extend(i):
            if i == len(mine):
                yield dict(assignment)
                return
            p = mine[i]
            for q in theirs:
                if q in used or sig_theirs[q] != sig_mine[p]:
                    continue
                ok = True
                for p2, q2 in assignment.items():
                    if self.le(p, p2) != other.le(q, q2) or self.le(p2, p) != other.le(q2, q):
                        ok = False
                        break
                if ok:
                    assignment[p] = q
                    used.add(q)
                    yield from extend(i + 1)
                    del assignment[p]
                    used.discard(q)

        yield from extend(0)

    def __repr__(self):
        return f"Poset({list(self.elements)!r}, covers={self.covers()!r})"
