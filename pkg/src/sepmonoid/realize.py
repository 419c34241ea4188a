"""Build an adaptable separated graph realizing a given invariant system.

The construction walks a linear extension of the prime poset.  A free
prime becomes a single vertex whose blocks (one loop plus connectors)
impose exactly the kernel of the evaluation map from the already-built
lower part onto the target group.  A regular prime becomes a small
strongly connected gadget: one vertex per torsion factor, a mutually
looped pair per free generator, plus connector payloads chosen so that
the new rows together with the lower rows span exactly the kernel of the
value assignment.  Every prime is verified on the spot by presenting the
extracted group and checking the induced evaluation map is an
isomorphism pinning the lower generators.

Not every valid system is realizable.  A provable rank obstruction
raises ConstructionInfeasible; an exhausted search raises
ConstructionFailed.  Both carry the offending prime in the message.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .abelian import (
    FGAbelianGroup, GroupHom, kernel_generators, left_kernel, solve_left,
    subgroup_membership, iter_isomorphisms,
)
from .graph import SepGraph, check_adaptable
from .isystem import (ISystem, extract_isystem, validate_isystem,
                      COUNTEREXAMPLE, INCONCLUSIVE)


class ConstructionInfeasible(ValueError):
    """The system provably has no realization."""


class ConstructionFailed(ValueError):
    """No realization was found within the search budget."""


@dataclass
class RealizeResult:
    graph: SepGraph
    class_map: dict          # prime -> tuple of vertices realizing it
    values: dict             # vertex of a regular class -> element of its prime's group
    log: list = field(default_factory=list)


# ----------------------------------------------------------------- builder


class _Builder:
    def __init__(self, sysm: ISystem):
        self.sysm = sysm
        self.used_names = set()
        self.class_vertices = {}
        self.prime_of = {}
        self.free_blocks = {}     # free vertex -> list of {target: mult}
        self.regular_out = {}     # regular vertex -> {target: mult}, single block
        self.relations = {}       # vertex -> list of {vertex: coeff} meaning sum == 0
        self.val = {}             # vertex in a regular class -> element of G_prime

    def name(self, base):
        cand = base
        while cand in self.used_names:
            cand = cand + "_"
        self.used_names.add(cand)
        return cand

    def lower_verts(self, p):
        out = []
        for q in sorted(self.sysm.poset.strict_down(p)):
            out.extend(self.class_vertices[q])
        return sorted(out)

    def required_image(self, p, u):
        q = self.prime_of[u]
        cm = self.sysm.map_for(p, q)
        if self.sysm.kind[q] == "free":
            return cm.unit
        return cm.hom(self.val[u])

    def ambient_rows(self, L):
        index = {u: i for i, u in enumerate(L)}
        rows = []
        for u in L:
            for rel in self.relations[u]:
                row = [0] * len(L)
                for t, c in rel.items():
                    row[index[t]] += c
                rows.append(row)
        return rows

    def add_free(self, p, blocks):
        v = self.name(p)
        self.class_vertices[p] = (v,)
        self.prime_of[v] = p
        self.free_blocks[v] = [dict(b) for b in blocks]
        self.relations[v] = [dict(b) for b in blocks]
        return v

    def add_regular(self, p, vert_names, out_maps, values):
        self.class_vertices[p] = tuple(vert_names)
        for w in vert_names:
            self.prime_of[w] = p
            self.regular_out[w] = dict(out_maps[w])
            rel = dict(out_maps[w])
            rel[w] = rel.get(w, 0) - 1
            self.relations[w] = [rel]
            self.val[w] = values[w]

    def to_graph(self) -> SepGraph:
        verts = sorted(self.prime_of)
        edges = []
        blocks = []
        n = 0
        for v in verts:
            if v in self.free_blocks:
                for blk in self.free_blocks[v]:
                    ids = []
                    n += 1
                    ids.append(f"e{n}")
                    edges.append((f"e{n}", v, v))
                    for t in sorted(blk):
                        for _ in range(blk[t]):
                            n += 1
                            ids.append(f"e{n}")
                            edges.append((f"e{n}", v, t))
                    blocks.append(tuple(ids))
            else:
                ids = []
                for t in sorted(self.regular_out[v]):
                    for _ in range(self.regular_out[v][t]):
                        n += 1
                        ids.append(f"e{n}")
                        edges.append((f"e{n}", v, t))
                if ids:
                    blocks.append(tuple(ids))
        return SepGraph(verts, edges, blocks)


# ----------------------------------------------------------- shared pieces


def _row_hnf(rows):
    """Canonical Hermite-style basis of the integer row span.

    Unique per lattice (positive pivots, entries above a pivot reduced into
    [0, pivot)), so tuples compare equal exactly when the spans agree.
    """
    mat = [list(r) for r in rows if any(r)]
    if not mat:
        return ()
    ncols = len(mat[0])
    pr = 0
    for col in range(ncols):
        if pr >= len(mat):
            break
        while True:
            nz = [j for j in range(pr, len(mat)) if mat[j][col]]
            if not nz:
                break
            j = min(nz, key=lambda k: abs(mat[k][col]))
            if j != pr:
                mat[pr], mat[j] = mat[j], mat[pr]
            if mat[pr][col] < 0:
                mat[pr] = [-x for x in mat[pr]]
            done = True
            for k in range(pr + 1, len(mat)):
                if mat[k][col]:
                    q = mat[k][col] // mat[pr][col]
                    mat[k] = [x - q * y for x, y in zip(mat[k], mat[pr])]
                    if mat[k][col]:
                        done = False
            if done:
                break
        if pr < len(mat) and mat[pr][col]:
            for j in range(pr):
                q = mat[j][col] // mat[pr][col]
                if q:
                    mat[j] = [x - q * y for x, y in zip(mat[j], mat[pr])]
            pr += 1
    return tuple(tuple(r) for r in mat[:pr] if any(r))


def _strongly_connected(W, out_maps):
    if len(W) <= 1:
        return True
    wset = set(W)
    fwd = {w: [v for v in out_maps[w] if v in wset and v != w] for w in W}
    back = {w: [] for w in W}
    for w, outs in fwd.items():
        for v in outs:
            back[v].append(w)
    for adj in (fwd, back):
        seen = {W[0]}
        stack = [W[0]]
        while stack:
            for v in adj[stack.pop()]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != len(W):
            return False
    return True


def _nonneg_preimage(group, target, gens, max_total=16, state_cap=40000):
    """Multiset over gen keys whose images sum to target, or None.

    gens: list of (key, GroupElement); breadth-first, so the result is a
    smallest such multiset and deterministic for a fixed gens order.
    """
    zero = group.zero()
    if target == zero:
        return {}
    visited = {zero.canonical()}
    frontier = [(zero, {})]
    for _ in range(max_total):
        nxt = []
        for val, ms in frontier:
            for key, gv in gens:
                nv = val + gv
                c = nv.canonical()
                if c in visited:
                    continue
                visited.add(c)
                nms = dict(ms)
                nms[key] = nms.get(key, 0) + 1
                if nv == target:
                    return nms
                nxt.append((nv, nms))
                if len(visited) > state_cap:
                    return None
        frontier = nxt
    return None


def _merge(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return out


def _check_theta(G2, G, rows, label):
    """The induced evaluation G2 -> G must be an isomorphism."""
    theta = GroupHom(G2, G, rows)
    if not theta.is_well_defined():
        return None
    if G2.invariant_factors != G.invariant_factors or G2.free_rank != G.free_rank:
        return None
    images = [theta(G2.gen(i)) for i in range(G2.ngens)]
    for cg in G.canonical_generators():
        if not subgroup_membership(images, cg):
            return None
    return theta


# -------------------------------------------------------------- free primes


def _realize_free(builder: _Builder, p, log):
    sysm = builder.sysm
    G = sysm.group[p]
    lows = sorted(sysm.poset.strict_down(p))
    if not lows:
        # minimal free prime: a sink (its group is trivial by validation)
        builder.add_free(p, [])
        return
    L = builder.lower_verts(p)
    amb = FGAbelianGroup(len(L), builder.ambient_rows(L))
    required = [builder.required_image(p, u) for u in L]
    eps = GroupHom(amb, G, [r.coeffs for r in required])
    if not eps.is_well_defined():
        raise ConstructionFailed(
            f"free prime {p}: lower evaluation is not a homomorphism, connecting data incoherent")
    cone = [(u, required[i]) for i, u in enumerate(L)]
    blocks = []
    seen = set()

    def push(ms):
        ms = {u: m for u, m in ms.items() if m}
        if not ms:
            return
        key = tuple(sorted(ms.items()))
        if key not in seen:
            seen.add(key)
            blocks.append(ms)

    for k in kernel_generators(eps):
        coeffs = list(k.coeffs)
        if not any(coeffs):
            continue
        pos = {L[i]: c for i, c in enumerate(coeffs) if c > 0}
        neg = {L[i]: -c for i, c in enumerate(coeffs) if c < 0}
        pos_val = G.zero()
        for u, m in pos.items():
            pos_val = pos_val + m * required[L.index(u)]
        z = _nonneg_preimage(G, -pos_val, cone)
        if z is None:
            raise ConstructionFailed(
                f"free prime {p}: no nonnegative preimage for a kernel generator within bounds")
        push(_merge(pos, z))
        push(_merge(neg, z))
    # make sure the new vertex sees every lower cover class
    def reached():
        hit = set()
        for b in blocks:
            for u in b:
                q = builder.prime_of[u]
                hit |= set(sysm.poset.downset(q))
        return hit

    for q in sysm.poset.lower_covers(p):
        if q in reached():
            continue
        u = builder.class_vertices[q][0]
        z = _nonneg_preimage(G, -required[L.index(u)], cone)
        if z is None:
            raise ConstructionFailed(
                f"free prime {p}: no nonnegative preimage for coverage of {q} within bounds")
        push(_merge({u: 1}, z))
    v = builder.add_free(p, blocks)
    # verify: lower rows plus the block rows present exactly G
    index = {u: i for i, u in enumerate(L)}
    rows = builder.ambient_rows(L)
    for b in blocks:
        row = [0] * len(L)
        for u, m in b.items():
            row[index[u]] += m
        rows.append(row)
    G2 = FGAbelianGroup(len(L), rows)
    theta = _check_theta(G2, G, [r.coeffs for r in required], p)
    if theta is None:
        raise ConstructionFailed(f"free prime {p}: verification of the presented group failed")
    log.append(f"free {p}: vertex {v}, {len(blocks)} block(s)")


# ----------------------------------------------------------- regular primes


def _general_search(builder, p, G, L, required, W, pieces, R_L, budget):
    """Direct search over small out-map rows, one per gadget vertex.

    The staged construction fixes each row to core + padding + pinning
    vectors, which misses class shapes whose generators arrive from the
    lower part.  Here every candidate row is just a small nonnegative
    vector in the value kernel, so any shape within the size bound is
    reachable.  Returns (out_maps, vertex values) or None.
    """
    sysm = builder.sysm
    cg = G.canonical_generators()
    f = G.free_rank
    facs = G.invariant_factors
    covers = list(sysm.poset.lower_covers(p))
    order = W + L
    n = len(order)
    nW = len(W)
    if n > 16:
        return None
    tors_ix = [i for i, piece in enumerate(pieces) if piece[0] == "tors"]

    for mask in range(1 << len(tors_ix)):
        # torsion gadget vertices carry their generator, or zero when the
        # mask says the generator is expected to arrive from below
        tval = {}
        ti = 0
        for i, piece in enumerate(pieces):
            if piece[0] == "pair":
                _, a, b = piece
                k = sum(1 for pc in pieces[:i] if pc[0] == "pair")
                tval[a] = cg[k]
                tval[b] = -cg[k]
            elif piece[0] == "tors":
                _, w, _ = piece
                k = sum(1 for pc in pieces[:i] if pc[0] == "tors")
                tval[w] = G.zero() if mask & (1 << ti) else cg[f + k]
                ti += 1
            else:
                tval[piece[1]] = G.zero()
        gens = list(required) + [tval[w] for w in W]
        if not all(subgroup_membership(gens, c) for c in cg):
            continue
        values = [tval[w] for w in W] + list(required)

        t = len(facs)
        val_rows = [list(v.canonical()[0]) + list(v.canonical()[1]) for v in values]
        killers = []
        for j, d in enumerate(facs):
            row = [0] * (f + t)
            row[f + j] = d
            killers.append(row)
        if f + t:
            kern = left_kernel(val_rows + killers)
            K_rows = [r[:n] for r in kern]
            K_rows = [r for r in K_rows if any(r)]
        else:
            K_rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        target = _row_hnf(K_rows)
        if not target:
            continue

        # all nonnegative kernel vectors within the size bound; each needs
        # a gadget coordinate so the internal out-degree stays >= 2
        cap = 4 if n <= 10 else 3
        atoms = []
        row = [0] * n

        def walk(i, left, acc):
            if i == n:
                if any(row[:nW]) and acc.is_zero():
                    atoms.append(tuple(row))
                return
            for c in range(left + 1):
                row[i] = c
                walk(i + 1, left - c, acc + c * values[i] if c else acc)
            row[i] = 0

        walk(0, cap, G.zero())
        atoms.sort(key=lambda r: (sum(r), r))
        if len(atoms) > 120:
            atoms = atoms[:120]
        if _row_hnf(list(R_L) + [list(a) for a in atoms]) != target:
            continue

        assign = [None] * nW
        visits = [0]
        cap_visits = 100 * budget

        def finalize():
            out_maps = {}
            for j, w in enumerate(W):
                om = {}
                for k, c in enumerate(assign[j]):
                    if c:
                        om[order[k]] = c
                om[w] = om.get(w, 0) + 1
                out_maps[w] = om
            hit = set()
            for w in W:
                for tgt in out_maps[w]:
                    q0 = builder.prime_of.get(tgt)
                    if q0 is not None:
                        hit |= set(sysm.poset.downset(q0))
            if any(q not in hit for q in covers):
                return None
            if not _strongly_connected(W, out_maps):
                return None
            rows = [list(r) for r in R_L] + [list(a) for a in assign]
            G2 = FGAbelianGroup(n, rows)
            theta = _check_theta(G2, G, [v.coeffs for v in values], p)
            if theta is None:
                return None
            return out_maps, tval

        def rec(i, span_hnf):
            visits[0] += 1
            if visits[0] > cap_visits:
                return None
            if len(target) - len(span_hnf) > nW - i:
                return None
            if i == nW:
                if span_hnf != target:
                    return None
                return finalize()
            for a in atoms:
                assign[i] = a
                got = rec(i + 1, _row_hnf(list(span_hnf) + [list(a)]))
                if got is not None:
                    return got
            assign[i] = None
            return None

        got = rec(0, _row_hnf(R_L))
        if got is not None:
            return got
    return None


def _realize_regular(builder: _Builder, p, rng, budget, log):
    sysm = builder.sysm
    G = sysm.group[p]
    f = G.free_rank
    facs = G.invariant_factors
    L = builder.lower_verts(p)
    amb = FGAbelianGroup(len(L), builder.ambient_rows(L))
    if amb.free_rank > f:
        raise ConstructionInfeasible(
            f"regular prime {p}: the built lower part has free rank {amb.free_rank}, "
            f"but the target group only has free rank {f}; no row set can cancel the difference")
    required = [builder.required_image(p, u) for u in L]
    if L:
        eps = GroupHom(amb, G, [r.coeffs for r in required])
        if not eps.is_well_defined():
            raise ConstructionFailed(
                f"regular prime {p}: lower evaluation is not a homomorphism, connecting data incoherent")
    cg = G.canonical_generators()
    # gadget vertices: pairs for free generators, one vertex per torsion factor,
    # a doubly looped vertex if the group is trivial
    W = []
    tval = {}
    pieces = []
    for i in range(f):
        a = builder.name(f"{p}.{len(W) + 1}")
        b = builder.name(f"{p}.{len(W) + 2}")
        W.extend([a, b])
        tval[a] = cg[i]
        tval[b] = -cg[i]
        pieces.append(("pair", a, b))
    for k, d in enumerate(facs):
        w = builder.name(f"{p}.{len(W) + 1}")
        W.append(w)
        tval[w] = cg[f + k]
        pieces.append(("tors", w, d))
    if not W:
        w = builder.name(f"{p}.1")
        W.append(w)
        tval[w] = G.zero()
        pieces.append(("triv", w))
    order = W + L
    index = {v: i for i, v in enumerate(order)}
    values = [tval[w] for w in W] + list(required)

    def vec(ms):
        row = [0] * len(order)
        for v, m in ms.items():
            row[index[v]] += m
        return row

    # integer kernel of the value assignment
    t = len(facs)
    val_rows = [list(v.canonical()[0]) + list(v.canonical()[1]) for v in values]
    killers = []
    for j, d in enumerate(facs):
        row = [0] * (f + t)
        row[f + j] = d
        killers.append(row)
    if f + t:
        kern = left_kernel(val_rows + killers)
        K_rows = [r[:len(order)] for r in kern]
        K_rows = [r for r in K_rows if any(r)]
    else:
        K_rows = [[1 if i == j else 0 for j in range(len(order))] for i in range(len(order))]
    R_L = []
    for row in builder.ambient_rows(L):
        R_L.append([0] * len(W) + row)

    # core relation carried by each gadget row
    core = {}
    for piece in pieces:
        if piece[0] == "pair":
            _, a, b = piece
            atom = {a: 1, b: 1}
            core[a] = atom
            core[b] = atom
        elif piece[0] == "tors":
            _, w, d = piece
            core[w] = {w: d}
        else:
            w0 = piece[1]
            core[w0] = {w0: 1}
    # ring padding for strong connectivity between pieces
    ring = {w: {} for w in W}
    if len(pieces) > 1:
        for j, piece in enumerate(pieces):
            nxt = pieces[(j + 1) % len(pieces)]
            src = piece[1]
            ring[src] = _merge(ring[src], core[nxt[1]])
    # payload atoms: pinning vectors for the lower vertices
    zetas = []
    tcone = [(w, tval[w]) for w in W]
    for i, u in enumerate(L):
        m = _nonneg_preimage(G, -required[i], tcone)
        if m is None:
            raise ConstructionFailed(
                f"regular prime {p}: no gadget expression for the value of {u} within bounds")
        zetas.append(_merge({u: 1}, m))
    atom_pool = list(zetas)
    for piece in pieces:
        atom_pool.append(core[piece[1]])

    spare_rows = [piece[2] for piece in pieces if piece[0] == "pair"]
    row_order = spare_rows + [w for w in W if w not in spare_rows]

    def coverage_payload(payloads):
        hit = set()
        for w in W:
            for tgt in list(core[w]) + list(ring[w]) + list(payloads.get(w, {})):
                if tgt in builder.prime_of:
                    hit |= set(sysm.poset.downset(builder.prime_of[tgt]))
        extra = {}
        for q in sysm.poset.lower_covers(p):
            if q not in hit:
                u = builder.class_vertices[q][0]
                zi = L.index(u)
                extra = _merge(extra, zetas[zi])
                hit |= set(sysm.poset.downset(q))
        return extra

    def try_candidate(payloads):
        payloads = dict(payloads)
        cov = coverage_payload(payloads)
        if cov:
            w0 = row_order[0]
            payloads[w0] = _merge(payloads.get(w0, {}), cov)
        carried = {}
        for w in W:
            carried[w] = _merge(_merge(core[w], ring[w]), payloads.get(w, {}))
        new_rows = [vec(carried[w]) for w in W]
        N_rows = R_L + new_rows
        # exactness: the rows must span the whole kernel lattice
        if K_rows:
            syz = left_kernel(K_rows)
            rels = list(syz)
            for nrow in N_rows:
                c = solve_left(K_rows, nrow)
                if c is None:
                    return None
                rels.append(c)
            Q = FGAbelianGroup(len(K_rows), rels)
            if not Q.is_trivial():
                return None
        elif any(any(r) for r in N_rows):
            return None
        # materialize and verify the presented group
        out_maps = {}
        for w in W:
            om = dict(carried[w])
            om[w] = om.get(w, 0) + 1
            out_maps[w] = om
        rows = list(R_L)
        for w in W:
            rel = dict(out_maps[w])
            rel[w] = rel.get(w, 0) - 1
            rows.append(vec(rel))
        G2 = FGAbelianGroup(len(order), rows)
        theta = _check_theta(G2, G, [v.coeffs for v in values], p)
        if theta is None:
            return None
        return out_maps

    # deterministic attempts: subsets of the pinning vectors, round-robin
    attempts = 0
    subset_cap = 6
    idxs = list(range(len(zetas)))
    max_size = min(len(idxs), subset_cap)
    for size in range(0, max_size + 1):
        for combo in combinations(idxs, size):
            attempts += 1
            payloads = {}
            for j, zi in enumerate(combo):
                w = row_order[j % len(row_order)]
                payloads[w] = _merge(payloads.get(w, {}), zetas[zi])
            out_maps = try_candidate(payloads)
            if out_maps is not None:
                builder.add_regular(p, W, out_maps, tval)
                log.append(f"regular {p}: vertices {', '.join(W)}, "
                           f"{size} pinned connector group(s), attempt {attempts}")
                return
            if attempts > 3 * budget:
                break
        if attempts > 3 * budget:
            break
    # fallback: direct enumeration of small kernel rows, one per vertex
    got = _general_search(builder, p, G, L, required, W, pieces, R_L, budget)
    if got is not None:
        out_maps, tv2 = got
        builder.add_regular(p, W, out_maps, tv2)
        log.append(f"regular {p}: vertices {', '.join(W)}, direct kernel row search")
        return
    # randomized attempts
    for _ in range(budget):
        attempts += 1
        payloads = {}
        for w in row_order:
            if rng.random() < 0.4:
                continue
            npick = 1 + (rng.random() < 0.3)
            acc = {}
            for _ in range(int(npick)):
                atom = rng.choice(atom_pool)
                mult = rng.randint(1, 2)
                acc = _merge(acc, {k: v * mult for k, v in atom.items()})
            payloads[w] = acc
        out_maps = try_candidate(payloads)
        if out_maps is not None:
            builder.add_regular(p, W, out_maps, tval)
            log.append(f"regular {p}: vertices {', '.join(W)}, randomized attempt {attempts}")
            return
    raise ConstructionFailed(
        f"regular prime {p}: no row set matched the kernel lattice after {attempts} attempts")


# --------------------------------------------------------------------- api


def realize(system: ISystem, *, seed: int = 0, budget: int = 200,
            validate: bool = True) -> RealizeResult:
    """Construct a graph whose extracted system is isomorphic to `system`."""
    log = []
    if validate:
        rep = validate_isystem(system)
        if rep.status == COUNTEREXAMPLE:
            msgs = "; ".join(fl.detail for fl in rep.failures[:3])
            raise ValueError(f"system fails validation: {msgs}")
        if rep.status == INCONCLUSIVE:
            log.append("warning: validation inconclusive within bounds, proceeding")
    rng = random.Random(seed)
    builder = _Builder(system)
    for p in system.poset.linear_extension():
        if system.kind[p] == "free":
            _realize_free(builder, p, log)
        else:
            _realize_regular(builder, p, rng, budget, log)
    graph = builder.to_graph()
    report = check_adaptable(graph)
    if not report.ok:
        raise ConstructionFailed(
            "built graph is not adaptable: " + "; ".join(sorted(report.violation_clauses())))
    for p, verts in builder.class_vertices.items():
        classes = {report.condensation.class_of[v] for v in verts}
        if len(classes) != 1:
            raise ConstructionFailed(f"vertices of prime {p} split into several classes")
        cid = classes.pop()
        if set(report.condensation.members[cid]) != set(verts):
            raise ConstructionFailed(f"class of prime {p} absorbed foreign vertices")
        if report.kinds[cid] != system.kind[p]:
            raise ConstructionFailed(
                f"prime {p} realized as {report.kinds[cid]}, wanted {system.kind[p]}")
    return RealizeResult(graph, dict(builder.class_vertices), dict(builder.val), log)


@dataclass
class RoundtripReport:
    status: str               # Verified | FailedAt | InconclusiveWithinBound
    poset_map: dict | None = None
    detail: str = ""


def roundtrip_check(system: ISystem, graph: SepGraph, box: int = 4,
                    branch: int = 64) -> RoundtripReport:
    """Compare a system against the extraction of a (realized) graph.

    Searches for a kind-preserving poset isomorphism together with a
    family of group isomorphisms commuting with all connecting maps.
    """
    ext = extract_isystem(graph)

    def sig_o(p):
        return (system.kind[p], system.group[p].invariant_factors, system.group[p].free_rank)

    def sig_e(c):
        return (ext.kind[c], ext.group[c].invariant_factors, ext.group[c].free_rank)

    saw_any_psi = False
    saw_inconclusive = False
    order = system.poset.linear_extension()
    for psi in system.poset.isomorphisms(ext.poset, sig_o, sig_e):
        saw_any_psi = True
        theta = {}

        def assign(i):
            nonlocal saw_inconclusive
            if i == len(order):
                return True
            p = order[i]
            constraints = []
            for q in sorted(system.poset.strict_down(p)):
                cm_e = ext.map_for(psi[p], psi[q])
                cm_o = system.map_for(p, q)
                gq = ext.group[psi[q]]
                for gi in range(gq.ngens):
                    lhs = ext.group[psi[p]].element(cm_e.hom.matrix[gi])
                    rhs = cm_o.hom(theta[q](gq.gen(gi)))
                    constraints.append((lhs, rhs))
                if (cm_e.unit is None) != (cm_o.unit is None):
                    return False
                if cm_e.unit is not None:
                    constraints.append((cm_e.unit, cm_o.unit))
            tried = 0
            for fiso in iter_isomorphisms(ext.group[psi[p]], system.group[p], constraints, box):
                theta[p] = fiso
                if assign(i + 1):
                    return True
                tried += 1
                if tried >= branch:
                    break
            theta.pop(p, None)
            if tried == 0 and system.group[p].free_rank > 0:
                saw_inconclusive = True
            return False

        if assign(0):
            return RoundtripReport("Verified", psi)
    if not saw_any_psi:
        return RoundtripReport("FailedAt", None,
                               "no kind- and group-compatible poset isomorphism")
    if saw_inconclusive:
        return RoundtripReport("InconclusiveWithinBound", None,
                               "free parts exhausted the bounded isomorphism search")
    return RoundtripReport("FailedAt", None,
                           "no compatible family of group isomorphisms")
