"""Groups, tangles, orbits and flype moves on knot shadows.

A group is a maximal bigon chain of crossings; a tangle is a connected
crossing set with exactly four incident edges.  Flype moves carry a
crossing across a tangle, reflecting it.  The closure machinery works
with single-crossing moves: carrying one crossing across the minimal
tangle next to it generates every flype-reachable configuration.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import Diagram, rot_next, validate
from .errors import InvalidDiagram, NotApplicable

__all__ = [
    "Group",
    "Orbit",
    "FlypeScenario",
    "find_groups",
    "group_of_map",
    "find_2_tangles",
    "is_prime",
    "is_reduced",
    "all_tangles",
    "min_tangle",
    "compute_orbit",
    "compute_core",
    "enumerate_crossing_flype_scenarios",
    "enumerate_flype_scenarios",
    "flype_moves",
    "apply_flype",
    "to_full_group",
]


@dataclass(frozen=True)
class Group:
    """A maximal bigon chain.

    ``crossings`` lists the chain in order;  ``ends`` holds the two
    half-edge pairs at the chain ends (None for the cyclic chain of a
    (2, n) torus shadow).  Loners carry sign +1 by convention; their
    ``ends`` pair the four arcs the way the flype structure demands
    (see ``_loner_ends``).
    """

    crossings: tuple
    sign: int
    cyclic: bool
    ends: tuple | None

    def __len__(self):
        return len(self.crossings)


@dataclass(frozen=True)
class Orbit:
    """The ring of min-tangles a group can flype around.

    ``positions[i]`` marks the junction before ``min_tangles[i]``:
    ("group", crossings) for a shared-crossing junction, ("edges",
    (e, f)) for a bare position pair.  positions[0] is always ("group",
    crossings of the orbit's own group).  ``position_pairs[i]`` is the
    (near pair, far pair) of edge ids of min-tangle i.  A torus shadow
    degenerates to the singleton orbit (no tangles).
    """

    group: Group
    positions: tuple
    min_tangles: tuple
    position_pairs: tuple


@dataclass(frozen=True)
class FlypeScenario:
    """A series decomposition: the group plus two tangles in a ring.

    ``arcs_to_t1``/``arcs_to_t2`` are the edge ids joining the group's
    end arcs to each tangle (two each); ``joins`` the two edges between
    t1 and t2.
    """

    group: Group
    t1: frozenset
    t2: frozenset
    arcs_to_t1: tuple
    arcs_to_t2: tuple
    joins: tuple


# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------

def _edge_directions(d: Diagram):
    """Map edge id (lower half-edge) -> (tail, head) crossings along the
    strand walk."""
    walk = d.full_traversal()
    out = {}
    n2 = len(walk)
    for i in range(n2):
        h_exit = walk[i] ^ 2
        h_entry = walk[(i + 1) % n2]
        e = min(h_exit, h_entry)
        out[e] = (h_exit >> 2, h_entry >> 2)
    return out


def _entry_slots(d: Diagram):
    """For each crossing, the two entry half-edges of the strand walk."""
    ins = [[] for _ in range(d.n)]
    for h in d.full_traversal():
        ins[h >> 2].append(h)
    return ins


def _loner_ends(d: Diagram, c, adj=None):
    """End pairing for a loner.

    Preferred: the pairing whose two pairs each admit a flype of c (at
    most one pairing can, and then the pairs are the ring junctions).
    Fallback: the positive-group convention, pairing the two inbound
    arcs together.
    """
    p = d.pairing
    if adj is None:
        adj = _adjacency(d)
    for t in (0, 1):
        pair_a = (4 * c + t, 4 * c + t + 1)
        pair_b = (4 * c + ((t + 2) & 3), 4 * c + ((t + 3) & 3))
        uv = frozenset(p[h] >> 2 for h in pair_a)
        wz = frozenset(p[h] >> 2 for h in pair_b)
        if uv & wz:
            continue
        side = _min_cut_side(d, adj, uv, wz, dead_vertex=c)
        if side is not None:
            return (pair_a, pair_b)
    ins = _entry_slots(d)[c]
    outs = tuple(sorted(h ^ 2 for h in ins))
    return (tuple(sorted(ins)), outs)


def find_groups(d: Diagram):
    """Partition the crossings into maximal bigon chains with signs."""
    if d._visits is None:
        d.full_traversal()
    p = d.pairing
    n = d.n
    # Multiplicity of edges between crossing pairs.
    partners = [{} for _ in range(n)]
    for h, h2 in d.edges():
        a, b = h >> 2, h2 >> 2
        if a == b:
            continue
        partners[a][b] = partners[a].get(b, 0) + 1
        partners[b][a] = partners[b].get(a, 0) + 1
    bigon = [sorted(b for b, k in partners[c].items() if k >= 2) for c in range(n)]

    dirs = _edge_directions(d)
    bigon_edges = {}
    for h, h2 in d.edges():
        a, b = h >> 2, h2 >> 2
        if a != b and partners[a].get(b, 0) >= 2:
            bigon_edges.setdefault(frozenset((a, b)), []).append(min(h, h2))

    def chain_sign(a, b):
        e1, e2 = bigon_edges[frozenset((a, b))][:2]
        return 1 if dirs[e1] == dirs[e2] else -1

    seen = [False] * n
    groups = []
    adj_cache = None
    for c0 in range(n):
        if seen[c0]:
            continue
        if not bigon[c0]:
            seen[c0] = True
            if adj_cache is None:
                adj_cache = _adjacency(d)
            groups.append(
                Group((c0,), 1, False, _loner_ends(d, c0, adj_cache))
            )
            continue
        # Walk the chain to one extremity (or detect a cycle).
        chain = [c0]
        seen[c0] = True
        cyclic = False
        for first_dir in bigon[c0]:
            prev, cur = c0, first_dir
            while True:
                if cur == c0:
                    cyclic = True
                    break
                chain.append(cur)
                seen[cur] = True
                nxts = [x for x in bigon[cur] if x != prev]
                if not nxts:
                    break
                prev, cur = cur, nxts[0]
            if cyclic:
                break
            chain.reverse()
        if cyclic:
            # Reorder to start at the lowest id, heading to its lower
            # neighbour, so the tuple is deterministic.
            start = min(chain)
            i = chain.index(start)
            chain = chain[i:] + chain[:i]
            if len(chain) > 2 and chain[-1] < chain[1]:
                chain = [chain[0]] + chain[1:][::-1]
            groups.append(Group(tuple(chain), chain_sign(chain[0], chain[1]), True, None))
            continue
        if chain[0] > chain[-1]:
            chain.reverse()
        c_first, c_last = chain[0], chain[-1]
        end_a = tuple(
            sorted(h for h in range(4 * c_first, 4 * c_first + 4)
                   if (p[h] >> 2) != (chain[1] if len(chain) > 1 else -1))
        )
        end_b = tuple(
            sorted(h for h in range(4 * c_last, 4 * c_last + 4)
                   if (p[h] >> 2) != chain[-2])
        )
        groups.append(
            Group(tuple(chain), chain_sign(chain[0], chain[1]), False, (end_a, end_b))
        )
    return groups


def group_of_map(d: Diagram, groups=None):
    """crossing id -> its Group."""
    if groups is None:
        groups = find_groups(d)
    out = {}
    for g in groups:
        for c in g.crossings:
            out[c] = g
    return out


# ---------------------------------------------------------------------------
# Primality and 2-tangles
# ---------------------------------------------------------------------------

def is_reduced(d: Diagram) -> bool:
    """No loop edge (no nugatory crossing)."""
    return all((d.pairing[h] >> 2) != (h >> 2) for h in range(4 * d.n))


def _face_pairs(d: Diagram):
    """Edge id -> frozenset of its two face ids."""
    p = d.pairing
    m = 4 * d.n
    face_id = [-1] * m
    nf = 0
    for h0 in range(m):
        if face_id[h0] >= 0:
            continue
        h = h0
        while face_id[h] < 0:
            face_id[h] = nf
            h = rot_next(p[h])
        nf += 1
    out = {}
    for h, h2 in d.edges():
        out[h] = (face_id[h], face_id[h2])
    return out


def is_prime(d: Diagram) -> bool:
    """True iff the shadow has no 2-tangle.

    In a planar 4-regular map a minimal 2-edge cut is a pair of edges
    bordering the same two faces (a dual 2-cycle), so the loop-free
    case reduces to a duplicate test on face pairs.
    """
    if not is_reduced(d):
        return not find_2_tangles(d)
    seen = set()
    for e, fp in _face_pairs(d).items():
        key = frozenset(fp)
        if key in seen:
            return False
        seen.add(key)
    return True


def find_2_tangles(d: Diagram):
    """All crossing sets with exactly two incident edges.

    Enumerates 2-edge cuts; each cut contributes both of its sides.
    Empty iff the shadow is prime.
    """
    edges = [h for h, _ in d.edges()]
    n = d.n
    p = d.pairing
    out = set()
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            cut = {edges[i], edges[j]}
            labels, ncomp = _components_without(d, cut)
            if ncomp != 2:
                continue
            # Both removed edges must join the two sides.
            ok = all(labels[p[e] >> 2] != labels[e >> 2] for e in cut)
            if ok:
                out.add(frozenset(c for c in range(n) if labels[c] == 0))
                out.add(frozenset(c for c in range(n) if labels[c] == 1))
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def _components_without(d: Diagram, cut_edges):
    """Component labels over crossings with some edges removed."""
    n = d.n
    p = d.pairing
    labels = {}
    comp = 0
    for c0 in range(n):
        if c0 in labels:
            continue
        stack = [c0]
        labels[c0] = comp
        while stack:
            c = stack.pop()
            for s in range(4):
                h = 4 * c + s
                e = min(h, p[h])
                if e in cut_edges:
                    continue
                c2 = p[h] >> 2
                if c2 not in labels:
                    labels[c2] = comp
                    stack.append(c2)
        comp += 1
    return labels, comp


def all_tangles(d: Diagram, m=4):
    """Every connected proper crossing subset with exactly m incident
    edges (exhaustive; intended for small diagrams)."""
    n = d.n
    p = d.pairing
    out = []
    for mask in range(1, (1 << n) - 1):
        cells = [c for c in range(n) if mask >> c & 1]
        cut = 0
        for c in cells:
            for s in range(4):
                if not (mask >> (p[4 * c + s] >> 2)) & 1:
                    cut += 1
        if cut != m:
            continue
        # Connectivity of the induced subgraph.
        seen = {cells[0]}
        stack = [cells[0]]
        while stack:
            c = stack.pop()
            for s in range(4):
                c2 = p[4 * c + s] >> 2
                if (mask >> c2) & 1 and c2 not in seen:
                    seen.add(c2)
                    stack.append(c2)
        if len(seen) == len(cells):
            out.append(frozenset(cells))
    return out


# ---------------------------------------------------------------------------
# Minimal tangles via max-flow
# ---------------------------------------------------------------------------

def _adjacency(d: Diagram):
    """Per crossing: list of (edge id, other crossing)."""
    adj = [[] for _ in range(d.n)]
    for h, h2 in d.edges():
        a, b = h >> 2, h2 >> 2
        adj[a].append((h, b))
        if a != b:
            adj[b].append((h, a))
    return adj


def _min_cut_side(d, adj, sources, sinks, dead_vertex=None, dead_edges=()):
    """Source side of a minimum 2-cut between two crossing sets.

    Unit capacities per edge.  Returns the smallest set of crossings
    containing ``sources``, excluding ``sinks`` and ``dead_vertex``,
    with exactly two edges leaving it (besides dead ones), or None when
    the minimum cut exceeds two.  The side returned is the one closest
    to the sources (reachable set in the final residual graph), which
    is the unique minimal tangle by the nesting property of tangles.
    """
    if sources & sinks:
        return None
    used = {}  # edge id -> (tail, head) of the unit of flow it carries

    def bfs():
        parent = {c: None for c in sources}
        queue = list(sources)
        qi = 0
        while qi < len(queue):
            c = queue[qi]
            qi += 1
            for e, c2 in adj[c]:
                if c2 == dead_vertex or e in dead_edges or c2 in parent:
                    continue
                flow = used.get(e)
                if flow is None or flow == (c2, c):
                    parent[c2] = (c, e)
                    if c2 in sinks:
                        return parent, c2
                    queue.append(c2)
        return parent, None

    flow_val = 0
    while True:
        parent, hit = bfs()
        if hit is None:
            break
        flow_val += 1
        if flow_val > 2:
            return None
        c = hit
        while parent[c] is not None:
            prev, e = parent[c]
            if used.get(e) == (c, prev):
                del used[e]
            else:
                used[e] = (prev, c)
            c = prev
    if flow_val != 2:
        # A smaller cut would mean a 2-tangle or disconnection; the
        # callers only pose the question on prime shadows.
        return None
    parent, _ = bfs()
    return frozenset(parent)


def min_tangle(d: Diagram, e, f, a, b):
    """Smallest tangle containing crossings a and b with edges e and f
    among its incident edges, or None when no such tangle exists.

    ``e`` and ``f`` are edge ids (either half-edge of the edge).  The
    endpoints of e and f other than a and b stay outside the tangle.
    """
    p = d.pairing
    ends_e = (e >> 2, p[e] >> 2)
    ends_f = (f >> 2, p[f] >> 2)
    if a not in ends_e:
        raise NotApplicable(f"crossing {a} is not an endpoint of edge {e}")
    if b not in ends_f:
        raise NotApplicable(f"crossing {b} is not an endpoint of edge {f}")
    if min(e, p[e]) == min(f, p[f]):
        raise NotApplicable("e and f must be distinct edges")
    a_far = ends_e[1] if ends_e[0] == a else ends_e[0]
    b_far = ends_f[1] if ends_f[0] == b else ends_f[0]
    sources = frozenset((a, b))
    sinks = frozenset((a_far, b_far))
    if sources & sinks:
        return None
    dead = frozenset(min(h, p[h]) for h in (e, f))
    return _min_cut_side(d, _adjacency(d), sources, sinks, dead_edges=dead)


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------

def _edge_id(d, h):
    return min(h, d.pairing[h])


def _tangle_boundary(d, cells, exclude):
    """Half-edges inside ``cells`` paired outside cells and outside
    ``exclude``; returns list of (inner half, outer half)."""
    p = d.pairing
    out = []
    for c in cells:
        for s in range(4):
            h = 4 * c + s
            q = p[h]
            qc = q >> 2
            if qc not in cells and qc not in exclude:
                out.append((h, q))
    return out


def compute_orbit(d: Diagram, g: Group, side=0) -> Orbit:
    """The ring decomposition a group can flype around.

    ``side`` picks which end pair starts the walk (0 = the pair with
    the lowest half-edge).  A single-group (torus) shadow yields the
    singleton orbit.
    """
    if g.cyclic or len(g.crossings) == d.n:
        return Orbit(g, (("group", g.crossings),), (), ())
    p = d.pairing
    adj = _adjacency(d)
    ends = g.ends
    if side not in (0, 1):
        raise NotApplicable("side must be 0 or 1")
    pairs = sorted(ends, key=min)
    e_pair = pairs[side]
    gset = set(g.crossings)

    positions = [("group", g.crossings)]
    min_tangles = []
    position_pairs = []
    used = set(g.crossings)

    # Current probing pair: half-edges at the current junction, pointing
    # into the unexplored part of the ring.
    cur = e_pair
    while True:
        ha, hb = cur
        fa, fb = p[ha], p[hb]
        a, b = fa >> 2, fb >> 2
        if a in gset or b in gset:
            if not (a in gset and b in gset):
                raise InvalidDiagram("orbit ring does not close on the group")
            break
        sources = frozenset((a, b))
        sinks = frozenset((ha >> 2, hb >> 2))
        dead = frozenset(_edge_id(d, h) for h in cur)
        side_set = _min_cut_side(d, adj, sources, sinks, dead_edges=dead)
        if side_set is None:
            raise InvalidDiagram("no minimal tangle; diagram not prime?")
        if side_set & used:
            raise InvalidDiagram("orbit tangles overlap")
        used |= side_set
        near_pair = tuple(sorted(_edge_id(d, h) for h in cur))
        boundary = _tangle_boundary(d, side_set, ())
        far = [
            (hi, ho)
            for hi, ho in boundary
            if _edge_id(d, hi) not in {_edge_id(d, h) for h in cur}
        ]
        if len(far) != 2:
            raise InvalidDiagram("min-tangle boundary is not four edges")
        far_pair = tuple(sorted(_edge_id(d, hi) for hi, _ in far))
        min_tangles.append(frozenset(side_set))
        position_pairs.append((near_pair, far_pair))

        # Step past the tangle: the far pair points onward.
        nxt = tuple(hi for hi, _ in far)
        fa2, fb2 = p[nxt[0]], p[nxt[1]]
        a2, b2 = fa2 >> 2, fb2 >> 2
        if a2 in gset or b2 in gset:
            if not (a2 in gset and b2 in gset):
                raise InvalidDiagram("orbit ring does not close on the group")
            break
        if a2 == b2:
            # Shared-crossing junction: a whole group sits here.
            jg = _group_containing(d, a2)
            if set(jg.crossings) & used:
                raise InvalidDiagram("junction group overlaps orbit tangles")
            used |= set(jg.crossings)
            positions.append(("group", jg.crossings))
            if len(jg.crossings) == 1:
                c = jg.crossings[0]
                taken = {fa2, fb2}
                cur = tuple(h for h in range(4 * c, 4 * c + 4) if h not in taken)
            else:
                # Far end of the junction group.
                if jg.crossings[0] == a2:
                    far_end = 1
                elif jg.crossings[-1] == a2:
                    far_end = 0
                else:
                    raise InvalidDiagram("junction lands mid-group")
                cur = jg.ends[far_end]
        else:
            positions.append(("edges", tuple(sorted(_edge_id(d, h) for h in nxt))))
            cur = nxt

    return Orbit(g, tuple(positions), tuple(min_tangles), tuple(position_pairs))


def _group_containing(d: Diagram, c):
    for g in find_groups(d):
        if c in g.crossings:
            return g
    raise InvalidDiagram(f"no group contains crossing {c}")


def compute_core(d: Diagram, g: Group):
    """The unique min-tangle of a negative group's orbit whose near or
    far position pair is fully traversed before the other pair, on a
    strand walk leaving the group through its default side."""
    from .errors import PositiveGroupError

    if g.sign >= 0:
        raise PositiveGroupError("core is defined for negative groups only")
    orbit = compute_orbit(d, g, 0)
    if not orbit.min_tangles:
        raise InvalidDiagram("orbit has no min-tangles")
    p = d.pairing
    # Leave the group on the lowest half-edge of the starting side.
    start_half = min(min(pair) for pair in g.ends) if g.ends else None
    exit_half = start_half
    # Edge traversal order from that exit.
    order = {}
    h_exit = exit_half
    idx = 0
    while True:
        e = _edge_id(d, h_exit)
        if e not in order:
            order[e] = idx
            idx += 1
        h_entry = p[h_exit]
        h_exit = h_entry ^ 2
        if h_exit == exit_half:
            break
    core = None
    for t, (near, far) in zip(orbit.min_tangles, orbit.position_pairs):
        ni = sorted(order[e] for e in near)
        fi = sorted(order[e] for e in far)
        if ni[1] < fi[0] or fi[1] < ni[0]:
            if core is not None:
                raise InvalidDiagram("core is not unique")
            core = t
    if core is None:
        raise InvalidDiagram("no core found; group not negative?")
    return core


# ---------------------------------------------------------------------------
# Flype scenarios and moves
# ---------------------------------------------------------------------------

def enumerate_crossing_flype_scenarios(d: Diagram, c):
    """All (s, e, f, t1, t2) with e, f the adjacent arcs of c at slots
    (s, s+1), both incident to tangle t1, and t2 the complementary
    tangle: the flype positions of the single crossing c."""
    if not 0 <= c < d.n:
        raise NotApplicable(f"no crossing {c}")
    p = d.pairing
    adj = _adjacency(d)
    out = []
    allc = frozenset(range(d.n))
    for s in range(4):
        ha, hb = 4 * c + s, 4 * c + ((s + 1) & 3)
        hc, hd = 4 * c + ((s + 2) & 3), 4 * c + ((s + 3) & 3)
        uv = frozenset((p[ha] >> 2, p[hb] >> 2))
        wz = frozenset((p[hc] >> 2, p[hd] >> 2))
        if (uv & wz) or c in uv or c in wz:
            continue
        t1 = _min_cut_side(d, adj, uv, wz, dead_vertex=c)
        if t1 is None:
            continue
        t2 = allc - t1 - {c}
        out.append((s, _edge_id(d, ha), _edge_id(d, hb), t1, frozenset(t2)))
    return out


def _group_attach_arcs(d: Diagram, g: Group):
    """The four half-edges leaving the group through its ends."""
    if g.ends is None:
        return ()
    return tuple(g.ends[0]) + tuple(g.ends[1])


def enumerate_flype_scenarios(d: Diagram):
    """All series decompositions (group, t1, t2).

    For each group, 2-edge cuts of the remainder are enumerated; a cut
    is a scenario when it splits the remainder into two connected
    tangles that each receive exactly two of the group's end arcs.
    """
    out = []
    p = d.pairing
    for g in find_groups(d):
        rest = frozenset(range(d.n)) - set(g.crossings)
        if len(rest) < 2 or g.ends is None:
            continue
        attach = _group_attach_arcs(d, g)
        internal = sorted(
            {
                _edge_id(d, 4 * c + s)
                for c in rest
                for s in range(4)
                if (p[4 * c + s] >> 2) in rest
            }
        )
        seen_splits = set()
        for i in range(len(internal)):
            for j in range(i + 1, len(internal)):
                cut = {internal[i], internal[j]}
                labels, ncomp = _components_without_restricted(d, rest, cut)
                if ncomp != 2:
                    continue
                if any(labels[p[e] >> 2] == labels[e >> 2] for e in cut):
                    continue
                s1 = frozenset(x for x in rest if labels[x] == 0)
                s2 = rest - s1
                arcs1 = tuple(h for h in attach if (p[h] >> 2) in s1)
                arcs2 = tuple(h for h in attach if (p[h] >> 2) in s2)
                if len(arcs1) != 2 or len(arcs2) != 2:
                    continue
                key = (frozenset((s1, s2)), g.crossings)
                if key in seen_splits:
                    continue
                seen_splits.add(key)
                if sorted(s1)[0] > sorted(s2)[0]:
                    s1, s2 = s2, s1
                    arcs1, arcs2 = arcs2, arcs1
                out.append(
                    FlypeScenario(
                        g,
                        s1,
                        s2,
                        tuple(_edge_id(d, h) for h in arcs1),
                        tuple(_edge_id(d, h) for h in arcs2),
                        tuple(sorted(cut)),
                    )
                )
    return out


def _components_without_restricted(d: Diagram, cells, cut_edges):
    """Components of the induced subgraph on ``cells`` minus some edges."""
    p = d.pairing
    labels = {}
    comp = 0
    for c0 in sorted(cells):
        if c0 in labels:
            continue
        stack = [c0]
        labels[c0] = comp
        while stack:
            c = stack.pop()
            for s in range(4):
                h = 4 * c + s
                if min(h, p[h]) in cut_edges:
                    continue
                c2 = p[h] >> 2
                if c2 in cells and c2 not in labels:
                    labels[c2] = comp
                    stack.append(c2)
        comp += 1
    return labels, comp


# ---------------------------------------------------------------------------
# The single-crossing flype surgery
# ---------------------------------------------------------------------------

def _reflect_half(h):
    return (h & ~3) | ((-h) & 3)


def flype_hop(d: Diagram, c, s, adj=None, check=True):
    """Carry crossing c across the minimal tangle its arc pair (s, s+1)
    points at, reflecting the tangle.  Returns the new diagram, or None
    when the pair admits no flype.

    This is the primitive every flype-reachability computation uses:
    larger flypes are compositions of these hops.
    """
    p = d.pairing
    ha = 4 * c + s
    hb = 4 * c + ((s + 1) & 3)
    hc = 4 * c + ((s + 2) & 3)
    hd = 4 * c + ((s + 3) & 3)
    pa, pb, pc_, pd_ = p[ha], p[hb], p[hc], p[hd]
    u, v = pa >> 2, pb >> 2
    w, z = pc_ >> 2, pd_ >> 2
    if c in (u, v, w, z):
        return None
    if u == v:
        # c and u form a bigon: the hop only shifts c along its own
        # chain, an isomorphic diagram.
        return None
    if {u, v} & {w, z}:
        return None
    if adj is None:
        adj = _adjacency(d)
    t1 = _min_cut_side(d, adj, frozenset((u, v)), frozenset((w, z)), dead_vertex=c)
    if t1 is None:
        return None

    # The two edges joining t1 to the rest (not through c).
    joins = _tangle_boundary(d, t1, (c,))
    if len(joins) != 2:
        raise InvalidDiagram("flype tangle boundary is not four edges")
    # North side: the face sweeping the corner between slots s+1 and
    # s+2 of c contains exactly one of the two join edges.
    north_face = set()
    h = hc
    while h not in north_face:
        north_face.add(h)
        h = rot_next(p[h])
    (g1, t1h), (g2, t2h) = joins
    in1 = g1 in north_face or t1h in north_face
    in2 = g2 in north_face or t2h in north_face
    if in1 == in2:
        raise InvalidDiagram("cannot identify the flype's two sides")
    if in1:
        g_n, t_n, g_s, t_s = g1, t1h, g2, t2h
    else:
        g_n, t_n, g_s, t_s = g2, t2h, g1, t1h

    q = list(p)
    refl = _reflect_half
    # Reflect the tangle: reverse each rotation, rewriting internal and
    # boundary pairings.
    for y in t1:
        for t in range(4):
            hy = 4 * y + t
            hp = p[hy]
            if (hp >> 2) in t1:
                q[refl(hy)] = refl(hp)
    # West side: the far arcs of c attach straight onto the reflected
    # tangle, swapping top and bottom.
    q[pc_] = refl(pa)
    q[refl(pa)] = pc_
    q[pd_] = refl(pb)
    q[refl(pb)] = pd_
    # c lands east of the tangle, between it and the old far halves.
    q[hc] = refl(g_s)
    q[refl(g_s)] = hc
    q[hd] = refl(g_n)
    q[refl(g_n)] = hd
    q[hb] = t_n
    q[t_n] = hb
    q[ha] = t_s
    q[t_s] = ha
    out = Diagram(q)
    if check:
        if len(out.strand_visits(0)) != 2 * out.n:
            raise InvalidDiagram("flype broke the strand")
        from .diagram import _face_count

        if out.n - 2 * out.n + _face_count(out) != 2:
            raise InvalidDiagram("flype broke planarity")
    return out


def flype_moves(d: Diagram, adj=None):
    """All diagrams one single-crossing flype away from d."""
    if adj is None:
        adj = _adjacency(d)
    out = []
    for c in range(d.n):
        for s in range(4):
            nd = flype_hop(d, c, s, adj)
            if nd is not None:
                out.append(nd)
    return out


def apply_flype(d: Diagram, scenario: FlypeScenario, k: int) -> Diagram:
    """Flype k crossings of the scenario's group across t1.

    Realized as k single-crossing hops of successive end crossings,
    each across the minimal tangle on its t1 side (which contains t1;
    in degenerate ring positions it may be larger).  The result is
    always a valid diagram of the same knot and crossing count.
    """
    g = scenario.group
    if not 1 <= k <= len(g.crossings):
        raise NotApplicable(f"k must be in 1..{len(g.crossings)}")
    cur = d
    remaining = list(g.crossings)
    for _ in range(k):
        # Prefer an end crossing whose hop tangle meets t1.
        best = None
        for c in dict.fromkeys((remaining[0], remaining[-1])):
            for s in range(4):
                t1 = _hop_probe(cur, c, s)
                if t1 is None:
                    continue
                score = (
                    len(t1 & scenario.t1) - len(t1 & scenario.t2),
                    -len(t1),
                    -c,
                    -s,
                )
                if best is None or score > best[0]:
                    best = (score, c, s)
        if best is None:
            raise NotApplicable("group admits no flype move")
        _, c, s = best
        cur = flype_hop(cur, c, s)
        remaining.remove(c)
        if not remaining:
            break
    return cur


def _hop_probe(d: Diagram, c, s):
    """The tangle a hop (c, s) would cross, or None."""
    p = d.pairing
    ha = 4 * c + s
    hb = 4 * c + ((s + 1) & 3)
    hc = 4 * c + ((s + 2) & 3)
    hd = 4 * c + ((s + 3) & 3)
    u, v = p[ha] >> 2, p[hb] >> 2
    w, z = p[hc] >> 2, p[hd] >> 2
    if c in (u, v, w, z) or u == v or ({u, v} & {w, z}):
        return None
    return _min_cut_side(
        d, _adjacency(d), frozenset((u, v)), frozenset((w, z)), dead_vertex=c
    )


def to_full_group(d: Diagram) -> Diagram:
    """Group-flype split groups together until every group is full.

    The first junction group of a split orbit is carried back across
    the intervening min-tangles, one crossing at a time, until its
    crossings bigon onto the orbit's base group.  Each merge lowers the
    group count, so at most (initial group count - 1) merges happen.
    """
    cur = d
    guard = 4 * d.n + 4
    while guard:
        guard -= 1
        groups = sorted(find_groups(cur), key=lambda g: g.crossings)
        plan = None
        for g in groups:
            orbit = compute_orbit(cur, g, 0)
            for j, (kind, ids) in enumerate(orbit.positions):
                if j and kind == "group":
                    plan = (orbit, j, ids)
                    break
            if plan:
                break
        if plan is None:
            return cur
        orbit, j, jg_ids = plan
        # Crossing ids survive hops, so the recorded tangles stay valid
        # as id sets while the junction group walks home.
        for _ in range(len(jg_ids)):
            mover = None
            pending = [c for c in jg_ids if mover is None]
            for pos in range(j, 0, -1):
                target = orbit.min_tangles[pos - 1]
                done = False
                cands = pending if mover is None else [mover]
                for c in cands:
                    for s in range(4):
                        p = cur.pairing
                        uv = {p[4 * c + s] >> 2, p[4 * c + ((s + 1) & 3)] >> 2}
                        if not uv <= target:
                            continue
                        t1 = _hop_probe(cur, c, s)
                        if t1 is None or not (t1 & target):
                            continue
                        cur = flype_hop(cur, c, s)
                        mover = c
                        done = True
                        break
                    if done:
                        break
                if not done:
                    raise InvalidDiagram("split-group merge found no hop")
            jg_ids = tuple(x for x in jg_ids if x != mover)
    raise InvalidDiagram("to_full_group did not terminate")
