"""The four construction operators as shadow surgeries.

D and ROTS raise the crossing count by one (crossing -> negative clasp,
2-subgroup -> rots tangle); OTS and T preserve it (triangle strand
slide, quarter turn of a turnable subgroup).  Each surgery rebuilds the
pairing locally and is validated before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import Diagram, rot_next, validate
from .errors import InvalidDiagram, NotApplicable
from .tangles import Group, find_groups

__all__ = [
    "Site",
    "enumerate_sites",
    "apply_site",
    "apply_D",
    "apply_D_inverse",
    "apply_ROTS",
    "apply_ROTS_inverse",
    "apply_OTS",
    "apply_T",
    "find_rots_tangles",
    "find_negative_rots_tangles",
    "rots_tangle_sign",
    "triangle_faces",
]


@dataclass(frozen=True)
class Site:
    """An operator application point.

    kind: 'D' (locus: crossing id), 'ROTS' (ordered 2-subgroup), 'OTS'
    (triangle face as its dart tuple), or 'T2' (positive 2-group).
    """

    kind: str
    locus: object


def _checked(pairing, what):
    d = Diagram(pairing)
    problems = validate(d)
    if problems:
        raise InvalidDiagram(f"{what} produced an invalid diagram: {problems}")
    return d


def _visit_slots(d: Diagram, c):
    """(first entry slot, second entry slot) of crossing c."""
    slots = [h & 3 for h in d.full_traversal() if (h >> 2) == c]
    return slots[0], slots[1]


# ---------------------------------------------------------------------------
# D: crossing -> negative 2-group
# ---------------------------------------------------------------------------

def _d_sites(d, groups):
    out = []
    for g in groups:
        if g.sign < 0 or len(g) == 1 or (len(g) == 2 and g.sign > 0):
            out.extend(Site("D", c) for c in g.crossings)
    return sorted(out, key=lambda s: s.locus)


def apply_D(d: Diagram, site) -> Diagram:
    """Replace one crossing by a clasp of two.

    The two new crossings form a negative 2-subgroup; the strand piece
    between the old crossing's first exit and second entry reverses.
    """
    c = site.locus if isinstance(site, Site) else site
    if not isinstance(c, int) or not 0 <= c < d.n:
        raise NotApplicable(f"no crossing {c}")
    if not any(s.locus == c for s in _d_sites(d, find_groups(d))):
        raise NotApplicable(f"crossing {c} is not a D site")
    return _apply_D_any(d, c)


def _apply_D_any(d: Diagram, c) -> Diagram:
    alpha, beta = _visit_slots(d, c)
    p = d.pairing
    a_far = p[4 * c + alpha]
    b_far = p[4 * c + (alpha ^ 2)]
    c_far = p[4 * c + beta]
    d_far = p[4 * c + (beta ^ 2)]
    y = c
    z = d.n
    q = list(p) + [-1, -1, -1, -1]

    def join(u, v):
        q[u] = v
        q[v] = u

    if beta == (alpha + 3) & 3:
        # ccw order at c is (a, d, b, c).
        join(4 * y + 0, a_far)
        join(4 * y + 1, d_far)
        join(4 * z + 2, b_far)
        join(4 * z + 3, c_far)
        join(4 * y + 2, 4 * z + 1)
        join(4 * y + 3, 4 * z + 0)
    else:
        # Mirror case: ccw order (a, c, b, d).
        join(4 * y + 0, a_far)
        join(4 * y + 3, d_far)
        join(4 * z + 2, b_far)
        join(4 * z + 1, c_far)
        join(4 * y + 2, 4 * z + 3)
        join(4 * y + 1, 4 * z + 0)
    return _checked(q, "D")


def _relabel_drop(q, n_new, dropped):
    """Drop crossing ids in ``dropped`` and compact by moving the top
    ids down; q is a pairing over the old id space with dead slots."""
    old_ids = [c for c in range(n_new + len(dropped)) if c not in dropped]
    remap = {old: new for new, old in enumerate(old_ids)}
    out = [-1] * (4 * n_new)
    for old, new in remap.items():
        for s in range(4):
            t = q[4 * old + s]
            out[4 * new + s] = 4 * remap[t >> 2] + (t & 3)
    return out


def apply_D_inverse(d: Diagram, locus) -> Diagram:
    """Contract an adjacent pair of a negative group back to one
    crossing."""
    y, z = locus
    groups = find_groups(d)
    host = None
    for g in groups:
        cr = g.crossings
        for i in range(len(cr) - (0 if g.cyclic else 1)):
            pair = {cr[i], cr[(i + 1) % len(cr)]}
            if pair == {y, z}:
                host = g
    if host is None:
        raise NotApplicable(f"{y},{z} is not an adjacent pair of a group")
    if host.sign >= 0:
        raise NotApplicable("D inverse needs a negative group")
    p = d.pairing
    rails_y = sorted(s for s in range(4) if (p[4 * y + s] >> 2) == z)
    if len(rails_y) != 2:
        raise NotApplicable("pair is not joined by exactly two edges")
    py = _consecutive_start(tuple(s for s in range(4) if s not in rails_y))
    qz = _consecutive_start(
        tuple(s for s in range(4) if (p[4 * z + s] >> 2) != y)
    )
    q = list(p)
    x = y

    far = [
        p[4 * y + py],
        p[4 * y + ((py + 1) & 3)],
        p[4 * z + qz],
        p[4 * z + ((qz + 1) & 3)],
    ]
    for s, f in enumerate(far):
        q[4 * x + s] = f
        q[f] = 4 * x + s
    return _checked(_relabel_drop(q, d.n - 1, {z}), "D inverse")


def _consecutive_start(slots):
    """Start of a cyclically consecutive slot pair."""
    a, b = slots
    if (a + 1) & 3 == b:
        return a
    if (b + 1) & 3 == a:
        return b
    raise NotApplicable("group rails occupy opposite slots")


# ---------------------------------------------------------------------------
# ROTS: 2-subgroup -> rots tangle
# ---------------------------------------------------------------------------

def _rots_sites(d, groups):
    out = []
    for g in groups:
        if g.sign < 0 and len(g) in (2, 3) and not g.cyclic:
            cr = g.crossings
            for i in range(len(cr) - 1):
                out.append(Site("ROTS", (cr[i], cr[i + 1])))
    return out


def apply_ROTS(d: Diagram, site) -> Diagram:
    """Rewind one bigon of a 2-subgroup into a three-crossing rots
    tangle (one extra crossing; strand order preserved).

    With the subgroup's boundary in block order (a0, a1, b0, b1), the
    rewound tangle keeps a0 on one bigon crossing and b1 on the other;
    the new crossing W is the self-crossing of the wound strand and
    carries a1 and b0.
    """
    x, y = site.locus if isinstance(site, Site) else site
    p = d.pairing
    if x == y or not (0 <= x < d.n and 0 <= y < d.n):
        raise NotApplicable(f"{x},{y} is not a 2-subgroup")
    rails_x = sorted(s for s in range(4) if (p[4 * x + s] >> 2) == y)
    if len(rails_x) != 2:
        raise NotApplicable(f"{x},{y} is not a 2-subgroup")
    px = _consecutive_start(tuple(s for s in range(4) if s not in rails_x))
    # Align y's frame to the rails: x's slot px+2 meets y at qy+3.
    qy = ((p[4 * x + ((px + 2) & 3)] & 3) + 1) & 3
    if p[4 * y + ((qy + 2) & 3)] != 4 * x + ((px + 3) & 3):
        raise NotApplicable("bigon rails are not planar-parallel")
    a0 = p[4 * x + px]
    a1 = p[4 * x + ((px + 1) & 3)]
    b0 = p[4 * y + qy]
    b1 = p[4 * y + ((qy + 1) & 3)]
    X, Z, W = x, y, d.n
    q = list(p) + [-1, -1, -1, -1]

    def join(u, v):
        q[u] = v
        q[v] = u

    # X: (a0, XW, railA, railB) ccw; Z: (b1, railB, railA, ZW);
    # W: (a1, b0, ZW, XW).  The a0 strand runs straight through the
    # bigon to b1; the a1..b0 strand winds through W twice.
    join(4 * X + 0, a0)
    join(4 * Z + 0, b1)
    join(4 * W + 0, a1)
    join(4 * W + 1, b0)
    join(4 * X + 2, 4 * Z + 2)  # rail A
    join(4 * X + 3, 4 * Z + 1)  # rail B
    join(4 * X + 1, 4 * W + 3)  # X-W
    join(4 * Z + 3, 4 * W + 2)  # Z-W
    return _checked(q, "ROTS")


def find_rots_tangles(d: Diagram):
    """All rots tangles: (X, Z, W, orientation) with a bigon {X, Z}, a
    crossing W tied to both by single edges, and the triangle face on
    one rail.  Detected by the slot pattern, in both reflections."""
    p = d.pairing
    out = []
    n = d.n
    for X in range(n):
        for Z in range(n):
            if X == Z:
                continue
            rails = [s for s in range(4) if (p[4 * X + s] >> 2) == Z]
            if len(rails) != 2:
                continue
            for dir_ in (1, -1):
                for s0 in range(4):
                    # X pattern: boundary@s0, rail2@s0+d, rail1@s0+2d, XW@s0+3d
                    r2 = (s0 + dir_) & 3
                    r1 = (s0 + 2 * dir_) & 3
                    xw = (s0 + 3 * dir_) & 3
                    if (p[4 * X + r1] >> 2) != Z or (p[4 * X + r2] >> 2) != Z:
                        continue
                    W = p[4 * X + xw] >> 2
                    if W in (X, Z) or (p[4 * X + s0] >> 2) in (X, Z, W):
                        continue
                    # Z pattern: boundary@z0, ZW@z0+d, rail1@z0+2d, rail2@z0+3d
                    z_r1 = p[4 * X + r1] & 3
                    z0 = (z_r1 - 2 * dir_) & 3
                    if (p[4 * Z + ((z0 + 3 * dir_) & 3)]) != 4 * X + r2:
                        continue
                    zw = (z0 + dir_) & 3
                    if (p[4 * Z + zw] >> 2) != W:
                        continue
                    if (p[4 * Z + z0] >> 2) in (X, Z, W):
                        continue
                    # W pattern: XW@w0, ZW@w0+d, b0@w0+2d, b1@w0+3d
                    w0 = p[4 * X + xw] & 3
                    if p[4 * W + ((w0 + dir_) & 3)] != 4 * Z + zw:
                        continue
                    if (p[4 * W + ((w0 + 2 * dir_) & 3)] >> 2) in (X, Z, W):
                        continue
                    if (p[4 * W + ((w0 + 3 * dir_) & 3)] >> 2) in (X, Z, W):
                        continue
                    out.append((X, Z, W, dir_, s0, z0, w0))
    return out


def rots_tangle_sign(d: Diagram, match):
    """Sign of the 2-subgroup a rots tangle collapses to.

    The preimage subgroup's end arcs are the tangle's a0 and a1 arcs;
    the subgroup is positive when both point the same way (both into or
    both out of the tangle) and negative otherwise.
    """
    X, Z, W, dir_, s0, z0, w0 = match
    p = d.pairing
    walk = d.full_traversal()
    entries = set(walk)
    a0_in = (4 * X + s0) in entries
    a1_in = (4 * W + ((w0 + 3 * dir_) & 3)) in entries
    return -1 if a0_in != a1_in else 1


def find_negative_rots_tangles(d: Diagram):
    """Rots tangles whose collapsed 2-subgroup is negative: the shapes
    one restricted ROTS application can leave behind."""
    return [m for m in find_rots_tangles(d) if rots_tangle_sign(d, m) < 0]


def apply_ROTS_inverse(d: Diagram, locus) -> Diagram:
    """Collapse a rots tangle back to a 2-subgroup."""
    matches = find_rots_tangles(d)
    if isinstance(locus, (tuple, list)) and len(locus) >= 3:
        want = tuple(locus[:3])
        matches = [m for m in matches if m[:3] == want or set(m[:3]) == set(want)]
    if not matches:
        raise NotApplicable(f"{locus} is not a rots tangle")
    X, Z, W, dir_, s0, z0, w0 = matches[0]
    p = d.pairing
    a0 = p[4 * X + s0]
    b1 = p[4 * Z + z0]
    b0 = p[4 * W + ((w0 + 2 * dir_) & 3)]
    a1 = p[4 * W + ((w0 + 3 * dir_) & 3)]
    q = list(p)

    def join(u, v):
        q[u] = v
        q[v] = u

    # Rebuild the 2-subgroup preserving strand order (a0..b1, a1..b0),
    # mirrored to match the tangle's orientation.
    if dir_ == -1:
        join(4 * X + 0, a0)
        join(4 * X + 1, a1)
        join(4 * Z + 0, b0)
        join(4 * Z + 1, b1)
        join(4 * X + 2, 4 * Z + 3)
        join(4 * X + 3, 4 * Z + 2)
    else:
        join(4 * X + 0, a0)
        join(4 * X + 3, a1)
        join(4 * Z + 0, b0)
        join(4 * Z + 3, b1)
        join(4 * X + 2, 4 * Z + 1)
        join(4 * X + 1, 4 * Z + 2)
    return _checked(_relabel_drop(q, d.n - 1, {W}), "ROTS inverse")


# ---------------------------------------------------------------------------
# OTS: triangle strand slide
# ---------------------------------------------------------------------------

def triangle_faces(d: Diagram):
    """Triangular faces whose three distinct crossings induce exactly
    three edges (the OTS sites); each face as its dart tuple rotated to
    start at the least dart."""
    p = d.pairing
    m = 4 * d.n
    seen = bytearray(m)
    out = []
    for h0 in range(m):
        if seen[h0]:
            continue
        cyc = []
        h = h0
        while not seen[h]:
            seen[h] = 1
            cyc.append(h)
            h = rot_next(p[h])
        if len(cyc) != 3:
            continue
        cr = {h >> 2 for h in cyc}
        if len(cr) != 3:
            continue
        induced = 0
        for c in cr:
            for s in range(4):
                if (p[4 * c + s] >> 2) in cr:
                    induced += 1
        if induced != 6:  # three edges, each counted from both ends
            continue
        i = cyc.index(min(cyc))
        out.append(tuple(cyc[i:] + cyc[:i]))
    return out


def apply_OTS(d: Diagram, site) -> Diagram:
    """Slide a strand of an OTS 6-tangle across the opposite crossing.

    The output is independent of which of the three strands moves; this
    implementation slides the strand of the face's first edge across
    the crossing of its third dart.
    """
    face = site.locus if isinstance(site, Site) else site
    face = tuple(face)
    if face not in triangle_faces(d):
        # Accept any rotation of a valid face tuple.
        rots = [tuple(face[i:] + face[:i]) for i in range(3)]
        good = [f for f in triangle_faces(d) for r in rots if f == r]
        if not good:
            raise NotApplicable(f"{face} is not an OTS site")
        face = good[0]
    h1, h2, h3 = face
    p = d.pairing
    x, y = p[h3] >> 2, p[h1] >> 2
    # The moved strand A carries the face's first edge (darts h1 at x,
    # p[h1] at y); B and C are the other two strands, crossing each
    # other at z = crossing(h3).  A is cut and rejoined beyond z, where
    # coming from its x end it crosses B's far arc first, then C's.
    alpha_A = h1 ^ 2
    beta_A = p[h1] ^ 2
    beta_B = h2 ^ 2
    gamma_B = p[h2] ^ 2
    gamma_C = h3 ^ 2
    alpha_C = p[h3] ^ 2
    Ax_far = p[alpha_A]
    Ay_far = p[beta_A]
    By_far = p[beta_B]
    Bz_far = p[gamma_B]
    Cz_far = p[gamma_C]
    Cx_far = p[alpha_C]
    q = list(p)

    def join(u, v):
        q[u] = v
        q[v] = u

    # z keeps its rotation; its four arcs reconnect across the gap the
    # vanished crossings leave.
    join(h3, Cx_far)
    join(p[h2], By_far)
    # x is reused for the new A x B crossing on B's far arc.
    join(4 * x + 0, gamma_B)
    join(4 * x + 2, Bz_far)
    join(4 * x + 1, Ax_far)
    join(4 * x + 3, 4 * y + 0)
    # y is reused for the new A x C crossing on C's far arc.
    join(4 * y + 2, Ay_far)
    join(4 * y + 3, gamma_C)
    join(4 * y + 1, Cz_far)
    return _checked(q, "OTS")


# ---------------------------------------------------------------------------
# T: quarter turn of a turnable subgroup
# ---------------------------------------------------------------------------

def _t2_sites(d, groups):
    return [
        Site("T2", g.crossings)
        for g in groups
        if len(g) == 2 and g.sign > 0 and not g.cyclic
    ]


def _subgroup_host(groups, cells):
    cells = tuple(cells)
    for g in groups:
        cr = g.crossings
        for i in range(len(cr) - len(cells) + 1):
            if cr[i : i + len(cells)] in (cells, cells[::-1]):
                return g
    return None


def _boundary_darts(d: Diagram, cells):
    """Inner darts of the tangle boundary in cyclic order around it."""
    p = d.pairing
    cells = set(cells)
    start = None
    for c in sorted(cells):
        for s in range(4):
            if (p[4 * c + s] >> 2) not in cells:
                start = 4 * c + s
                break
        if start is not None:
            break
    order = []
    h = start
    while True:
        order.append(h)
        t = rot_next(h)
        while (p[t] >> 2) in cells:
            t = rot_next(p[t])
        h = t
        if h == start:
            break
    return order


def apply_T(d: Diagram, locus) -> Diagram:
    """Quarter-turn a turnable subgroup.

    Turnable: a subgroup of size >= 2 of a positive group, or an odd
    subgroup of size >= 3 of a negative group (an even negative turn
    would produce a link).  Outer arc k reconnects to inner stub k+1.
    """
    cells = tuple(locus.locus) if isinstance(locus, Site) else tuple(locus)
    groups = find_groups(d)
    host = _subgroup_host(groups, cells)
    if host is None:
        raise NotApplicable(f"{cells} is not a subgroup")
    k = len(cells)
    if host.sign > 0:
        if k < 2:
            raise NotApplicable("turnable subgroups have size >= 2")
    else:
        if k < 3 or k % 2 == 0:
            raise NotApplicable(
                "only odd subgroups of size >= 3 of a negative group turn"
            )
    if len(cells) == d.n:
        raise NotApplicable("subgroup must be proper to turn")
    inner = _boundary_darts(d, cells)
    if len(inner) != 4:
        raise NotApplicable("subgroup boundary is not four arcs")
    cellset = set(cells)

    # Start at an inner dart whose predecessor shares its end crossing
    # and whose successor sits at the other end of the chain.
    def end_of(dart):
        return dart >> 2

    starts = [
        i
        for i in range(4)
        if end_of(inner[i]) == end_of(inner[i - 1])
        and end_of(inner[(i + 1) % 4]) != end_of(inner[i])
    ]
    if not starts:
        raise NotApplicable("cannot orient the subgroup boundary")
    i0 = min(starts, key=lambda i: inner[i])
    inner = inner[i0:] + inner[:i0]
    p = d.pairing
    outer = [p[h] for h in inner]
    if any((o >> 2) in cellset for o in outer):
        raise NotApplicable("subgroup touches itself; cannot turn")
    q = list(p)
    for i in range(4):
        o = outer[i]
        t = inner[(i + 1) % 4]
        q[o] = t
        q[t] = o
    return _checked(q, "T")


# ---------------------------------------------------------------------------
# Site enumeration and dispatch
# ---------------------------------------------------------------------------

def enumerate_sites(d: Diagram, kind):
    """All application points of one operator kind under the
    construction restrictions."""
    groups = find_groups(d)
    if kind == "D":
        return _d_sites(d, groups)
    if kind == "ROTS":
        return _rots_sites(d, groups)
    if kind == "OTS":
        return [Site("OTS", f) for f in triangle_faces(d)]
    if kind == "T2":
        return _t2_sites(d, groups)
    raise NotApplicable(f"unknown operator kind {kind!r}")


def apply_site(d: Diagram, site: Site) -> Diagram:
    if site.kind == "D":
        return apply_D(d, site)
    if site.kind == "ROTS":
        return apply_ROTS(d, site)
    if site.kind == "OTS":
        return apply_OTS(d, site)
    if site.kind == "T2":
        return apply_T(d, site)
    raise NotApplicable(f"unknown operator kind {site.kind!r}")
