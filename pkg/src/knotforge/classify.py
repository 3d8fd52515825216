"""The three-way partition driving the two-step construction.

A prime alternating shadow is class A when one restricted D or ROTS
application reaches it from one crossing size down (structurally: a
negative group of size two or more, or a rots tangle that collapses to
a negative 2-subgroup).  Class B is one OTS or turn move away from
class A.  Class C is everything else.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import Diagram
from .operators import (
    apply_OTS,
    apply_T,
    enumerate_sites,
    find_negative_rots_tangles,
)
from .tangles import find_groups, group_of_map

__all__ = [
    "ClassLabel",
    "is_KA",
    "find_interleaved_2_sequences",
    "find_ots_2_subgroups",
    "is_KB_structural",
    "is_KB_operational",
    "classify",
]


@dataclass(frozen=True)
class ClassLabel:
    value: str  # "K_A" | "K_B" | "K_C"
    witnesses: tuple


def is_KA(d: Diagram):
    """(flag, witnesses): a negative group of size >= 2 or a rots
    tangle with a negative underlying 2-subgroup."""
    witnesses = []
    for g in sorted(find_groups(d), key=lambda g: g.crossings):
        if g.sign < 0 and len(g) >= 2:
            witnesses.append(("negative-group", g.crossings))
    for m in find_negative_rots_tangles(d):
        witnesses.append(("rots-tangle", m[:3]))
    return bool(witnesses), tuple(witnesses)


def _positive_2_subgroups(d: Diagram, groups):
    """Adjacent crossing pairs inside positive groups, with their bigon
    edge ids."""
    p = d.pairing
    out = []
    for g in groups:
        if g.sign <= 0 or len(g) < 2:
            continue
        cr = g.crossings
        pairs = [(cr[i], cr[i + 1]) for i in range(len(cr) - 1)]
        if g.cyclic:
            pairs.append((cr[-1], cr[0]))
        for a, b in pairs:
            arcs = tuple(
                sorted(
                    min(4 * a + s, p[4 * a + s])
                    for s in range(4)
                    if (p[4 * a + s] >> 2) == b
                )
            )
            if len(arcs) == 2:
                out.append(((a, b), arcs))
    return out


def find_interleaved_2_sequences(d: Diagram):
    """Pairs of disjoint positive 2-subgroups whose bigon arcs alternate
    around the knot (one arc of each, then the second of each)."""
    groups = find_groups(d)
    subs = _positive_2_subgroups(d, groups)
    walk = d.full_traversal()
    p = d.pairing
    pos = {}
    n2 = len(walk)
    for i in range(n2):
        e = min(walk[i], p[walk[i]])
        pos[e] = i
    out = []
    for i in range(len(subs)):
        (pa, arcs_a) = subs[i]
        ia = sorted(pos[e] for e in arcs_a)
        for j in range(i + 1, len(subs)):
            (pb, arcs_b) = subs[j]
            if set(pa) & set(pb):
                continue
            ib = sorted(pos[e] for e in arcs_b)
            inside = sum(1 for t in ib if ia[0] < t < ia[1])
            if inside == 1:
                out.append((pa, pb))
    return out


def find_ots_2_subgroups(d: Diagram):
    """Intrinsic detector for the spread-pair pattern: two triangular
    faces sharing an edge, whose far corners x and y would bigon into a
    2-subgroup after one OTS.  Returns (x, y, shared edge, sign)."""
    from .diagram import rot_next

    p = d.pairing
    m = 4 * d.n
    face_of = [-1] * m
    faces = []
    for h0 in range(m):
        if face_of[h0] >= 0:
            continue
        cyc = []
        h = h0
        while face_of[h] < 0:
            face_of[h] = len(faces)
            cyc.append(h)
            h = rot_next(p[h])
        faces.append(tuple(cyc))
    entries = set(d.full_traversal())
    out = []
    for h, h2 in d.edges():
        u, v = h >> 2, h2 >> 2
        if u == v:
            continue
        f1, f2 = faces[face_of[h]], faces[face_of[h2]]
        if len(f1) != 3 or len(f2) != 3:
            continue
        c1 = {t >> 2 for t in f1}
        c2 = {t >> 2 for t in f2}
        if not (u in c1 and v in c1 and u in c2 and v in c2):
            continue
        xs = c1 - {u, v}
        ys = c2 - {u, v}
        if len(xs) != 1 or len(ys) != 1:
            continue
        x, y = xs.pop(), ys.pop()
        if x == y:
            continue
        # Virtual pair sign from x's two arcs that leave the pattern.
        ends = [
            4 * x + s
            for s in range(4)
            if (p[4 * x + s] >> 2) not in (u, v)
        ]
        if len(ends) != 2:
            continue
        ins = sum(1 for t in ends if t in entries)
        sign = 1 if ins != 1 else -1
        out.append((x, y, min(h, h2), sign))
    return out


def _ots_probe_images(d: Diagram):
    for site in enumerate_sites(d, "OTS"):
        yield apply_OTS(d, site)


def is_KB_structural(d: Diagram):
    """(flag, witnesses) per the defining structures.

    Positive groups of size three or more and interleaved 2-sequences
    are detected directly; the two 6-tangle shapes are detected
    operationally, as a single OTS move whose image is class A (one
    shape leaves a rots tangle behind, the other a negative group).
    """
    ka, _ = is_KA(d)
    if ka:
        return False, ()
    witnesses = []
    groups = find_groups(d)
    for g in sorted(groups, key=lambda g: g.crossings):
        if g.sign > 0 and len(g) >= 3:
            witnesses.append(("positive-group", g.crossings))
    for pair in find_interleaved_2_sequences(d):
        witnesses.append(("interleaved-2-sequence", pair))
    for site in enumerate_sites(d, "OTS"):
        img = apply_OTS(d, site)
        from .tangles import find_groups as fg

        neg = [g for g in fg(img) if g.sign < 0 and len(g) >= 2]
        rots = find_negative_rots_tangles(img)
        if rots:
            witnesses.append(("ots-rots-tangle", site.locus))
        if neg:
            witnesses.append(("negative-ots-2-group", site.locus))
    return bool(witnesses), tuple(witnesses)


def is_KB_operational(d: Diagram) -> bool:
    """Obtainable from a class A configuration by one OTS move or one
    turn of a positive 2-group.

    Both moves are self-inverse, so this probes forward: some OTS image
    is class A, or turning some positive 2-subgroup of d (the image of
    the turned 2-group may sit inside a larger group here) is class A.
    """
    ka, _ = is_KA(d)
    if ka:
        return False
    for site in enumerate_sites(d, "OTS"):
        if is_KA(apply_OTS(d, site))[0]:
            return True
    groups = find_groups(d)
    for (pair, _arcs) in _positive_2_subgroups(d, groups):
        if is_KA(apply_T(d, pair))[0]:
            return True
    return False


def classify(d: Diagram) -> ClassLabel:
    ka, wits = is_KA(d)
    if ka:
        return ClassLabel("K_A", wits)
    kb, wits = is_KB_structural(d)
    if kb:
        return ClassLabel("K_B", wits)
    return ClassLabel("K_C", ())
