"""Independent brute-force census for small crossing numbers.

The oracle enumerates every closed curve shadow directly: a depth-first
search over double-occurrence sequences interleaved with an incremental
planar embedding, so only embeddable branches are explored.  Shadows
are filtered to reduced and prime, deduplicated by per-diagram code,
and grouped into flype classes.  Nothing here reuses the generation
operators, so the counts it produces check them.
"""

from __future__ import annotations

from .canonical import KeyCache
from .diagram import Diagram, canonical_code, validate
from .tangles import is_prime, is_reduced

__all__ = ["planar_realizations", "enumerate_shadows", "knot_counts"]


def planar_realizations(seq):
    """All planar embeddings of one unsigned double-occurrence sequence.

    Sweep construction: the partial curve's faces are cyclic stub lists;
    visiting a new crossing plants two stubs at the pen, revisiting one
    consumes a stub on the pen's face (anything else cannot be drawn in
    the plane).  Each complete sweep emits a pairing directly.

    Returns a list of Diagrams (one per embedding; isomorphic ones may
    repeat; callers deduplicate).
    """
    seq = list(seq)
    n2 = len(seq)
    if n2 % 2:
        return []
    out = []

    START = -1  # virtual stub for the curve's basepoint

    def close_pairing(pairs, prev_exit, first_entry):
        pairing = [-1] * (4 * (n2 // 2))
        for a, b in pairs:
            pairing[a] = b
            pairing[b] = a
        pairing[prev_exit] = first_entry
        pairing[first_entry] = prev_exit
        return pairing

    def sweep(i, faces, pen_face, pen_gap, open_stubs, label_of, pairs, prev_exit):
        # faces: dict id -> list of stubs (cyclic); pen is in faces[pen_face]
        # with its gap before index pen_gap.
        if i == n2:
            face = faces[pen_face]
            if face == [START]:
                first_entry = 0  # crossing of label 1 entered at slot 0
                out.append(Diagram(close_pairing(pairs, prev_exit, first_entry)))
            return
        lab = seq[i]
        if lab not in label_of:
            # First visit: plant crossing c, stubs at slots 1 and 3.
            c = len(label_of)
            entry = 4 * c
            face = faces[pen_face]
            nf = dict(faces)
            nf[pen_face] = face[:pen_gap] + [4 * c + 1, 4 * c + 3] + face[pen_gap:]
            lo = dict(label_of)
            lo[lab] = c
            np_ = pairs if prev_exit is None else pairs + [(prev_exit, entry)]
            sweep(i + 1, nf, pen_face, pen_gap + 1, open_stubs | {c}, lo, np_, entry ^ 2)
            return
        c = label_of[lab]
        if c not in open_stubs:
            return  # third visit: malformed sequence
        face = faces[pen_face]
        for s in (4 * c + 1, 4 * c + 3):
            if s not in face:
                continue
            idx = face.index(s)
            # The chord from the pen's gap to s splits the face.
            linear = face[pen_gap:] + face[:pen_gap]
            j = linear.index(s)
            side_a = linear[:j]
            side_b = linear[j + 1 :]
            s2 = s ^ 2
            nf = dict(faces)
            del nf[pen_face]
            fa_id = (pen_face, 0)
            fb_id = (pen_face, 1)
            nf[fa_id] = side_a
            nf[fb_id] = side_b
            # Reopen wherever the exit stub lives.
            target = None
            for fid, stubs in nf.items():
                if s2 in stubs:
                    target = fid
                    break
            if target is None:
                continue
            stubs = nf[target]
            k = stubs.index(s2)
            nf[target] = stubs[:k] + stubs[k + 1 :]
            np_ = pairs + [(prev_exit, s)]
            sweep(
                i + 1,
                nf,
                target,
                k,
                open_stubs - {c},
                label_of,
                np_,
                s2,
            )

    sweep(0, {0: [START]}, 0, 1, frozenset(), {}, [], None)
    return out


def _sequences(n):
    """Double-occurrence sequences, labels in first-appearance order,
    with the parity and no-loop prunes.

    A chord closing at distance gap has an even number of letters
    between its ends in any planar closed curve, and a zero gap (also
    cyclically, at the word's two ends) is a nugatory loop.
    """
    seq = [1]
    first_pos = {1: 0}
    open_count = [1]

    def rec(i):
        remaining = 2 * n - i
        if remaining == 0:
            yield tuple(seq)
            return
        opens = open_count[0]
        if opens > remaining:
            return
        used = len(first_pos)
        # Close an open label.
        if opens:
            for lab, fp in list(first_pos.items()):
                if fp is None:
                    continue
                gap = i - fp - 1
                if gap % 2 or gap == 0:
                    continue
                if fp == 0 and remaining == 1:
                    continue  # cyclically adjacent to the first letter
                seq.append(lab)
                first_pos[lab] = None
                open_count[0] -= 1
                yield from rec(i + 1)
                open_count[0] += 1
                first_pos[lab] = fp
                seq.pop()
        # Open a new label.
        if used < n and remaining >= opens + 2:
            lab = used + 1
            seq.append(lab)
            first_pos[lab] = i
            open_count[0] += 1
            yield from rec(i + 1)
            open_count[0] -= 1
            del first_pos[lab]
            seq.pop()

    yield from rec(1)


def enumerate_shadows(n, require_prime=True):
    """All reduced (optionally prime) shadows with exactly n crossings,
    as a dict canonical per-diagram code -> Diagram."""
    shadows = {}
    for seq in _sequences(n):
        for d in planar_realizations(seq):
            code = canonical_code(d)
            if code in shadows:
                continue
            if not is_reduced(d):
                continue
            if require_prime and not is_prime(d):
                continue
            shadows[code] = d
    return shadows


def knot_counts(n_max, n_min=3, cap=1_000_000):
    """Independent knot census: flype classes of prime reduced shadows.

    Returns ({n: count}, {n: sorted list of class keys}).
    """
    counts = {}
    keys_by_n = {}
    for n in range(n_min, n_max + 1):
        cache = KeyCache(cap)
        keys = set()
        for d in enumerate_shadows(n).values():
            keys.add(cache.key(d).bytes)
        counts[n] = len(keys)
        keys_by_n[n] = sorted(keys)
    return counts, keys_by_n
