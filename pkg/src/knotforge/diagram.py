"""Knot shadows as 4-regular planar combinatorial maps.

A shadow is stored as a rotation system plus an edge pairing over
half-edges.  Half-edge ``h = 4*c + s`` is slot ``s`` (0..3) of crossing
``c``, with slots listed in counterclockwise planar order.  The strand
passes straight through a crossing, so entering at slot ``s`` exits at
slot ``s ^ 2``.  Over/under state is never stored: an alternating knot
is determined by its shadow up to mirror image, and the canonical code
minimizes over both reflections.
"""

from __future__ import annotations

from .errors import InvalidDiagram, Malformed, NonPlanar

__all__ = [
    "Diagram",
    "figure_eight",
    "trefoil",
    "torus_shadow",
    "validate",
    "faces",
    "traverse",
    "mirror",
    "to_signed_gauss",
    "from_signed_gauss",
    "realize_unsigned_gauss",
    "canonical_code",
    "to_group_code",
    "to_dt_code",
    "format_unsigned_gauss",
    "parse_unsigned_gauss",
    "format_signed_gauss",
    "parse_signed_gauss",
    "format_group_code",
    "format_dt_code",
]


def rot_next(h):
    """Counterclockwise successor slot at the same crossing."""
    return (h & ~3) | ((h + 1) & 3)


def rot_prev(h):
    return (h & ~3) | ((h - 1) & 3)


class Diagram:
    """A knot shadow: an immutable 4-regular map with a distinguished
    pairing of half-edges into edges.

    ``pairing[h]`` is the half-edge glued to ``h``; the involution has no
    fixed points.  Diagrams are value objects: all operations return new
    instances, so sharing across threads is safe.
    """

    __slots__ = ("n", "pairing", "_edges", "_visits", "_hash")

    def __init__(self, pairing):
        pairing = tuple(pairing)
        if len(pairing) % 4:
            raise Malformed("pairing length must be a multiple of 4")
        self.n = len(pairing) // 4
        self.pairing = pairing
        self._edges = None
        self._visits = None
        self._hash = None

    def __eq__(self, other):
        return isinstance(other, Diagram) and self.pairing == other.pairing

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.pairing)
        return self._hash

    def __repr__(self):
        return f"Diagram(n={self.n})"

    def __getstate__(self):
        return self.pairing

    def __setstate__(self, pairing):
        self.__init__(pairing)

    def edges(self):
        """Edges as (h, pairing[h]) with h < pairing[h], in h order."""
        if self._edges is None:
            p = self.pairing
            self._edges = tuple(
                (h, p[h]) for h in range(4 * self.n) if h < p[h]
            )
        return self._edges

    def crossing_of(self, h):
        return h >> 2

    def strand_visits(self, start):
        """Entry half-edges of the strand walk from entry ``start``.

        Walk rule: enter a crossing at ``h``, leave at ``h ^ 2``, follow
        the pairing to the next entry.  The walk of a valid diagram is a
        single closed sequence of 2n entries.
        """
        p = self.pairing
        seq = []
        h = start
        while True:
            seq.append(h)
            h = p[h ^ 2]
            if h == start:
                break
            if len(seq) > len(p):
                raise InvalidDiagram("strand walk does not close")
        return seq

    def full_traversal(self):
        """A cached strand walk from half-edge 0 (forward direction)."""
        if self._visits is None:
            self._visits = tuple(self.strand_visits(0))
        return self._visits


def validate(d: Diagram):
    """Return the list of violated Diagram invariants (empty if valid)."""
    problems = []
    p = d.pairing
    m = 4 * d.n
    if d.n == 0:
        return ["empty diagram"]
    ok = True
    for h in range(m):
        q = p[h]
        if not (0 <= q < m) or q == h or p[q] != h:
            problems.append("pairing not an involution without fixed points")
            ok = False
            break
    if not ok:
        return problems

    # Connectivity over crossings.
    seen = bytearray(d.n)
    stack = [0]
    seen[0] = 1
    count = 1
    while stack:
        c = stack.pop()
        for s in range(4):
            c2 = p[4 * c + s] >> 2
            if not seen[c2]:
                seen[c2] = 1
                count += 1
                stack.append(c2)
    if count != d.n:
        problems.append("not connected")

    # Genus 0 via Euler's formula; faces are orbits of h -> rot_next(pairing[h]).
    if count == d.n:
        nfaces = _face_count(d)
        if d.n - 2 * d.n + nfaces != 2:
            problems.append("genus not zero")

    # Single closed strand covering all 2n edges.
    try:
        walk = d.strand_visits(0)
        if len(walk) != 2 * d.n:
            problems.append("not a single closed strand")
    except InvalidDiagram:
        problems.append("not a single closed strand")

    return problems


def _face_count(d: Diagram):
    p = d.pairing
    m = 4 * d.n
    seen = bytearray(m)
    nfaces = 0
    for h0 in range(m):
        if seen[h0]:
            continue
        nfaces += 1
        h = h0
        while not seen[h]:
            seen[h] = 1
            h = rot_next(p[h])
    return nfaces


def faces(d: Diagram):
    """Face cycles as tuples of half-edges.

    Each half-edge (one side of an edge) lies on exactly one face; the
    walk steps from ``h`` to ``rot_next(pairing[h])``.
    """
    if validate(d):
        raise InvalidDiagram(validate(d))
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
        out.append(tuple(cyc))
    return out


def face_degrees(d: Diagram):
    return sorted(len(f) for f in faces(d))


def traverse(d: Diagram, start):
    """Closed visit sequence of (crossing, entry slot) from a directed
    start half-edge."""
    if validate(d):
        raise InvalidDiagram(validate(d))
    return [(h >> 2, h & 3) for h in d.strand_visits(start)]


def mirror(d: Diagram) -> Diagram:
    """Reverse every rotation cycle (slot s -> -s mod 4)."""
    m = 4 * d.n
    refl = lambda h: (h & ~3) | ((-h) & 3)
    q = [0] * m
    for h in range(m):
        q[refl(h)] = refl(d.pairing[h])
    return Diagram(q)


# ---------------------------------------------------------------------------
# Signed Gauss codes
# ---------------------------------------------------------------------------

def to_signed_gauss(d: Diagram, start, reflect=False):
    """Signed Gauss code along the strand walk from ``start``.

    Crossings are labelled 1..n in first-visit order.  A first visit
    carries bit 0.  A second visit carries bit 1 iff the first-visit
    entry slot is the rotation successor of the second-visit entry slot;
    ``reflect`` flips every second-visit bit (the code of the mirror).
    """
    walk = d.strand_visits(start)
    first_slot = {}
    label = {}
    out = []
    for h in walk:
        c, s = h >> 2, h & 3
        if c not in label:
            label[c] = len(label) + 1
            first_slot[c] = s
            out.append((label[c], 0))
        else:
            bit = 1 if first_slot[c] == ((s + 1) & 3) else 0
            if reflect:
                bit ^= 1
            out.append((label[c], bit))
    return out


def _check_double_occurrence(entries_labels):
    n2 = len(entries_labels)
    if n2 % 2:
        raise Malformed("odd code length")
    n = n2 // 2
    count = {}
    order = []
    for lab in entries_labels:
        if lab not in count:
            count[lab] = 0
            order.append(lab)
        count[lab] += 1
    if any(v != 2 for v in count.values()):
        raise Malformed("every label must appear exactly twice")
    if order != list(range(1, n + 1)):
        raise Malformed("labels must be 1..n in first-appearance order")
    return n


def from_signed_gauss(code) -> Diagram:
    """Rebuild the diagram a signed Gauss code serializes.

    The first visit of crossing ``c`` enters slot 0 and exits slot 2; a
    second visit enters slot 3 when its bit is 1, slot 1 otherwise.
    Raises Malformed for bad label multiplicities and NonPlanar when the
    rotation system the bits describe has nonzero genus.
    """
    labels = [lab for lab, _bit in code]
    n = _check_double_occurrence(labels)
    seen = {}
    entries = []
    for lab, bit in code:
        c = lab - 1
        if c not in seen:
            if bit != 0:
                raise Malformed("first visit must carry bit 0")
            seen[c] = True
            entries.append(4 * c + 0)
        else:
            entries.append(4 * c + (3 if bit else 1))
    m = 4 * n
    pairing = [-1] * m
    for i, h in enumerate(entries):
        h_prev_exit = entries[i - 1] ^ 2
        if pairing[h] != -1 or pairing[h_prev_exit] != -1:
            raise Malformed("slot used twice")
        pairing[h] = h_prev_exit
        pairing[h_prev_exit] = h
    d = Diagram(pairing)
    problems = validate(d)
    if problems == ["genus not zero"]:
        raise NonPlanar("code has no planar realization with these bits")
    if problems:
        raise Malformed(f"code does not describe a knot shadow: {problems}")
    return d


def realize_unsigned_gauss(seq):
    """All planar shadows realizing an unsigned Gauss sequence.

    Tries every chirality-bit assignment (2^n candidates) and keeps the
    realizations that pass the planarity check, deduplicated by
    canonical code.  Exponential by design; intended for small n.
    """
    seq = list(seq)
    n = _check_double_occurrence(seq)
    seen_first = set()
    second_positions = []
    for i, lab in enumerate(seq):
        if lab in seen_first:
            second_positions.append(i)
        else:
            seen_first.add(lab)
    out = {}
    for mask in range(1 << n):
        code = [(lab, 0) for lab in seq]
        for j, pos in enumerate(second_positions):
            if (mask >> j) & 1:
                code[pos] = (seq[pos], 1)
        try:
            d = from_signed_gauss(code)
        except (Malformed, NonPlanar):
            continue
        out.setdefault(canonical_code(d), d)
    return [out[k] for k in sorted(out)]


# ---------------------------------------------------------------------------
# Canonical per-diagram code
# ---------------------------------------------------------------------------

def _serialize_walk(walk, reflect):
    """Byte string of the signed Gauss code of one directed walk."""
    first_slot = [-1] * ((max(walk) >> 2) + 1)
    label = {}
    out = bytearray()
    for h in walk:
        c, s = h >> 2, h & 3
        lab = label.get(c)
        if lab is None:
            label[c] = lab = len(label)
            first_slot[c] = s
            out.append(lab << 1)
        else:
            bit = 1 if first_slot[c] == ((s + 1) & 3) else 0
            out.append((lab << 1) | (bit ^ reflect))
    return bytes(out)


def canonical_code(d: Diagram) -> bytes:
    """Lexicographic minimum serialization over all 4n directed starts
    and both reflections.

    Equal codes iff the diagrams are isomorphic as maps on the sphere up
    to reflection.  One byte per visit: (label << 1) | chirality bit.
    Candidates are generated with early abort against the best so far,
    which keeps the minimization near-linear in practice.
    """
    p = d.pairing
    n = d.n
    n2 = 2 * n
    fwd = d.full_traversal()
    # Reversing direction turns exit half-edges into entries, in
    # reverse order.
    bwd = tuple(p[h] for h in reversed(fwd))
    best = None
    label = [-1] * n
    first_slot = [0] * n
    for walk in (fwd, bwd):
        doubled = walk + walk
        for i in range(n2):
            for reflect in (0, 1):
                for c in range(n):
                    label[c] = -1
                nl = 0
                out = bytearray(n2)
                better = best is None
                j = 0
                while j < n2:
                    h = doubled[i + j]
                    c = h >> 2
                    s = h & 3
                    lab = label[c]
                    if lab < 0:
                        label[c] = nl
                        first_slot[c] = s
                        b = nl << 1
                        nl += 1
                    else:
                        b = (lab << 1) | (
                            (1 if first_slot[c] == ((s + 1) & 3) else 0)
                            ^ reflect
                        )
                    if not better:
                        bb = best[j]
                        if b > bb:
                            break
                        if b < bb:
                            better = True
                    out[j] = b
                    j += 1
                if j == n2 and better:
                    best = bytes(out)
    return best


# ---------------------------------------------------------------------------
# Group code and DT code
# ---------------------------------------------------------------------------

def to_group_code(d: Diagram, start=0):
    """Group code along the strand walk from ``start``.

    One entry per encounter of a group (a strand runs through all k
    crossings of a k-group consecutively, so each group is encountered
    exactly twice).  Labels are (size, index) with indices assigned per
    size class in first-encounter order; for a negative group the minus
    sign sits on the second occurrence.  Loners are labelled positive.

    Returns a list of (size, index, negated) triples.
    """
    from .tangles import find_groups

    groups = find_groups(d)
    group_of = {}
    for g in groups:
        for c in g.crossings:
            group_of[c] = g
    walk = d.strand_visits(start)
    crossings = [h >> 2 for h in walk]
    n2 = len(crossings)

    # Split the cyclic visit sequence into runs: a run stays within one
    # group and has length at most the group size.
    runs = []
    i = 0
    while i < n2:
        g = group_of[crossings[i]]
        j = i + 1
        while j < n2 and group_of[crossings[j]] is g and j - i < len(g.crossings):
            j += 1
        runs.append(g)
        i = j
    # The array boundary may split one encounter in two.
    if len(runs) > 1 and runs[0] is runs[-1]:
        first_len = 1
        while (
            first_len < n2
            and group_of[crossings[first_len]] is runs[0]
            and first_len < len(runs[0].crossings)
        ):
            first_len += 1
        last_len = 1
        while (
            last_len < n2
            and group_of[crossings[n2 - 1 - last_len]] is runs[0]
            and last_len < len(runs[0].crossings)
        ):
            last_len += 1
        if first_len + last_len <= len(runs[0].crossings):
            runs = runs[:-1]

    by_size_seen = {}
    ids = {}
    seen_once = set()
    out = []
    for g in runs:
        key = id(g)
        if key not in ids:
            idx = by_size_seen.get(len(g.crossings), 0) + 1
            by_size_seen[len(g.crossings)] = idx
            ids[key] = (len(g.crossings), idx)
        size, idx = ids[key]
        negated = g.sign < 0 and key in seen_once
        seen_once.add(key)
        out.append((size, idx, negated))
    return out


def to_dt_code(d: Diagram):
    """Dowker-Thistlethwaite pairing, minimized over traversal starts.

    Positions 1..2n along the walk; each crossing gets one odd and one
    even position; entry i of the output is the even position paired
    with odd position 2i-1.  Used for export and census cross-checks.
    """
    if validate(d):
        raise InvalidDiagram(validate(d))
    p = d.pairing
    fwd = d.full_traversal()
    bwd = tuple(reversed([p[h] for h in fwd]))
    n2 = 2 * d.n
    best = None
    for walk in (fwd, bwd):
        doubled = [h >> 2 for h in walk + walk]
        for i in range(n2):
            pos = {}
            ok = True
            pairs = [0] * d.n
            for j in range(n2):
                c = doubled[i + j]
                if c in pos:
                    a, b = pos[c] + 1, j + 1
                    if a % 2 == b % 2:
                        ok = False
                        break
                    if a % 2 == 1:
                        pairs[(a - 1) // 2] = b
                    else:
                        pairs[(b - 1) // 2] = a
                else:
                    pos[c] = j
            if ok:
                cand = tuple(pairs)
                if best is None or cand < best:
                    best = cand
    if best is None:
        raise InvalidDiagram("no odd/even-consistent traversal")
    return list(best)


# ---------------------------------------------------------------------------
# Seed diagrams
# ---------------------------------------------------------------------------

def _unique_realization(seq):
    out = realize_unsigned_gauss(seq)
    if len(out) != 1:
        raise InvalidDiagram(f"{seq} has {len(out)} shadows, expected 1")
    return out[0]


def figure_eight() -> Diagram:
    """The 4-crossing seed: unsigned Gauss sequence 1,2,3,4,2,1,4,3 with
    two negative 2-groups."""
    return _unique_realization([1, 2, 3, 4, 2, 1, 4, 3])


def trefoil() -> Diagram:
    """The 3-crossing torus shadow (one positive 3-group)."""
    return torus_shadow(3)


def torus_shadow(n) -> Diagram:
    """Shadow of the (2, n) torus knot: a single cyclic bigon chain."""
    if n < 3 or n % 2 == 0:
        raise Malformed("(2, n) torus knots need odd n >= 3")
    if n > 16:
        raise Malformed("torus_shadow realizes by exhaustive search; n <= 16")
    return _unique_realization(list(range(1, n + 1)) * 2)


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------

def format_unsigned_gauss(code_or_diagram):
    if isinstance(code_or_diagram, Diagram):
        code = to_signed_gauss(code_or_diagram, 0)
    else:
        code = code_or_diagram
    return ",".join(str(lab) for lab, _ in code)


def parse_unsigned_gauss(text):
    try:
        return [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError as exc:
        raise Malformed(f"bad unsigned Gauss text: {text!r}") from exc


def format_signed_gauss(code):
    return ",".join(f"{lab}:{bit}" for lab, bit in code)


def parse_signed_gauss(text):
    out = []
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        try:
            lab, bit = tok.split(":")
            out.append((int(lab), int(bit)))
        except ValueError as exc:
            raise Malformed(f"bad signed Gauss token: {tok!r}") from exc
    return out


def format_group_code(entries):
    toks = []
    for size, idx, negated in entries:
        toks.append(f"{'-' if negated else ''}{size}_{idx}")
    return ", ".join(toks)


def format_dt_code(dt):
    return ",".join(str(v) for v in dt)
