"""Flype-equivalence identity.

Two reduced prime alternating diagrams present the same knot exactly
when they are flype equivalent, so the canonical key of a knot is the
lexicographically least per-diagram code over the whole flype closure.
The closure is a breadth-first fixpoint over single-crossing flype
moves; mirror images already share per-diagram codes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import Diagram, canonical_code, from_signed_gauss
from .errors import CapExceeded
from .tangles import _adjacency, flype_hop

__all__ = ["CanonicalKey", "flype_closure", "canonical_key", "KeyCache"]

DEFAULT_CAP = 1_000_000


@dataclass(frozen=True)
class CanonicalKey:
    """Dedup identity of a knot: minimal code over the flype closure."""

    bytes: bytes
    crossing_count: int

    def hex(self):
        return self.bytes.hex()

    def __lt__(self, other):
        return self.bytes < other.bytes


def _decode(code: bytes) -> Diagram:
    """Rebuild a diagram from a per-diagram canonical code."""
    seen = set()
    entries = []
    for b in code:
        lab = (b >> 1) + 1
        entries.append((lab, (b & 1) if lab in seen else 0))
        seen.add(lab)
    return from_signed_gauss(entries)


def closure_codes(d: Diagram, cap=DEFAULT_CAP):
    """Per-diagram canonical codes of every diagram flype-reachable
    from d (including d), by BFS over single-crossing flype moves."""
    start = canonical_code(d)
    seen = {start: d}
    frontier = [d]
    while frontier:
        nxt = []
        for cur in frontier:
            adj = _adjacency(cur)
            for c in range(cur.n):
                for s in range(4):
                    moved = flype_hop(cur, c, s, adj)
                    if moved is None:
                        continue
                    code = canonical_code(moved)
                    if code not in seen:
                        if len(seen) >= cap:
                            raise CapExceeded(cap, f"closure of {start.hex()}")
                        seen[code] = moved
                        nxt.append(moved)
        frontier = nxt
    return seen


def flype_closure(d: Diagram, cap=DEFAULT_CAP):
    """The closure as a set of per-diagram canonical codes."""
    return set(closure_codes(d, cap))


def canonical_key(d: Diagram, cap=DEFAULT_CAP) -> CanonicalKey:
    """Minimal per-diagram code over the flype closure of d."""
    return CanonicalKey(min(closure_codes(d, cap)), d.n)


class KeyCache:
    """Memo from per-diagram codes to the key of their flype class.

    One closure walk publishes the key for every member, so operator
    images landing anywhere in an already-seen class are near-free.
    The member diagrams of each class are kept so callers can apply
    moves to every configuration of a knot, not just the
    representative.  Entries are immutable; concurrent insert races are
    benign.
    """

    def __init__(self, cap=DEFAULT_CAP):
        self.cap = cap
        self._codes = {}
        self._members = {}

    def lookup(self, d: Diagram):
        """(key, representative, member diagrams) of d's flype class."""
        code = canonical_code(d)
        hit = self._codes.get(code)
        if hit is not None:
            key, rep = hit
            return key, rep, self._members[key.bytes]
        members = closure_codes(d, self.cap)
        best = min(members)
        key = CanonicalKey(best, d.n)
        # Decode the minimal code so the representative's labelling is
        # discovery-order independent.
        rep = _decode(best)
        val = (key, rep)
        for member_code in members:
            self._codes[member_code] = val
        member_list = tuple(members.values())
        self._members[key.bytes] = member_list
        return key, rep, member_list

    def key_and_representative(self, d: Diagram):
        key, rep, _members = self.lookup(d)
        return key, rep

    def key(self, d: Diagram) -> CanonicalKey:
        return self.lookup(d)[0]

    def retain(self, crossing_count):
        """Drop cached classes of any other crossing number."""
        self._codes = {
            c: v for c, v in self._codes.items() if len(c) == 2 * crossing_count
        }
        self._members = {
            k: v
            for k, v in self._members.items()
            if len(k) == 2 * crossing_count
        }

    def clear(self):
        self._codes.clear()
        self._members.clear()

    def __len__(self):
        return len(self._codes)
