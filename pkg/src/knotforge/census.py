"""The two-step inductive census driver and its persistent store.

Level n+1 is built from level n in two steps: every restricted D and
ROTS site of every knot gives the class A seeds, then a breadth-first
fixpoint of OTS moves and positive-2-group turns collects the rest.
Knots are identified by their flype-closure canonical key, so each is
stored once, with one representative diagram (the closure member whose
per-diagram code equals the key).
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field

from .canonical import DEFAULT_CAP, KeyCache
from .diagram import Diagram, figure_eight
from .errors import StoreError
from .operators import apply_site, enumerate_sites

__all__ = ["KnotStore", "GenerationStats", "step1", "step2_closure", "generate"]


def _blob_of(d: Diagram) -> bytes:
    if 4 * d.n > 255:
        raise StoreError("diagram too large for the blob format")
    return bytes([d.n]) + bytes(d.pairing)


def _blob_to_diagram(blob: bytes) -> Diagram:
    n = blob[0]
    pairing = tuple(blob[1 : 1 + 4 * n])
    if len(pairing) != 4 * n:
        raise StoreError("truncated diagram blob")
    return Diagram(pairing)


class KnotStore:
    """Per-crossing-number sorted sets of canonical keys on disk.

    Layout: ``knots_NN.db`` holds a header line ``KNOTDB 1 <n> <count>``
    followed by one ``<hex key> <hex blob>`` line per knot, sorted by
    key.  Inserts are idempotent and guarded by a lock, so concurrent
    insert_if_absent calls are linearizable.
    """

    def __init__(self, root):
        self.root = str(root)
        os.makedirs(self.root, exist_ok=True)
        self._levels = {}
        import threading

        self._lock = threading.Lock()
        self._load_existing()

    def _path(self, n):
        return os.path.join(self.root, f"knots_{n:02d}.db")

    def _load_existing(self):
        for name in sorted(os.listdir(self.root)):
            if not (name.startswith("knots_") and name.endswith(".db")):
                continue
            with open(os.path.join(self.root, name)) as fh:
                header = fh.readline().split()
                if len(header) != 4 or header[0] != "KNOTDB" or header[1] != "1":
                    raise StoreError(f"bad header in {name}")
                n, count = int(header[2]), int(header[3])
                level = {}
                for line in fh:
                    key_hex, blob_hex = line.split()
                    level[bytes.fromhex(key_hex)] = bytes.fromhex(blob_hex)
                if len(level) != count:
                    raise StoreError(
                        f"{name}: header count {count} != {len(level)} lines"
                    )
                self._levels[n] = level

    def insert_if_absent(self, n, key: bytes, blob: bytes) -> bool:
        """Idempotent set insert; True when the key was new."""
        if len(key) != 2 * n:
            raise StoreError(f"key length {len(key)} does not match n={n}")
        with self._lock:
            level = self._levels.setdefault(n, {})
            if key in level:
                return False
            level[key] = blob
            return True

    def count(self, n) -> int:
        return len(self._levels.get(n, ()))

    def counts(self):
        return {n: len(v) for n, v in sorted(self._levels.items())}

    def keys(self, n):
        return sorted(self._levels.get(n, ()))

    def get_blob(self, n, key):
        return self._levels.get(n, {}).get(key)

    def diagrams(self, n):
        level = self._levels.get(n, {})
        return [(k, _blob_to_diagram(level[k])) for k in sorted(level)]

    def find_key(self, key: bytes):
        for n, level in self._levels.items():
            if key in level:
                return n, _blob_to_diagram(level[key])
        return None

    def write_level(self, n):
        level = self._levels.get(n, {})
        with open(self._path(n), "w") as fh:
            fh.write(f"KNOTDB 1 {n} {len(level)}\n")
            for key in sorted(level):
                fh.write(f"{key.hex()} {level[key].hex()}\n")

    def write_stats(self, stats):
        with open(os.path.join(self.root, "stats.json"), "w") as fh:
            json.dump([s.as_dict() for s in stats.levels], fh, indent=1)
            fh.write("\n")

    def read_stats(self):
        path = os.path.join(self.root, "stats.json")
        if not os.path.exists(path):
            raise StoreError("no stats.json in store")
        with open(path) as fh:
            return json.load(fh)


@dataclass
class LevelStats:
    n: int
    total: int
    step1: int
    step2: int
    seconds: float
    cap_events: int = 0

    @property
    def step1_fraction(self):
        return self.step1 / self.total if self.total else 0.0

    def as_dict(self):
        return {
            "n": self.n,
            "total": self.total,
            "step1": self.step1,
            "step2": self.step2,
            "step1_fraction": self.step1_fraction,
            "seconds": self.seconds,
            "cap_events": self.cap_events,
        }


@dataclass
class GenerationStats:
    levels: list = field(default_factory=list)

    def table(self):
        lines = ["n\ttotal\tstep1\tstep2\tstep1_fraction\tseconds"]
        for s in self.levels:
            lines.append(
                f"{s.n}\t{s.total}\t{s.step1}\t{s.step2}"
                f"\t{s.step1_fraction:.4f}\t{s.seconds:.2f}"
            )
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Single-process kernels
# ---------------------------------------------------------------------------

def _grow_images(d: Diagram):
    """All D and ROTS images of one diagram (the step-1 move set)."""
    out = []
    for kind in ("D", "ROTS"):
        for site in enumerate_sites(d, kind):
            out.append(apply_site(d, site))
    return out


def _sweep_images(d: Diagram):
    """All OTS and positive-2-group-turn images (the step-2 move set)."""
    out = []
    for kind in ("OTS", "T2"):
        for site in enumerate_sites(d, kind):
            out.append(apply_site(d, site))
    return out


def step1(diagrams, cache: KeyCache):
    """Class A seeds at n+1 from the complete level n.

    D and ROTS run over every configuration (flype-closure member) of
    every level-n knot: the characterization theorem promises each
    class A knot a preimage in some configuration, not necessarily the
    stored representative.  Returns key -> representative diagram.
    """
    found = {}
    for d in diagrams:
        _key, _rep, members = cache.lookup(d)
        for mem in members:
            for img in _grow_images(mem):
                key, rep = cache.key_and_representative(img)
                found.setdefault(key.bytes, rep)
    return found


def step2_closure(seeds, cache: KeyCache):
    """Fixpoint of the step-2 move set over the seeds: the full level.

    Each discovered knot is swept across all of its configurations; the
    emptying theorems guarantee the fixpoint is the complete census of
    the crossing number.
    """
    level = dict(seeds)
    frontier = list(seeds.values())
    while frontier:
        nxt = []
        for d in frontier:
            _key, _rep, members = cache.lookup(d)
            for mem in members:
                for img in _sweep_images(mem):
                    key, rep = cache.key_and_representative(img)
                    if key.bytes not in level:
                        level[key.bytes] = rep
                        nxt.append(rep)
        frontier = nxt
    return level


# ---------------------------------------------------------------------------
# Parallel kernels
# ---------------------------------------------------------------------------

_worker_cache = None
_worker_sent = None


def _pool_init(cap):
    global _worker_cache, _worker_sent
    _worker_cache = KeyCache(cap)
    _worker_sent = set()


def _collect(images):
    """Key every image; ship each class's members the first time this
    worker reports it (whoever discovers a knot first supplies them)."""
    out = {}
    for img in images:
        key, rep, members = _worker_cache.lookup(img)
        if key.bytes not in out:
            if key.bytes in _worker_sent:
                payload = None
            else:
                _worker_sent.add(key.bytes)
                payload = (rep.pairing, [m.pairing for m in members])
            out[key.bytes] = payload
    return list(out.items())


def _pool_grow(payload):
    members = [Diagram(p) for p in payload]
    images = []
    for mem in members:
        images.extend(_grow_images(mem))
    return _collect(images)


def _pool_sweep(payload):
    members = [Diagram(p) for p in payload]
    images = []
    for mem in members:
        images.extend(_sweep_images(mem))
    return _collect(images)


def _pool_closure(pairing):
    d = Diagram(pairing)
    key, rep, members = _worker_cache.lookup(d)
    return key.bytes, [m.pairing for m in members]


def generate(n_max, store: KnotStore, threads=1, flype_cap=DEFAULT_CAP,
             progress=None) -> GenerationStats:
    """Populate the store with all prime alternating knots of 5..n_max
    crossings, starting from the figure-eight seed at four."""
    if n_max < 5:
        raise ValueError("n_max must be >= 5")
    stats = GenerationStats()
    cache = KeyCache(flype_cap)
    seed = figure_eight()
    key, rep = cache.key_and_representative(seed)
    store.insert_if_absent(4, key.bytes, _blob_of(rep))
    store.write_level(4)

    try:
        for n in range(4, n_max):
            t0 = time.time()
            pool = None
            if threads > 1:
                import multiprocessing

                # A fresh pool per level keeps worker memo caches from
                # accumulating dead levels.
                pool = multiprocessing.get_context("fork").Pool(
                    threads, initializer=_pool_init, initargs=(flype_cap,)
                )
            # Keep the source level's classes (their members feed
            # step 1); drop anything older.
            cache.retain(n)
            reps = [d for _k, d in store.diagrams(n)]
            target = n + 1
            if pool is None:
                seeds = step1(reps, cache)
                level = step2_closure(seeds, cache)
            else:
                # Closure members of the source level, in parallel.
                src_members = []
                for _key_b, mems in pool.imap_unordered(
                    _pool_closure, [d.pairing for d in reps], chunksize=4
                ):
                    src_members.append(mems)
                seeds = {}
                member_lists = {}
                for chunk in pool.imap_unordered(
                    _pool_grow, src_members, chunksize=4
                ):
                    for key_b, payload in chunk:
                        if payload is not None and key_b not in member_lists:
                            seeds.setdefault(key_b, Diagram(payload[0]))
                            member_lists[key_b] = payload[1]
                level = dict(seeds)
                frontier = list(seeds)
                while frontier:
                    nxt = []
                    for chunk in pool.imap_unordered(
                        _pool_sweep,
                        [member_lists[k] for k in frontier],
                        chunksize=4,
                    ):
                        for key_b, payload in chunk:
                            if key_b not in level and payload is not None:
                                level[key_b] = Diagram(payload[0])
                                member_lists[key_b] = payload[1]
                                nxt.append(key_b)
                    frontier = nxt
            n_step1 = len(seeds)
            for key_b, rep2 in level.items():
                store.insert_if_absent(target, key_b, _blob_of(rep2))
            store.write_level(target)
            if pool is not None:
                pool.close()
                pool.join()
                pool = None
            stats.levels.append(
                LevelStats(
                    n=target,
                    total=len(level),
                    step1=n_step1,
                    step2=len(level) - n_step1,
                    seconds=time.time() - t0,
                )
            )
            if progress:
                progress(stats.levels[-1])
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    store.write_stats(stats)
    return stats
