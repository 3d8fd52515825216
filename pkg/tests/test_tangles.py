"""Groups, tangles, orbits, cores and flype moves."""

import pytest

from knotforge.canonical import canonical_key
from knotforge.diagram import (
    Diagram,
    canonical_code,
    figure_eight,
    torus_shadow,
    trefoil,
    validate,
)
from knotforge.errors import PositiveGroupError
from knotforge.tangles import (
    all_tangles,
    apply_flype,
    compute_core,
    compute_orbit,
    enumerate_crossing_flype_scenarios,
    enumerate_flype_scenarios,
    find_2_tangles,
    find_groups,
    flype_hop,
    flype_moves,
    is_prime,
    is_reduced,
    min_tangle,
    to_full_group,
)


def connected_sum(d1: Diagram, d2: Diagram) -> Diagram:
    """Splice two shadows along one edge of each (test helper)."""
    p1, p2 = d1.pairing, d2.pairing
    off = 4 * d1.n
    q = list(p1) + [h + off for h in p2]
    a, a2 = 0, p1[0]
    b, b2 = off, q[off]
    q[a] = b2
    q[b2] = a
    q[b] = a2
    q[a2] = b
    return Diagram(q)


def test_find_groups_examples():
    f8 = find_groups(figure_eight())
    assert sorted((g.crossings, g.sign) for g in f8) == [
        ((0, 1), -1),
        ((2, 3), -1),
    ]
    (tg,) = find_groups(trefoil())
    assert len(tg) == 3 and tg.sign > 0 and tg.cyclic
    (t5,) = find_groups(torus_shadow(5))
    assert len(t5) == 5 and t5.sign > 0


def test_group_sign_direction_independent(corpus8):
    # Signs computed from the reversed traversal agree.
    for batch in corpus8.values():
        for d in batch.values():
            rev = Diagram(d.pairing)
            rev._visits = tuple(
                d.pairing[h] for h in reversed(d.full_traversal())
            )
            a = sorted((g.crossings, g.sign) for g in find_groups(d))
            b = sorted((g.crossings, g.sign) for g in find_groups(rev))
            assert a == b


def test_2_tangles_and_primality():
    assert find_2_tangles(figure_eight()) == []
    assert is_prime(figure_eight()) and is_reduced(figure_eight())
    comp = connected_sum(trefoil(), trefoil())
    assert validate(comp) == []
    assert not is_prime(comp)
    assert len(find_2_tangles(comp)) >= 2


def test_is_prime_matches_enumeration(corpus8):
    for batch in corpus8.values():
        for d in batch.values():
            assert is_prime(d) == (find_2_tangles(d) == [])


def test_min_tangle_figure_eight():
    d = figure_eight()
    g1, g2 = find_groups(d)
    e, f = g2.ends[0]
    p = d.pairing
    a, b = p[e] >> 2, p[f] >> 2
    t = min_tangle(d, p[e], p[f], a, b)
    assert t == frozenset(g1.crossings)


def test_min_tangle_trefoil_remainder():
    d = trefoil()
    p = d.pairing
    # Edges from crossing 0 into {1, 2}: the remainder is the tangle.
    e = next(4 * 0 + s for s in range(4) if (p[s] >> 2) == 1)
    f = next(4 * 0 + s for s in range(4) if (p[4 * 0 + s] >> 2) == 2)
    t = min_tangle(d, e, f, p[e] >> 2, p[f] >> 2)
    assert t == frozenset({1, 2})


def test_min_tangle_none_when_boundary():
    d = trefoil()
    p = d.pairing
    slots = [s for s in range(4) if (p[s] >> 2) == 1]
    e, f = (4 * 0 + slots[0], 4 * 0 + slots[1])
    # Both arcs land on crossing 1; a tangle containing 0 with both
    # incident would need the far endpoints outside, impossible here.
    assert min_tangle(d, e, f, 0, 0) is None


def test_orbit_examples():
    (tg,) = find_groups(trefoil())
    orbit = compute_orbit(trefoil(), tg)
    assert orbit.positions == (("group", tg.crossings),)
    assert orbit.min_tangles == ()

    d = figure_eight()
    g1, g2 = find_groups(d)
    o = compute_orbit(d, g1)
    assert o.min_tangles == (frozenset(g2.crossings),)


def test_orbit_reversal(corpus8):
    for batch in corpus8.values():
        for d in batch.values():
            for g in find_groups(d):
                if g.cyclic:
                    continue
                a = compute_orbit(d, g, 0)
                b = compute_orbit(d, g, 1)
                assert a.min_tangles == tuple(reversed(b.min_tangles))


def test_core_examples_and_uniqueness(corpus8):
    d = figure_eight()
    for g in find_groups(d):
        core = compute_core(d, g)
        assert core in compute_orbit(d, g).min_tangles
    (tg,) = find_groups(trefoil())
    with pytest.raises(PositiveGroupError):
        compute_core(trefoil(), tg)
    # compute_core raises if the qualifying tangle is not unique, so
    # running it over the corpus is itself the uniqueness assertion.
    count = 0
    for batch in corpus8.values():
        for d in batch.values():
            for g in find_groups(d):
                if g.sign < 0 and len(g) >= 2:
                    compute_core(d, g)
                    count += 1
    assert count > 50


def test_crossing_flype_scenarios_trefoil():
    d = trefoil()
    out = enumerate_crossing_flype_scenarios(d, 0)
    tangles = {tuple(sorted(t1)) for _s, _e, _f, t1, _t2 in out}
    assert tangles == {(1,), (2,)}


def test_crossing_flype_scenario_exclusivity(corpus8):
    # No crossing carries scenarios on two adjacent arc pairs.
    for batch in corpus8.values():
        for d in batch.values():
            for c in range(d.n):
                slots = sorted(
                    s for s, *_ in enumerate_crossing_flype_scenarios(d, c)
                )
                for s in slots:
                    assert (s + 1) & 3 not in slots


def test_group_scenarios_examples():
    assert enumerate_flype_scenarios(trefoil()) == []
    assert enumerate_flype_scenarios(torus_shadow(5)) == []
    scen = enumerate_flype_scenarios(figure_eight())
    assert len(scen) == 2
    for s in scen:
        assert len(s.t1) == 1 and len(s.t2) == 1
        assert s.t1 | s.t2 | set(s.group.crossings) == {0, 1, 2, 3}
        assert len(s.joins) == 2


def test_scenario_invariants(corpus8):
    for batch in corpus8.values():
        for d in batch.values():
            allc = frozenset(range(d.n))
            for s in enumerate_flype_scenarios(d):
                assert s.t1 and s.t2 and not (s.t1 & s.t2)
                assert s.t1 | s.t2 | set(s.group.crossings) == allc
                assert len(s.arcs_to_t1) == 2 and len(s.arcs_to_t2) == 2


def test_apply_flype_examples():
    d = figure_eight()
    want = canonical_key(d)
    for s in enumerate_flype_scenarios(d):
        for k in (1, 2):
            out = apply_flype(d, s, k)
            assert out.n == d.n
            assert validate(out) == []
            assert is_prime(out) and is_reduced(out)
            assert canonical_key(out) == want


def test_flype_moves_preserve_everything(corpus8):
    for batch in corpus8.values():
        for d in batch.values():
            key = canonical_key(d)
            for m in flype_moves(d):
                assert m.n == d.n
                assert validate(m) == []
                assert is_prime(m) and is_reduced(m)
                assert canonical_key(m) == key


def test_tangle_intersection_lemma(corpus8):
    # Overlapping, mutually non-containing tangles share two boundary
    # arcs each way.
    for n in (4, 5, 6, 7, 8):
        for d in corpus8[n].values():
            ts = all_tangles(d)
            p = d.pairing
            for i in range(len(ts)):
                for j in range(i + 1, len(ts)):
                    t1, t2 = ts[i], ts[j]
                    if not (t1 & t2) or t1 <= t2 or t2 <= t1:
                        continue
                    cross12 = sum(
                        1
                        for c in t1
                        for s in range(4)
                        if ((p[4 * c + s] >> 2) in t2) != (c in t2)
                    )
                    assert cross12 >= 2


def test_prep_for_orbit_nesting(corpus8):
    # Tangles sharing (e, f, a, b) form a chain under inclusion.
    for n in (6, 7):
        for d in corpus8[n].values():
            p = d.pairing
            ts = all_tangles(d)
            for e in (0, 5):
                f = (e + 9) % (4 * d.n)
                ea, eb = e >> 2, p[e] >> 2
                fa, fb = f >> 2, p[f] >> 2
                for a in (ea, eb):
                    for b in (fa, fb):
                        fam = [
                            t
                            for t in ts
                            if a in t
                            and b in t
                            and (ea in t) != (eb in t)
                            and (fa in t) != (fb in t)
                        ]
                        for i in range(len(fam)):
                            for j in range(i + 1, len(fam)):
                                assert fam[i] <= fam[j] or fam[j] <= fam[i]


def test_noninterference_theorem(corpus8):
    # A crossing of a min-tangle can only flype inside it, or across a
    # tangle containing everything outside it.
    for n in (5, 6, 7, 8):
        for d in corpus8[n].values():
            allc = frozenset(range(d.n))
            for g in find_groups(d):
                orbit = compute_orbit(d, g, 0)
                for t1 in orbit.min_tangles:
                    for c in t1:
                        for _s, _e, _f, ta, tb in (
                            enumerate_crossing_flype_scenarios(d, c)
                        ):
                            for t in (ta, tb):
                                assert t <= t1 or (allc - t1) <= t


def test_group_orbit_noninterference(corpus9):
    for n in (5, 6, 7, 8, 9):
        for d in corpus9[n].values():
            groups = find_groups(d)
            for g in groups:
                orbit = compute_orbit(d, g, 0)
                for t1 in orbit.min_tangles:
                    for h in groups:
                        hs = set(h.crossings)
                        if hs & t1:
                            assert hs <= t1


def test_to_full_group():
    f8 = figure_eight()
    assert to_full_group(f8) == f8

    # A split-group configuration: two loners separated by two trefoil
    # remainders (pretzel-like ring), built by flyping a crossing of a
    # 2-group away and back is hard to script; instead check the
    # characteristic postcondition over the corpus: after the call, no
    # orbit contains a junction group.
    for d in (figure_eight(), trefoil(), torus_shadow(5)):
        out = to_full_group(d)
        for g in find_groups(out):
            orbit = compute_orbit(out, g, 0)
            assert all(kind != "group" for kind, _ in orbit.positions[1:])
    # Idempotence.
    assert to_full_group(to_full_group(f8)) == to_full_group(f8)


def test_to_full_group_merges_split(corpus8):
    merged = 0
    for n in (6, 7, 8):
        for d in corpus8[n].values():
            split = False
            for g in find_groups(d):
                orbit = compute_orbit(d, g, 0)
                if any(kind == "group" for kind, _ in orbit.positions[1:]):
                    split = True
            out = to_full_group(d)
            assert canonical_key(out) == canonical_key(d)
            groups_before = len(find_groups(d))
            groups_after = len(find_groups(out))
            for g in find_groups(out):
                orbit = compute_orbit(out, g, 0)
                assert all(kind != "group" for kind, _ in orbit.positions[1:])
            if split:
                merged += 1
                assert groups_after < groups_before
    assert merged > 0
