"""Diagram core: construction, codes, traversal, canonical identity."""

import random

import pytest

from knotforge.diagram import (
    Diagram,
    canonical_code,
    face_degrees,
    faces,
    figure_eight,
    format_dt_code,
    format_group_code,
    format_signed_gauss,
    format_unsigned_gauss,
    from_signed_gauss,
    mirror,
    parse_signed_gauss,
    parse_unsigned_gauss,
    realize_unsigned_gauss,
    to_dt_code,
    to_group_code,
    to_signed_gauss,
    torus_shadow,
    traverse,
    trefoil,
    validate,
)
from knotforge.errors import Malformed, NonPlanar
from knotforge.tangles import find_groups


def test_figure_eight_gauss_sequence():
    code = to_signed_gauss(figure_eight(), 0)
    assert [lab for lab, _ in code] == [1, 2, 3, 4, 2, 1, 4, 3]


def test_figure_eight_groups():
    gs = find_groups(figure_eight())
    assert sorted((len(g), g.sign) for g in gs) == [(2, -1), (2, -1)]


def test_figure_eight_validates():
    assert validate(figure_eight()) == []


def test_validate_reports_bad_pairing():
    # A fixed point in the pairing.
    bad = list(figure_eight().pairing)
    bad[0] = 0
    report = validate(Diagram(bad))
    assert "pairing not an involution without fixed points" in report


def test_validate_reports_disconnected():
    t = trefoil().pairing
    two = list(t) + [h + 12 for h in t]
    report = validate(Diagram(two))
    assert "not connected" in report


def test_faces_figure_eight():
    assert face_degrees(figure_eight()) == [2, 2, 3, 3, 3, 3]


def test_faces_trefoil():
    assert face_degrees(trefoil()) == [2, 2, 2, 3, 3]


def test_face_degrees_sum():
    for d in (figure_eight(), trefoil(), torus_shadow(5), torus_shadow(7)):
        assert sum(face_degrees(d)) == 4 * d.n


def test_traverse_length_and_exit_rule():
    d = figure_eight()
    seq = traverse(d, 0)
    assert len(seq) == 2 * d.n
    assert seq.count(seq[0]) == 1


def test_traverse_reversed_start():
    d = figure_eight()
    fwd = d.strand_visits(0)
    p = d.pairing
    bwd = d.strand_visits(p[fwd[1] ^ 2] ^ 0)
    assert len(bwd) == len(fwd)


def test_mirror_involution():
    for d in (figure_eight(), trefoil(), torus_shadow(5)):
        assert mirror(mirror(d)) == d


def test_mirror_preserves_faces_and_code():
    for d in (figure_eight(), trefoil()):
        m = mirror(d)
        assert validate(m) == []
        assert face_degrees(m) == face_degrees(d)
        assert canonical_code(m) == canonical_code(d)


def test_signed_gauss_round_trip_all_starts():
    for d in (figure_eight(), trefoil(), torus_shadow(5)):
        want = canonical_code(d)
        for start in range(4 * d.n):
            for reflect in (False, True):
                d2 = from_signed_gauss(to_signed_gauss(d, start, reflect))
                assert canonical_code(d2) == want


def test_reflect_equals_mirror_code():
    d = figure_eight()
    a = to_signed_gauss(d, 0, True)
    m = mirror(d)
    codes = {
        tuple(to_signed_gauss(m, s, False)) for s in range(4 * d.n)
    }
    assert tuple(a) in codes


def test_from_signed_gauss_malformed():
    with pytest.raises(Malformed):
        from_signed_gauss([(1, 0), (2, 0), (2, 1)])
    with pytest.raises(Malformed):
        from_signed_gauss([(2, 0), (1, 0), (2, 1), (1, 1)])
    with pytest.raises(Malformed):
        from_signed_gauss([(1, 1), (2, 0), (1, 1), (2, 1)])


def test_from_signed_gauss_nonplanar():
    # 1,2,1,2 admits non-planar bit choices.
    raised = 0
    for b1 in (0, 1):
        for b2 in (0, 1):
            try:
                from_signed_gauss([(1, 0), (2, 0), (1, b1), (2, b2)])
            except NonPlanar:
                raised += 1
    assert raised > 0


def test_realize_unsigned_gauss_examples():
    f8 = realize_unsigned_gauss([1, 2, 3, 4, 2, 1, 4, 3])
    assert canonical_code(figure_eight()) in {canonical_code(d) for d in f8}
    t = realize_unsigned_gauss([1, 2, 3, 1, 2, 3])
    assert canonical_code(trefoil()) in {canonical_code(d) for d in t}


def test_realize_nugatory_sequence_reduced_filter():
    from knotforge.tangles import is_prime, is_reduced

    out = realize_unsigned_gauss([1, 2, 1, 3, 2, 3])
    assert all(not (is_reduced(d) and is_prime(d)) for d in out)


def test_canonical_code_start_invariance():
    d = figure_eight()
    codes = set()
    for start in range(16):
        d2 = from_signed_gauss(to_signed_gauss(d, start, False))
        codes.add(canonical_code(d2))
    assert len(codes) == 1


def test_canonical_code_distinguishes():
    assert canonical_code(trefoil()) != canonical_code(figure_eight())
    assert canonical_code(torus_shadow(5)) != canonical_code(figure_eight())


def test_canonical_code_relabeling_invariance():
    rng = random.Random(7)
    for d in (figure_eight(), torus_shadow(5), torus_shadow(7)):
        perm = list(range(d.n))
        rng.shuffle(perm)
        q = [0] * (4 * d.n)
        for h in range(4 * d.n):
            t = d.pairing[h]
            q[4 * perm[h >> 2] + (h & 3)] = 4 * perm[t >> 2] + (t & 3)
        assert canonical_code(Diagram(q)) == canonical_code(d)


def test_group_code_figure_eight():
    entries = to_group_code(figure_eight())
    assert format_group_code(entries) == "2_1, 2_2, -2_1, -2_2"


def test_group_code_trefoil():
    entries = to_group_code(trefoil())
    assert [(s, i) for s, i, _ in entries] == [(3, 1), (3, 1)]
    assert all(not neg for _s, _i, neg in entries)


def test_group_code_cyclic_rotation():
    d = figure_eight()
    base = to_group_code(d, 0)
    walk = d.full_traversal()
    seen = set()
    for start in walk:
        entries = to_group_code(d, start)
        seen.add(tuple((s, neg) for s, _i, neg in entries))
    want = tuple((s, neg) for s, _i, neg in base)
    rotations = {want[i:] + want[:i] for i in range(len(want))}
    assert seen <= rotations


def test_dt_codes():
    assert to_dt_code(trefoil()) == [4, 6, 2]
    assert to_dt_code(figure_eight()) == [4, 6, 8, 2]
    for d in (trefoil(), figure_eight(), torus_shadow(5)):
        dt = to_dt_code(d)
        assert sorted(abs(v) for v in dt) == list(range(2, 2 * d.n + 1, 2))


def test_text_formats_round_trip():
    assert parse_unsigned_gauss("1, 2,3") == [1, 2, 3]
    code = to_signed_gauss(figure_eight(), 0)
    assert parse_signed_gauss(format_signed_gauss(code)) == code
    assert format_unsigned_gauss(figure_eight()) == "1,2,3,4,2,1,4,3"


def test_euler_and_single_component_invariants(corpus8):
    from knotforge.diagram import _face_count

    for n, batch in corpus8.items():
        for d in batch.values():
            assert validate(d) == []
            assert _face_count(d) == d.n + 2
            assert len(d.strand_visits(0)) == 2 * n
