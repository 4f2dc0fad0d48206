import pytest

from qkneser import gf, indsets, kneser, pg, qcalc
from qkneser.errors import InvalidDescriptor
from qkneser.indsets import UNSTRUCTURED, IndSetDescriptor

from conftest import unit_rows


def standard_objects(field, d):
    n = 2 * d + 1
    e = unit_rows(n)
    p = pg.rref([e[0]], n, field)
    ell = pg.rref([e[0], e[1]], n, field)
    hyp = pg.rref(e[: 2 * d], n, field)
    return p, ell, hyp


def small_point_family(field, d, size=3):
    """A family through a common rank-d core: pairwise meets have rank >= d >= 2."""
    n = 2 * d + 1
    e = unit_rows(n)
    core = pg.rref(e[:d], n, field)
    supers = list(pg.enumerate_superspaces(core, d + 1))
    return supers[:size]


def small_hyperplane_family(field, d, size=3):
    """Rank-d subspaces of a common rank-(d+1) space: pairwise meet rank >= d-1 >= 1."""
    n = 2 * d + 1
    e = unit_rows(n)
    box = pg.rref(e[: d + 1], n, field)
    return list(pg.subspaces_within(box, d))[:size]


def all_variant_descriptors(field, d):
    p, ell, hyp = standard_objects(field, d)
    return {
        "point_pencil": indsets.point_pencil(p),
        "generic_only": indsets.generic_only(p),
        "dual_point_pencil": indsets.dual_point_pencil(hyp),
        "dual_generic_only": indsets.dual_generic_only(hyp),
        "point_line": indsets.point_line(p, ell),
        "point_hyperplane": indsets.point_hyperplane(p, hyp),
        "point_family": indsets.point_family(p, small_point_family(field, d)),
        "hyperplane_family": indsets.hyperplane_family(hyp, small_hyperplane_family(field, d)),
    }


def test_generic_only_is_point_pencil(f2):
    p, _, hyp = standard_objects(f2, 2)
    assert indsets.generic_only(p) == indsets.point_pencil(p)
    assert indsets.dual_generic_only(hyp) == indsets.dual_point_pencil(hyp)


def test_build_sizes_22(f2):
    p, ell, _ = standard_objects(f2, 2)
    pencil = indsets.build(indsets.point_pencil(p))
    assert (len(pencil.generic), len(pencil.special)) == (105, 0)
    line = indsets.build(indsets.point_line(p, ell))
    assert (len(line.generic), len(line.special)) == (105, 28)
    assert len(line) == 133
    # every generic member goes through the base point
    for f in pencil.generic:
        assert pg.contains(f.chain[0], p)


@pytest.mark.parametrize("d,q", [(2, 2), (2, 3), (3, 2)])
def test_closed_form_sizes_all_variants(d, q):
    field = gf.make_field(q)
    g0 = qcalc.gauss(2 * d, d + 1, q) * qcalc.theta(d, q)
    u_size = qcalc.gauss(2 * d - 1, d - 1, q)
    for name, desc in all_variant_descriptors(field, d).items():
        split = indsets.build(desc)
        assert not (split.generic & split.special), name
        assert len(split.all) == len(split.generic) + len(split.special), name
        assert len(split.generic) == g0, name
        if desc.variant in ("point_line", "point_hyperplane"):
            assert len(split.special) == u_size * q**d, name
        elif desc.variant in ("point_pencil", "dual_point_pencil"):
            assert len(split.special) == 0, name
        else:
            assert len(split.special) == len(desc.family) * q**d, name


def test_line_and_hyperplane_specials_have_equal_size(f2, f3):
    for field, d in [(f2, 2), (f3, 2), (f2, 3)]:
        p, ell, hyp = standard_objects(field, d)
        a = indsets.build(indsets.point_line(p, ell))
        b = indsets.build(indsets.point_hyperplane(p, hyp))
        assert len(a.special) == len(b.special)
        assert len(indsets.line_family(p, ell)) == qcalc.gauss(2 * d - 1, d - 1, field.q)


def test_built_sets_are_independent(f2, f3):
    for field, d in [(f2, 2), (f3, 2)]:
        for name, desc in all_variant_descriptors(field, d).items():
            split = indsets.build(desc)
            assert indsets.is_independent(split.all), name


def test_is_independent_witness(f2, u22):
    e = unit_rows(5)
    f1 = kneser.Flag((pg.rref([e[0], e[1]], 5, f2), pg.rref([e[0], e[1], e[2]], 5, f2)))
    f2_ = kneser.Flag((pg.rref([e[3], e[4]], 5, f2), pg.rref([e[2], e[3], e[4]], 5, f2)))
    # canonical scan order: f2_ sorts before f1
    assert indsets.find_adjacent_pair([f1, f2_]) == (f2_, f1)
    assert indsets.find_adjacent_pair([f1, f2_], universe=u22) == (f2_, f1)
    assert indsets.is_independent([]) is True
    assert indsets.is_independent([f1]) is True


def test_is_maximal_22(f2, u22):
    p, ell, hyp = standard_objects(f2, 2)
    assert indsets.is_maximal(indsets.build(indsets.point_line(p, ell)).all, u22)
    assert indsets.is_maximal(indsets.build(indsets.point_hyperplane(p, hyp)).all, u22)
    pencil = indsets.build(indsets.point_pencil(p)).all
    assert not indsets.is_maximal(pencil, u22)
    witness = indsets.find_extension(pencil, u22)
    assert witness is not None
    assert witness not in pencil
    # the witness really extends the pencil
    assert indsets.is_independent(set(pencil) | {witness})


def test_is_maximal_empty_set(u22):
    assert not indsets.is_maximal([], u22)
    assert indsets.find_extension([], u22) == u22.flag_of(0)


def test_classify_round_trips(f2, u22):
    for name, desc in all_variant_descriptors(f2, 2).items():
        split = indsets.build(desc)
        result = indsets.classify(split.all, u22)
        assert isinstance(result, IndSetDescriptor), name
        assert result == desc, name


def test_classify_unstructured(u22):
    assert indsets.classify([u22.flag_of(3)], u22) is UNSTRUCTURED
    assert indsets.classify([], u22) is UNSTRUCTURED


def test_classify_dualized_point_line(f2, u22):
    p, ell, _ = standard_objects(f2, 2)
    split = indsets.build(indsets.point_line(p, ell))
    dual_set = {kneser.dual_flag(f) for f in split.all}
    result = indsets.classify(dual_set, u22)
    assert isinstance(result, IndSetDescriptor)
    assert result.variant == "hyperplane_family"
    assert result.base == pg.dual(p)
    # and it matches the direct dual-variant build
    direct = indsets.build(result)
    assert direct.all == frozenset(dual_set)
    assert result == indsets.dualize_descriptor(indsets.point_line(p, ell))


def test_dualize_descriptor_involution(f2):
    for name, desc in all_variant_descriptors(f2, 2).items():
        assert indsets.dualize_descriptor(indsets.dualize_descriptor(desc)) == desc, name


def test_duality_flagwise_matches_descriptor_dual(f2):
    p, ell, _ = standard_objects(f2, 2)
    desc = indsets.point_line(p, ell)
    flagwise = {kneser.dual_flag(f) for f in indsets.build(desc).all}
    descriptor = indsets.build(indsets.dualize_descriptor(desc)).all
    assert flagwise == descriptor


def test_family_size_bound():
    assert indsets.family_size_bound(2, 2) == 4  # bound 4.5, strict
    assert indsets.family_size_bound(3, 2) == 220  # bound 220.5, strict
    prev = None
    for q in (2, 3, 4, 5, 7, 8, 9):
        val = indsets.family_size_bound(2, q)
        if prev is not None:
            assert val >= prev
        prev = val


def test_descriptor_validation_errors(f2, f3):
    p, ell, hyp = standard_objects(f2, 2)
    e = unit_rows(5)
    off_line = pg.rref([e[1], e[2]], 5, f2)
    with pytest.raises(InvalidDescriptor):
        indsets.point_line(p, off_line)  # P not on the line
    with pytest.raises(InvalidDescriptor):
        indsets.point_line(p, pg.rref([e[1]], 5, f2))  # wrong rank
    with pytest.raises(InvalidDescriptor):
        indsets.point_hyperplane(p, pg.rref(e[1:5], 5, f2))  # P not inside
    bad_family = [
        pg.rref([e[0], e[1], e[2]], 5, f2),
        pg.rref([e[0], e[3], e[4]], 5, f2),  # meets the first only in P
    ]
    with pytest.raises(InvalidDescriptor):
        indsets.point_family(p, bad_family)
    with pytest.raises(InvalidDescriptor):
        indsets.point_pencil(pg.rref([e[0], e[1]], 5, f2))  # rank-2 base
    with pytest.raises(InvalidDescriptor):
        indsets.dual_point_pencil(p)  # rank-1 base for dual variant


def test_normalization_detects_structured_families(f2):
    p, ell, hyp = standard_objects(f2, 2)
    assert indsets.point_family(p, indsets.line_family(p, ell)) == indsets.point_line(p, ell)
    assert indsets.point_family(p, indsets.hyperplane_point_family(p, hyp)) == (
        indsets.point_hyperplane(p, hyp)
    )
    assert indsets.point_family(p, []) == indsets.point_pencil(p)
    assert indsets.hyperplane_family(hyp, []) == indsets.dual_point_pencil(hyp)


def test_descriptor_json_round_trip(f2):
    for name, desc in all_variant_descriptors(f2, 2).items():
        data = indsets.descriptor_to_json(desc)
        back = indsets.descriptor_from_json(data)
        assert back == desc, name


def test_descriptor_json_accepts_aliases(f2):
    p, _, _ = standard_objects(f2, 2)
    data = indsets.descriptor_to_json(indsets.point_pencil(p))
    data["variant"] = "generic_only"
    assert indsets.descriptor_from_json(data) == indsets.point_pencil(p)


def test_descriptor_json_requires_canonical_bases(f2):
    data = {"variant": "point_pencil", "d": 2, "q": 2, "P": [[0, 1, 1, 0, 0]]}
    assert indsets.descriptor_from_json(data).base.rows == ((0, 1, 1, 0, 0),)
    data_bad = {"variant": "point_pencil", "d": 2, "q": 2, "P": [[0, 1, 1, 0, 0], [0, 0, 0, 0, 0]]}
    with pytest.raises(InvalidDescriptor):
        indsets.descriptor_from_json(data_bad)


def test_classify_round_trips_23(f3, u23):
    for name, desc in all_variant_descriptors(f3, 2).items():
        split = indsets.build(desc)
        result = indsets.classify(split.all, u23)
        assert result == desc, name
