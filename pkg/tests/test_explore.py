import pytest

from qkneser import explore, indsets, kneser, pg, qcalc
from qkneser.errors import NotIndependent, TooLarge

from conftest import unit_rows


def test_greedy_complete_empty_seed_is_maximal(u22):
    result = explore.greedy_complete(set(), rng_seed=3, universe=u22)
    assert indsets.is_independent(result)
    assert indsets.is_maximal(result, u22)


def test_greedy_complete_contains_seed(f2, u22):
    e = unit_rows(5)
    p = pg.rref([e[0]], 5, f2)
    pencil = indsets.build(indsets.point_pencil(p)).all
    completed = explore.greedy_complete(pencil, rng_seed=0, universe=u22)
    assert pencil <= completed
    assert indsets.is_maximal(completed, u22)


def test_greedy_complete_fixed_point_on_maximal_set(f2, u22):
    e = unit_rows(5)
    p = pg.rref([e[0]], 5, f2)
    ell = pg.rref([e[0], e[1]], 5, f2)
    full = indsets.build(indsets.point_line(p, ell)).all
    assert explore.greedy_complete(full, rng_seed=5, universe=u22) == set(full)


def test_greedy_complete_rejects_dependent_seed(u22):
    f0 = u22.flag_of(0)
    neighbor = u22.flag_of(next(kneser.neighbors(f0, u22)))
    with pytest.raises(NotIndependent):
        explore.greedy_complete({f0, neighbor}, rng_seed=0, universe=u22)


def test_greedy_complete_deterministic(u22):
    a = explore.greedy_complete(set(), rng_seed=42, universe=u22)
    b = explore.greedy_complete(set(), rng_seed=42, universe=u22)
    assert a == b
    c = explore.greedy_complete(set(), rng_seed=43, universe=u22)
    assert isinstance(c, set)


def test_probe_reproducible_and_consistent(u22):
    a = explore.conjecture_probe(2, 2, 40, master_seed=11, rho_candidate=5, universe=u22)
    b = explore.conjecture_probe(2, 2, 40, master_seed=11, rho_candidate=5, universe=u22)
    assert a.to_json() == b.to_json()
    assert a.samples == 40
    buckets = (
        a.with_point_pencil + a.with_dual_point_pencil + a.trichotomy_small
        + len(a.unstructured_large)
    )
    assert buckets == a.samples
    assert sum(a.size_histogram.values()) == a.samples
    assert a.threshold == 5 * 2**4


def test_probe_maximality_spot_check(u22):
    import random

    samples = 100
    stats = explore.conjecture_probe(2, 2, samples, master_seed=2, universe=u22)
    # re-derive each sampled set and confirm independence and maximality
    for i in range(samples):
        rng = random.Random(2 * 1_000_003 + i)
        seed_flag = rng.randrange(len(u22))
        ids = explore._greedy_complete_ids([seed_flag], rng, u22)
        flags = {u22.flag_of(j) for j in ids}
        assert indsets.is_independent(flags)
        assert indsets.is_maximal(flags, u22)
        assert len(flags) in stats.size_histogram


def test_probe_with_pencil_seed_reports_pencil(f2, u22):
    # a sample seeded with a full pencil must land in the pencil bucket;
    # emulate by checking the classifier helpers directly on a completion
    import numpy as np

    e = unit_rows(5)
    p = pg.rref([e[0]], 5, f2)
    pencil = indsets.build(indsets.point_pencil(p)).all
    completed = explore.greedy_complete(pencil, rng_seed=1, universe=u22)
    in_set = np.zeros(len(u22), dtype=bool)
    for f in completed:
        in_set[u22.id_of(f)] = True
    assert indsets.pencil_base_candidates(in_set, u22)


def test_probe_histogram_sizes_within_e0(u22):
    stats = explore.conjecture_probe(2, 2, 30, master_seed=9, universe=u22)
    e0 = qcalc.size_constants(2, 2, 5).e0
    # raw observation, not a general claim: every greedy
    # completion at (2,2) stayed within e0 in this seeded run
    assert max(stats.size_histogram) <= e0


def test_probe_runs_at_q3(u23):
    stats = explore.conjecture_probe(2, 3, 5, master_seed=1, universe=u23)
    assert sum(stats.size_histogram.values()) == 5
    buckets = (
        stats.with_point_pencil + stats.with_dual_point_pencil
        + stats.trichotomy_small + len(stats.unstructured_large)
    )
    assert buckets == 5


def test_greedy_color_proper_and_bounded(u22):
    result = explore.greedy_color(2, 2, universe=u22)
    assert result.num_colors >= 9  # the fractional bracket lower bound
    assert len(result.colors) == len(u22)
    by_color = {}
    for i, c in enumerate(result.colors):
        by_color.setdefault(c, []).append(i)
    for c, ids in by_color.items():
        assert u22.check_pairwise_independent(ids) is None
    again = explore.greedy_color(2, 2, universe=u22)
    assert again.colors == result.colors


def test_greedy_color_degree_random_order(u22):
    a = explore.greedy_color(2, 2, order="degree-random", seed=4, universe=u22)
    b = explore.greedy_color(2, 2, order="degree-random", seed=4, universe=u22)
    assert a.colors == b.colors
    assert a.num_colors >= 9


def test_greedy_color_cap(u22):
    with pytest.raises(TooLarge):
        explore.greedy_color(2, 2, universe=u22, cap=10)
