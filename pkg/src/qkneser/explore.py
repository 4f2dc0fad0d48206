"""Stochastic desk-scale probes of maximal-independent-set structure.

Sampling cannot prove or refute the structure conjecture; the probe only
gathers evidence.  Every sample greedily completes a uniformly random seed
flag to a maximal independent set, tests it for point-pencil and dual
point-pencil containment, and buckets it against the size threshold
rho * q^(d^2+d-2).  Sets above the threshold without either pencil are
recorded with their seed so they can be re-examined by hand.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple

import numpy as np

from . import indsets
from .errors import NotIndependent, TooLarge
from .gf import make_field
from .kneser import DEFAULT_VERTEX_CAP, Flag, FlagUniverse


@dataclass
class SampleStats:
    """Aggregated evidence from one probe run."""

    d: int
    q: int
    samples: int
    master_seed: int
    rho_candidate: int
    threshold: int
    size_histogram: Dict[int, int] = field(default_factory=dict)
    with_point_pencil: int = 0
    with_dual_point_pencil: int = 0
    trichotomy_small: int = 0
    unstructured_large: List[Tuple[int, int]] = field(default_factory=list)
    classified_variants: Dict[str, int] = field(default_factory=dict)

    def to_json(self) -> Dict:
        return {
            "d": self.d,
            "q": self.q,
            "samples": self.samples,
            "master_seed": self.master_seed,
            "rho_candidate": self.rho_candidate,
            "threshold": self.threshold,
            "size_histogram": {str(k): v for k, v in sorted(self.size_histogram.items())},
            "with_point_pencil": self.with_point_pencil,
            "with_dual_point_pencil": self.with_dual_point_pencil,
            "trichotomy_small": self.trichotomy_small,
            "unstructured_large": [list(t) for t in self.unstructured_large],
            "classified_variants": dict(sorted(self.classified_variants.items())),
            "max_observed_size": max(self.size_histogram) if self.size_histogram else 0,
        }


def _greedy_complete_ids(seed_ids: Iterable[int], rng: random.Random, universe: FlagUniverse) -> List[int]:
    ids = sorted(set(int(i) for i in seed_ids))
    if ids:
        hit = universe.check_pairwise_independent(ids)
        if hit is not None:
            raise NotIndependent(f"seed set contains the adjacent pair {hit}")
    lo = universe.flag_int_masks(0)
    hi = universe.flag_int_masks(1)
    current = list(ids)
    order = list(range(len(universe)))
    rng.shuffle(order)
    in_set = set(current)
    for cand in order:
        if cand in in_set:
            continue
        cl, ch = lo[cand], hi[cand]
        for m in current:
            if (cl & hi[m]) == 0 and (ch & lo[m]) == 0:
                break
        else:
            current.append(cand)
            in_set.add(cand)
    return sorted(current)


def greedy_complete(seed_set: Iterable[Flag], rng_seed: int, universe: FlagUniverse) -> Set[Flag]:
    """Deterministic maximal independent superset of the given independent seed."""
    seed_ids = [universe.id_of(f) for f in set(seed_set)]
    rng = random.Random(rng_seed)
    ids = _greedy_complete_ids(seed_ids, rng, universe)
    return {universe.flag_of(i) for i in ids}


def _contains_point_pencil(in_set: np.ndarray, universe: FlagUniverse) -> bool:
    return bool(indsets.pencil_base_candidates(in_set, universe))


def _contains_dual_point_pencil(in_set: np.ndarray, universe: FlagUniverse) -> bool:
    return bool(indsets.dual_pencil_base_candidates(in_set, universe))


def conjecture_probe(
    d: int,
    q: int,
    samples: int,
    master_seed: int = 0,
    rho_candidate: int = 5,
    universe: Optional[FlagUniverse] = None,
) -> SampleStats:
    """Sample maximal independent sets and bucket them by the trichotomy."""
    if samples < 1:
        raise ValueError("need at least one sample")
    fld = make_field(q)
    if universe is None:
        universe = FlagUniverse(2 * d + 1, (d, d + 1), fld)
    threshold = rho_candidate * q ** (d * d + d - 2)
    stats = SampleStats(
        d=d, q=q, samples=samples, master_seed=master_seed,
        rho_candidate=rho_candidate, threshold=threshold,
    )
    for i in range(samples):
        rng = random.Random(master_seed * 1_000_003 + i)
        seed_flag = rng.randrange(len(universe))
        ids = _greedy_complete_ids([seed_flag], rng, universe)
        size = len(ids)
        stats.size_histogram[size] = stats.size_histogram.get(size, 0) + 1
        in_set = np.zeros(len(universe), dtype=bool)
        in_set[np.array(ids, dtype=np.int64)] = True
        if _contains_point_pencil(in_set, universe):
            stats.with_point_pencil += 1
        elif _contains_dual_point_pencil(in_set, universe):
            stats.with_dual_point_pencil += 1
        elif size <= threshold:
            stats.trichotomy_small += 1
        else:
            stats.unstructured_large.append((size, master_seed * 1_000_003 + i))
        result = indsets.classify((universe.flag_of(j) for j in ids), universe)
        key = result.variant if isinstance(result, indsets.IndSetDescriptor) else "unstructured"
        stats.classified_variants[key] = stats.classified_variants.get(key, 0) + 1
    return stats


@dataclass
class ColoringResult:
    """A proper coloring produced by the greedy heuristic."""

    num_colors: int
    colors: List[int]
    order: str
    seed: int

    def to_json(self) -> Dict:
        return {
            "num_colors": self.num_colors,
            "order": self.order,
            "seed": self.seed,
            "colors": self.colors,
        }


def greedy_color(
    d: int,
    q: int,
    order: str = "enumeration",
    seed: int = 0,
    universe: Optional[FlagUniverse] = None,
    cap: int = DEFAULT_VERTEX_CAP,
) -> ColoringResult:
    """Greedy proper coloring; the color count is a raw observation only."""
    fld = make_field(q)
    if universe is None:
        universe = FlagUniverse(2 * d + 1, (d, d + 1), fld)
    n_vertices = len(universe)
    if n_vertices > cap:
        raise TooLarge(f"{n_vertices} vertices exceed the cap of {cap}")
    if order == "enumeration":
        sequence = list(range(n_vertices))
    elif order == "degree-random":
        rng = random.Random(seed)
        jitter = [rng.random() for _ in range(n_vertices)]
        degrees = [universe.degree(i) for i in range(n_vertices)]
        sequence = sorted(range(n_vertices), key=lambda i: (-degrees[i], jitter[i]))
    else:
        raise ValueError(f"unknown order {order!r}")

    colors = [-1] * n_vertices
    for v in sequence:
        row = universe.adjacency_row(v)
        used = {colors[int(j)] for j in np.nonzero(row)[0] if colors[int(j)] >= 0}
        c = 0
        while c in used:
            c += 1
        colors[v] = c
    return ColoringResult(num_colors=max(colors) + 1, colors=colors, order=order, seed=seed)
