"""Diagnostics over fusion rules: primitivity, van Hove boundary ratios,
frequency hulls, ergodicity verdicts, and patch-frequency estimation.

Everything here is exact rational arithmetic on top of the transition
matrices; floats appear only when callers pass float tolerances (compared
against Fractions, which Python does exactly).

The frequency hull at (n, N) is the set of volume-normalized columns of
M_{n,N}: every achievable level-n frequency vector, as seen from horizon N,
is a convex combination of these vertices. A hull shrinking to a point is
evidence (never proof, at finite depth) of a unique frequency measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from .core import FusionRule, resolve_level
from .errors import ExpansionTooLargeError, InvalidRangeError
from .expand import (
    DEFAULT_BUDGET,
    CellPatch,
    ExpansionBudget,
    _prefix_labels,
    _suffix_labels,
    cell_count,
    expand_supertile,
    occurrences_2d,
    parse_word,
    tile_count,
)
from .transition import transition_matrix, volumes


# ---------------------------------------------------------------------------
# Primitivity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimitivityResult:
    level: int
    max_offset: int
    minimal_offset: Optional[int]
    # (row_label, col_label, horizon) of a zero entry at the largest
    # checked horizon, when minimal_offset is absent
    witness_zero: Optional[tuple[str, str, int]] = None

    @property
    def primitive_within_horizon(self) -> bool:
        return self.minimal_offset is not None


def primitivity_check(rule: FusionRule, n: int, max_offset: int) -> PrimitivityResult:
    """Smallest d <= max_offset with M_{n,n+d} entrywise positive.

    Positivity persists once reached (every step matrix has a nonzero in
    every column), so scanning stops at the first success.
    """
    if max_offset < 1:
        raise InvalidRangeError(n, n + max_offset)
    for d in range(1, max_offset + 1):
        if transition_matrix(rule, n, n + d).is_positive():
            return PrimitivityResult(n, max_offset, d)
    m = transition_matrix(rule, n, n + max_offset)
    for i, row_label in enumerate(m.row_labels):
        for j, col_label in enumerate(m.col_labels):
            if m.entries[i][j] == 0:
                return PrimitivityResult(
                    n, max_offset, None, (row_label, col_label, n + max_offset)
                )
    raise AssertionError("unreachable: non-positive matrix with no zero entry")


# ---------------------------------------------------------------------------
# van Hove boundary ratios
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VanHoveReport:
    depth: int
    r: int
    levels: tuple[int, ...]
    # per level: max over supertiles of Vol(boundary band) / Vol(supertile)
    ratios: tuple[Fraction, ...]
    max_labels: tuple[str, ...]  # which supertile attains each max
    verdict: str  # "consistent with van Hove" | "inconclusive"


def _boundary_band_2d(cells: set[tuple[int, int]], r: int) -> int:
    """Cells within graph distance r of the patch boundary, on both sides:
    patch cells within r of the complement plus complement cells within r
    of the patch."""
    neighbors = ((1, 0), (-1, 0), (0, 1), (0, -1))
    # complement cells adjacent to the patch are at distance 1 from it;
    # patch cells adjacent to the complement are at distance 1 from it
    inside_frontier = set()
    outside_frontier = set()
    for (x, y) in cells:
        for dx, dy in neighbors:
            c = (x + dx, y + dy)
            if c not in cells:
                inside_frontier.add((x, y))
                outside_frontier.add(c)
    count = 0
    for frontier, member in ((inside_frontier, True), (outside_frontier, False)):
        seen = set(frontier)
        layer = frontier
        count += len(frontier)
        for _ in range(r - 1):
            nxt = set()
            for (x, y) in layer:
                for dx, dy in neighbors:
                    c = (x + dx, y + dy)
                    if c in seen or (c in cells) != member:
                        continue
                    nxt.add(c)
            seen |= nxt
            count += len(nxt)
            layer = nxt
    return count


def van_hove_diagnostic(
    rule: FusionRule,
    depth: int,
    r: int = 1,
    budget: Optional[ExpansionBudget] = None,
    threshold: Fraction = Fraction(1, 2),
) -> VanHoveReport:
    """Boundary-to-volume ratios for levels 1..depth.

    1D: 2r / length. 2D: the two-sided r-band around the patch boundary
    divided by the cell count, measured on the expanded supertile. Each
    level reports the worst (largest) supertile ratio.
    """
    budget = budget or DEFAULT_BUDGET
    levels = tuple(range(1, depth + 1))
    ratios = []
    max_labels = []
    for lv in levels:
        best: Optional[Fraction] = None
        best_label = ""
        for label in resolve_level(rule, lv).labels:
            if rule.dimension == 1:
                ratio = Fraction(2 * r, cell_count(rule, lv, label))
            else:
                patch = expand_supertile(rule, lv, label, budget)
                cells = {c for c, _ in patch.cells}
                ratio = Fraction(_boundary_band_2d(cells, r), len(cells))
            if best is None or ratio > best:
                best = ratio
                best_label = label
        ratios.append(best)
        max_labels.append(best_label)
    tail = ratios[-3:]
    decreasing = all(a > b for a, b in zip(tail, tail[1:]))
    verdict = (
        "consistent with van Hove"
        if decreasing and ratios[-1] < threshold
        else "inconclusive"
    )
    return VanHoveReport(depth, r, levels, tuple(ratios), tuple(max_labels), verdict)


# ---------------------------------------------------------------------------
# Frequency hulls and ergodicity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrequencyHull:
    level: int
    horizon: int
    labels: tuple[str, ...]  # level-n supertile labels (coordinate order)
    vertex_labels: tuple[str, ...]  # level-N supertile labels
    vertices: tuple[tuple[Fraction, ...], ...]  # one per horizon supertile
    diameter: Fraction  # volume-weighted L1
    centroid: tuple[Fraction, ...]


@lru_cache(maxsize=None)
def frequency_hull(rule: FusionRule, n: int, N: int) -> FrequencyHull:
    """Volume-normalized columns of M_{n,N} plus diameter and centroid."""
    if N <= n:
        raise InvalidRangeError(n, N)
    m = transition_matrix(rule, n, N)
    vol_n = volumes(rule, n).values
    vol_N = volumes(rule, N).values
    vertices = tuple(
        tuple(m.entries[i][j] / vol_N[j] for i in range(len(m.row_labels)))
        for j in range(len(m.col_labels))
    )
    diameter = Fraction(0)
    for a in range(len(vertices)):
        for b in range(a + 1, len(vertices)):
            d = sum(
                vol_n[i] * abs(vertices[a][i] - vertices[b][i])
                for i in range(len(vol_n))
            )
            if d > diameter:
                diameter = d
    k = len(vertices)
    centroid = tuple(
        sum((v[i] for v in vertices), Fraction(0)) / k for i in range(len(vol_n))
    )
    return FrequencyHull(n, N, m.row_labels, m.col_labels, vertices, diameter, centroid)


@dataclass(frozen=True)
class ErgodicityReport:
    level: int
    depth: int
    tol: Fraction
    horizons: tuple[int, ...]
    diameters: tuple[Fraction, ...]
    verdict: str  # "unique" | "multiple" | "undecided"
    # when "multiple": two sequences of (vertex label, vertex) over horizons,
    # following the pair of vertices realizing each diameter
    trajectories: Optional[
        tuple[
            tuple[tuple[str, tuple[Fraction, ...]], ...],
            tuple[tuple[str, tuple[Fraction, ...]], ...],
        ]
    ] = None


def _extremal_pair(hull: FrequencyHull, vol_n) -> tuple[int, int]:
    best = (0, 0)
    best_d = Fraction(-1)
    for a in range(len(hull.vertices)):
        for b in range(a + 1, len(hull.vertices)):
            d = sum(
                vol_n[i] * abs(hull.vertices[a][i] - hull.vertices[b][i])
                for i in range(len(vol_n))
            )
            if d > best_d:
                best_d = d
                best = (a, b)
    return best


def ergodicity_report(
    rule: FusionRule,
    n: int,
    depth: int,
    tol: Union[Fraction, float] = Fraction(1, 10**6),
    window: int = 3,
    floor: Union[Fraction, float] = Fraction(1, 100),
) -> ErgodicityReport:
    """Verdict from the hull-diameter sequence at horizons n+1..depth.

    unique: the final diameter is below tol. multiple: every diameter in
    the trailing window stays above floor (slow contractions stay
    undecided). Verdicts are finite-depth diagnostics, not proofs.
    """
    if depth <= n:
        raise InvalidRangeError(n, depth)
    horizons = tuple(range(n + 1, depth + 1))
    hulls = [frequency_hull(rule, n, N) for N in horizons]
    diameters = tuple(h.diameter for h in hulls)
    if diameters[-1] < tol:
        verdict = "unique"
        trajectories = None
    elif all(d > floor for d in diameters[-window:]):
        verdict = "multiple"
        vol_n = volumes(rule, n).values
        lo_side = []
        hi_side = []
        for h in hulls:
            a, b = _extremal_pair(h, vol_n)
            lo_side.append((h.vertex_labels[a], h.vertices[a]))
            hi_side.append((h.vertex_labels[b], h.vertices[b]))
        trajectories = (tuple(lo_side), tuple(hi_side))
    else:
        verdict = "undecided"
        trajectories = None
    tol_frac = tol if isinstance(tol, Fraction) else Fraction(str(tol))
    return ErgodicityReport(n, depth, tol_frac, horizons, diameters, verdict, trajectories)


# ---------------------------------------------------------------------------
# Word counting (1D), patch counting (2D)
# ---------------------------------------------------------------------------


def _cross_count(left: tuple[str, ...], right: tuple[str, ...], word: tuple[str, ...]) -> int:
    """Occurrences of word inside left+right that straddle the boundary."""
    window = left + right
    m = len(word)
    cut = len(left)
    count = 0
    for i in range(len(window) - m + 1):
        if i < cut and i + m > cut and window[i : i + m] == word:
            count += 1
    return count


def word_count(
    rule: FusionRule,
    word: Union[str, tuple[str, ...]],
    level: int,
    label: str,
    budget: Optional[ExpansionBudget] = None,
) -> int:
    """Exact occurrences of the word in the supertile's expansion.

    Counted recursively: occurrences inside children plus occurrences
    straddling junctions, read off memoized prefixes/suffixes of length
    |word|-1. A run of k identical children has k-1 identical junctions, so
    its cost is constant: supertiles with 10^n children stay cheap. Levels
    whose children are shorter than the word are counted by brute scan of
    the (necessarily small-factor) expansion, within budget.
    """
    if rule.dimension != 1:
        raise ValueError("word_count is for 1D rules")
    budget = budget or DEFAULT_BUDGET
    labels = parse_word(rule, word) if isinstance(word, str) else tuple(word)
    m = len(labels)
    if m == 0:
        raise ValueError("empty word")

    memo: dict[tuple[int, str], int] = {}

    def rec(lv: int, lab: str) -> int:
        key = (lv, lab)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if tile_count(rule, lv, lab) < m:
            memo[key] = 0
            return 0
        if lv == 0:
            out = 1 if labels == (lab,) else 0
            memo[key] = out
            return out
        s = resolve_level(rule, lv).supertile(lab)
        if any(tile_count(rule, lv - 1, p.child) < m for p in s.body):
            # a word can straddle more than one junction here; scan outright
            predicted = cell_count(rule, lv, lab)
            if predicted > budget.max_cells:
                raise ExpansionTooLargeError(predicted, budget.max_cells)
            seq = expand_supertile(rule, lv, lab, budget).labels
            out = sum(1 for i in range(len(seq) - m + 1) if seq[i : i + m] == labels)
            memo[key] = out
            return out
        out = 0
        for p in s.body:
            out += p.repeat * rec(lv - 1, p.child)
        # junctions: inside runs of one child, then between adjacent runs
        for p in s.body:
            if p.repeat > 1:
                sfx = _suffix_labels(rule, lv - 1, p.child, m - 1)
                pfx = _prefix_labels(rule, lv - 1, p.child, m - 1)
                out += (p.repeat - 1) * _cross_count(sfx, pfx, labels)
        for a, b in zip(s.body, s.body[1:]):
            sfx = _suffix_labels(rule, lv - 1, a.child, m - 1)
            pfx = _prefix_labels(rule, lv - 1, b.child, m - 1)
            out += _cross_count(sfx, pfx, labels)
        memo[key] = out
        return out

    return rec(level, label)


def patch_count_2d(
    rule: FusionRule,
    patch: CellPatch,
    level: int,
    label: str,
    budget: Optional[ExpansionBudget] = None,
) -> int:
    """Translated occurrences of the patch in the expanded supertile."""
    if rule.dimension != 2 or patch.dimension != 2:
        raise ValueError("patch_count_2d is for 2D rules and patches")
    expansion = expand_supertile(rule, level, label, budget or DEFAULT_BUDGET)
    return len(occurrences_2d(patch, expansion))


# ---------------------------------------------------------------------------
# Patch frequency intervals and universality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrequencyInterval:
    description: str
    level: int
    horizon: int
    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def patch_frequency_estimate(
    rule: FusionRule,
    patch: Union[str, tuple[str, ...], CellPatch],
    n: int,
    N: int,
    budget: Optional[ExpansionBudget] = None,
) -> FrequencyInterval:
    """Range of the per-volume patch frequency over the hull at (n, N).

    lo/hi are the min/max over hull vertices rho of
    sum_i count(patch, P_n(i)) * rho_i; exact rationals.
    """
    budget = budget or DEFAULT_BUDGET
    labels_n = resolve_level(rule, n).labels
    if isinstance(patch, CellPatch) and patch.dimension == 2:
        counts = [patch_count_2d(rule, patch, n, lab, budget) for lab in labels_n]
        description = f"patch[{patch.cell_count()} cells]"
    else:
        word = patch if isinstance(patch, (str, tuple)) else tuple(patch.labels)
        counts = [word_count(rule, word, n, lab, budget) for lab in labels_n]
        description = word if isinstance(word, str) else "".join(word)
    hull = frequency_hull(rule, n, N)
    values = [
        sum((counts[i] * v[i] for i in range(len(counts))), Fraction(0))
        for v in hull.vertices
    ]
    return FrequencyInterval(description, n, N, min(values), max(values))


def patch_universality(
    rule: FusionRule,
    word: Union[str, tuple[str, ...]],
    max_level: int,
    budget: Optional[ExpansionBudget] = None,
) -> Optional[int]:
    """Smallest level at which every supertile contains the word, if any."""
    if rule.dimension != 1:
        raise ValueError("patch_universality is for 1D rules")
    budget = budget or DEFAULT_BUDGET
    for N in range(0, max_level + 1):
        if all(
            word_count(rule, word, N, lab, budget) > 0
            for lab in resolve_level(rule, N).labels
        ):
            return N
    return None
