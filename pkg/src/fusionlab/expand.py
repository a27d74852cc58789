"""Materialize supertiles as label sequences (1D) or cell grids (2D).

Expansions are exact and validated: a 2D result must cover every cell at
most once (tiles meet only along edges) and must be edge-connected. Sizes
are predicted from counts before anything is allocated, so asking for an
astronomically large supertile fails fast instead of exhausting memory.

A 2D patch is stored two ways at once: as placed tiles (anchor position +
label, the faithful notion for counting occurrences) and as the derived
cell->label map (useful for rendering and boundary geometry). 1D patches
are plain label sequences.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional, Union

from .core import FusionRule, resolve_level
from .errors import (
    DisconnectedError,
    ExpansionTooLargeError,
    OverlapError,
)

Cell = tuple[int, int]


@dataclass(frozen=True)
class ExpansionBudget:
    """Cap on the number of cells an expansion may touch."""

    max_cells: int = 10**7


DEFAULT_BUDGET = ExpansionBudget()

# Characters assigned to labels, in declaration order, when prototile names
# are not single characters themselves.
_ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789"

# Fill colors for renderSVG, cycled by label index.
_PALETTE = (
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759",
    "#b07aa1", "#edc948", "#76b7b2", "#ff9da7",
    "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
)


@dataclass(frozen=True)
class CellPatch:
    """A finite patch: 1D label sequence or 2D labeled cells.

    2D patches are anchored (min x = min y = 0). tiles records the placed
    prototiles as (anchor, label) pairs when the decomposition is known
    (always, for expansions); cells is the per-cell label map derived from
    it. Patches built directly from unit cells get one tile per cell.
    """

    dimension: int
    labels: Optional[tuple[str, ...]] = None
    cells: Optional[tuple[tuple[Cell, str], ...]] = None
    tiles: Optional[tuple[tuple[Cell, str], ...]] = None

    @staticmethod
    def from_word(labels) -> "CellPatch":
        labels = tuple(labels)
        if not labels:
            raise ValueError("empty patch")
        return CellPatch(1, labels=labels)

    @staticmethod
    def from_cells(cells: Mapping[Cell, str]) -> "CellPatch":
        """2D patch of unit tiles, one per labeled cell; normalized and
        validated connected."""
        if not cells:
            raise ValueError("empty patch")
        minx = min(x for x, _ in cells)
        miny = min(y for _, y in cells)
        norm = tuple(sorted(((x - minx, y - miny), lab) for (x, y), lab in cells.items()))
        _check_connected({c for c, _ in norm})
        return CellPatch(2, cells=norm, tiles=norm)

    @staticmethod
    def from_tiles(rule: FusionRule, tiles) -> "CellPatch":
        """2D patch from placed prototiles (anchor, label); overlap-checked,
        connectivity-checked, anchor-normalized."""
        tiles = tuple(tiles)
        if not tiles:
            raise ValueError("empty patch")
        minx = min(x for (x, _), _ in tiles)
        miny = min(y for (_, y), _ in tiles)
        tiles = tuple(((x - minx, y - miny), lab) for (x, y), lab in tiles)
        cells = _paint_cells(rule, tiles)
        _check_connected({c for c, _ in cells})
        return CellPatch(2, cells=cells, tiles=tiles)

    def cell_count(self) -> int:
        return len(self.labels) if self.dimension == 1 else len(self.cells)

    def grid(self) -> dict[Cell, str]:
        if self.dimension != 2:
            raise ValueError("grid() is for 2D patches")
        return dict(self.cells)

    def size(self) -> tuple[int, int]:
        """Bounding box (width, height); 1D height is 1."""
        if self.dimension == 1:
            return (len(self.labels), 1)
        xs = [c[0] for c, _ in self.cells]
        ys = [c[1] for c, _ in self.cells]
        return (max(xs) + 1, max(ys) + 1)


def _prototile_cells(rule: FusionRule, label: str) -> tuple[Cell, ...]:
    p = rule.prototile(label)
    return p.cells if p.cells is not None else ((0, 0),)


def _paint_cells(rule: FusionRule, tiles) -> tuple[tuple[Cell, str], ...]:
    """Cell map of placed tiles; OverlapError names the two tile indices
    that claim the same cell."""
    seen: dict[Cell, int] = {}
    out = []
    for idx, ((ax, ay), lab) in enumerate(tiles):
        for cx, cy in _prototile_cells(rule, lab):
            cell = (ax + cx, ay + cy)
            if cell in seen:
                raise OverlapError(seen[cell], idx, cell)
            seen[cell] = idx
            out.append((cell, lab))
    return tuple(sorted(out))


def _check_connected(cells: set[Cell]) -> None:
    first = next(iter(cells))
    seen = set()
    stack = [first]
    while stack:
        c = stack.pop()
        if c in seen or c not in cells:
            continue
        seen.add(c)
        x, y = c
        stack.extend(((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)))
    if len(seen) != len(cells):
        sizes = [len(seen)]
        rest = cells - seen
        while rest:
            comp = set()
            stack = [next(iter(rest))]
            while stack:
                c = stack.pop()
                if c in comp or c not in rest:
                    continue
                comp.add(c)
                x, y = c
                stack.extend(((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)))
            sizes.append(len(comp))
            rest -= comp
        raise DisconnectedError(tuple(sorted(sizes, reverse=True)))


@lru_cache(maxsize=None)
def tile_count(rule: FusionRule, level: int, label: str) -> int:
    """Number of level-0 tiles in the supertile, without expanding."""
    if level == 0:
        rule.prototile(label)  # raises KeyError for unknown labels
        return 1
    s = resolve_level(rule, level).supertile(label)
    return sum(p.repeat * tile_count(rule, level - 1, p.child) for p in s.body)


@lru_cache(maxsize=None)
def cell_count(rule: FusionRule, level: int, label: str) -> int:
    """Number of cells the expanded supertile would occupy."""
    if level == 0:
        p = rule.prototile(label)
        return len(p.cells) if p.cells is not None else p.length
    s = resolve_level(rule, level).supertile(label)
    return sum(p.repeat * cell_count(rule, level - 1, p.child) for p in s.body)


def expand_supertile(
    rule: FusionRule,
    level: int,
    label: str,
    budget: Optional[ExpansionBudget] = None,
) -> CellPatch:
    """Fully expand one supertile into a concrete patch.

    The memo is per call, so repeated subtrees cost their size once and the
    total work stays proportional to the output plus one copy per level.
    """
    budget = budget or DEFAULT_BUDGET
    predicted = cell_count(rule, level, label)
    if predicted > budget.max_cells:
        raise ExpansionTooLargeError(predicted, budget.max_cells)

    if rule.dimension == 1:
        memo1: dict[tuple[int, str], tuple[str, ...]] = {}

        def rec1(lv: int, lab: str) -> tuple[str, ...]:
            key = (lv, lab)
            hit = memo1.get(key)
            if hit is not None:
                return hit
            if lv == 0:
                out: tuple[str, ...] = (lab,)
            else:
                s = resolve_level(rule, lv).supertile(lab)
                parts = []
                for p in s.body:
                    parts.append(rec1(lv - 1, p.child) * p.repeat)
                out = tuple(x for part in parts for x in part)
            memo1[key] = out
            return out

        return CellPatch(1, labels=rec1(level, label))

    memo2: dict[tuple[int, str], tuple[tuple[Cell, str], ...]] = {}

    def rec2(lv: int, lab: str) -> tuple[tuple[Cell, str], ...]:
        key = (lv, lab)
        hit = memo2.get(key)
        if hit is not None:
            return hit
        if lv == 0:
            out: tuple[tuple[Cell, str], ...] = (((0, 0), lab),)
        else:
            s = resolve_level(rule, lv).supertile(lab)
            acc = []
            for p in s.body:
                child = rec2(lv - 1, p.child)
                ox, oy = p.offset if p.offset is not None else (0, 0)
                for _ in range(p.repeat):
                    acc.extend((((x + ox, y + oy), clab) for (x, y), clab in child))
            out = tuple(acc)
        memo2[key] = out
        return out

    tiles = rec2(level, label)
    minx = min(x for (x, _), _ in tiles)
    miny = min(y for (_, y), _ in tiles)
    tiles = tuple(((x - minx, y - miny), lab) for (x, y), lab in tiles)
    cells = _paint_cells(rule, tiles)
    _check_connected({c for c, _ in cells})
    return CellPatch(2, cells=cells, tiles=tiles)


def tile_census(patch: CellPatch) -> dict[str, int]:
    """How many tiles of each label the patch contains."""
    seq = patch.labels if patch.dimension == 1 else patch.tiles
    if seq is None:
        raise ValueError("patch has no tile decomposition")
    if patch.dimension == 1:
        return dict(Counter(seq))
    return dict(Counter(lab for _, lab in seq))


# ---------------------------------------------------------------------------
# Words and characters
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def label_chars(rule: FusionRule) -> dict[str, str]:
    """Deterministic label -> single character table.

    Prototile names that are already single characters name themselves;
    otherwise characters are assigned by declaration order.
    """
    names = rule.prototile_names()
    if all(len(n) == 1 for n in names):
        return {n: n for n in names}
    if len(names) > len(_ALPHABET):
        raise ValueError("too many prototiles for a character table")
    return {n: _ALPHABET[i] for i, n in enumerate(names)}


def word_string(rule: FusionRule, labels) -> str:
    """Render a label sequence as a word over the rule's character table."""
    table = label_chars(rule)
    return "".join(table[lab] for lab in labels)


def parse_word(rule: FusionRule, text: str) -> tuple[str, ...]:
    """Inverse of word_string; also accepts whitespace-separated label names."""
    if not text.strip():
        raise ValueError("empty word")
    if any(ch.isspace() for ch in text.strip()):
        names = set(rule.prototile_names())
        out = []
        for part in text.split():
            if part not in names:
                raise ValueError(f"unknown label {part!r}")
            out.append(part)
        return tuple(out)
    inverse = {ch: lab for lab, ch in label_chars(rule).items()}
    out = []
    for ch in text:
        if ch not in inverse:
            raise ValueError(f"unknown label character {ch!r}")
        out.append(inverse[ch])
    return tuple(out)


# ---------------------------------------------------------------------------
# Prefix / suffix without full expansion
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _prefix_labels(rule: FusionRule, level: int, label: str, length: int) -> tuple[str, ...]:
    if length <= 0:
        return ()
    if level == 0:
        return (label,)
    s = resolve_level(rule, level).supertile(label)
    out: list[str] = []
    for p in s.body:
        child_len = tile_count(rule, level - 1, p.child)
        for _ in range(p.repeat):
            out.extend(_prefix_labels(rule, level - 1, p.child, length - len(out)))
            if len(out) >= length:
                return tuple(out[:length])
            # further copies of this child only repeat the same labels
            if child_len >= length:
                break
    return tuple(out[:length])


@lru_cache(maxsize=None)
def _suffix_labels(rule: FusionRule, level: int, label: str, length: int) -> tuple[str, ...]:
    if length <= 0:
        return ()
    if level == 0:
        return (label,)
    s = resolve_level(rule, level).supertile(label)
    out: list[str] = []  # collected right-to-left, reversed at the end
    for p in reversed(s.body):
        child_len = tile_count(rule, level - 1, p.child)
        for _ in range(p.repeat):
            piece = _suffix_labels(rule, level - 1, p.child, length - len(out))
            out.extend(reversed(piece))
            if len(out) >= length:
                return tuple(reversed(out[:length]))
            if child_len >= length:
                break
    return tuple(reversed(out[:length]))


def prefix_suffix(rule: FusionRule, level: int, label: str, length: int) -> tuple[str, str]:
    """First and last min(length, size) labels of the expansion, as words.

    Computed recursively, so it works at levels whose full expansion is far
    beyond any budget.
    """
    if rule.dimension != 1:
        raise ValueError("prefix_suffix is for 1D rules")
    if length < 1:
        raise ValueError("length must be >= 1")
    pre = _prefix_labels(rule, level, label, length)
    suf = _suffix_labels(rule, level, label, length)
    return (word_string(rule, pre), word_string(rule, suf))


# ---------------------------------------------------------------------------
# Admissibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibilityResult:
    found: bool
    level: Optional[int] = None
    label: Optional[str] = None
    position: Optional[tuple[int, ...]] = None  # (index,) in 1D, (x, y) in 2D
    searched_levels: int = 0


def occurrences_2d(patch: CellPatch, inside: CellPatch) -> list[Cell]:
    """Translations t with patch + t contained in inside.

    Matches placed tiles against placed tiles when both decompositions are
    known (faithful counting even where same-label tiles touch); otherwise
    falls back to matching the cell maps.
    """
    if patch.tiles is not None and inside.tiles is not None:
        have = set(inside.tiles)
        (ax, ay), alab = patch.tiles[0]
        rest = patch.tiles[1:]
        hits = []
        for (bx, by), blab in inside.tiles:
            if blab != alab:
                continue
            t = (bx - ax, by - ay)
            if all(((x + t[0], y + t[1]), lab) in have for (x, y), lab in rest):
                hits.append(t)
        return sorted(hits)
    grid = inside.grid()
    (ax, ay), alab = patch.cells[0]
    rest = patch.cells[1:]
    hits = []
    for (bx, by), blab in grid.items():
        if blab != alab:
            continue
        t = (bx - ax, by - ay)
        if all(grid.get((x + t[0], y + t[1])) == lab for (x, y), lab in rest):
            hits.append(t)
    return sorted(hits)


def is_admissible(
    rule: FusionRule,
    patch: Union[CellPatch, str],
    max_level: int,
    budget: Optional[ExpansionBudget] = None,
) -> AdmissibilityResult:
    """Search supertile expansions, level by level, for the patch.

    A miss only means "not found up to max_level"; it is not a proof of
    inadmissibility.
    """
    budget = budget or DEFAULT_BUDGET
    if isinstance(patch, str):
        if rule.dimension != 1:
            raise ValueError("word admissibility is for 1D rules")
        patch = CellPatch.from_word(parse_word(rule, patch))
    if patch.dimension != rule.dimension:
        raise ValueError("patch dimension does not match the rule")
    needle = word_string(rule, patch.labels) if patch.dimension == 1 else None
    for level in range(0, max_level + 1):
        for label in resolve_level(rule, level).labels:
            expansion = expand_supertile(rule, level, label, budget)
            if patch.dimension == 1:
                pos = word_string(rule, expansion.labels).find(needle)
                if pos >= 0:
                    return AdmissibilityResult(True, level, label, (pos,), level + 1)
            else:
                hits = occurrences_2d(patch, expansion)
                if hits:
                    return AdmissibilityResult(True, level, label, hits[0], level + 1)
    return AdmissibilityResult(False, searched_levels=max_level + 1)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _patch_table(patch: CellPatch, rule: Optional[FusionRule]) -> dict[str, str]:
    if rule is not None:
        return label_chars(rule)
    if patch.dimension == 1:
        labs = sorted(set(patch.labels))
    else:
        labs = sorted({lab for _, lab in patch.cells})
    if all(len(lab) == 1 for lab in labs):
        return {lab: lab for lab in labs}
    return {lab: _ALPHABET[i] for i, lab in enumerate(labs)}


def render_text(patch: CellPatch, rule: Optional[FusionRule] = None) -> str:
    """1D: the word itself. 2D: one text row per y (top = max y), `.` for
    empty cells."""
    table = _patch_table(patch, rule)
    if patch.dimension == 1:
        return "".join(table[lab] for lab in patch.labels)
    grid = patch.grid()
    width, height = patch.size()
    rows = []
    for y in range(height - 1, -1, -1):
        rows.append("".join(
            table[grid[(x, y)]] if (x, y) in grid else "."
            for x in range(width)
        ))
    return "\n".join(rows)


def render_svg(
    patch: CellPatch,
    cell_size: int = 16,
    rule: Optional[FusionRule] = None,
) -> str:
    """SVG document: one unit square per cell, deterministic fill per label,
    black cell borders, tight canvas. 1D patches render as a 1 x n strip."""
    if patch.dimension == 1:
        cells = tuple(((i, 0), lab) for i, lab in enumerate(patch.labels))
    else:
        cells = patch.cells
    if rule is not None:
        order = {lab: i for i, lab in enumerate(rule.prototile_names())}
    else:
        order = {lab: i for i, lab in enumerate(sorted({lab for _, lab in cells}))}
    width = max(x for (x, _), _ in cells) + 1
    height = max(y for (_, y), _ in cells) + 1
    s = cell_size
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width * s}" '
        f'height="{height * s}" viewBox="0 0 {width * s} {height * s}">'
    ]
    for (x, y), lab in sorted(cells):
        color = _PALETTE[order[lab] % len(_PALETTE)]
        lines.append(
            f'<rect x="{x * s}" y="{(height - 1 - y) * s}" width="{s}" height="{s}" '
            f'fill="{color}" stroke="black" stroke-width="1"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
