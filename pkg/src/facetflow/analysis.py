"""Facet-structure metrics for piecewise-constant-looking profiles.

The fourth-order singular flows turn smooth initial data into staircase
profiles.  Two complementary metrics quantify that:

* ``cyclic_plateaus`` finds maximal runs of consecutive cells (with
  wrap-around) whose values fit in a narrow band -- the facets of a 1D
  profile, positional.
* ``plateau_coverage`` ignores position entirely and measures which fraction
  of all cells shares its value with a sufficiently populated value band --
  useful for 2D fields where facets need not be axis-aligned runs.
"""

from __future__ import annotations

import numpy as np


def cyclic_plateaus(values, min_run: int = 10, spread: float = 1e-3):
    """Maximal cyclic runs of >= ``min_run`` cells with value spread <= ``spread``.

    Returns a list of ``(start, length, level)`` tuples ordered by start
    index, where ``level`` is the mean value of the run and indices wrap
    modulo ``len(values)``.  If the whole profile fits in one band a single
    full-length run is returned.
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    if n == 0:
        return []
    if v.max() - v.min() <= spread:
        return [(0, n, float(v.mean()))]
    doubled = np.concatenate([v, v])
    # run_len[i]: longest band-limited run starting at i (capped at n)
    run_len = np.zeros(n, dtype=int)
    for i in range(n):
        lo = hi = doubled[i]
        j = i + 1
        while j < i + n:
            lo = min(lo, doubled[j])
            hi = max(hi, doubled[j])
            if hi - lo > spread:
                break
            j += 1
        run_len[i] = j - i
    plateaus = []
    for i in range(n):
        if run_len[i] < min_run:
            continue
        # maximal iff the run starting one cell earlier ends strictly earlier
        prev = (i - 1) % n
        if run_len[prev] >= run_len[i] + 1:
            continue
        seg = doubled[i : i + run_len[i]]
        plateaus.append((i, int(run_len[i]), float(seg.mean())))
    return plateaus


def _arc_has_jump(v: np.ndarray, start: int, stop: int, min_jump: float) -> bool:
    """True if some adjacent-cell difference on the cyclic arc start..stop is >= min_jump."""
    n = v.size
    i = start
    while i % n != stop % n:
        if abs(v[(i + 1) % n] - v[i % n]) >= min_jump:
            return True
        i += 1
    return False


def has_separated_plateaus(
    values,
    min_run: int = 10,
    spread: float = 1e-3,
    min_jump: float = 1e-2,
) -> bool:
    """True if two disjoint plateaus exist with a genuine jump on both arcs between them.

    A plateau is a cyclic run as in ``cyclic_plateaus``; "separated" means
    that walking from one plateau to the other -- in either direction --
    crosses at least one adjacent-cell difference of ``min_jump`` or more.
    """
    v = np.asarray(values, dtype=float)
    plateaus = cyclic_plateaus(v, min_run=min_run, spread=spread)
    if len(plateaus) < 2:
        return False
    for a in range(len(plateaus)):
        for b in range(a + 1, len(plateaus)):
            sa, la, _ = plateaus[a]
            sb, lb, _ = plateaus[b]
            # walk from the end of one plateau to the start of the other
            fwd = _arc_has_jump(v, sa + la - 1, sb, min_jump)
            bwd = _arc_has_jump(v, sb + lb - 1, sa + v.size, min_jump)
            if fwd and bwd:
                return True
    return False


def plateau_coverage(values, band_width: float = 1e-3, min_cells: int | None = None) -> float:
    """Fraction of cells whose value lies in a well-populated narrow band.

    Sorted values are grouped greedily: a new band opens whenever the next
    value exceeds the current band's first value by more than ``band_width``.
    Cells in bands holding at least ``min_cells`` members count as covered
    (default: 1% of all cells, at least 4).
    """
    v = np.sort(np.asarray(values, dtype=float).ravel())
    n = v.size
    if n == 0:
        return 0.0
    if min_cells is None:
        min_cells = max(n // 100, 4)
    covered = 0
    band_start = 0
    for i in range(1, n + 1):
        if i == n or v[i] - v[band_start] > band_width:
            count = i - band_start
            if count >= min_cells:
                covered += count
            band_start = i
    return covered / n


def reflection_asymmetry_1d(full_values) -> float:
    """Max deviation of a full 1D cell vector from its mirror image.

    The mirror maps cell n to cell N-n for n < N and fixes the closing cell
    (the reflection x -> 1-x on the torus, in cell-center terms).
    """
    v = np.asarray(full_values, dtype=float)
    mirrored = np.concatenate([v[:-1][::-1], v[-1:]])
    return float(np.abs(v - mirrored).max())
