"""Wiener-type series: capacities of dyadic-like shells, summed with weights."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigurationError
from ..geometry import DiscretizedSet, invert_set, shell_decompose
from ..kernel import DEFAULT_MAX_POINTS, RieszParams, assemble
from .balayage import equilibrium
from .results import ThinnessReport

MODES = {
    # mode: (power of r^(j (n - alpha)) in the denominator, allowed direction)
    "irregular_point": (1, "inward"),
    "thin_at_infinity": (1, "outward"),
    "ultrathin": (2, None),
}


def _shell_capacity(params, A, idx, center, via_inversion, max_points):
    sub = A.subset(idx)
    h = A.nn_dist[idx]
    if via_inversion:
        r = np.linalg.norm(sub.points - center, axis=1)
        sub = invert_set(sub, center)
        # inversion stretches lengths locally by 1/r^2
        h = h / (r * r)
    return equilibrium(assemble(params, sub, max_points=max_points, spacing=h)).capacity


def wiener_series(A: DiscretizedSet, center, mode: str, ratio: float, params: RieszParams,
                  max_shells: int = 40, via_inversion: bool = False,
                  resolved_radius: float | None = None, outer_limit: float | None = None,
                  decay_ratio: float = 0.7, floor: float = 0.1,
                  max_points: int = DEFAULT_MAX_POINTS) -> ThinnessReport:
    """Partial sums of ``c(A_j) / r^(p j (n - alpha))`` over the shells ``A_j`` about ``center``.

    ``p`` is 1 for the irregular-point and thin-at-infinity series and 2 for
    the ultrathin one.  With ``via_inversion`` the ultrathin term is the
    capacity of the inverted shell instead, which carries the same factor.

    Only informative shells enter: inward shells whose inner radius is at
    least ``resolved_radius`` and outward shells whose outer radius is at most
    ``outer_limit`` (the truncation radius by default).  Empty informative
    shells contribute zero.  The verdict is ``convergent`` when the last three
    terms shrink by factors below ``decay_ratio`` (or vanish), ``divergent``
    when each of them is at least ``floor`` times the mean term, and
    ``inconclusive`` otherwise.
    """
    if mode not in MODES:
        raise ConfigurationError(f"unknown Wiener mode {mode!r}")
    power, direction = MODES[mode]
    if direction is None:
        direction = "inward" if ratio < 1.0 else "outward"
    if via_inversion and (mode != "ultrathin" or direction != "inward"):
        raise ConfigurationError("via_inversion applies to the inward ultrathin series")
    if max_shells < 1:
        raise ConfigurationError("max_shells must be positive")
    c = np.asarray(center, dtype=float)
    shells = shell_decompose(A, c, ratio, direction)
    by_j = shells.indices()
    if outer_limit is None and direction == "outward":
        outer_limit = A.truncation_radius
    if not by_j:
        return ThinnessReport(mode, ratio, (), (), (), "convergent", 0, decay_ratio, floor)

    j0 = min(by_j)
    limit = resolved_radius if direction == "inward" else outer_limit
    if limit is None:
        # nothing lies beyond the last occupied shell: three genuine zeros close the tail
        j_last = max(by_j) + 3
    elif direction == "inward":
        j_last = math.floor(math.log(limit) / math.log(ratio)) - 1
        while ratio ** (j_last + 1) < limit:
            j_last -= 1
    else:
        j_last = math.floor(math.log(limit) / math.log(ratio)) - 1
        while ratio ** (j_last + 1) > limit:
            j_last -= 1
    js = list(range(j0, min(j_last, j0 + max_shells - 1) + 1))
    scale = (params.dim - params.alpha) * power
    terms = []
    for j in js:
        idx = by_j.get(j)
        if idx is None:
            terms.append(0.0)
            continue
        cap = _shell_capacity(params, A, idx, c, via_inversion, max_points)
        terms.append(cap if via_inversion else cap / ratio ** (j * scale))
    partial = tuple(float(v) for v in np.cumsum(terms))
    verdict = series_verdict(terms, decay_ratio, floor) if js else "inconclusive"
    return ThinnessReport(mode, float(ratio), tuple(float(t) for t in terms), partial, tuple(js),
                          verdict, len(js), decay_ratio, floor)


def series_verdict(terms, decay_ratio: float = 0.7, floor: float = 0.1) -> str:
    """Three-valued convergence judgement from the tail of a nonnegative series."""
    t = [float(v) for v in terms]
    if not t or not any(t):
        return "convergent"
    if len(t) < 3:
        return "inconclusive"
    a, b, c = t[-3:]
    if a == b == c == 0.0:
        return "convergent"
    ratios = [(y / x) if x > 0 else (0.0 if y == 0 else math.inf) for x, y in ((a, b), (b, c))]
    if all(q < decay_ratio for q in ratios):
        return "convergent"
    mean = sum(t) / len(t)
    if min(a, b, c) >= floor * mean:
        return "divergent"
    return "inconclusive"
