"""Shared helpers for the test suite: admissible random parameter draws.

Identity checks want "generic" parameters: away from the integer-shift
degenerations and from zeros of the denominators that appear in the
closed forms.  The draws below sample uniformly and retry until those
margins hold, so residual assertions are well-conditioned and the seeds
stay reproducible.
"""

from __future__ import annotations

import numpy as np

from qconn.qkernel import ExponentChart, e_half, genericity_check
from qconn.qseries import QRacahSpec

# distance-to-integer margin used by the samplers (much coarser than the
# library's genericity tolerance; keeps denominators well away from zero)
MARGIN = 0.05


def _away_from_integers(values, margin=MARGIN):
    arr = np.asarray(values, dtype=float)
    return bool(np.all(np.abs(arr - np.round(arr)) >= margin))


def _chart_denominator_args(a, b, c, g, m):
    """Arguments x for which some closed form divides by s(x + k*g/2)."""
    singles = [a, b, c, a + b, a + c, b + c, a + b + c]
    lam_inf = -a - b - c - (m - 1) * g
    singles.append(lam_inf)
    args = []
    for base in singles:
        for k in range(-2 * m - 2, 3 * m + 3):
            args.append(base + k * g / 2.0)
    for k in range(1, m + 1):
        args.append(k * g / 2.0)
    return args


def draw_generic_chart(rng, m, margin=None, max_tries=20000):
    """An ExponentChart that is generic with margin to spare.

    Exponents are uniform in (-0.9, 0.9), g in (0.08, 0.45); the draw is
    retried until every genericity quantity and every denominator-sine
    argument of the connection formulas is at least ``margin`` from an
    integer.  The default margin shrinks with m (more arguments to keep
    clear simultaneously), wide enough that entries stay moderate.
    """
    if margin is None:
        n_args = len(_chart_denominator_args(0.1, 0.2, 0.3, 0.1, m))
        margin = min(MARGIN, 0.7 / n_args)
    for _ in range(max_tries):
        a, b, c = rng.uniform(-0.9, 0.9, size=3)
        g = rng.uniform(0.08, 0.45)
        chart = ExponentChart(m=m, a=float(a), b=float(b), c=float(c),
                              g=float(g))
        if genericity_check(chart, tol=margin):
            continue
        if not _away_from_integers(
                _chart_denominator_args(a, b, c, g, m), margin):
            continue
        return chart
    raise RuntimeError(f"no generic chart found in {max_tries} tries")


def draw_conditioned_chart(rng, m, entry_cap=2.0e3, max_tries=200):
    """A generic chart whose reference connection matrix has moderate
    entries, so entrywise absolute comparisons are well-conditioned."""
    from qconn.connection import FormulaVariant, connect_01

    for _ in range(max_tries):
        chart = draw_generic_chart(rng, m)
        entries = connect_01(m, chart.a, chart.b, chart.c, chart.g,
                             FormulaVariant.RACAH_UNIFORM).entries
        mags = np.abs(np.asarray(entries))
        if np.all(np.isfinite(mags)) and mags.max() <= entry_cap:
            return chart
    raise RuntimeError(f"no conditioned chart found in {max_tries} tries")


def draw_generic_lambdas(rng, m, margin=None, max_tries=20000):
    """A generic exponent triple (l1, l2, l3) plus g for the abstract
    two-basis connection problem (l1, l2, l3 play the roles the (0,1)
    problem assigns to a, c, b)."""
    chart = draw_generic_chart(rng, m, margin=margin, max_tries=max_tries)
    return chart.a, chart.c, chart.b, chart.g


def draw_real_racah(rng, N, max_tries=500):
    """A q-Racah parameter pack with 0 < q < 1 and real parameters,
    kept clear of the denominator zeros of weight and norm.  q stays
    large enough that q^(-N) <= 60, which keeps the terms of the
    orthogonality sums at a scale where 1e-10 residuals are meaningful.
    """
    for _ in range(max_tries):
        q = float(rng.uniform(0.45, 0.88))
        if q ** (-N) > 60.0:
            continue
        a = float(rng.uniform(0.05, 0.85))
        b = float(rng.uniform(0.05, 0.85))
        c = float(rng.uniform(-0.85, -0.05))
        spec = QRacahSpec(a=a, b=b, c=c, N=N, q=q)
        if _racah_margins_ok(spec):
            return spec
    raise RuntimeError(f"no admissible real q-Racah draw in {max_tries} tries")


def draw_unitary_racah(rng, N, max_tries=500):
    """A q-Racah parameter pack with q = e(g) on the unit circle and
    unit-modulus parameters a = e(2u), b = e(2v), c = e(2w)."""
    for _ in range(max_tries):
        g = float(rng.uniform(0.06, 0.3))
        u, v, w = rng.uniform(-0.45, 0.45, size=3)
        q = e_half(g)
        spec = QRacahSpec(a=e_half(2 * u), b=e_half(2 * v), c=e_half(2 * w),
                          N=N, q=q)
        if _racah_margins_ok(spec):
            return spec
    raise RuntimeError(f"no admissible unitary q-Racah draw in {max_tries} tries")


def _racah_margins_ok(spec, margin=0.02):
    """No factor that any of W/weight/norm divides by is near zero."""
    a, b, c, N, q = spec.a, spec.b, spec.c, spec.N, complex(spec.q)
    if abs(1.0 - a * b * q) < margin or abs(1.0 - c * q ** (-N)) < margin:
        return False
    # every denominator Pochhammer base across W, rho and h_n
    bases = (a * q, b * q, c * q, b * c * q, a * b * q, a * b * q * q,
             (c / a) * q ** (-N), q ** (-N) / b, 1.0 / c,
             (a / c) * q, a * b * q ** (N + 2))
    for base in bases:
        for k in range(2 * N + 3):
            if abs(1.0 - base * q ** k) < margin:
                return False
    # (q;q)_n and (q^-N;q)_x factors reduce to powers 1 - q^j, j != 0
    for j in range(1, N + 1):
        if abs(1.0 - q ** j) < margin:
            return False
    return True


def racah_orthogonality_residual(spec):
    """Worst orthogonality residual over all pairs (m, n).

    Each residual |sum_x rho(x) W_m(x) W_n(x) - delta_mn / h_n| is
    scaled by max(1, sum_x |rho W_m W_n|, |1/h_n|) — the backward-error
    scale of the sum actually formed — so the check measures identity
    failure, not floating-point cancellation in large terms.
    """
    from qconn.qseries import qracah_norm, qracah_w, qracah_weight

    N = spec.N
    W = np.array([[qracah_w(n, x, spec) for x in range(N + 1)]
                  for n in range(N + 1)])
    rho = np.array([qracah_weight(x, spec) for x in range(N + 1)])
    worst = 0.0
    for mm in range(N + 1):
        for nn in range(mm, N + 1):
            terms = rho * W[mm] * W[nn]
            total = np.sum(terms)
            target = 1.0 / qracah_norm(nn, spec) if mm == nn else 0.0
            scale = max(1.0, float(np.abs(terms).sum()), abs(target))
            worst = max(worst, abs(total - target) / scale)
    return worst
