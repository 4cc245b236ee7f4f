"""Closed-form change-of-basis matrices between solution bases.

The order-(m+1) equation satisfied by the m-variable integrals has
fundamental solution sets attached to each singular point.  This module
evaluates the (m+1) x (m+1) matrix p with

    (basis attached to the first point)_i = sum_j p_ij (second basis)_j

in the five equivalent closed forms the theory provides, tagged by
:class:`FormulaVariant`:

    SumA, SumB       alternating double sums of half-period sine products,
                     summed over splittings k + l = j;
    WellPoised87     a sine-product prefactor times a terminating
                     very-well-poised 8-phi-7, one formula per regime
                     (i + j <= m and i + j >= m);
    Balanced43       a sine-product prefactor times a terminating balanced
                     4-phi-3, again split by regime;
    RacahUniform     a single regime-free formula whose series part is a
                     q-Racah polynomial evaluation.  This is the reference
                     variant for cross-checks.

All variants are algebraically equal on generic parameters; the test
suite verifies entrywise agreement, the two-sided inversion identity,
and the half-integer-exponent specializations.

Conventions: s(A) = sin(pi*A), e(A) = exp(pi*i*A), q = e(g).  The series
parts use parameters of the form e(mu) * q^x; every series terminates.

Note on the very-well-poised argument: its printed form is ambiguous
between the combinations l1+l2 and l2+l3.  Only e(-2(l1+l2))*q^(2-i)
closes the very-well-poised parameter pattern (a, q*sqrt(a), ... with
argument a^2 q^(n+2)/(bcde)) and only it agrees with the sine-sum
variants; the alternative is rejected by a dedicated test.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .qkernel import ExponentChart, cos_pi, e_half, sin_pi
from .qseries import (
    DegenerateSeriesError,
    TerminatingSeriesSpec,
    phi,
    qpoch,
)

__all__ = [
    "BRACKET_TOL",
    "FormulaVariant",
    "ConnectionMatrix",
    "DegenerateBracketError",
    "connect_generic",
    "connect_01",
    "connect_0inf",
    "inverse_identity_residual",
    "dtype_chart",
    "dtype_symmetry_residual",
    "appendix_row",
    "appendix_col",
]

# |s(x)| below this in a denominator means the chart sits on a pole of the
# closed forms; we raise rather than return a huge entry.
BRACKET_TOL = 1e-10


class FormulaVariant(enum.Enum):
    """Which closed form to evaluate; all are equal on generic charts."""

    SUM_A = "SumA"
    SUM_B = "SumB"
    WELL_POISED_87 = "WellPoised87"
    BALANCED_43 = "Balanced43"
    RACAH_UNIFORM = "RacahUniform"


class DegenerateBracketError(ArithmeticError):
    """A denominator factor of entry (i, j) vanished (to BRACKET_TOL).

    The closed forms genuinely have poles off the generic parameter set;
    hitting one is a property of the chart, not a numerical accident, so
    it is reported with its location instead of propagating an inf.
    """

    def __init__(self, i: int, j: int, factor: str, value: complex):
        self.i = i
        self.j = j
        self.factor = factor
        self.value = value
        super().__init__(
            f"entry ({i},{j}): vanishing denominator factor {factor} "
            f"= {value!r}"
        )


@dataclass(frozen=True, eq=False)
class ConnectionMatrix:
    """An (m+1) x (m+1) matrix of connection coefficients.

    ``pair`` names the solution bases being related: the strings
    "ZeroOne" / "ZeroInf" for the two concrete problems, or the tuple
    (l1, l2, l3) of abstract exponents for the generic one.
    ``entries[i, j]`` is the coefficient of the j-th target-basis
    element in the i-th source-basis element.
    """

    m: int
    pair: object
    entries: np.ndarray = field(repr=False)
    variant: FormulaVariant = FormulaVariant.RACAH_UNIFORM

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        if arr.shape != (self.m + 1, self.m + 1):
            raise ValueError(
                f"entries shape {arr.shape} does not match m={self.m}"
            )
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise ValueError(
                f"non-finite connection entry at {tuple(int(b) for b in bad)}"
            )
        object.__setattr__(self, "entries", arr)


def _guarded_sin(x, i: int, j: int):
    """sin(pi*x) destined for a denominator; raises on a near-zero."""
    v = sin_pi(x)
    if abs(v) < BRACKET_TOL:
        raise DegenerateBracketError(i, j, f"s({x!r})", complex(v))
    return v


# ---------------------------------------------------------------------------
# the five entry formulas
#
# Arguments: matrix size m, entry indices (i, j), exponents l1, l2, l3
# of the three finite singular intervals, deformation g.  Shorthands
# inside: h = g/2, l23 = l2+l3, l123 = l1+l2+l3, ep(mu, x) = e(mu)*q^x.
# Numerator and denominator counts of 2i-normalized sine brackets are
# equal in every formula, so each entry is written directly in s(.).


def _entry_sum_a(m, i, j, l1, l2, l3, g):
    l23 = l2 + l3
    l123 = l1 + l23
    h = g * 0.5
    total = 0.0 + 0.0j
    # splittings k + l = j with 0 <= k <= m-i and 0 <= l <= i
    for k in range(max(0, j - i), min(j, m - i) + 1):
        l = j - k
        term = complex((-1.0) ** k)
        for r in range(1, m - i - k + 1):
            term *= sin_pi(l1 + (i + r - 1) * h) \
                / _guarded_sin(l23 + k * g + (i + r - 1) * h, i, j)
        for r in range(1, k + 1):
            term *= sin_pi(l2 + (i + r - 1) * h) \
                / _guarded_sin(l23 + k * g + (i - r - 1) * h, i, j)
        for r in range(1, i - l + 1):
            term *= sin_pi(l123 + (m + i + k - r - 1) * h) \
                * sin_pi((m - i - k + r) * h) \
                / (_guarded_sin(l23 + j * g + (r - 1) * h, i, j)
                   * _guarded_sin(r * h, i, j))
        for r in range(1, l + 1):
            term *= sin_pi(l3 + (k + r - 1) * h) * sin_pi((k + r) * h) \
                / (_guarded_sin(l23 + j * g - (r + 1) * h, i, j)
                   * _guarded_sin(r * h, i, j))
        total += term
    return (-1.0) ** i * total


def _entry_sum_b(m, i, j, l1, l2, l3, g):
    l23 = l2 + l3
    l123 = l1 + l23
    h = g * 0.5
    total = 0.0 + 0.0j
    # splittings k + l = j with 0 <= k <= i and 0 <= l <= m-i
    for k in range(max(0, j - (m - i)), min(j, i) + 1):
        l = j - k
        term = complex((-1.0) ** l)
        for r in range(1, i - k + 1):
            term *= sin_pi(l123 + (m + i - r - 1) * h) \
                / _guarded_sin(l23 + k * g + (m - i + r - 1) * h, i, j)
        for r in range(1, k + 1):
            term *= sin_pi(l3 + (m - i + r - 1) * h) \
                / _guarded_sin(l23 + k * g + (m - i - r - 1) * h, i, j)
        for r in range(1, m - i - l + 1):
            term *= sin_pi(l1 + (i - k + r - 1) * h) \
                * sin_pi((i - k + r) * h) \
                / (_guarded_sin(l23 + j * g + (r - 1) * h, i, j)
                   * _guarded_sin(r * h, i, j))
        for r in range(1, l + 1):
            term *= sin_pi(l2 + (k + r - 1) * h) * sin_pi((k + r) * h) \
                / (_guarded_sin(l23 + j * g - (r + 1) * h, i, j)
                   * _guarded_sin(r * h, i, j))
        total += term
    return (-1.0) ** i * total


def _series(nums, dens, g, argument, n_terms):
    spec = TerminatingSeriesSpec(
        numerator_params=nums,
        denominator_params=dens,
        q=e_half(g),
        argument=argument,
        termination_index=n_terms,
    )
    return phi(spec)


def _entry_well_poised_low(m, i, j, l1, l2, l3, g, argument=None):
    """Very-well-poised form on i + j <= m.

    ``argument`` exists only so a test can demonstrate that the
    alternative reading of the series argument fails; production calls
    leave it None.
    """
    l12, l23 = l1 + l2, l2 + l3
    l123 = l1 + l23
    h = g * 0.5

    def ep(mu, x):
        return e_half(mu + g * x)

    pref = complex((-1.0) ** (i + j))
    for r in range(1, m - i - j + 1):
        pref *= sin_pi(l1 + (i + r - 1) * h) \
            / _guarded_sin(l23 + j * g + (i + r - 1) * h, i, j)
    for r in range(1, j + 1):
        pref *= sin_pi(l2 + (i + r - 1) * h) \
            / _guarded_sin(l23 + (i + j + r - 2) * h, i, j)
    for r in range(1, i + 1):
        pref *= sin_pi(l123 + (m + j + r - 2) * h) \
            * sin_pi((m - i - j + r) * h) \
            / (_guarded_sin(l23 + j * g + (r - 1) * h, i, j)
               * _guarded_sin(r * h, i, j))
    head = ep(-l23, 1.5 - 0.5 * i - j)
    nums = (head, -head,
            ep(2 * l1, m - j), ep(-2 * l23, 1 - m - j),
            ep(-2 * l23, 1 - i - 2 * j), ep(0, -i),
            ep(-2 * l3, 1 - j), ep(0, -j))
    tail = ep(-l23, 0.5 - 0.5 * i - j)
    dens = (tail, -tail,
            ep(-2 * l2, 1 - i - j), ep(-2 * l23, 2 - i - j),
            ep(-2 * l123, 2 - m - i - j), ep(0, m - i - j + 1),
            ep(-2 * l23, 2 - 2 * j))
    if argument is None:
        argument = ep(-2 * l12, 2 - i)
    return pref * _series(nums, dens, g, argument, min(i, j))


def _entry_well_poised_high(m, i, j, l1, l2, l3, g):
    """Very-well-poised form on i + j >= m."""
    l12, l23 = l1 + l2, l2 + l3
    l123 = l1 + l23
    h = g * 0.5

    def ep(mu, x):
        return e_half(mu + g * x)

    pref = complex((-1.0) ** m)
    for r in range(1, m - i + 1):
        pref *= sin_pi(l2 + (i + r - 1) * h) \
            / _guarded_sin(l23 + (m + r - 2) * h, i, j)
    for r in range(1, m - j + 1):
        pref *= sin_pi(l123 + (m + j + r - 2) * h) \
            / _guarded_sin(l23 + j * g + (r - 1) * h, i, j)
    for r in range(1, i + j - m + 1):
        pref *= sin_pi(l3 + (m - i + r - 1) * h) \
            * sin_pi((m - i + r) * h) \
            / (_guarded_sin(l23 + (m - i + j + r - 2) * h, i, j)
               * _guarded_sin(r * h, i, j))
    head = ep(-l23, 0.5 * (i + 3) - m)
    nums = (head, -head,
            ep(-2 * l23, 1 + i - 2 * m), ep(-2 * l23, 1 - m - j),
            ep(2 * l1, i), ep(-2 * l3, 1 + i - m),
            ep(0, j - m), ep(0, i - m))
    tail = ep(-l23, 0.5 * (i + 1) - m)
    dens = (tail, -tail,
            ep(-2 * l23, 2 - m), ep(-2 * l23, 2 - m + i - j),
            ep(-2 * l123, 2 - 2 * m), ep(-2 * l2, 1 - m),
            ep(0, 1 + i + j - m))
    argument = ep(-2 * l12, 2 - i)
    return pref * _series(nums, dens, g, argument, min(m - i, m - j))


def _entry_well_poised(m, i, j, l1, l2, l3, g):
    if i + j <= m:
        return _entry_well_poised_low(m, i, j, l1, l2, l3, g)
    return _entry_well_poised_high(m, i, j, l1, l2, l3, g)


def _entry_balanced_low(m, i, j, l1, l2, l3, g):
    """Balanced 4-phi-3 form on i + j <= m."""
    l12, l23 = l1 + l2, l2 + l3
    l123 = l1 + l23
    h = g * 0.5

    def ep(mu, x):
        return e_half(mu + g * x)

    pref = complex((-1.0) ** (i + j))
    for r in range(1, i + 1):
        pref *= sin_pi((m - i + r) * h) / _guarded_sin(r * h, i, j)
    pref *= sin_pi(l23 + (j - 0.5) * g)
    for r in range(1, i + 1):
        pref *= sin_pi(l123 + (m + j + r - 2) * h)
    for r in range(1, j + 1):
        pref *= sin_pi(l2 + (i + r - 1) * h)
    for r in range(1, m - i - j + 1):
        pref *= sin_pi(l1 + (i + r - 1) * h)
    for r in range(1, m + 2):
        pref /= _guarded_sin(l23 + (j + r - 2) * h, i, j)
    nums = (ep(0, -j), ep(0, -i),
            ep(-2 * l23, 1 - j - m), ep(-2 * l12, 1 - i - m))
    dens = (ep(0, -m), ep(-2 * l2, 1 - i - j),
            ep(-2 * l123, 2 - i - j - m))
    return pref * _series(nums, dens, g, e_half(g), min(i, j))


def _entry_balanced_high(m, i, j, l1, l2, l3, g):
    """Balanced 4-phi-3 form on i + j >= m."""
    l12, l23 = l1 + l2, l2 + l3
    l123 = l1 + l23
    h = g * 0.5

    def ep(mu, x):
        return e_half(mu + g * x)

    pref = complex((-1.0) ** m)
    for r in range(1, i + 1):
        pref *= sin_pi((m - i + r) * h) / _guarded_sin(r * h, i, j)
    pref *= sin_pi(l23 + (j - 0.5) * g)
    for r in range(1, m - j + 1):
        pref *= sin_pi(l123 + (m + j + r - 2) * h)
    for r in range(1, i + j - m + 1):
        pref *= sin_pi(l3 + (m - i + r - 1) * h)
    for r in range(1, m - i + 1):
        pref *= sin_pi(l2 + (i + r - 1) * h)
    for r in range(1, m + 2):
        pref /= _guarded_sin(l23 + (j + r - 2) * h, i, j)
    nums = (ep(-2 * l12, 1 - i - m), ep(-2 * l23, 1 - j - m),
            ep(0, j - m), ep(0, i - m))
    dens = (ep(-2 * l123, 2 - 2 * m), ep(-2 * l2, 1 - m), ep(0, -m))
    return pref * _series(nums, dens, g, e_half(g), min(m - i, m - j))


def _entry_balanced(m, i, j, l1, l2, l3, g):
    if i + j <= m:
        return _entry_balanced_low(m, i, j, l1, l2, l3, g)
    return _entry_balanced_high(m, i, j, l1, l2, l3, g)


def _entry_racah_uniform(m, i, j, l1, l2, l3, g):
    """Regime-free form: sine prefactor times a q-Racah evaluation.

    The l1-dependent sine factors of the raw formula overlap between
    numerator and denominator; they are multiplied here in cancelled
    form (net product over the index range that survives), which is the
    same analytic function and avoids manufactured 0/0 at special
    charts.
    """
    l12, l23 = l1 + l2, l2 + l3
    l123 = l1 + l23
    h = g * 0.5

    def ep(mu, x):
        return e_half(mu + g * x)

    pref = complex((-1.0) ** (i + j))
    for r in range(1, i + 1):
        pref *= sin_pi((m - i + r) * h) / _guarded_sin(r * h, i, j)
    pref *= sin_pi(l23 + (j - 0.5) * g)
    for r in range(1, i + 1):
        pref *= sin_pi(l123 + (m + r - 2) * h)
    for r in range(1, j + 1):
        pref *= sin_pi(l2 + (r - 1) * h)
    for r in range(1, m + 2):
        pref /= _guarded_sin(l23 + (j + r - 2) * h, i, j)
    # net l1 ratio: prod_{k=0}^{m-1} / (prod_{k=0}^{i-1} * prod_{k=m-j}^{m-1})
    for k in range(i, m - j):
        pref *= sin_pi(l1 + k * h)
    for k in range(m - j, i):
        pref /= _guarded_sin(l1 + k * h, i, j)
    nums = (ep(0, -i), ep(2 * l12, i - 1), ep(0, -j), ep(2 * l23, j - 1))
    dens = (ep(2 * l2, 0), ep(0, -m), ep(2 * l123, m - 1))
    return pref * _series(nums, dens, g, e_half(g), min(i, j))


def _entry_racah_qpoch(m, i, j, l1, l2, l3, g):
    """The same regime-free entry written with q-shifted factorials.

    Used only as a cross-check in tests: identical q-Racah series part,
    but the prefactor is a ratio of q-Pochhammer symbols times an
    explicit phase instead of a sine product.
    """
    l12, l23 = l1 + l2, l2 + l3
    l123 = l1 + l23
    q = e_half(g)

    def ep(mu, x=0.0):
        return e_half(mu + g * x)

    head = (1.0 - ep(2 * l23, 2 * j - 1)) / (1.0 - ep(2 * l23, j - 1))
    head *= qpoch(ep(2 * l123, m - 1), q, i) / qpoch(ep(2 * l1), q, i)
    head *= qpoch(ep(2 * l1), q, m) / qpoch(ep(2 * l23, j), q, m)
    head *= qpoch(ep(2 * l2), q, j) / qpoch(ep(-2 * l1, 1 - m), q, j)
    head *= qpoch(ep(0, -m), q, i) / qpoch(q, q, i)
    head *= e_half((-m - j) * l1 + (m - i - j) * l2 + (m - i) * l3)
    head *= ep(0, i)
    nums = (ep(0, -i), ep(2 * l12, i - 1), ep(0, -j), ep(2 * l23, j - 1))
    dens = (ep(2 * l2), ep(0, -m), ep(2 * l123, m - 1))
    return head * _series(nums, dens, g, q, min(i, j))


_ENTRY_FUNCS = {
    FormulaVariant.SUM_A: _entry_sum_a,
    FormulaVariant.SUM_B: _entry_sum_b,
    FormulaVariant.WELL_POISED_87: _entry_well_poised,
    FormulaVariant.BALANCED_43: _entry_balanced,
    FormulaVariant.RACAH_UNIFORM: _entry_racah_uniform,
}


# ---------------------------------------------------------------------------
# step-by-step and expansion paths (used only by tests)
#
# The same matrices can be built without any closed form, by moving the
# integration variables one interval at a time.  Each move trades a
# variable in the third/second interval for one in the first/second slot
# of the target occupancy, at the cost of a ratio of sine brackets.
# Comparing these paths against the closed forms checks the whole
# derivation chain, not just the final displays.


def _rbr(lam, x, n, g):
    """Sine bracket s(lam + x*g + (n-1)*g/2) * s(n*g/2).

    This is <e(lam) q^x>_n up to a factor 2i/s(g/2) that cancels in
    every ratio formed below.
    """
    return sin_pi(lam + x * g + (n - 1) * g * 0.5) * sin_pi(n * g * 0.5)


def _entries_by_steps(m, l1, l2, l3, g):
    """Connection entries via repeated single-variable moves."""
    l23 = l2 + l3
    l123 = l1 + l23
    memo = {}

    def expand(i1, j1, i2, j2):
        # occupancy (i1, j1, i2, j2): i1 variables before the first
        # singular point, j1 between first and second, i2 between second
        # and third, j2 after the third.
        key = (i1, j1, i2, j2)
        if key in memo:
            return memo[key]
        if j1 == 0 and j2 == 0:
            memo[key] = {(i1, i2): 1.0 + 0.0j}
            return memo[key]
        if j2 >= 1:
            den = _rbr(l23, i2 + j1 / 2.0, j2, g)
            ca = _rbr(l1, j1 / 2.0, i1 + 1, g) / den
            cb = -_rbr(l2, j1 / 2.0, i2 + 1, g) / den
            parts = ((ca, expand(i1 + 1, j1, i2, j2 - 1)),
                     (cb, expand(i1, j1, i2 + 1, j2 - 1)))
        else:
            den = _rbr(l23, i2 + j2 / 2.0, j1, g)
            ca = -_rbr(l123, i2 + j1 + j2 / 2.0 - 1, i1 + 1, g) / den
            cb = -_rbr(l3, j2 / 2.0, i2 + 1, g) / den
            parts = ((ca, expand(i1 + 1, j1 - 1, i2, j2)),
                     (cb, expand(i1, j1 - 1, i2 + 1, j2)))
        out = {}
        for coeff, sub in parts:
            for target, value in sub.items():
                out[target] = out.get(target, 0.0 + 0.0j) + coeff * value
        memo[key] = out
        return out

    entries = np.zeros((m + 1, m + 1), dtype=complex)
    for i in range(m + 1):
        for (i1, i2), value in expand(0, i, 0, m - i).items():
            entries[i, i2] = value
    return entries


def _entries_by_expansion(m, l1, l2, l3, g):
    """Connection entries via the two closed-form one-shot expansions:
    first clear the last interval, then the second interval."""
    l23 = l2 + l3
    l123 = l1 + l23
    entries = np.zeros((m + 1, m + 1), dtype=complex)
    for i in range(m + 1):
        j1, j2 = i, m - i
        for k in range(j2 + 1):
            coeff = complex((-1.0) ** k)
            for r in range(1, j2 - k + 1):
                coeff *= _rbr(l1, j1 / 2.0, r, g) \
                    / _rbr(l23, j1 / 2.0 + k, r, g)
            for r in range(1, k + 1):
                coeff *= _rbr(l2, j1 / 2.0, r, g) \
                    / _rbr(l23, j1 / 2.0 + k - r, r, g)
            i1p, i2p = j2 - k, k
            for kp in range(j1 + 1):
                c2 = complex((-1.0) ** j1)
                for r in range(1, j1 - kp + 1):
                    c2 *= _rbr(l123, i2p + j1 - r, i1p + r, g) \
                        / _rbr(l23, i2p + kp, r, g)
                for r in range(1, kp + 1):
                    c2 *= _rbr(l3, 0.0, i2p + r, g) \
                        / _rbr(l23, i2p + kp - r, r, g)
                entries[i, i2p + kp] += coeff * c2
    return entries


# ---------------------------------------------------------------------------
# public constructors


def _build(m, l1, l2, l3, g, variant, pair):
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"connection matrices need integer m >= 1, got {m!r}")
    variant = FormulaVariant(variant)
    func = _ENTRY_FUNCS[variant]
    entries = np.empty((m + 1, m + 1), dtype=complex)
    for i in range(m + 1):
        for j in range(m + 1):
            try:
                entries[i, j] = func(m, i, j, l1, l2, l3, g)
            except DegenerateSeriesError as exc:
                raise DegenerateBracketError(
                    i, j,
                    f"series {exc.which} parameter #{exc.j} at term {exc.k}",
                    exc.value,
                ) from exc
    return ConnectionMatrix(m=m, pair=pair, entries=entries, variant=variant)


def connect_generic(m, l1, l2, l3, g,
                    variant=FormulaVariant.RACAH_UNIFORM) -> ConnectionMatrix:
    """Connection matrix for abstract interval exponents (l1, l2, l3).

    Relates the basis built from occupancies (0, i, 0, m-i) to the basis
    built from occupancies (m-j, 0, j, 0): row i of the result holds the
    coefficients of the expansion of source element i over the target
    basis.
    """
    return _build(m, l1, l2, l3, g, variant, (l1, l2, l3))


def connect_01(m, a, b, c, g,
               variant=FormulaVariant.RACAH_UNIFORM) -> ConnectionMatrix:
    """Connection matrix between the solution bases at 0 and at 1.

    The weight exponents (a, b, c) enter the generic problem as
    l1 = a, l2 = c, l3 = b: reading the real line left to right, the
    singular points carry exponents a, c, b.
    """
    out = _build(m, a, c, b, g, FormulaVariant(variant), "ZeroOne")
    return out


def connect_0inf(m, a, b, c, g,
                 variant=FormulaVariant.RACAH_UNIFORM) -> ConnectionMatrix:
    """Connection matrix between the solution bases at 0 and at infinity.

    Equals :func:`connect_01` with a and c exchanged (the change of
    variable swapping the roles of the two outer singular points), i.e.
    the generic problem with l1 = c, l2 = a, l3 = b.
    """
    out = _build(m, c, a, b, g, FormulaVariant(variant), "ZeroInf")
    return out


# ---------------------------------------------------------------------------
# verification helpers


def inverse_identity_residual(m, a, b, c, g,
                              variant=FormulaVariant.RACAH_UNIFORM) -> float:
    """max |P(a,b,c) . P(b,a,c) - Id| for the (0,1) connection matrix.

    Exchanging a and b swaps the roles of the two bases, so the two
    matrices must be mutually inverse; the residual measures how far the
    evaluated product is from the identity.
    """
    forward = connect_01(m, a, b, c, g, variant).entries
    backward = connect_01(m, b, a, c, g, variant).entries
    resid = forward @ backward - np.eye(m + 1)
    return float(np.max(np.abs(resid)))


def dtype_chart(rho: int) -> ExponentChart:
    """The half-integer-exponent chart m = 2*rho, a = b = c =
    -rho/(2rho+1), g = 1/(2rho+1).

    All characteristic exponent differences at 0 and 1 are integers on
    this family (resonance), yet every connection denominator stays
    nonzero, so the closed forms specialize cleanly.
    """
    if not isinstance(rho, int) or rho < 1:
        raise ValueError(f"dtype_chart needs integer rho >= 1, got {rho!r}")
    den = 2 * rho + 1
    return ExponentChart(m=2 * rho, a=-rho / den, b=-rho / den,
                         c=-rho / den, g=1.0 / den)


def dtype_symmetry_residual(rho: int,
                            variant=FormulaVariant.RACAH_UNIFORM):
    """Residuals of the two sign symmetries of the half-integer chart.

    Returns (r1, r2) with
        r1 = max |p_ij - (-1)^i p_{i, m-j}|,
        r2 = max |p_ij - (-1)^j p_{m-i, j}|.
    """
    chart = dtype_chart(rho)
    m = chart.m
    p = connect_01(m, chart.a, chart.b, chart.c, chart.g, variant).entries
    r1 = 0.0
    r2 = 0.0
    for i in range(m + 1):
        for j in range(m + 1):
            r1 = max(r1, abs(p[i, j] - (-1.0) ** i * p[i, m - j]))
            r2 = max(r2, abs(p[i, j] - (-1.0) ** j * p[m - i, j]))
    return r1, r2


def _appendix_braces(rho: int, j: int) -> float:
    """The bracketed correction factor shared by rows 2 and m-2."""
    D = 2 * (2 * rho + 1)
    t2 = (sin_pi(2 / D) * sin_pi(3 / D) * sin_pi(j / D) * sin_pi((j + 1) / D)) \
        / (sin_pi(1 / D) ** 2
           * sin_pi(rho / (2 * rho + 1)) * sin_pi((rho + 1) / (2 * rho + 1)))
    t3 = (sin_pi(3 / D) * sin_pi(4 / D) * sin_pi((j - 1) / D) * sin_pi(j / D)
          * sin_pi((j + 1) / D) * sin_pi((j + 2) / D)) \
        / (sin_pi(1 / (2 * rho + 1)) * sin_pi(rho / (2 * rho + 1)) ** 2
           * sin_pi(1 / D) * sin_pi((2 * rho - 1) / D) ** 2)
    return 1.0 - t2 + t3


def appendix_row(rho: int, i: int):
    """Closed-form row i of the half-integer-chart matrix.

    Supported rows: i in {0, 1, 2, m-2, m-1, m} with m = 2*rho.  Rows 1
    and m-1 use the form s((2j+1)/(2rho+1)) in the numerator; the naive
    halved-argument variant fails against direct evaluation already at
    rho = 1 and is not offered.
    """
    chart = dtype_chart(rho)
    m = chart.m
    if not 0 <= i <= m:
        raise ValueError(f"row index {i} outside 0..{m}")
    D = 2 * (2 * rho + 1)
    js = range(m + 1)
    if i == 0:
        return [(-1.0) ** j * sin_pi((2 * j + 1) / D) for j in js]
    if i == m:
        return [sin_pi((2 * j + 1) / D) for j in js]
    if i == 1:
        scale = sin_pi(1 / D) / sin_pi(1 / (2 * rho + 1))
        return [(-1.0) ** (j + 1) * scale * sin_pi((2 * j + 1) / (2 * rho + 1))
                for j in js]
    if i == m - 1:
        scale = sin_pi(1 / D) / sin_pi(1 / (2 * rho + 1))
        return [-scale * sin_pi((2 * j + 1) / (2 * rho + 1)) for j in js]
    if i == 2:
        return [(-1.0) ** j * sin_pi((2 * j + 1) / D) * _appendix_braces(rho, j)
                for j in js]
    if i == m - 2:
        return [sin_pi((2 * j + 1) / D) * _appendix_braces(rho, j)
                for j in js]
    raise ValueError(
        f"no closed form for row {i}; supported rows are 0, 1, 2, "
        f"{m - 2}, {m - 1}, {m}"
    )


def appendix_col(rho: int, j: int):
    """Closed-form column j of the half-integer-chart matrix.

    Supported columns: j in {0, 1, m-1, m} with m = 2*rho.
    """
    chart = dtype_chart(rho)
    m = chart.m
    if not 0 <= j <= m:
        raise ValueError(f"column index {j} outside 0..{m}")
    D = 2 * (2 * rho + 1)
    iis = range(m + 1)
    if j == 0:
        return [(-1.0) ** i * sin_pi(1 / D) for i in iis]
    if j == m:
        return [sin_pi(1 / D) for i in iis]
    if j == 1:
        scale = sin_pi(3 / D) / cos_pi(1 / D)
        return [(-1.0) ** (i + 1) * scale * cos_pi((2 * i + 1) / D)
                for i in iis]
    if j == m - 1:
        scale = sin_pi(3 / D) / cos_pi(1 / D)
        return [-scale * cos_pi((2 * i + 1) / D) for i in iis]
    raise ValueError(
        f"no closed form for column {j}; supported columns are 0, 1, "
        f"{m - 1}, {m}"
    )
