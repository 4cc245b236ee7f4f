"""Terminating basic hypergeometric series and q-Racah polynomials.

Everything here terminates: the deformation parameter q sits on the unit
circle, where non-terminating basic series are ill-defined, so a series
is only evaluated once a numerator parameter of the form q^(-n) certifies
termination.  The Gauss 2F1 (an ordinary, convergent series) is included
as the closed-form reference for the one-variable integrals.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

__all__ = [
    "TerminatingSeriesSpec",
    "QRacahSpec",
    "NonTerminatingSeriesError",
    "DegenerateSeriesError",
    "qpoch",
    "phi",
    "phi_terms",
    "gauss_2f1",
    "qracah_w",
    "qracah_weight",
    "qracah_norm",
    "watson_check",
    "sears_check",
]

# |1 - b*q^k| below this counts as a vanishing denominator factor.
FACTOR_TOL = 1e-12

# how closely a numerator parameter must match q^(-n) to certify termination
TERMINATION_TOL = 1e-10

# switch to compensated summation above this many terms
_KAHAN_CUTOFF = 16


class NonTerminatingSeriesError(ValueError):
    """No numerator parameter certifies termination at the declared index."""


class DegenerateSeriesError(ArithmeticError):
    """A denominator q-shifted factorial factor vanished."""

    def __init__(self, which: str, j: int, k: int, value: complex):
        self.which = which
        self.j = j
        self.k = k
        self.value = value
        super().__init__(
            f"vanishing {which} factor: parameter #{j}, term k={k}, "
            f"1 - b*q^k = {value!r}"
        )


def qpoch(a, q, n: int) -> complex:
    """q-shifted factorial (a;q)_n = prod_{i<n} (1 - a q^i)."""
    if n < 0:
        raise ValueError(f"qpoch needs n >= 0, got {n}")
    a = complex(a)
    q = complex(q)
    out = 1.0 + 0.0j
    power = 1.0 + 0.0j
    for _ in range(n):
        out *= 1.0 - a * power
        power *= q
    return out


@dataclass(frozen=True)
class TerminatingSeriesSpec:
    """A terminating r+1-phi-r evaluation request.

    The declared termination_index n must be certified by a numerator
    parameter equal to q^(-n) (within TERMINATION_TOL); evaluation is
    then the finite sum of exactly n+1 terms.
    """

    numerator_params: tuple
    denominator_params: tuple
    q: complex
    argument: complex
    termination_index: int

    def __post_init__(self):
        object.__setattr__(self, "numerator_params",
                           tuple(complex(p) for p in self.numerator_params))
        object.__setattr__(self, "denominator_params",
                           tuple(complex(p) for p in self.denominator_params))
        if self.termination_index < 0:
            raise ValueError("termination_index must be >= 0")

    @property
    def term_count(self) -> int:
        return self.termination_index + 1


def _check_terminates(spec: TerminatingSeriesSpec) -> None:
    target = complex(spec.q) ** (-spec.termination_index)
    for p in spec.numerator_params:
        if abs(p - target) <= TERMINATION_TOL * max(1.0, abs(target)):
            return
    raise NonTerminatingSeriesError(
        f"no numerator parameter equals q^(-{spec.termination_index}) "
        f"~ {target!r}; refusing a non-terminating series at |q| = "
        f"{abs(spec.q):.3f}"
    )


def phi_terms(spec: TerminatingSeriesSpec) -> list:
    """The n+1 terms of the series, in declared (ascending k) order.

    Term k is  prod_i (a_i;q)_k / (prod_j (b_j;q)_k * (q;q)_k) * z^k,
    built by the one-step recurrence so each factor is formed once.
    """
    _check_terminates(spec)
    q = complex(spec.q)
    z = complex(spec.argument)
    n = spec.termination_index
    terms = [1.0 + 0.0j]
    term = 1.0 + 0.0j
    qk = 1.0 + 0.0j  # q^k
    for k in range(n):
        for p in spec.numerator_params:
            term *= 1.0 - p * qk
        for j, p in enumerate(spec.denominator_params):
            factor = 1.0 - p * qk
            if abs(factor) < FACTOR_TOL:
                raise DegenerateSeriesError("denominator", j, k + 1, factor)
            term /= factor
        factor = 1.0 - q * qk  # the (q;q)_k factor
        if abs(factor) < FACTOR_TOL:
            raise DegenerateSeriesError("factorial", -1, k + 1, factor)
        term /= factor
        term *= z
        terms.append(term)
        qk *= q
    return terms


def phi(spec: TerminatingSeriesSpec) -> complex:
    """Evaluate the terminating basic hypergeometric sum.

    Terms are accumulated in declared order; sums longer than 16 terms
    use Kahan compensation so residual checks are reproducible.
    """
    terms = phi_terms(spec)
    if len(terms) <= _KAHAN_CUTOFF:
        total = 0.0 + 0.0j
        for t in terms:
            total += t
        return total
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    for t in terms:
        y = t - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return total


# ---------------------------------------------------------------------------
# Gauss 2F1


def gauss_2f1(a, b, c, z) -> complex:
    """Gauss hypergeometric sum 2F1(a, b; c; z).

    Strategy: direct power series for |z| <= 0.5; the Euler
    transformation (1-z)^(c-a-b) 2F1(c-a, c-b; c; z) for 0.5 < |z| < 1;
    the Pfaff transformation (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)) when
    Re z < 0, which also covers arguments on and beyond the unit circle
    left of the imaginary axis.  Everything else is rejected.

    Raises
    ------
    ValueError
        If c sits at a non-positive integer, or z cannot be brought
        inside the convergence disk by the implemented transformations.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if abs(c - round(c.real)) < 1e-12 and round(c.real) <= 0:
        raise ValueError(f"gauss_2f1: c={c!r} is a non-positive integer")
    if z == 0:
        return 1.0 + 0.0j
    if z.real < 0.0:
        w = z / (z - 1.0)
        return (1.0 - z) ** (-a) * _f21_series(a, c - b, c, w)
    if abs(z) <= 0.5:
        return _f21_series(a, b, c, z)
    if abs(z) < 0.999:
        # Euler transformation keeps the argument but often shrinks the
        # effective parameters; adequate inside the disk
        return (1.0 - z) ** (c - a - b) * _f21_series(c - a, c - b, c, z)
    raise ValueError(
        f"gauss_2f1: |z| = {abs(z):.4f} with Re z >= 0 is outside the "
        "series domain (Euler and Pfaff transformations both fail)"
    )


def _f21_series(a, b, c, z, max_terms: int = 200000) -> complex:
    # plain power series with term-ratio stopping at relative 1e-15
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (1.0 + k)) * z
        total += term
        if abs(term) <= 1e-15 * max(1.0, abs(total)):
            # one more term to be safe against accidental small terms
            term2 = term * (a + k + 1) * (b + k + 1) \
                / ((c + k + 1) * (2.0 + k)) * z
            if abs(term2) <= 1e-15 * max(1.0, abs(total)):
                return total + term2
            total += term2
            term = term2
    raise ValueError("gauss_2f1 series failed to converge "
                     f"(|z|={abs(z):.4f}, {max_terms} terms)")


# ---------------------------------------------------------------------------
# q-Racah


@dataclass(frozen=True)
class QRacahSpec:
    """Parameter pack (a, b, c, N; q) for the q-Racah family W_n(x)."""

    a: complex
    b: complex
    c: complex
    N: int
    q: complex

    def __post_init__(self):
        if self.N < 0:
            raise ValueError(f"QRacahSpec needs N >= 0, got {self.N}")

    def mu(self, x: int) -> complex:
        """mu(x) = q^(-x) + c q^(x-N), the variable W_n is polynomial in."""
        q = complex(self.q)
        return q ** (-x) + complex(self.c) * q ** (x - self.N)


def _range_check(label: str, value: int, N: int) -> None:
    if not 0 <= value <= N:
        raise ValueError(f"qracah: need 0 <= {label} <= N={N}, got {value}")


def qracah_w(n: int, x: int, spec: QRacahSpec) -> complex:
    """W_n(x; a, b, c, N; q), the terminating 4-phi-3 evaluation."""
    _range_check("n", n, spec.N)
    _range_check("x", x, spec.N)
    a, b, c, N, q = spec.a, spec.b, spec.c, spec.N, complex(spec.q)
    series = TerminatingSeriesSpec(
        numerator_params=(q ** (-n), a * b * q ** (n + 1),
                          q ** (-x), c * q ** (x - N)),
        denominator_params=(a * q, q ** (-N), b * c * q),
        q=q,
        argument=q,
        termination_index=min(n, x),
    )
    return phi(series)


def qracah_weight(x: int, spec: QRacahSpec) -> complex:
    """Orthogonality weight rho(x) of the q-Racah family."""
    _range_check("x", x, spec.N)
    a, b, c, N, q = spec.a, spec.b, spec.c, spec.N, complex(spec.q)
    head_den = 1.0 - c * q ** (-N)
    if abs(head_den) < FACTOR_TOL:
        raise DegenerateSeriesError("weight head", -1, 0, head_den)
    out = (1.0 - c * q ** (2 * x - N)) / head_den
    for p in (c * q ** (-N), q ** (-N), a * q, b * c * q):
        out *= qpoch(p, q, x)
    for j, p in enumerate((c / a * q ** (-N), q ** (-N) / b, q, c * q)):
        d = qpoch(p, q, x)
        if abs(d) < FACTOR_TOL:
            raise DegenerateSeriesError("weight denominator", j, x, d)
        out /= d
    return out * (a * b * q) ** (-x)


def qracah_norm(n: int, spec: QRacahSpec) -> complex:
    """Normalization h_n: sum_x rho(x) W_m(x) W_n(x) = delta_{mn} / h_n."""
    _range_check("n", n, spec.N)
    a, b, c, N, q = spec.a, spec.b, spec.c, spec.N, complex(spec.q)
    num = qpoch(b * q, q, N) * qpoch(a * q / c, q, N)
    den = qpoch(a * b * q * q, q, N) * qpoch(1.0 / c, q, N)
    if abs(den) < FACTOR_TOL:
        raise DegenerateSeriesError("norm denominator", -1, N, den)
    out = num / den
    head_den = 1.0 - a * b * q
    if abs(head_den) < FACTOR_TOL:
        raise DegenerateSeriesError("norm head", -1, 0, head_den)
    out *= (1.0 - a * b * q ** (2 * n + 1)) / head_den
    for p in (a * q, a * b * q, b * c * q, q ** (-N)):
        out *= qpoch(p, q, n)
    for j, p in enumerate((q, b * q, a * q / c, a * b * q ** (N + 2))):
        d = qpoch(p, q, n)
        if abs(d) < FACTOR_TOL:
            raise DegenerateSeriesError("norm denominator", j, n, d)
        out /= d
    return out * (q ** N / c) ** n


# ---------------------------------------------------------------------------
# transformation identities as checkable relations


def watson_check(a, b, c, d, e, n: int, q) -> float:
    """Residual of Watson's transformation.

    Left side: the very-well-poised terminating 8-phi-7 with parameters
    built from (a, b, c, d, e, q^-n) at argument a^2 q^(n+2)/(bcde).
    Right side: (aq, aq/de; q)_n / (aq/d, aq/e; q)_n times the balanced
    4-phi-3 with parameters (aq/bc, d, e, q^-n; aq/b, aq/c, d e q^-n/a).
    Returns |LHS - RHS|.
    """
    a, b, c, d, e, q = (complex(v) for v in (a, b, c, d, e, q))
    if n < 0:
        raise ValueError("watson_check needs n >= 0")
    ra = cmath.sqrt(a)
    lhs_spec = TerminatingSeriesSpec(
        numerator_params=(a, q * ra, -q * ra, b, c, d, e, q ** (-n)),
        denominator_params=(ra, -ra, a * q / b, a * q / c,
                            a * q / d, a * q / e, a * q ** (n + 1)),
        q=q,
        argument=a * a * q ** (n + 2) / (b * c * d * e),
        termination_index=n,
    )
    rhs_spec = TerminatingSeriesSpec(
        numerator_params=(a * q / (b * c), d, e, q ** (-n)),
        denominator_params=(a * q / b, a * q / c, d * e * q ** (-n) / a),
        q=q,
        argument=q,
        termination_index=n,
    )
    den = qpoch(a * q / d, q, n) * qpoch(a * q / e, q, n)
    if abs(den) < FACTOR_TOL:
        raise DegenerateSeriesError("watson prefactor", -1, n, den)
    prefactor = qpoch(a * q, q, n) * qpoch(a * q / (d * e), q, n) / den
    return abs(phi(lhs_spec) - prefactor * phi(rhs_spec))


def sears_check(n: int, a1, a2, a3, b1, b2, b3, q) -> float:
    """Residual of Sears's transformation for a terminating balanced 4-phi-3.

    Requires q^(1-n) a1 a2 a3 = b1 b2 b3 (the balanced condition);
    returns |LHS - prefactor * RHS| where
    prefactor = (b2/a1, b3/a1; q)_n / (b2, b3; q)_n * a1^n.
    """
    a1, a2, a3, b1, b2, b3, q = (complex(v) for v in (a1, a2, a3, b1, b2, b3, q))
    if n < 0:
        raise ValueError("sears_check needs n >= 0")
    balance = q ** (1 - n) * a1 * a2 * a3
    target = b1 * b2 * b3
    if abs(balance - target) > 1e-8 * max(1.0, abs(target)):
        raise ValueError(
            f"sears_check: series is not balanced "
            f"(q^(1-n) a1 a2 a3 = {balance!r}, b1 b2 b3 = {target!r})"
        )
    lhs_spec = TerminatingSeriesSpec(
        numerator_params=(q ** (-n), a1, a2, a3),
        denominator_params=(b1, b2, b3),
        q=q,
        argument=q,
        termination_index=n,
    )
    rhs_spec = TerminatingSeriesSpec(
        numerator_params=(q ** (-n), a1, b1 / a2, b1 / a3),
        denominator_params=(b1, a1 * q ** (1 - n) / b2, a1 * q ** (1 - n) / b3),
        q=q,
        argument=q,
        termination_index=n,
    )
    den = qpoch(b2, q, n) * qpoch(b3, q, n)
    if abs(den) < FACTOR_TOL:
        raise DegenerateSeriesError("sears prefactor", -1, n, den)
    prefactor = qpoch(b2 / a1, q, n) * qpoch(b3 / a1, q, n) / den * a1 ** n
    return abs(phi(lhs_spec) - prefactor * phi(rhs_spec))
