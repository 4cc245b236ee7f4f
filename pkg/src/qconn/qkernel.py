"""Scalar kernels shared by every other module.

Conventions used throughout the package:

    e(A) = exp(pi*i*A)          half-period exponential
    s(A) = sin(pi*A)            half-period sine
    q    = e(g)                 unit-modulus deformation parameter
    [n]_q = 1 + q + ... + q^(n-1)
    <A>_n = A*[n]_q - A^(-1)*[n]_(1/q)

A *chart* packs the exponents (a, b, c, g) of the weight function

    prod_{i<j} (t_j - t_i)^g * prod_i t_i^a (1 - t_i)^b (t_i - z)^c

together with the number of integration variables m; the exponent at
infinity, lambda_inf = -a - b - c - (m-1)*g, is always derived, never
stored.  Everything downstream (series evaluation, connection matrices,
quadrature, Hermitian forms) reads parameters from these charts.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

__all__ = [
    "Singularity",
    "ExponentChart",
    "QContext",
    "CharExponents",
    "GenericityViolation",
    "ResonanceViolation",
    "GammaPoleError",
    "SineZeroError",
    "e_half",
    "sin_pi",
    "cos_pi",
    "q_bracket",
    "angle_bracket",
    "complex_gamma",
    "selberg",
    "intersection_Jm",
    "cycle_self_intersection",
    "char_exponents",
    "genericity_check",
    "resonance_check",
]

# Lanczos rational approximation (Godfrey's 15-term set, shift 607/128).
# Good to ~1e-15 relative on the half-plane Re z >= 0.5 in double precision.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEFFS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)

_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)

# Distance to a non-positive integer below which Gamma refuses to evaluate.
POLE_TOL = 1e-12

# Distance-to-integer below which an exponent chart counts as degenerate.
GENERICITY_TOL = 1e-9


class GammaPoleError(ArithmeticError):
    """Gamma evaluated too close to one of its poles (0, -1, -2, ...)."""

    def __init__(self, z: complex, pole: int, distance: float):
        self.z = z
        self.pole = pole
        self.distance = distance
        super().__init__(
            f"gamma pole: z={z!r} is within {distance:.3e} of the pole at {pole}"
        )


class SineZeroError(ArithmeticError):
    """A sine factor in a denominator vanished (to tolerance)."""

    def __init__(self, label: str, argument: complex, value: complex):
        self.label = label
        self.argument = argument
        self.value = value
        super().__init__(
            f"vanishing denominator sine {label}: s({argument!r}) = {value!r}"
        )


class Singularity(Enum):
    """The three regular singular points of the hypergeometric-type ODE."""

    ZERO = "Zero"
    ONE = "One"
    INFINITY = "Infinity"


def _coerce_singularity(s) -> Singularity:
    if isinstance(s, Singularity):
        return s
    key = str(s).strip().lower()
    for member in Singularity:
        if member.value.lower() == key:
            return member
    aliases = {"0": Singularity.ZERO, "1": Singularity.ONE,
               "inf": Singularity.INFINITY, "oo": Singularity.INFINITY}
    if key in aliases:
        return aliases[key]
    raise ValueError(f"unknown singularity {s!r}; expected Zero, One or Infinity")


# ---------------------------------------------------------------------------
# elementary conventions


def e_half(A) -> complex:
    """exp(pi*i*A), with the real part of A reduced mod 2 first.

    The reduction keeps e_half exactly periodic in double precision, so
    products like e_half(x)*e_half(-x) stay at 1 even for large |x|.
    """
    A = complex(A)
    xr = math.remainder(A.real, 2.0)
    mag = math.exp(-math.pi * A.imag)
    return complex(mag * math.cos(math.pi * xr), mag * math.sin(math.pi * xr))


def sin_pi(A):
    """sin(pi*A); real arguments are reduced mod 2 before scaling by pi.

    Without the reduction, sin(pi*x) loses accuracy near integer x: the
    connection formulas difference sines of nearby arguments, so those
    digits matter.
    """
    if isinstance(A, complex) and A.imag != 0.0:
        xr = math.remainder(A.real, 2.0)
        return cmath.sin(math.pi * complex(xr, A.imag))
    x = A.real if isinstance(A, complex) else float(A)
    r = math.remainder(x, 2.0)
    if r in (-1.0, 0.0, 1.0):
        return 0.0
    return math.sin(math.pi * r)


def cos_pi(A):
    """cos(pi*A), same argument-reduction policy as :func:`sin_pi`."""
    if isinstance(A, complex) and A.imag != 0.0:
        xr = math.remainder(A.real, 2.0)
        return cmath.cos(math.pi * complex(xr, A.imag))
    x = A.real if isinstance(A, complex) else float(A)
    r = math.remainder(x, 2.0)
    if r in (-0.5, 0.5):
        return 0.0
    return math.cos(math.pi * r)


def q_bracket(n: int, q) -> complex:
    """The q-integer [n]_q = 1 + q + ... + q^(n-1), as the literal sum.

    Summing (rather than dividing (1-q^n)/(1-q)) keeps q = 1 exact and
    avoids cancellation when q is a root of unity.
    """
    if n < 0:
        raise ValueError(f"q_bracket needs n >= 0, got {n}")
    q = complex(q)
    total = 0.0 + 0.0j
    power = 1.0 + 0.0j
    for _ in range(n):
        total += power
        power *= q
    return total


# ---------------------------------------------------------------------------
# charts and contexts


@dataclass(frozen=True)
class QContext:
    """Holds g and the derived unit-modulus parameter q = e(g)."""

    g: float

    @property
    def q(self) -> complex:
        return e_half(self.g)


def angle_bracket(A, n: int, ctx: QContext) -> complex:
    """<A>_n = A*[n]_q - A^(-1)*[n]_(1/q) with q taken from ctx.

    For A = e(lambda) this collapses to the sine product
    2i*s(lambda+(n-1)g/2)*s(ng/2)/s(g/2).
    """
    if n < 0:
        raise ValueError(f"angle_bracket needs n >= 0, got {n}")
    A = complex(A)
    if A == 0:
        raise ValueError("angle_bracket needs A != 0")
    q = ctx.q
    return A * q_bracket(n, q) - q_bracket(n, 1.0 / q) / A


@dataclass(frozen=True)
class ExponentChart:
    """Exponents (a, b, c, g) of the m-variable weight function.

    The exponent at infinity is derived:
    lambda_inf = -a - b - c - (m-1)*g.
    """

    m: int
    a: float
    b: float
    c: float
    g: float

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"chart needs m >= 1, got m={self.m}")

    @property
    def lambda_inf(self):
        return -self.a - self.b - self.c - (self.m - 1) * self.g

    @property
    def qctx(self) -> QContext:
        return QContext(self.g)


@dataclass(frozen=True)
class CharExponents:
    """Characteristic exponents e_0..e_m at one singular point."""

    singularity: Singularity
    values: tuple


class GenericityViolation(NamedTuple):
    """One integral quantity that should not have been an integer."""

    family: str
    index: int
    value: float
    nearest: int


class ResonanceViolation(NamedTuple):
    """A pair of characteristic exponents differing by an integer."""

    singularity: Singularity
    i: int
    j: int
    difference: float
    nearest: int


# ---------------------------------------------------------------------------
# Gamma and the closed-form integrals built on it


def complex_gamma(z) -> complex:
    """Gamma(z) for complex z via Lanczos, reflecting when Re z < 0.5.

    Raises
    ------
    GammaPoleError
        When z is within POLE_TOL of a non-positive integer.
    """
    z = complex(z)
    # pole guard: distance to the nearest non-positive integer
    nearest = round(z.real)
    if nearest <= 0:
        dist = abs(z - nearest)
        if dist < POLE_TOL:
            raise GammaPoleError(z, int(nearest), dist)
    if z.real < 0.5:
        # reflection: Gamma(z) = pi / (sin(pi z) * Gamma(1 - z))
        return math.pi / (sin_pi(z) * complex_gamma(1.0 - z))
    acc = _LANCZOS_COEFFS[0]
    for k in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[k] / (z - 1.0 + k)
    t = z + (_LANCZOS_G - 0.5)
    return _SQRT_TWO_PI * t ** (z - 0.5) * cmath.exp(-t) * acc


def selberg(m: int, alpha, beta, gamma):
    """Ordered-chamber Selberg integral, as a Gamma product.

        (1/m!) * prod_{j=1}^m  G(alpha+(j-1)gamma) G(beta+(j-1)gamma) G(1+j*gamma)
                               -----------------------------------------------
                               G(alpha+beta+(m+j-2)gamma) G(1+gamma)

    This equals the integral of prod t_i^(alpha-1) (1-t_i)^(beta-1)
    * prod_{i<j} (t_j-t_i)^(2*gamma) over 0 < t_1 < ... < t_m < 1.
    Returns a float when every input is real, complex otherwise.
    """
    if m < 0:
        raise ValueError(f"selberg needs m >= 0, got {m}")
    real_in = not any(isinstance(v, complex) and v.imag != 0.0
                      for v in (alpha, beta, gamma))
    prod = 1.0 + 0.0j
    for j in range(1, m + 1):
        # the alpha/beta pair is multiplied first so that evaluation is
        # exactly symmetric under alpha <-> beta
        prod *= complex_gamma(alpha + (j - 1) * gamma) \
            * complex_gamma(beta + (j - 1) * gamma)
        prod *= complex_gamma(1.0 + j * gamma)
        prod /= complex_gamma(alpha + beta + (m + j - 2) * gamma)
        prod /= complex_gamma(1.0 + gamma)
    prod /= math.factorial(m)
    return prod.real if real_in else prod


def intersection_Jm(m: int, alpha, beta, gamma) -> complex:
    """Self-intersection number of the symmetrized ordered cube cycle.

        m! * (i/2)^m * prod_{j=1}^m  s(alpha+beta+(m+j-2)gamma) s(gamma)
                                     -----------------------------------
                                     s(alpha+(j-1)gamma) s(beta+(j-1)gamma) s(j gamma)

    Raises SineZeroError if any denominator sine vanishes to 1e-12.
    """
    if m < 0:
        raise ValueError(f"intersection_Jm needs m >= 0, got {m}")
    prod = complex(math.factorial(m)) * (0.5j) ** m
    for j in range(1, m + 1):
        num = sin_pi(alpha + beta + (m + j - 2) * gamma) * sin_pi(gamma)
        for label, arg in (
            ("alpha", alpha + (j - 1) * gamma),
            ("beta", beta + (j - 1) * gamma),
            ("gamma", j * gamma),
        ):
            val = sin_pi(arg)
            if abs(val) < 1e-12:
                raise SineZeroError(f"{label} factor, j={j}", arg, val)
        den = sin_pi(alpha + (j - 1) * gamma) * sin_pi(beta + (j - 1) * gamma) \
            * sin_pi(j * gamma)
        prod *= num / den
    return prod


def cycle_self_intersection(m: int, k: int, chart: ExponentChart) -> complex:
    """Self-intersection of the k-th standard cycle: k variables loaded on
    (0, z), the remaining m-k on (1, oo).

    Equals C(m,k) * J_k(a, c, g/2) * J_{m-k}(b, lambda_inf, g/2).
    """
    if not 0 <= k <= m:
        raise ValueError(f"need 0 <= k <= m, got k={k}, m={m}")
    if m != chart.m:
        raise ValueError(f"m={m} disagrees with chart.m={chart.m}")
    half = chart.g / 2.0
    return (
        math.comb(m, k)
        * intersection_Jm(k, chart.a, chart.c, half)
        * intersection_Jm(m - k, chart.b, chart.lambda_inf, half)
    )


# ---------------------------------------------------------------------------
# exponents and genericity


def char_exponents(chart: ExponentChart, singularity) -> CharExponents:
    """Characteristic exponents e_0..e_m at one of the points 0, 1, oo."""
    sing = _coerce_singularity(singularity)
    m, a, b, c, g = chart.m, chart.a, chart.b, chart.c, chart.g
    if sing is Singularity.ZERO:
        vals = tuple((a + c + 1) * j + math.comb(j, 2) * g for j in range(m + 1))
    elif sing is Singularity.ONE:
        vals = tuple((b + c + 1) * j + math.comb(j, 2) * g for j in range(m + 1))
    else:
        vals = tuple(
            -(a + b + 1) * j - c * m - (math.comb(j, 2) + j * (m - j)) * g
            for j in range(m + 1)
        )
    return CharExponents(sing, vals)


def genericity_check(chart: ExponentChart, tol: float = GENERICITY_TOL):
    """List every quantity of the genericity condition that is integral.

    The condition: none of i*a + C(i,2)g, i*b + C(i,2)g, i*c + C(i,2)g,
    i*lambda_inf + C(i,2)g, C(i,2)g (1 <= i <= m) may be an integer.
    The pure-g family is identically zero at i = 1 and is skipped there
    (a vacuous constraint, not a degeneration).

    Returns an empty list iff the chart is generic at tolerance ``tol``.
    """
    families = (
        ("a", chart.a),
        ("b", chart.b),
        ("c", chart.c),
        ("lambda_inf", chart.lambda_inf),
    )
    violations = []
    for i in range(1, chart.m + 1):
        binom = math.comb(i, 2)
        for name, base in families:
            value = i * base + binom * chart.g
            nearest = round(value)
            if abs(value - nearest) < tol:
                violations.append(
                    GenericityViolation(name, i, float(value), int(nearest))
                )
        if i >= 2:
            value = binom * chart.g
            nearest = round(value)
            if abs(value - nearest) < tol:
                violations.append(
                    GenericityViolation("g", i, float(value), int(nearest))
                )
    return violations


def resonance_check(chart: ExponentChart, tol: float = GENERICITY_TOL):
    """List pairs of characteristic exponents differing by an integer.

    Integral exponent differences at 0 or 1 make monodromy eigenvalues
    collide; the half-integer-exponent family m = 2*rho,
    a = b = c = -rho/(2rho+1), g = 1/(2rho+1) is resonant in exactly this
    sense even though its exponents pass :func:`genericity_check` for
    small rho.  Empty list means no resonance at tolerance ``tol``.
    """
    violations = []
    for where in (Singularity.ZERO, Singularity.ONE, Singularity.INFINITY):
        vals = char_exponents(chart, where).values
        for i in range(chart.m + 1):
            for j in range(i + 1, chart.m + 1):
                diff = vals[j] - vals[i]
                nearest = round(diff.real if isinstance(diff, complex) else diff)
                if abs(diff - nearest) < tol:
                    violations.append(
                        ResonanceViolation(where, i, j, float(diff), int(nearest))
                    )
    return violations
