"""Quadrature for the ordered-chamber integrals and their identities.

The integrand is ``prod_{i<j} (t_j - t_i)^g * prod_i |t_i|^a |1-t_i|^b
|t_i - z|^c`` with every factor taken positive on the chamber (standard
loading).  A chamber is described by how many of the m ordered variables
sit in each of the four intervals cut out by the three finite singular
points in line order; basis families:

* ``I`` -- solutions around 0: j variables in the interval adjacent to 0
  on the z side, the rest in (1, oo);
* ``J`` -- solutions around 1 (defined for 0 < z < 1): m - j variables
  in (-oo, 0), j in (z, 1);
* ``K`` -- solutions around oo (defined for z < 0): m - j variables in
  (-oo, z), j in (0, 1).

Each reported value is m! times the one-chamber integral, which equals
the integral over the fully symmetrized chamber.

Numerics: each interval is mapped to a unit cube by nested
substitutions (affine for bounded intervals, reciprocal for unbounded
ones) so that every algebraic singularity lands on a cube face, then a
tanh-sinh product rule is applied per axis.  All distances are carried
as logarithms of positive quantities built from per-axis node data, so
no catastrophic cancellation occurs even for nodes double-exponentially
close to a face.  Grid sums use numpy's pairwise reduction over
deterministically sized chunks, so results do not depend on thread
count.

z-derivatives are taken under the integral sign:
``d/dz u = -c * sum_i (t_i - z)^(-1) * u``.  The cycles used for the
differential-equation checks keep every variable away from z, so the
differentiated integrand converges under the same margins as the
integrand itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from .qkernel import (
    ExponentChart,
    Singularity,
    char_exponents,
    complex_gamma,
    selberg,
)
from .qseries import gauss_2f1

__all__ = [
    "DEFAULT_MARGIN",
    "ConvergenceDomainError",
    "CycleDescriptor",
    "QuadratureConfig",
    "SolutionSample",
    "closed_form_m1",
    "connection_residual_numeric",
    "eval_basis",
    "leading_asymptotic",
    "ode_residual",
    "ode_residual_closed_form",
    "ode_system_equation_residuals",
    "ode_system_residual",
    "phi_pairing",
    "phi_pairing_dz",
    "reflection_residual",
    "sample_basis",
]

DEFAULT_MARGIN = 0.05

# exp() arguments above this are clipped; a convergent integrand never
# legitimately reaches it and the clip keeps a failure finite and visible
_LOG_CLIP = 700.0

# largest |y| used in the node transform u = 1/(1 + e^(-2y)); keeps
# exp(-2y) inside the normal double range
_Y_CAP = 340.0


class ConvergenceDomainError(ValueError):
    """Exponents outside the absolute-convergence region of a chamber.

    ``constraint`` spells out the violated inequality, ``value`` the
    offending number.
    """

    def __init__(self, constraint: str, value: float):
        super().__init__(f"non-convergent chamber: {constraint} "
                         f"(value {value:.6g})")
        self.constraint = constraint
        self.value = value


@dataclass(frozen=True)
class QuadratureConfig:
    """Tanh-sinh scheme parameters.

    levels: base refinement level; the node step per axis is 2**-levels.
    target_rel_tol: relative tolerance the refinement loop aims for.
    max_refinement: how many extra level doublings may be spent.
    convergence_margin: required distance of every exponent from its
    divergence boundary; chambers closer than this are rejected.
    """

    levels: int = 5
    target_rel_tol: float = 1.0e-9
    max_refinement: int = 3
    convergence_margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        if self.levels < 2:
            raise ValueError("levels must be at least 2")
        if self.target_rel_tol < 1.0e-12:
            raise ValueError("target_rel_tol must be at least 1e-12")
        if self.max_refinement < 1:
            raise ValueError("max_refinement must be at least 1")
        if self.convergence_margin <= 0.0:
            raise ValueError("convergence_margin must be positive")


_BASIS_TAGS = ("I", "J", "K", "Raw")


@dataclass(frozen=True)
class CycleDescriptor:
    """Occupancy counts of the four real intervals, low to high.

    ``occupancy = (i1, j1, i2, j2)`` puts i1 ordered variables below the
    first singular point, j1 between the first and second, i2 between
    the second and third, and j2 above the third.  ``basis_tag`` records
    which solution family the cycle belongs to ("Raw" for free-form
    occupancies) and ``index`` the position within that family.
    """

    occupancy: tuple[int, int, int, int]
    basis_tag: str = "Raw"
    index: int | None = None

    def __post_init__(self):
        occ = tuple(int(n) for n in self.occupancy)
        if len(occ) != 4 or any(n < 0 for n in occ):
            raise ValueError("occupancy must be four non-negative counts")
        object.__setattr__(self, "occupancy", occ)
        if self.basis_tag not in _BASIS_TAGS:
            raise ValueError(f"unknown basis_tag {self.basis_tag!r}")

    @property
    def m(self) -> int:
        return sum(self.occupancy)

    @classmethod
    def for_basis(cls, basis_tag: str, j: int, m: int) -> "CycleDescriptor":
        """The occupancy of the j-th member of a solution family."""
        if not 0 <= j <= m:
            raise ValueError(f"index {j} outside 0..{m}")
        if basis_tag == "I":
            return cls((0, j, 0, m - j), "I", j)
        if basis_tag in ("J", "K"):
            return cls((m - j, 0, j, 0), basis_tag, j)
        raise ValueError(f"no basis occupancy for tag {basis_tag!r}")


@dataclass(frozen=True)
class SolutionSample:
    """All m+1 members of one solution family at a single point."""

    z: float
    basis_tag: str
    values: tuple[float, ...]
    error_estimates: tuple[float, ...]
    converged: bool


# ---------------------------------------------------------------------------
# tanh-sinh nodes


@lru_cache(maxsize=64)
def _axis_nodes(level: int, tau_max: float):
    """Per-axis node data on (0, 1): (u, 1-u, log u, log(1-u), log w)."""
    h = 2.0 ** -level
    kmax = int(math.ceil(tau_max / h))
    tau = h * np.arange(-kmax, kmax + 1)
    y = 0.5 * math.pi * np.sinh(tau)
    y = np.clip(y, -_Y_CAP, _Y_CAP)
    log_u = -np.logaddexp(0.0, -2.0 * y)
    log_omu = -np.logaddexp(0.0, 2.0 * y)
    u = np.exp(log_u)
    omu = np.exp(log_omu)
    # dx/dtau = pi * x(1-x) * cosh(tau), then times the step h
    log_w = math.log(h * math.pi) + log_u + log_omu + np.log(np.cosh(tau))
    for arr in (u, omu, log_u, log_omu, log_w):
        arr.setflags(write=False)
    return u, omu, log_u, log_omu, log_w


def _tau_max(mu: float, tol: float) -> float:
    """Truncation point: the discarded tail is O(u_min^mu) with
    u_min ~ exp(-pi*sinh(tau_max)); aim it two orders below tol."""
    target_log = math.log(max(tol, 1.0e-13)) - math.log(1.0e2)
    y = min(_Y_CAP, -0.5 * target_log / max(mu, 1.0e-3))
    tau = math.asinh(max(2.0 * y / math.pi, 4.0))
    # round up for node-cache reuse across similar charts
    return math.ceil(tau * 4.0) / 4.0


# ---------------------------------------------------------------------------
# chamber geometry


@dataclass(frozen=True)
class _Block:
    kind: str  # "bounded" | "upper" | "lower"
    count: int
    lower: float | None
    upper: float | None


def _line_setup(chart: ExponentChart, z: float):
    """Singular points in line order with their exponents, plus the
    positions of 0, 1 and z in that order."""
    if 0.0 < z < 1.0:
        points = (0.0, float(z), 1.0)
        exps = (chart.a, chart.c, chart.b)
        zero_idx, one_idx, z_idx = 0, 2, 1
    elif z < 0.0:
        points = (float(z), 0.0, 1.0)
        exps = (chart.c, chart.a, chart.b)
        zero_idx, one_idx, z_idx = 1, 2, 0
    else:
        raise ValueError(
            f"z must lie in (0, 1) or be negative, got {z!r}")
    return points, exps, zero_idx, one_idx, z_idx


def _blocks_from_occupancy(occ, points):
    i1, j1, i2, j2 = occ
    blocks = []
    if i1:
        blocks.append(_Block("lower", i1, None, points[0]))
    if j1:
        blocks.append(_Block("bounded", j1, points[0], points[1]))
    if i2:
        blocks.append(_Block("bounded", i2, points[1], points[2]))
    if j2:
        blocks.append(_Block("upper", j2, points[2], None))
    return blocks


def _var_layout(blocks):
    """Per variable (ascending t): (block number, index within block)."""
    layout = []
    for bi, block in enumerate(blocks):
        for r in range(block.count):
            layout.append((bi, r))
    return layout


# multiplier terms: (coefficient, ((var, point, power), ...))
_UNIT_TERMS = ((1.0, ()), )


def _check_margins(blocks, points, exps, g, m, margin, terms):
    """Reject non-integrable exponent combinations; return the smallest
    margin actually available (used to size the node truncation)."""
    layout = _var_layout(blocks)
    decay = sum(exps) + (m - 1) * g
    mu = math.inf

    def _shifts(var):
        out = []
        for _, factors in terms:
            by_point = {}
            for v, p, pw in factors:
                if v == var:
                    by_point[p] = by_point.get(p, 0) + pw
            out.append(by_point)
        return out

    for var, (bi, _) in enumerate(layout):
        block = blocks[bi]
        edge_points = []
        if block.lower is not None:
            edge_points.append(points.index(block.lower))
        if block.upper is not None:
            edge_points.append(points.index(block.upper))
        for by_point in _shifts(var):
            for pt in edge_points:
                eff = exps[pt] + by_point.get(pt, 0)
                room = eff + 1.0
                if room < margin:
                    raise ConvergenceDomainError(
                        f"exponent at singular point #{pt} must exceed "
                        f"-1 + margin; got {eff:.6g}", eff)
                mu = min(mu, room)
            if block.kind in ("upper", "lower"):
                eff = decay + sum(by_point.values())
                room = -1.0 - eff
                if room < margin:
                    raise ConvergenceDomainError(
                        "decay exponent a + b + c + (m-1)g of the "
                        f"farthest variable must stay below -1 - margin; "
                        f"got {eff:.6g}", eff)
                mu = min(mu, room)
    if g + 1.0 < margin:
        raise ConvergenceDomainError(
            f"pair exponent must exceed -1 + margin; got {g:.6g}", g)
    mu = min(mu, g + 1.0)
    return mu


def _integrate_chamber(blocks, points, exps, g, level, tau_max, terms):
    """One tanh-sinh pass over one chamber; returns the plain integral
    (no m! factor) of u(t) times the multiplier terms."""
    layout = _var_layout(blocks)
    m = len(layout)
    u1, omu1, logu1, logomu1, logw1 = _axis_nodes(level, tau_max)
    n_nodes = u1.shape[0]

    def along(arr, dim):
        shape = [1] * m
        shape[dim] = -1
        return arr.reshape(shape)

    # dims 1..m-1 are materialized fully; dim 0 is chunked
    inner = n_nodes ** (m - 1)
    chunk = max(1, (1 << 21) // max(1, inner))

    # static var -> grid dim assignment: ascending-t order
    # axis orientation: bounded and upper blocks consume their own
    # variables nearest-edge-first; lower blocks nearest-edge-first means
    # reversed t order
    def axis_dim(bi, r):
        base = sum(b.count for b in blocks[:bi])
        if blocks[bi].kind == "lower":
            return base + (blocks[bi].count - 1 - r)
        return base + r

    totals = [0.0 for _ in terms]
    for start in range(0, n_nodes, chunk):
        sl = slice(start, min(start + chunk, n_nodes))

        def nodes(dim):
            if dim == 0:
                return (u1[sl], omu1[sl], logu1[sl], logomu1[sl], logw1[sl])
            return (u1, omu1, logu1, logomu1, logw1)

        shared = 0.0
        # per-(block, r): log distance to the block's finite edge(s) and
        # helpers for gaps; axis node arrays broadcast along their dim
        d_lo_log = [None] * m   # log(t - lower edge) per ascending var
        d_hi_log = [None] * m   # log(upper edge - t)

        var_index = 0
        block_first_var = []
        for bi, block in enumerate(blocks):
            block_first_var.append(var_index)
            k = block.count
            dims = [axis_dim(bi, r) for r in range(k)]
            parts = [nodes(d) for d in dims]
            us = [along(p[0], d) for p, d in zip(parts, dims)]
            omus = [along(p[1], d) for p, d in zip(parts, dims)]
            logus = [along(p[2], d) for p, d in zip(parts, dims)]
            logomus = [along(p[3], d) for p, d in zip(parts, dims)]
            for p, d in zip(parts, dims):
                shared = shared + along(p[4], d)

            if block.kind == "bounded":
                width = block.upper - block.lower
                log_width = math.log(width)
                cum_omu = []
                acc = 0.0
                for r in range(k):
                    acc = acc + logomus[r]
                    cum_omu.append(acc)
                # D_r = (t_r - lower)/width, positive recurrence
                dvals = []
                dacc = 0.0
                for r in range(k):
                    dacc = dacc + us[r] * (1.0 - dacc)
                    dvals.append(dacc)
                for r in range(k):
                    v = var_index + r
                    d_lo_log[v] = log_width + np.log(dvals[r])
                    d_hi_log[v] = log_width + cum_omu[r]
                # jacobian: dt_r/du_r = upper - t_{r-1}
                shared = shared + k * log_width
                for r in range(1, k):
                    shared = shared + cum_omu[r - 1]
                # within-block gaps
                for alpha in range(k):
                    for beta in range(alpha + 1, k):
                        seg = 0.0
                        for s in range(alpha + 1, beta + 1):
                            seg = seg + us[s] * (1.0 - seg)
                        gap_log = log_width + cum_omu[alpha] + np.log(seg)
                        shared = shared + g * gap_log
            else:
                # reciprocal map: distance to the finite edge is
                # (1 - s_r)/s_r with s_r a product of per-axis nodes;
                # axis r = 0 is the variable nearest the edge
                log_s = []
                acc = 0.0
                for r in range(k):
                    acc = acc + logus[r]
                    log_s.append(acc)
                dbar = []  # 1 - s_r, positive recurrence over 1-u
                dacc = 0.0
                for r in range(k):
                    dacc = dacc + omus[r] * (1.0 - dacc)
                    dbar.append(dacc)
                log_edge_dist = [np.log(dbar[r]) - log_s[r]
                                 for r in range(k)]
                for r in range(k):
                    if block.kind == "upper":
                        d_lo_log[var_index + r] = log_edge_dist[r]
                    else:
                        d_hi_log[var_index + (k - 1 - r)] = \
                            log_edge_dist[r]
                # jacobian: prod_r s_{r-1}/s_r^2
                for r in range(k):
                    prev = log_s[r - 1] if r else 0.0
                    shared = shared + (prev - 2.0 * log_s[r])
                # within-block gaps: |1/s_far - 1/s_near|
                for rn in range(k):
                    for rf in range(rn + 1, k):
                        seg = 0.0
                        for s in range(rn + 1, rf + 1):
                            seg = seg + omus[s] * (1.0 - seg)
                        gap_log = np.log(seg) - log_s[rf]
                        shared = shared + g * gap_log
            var_index += k

        # distances from every variable to every singular point
        def log_dist(var, pt):
            bi, _ = layout[var]
            block = blocks[bi]
            p = points[pt]
            if block.kind == "upper" or (block.kind == "bounded"
                                         and p <= block.lower):
                base = d_lo_log[var]
                offset = block.lower - p
            else:
                base = d_hi_log[var]
                offset = p - block.upper
            if offset == 0.0:
                return base
            return np.logaddexp(base, math.log(offset))

        dist_cache = {}

        def log_dist_cached(var, pt):
            key = (var, pt)
            if key not in dist_cache:
                dist_cache[key] = log_dist(var, pt)
            return dist_cache[key]

        for var in range(m):
            for pt in range(3):
                shared = shared + exps[pt] * log_dist_cached(var, pt)

        # cross-block gaps: gap to own edge + edge separation + gap
        def cross_gap_log(va, vb):
            ba, _ = layout[va]
            bb, _ = layout[vb]
            hi_a = blocks[ba].upper
            lo_b = blocks[bb].lower
            out = np.logaddexp(d_hi_log[va], d_lo_log[vb])
            if lo_b > hi_a:
                out = np.logaddexp(out, math.log(lo_b - hi_a))
            return out

        for va in range(m):
            for vb in range(va + 1, m):
                if layout[va][0] != layout[vb][0]:
                    shared = shared + g * cross_gap_log(va, vb)

        # sign of (t_var - p_pt): fixed by which side the block lies on
        def side(var, pt):
            bi, _ = layout[var]
            block = blocks[bi]
            if block.kind == "upper":
                return 1.0
            if block.kind == "lower":
                return -1.0
            return 1.0 if points[pt] <= block.lower else -1.0

        for ti, (coeff, factors) in enumerate(terms):
            extra = 0.0
            sign = 1.0
            for var, pt, pw in factors:
                extra = extra + pw * log_dist_cached(var, pt)
                if pw % 2 != 0:
                    sign *= side(var, pt)
            term_log = shared + extra
            vals = np.exp(np.minimum(term_log, _LOG_CLIP))
            totals[ti] += coeff * sign * float(np.sum(vals))
    return math.fsum(totals)


def _refine_chamber(blocks, points, exps, g, cfg, mu, terms):
    """Run the refinement ladder; returns (value, error, converged)."""
    tau = _tau_max(mu, cfg.target_rel_tol)
    prev = _integrate_chamber(blocks, points, exps, g, cfg.levels, tau,
                              terms)
    err = math.inf
    value = prev
    converged = False
    for step in range(1, cfg.max_refinement + 1):
        value = _integrate_chamber(blocks, points, exps, g,
                                   cfg.levels + step, tau, terms)
        err = abs(value - prev)
        if err <= cfg.target_rel_tol * max(abs(value), 1.0e-300):
            converged = True
            break
        prev = value
    if not math.isfinite(value):
        raise ArithmeticError("chamber quadrature produced a non-finite "
                              "value")
    return value, err, converged


def _cycle_value(cycle, chart, z, cfg, terms=_UNIT_TERMS):
    points, exps, _, _, _ = _line_setup(chart, z)
    if cycle.m != chart.m:
        raise ValueError(
            f"cycle occupancy sums to {cycle.m}, chart has m={chart.m}")
    blocks = _blocks_from_occupancy(cycle.occupancy, points)
    mu = _check_margins(blocks, points, exps, chart.g, chart.m,
                        cfg.convergence_margin, terms)
    value, err, conv = _refine_chamber(blocks, points, exps, chart.g,
                                       cfg, mu, terms)
    fact = float(math.factorial(chart.m))
    return fact * value, fact * err, conv


# ---------------------------------------------------------------------------
# basis evaluation


def _require_cfg(cfg):
    return cfg if cfg is not None else QuadratureConfig()


def _validate_basis_z(basis_tag, z):
    if basis_tag == "J" and not 0.0 < z < 1.0:
        raise ValueError("the around-1 family needs 0 < z < 1")
    if basis_tag == "K" and not z < 0.0:
        raise ValueError("the around-infinity family needs z < 0")
    if basis_tag not in ("I", "J", "K"):
        raise ValueError(f"unknown basis_tag {basis_tag!r}")


def eval_basis(j, chart, z, basis_tag, cfg=None):
    """One basis integral by quadrature: returns (value, error estimate).

    The value is m! times the ordered-chamber integral with all factors
    positive; the error estimate is the change produced by the last
    level refinement.
    """
    cfg = _require_cfg(cfg)
    if chart.m > 3:
        raise ValueError("quadrature is desk scale: m must be at most 3")
    _validate_basis_z(basis_tag, z)
    cycle = CycleDescriptor.for_basis(basis_tag, j, chart.m)
    value, err, _ = _cycle_value(cycle, chart, z, cfg)
    return value, err


def sample_basis(chart, z, basis_tag, cfg=None):
    """All m+1 members of a family at z, as a SolutionSample."""
    cfg = _require_cfg(cfg)
    values, errors, flags = [], [], []
    for j in range(chart.m + 1):
        cycle = CycleDescriptor.for_basis(basis_tag, j, chart.m)
        v, e, conv = _cycle_value(cycle, chart, z, cfg)
        values.append(v)
        errors.append(e)
        flags.append(conv)
    return SolutionSample(z=float(z), basis_tag=basis_tag,
                         values=tuple(values),
                         error_estimates=tuple(errors),
                         converged=all(flags))


# ---------------------------------------------------------------------------
# closed forms and asymptotics


def _beta(x, y):
    return (complex_gamma(x) * complex_gamma(y) /
            complex_gamma(x + y)).real


def closed_form_m1(j, chart, z, basis_tag):
    """The m=1 basis values in terms of the Gauss series.

    Standard loading keeps every factor positive, so the algebraic
    prefactors appear with |z|, |1-z| or |1/z| as appropriate.
    """
    if chart.m != 1:
        raise ValueError("closed forms are for m = 1")
    _validate_basis_z(basis_tag, z)
    if j not in (0, 1):
        raise ValueError("j must be 0 or 1")
    a, b, c = chart.a, chart.b, chart.c
    lam = -a - b - c  # decay exponent magnitude at infinity
    if basis_tag == "I":
        if j == 0:
            val = _beta(b + 1, lam - 1) * gauss_2f1(-c, lam - 1,
                                                    -a - c, z)
        else:
            val = (_beta(a + 1, c + 1) * abs(z) ** (a + c + 1)
                   * gauss_2f1(-b, a + 1, a + c + 2, z))
    elif basis_tag == "J":
        if j == 0:
            val = _beta(a + 1, lam - 1) * gauss_2f1(-c, lam - 1,
                                                    -b - c, 1.0 - z)
        else:
            val = (_beta(b + 1, c + 1) * (1.0 - z) ** (b + c + 1)
                   * gauss_2f1(-a, b + 1, b + c + 2, 1.0 - z))
    else:
        w = 1.0 / z
        if j == 0:
            val = (_beta(c + 1, lam - 1) * (-w) ** (lam - 1)
                   * gauss_2f1(-b, lam - 1, -a - b, w))
        else:
            val = (_beta(a + 1, b + 1) * (-w) ** (-c)
                   * gauss_2f1(-c, a + 1, a + b + 2, w))
    val = complex(val)
    return val.real


def leading_asymptotic(j, chart, basis_tag):
    """Leading coefficient and exponent of a basis member.

    The local variable is z for "I", 1 - z for "J" and -1/z for "K";
    the value behaves like coefficient * (local variable)**exponent.
    """
    m = chart.m
    if not 0 <= j <= m:
        raise ValueError(f"j must lie in 0..{m}")
    a, b, c, g = chart.a, chart.b, chart.c, chart.g
    lam = chart.lambda_inf
    fact = float(math.factorial(m))
    if basis_tag == "I":
        coeff = (fact * selberg(j, a + 1, c + 1, g / 2)
                 * selberg(m - j, lam - 1, b + 1, g / 2))
        exponent = char_exponents(chart, Singularity.ZERO).values[j]
    elif basis_tag == "J":
        coeff = (fact * selberg(j, b + 1, c + 1, g / 2)
                 * selberg(m - j, lam - 1, a + 1, g / 2))
        exponent = char_exponents(chart, Singularity.ONE).values[j]
    elif basis_tag == "K":
        coeff = (fact * selberg(j, a + 1, b + 1, g / 2)
                 * selberg(m - j, lam - 1, c + 1, g / 2))
        exponent = char_exponents(chart, Singularity.INFINITY).values[m - j]
    else:
        raise ValueError(f"unknown basis_tag {basis_tag!r}")
    return coeff, exponent


# ---------------------------------------------------------------------------
# identity residuals


def _swap(chart, a, b, c):
    return ExponentChart(m=chart.m, a=a, b=b, c=c, g=chart.g)


def reflection_residual(chart, z, kind, cfg=None):
    """Residual of an argument-reflection identity, max over the family.

    kind "Prop24": the around-1 family at z equals the around-0 family
    at 1 - z with the roles of the endpoints 0 and 1 exchanged.
    kind "Prop29": the around-infinity family at z < -1 equals the
    around-0 family at 1/z, with the roles of the second and third
    exponents exchanged, times |z|**((a+b+c+1)m + C(m,2) g).
    """
    cfg = _require_cfg(cfg)
    m = chart.m
    resid = 0.0
    if kind == "Prop24":
        if not 0.0 < z < 1.0:
            raise ValueError("this reflection needs 0 < z < 1")
        other = _swap(chart, chart.b, chart.a, chart.c)
        for j in range(m + 1):
            left, _ = eval_basis(j, chart, z, "J", cfg)
            right, _ = eval_basis(j, other, 1.0 - z, "I", cfg)
            resid = max(resid, abs(left - right)
                        / max(abs(left), abs(right), 1.0e-300))
    elif kind == "Prop29":
        if not z < -1.0:
            raise ValueError("this reflection needs z < -1")
        other = _swap(chart, chart.a, chart.c, chart.b)
        power = ((chart.a + chart.b + chart.c + 1.0) * m
                 + m * (m - 1) // 2 * chart.g)
        pref = (-z) ** power
        for j in range(m + 1):
            left, _ = eval_basis(j, chart, z, "K", cfg)
            right, _ = eval_basis(j, other, 1.0 / z, "I", cfg)
            right *= pref
            resid = max(resid, abs(left - right)
                        / max(abs(left), abs(right), 1.0e-300))
    else:
        raise ValueError(f"unknown reflection kind {kind!r}")
    return resid


def connection_residual_numeric(chart, z, pair, cfg=None, variant=None):
    """Quadrature check of the defining relation of the connection
    matrix: around-0 values against the matrix times around-1 (pair
    "ZeroOne", 0 < z < 1) or around-infinity (pair "ZeroInf", z < 0)
    values.  Returns max_i |I_i - sum_j p_ij B_j| / max_i |I_i|.
    """
    from .connection import FormulaVariant, connect_01, connect_0inf

    cfg = _require_cfg(cfg)
    if variant is None:
        variant = FormulaVariant.RACAH_UNIFORM
    m = chart.m
    if pair == "ZeroOne":
        if not 0.0 < z < 1.0:
            raise ValueError("pair ZeroOne needs 0 < z < 1")
        matrix = connect_01(m, chart.a, chart.b, chart.c, chart.g,
                            variant).entries
        basis_tag = "J"
    elif pair == "ZeroInf":
        if not z < 0.0:
            raise ValueError("pair ZeroInf needs z < 0")
        matrix = connect_0inf(m, chart.a, chart.b, chart.c, chart.g,
                              variant).entries
        basis_tag = "K"
    else:
        raise ValueError(f"unknown pair {pair!r}")
    p = matrix.real
    left = np.array([eval_basis(i, chart, z, "I", cfg)[0]
                     for i in range(m + 1)])
    right_basis = np.array([eval_basis(jj, chart, z, basis_tag, cfg)[0]
                            for jj in range(m + 1)])
    resid = np.abs(left - p @ right_basis)
    return float(np.max(resid) / np.max(np.abs(left)))


# ---------------------------------------------------------------------------
# the ordinary differential equation in z


def _dz_terms(m, z_idx, c, order):
    """Multiplier terms for the order-th z-derivative of the integrand:
    d/dz u = -c * sum_k (t_k - z)^(-1) u, iterated."""
    if order == 0:
        return _UNIT_TERMS
    if order == 1:
        return tuple((-c, ((k, z_idx, -1), )) for k in range(m))
    if order == 2:
        terms = [(c * c, ((k, z_idx, -1), (l, z_idx, -1)))
                 for k in range(m) for l in range(m)]
        terms += [(-c, ((k, z_idx, -2), )) for k in range(m)]
        return tuple(terms)
    if order == 3:
        terms = [(-c ** 3, ((k, z_idx, -1), (l, z_idx, -1),
                            (n, z_idx, -1)))
                 for k in range(m) for l in range(m) for n in range(m)]
        terms += [(3.0 * c * c, ((k, z_idx, -1), (l, z_idx, -2)))
                  for k in range(m) for l in range(m)]
        terms += [(-2.0 * c, ((k, z_idx, -3), )) for k in range(m)]
        return tuple(terms)
    raise ValueError("derivative order must be 0..3")


def ode_residual(chart, z, cfg=None):
    """Residual of the scalar differential equation on the basis member
    whose variables all sit in (1, oo) -- its chamber stays clear of z,
    so differentiation under the integral keeps the same margins.
    Returns |equation| / (largest term magnitude).
    """
    cfg = _require_cfg(cfg)
    m = chart.m
    if m not in (1, 2):
        raise ValueError("the explicit equation is available for m in "
                         "{1, 2}")
    _, _, _, _, z_idx = _line_setup(chart, z)
    cycle = CycleDescriptor.for_basis("I", 0, m)
    a, b, c, g = chart.a, chart.b, chart.c, chart.g

    def deriv(order):
        val, _, _ = _cycle_value(cycle, chart, z, cfg,
                                 _dz_terms(m, z_idx, c, order))
        return val

    if m == 1:
        i0, i1, i2 = deriv(0), deriv(1), deriv(2)
        t2 = z * (z - 1.0) * i2
        t1 = (a + c - (a + b + 2.0 * c) * z) * i1
        t0 = c * (a + b + c + 1.0) * i0
        terms = (t2, t1, t0)
    else:
        i0, i1, i2, i3 = deriv(0), deriv(1), deriv(2), deriv(3)
        k1 = -g - 3.0 * b - 3.0 * c
        k2 = -g - 3.0 * a - 3.0 * c
        l1 = (b + c) * (2.0 * b + 2.0 * c + g + 1.0)
        l2 = (a + c) * (2.0 * a + 2.0 * c + g + 1.0)
        l3 = ((b + c) * (2.0 * a + 2.0 * c + g + 1.0)
              + (a + c) * (2.0 * b + 2.0 * c + g + 1.0)
              + (c - 1.0) * (a + b + c)
              + (3.0 * c + g) * (a + b + c + g + 1.0))
        m1 = -c * (2.0 * b + 2.0 * c + g + 1.0) \
            * (2.0 * a + 2.0 * b + 2.0 * c + g + 2.0)
        m2 = -c * (2.0 * a + 2.0 * c + g + 1.0) \
            * (2.0 * a + 2.0 * b + 2.0 * c + g + 2.0)
        w = z * (z - 1.0)
        terms = (w * w * i3,
                 (k1 * z + k2 * (z - 1.0)) * w * i2,
                 (l1 * z * z + l2 * (z - 1.0) ** 2 + l3 * w) * i1,
                 (m1 * z + m2 * (z - 1.0)) * i0)
    scale = max(abs(t) for t in terms)
    return abs(math.fsum(terms)) / max(scale, 1.0e-300)


def ode_residual_closed_form(chart, z):
    """m=1 residual with the value and its derivatives taken from the
    Gauss-series closed form instead of quadrature."""
    if chart.m != 1:
        raise ValueError("closed-form residual is for m = 1")
    a, b, c = chart.a, chart.b, chart.c
    lam = -a - b - c
    A, B, C = -c, lam - 1.0, -a - c

    def f(n):
        coeff = 1.0
        for s in range(n):
            coeff *= (A + s) * (B + s) / (C + s)
        return coeff * complex(gauss_2f1(A + n, B + n, C + n, z)).real

    i0, i1, i2 = f(0), f(1), f(2)
    t2 = z * (z - 1.0) * i2
    t1 = (a + c - (a + b + 2.0 * c) * z) * i1
    t0 = c * (a + b + c + 1.0) * i0
    scale = max(abs(t2), abs(t1), abs(t0))
    return abs(math.fsum((t2, t1, t0))) / max(scale, 1.0e-300)


# ---------------------------------------------------------------------------
# the first-order system


def _phi_terms(m, i, zero_idx, one_idx):
    """The symmetrized cohomology representative: sum over permutations
    of 1/t for the first i slots and 1/(t-1) for the rest."""
    terms = []
    for sigma in permutations(range(m)):
        factors = tuple((sigma[s], zero_idx, -1) for s in range(i)) \
            + tuple((sigma[s], one_idx, -1) for s in range(i, m))
        terms.append((1.0, factors))
    return tuple(terms)


def _product_terms(first, second):
    return tuple((c1 * c2, f1 + f2) for c1, f1 in first
                 for c2, f2 in second)


def phi_pairing(i, cycle, chart, z, cfg=None):
    """Pairing of the i-th symmetrized cohomology representative with a
    loaded cycle: m! times the one-chamber integral of phi_i * u."""
    cfg = _require_cfg(cfg)
    m = chart.m
    if not 0 <= i <= m:
        raise ValueError(f"i must lie in 0..{m}")
    _, _, zero_idx, one_idx, _ = _line_setup(chart, z)
    value, _, _ = _cycle_value(cycle, chart, z, cfg,
                               _phi_terms(m, i, zero_idx, one_idx))
    return value


def phi_pairing_dz(i, cycle, chart, z, cfg=None):
    """z-derivative of phi_pairing, by differentiation under the
    integral sign."""
    cfg = _require_cfg(cfg)
    m = chart.m
    if not 0 <= i <= m:
        raise ValueError(f"i must lie in 0..{m}")
    _, _, zero_idx, one_idx, z_idx = _line_setup(chart, z)
    terms = _product_terms(_phi_terms(m, i, zero_idx, one_idx),
                           _dz_terms(m, z_idx, chart.c, 1))
    value, _, _ = _cycle_value(cycle, chart, z, cfg, terms)
    return value


def ode_system_equation_residuals(chart, z, cfg=None,
                                  cycle=None):
    """Per-equation residuals of the first-order system for the
    pairings; index i runs over 0..m.

    The displayed interior rule is applied at every 0 < i < m.  For
    m = 2 that means using it at i = 1, which closes the system (the
    boundary rules cover i = 0 and i = m); this reading is validated
    numerically by the tests.
    """
    cfg = _require_cfg(cfg)
    m = chart.m
    if m > 2:
        raise ValueError("the system check is desk scale: m must be at "
                         "most 2")
    if cycle is None:
        cycle = CycleDescriptor((0, 0, 0, m))
    a, b, c, g = chart.a, chart.b, chart.c, chart.g
    phi = [phi_pairing(i, cycle, chart, z, cfg) for i in range(m + 1)]
    dphi = [phi_pairing_dz(i, cycle, chart, z, cfg) for i in range(m + 1)]

    residuals = []
    for i in range(m + 1):
        if i == 0:
            rhs_terms = [m / (z - 1.0) * (b + c + (m - 1) * g / 2.0)
                         * phi[0],
                         m / (z - 1.0) * a * phi[1]]
        elif i == m:
            rhs_terms = [m / z * (a + c + (m - 1) * g / 2.0) * phi[m],
                         m / z * b * phi[m - 1]]
        else:
            rhs_terms = [i / z * (a + c + (i - 1) * g / 2.0) * phi[i],
                         i / z * (b + (m - i) * g / 2.0) * phi[i - 1],
                         (m - i) / (z - 1.0)
                         * (b + c + (m - i - 1) * g / 2.0) * phi[i],
                         (m - i) / (z - 1.0) * (a + i * g / 2.0)
                         * phi[i + 1]]
        scale = max([abs(dphi[i])] + [abs(t) for t in rhs_terms])
        resid = abs(dphi[i] - math.fsum(rhs_terms))
        residuals.append(resid / max(scale, 1.0e-300))
    return tuple(residuals)


def ode_system_residual(chart, z, cfg=None):
    """Largest equation residual of the first-order system; see
    ode_system_equation_residuals."""
    return max(ode_system_equation_residuals(chart, z, cfg))
