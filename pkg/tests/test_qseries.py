"""Tests for the terminating-series engine, 2F1 and q-Racah family."""

from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import support
from qconn.qkernel import QContext, e_half
from qconn.qseries import (
    DegenerateSeriesError,
    NonTerminatingSeriesError,
    QRacahSpec,
    TerminatingSeriesSpec,
    gauss_2f1,
    phi,
    phi_terms,
    qpoch,
    qracah_norm,
    qracah_w,
    qracah_weight,
    sears_check,
    watson_check,
)

mpmath.mp.dps = 30


# --- q-Pochhammer -----------------------------------------------------------

def test_qpoch_trivial():
    assert qpoch(0.3 + 0.2j, 0.7, 0) == 1
    assert qpoch(0.5, 0.5, 2) == pytest.approx(0.375)
    with pytest.raises(ValueError):
        qpoch(0.5, 0.5, -1)


@given(
    ar=st.floats(-2, 2), ai=st.floats(-2, 2),
    qr=st.floats(-0.95, 0.95), qi=st.floats(-0.95, 0.95),
    n=st.integers(0, 12),
)
def test_qpoch_recurrence(ar, ai, qr, qi, n):
    a = complex(ar, ai)
    q = complex(qr, qi)
    lhs = qpoch(a, q, n + 1)
    rhs = qpoch(a, q, n) * (1 - a * q ** n)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


# --- terminating series engine ----------------------------------------------

def _spec(num, den, q, z, n):
    return TerminatingSeriesSpec(numerator_params=tuple(num),
                                 denominator_params=tuple(den),
                                 q=q, argument=z, termination_index=n)


def test_phi_single_term():
    q = e_half(0.3)
    spec = _spec([1.0, 0.4], [0.7], q, 0.9, 0)
    assert phi(spec) == 1


def test_phi_two_term_hand_sum():
    # one numerator parameter q^-1 terminates the sum after k = 1
    q = complex(e_half(0.22))
    num = (1 / q, 0.3 + 0.1j, -0.4, 0.8)
    den = (0.5, 0.2 - 0.3j, 1.7)
    z = 0.6 + 0.2j
    hand = 1.0
    hand += (
        (1 - num[0]) * (1 - num[1]) * (1 - num[2]) * (1 - num[3])
        / ((1 - den[0]) * (1 - den[1]) * (1 - den[2]) * (1 - q))
        * z
    )
    assert abs(phi(_spec(num, den, q, z, 1)) - hand) < 1e-14


def test_phi_rejects_non_terminating():
    q = complex(e_half(0.3))
    with pytest.raises(NonTerminatingSeriesError):
        phi(_spec([0.5, 0.7], [0.2], q, 0.1, 3))


def test_phi_reports_vanishing_denominator():
    q = complex(e_half(0.3))
    # denominator parameter 1/q makes (b;q)_2 contain the factor 1 - 1 = 0
    with pytest.raises(DegenerateSeriesError) as exc:
        phi(_spec([q ** -3, 0.5], [1 / q], q, 0.1, 3))
    assert exc.value.k == 2


@given(n=st.integers(0, 24), g=st.floats(0.05, 0.45))
def test_phi_term_count(n, g):
    q = complex(e_half(g))
    spec = _spec([q ** (-n), 0.37], [0.21], q, 0.45, n)
    try:
        terms = phi_terms(spec)
    except DegenerateSeriesError:
        # g with (k+1)*g an even integer makes (q;q)_k vanish; not the
        # property under test
        assume(False)
    assert len(terms) == spec.term_count == n + 1


def test_phi_long_sum_matches_high_precision():
    # exercise the compensated-summation path (> 16 terms) against mpmath
    n = 30
    g = 0.37
    q = complex(e_half(g))
    spec = _spec([q ** (-n), 0.37], [0.21], q, 0.45, n)
    with mpmath.workdps(50):
        mq = mpmath.expjpi(mpmath.mpf("0.37"))
        total = mpmath.mpc(0)
        scale = mpmath.mpf(0)
        term = mpmath.mpc(1)
        for k in range(n + 1):
            total += term
            scale += abs(term)
            term *= (1 - mq ** (k - n)) * (1 - mpmath.mpf("0.37") * mq ** k)
            term /= (1 - mpmath.mpf("0.21") * mq ** k) * (1 - mq ** (k + 1))
            term *= mpmath.mpf("0.45")
        ref = complex(total)
        mag = float(scale)
    assert abs(phi(spec) - ref) < 1e-13 * max(1.0, mag)


# --- Gauss 2F1 --------------------------------------------------------------

def test_2f1_at_zero():
    assert gauss_2f1(0.3, 1.7, 0.9, 0.0) == 1


def test_2f1_log_value():
    z = 0.25
    assert abs(gauss_2f1(1, 1, 2, z) + math.log(1 - z) / z) < 1e-12


@pytest.mark.parametrize("z", [0.1, 0.45, 0.7 + 0.0j, 0.85, -0.3,
                               -1.0, -2.0, 0.3 + 0.4j, -0.5 + 0.2j])
def test_2f1_against_mpmath(z):
    a, b, c = 0.31, -0.77, 1.23
    ref = complex(mpmath.hyp2f1(a, b, c, z))
    assert abs(gauss_2f1(a, b, c, z) - ref) < 1e-12 * max(1.0, abs(ref))


def test_2f1_rejections():
    with pytest.raises(ValueError):
        gauss_2f1(0.3, 0.4, -2.0, 0.1)  # c at a pole
    with pytest.raises(ValueError):
        gauss_2f1(0.3, 0.4, 0.9, 1.2)  # beyond the disk, right half plane


def test_2f1_satisfies_hypergeometric_ode():
    # with F = 2F1(-c, -a-b-c-1; -a-c; z) built from exponents (a, b, c),
    # check z(z-1)F'' + (a+c-(a+b+2c)z)F' + c(a+b+c+1)F = 0 pointwise
    a, b, c = -0.4, -0.4, -0.4
    A, B, C = -c, -a - b - c - 1, -a - c

    def F(z, shift=0):
        coef = 1.0
        for t in range(shift):
            coef *= (A + t) * (B + t) / (C + t)
        return coef * gauss_2f1(A + shift, B + shift, C + shift, z)

    for z in (0.1, 0.3, 0.5):
        resid = z * (z - 1) * F(z, 2) + (a + c - (a + b + 2 * c) * z) * F(z, 1) \
            + c * (a + b + c + 1) * F(z)
        assert abs(resid) < 1e-8


# --- q-Racah ----------------------------------------------------------------

def test_qracah_trivial_values():
    spec = QRacahSpec(a=0.4, b=0.3, c=-0.5, N=5, q=0.6)
    for x in range(6):
        assert qracah_w(0, x, spec) == 1
    for n in range(6):
        assert qracah_w(n, 0, spec) == 1
    assert qracah_weight(0, spec) == pytest.approx(1.0)


def test_qracah_range_rejected():
    spec = QRacahSpec(a=0.4, b=0.3, c=-0.5, N=5, q=0.6)
    with pytest.raises(ValueError):
        qracah_w(6, 0, spec)
    with pytest.raises(ValueError):
        qracah_w(0, -1, spec)
    with pytest.raises(ValueError):
        qracah_weight(7, spec)
    with pytest.raises(ValueError):
        qracah_norm(-1, spec)


def test_qracah_polynomial_degree_in_mu():
    # W_n is degree n in mu(x): interpolate through n+1 nodes and predict
    # the value at a fresh node
    rng = np.random.default_rng(7)
    for _ in range(4):
        spec = support.draw_real_racah(rng, N=6)
        for n in range(4):
            nodes = [spec.mu(x) for x in range(n + 1)]
            vals = [qracah_w(n, x, spec) for x in range(n + 1)]
            target_x = n + 1
            mu_t = spec.mu(target_x)
            # Lagrange interpolation at mu_t
            acc = 0.0 + 0.0j
            for i in range(n + 1):
                li = 1.0 + 0.0j
                for j in range(n + 1):
                    if j != i:
                        li *= (mu_t - nodes[j]) / (nodes[i] - nodes[j])
                acc += vals[i] * li
            assert abs(acc - qracah_w(n, target_x, spec)) < 1e-9


def test_qracah_orthogonality_real_draws():
    rng = np.random.default_rng(11)
    for _ in range(10):
        N = int(rng.integers(1, 9))
        spec = support.draw_real_racah(rng, N)
        assert support.racah_orthogonality_residual(spec) < 1e-10


def test_qracah_orthogonality_unitary_draws():
    rng = np.random.default_rng(13)
    for _ in range(10):
        N = int(rng.integers(1, 9))
        spec = support.draw_unitary_racah(rng, N)
        assert support.racah_orthogonality_residual(spec) < 1e-10


def test_qracah_total_mass():
    rng = np.random.default_rng(17)
    spec = support.draw_real_racah(rng, N=7)
    mass = sum(qracah_weight(x, spec) for x in range(8))
    assert abs(mass - 1.0 / qracah_norm(0, spec)) < 1e-10 * abs(mass)


def test_qracah_weight_positive_classical_window():
    # a classically admissible window: 0 < q < 1, 0 < aq, bq < 1, c < 0
    for (a, b, c, N, q) in [(0.5, 0.4, -0.25, 6, 0.55),
                            (0.3, 0.7, -0.6, 5, 0.4),
                            (0.8, 0.2, -0.1, 8, 0.7)]:
        spec = QRacahSpec(a=a, b=b, c=c, N=N, q=q)
        for x in range(N + 1):
            w = qracah_weight(x, spec)
            assert abs(complex(w).imag) < 1e-14
            assert complex(w).real > 0, (x, a, b, c, N, q)


def test_qracah_duality_exchange():
    # the 4-phi-3 with parameters built from exponents (a, b, c, g) reads
    # as W_i(j) in one q-Racah family and W_j(i) in the partner family
    rng = np.random.default_rng(23)
    for _ in range(6):
        m = int(rng.integers(1, 9))
        chart = support.draw_generic_chart(rng, m)
        a, b, c, g = chart.a, chart.b, chart.c, chart.g
        q = complex(e_half(g))
        fam1 = QRacahSpec(a=e_half(2 * c) / q, b=e_half(2 * a) / q,
                          c=e_half(2 * (b + c)) * q ** (m - 1), N=m, q=q)
        fam2 = QRacahSpec(a=e_half(2 * c) / q, b=e_half(2 * b) / q,
                          c=e_half(2 * (a + c)) * q ** (m - 1), N=m, q=q)
        for i in range(m + 1):
            for j in range(m + 1):
                lhs = qracah_w(i, j, fam1)
                rhs = qracah_w(j, i, fam2)
                assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))


# --- transformation identities ----------------------------------------------

def test_watson_trivial():
    assert watson_check(0.3, 0.2, 0.4, 0.5, 0.6, 0, e_half(0.3)) == 0


def test_watson_random_draws():
    rng = np.random.default_rng(29)
    count = 0
    while count < 25:
        n = int(rng.integers(0, 7))
        g = float(rng.uniform(0.05, 0.4))
        q = complex(e_half(g))
        lams = rng.uniform(-0.45, 0.45, size=5)
        a, b, c, d, e = (complex(e_half(2 * x)) for x in lams)
        try:
            resid = watson_check(a, b, c, d, e, n, q)
        except (DegenerateSeriesError, ZeroDivisionError):
            continue
        assert resid < 1e-10
        count += 1


def test_watson_specialization_from_wp_connection_proof():
    # the parameter list that turns the very-well-poised 8-phi-7 of the
    # connection entries into the balanced 4-phi-3
    m, i, j = 3, 1, 1
    l1, l2, l3, g = 0.17, -0.23, 0.31, 0.21
    q = complex(e_half(g))
    a = e_half(-2 * (l2 + l3)) * q ** (-2 * j + 1 - i)
    b = e_half(2 * l1) * q ** (m - j)
    c = e_half(-2 * l3) * q ** (1 - j)
    d = e_half(-2 * (l2 + l3)) * q ** (1 - m - j)
    e = q ** (-j)
    assert watson_check(a, b, c, d, e, i, q) < 1e-10


def test_sears_trivial():
    q = complex(e_half(0.3))
    # balanced by construction: b3 = q^(1-n) a1 a2 a3 / (b1 b2)
    a1, a2, a3 = 0.3, 0.5, 0.7
    b1, b2 = 0.4, 0.6
    b3 = a1 * a2 * a3 * complex(q) / (b1 * b2)
    assert sears_check(0, a1, a2, a3, b1, b2, b3, q) < 1e-15


def test_sears_rejects_unbalanced():
    q = complex(e_half(0.3))
    with pytest.raises(ValueError):
        sears_check(2, 0.3, 0.5, 0.7, 0.4, 0.6, 0.8, q)


def test_sears_random_draws():
    rng = np.random.default_rng(31)
    count = 0
    while count < 25:
        n = int(rng.integers(0, 7))
        g = float(rng.uniform(0.05, 0.4))
        q = complex(e_half(g))
        us = rng.uniform(-0.45, 0.45, size=5)
        a1, a2, a3, b1, b2 = (complex(e_half(2 * x)) for x in us)
        b3 = q ** (1 - n) * a1 * a2 * a3 / (b1 * b2)
        try:
            resid = sears_check(n, a1, a2, a3, b1, b2, b3, q)
        except (DegenerateSeriesError, ZeroDivisionError):
            continue
        assert resid < 1e-10
        count += 1


def test_sears_substitution_between_balanced_forms():
    # the instance that converts one balanced 4-phi-3 display of the
    # connection entries into the other
    m, i, j = 3, 2, 1
    l1, l2, l3, g = 0.13, -0.29, 0.37, 0.19
    q = complex(e_half(g))
    a1 = q ** (-i)
    a2 = e_half(-2 * (l2 + l3)) * q ** (1 - j - m)
    a3 = e_half(-2 * (l1 + l2)) * q ** (1 - i - m)
    b1 = q ** (-m)
    b2 = e_half(-2 * l2) * q ** (1 - i - j)
    b3 = e_half(-2 * (l1 + l2 + l3)) * q ** (2 - i - j - m)
    assert sears_check(j, a1, a2, a3, b1, b2, b3, q) < 1e-10
