"""qconn: connection coefficients of a Selberg-type integral's ODE.

Submodules
----------
qkernel
    Scalar conventions (e(A), s(A), q-brackets), complex Gamma, Selberg
    product, intersection numbers, characteristic exponents, genericity.
qseries
    Terminating basic hypergeometric series, Gauss 2F1, q-Racah
    polynomials, Watson/Sears transformation checks.
connection
    The connection matrices in all equivalent closed forms.
integrals
    Direct numerical evaluation of the underlying period integrals.
hermitian
    Monodromy matrices and invariant Hermitian forms.
cli
    The ``qconn`` command-line front end.
"""

from __future__ import annotations

__version__ = "0.1.0"
