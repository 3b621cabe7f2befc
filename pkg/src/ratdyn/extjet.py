"""Finite-dimensional realizations of the vector-field equalizer v -> f*v - df v.

Globally, a vector field v d/dz with polynomial v of degree <= 2 is a
global section of the tangent sheaf; pulling back along f = P/Q and
clearing denominators realizes the equalizer as a 3 x (2d+1) matrix whose
kernel/cokernel dimensions match the cohomological count (1,1 in degree
one, 0 and 2d-2 otherwise).

At a cycle, the same operator acts on polynomial jets through the local
first-return series g:  A(v) = v(g(z)) - g'(z) v(z), truncated at jet
order N.  Truncation alone distorts the dimensions (the operator shifts
valuations), so the two numbers are extracted differently:

* cokernel at order N: corank of the square truncation A_N, which is
  exact once N passes the resonance window;
* kernel at order N: a jet is a genuine kernel direction only if it
  extends to higher order, so the kernel of a deeper truncation A_M
  (M = N + padding) is computed first and then projected down to order N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import rank_nullity, nullspace, ALGEBRAIC_TOL
from .parabolic import local_return_series, _self_compose
from .ratmap import RationalMap, _as_point
from .series import TruncatedSeries

FULL_JETS = "FullJets"
TWO_JETS = "TwoJets"


@dataclass
class JetSpec:
    """Where and how to truncate: site 'global' or a cycle point with period p."""

    site: str = "global"
    point: object = None
    period: int = 1
    order: int = 6
    jet_kind: str = FULL_JETS


def global_e1(f: RationalMap):
    """(matrix, kernel_dim, cokernel_dim) of the global equalizer.

    Columns are the images of 1, z, z^2; the image of v is
    v(P/Q) Q^2 - (P'Q - PQ') v, written in the monomial basis of degree
    <= 2d polynomials.
    """
    p, q = f.num, f.den
    d = f.degree
    wron = p.derivative() * q - p * q.derivative()
    basis = []
    pq_powers = [q * q, p * q, p * p]  # v = 1, z, z^2 composed with f, times Q^2
    zpow = [np.array([1.0]), np.array([0.0, 1.0]), np.array([0.0, 0.0, 1.0])]
    for j in range(3):
        img = pq_powers[j] - wron * _mono(j)
        col = np.zeros(2 * d + 1, dtype=complex)
        col[: len(img.coeffs)] = img.coeffs
        basis.append(col)
    mat = np.stack(basis, axis=1)
    _, ker, coker = rank_nullity(_colnorm(mat))
    return mat, ker, coker


def _colnorm(mat):
    """Scale each nonzero column to unit max magnitude.

    Column scaling preserves rank (and the dimension of any coordinate
    projection of the nullspace) but keeps badly scaled maps — e.g. a
    tiny leading coefficient — from fooling the relative SVD tolerance.
    """
    scale = np.max(np.abs(mat), axis=0)
    scale[scale == 0] = 1.0
    return mat / scale


def _mono(j):
    from .kernel import Polynomial

    c = np.zeros(j + 1)
    c[j] = 1.0
    return Polynomial(c)


def _jet_matrix(g: TruncatedSeries, N):
    """(N+1) x (N+1) matrix of v -> v(g) - g' v on jets of order N."""
    gp = g.derivative().truncate(N)
    cols = []
    power = TruncatedSeries([1.0], order=N)
    gN = g.truncate(N)
    for j in range(N + 1):
        mono = TruncatedSeries(np.eye(1, N + 1, j)[0], order=N)
        img = power - gp * mono
        cols.append(img.c.copy())
        power = power * gN
    return np.stack(cols, axis=1)


def jet_e1_series(g_order_M, N, pad=None, tol=ALGEBRAIC_TOL):
    """(kernel_dim, cokernel_dim) of the jet equalizer from a local series.

    g_order_M must be truncated at order >= N + pad.
    """
    if pad is None:
        pad = max(N, 4)
    M = N + pad
    if g_order_M.order < M:
        raise ValueError(f"series order {g_order_M.order} below required {M}")
    a_n = _jet_matrix(g_order_M, N)
    _, _, coker = rank_nullity(_colnorm(a_n), tol)
    a_m = _jet_matrix(g_order_M, M)
    null = nullspace(_colnorm(a_m), tol)
    if null.shape[1] == 0:
        ker = 0
    else:
        # dimension of the image of the deep nullspace inside order-N jets
        ker = rank_nullity(null[: N + 1, :], tol)[0]
    return ker, coker


def jet_e1(f: RationalMap, spec: JetSpec, r=1, tol=ALGEBRAIC_TOL):
    """Jet equalizer dimensions at a cycle site, with a stabilization flag.

    The local operator is that of the first return f^(period * r) at the
    given cycle point (r > 1 folds in a root-of-unity multiplier).
    Returns (kernel_dim, cokernel_dim, stabilized).
    """
    if spec.site == "global":
        _, ker, coker = global_e1(f)
        return ker, coker, True
    N = 1 if spec.jet_kind == TWO_JETS else spec.order
    pad = max(N, 4)
    M = N + pad
    g = local_return_series(f, _as_point(spec.point), spec.period, M + 2)
    if r > 1:
        g = _self_compose(g, r)
    ker, coker = jet_e1_series(g, N, pad, tol)
    if N >= 2:
        ker_prev, coker_prev = jet_e1_series(g, N - 1, pad + 1, tol)
        stabilized = (ker, coker) == (ker_prev, coker_prev)
    else:
        stabilized = False
    return ker, coker, stabilized
