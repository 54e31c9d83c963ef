"""Formal linearization of hyperbolic series by two independent algorithms.

Both compute the unique parabolic series phi with  phi o f = phi + beta:

* a level-by-level solver working directly in the zeta-chart, clearing one
  exponential level at a time with a polynomial difference equation, and
* a Picard iteration in the z-chart built from the operators S and T below,
  converging in the valuation topology.

Agreement of the two routes is the main internal cross-check of the package.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .errors import (
    IterationBudgetExceeded,
    NotHyperbolic,
    OrderTooLow,
    ResonantCoefficient,
)
from .series import (
    CPoly,
    ExpPolySeries,
    add,
    classify,
    compose,
    conjugacy_residual,
    effective_order,
    exp_order,
    format_exponent,
    from_z_chart,
    mul,
    semigroup_points,
    series_to_json,
    to_z_chart,
)

__all__ = [
    "LinearizationResult",
    "solve_difference_eq",
    "linearize_level_by_level",
    "SchroederOperators",
    "S_f",
    "T_f",
    "T_f_inv",
    "picard_linearize",
    "linearize_by_picard",
    "partial_sums",
    "partial_linearization_residual",
    "check_real_preservation",
]


@dataclass(frozen=True)
class LinearizationResult:
    phi: ExpPolySeries          # parabolic: head zeta, all other exponents > 0
    beta: complex
    levels_solved: tuple        # exponents handled, ascending
    residual_ord: object        # Fraction or math.inf in the truncated algebra
    algorithm: str              # 'level_solver' | 'picard'

    def to_json(self) -> dict:
        ro = "inf" if self.residual_ord == math.inf else format_exponent(self.residual_ord)
        return {
            "algorithm": self.algorithm,
            "beta": [self.beta.real, self.beta.imag],
            "levels": [format_exponent(v) for v in self.levels_solved],
            "residual_ord": ro,
            "phi": series_to_json(self.phi),
        }


def solve_difference_eq(P: CPoly, c: complex, beta: complex, check_tol: float = 1e-10) -> CPoly:
    """Unique polynomial Q with Q(x) - c*Q(x + beta) = P(x), for c != 1.

    Descending-degree back-substitution: the top coefficient satisfies
    (1-c) q_d = p_d, lower ones absorb the binomial terms of Q(x + beta).
    The result is substituted back and must reproduce P to `check_tol`
    relative to the size of the substitution's own terms (the binomial shift
    amplifies coefficients by powers of |beta|, which bounds the attainable
    absolute accuracy in doubles).
    """
    if abs(c - 1.0) < 1e-14:
        raise ResonantCoefficient(f"difference equation is resonant: c = {c}")
    if P.is_zero:
        return CPoly()
    D = P.degree
    q = [0j] * (D + 1)
    bpow = [1.0 + 0j] * (D + 1)
    for k in range(1, D + 1):
        bpow[k] = bpow[k - 1] * complex(beta)
    for d in range(D, -1, -1):
        s = P.coeff(d)
        for e in range(d + 1, D + 1):
            s += c * q[e] * comb(e, d) * bpow[e - d]
        q[d] = s / (1.0 - c)
    Q = CPoly(q)
    shifted = Q.shift(beta).scale(c)
    err = (Q - shifted - P).max_abs()
    scale = max(1.0, P.max_abs(), Q.max_abs(), shifted.max_abs())
    if err > check_tol * scale:
        raise ArithmeticError(f"difference-equation back-substitution check failed: {err}")
    return Q


def _hyperbolic_beta(f: ExpPolySeries, tol: float = 1e-9) -> complex:
    form = classify(f, tol)
    if form.kind != "hyperbolic":
        raise NotHyperbolic(f"expected hyperbolic head, found {form.kind} (beta = {form.beta})")
    return form.beta


def linearize_level_by_level(f: ExpPolySeries, tol: float = 1e-12) -> LinearizationResult:
    """Zeta-chart solver: clear the conjugacy residual one exponent at a time.

    With phi = zeta the residual is exactly the perturbation of f.  Adding
    e^{-nu*zeta} Q to phi changes the residual block at nu by
    exp(-nu*beta) Q(. + beta) - Q, so the level equation is

        Q - exp(-nu*beta) * Q(. + beta) = P_nu,

    never resonant since |exp(-nu*beta)| < 1 for nu > 0, Re(beta) > 0.
    Levels are swept in ascending semigroup order, which is exact
    back-substitution: a solved level is never touched again.
    """
    beta = _hyperbolic_beta(f)
    N, gens = f.trunc, f.gens
    phi = ExpPolySeries.affine(0.0, N, gens)
    r = f.tail()  # conjugacy_residual(zeta, f, beta), exactly
    levels = sorted(v for v in semigroup_points(gens, N) if v > 0)
    solved = []
    for nu in levels:
        P = r.block(nu)
        if P.is_zero:
            continue
        c = cmath.exp(-float(nu) * beta)
        assert abs(c) < 1.0
        Q = solve_difference_eq(P, c, beta)
        term = ExpPolySeries(N, gens, {nu: Q})
        phi = add(phi, term)
        r = add(r, compose(term, f) - term)
        solved.append(nu)
    scale = max(1.0, f.max_abs_coeff(), phi.max_abs_coeff())
    return LinearizationResult(
        phi=phi,
        beta=beta,
        levels_solved=tuple(solved),
        residual_ord=effective_order(r, tol * scale),
        algorithm="level_solver",
    )


# ---------------------------------------------------------------------------
# z-chart operators and the Picard route

def _euler(h: ExpPolySeries) -> ExpPolySeries:
    """z d/dz in the z-chart: block (alpha, R) -> (alpha, alpha*R - R')."""
    acc = {}
    for m, b in h.terms:
        nb = b.scale(float(m)) - b.deriv()
        if not nb.is_zero:
            acc[m] = nb
    return h._raw(acc)


def _at_lambda_z(h: ExpPolySeries, beta: complex) -> ExpPolySeries:
    """h(lambda*z): z^a -> exp(-a*beta) z^a and blocks shift by beta."""
    acc = {}
    for m, b in h.terms:
        nb = b.shift(beta).scale(cmath.exp(-float(m) * beta))
        if not nb.is_zero:
            acc[m] = nb
    return h._raw(acc)


class SchroederOperators:
    """The operators attached to a hyperbolic z-chart series f1 = lambda*z + g1.

    S(h) = (1/lambda) * (g1 + sum_{i>=1} h^(i)(lambda z) g1^i / i!)
    T(h) = h - (1/lambda) h(lambda z)

    T acts blockwise as R -> R - exp(-(nu-1) beta) R(. + beta) on the block of
    index nu, which makes its inverse a family of difference equations with
    coefficient strictly inside the unit circle for nu > 1.
    """

    def __init__(self, f1: ExpPolySeries, beta: complex | None = None, tol: float = 1e-9):
        if f1.terms and f1.terms[0][0] < 1:
            raise NotHyperbolic("z-chart series must have order >= 1")
        b1 = f1.block(1)
        if b1.degree != 0:
            raise NotHyperbolic("z-chart head block must be a nonzero constant")
        lam = b1.coeffs[0]
        if not 0 < abs(lam) < 1:
            raise NotHyperbolic(f"multiplier must satisfy 0 < |lambda| < 1, got {lam}")
        if beta is None:
            beta = -cmath.log(lam)
        elif abs(cmath.exp(-beta) - lam) > tol * max(1.0, abs(lam)):
            raise NotHyperbolic("beta inconsistent with the multiplier")
        g1 = f1._raw({m: b for m, b in f1.terms if m != 1})
        if not g1.is_zero and exp_order(g1) <= 1:
            raise OrderTooLow("perturbation must have z-order > 1")
        self.f1 = f1
        self.lam = lam
        self.beta = beta
        self.trunc = f1.trunc
        self.g1 = g1
        # g1/z: exponents in the carrier stay >= 0; powers are cached since
        # every S application reuses them
        gens = f1.gens
        self._g_shift = ExpPolySeries(self.trunc - 1, gens, {m - 1: b for m, b in g1.terms})
        self._g_pows = [None, self._g_shift]

    def _g_pow(self, i: int) -> ExpPolySeries:
        while len(self._g_pows) <= i:
            # exact to trunc despite factor truncations: each extra factor has
            # positive order, see the estimate in s_apply
            self._g_pows.append(mul(self._g_pows[-1], self._g_shift, out_trunc=self.trunc))
        return self._g_pows[i]

    def s_apply(self, h: ExpPolySeries) -> ExpPolySeries:
        acc = self.g1.scale_div(self.lam)
        if h.is_zero:
            return acc
        if exp_order(h) <= 1:
            raise OrderTooLow("S requires z-order > 1")
        if self._g_shift.is_zero:
            return acc
        d = exp_order(self._g_shift)
        # w_i = z^i h^(i) stays in nonnegative exponents: w_0 = h and
        # w_{i+1} = z (w_i)' - i w_i.  Then
        #   h^(i)(lambda z) g1^i = exp(i beta) w_i(lambda z) (g1/z)^i,
        # a product exact to the full truncation since ord(g1/z) = d > 0.
        w = h
        i = 1
        while 1 + i * d <= self.trunc:
            w = _euler(w) - w.scale(float(i - 1))
            if w.is_zero:
                break
            coeff = cmath.exp(complex(i) * self.beta) / (factorial(i) * self.lam)
            term = mul(_at_lambda_z(w, self.beta), self._g_pow(i), out_trunc=self.trunc)
            acc = add(acc, term.scale(coeff))
            i += 1
        return acc

    def t_apply(self, h: ExpPolySeries) -> ExpPolySeries:
        acc = {}
        for m, b in h.terms:
            c = cmath.exp(-float(m - 1) * self.beta)
            nb = b - b.shift(self.beta).scale(c)
            if not nb.is_zero:
                acc[m] = nb
        return h._raw(acc)

    def t_inv(self, h: ExpPolySeries) -> ExpPolySeries:
        if not h.is_zero and exp_order(h) <= 1:
            raise OrderTooLow("T^-1 requires z-order > 1")
        acc = {}
        for m, b in h.terms:
            c = cmath.exp(-float(m - 1) * self.beta)
            assert abs(c) < 1.0  # m > 1 and Re(beta) > 0
            acc[m] = solve_difference_eq(b, c, self.beta)
        return h._raw(acc)


def S_f(h: ExpPolySeries, f1: ExpPolySeries, beta: complex | None = None) -> ExpPolySeries:
    return SchroederOperators(f1, beta).s_apply(h)


def T_f(h: ExpPolySeries, f1: ExpPolySeries, beta: complex | None = None) -> ExpPolySeries:
    return SchroederOperators(f1, beta).t_apply(h)


def T_f_inv(h: ExpPolySeries, f1: ExpPolySeries, beta: complex | None = None) -> ExpPolySeries:
    return SchroederOperators(f1, beta).t_inv(h)


def picard_linearize(
    f1: ExpPolySeries,
    beta: complex | None = None,
    tol: float = 1e-12,
    gens_out=None,
) -> LinearizationResult:
    """z-chart route: iterate psi <- T^-1(S(psi)) from 0 until stationary.

    The order of psi_{n+1} - psi_n increases strictly through the semigroup,
    so stationarity at the truncation order is guaranteed; the budget is a
    bug guard, not a convergence knob.  The fixed point gives phi1 = z + psi
    with phi1 o f1 = lambda*phi1; converting back to the zeta-chart yields
    the parabolic linearization, verified there against f.
    """
    ops = SchroederOperators(f1, beta)
    n_levels = sum(1 for v in semigroup_points(f1.gens, f1.trunc) if v > 1)
    budget = max(4 * n_levels, 8)
    psi = ExpPolySeries.zero(f1.trunc, f1.gens)
    scale = max(1.0, f1.max_abs_coeff())
    for _ in range(budget):
        nxt = ops.t_inv(ops.s_apply(psi))
        diff = nxt - psi
        psi = nxt
        scale = max(scale, psi.max_abs_coeff())
        if diff.max_abs_coeff() <= tol * scale:
            break
    else:
        raise IterationBudgetExceeded(f"Picard iteration not stationary after {budget} steps")
    phi1 = add(psi, ExpPolySeries(f1.trunc, f1.gens, {Fraction(1): CPoly([1.0])}))
    phi = from_z_chart(phi1)  # parabolic head: multiplier 1, beta 0
    if gens_out is not None:
        phi = phi.with_gens(gens_out)
    f_zeta = from_z_chart(f1, beta=ops.beta)
    if gens_out is not None:
        f_zeta = f_zeta.with_gens(gens_out)
    r = conjugacy_residual(phi, f_zeta, ops.beta)
    res_ord = effective_order(r, tol * max(scale, phi.max_abs_coeff()) * 100)
    levels = tuple(m for m, _ in phi.terms if m > 0)
    return LinearizationResult(
        phi=phi,
        beta=ops.beta,
        levels_solved=levels,
        residual_ord=res_ord,
        algorithm="picard",
    )


def linearize_by_picard(f: ExpPolySeries, tol: float = 1e-12) -> LinearizationResult:
    """Convenience pipeline: zeta-chart f -> z-chart -> Picard -> zeta-chart."""
    beta = _hyperbolic_beta(f)
    f1 = to_z_chart(f)
    return picard_linearize(f1, beta=beta, tol=tol, gens_out=f.gens)


# ---------------------------------------------------------------------------
# partial sums and their approximate-conjugacy residuals

def partial_sums(phi: ExpPolySeries, n: int) -> ExpPolySeries:
    """First n exponential levels of a parabolic series; n = 0 gives zeta."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    levels = [m for m, _ in phi.terms if m > 0][:n]
    keep = set(levels) | {Fraction(0)}
    return phi._raw({m: b for m, b in phi.terms if m in keep})


def partial_linearization_residual(
    f: ExpPolySeries,
    n: int,
    phi: ExpPolySeries | None = None,
    tol: float = 1e-12,
) -> ExpPolySeries:
    """Residual of the n-th partial linearization: compose(phi_n, f) - phi_n - beta.

    Its effective order must exceed the n-th solved exponent (0 for n = 0);
    violation is raised since it falsifies the construction.
    """
    beta = _hyperbolic_beta(f)
    if phi is None:
        phi = linearize_level_by_level(f, tol=tol).phi
    phi_n = partial_sums(phi, n)
    r = conjugacy_residual(phi_n, f, beta)
    levels = [m for m, _ in phi.terms if m > 0]
    beta_n = levels[n - 1] if 0 < n <= len(levels) else (levels[-1] if levels and n > 0 else Fraction(0))
    scale = max(1.0, f.max_abs_coeff(), phi.max_abs_coeff())
    if effective_order(r, tol * scale) <= beta_n:
        raise ArithmeticError(
            f"partial residual order {effective_order(r, tol * scale)} not beyond level {beta_n}"
        )
    return r


def check_real_preservation(f: ExpPolySeries, tol: float = 1e-12) -> bool:
    """True iff the linearization of a real hyperbolic series is real."""
    if f.max_imag_coeff() != 0.0:
        raise ValueError("precondition: f must have all-real coefficients")
    result = linearize_level_by_level(f)
    return result.phi.max_imag_coeff() <= tol
