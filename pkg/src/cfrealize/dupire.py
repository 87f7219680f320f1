"""Numeric horizontal/vertical derivatives of causal path functionals and
Monte Carlo residual checks of the functional change-of-variable formula.

Discretized paths are read as piecewise-constant cadlag trajectories: the
value on [t_j, t_{j+1}) is the grid value at t_j.  That makes the vertical
bump (adding h to one channel from a grid time onward) exactly representable
and makes left-endpoint quadrature exact for the running-integral
functional.  The horizontal derivative extends the stopped path by whole
grid cells, avoiding any interpolation semantics.

Registered functionals evaluate at a grid index using only values up to that
index; causality is therefore structural and is also asserted by randomized
tail-perturbation tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError
from .paths import QSpec, SamplePath, replicate_seed, sample_brownian
from .symdiff import AnalyticModel, MultiPoly, compile_float, lie_derivative


class CausalFunctional:
    """Evaluation contract: value at grid index j from values[: j + 1].

    Subclasses must be causal: the value at index j may not depend on any
    grid value strictly after j.
    """

    name = "functional"

    def value(self, grid: np.ndarray, values: np.ndarray, j: int) -> float:
        raise NotImplementedError


class MemorylessFunctional(CausalFunctional):
    """F(t, w) = f(t, w(t)) for a polynomial f in (t, x_1..x_m)."""

    def __init__(self, f: MultiPoly, m: int):
        if f.num_vars != m + 1:
            raise ValueError(f"f must have {m + 1} variables (t, x1..x{m})")
        self.m = m
        self.f = f
        self._ev = compile_float(f)
        self.name = "memoryless"

    def value(self, grid, values, j):
        return self._ev((float(grid[j]), *map(float, values[j])))


class RunningIntegralFunctional(CausalFunctional):
    """F(t, w) = integral of w_i over [0, t] (left-endpoint exact for
    piecewise-constant paths)."""

    def __init__(self, channel: int = 1):
        if channel < 1:
            raise ValueError("channel is 1-based")
        self.channel = channel
        self.name = f"running_integral_{channel}"

    def value(self, grid, values, j):
        if j == 0:
            return 0.0
        dt = np.diff(grid[: j + 1])
        return float(np.dot(values[:j, self.channel - 1], dt))


class LinearFilterFunctional(CausalFunctional):
    """F(t, w) = integral of kernel(t - s) dw_i(s) over [0, t], discretized
    with left-endpoint kernel weights on each increment."""

    def __init__(self, kernel: MultiPoly, channel: int = 1):
        if kernel.num_vars != 1:
            raise ValueError("kernel must be a one-variable polynomial")
        self.kernel = kernel
        self._kv = compile_float(kernel)
        self.channel = channel
        self.name = f"linear_filter_{channel}"

    def value(self, grid, values, j):
        if j == 0:
            return 0.0
        t = float(grid[j])
        dw = np.diff(values[: j + 1, self.channel - 1])
        weights = np.array([self._kv((t - float(s),)) for s in grid[:j]])
        return float(np.dot(weights, dw))


def stopped_values(values: np.ndarray, j: int) -> np.ndarray:
    """Values of the path stopped at grid index j (frozen afterwards)."""
    out = values.copy()
    out[j + 1 :] = values[j]
    return out


def stop_path(path: SamplePath, j: int) -> SamplePath:
    """The stopped path as a path object (constant from index j on)."""
    return SamplePath(path.grid, stopped_values(path.values, j), path.q)


def bumped_values(values: np.ndarray, j: int, channel: int, h: float) -> np.ndarray:
    """Values of the path bumped by h on channel (1-based) from index j on."""
    out = values.copy()
    out[j:, channel - 1] += h
    return out


def default_bump(path: SamplePath) -> float:
    """Default bump size sqrt(dt) scaled by the path amplitude."""
    dt = float(np.min(np.diff(path.grid)))
    amp = float(np.max(np.abs(path.values))) if path.values.size else 0.0
    return np.sqrt(dt) * max(1.0, amp)


def horizontal_derivative(f: CausalFunctional, path: SamplePath, j: int, cells: int = 1) -> float:
    """Forward difference of f along the stopped path, advancing by whole
    grid cells."""
    if cells < 1:
        raise ValueError("cells must be >= 1")
    if j + cells >= path.grid.size:
        raise ValueError("horizontal step runs past the horizon")
    stopped = stopped_values(path.values, j)
    num = f.value(path.grid, stopped, j + cells) - f.value(path.grid, path.values, j)
    return num / (float(path.grid[j + cells]) - float(path.grid[j]))


def vertical_derivative(
    f: CausalFunctional,
    path: SamplePath,
    j: int,
    channel: int,
    h: float | None = None,
    scheme: str = "central",
) -> float:
    """Difference quotient under the bump h * 1_[t_j, T] on one channel.

    ``scheme="central"`` (default) uses symmetric bumps; ``"forward"`` is the
    one-sided quotient matching the defining limit.
    """
    if h is None:
        h = default_bump(path)
    up = f.value(path.grid, bumped_values(path.values, j, channel, h), j)
    if scheme == "forward":
        base = f.value(path.grid, path.values, j)
        return (up - base) / h
    if scheme == "central":
        dn = f.value(path.grid, bumped_values(path.values, j, channel, -h), j)
        return (up - dn) / (2.0 * h)
    raise ValueError(f"unknown scheme {scheme!r}")


def second_vertical_derivative(
    f: CausalFunctional,
    path: SamplePath,
    j: int,
    channel_i: int,
    channel_j: int,
    h: float | None = None,
) -> float:
    """Nested bump estimate of the (i, j) second vertical derivative.

    The inner bump is applied on channel_j and the outer on channel_i,
    matching the operator order of iterated derivatives.  The estimator's
    noise floor scales like eps / h^2; quantitative residual checks should
    stick to functionals with classical second derivatives.
    """
    if h is None:
        h = default_bump(path)
    vals = path.values
    if channel_i == channel_j:
        up = f.value(path.grid, bumped_values(vals, j, channel_i, h), j)
        mid = f.value(path.grid, vals, j)
        dn = f.value(path.grid, bumped_values(vals, j, channel_i, -h), j)
        return (up - 2.0 * mid + dn) / (h * h)
    pp = f.value(path.grid, bumped_values(bumped_values(vals, j, channel_j, h), j, channel_i, h), j)
    pm = f.value(path.grid, bumped_values(bumped_values(vals, j, channel_j, -h), j, channel_i, h), j)
    mp = f.value(path.grid, bumped_values(bumped_values(vals, j, channel_j, h), j, channel_i, -h), j)
    mm = f.value(path.grid, bumped_values(bumped_values(vals, j, channel_j, -h), j, channel_i, -h), j)
    return (pp - pm - mp + mm) / (4.0 * h * h)


def causality_defect(f: CausalFunctional, path: SamplePath, j: int, seed: int = 0) -> float:
    """Max change of f at index j under random perturbation of the strictly
    later grid values (must be exactly zero for a causal functional)."""
    rng = np.random.default_rng(seed)
    base = f.value(path.grid, path.values, j)
    worst = 0.0
    for _ in range(4):
        perturbed = path.values.copy()
        if j + 1 < perturbed.shape[0]:
            perturbed[j + 1 :] += rng.standard_normal(perturbed[j + 1 :].shape)
        worst = max(worst, abs(f.value(path.grid, perturbed, j) - base))
    return worst


@dataclass(frozen=True)
class ResidualReport:
    """RMS residual of the change-of-variable identity over replicates."""

    functional: str
    form: str
    rms: float
    grid_steps: int
    horizon: float
    bump: float
    replicates: int
    eval_time: float

    def as_dict(self) -> dict:
        return {
            "functional": self.functional,
            "form": self.form,
            "rms": self.rms,
            "grid_steps": self.grid_steps,
            "horizon": self.horizon,
            "bump": self.bump,
            "replicates": self.replicates,
            "eval_time": self.eval_time,
        }


def functional_ito_residual(
    f: CausalFunctional,
    q: QSpec,
    grid,
    t: float,
    replicates: int,
    seed: int,
    form: str = "ito",
    bump: float | None = None,
) -> ResidualReport:
    """RMS over replicates of F(t,W) - F(0,W) minus its discretized
    decomposition into horizontal, stochastic, and quadratic-variation parts.

    The horizontal term uses left-point quadrature with one-cell forward
    differences; the Ito integral uses left-point increments with central
    vertical bumps; the quadratic-variation term pairs second vertical
    derivatives with the left-endpoint covariance rate.  ``form="strat"``
    checks the Stratonovich version instead: the stochastic term then uses
    midpoint (trapezoidal) integrand values and no second-order term.
    """
    if form not in ("ito", "strat"):
        raise ValueError(f"unknown form {form!r}")
    grid = np.asarray(grid, dtype=float)
    m = q.dim
    residuals = np.empty(replicates)
    bump_used = bump
    for rep in range(replicates):
        path = sample_brownian(q, grid, replicate_seed(seed, rep))
        jt = path.index_of(t)
        h = bump if bump is not None else default_bump(path)
        bump_used = h
        vals = path.values
        lhs = f.value(grid, vals, jt) - f.value(grid, vals, 0)
        if not np.isfinite(lhs):
            raise DivergenceError("functional value is not finite")
        horiz = 0.0
        for j in range(jt):
            stopped = stopped_values(vals, j)
            horiz += f.value(grid, stopped, j + 1) - f.value(grid, vals, j)
        stoch = 0.0
        if form == "ito":
            for j in range(jt):
                dw = vals[j + 1] - vals[j]
                for i in range(1, m + 1):
                    stoch += vertical_derivative(f, path, j, i, h) * dw[i - 1]
            qv = 0.0
            for j in range(jt):
                dt = grid[j + 1] - grid[j]
                qmat = q.at(grid[j])
                for i in range(1, m + 1):
                    for k in range(1, m + 1):
                        d2 = second_vertical_derivative(f, path, j, i, k, h)
                        qv += d2 * qmat[k - 1, i - 1] * dt
            rhs = horiz + stoch + 0.5 * qv
        else:
            deriv = np.empty((jt + 1, m))
            for j in range(jt + 1):
                for i in range(1, m + 1):
                    deriv[j, i - 1] = vertical_derivative(f, path, j, i, h)
            dw = np.diff(vals[: jt + 1], axis=0)
            stoch = float(np.sum(0.5 * (deriv[:-1] + deriv[1:]) * dw))
            rhs = horiz + stoch
        residuals[rep] = lhs - rhs
    rms = float(np.sqrt(np.mean(residuals**2)))
    return ResidualReport(
        functional=f.name,
        form=form,
        rms=rms,
        grid_steps=grid.size - 1,
        horizon=float(grid[-1]),
        bump=float(bump_used if bump_used is not None else 0.0),
        replicates=replicates,
        eval_time=float(t),
    )


@dataclass(frozen=True)
class DecompositionReport:
    """RMS reconstruction errors of the first-order decomposition of a model
    output, in both stochastic calculi."""

    strat_rms: float
    ito_rms: float
    grid_steps: int
    horizon: float
    replicates: int

    def as_dict(self) -> dict:
        return {
            "strat_rms": self.strat_rms,
            "ito_rms": self.ito_rms,
            "grid_steps": self.grid_steps,
            "horizon": self.horizon,
            "replicates": self.replicates,
        }


def hijab_decomposition_check(
    model: AnalyticModel, grid, seed: int, replicates: int = 100
) -> DecompositionReport:
    """Verify both first-order integral decompositions of a single-noise
    model output Y = h(X).

    With Z0 = L_{g0} h (X) and Z1 = L_{g1} h (X), the Stratonovich pair
    reconstructs Y from Y(0) + int Z0 dt + int Z1 o dW (trapezoid), and the
    Ito pair replaces Z0 by Z0 + L_{g1} L_{g1} h / 2 evaluated along X with a
    left-point stochastic integral.  Reports terminal RMS errors of both
    reconstructions over replicates driven by unit-covariance noise.
    """
    if model.m != 1:
        raise ValueError("decomposition check requires a single noise channel")
    grid = np.asarray(grid, dtype=float)
    q = QSpec.identity(1)
    z0_poly = lie_derivative(model.fields[0], model.readout)
    z1_poly = lie_derivative(model.fields[1], model.readout)
    z11_poly = lie_derivative(model.fields[1], z1_poly)
    z0 = compile_float(z0_poly)
    z1 = compile_float(z1_poly)
    z11 = compile_float(z11_poly)
    readout = compile_float(model.readout)

    from .paths import simulate_analytic

    err_strat = np.empty(replicates)
    err_ito = np.empty(replicates)
    for rep in range(replicates):
        path = sample_brownian(q, grid, replicate_seed(seed, rep))
        _, states = simulate_analytic(model, path, return_states=True)
        y = np.array([readout(x) for x in states])
        z0_t = np.array([z0(x) for x in states])
        z1_t = np.array([z1(x) for x in states])
        zt0_t = z0_t + 0.5 * np.array([z11(x) for x in states])
        dt = np.diff(grid)
        dw = np.diff(path.values[:, 0])
        strat = y[0] + np.sum(0.5 * (z0_t[:-1] + z0_t[1:]) * dt) + np.sum(
            0.5 * (z1_t[:-1] + z1_t[1:]) * dw
        )
        ito = y[0] + np.sum(zt0_t[:-1] * dt) + np.sum(z1_t[:-1] * dw)
        err_strat[rep] = strat - y[-1]
        err_ito[rep] = ito - y[-1]
    return DecompositionReport(
        strat_rms=float(np.sqrt(np.mean(err_strat**2))),
        ito_rms=float(np.sqrt(np.mean(err_ito**2))),
        grid_steps=grid.size - 1,
        horizon=float(grid[-1]),
        replicates=replicates,
    )


def memoryless_from_state_poly(f: MultiPoly, m: int) -> MemorylessFunctional:
    """Lift a polynomial in the path coordinates (no explicit time) to a
    memoryless functional in (t, x)."""
    lifted = MultiPoly(
        m + 1, {(0,) + exps: c for exps, c in f.terms.items()}
    )
    return MemorylessFunctional(lifted, m)
