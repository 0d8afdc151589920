"""Gradient-based refinement of network weights found by the global search.

Six methods share one driver: resilient propagation (rp), one-step
secant (oss), plain gradient descent (gd), gradient descent with
momentum (gdm), gradient descent with an adaptive rate (gda), and
Polak-Ribiere conjugate gradients (cgpr). All of them descend the MSE
surrogate; the driver tracks the best iterate by classification error
(MSE as tiebreak) and returns that, never the last iterate.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ContractError, ParameterError
from .mlp import Dataset, MlpTopology, classification_error, mse_loss, mse_loss_and_gradient

__all__ = [
    "METHODS",
    "LocalSearchConfig",
    "RefineResult",
    "RpState",
    "OssState",
    "CgprState",
    "GdaDecision",
    "step_rp",
    "step_gd",
    "step_gdm",
    "step_gda",
    "step_oss",
    "step_cgpr",
    "backtracking_line_search",
    "refine",
]

METHODS = ("rp", "oss", "gd", "gdm", "gda", "cgpr")

# Gradient components below this are treated as exactly zero.
GRAD_TOL = 1e-12


@dataclass(frozen=True)
class LocalSearchConfig:
    """Settings shared by the refinement methods.

    Only the fields a method reads affect it: the rp_* fields drive rp,
    momentum drives gdm, the gda_* fields drive gda, and the line-search
    fields drive oss and cgpr.
    """

    method: str = "rp"
    epochs: int = 500
    patience: int = 50
    learning_rate: float = 0.5
    momentum: float = 0.9
    rp_increase: float = 1.2
    rp_decrease: float = 0.5
    rp_step_init: float = 0.1
    rp_step_min: float = 1e-6
    rp_step_max: float = 50.0
    gda_increase: float = 1.05
    gda_decrease: float = 0.7
    gda_max_loss_increase: float = 0.04
    armijo_c1: float = 1e-4
    backtrack_shrink: float = 0.5
    max_backtracks: int = 30

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterError(
                f"unknown method {self.method!r}, expected one of {METHODS}"
            )
        if self.epochs < 1 or self.patience < 1:
            raise ParameterError("epochs and patience must be >= 1")
        if not (self.learning_rate > 0):
            raise ParameterError("learning rate must be positive")
        if not (0 <= self.momentum < 1):
            raise ParameterError(f"momentum must be in [0, 1), got {self.momentum}")
        if not (0 < self.rp_decrease < 1 < self.rp_increase):
            raise ParameterError(
                "rp factors must satisfy 0 < decrease < 1 < increase"
            )
        if not (0 < self.rp_step_min <= self.rp_step_init <= self.rp_step_max):
            raise ParameterError("rp step sizes must be ordered min <= init <= max")
        if not (0 < self.gda_decrease < 1 < self.gda_increase):
            raise ParameterError(
                "gda factors must satisfy 0 < decrease < 1 < increase"
            )
        if not (0 < self.backtrack_shrink < 1):
            raise ParameterError("backtrack shrink must be in (0, 1)")


@dataclass(frozen=True)
class RefineResult:
    """Outcome of one refinement run."""

    params: np.ndarray
    final_train_error: float
    loss_history: np.ndarray
    error_history: np.ndarray


class RpState(NamedTuple):
    weights: np.ndarray
    step_sizes: np.ndarray
    prev_grad: np.ndarray


class GdmState(NamedTuple):
    weights: np.ndarray
    velocity: np.ndarray


class GdaDecision(NamedTuple):
    learning_rate: float
    accept: bool


class OssState(NamedTuple):
    step: np.ndarray | None
    grad_change: np.ndarray | None


class CgprState(NamedTuple):
    prev_grad: np.ndarray | None
    prev_direction: np.ndarray | None
    since_restart: int
    restart_period: int


def step_rp(state: RpState, gradient: np.ndarray, config: LocalSearchConfig) -> RpState:
    """One resilient-propagation update.

    Per weight, the step size grows when the gradient keeps its sign,
    shrinks when it flips, and stays put when either gradient is zero;
    the weight then moves by the step size against the gradient's sign.
    Only the sign of the gradient is used, never its magnitude.
    """
    product = state.prev_grad * gradient
    steps = state.step_sizes.copy()
    steps[product > 0] = np.minimum(steps[product > 0] * config.rp_increase,
                                    config.rp_step_max)
    steps[product < 0] = np.maximum(steps[product < 0] * config.rp_decrease,
                                    config.rp_step_min)
    weights = state.weights - np.sign(gradient) * steps
    return RpState(weights, steps, gradient.copy())


def step_gd(weights: np.ndarray, gradient: np.ndarray, learning_rate: float) -> np.ndarray:
    """Plain steepest-descent update."""
    return weights - learning_rate * gradient


def step_gdm(state: GdmState, gradient: np.ndarray, learning_rate: float,
             momentum: float) -> GdmState:
    """Momentum update; with momentum 0 this is exactly step_gd."""
    velocity = momentum * state.velocity + learning_rate * (1.0 - momentum) * gradient
    return GdmState(state.weights - velocity, velocity)


def step_gda(learning_rate: float, loss_now: float, loss_prev: float,
             config: LocalSearchConfig) -> GdaDecision:
    """Adaptive-rate rule: grow on improvement, shrink and reject on blow-up.

    A loss increase within the tolerance band is accepted with the rate
    unchanged, so the trajectory can cross small ridges.
    """
    if loss_now < loss_prev:
        return GdaDecision(learning_rate * config.gda_increase, True)
    if loss_now > loss_prev * (1.0 + config.gda_max_loss_increase):
        return GdaDecision(learning_rate * config.gda_decrease, False)
    return GdaDecision(learning_rate, True)


def step_oss(state: OssState, gradient: np.ndarray) -> np.ndarray:
    """One-step secant search direction.

    Combines the negative gradient with the previous step s and gradient
    change y through the two secant scalars. Degenerate curvature
    (|s.y| below 1e-12) resets to steepest descent, as does the first
    call.
    """
    if state.step is None or state.grad_change is None:
        return -gradient
    s, y = state.step, state.grad_change
    sty = float(s @ y)
    if abs(sty) < 1e-12:
        return -gradient
    b_c = float(s @ gradient) / sty
    a_c = -(1.0 + float(y @ y) / sty) * b_c + float(y @ gradient) / sty
    return -gradient + a_c * s + b_c * y


def step_cgpr(state: CgprState, gradient: np.ndarray):
    """Polak-Ribiere conjugate direction with restarts.

    The mixing coefficient is clipped at zero and the direction resets
    to steepest descent periodically, so a poorly conditioned history
    can never push the search uphill for long.

    Returns:
        (direction, next state)
    """
    restart = (
        state.prev_grad is None
        or state.prev_direction is None
        or state.since_restart >= state.restart_period
    )
    if not restart:
        denom = float(state.prev_grad @ state.prev_grad)
        if denom == 0.0:
            return np.zeros_like(gradient), CgprState(
                gradient.copy(), np.zeros_like(gradient), 0, state.restart_period
            )
        beta = float((gradient - state.prev_grad) @ gradient) / denom
        beta = max(beta, 0.0)
        direction = -gradient + beta * state.prev_direction
    else:
        direction = -gradient
    return direction, CgprState(
        gradient.copy(), direction.copy(),
        0 if restart else state.since_restart + 1,
        state.restart_period,
    )


def backtracking_line_search(f, x: np.ndarray, d: np.ndarray, g: np.ndarray,
                             config: LocalSearchConfig = LocalSearchConfig()) -> float:
    """Largest halved step satisfying the sufficient-decrease condition.

    Tries a = 1, then shrinks up to max_backtracks times; returns 0 when
    even the smallest step fails the test.
    """
    slope = float(g @ d)
    if slope >= 0:
        raise ContractError("line search requires a descent direction")
    f0 = f(x)
    a = 1.0
    for _ in range(config.max_backtracks + 1):
        if f(x + a * d) <= f0 + config.armijo_c1 * a * slope:
            return a
        a *= config.backtrack_shrink
    return 0.0


class _BestTracker:
    """Keeps the iterate with the lowest classification error, MSE tiebreak."""

    def __init__(self, params, error, loss):
        self.params = np.array(params, dtype=float)
        self.error = error
        self.loss = loss

    def offer(self, params, error, loss) -> bool:
        """Record params if better; True when classification error dropped."""
        improved_error = error < self.error
        if improved_error or (error == self.error and loss < self.loss):
            self.params = np.array(params, dtype=float)
            self.error = error
            self.loss = loss
        return improved_error


def refine(initial, topology: MlpTopology, data: Dataset,
           config: LocalSearchConfig) -> RefineResult:
    """Run the configured method from the given weights.

    The starting point is used exactly as passed, never re-randomized,
    and the returned weights are the best iterate encountered, so the
    result is never worse than the initialization on the training data.
    Stops early at a stationary point or after `patience` epochs without
    a drop in classification error.
    """
    w = np.array(initial, dtype=float)
    if w.shape != (topology.param_count,):
        raise ParameterError(
            f"expected {topology.param_count} weights, got {w.shape}"
        )

    def loss_at(params):
        return mse_loss(params, topology, data)

    loss, grad = mse_loss_and_gradient(w, topology, data)
    error = classification_error(w, topology, data)
    best = _BestTracker(w, error, loss)
    loss_history = [loss]
    error_history = [error]

    rp_state = RpState(w, np.full(w.size, config.rp_step_init), np.zeros_like(w))
    gdm_state = GdmState(w, np.zeros_like(w))
    oss_state = OssState(None, None)
    cgpr_state = CgprState(None, None, 0, topology.param_count)
    gda_rate = config.learning_rate

    stale_epochs = 0
    for _ in range(config.epochs - 1):
        if np.max(np.abs(grad)) < GRAD_TOL:
            break

        if config.method == "rp":
            rp_state = step_rp(rp_state, grad, config)
            w_next = rp_state.weights
        elif config.method == "gd":
            w_next = step_gd(w, grad, config.learning_rate)
        elif config.method == "gdm":
            gdm_state = step_gdm(gdm_state, grad, config.learning_rate,
                                 config.momentum)
            w_next = gdm_state.weights
        elif config.method == "gda":
            proposed = w - gda_rate * grad
            decision = step_gda(gda_rate, loss_at(proposed), loss, config)
            gda_rate = decision.learning_rate
            w_next = proposed if decision.accept else w
        elif config.method == "oss":
            d = step_oss(oss_state, grad)
            if float(grad @ d) >= 0:
                d = -grad
            a = backtracking_line_search(loss_at, w, d, grad, config)
            if a == 0.0:
                break
            w_next = w + a * d
        else:
            d, cgpr_state = step_cgpr(cgpr_state, grad)
            if float(grad @ d) >= 0:
                # Restart: a conjugate direction that fails the descent
                # test must not stay in the history.
                d = -grad
                cgpr_state = CgprState(grad.copy(), d.copy(), 0,
                                       cgpr_state.restart_period)
            a = backtracking_line_search(loss_at, w, d, grad, config)
            if a == 0.0:
                break
            w_next = w + a * d

        loss_next, grad_next = mse_loss_and_gradient(w_next, topology, data)
        if config.method == "oss":
            oss_state = OssState(w_next - w, grad_next - grad)
        w, loss, grad = w_next, loss_next, grad_next

        error = classification_error(w, topology, data)
        loss_history.append(loss)
        error_history.append(error)
        if best.offer(w, error, loss):
            stale_epochs = 0
        else:
            stale_epochs += 1
            if stale_epochs >= config.patience:
                break

    return RefineResult(
        params=best.params,
        final_train_error=best.error,
        loss_history=np.array(loss_history),
        error_history=np.array(error_history),
    )
