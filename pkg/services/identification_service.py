"""
System identification: output-error and subspace estimation, simulation,
discretization and validation of the identified models.

Subspace estimation follows the past-output MOESP scheme: block-Hankel data
matrices, an LQ factorization that projects out the future inputs, an SVD of
the remaining block for the extended observability matrix, then C and A from
its shift structure and B, D, x0 by linear least squares on the simulation
equations. Poles outside the unit circle can be reflected inside on request,
and stable estimates are polished by Levenberg-Marquardt on the simulation
error. Output-error models start from a common-denominator ARX fit and are
refined by damped Gauss-Newton on the simulation error.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg
from scipy.optimize import linear_sum_assignment
from scipy.signal import lfilter, tf2ss

from models.identification import FitReport, IdentificationConfig, OrderSweepRow
from models.output_error_model import OEChannel, OutputErrorModel
from models.state_space_model import StateSpaceModel
from models.time_series import TimeSeries
from services.signal_service import ZeroPowerSignal, crest_factor, split_halves

logger = logging.getLogger(__name__)

Model = Union[StateSpaceModel, OutputErrorModel]

_NEGATIVE_AXIS_TOL = 1e-12
_MAX_STEP_HALVINGS = 30
_MAX_DAMPING_TRIES = 10
_MAX_REFLECTED_RADIUS = 0.9999
_REFINE_TOLERANCE = 1e-6
_EXACT_FIT = 1e-20


class IdentificationError(Exception):
    """Base class of identification failures."""
    pass


class InsufficientExcitation(IdentificationError):
    """Raised when the data carries too little information for the requested model."""
    pass


class NonConvergence(IdentificationError):
    """Raised (strict mode only) when Gauss-Newton hits its iteration cap."""
    pass


class RankDeficient(IdentificationError):
    """Raised when the projected data matrix has numerical rank below the model order."""
    pass


class DtMismatch(IdentificationError):
    """Raised when a model is simulated on data with another sample period."""
    pass


class LogUndefined(IdentificationError):
    """Raised when the matrix logarithm needed by d2c does not exist as a real matrix."""
    pass


# ---------------------------------------------------------------------------
# Data helpers
# ---------------------------------------------------------------------------

def _stack(series: Sequence[TimeSeries], label: str) -> np.ndarray:
    if not series:
        raise ValueError(f"At least one {label} series is required")
    first = series[0]
    for other in series[1:]:
        if not math.isclose(other.dt, first.dt, rel_tol=1e-12):
            raise DtMismatch(f"{label} '{other.name}' has dt={other.dt}, expected {first.dt}")
        if len(other) != len(first):
            raise ValueError(f"{label} '{other.name}' has {len(other)} samples, expected {len(first)}")
    return np.column_stack([s.values for s in series])


def _check_pair(inputs: Sequence[TimeSeries], outputs: Sequence[TimeSeries]) -> Tuple[np.ndarray, np.ndarray, float]:
    U = _stack(inputs, "input")
    Y = _stack(outputs, "output")
    if not math.isclose(inputs[0].dt, outputs[0].dt, rel_tol=1e-12):
        raise DtMismatch(f"Inputs sampled at dt={inputs[0].dt}, outputs at dt={outputs[0].dt}")
    if U.shape[0] != Y.shape[0]:
        raise ValueError(f"Inputs have {U.shape[0]} samples, outputs {Y.shape[0]}")
    return U, Y, inputs[0].dt


def _scales(data: np.ndarray) -> np.ndarray:
    std = data.std(axis=0)
    return np.where(std > 0, std, 1.0)


def _block_hankel(data: np.ndarray, start: int, rows: int, cols: int) -> np.ndarray:
    return np.vstack([data[start + i:start + i + cols].T for i in range(rows)])


# ---------------------------------------------------------------------------
# Subspace estimation
# ---------------------------------------------------------------------------

def estimate_subspace(inputs: Sequence[TimeSeries], outputs: Sequence[TimeSeries],
                      order: Optional[int] = None,
                      config: Optional[IdentificationConfig] = None) -> StateSpaceModel:
    """
    Estimate a discrete state-space model by subspace projection.

    Args:
        inputs: Input series (shared dt and length)
        outputs: Output series on the same grid
        order: State dimension; defaults to config.order
        config: Estimator settings

    Returns:
        Discrete StateSpaceModel; metadata holds the singular values, horizon and the
        estimated initial state of the estimation data

    Raises:
        InsufficientExcitation: If there are too few samples for the order and horizon
        RankDeficient: If the projected data matrix has rank below the order
    """
    config = config or IdentificationConfig()
    n = int(order if order is not None else config.order)
    U, Y, dt = _check_pair(inputs, outputs)
    N, m = U.shape
    p = Y.shape[1]
    s = config.horizon_for(n)

    if N < 10 * n * (m + p):
        raise InsufficientExcitation(
            f"{N} samples are too few for order {n} with {m} inputs and {p} outputs "
            f"(need {10 * n * (m + p)})")
    cols = N - 2 * s + 1
    if cols < 2 * s * (m + p):
        raise InsufficientExcitation(f"{N} samples are too few for horizon {s}")

    logger.info(f"Subspace estimation: order {n}, horizon {s}, {N} samples, {m} inputs, {p} outputs")

    su, sy = _scales(U), _scales(Y)
    Us, Ys = U / su, Y / sy

    data = np.vstack([
        _block_hankel(Us, s, s, cols),
        _block_hankel(Us, 0, s, cols),
        _block_hankel(Ys, 0, s, cols),
        _block_hankel(Ys, s, s, cols),
    ])
    R = linalg.qr(data.T, mode="economic")[1]
    L = R.T
    uf_end = s * m
    wp_end = uf_end + s * (m + p)
    L32 = L[wp_end:, uf_end:wp_end]

    Usv, S, _ = linalg.svd(L32)
    tol = max(L32.shape) * np.finfo(float).eps * (S[0] if S.size else 0.0)
    rank = int(np.sum(S > tol)) if S.size and S[0] > 0 else 0
    if rank < n:
        raise RankDeficient(f"Projected data rank {rank} is below the requested order {n}")

    warnings = []
    if S.size > n and S[n] > 0:
        gap = S[n - 1] / S[n]
        if gap < config.gap_threshold:
            message = (f"Singular-value gap at order {n} is {gap:.3g} "
                       f"(below {config.gap_threshold:g}): weak excitation for this order")
            logger.warning(message)
            warnings.append(message)

    gamma = Usv[:, :n] * np.sqrt(S[:n])
    C = gamma[:p]
    A = linalg.lstsq(gamma[:-p], gamma[p:])[0]

    raw_radius = spectral_radius(A)
    stabilized = False
    if raw_radius >= 1 and config.stabilize:
        A = reflect_unstable_poles(A)
        stabilized = True
        message = (f"Subspace estimate had spectral radius {raw_radius:.6f}; "
                   f"poles outside the unit circle were reflected inside")
        logger.warning(message)
        warnings.append(message)

    B, D, x0 = _fit_input_matrices(A, C, Us, Ys)

    refined = 0
    if config.refine and config.refine_iterations and spectral_radius(A) < 1:
        A, B, C, D, x0, refined = _refine(A, B, C, D, x0, Us, Ys, config.refine_iterations)

    model = StateSpaceModel(
        A, B / su, sy[:, None] * C, sy[:, None] * D / su, dt,
        input_labels=[series.name for series in inputs],
        output_labels=[series.name for series in outputs],
        metadata={"method": "po-moesp", "horizon": s,
                  "singular_values": [float(v) for v in S],
                  "raw_spectral_radius": float(raw_radius),
                  "stabilized": stabilized,
                  "refine_iterations": refined,
                  "x0": [float(v) for v in x0]},
        warnings=warnings,
    )
    if not model.is_stable():
        message = f"Identified model is unstable (max |eig| = {np.max(np.abs(model.eigenvalues())):.6f})"
        logger.warning(message)
        model.warnings.append(message)
    return model


def _fit_input_matrices(A: np.ndarray, C: np.ndarray, U: np.ndarray,
                        Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Least-squares B, D and x0 for fixed A and C on the simulation equations."""
    N, m = U.shape
    p, n = C.shape

    sensitivity = np.zeros((n, n * m))
    observability = C.copy()
    rows_b = np.empty((N, p, n * m))
    rows_x0 = np.empty((N, p, n))
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(N):
            rows_b[k] = C @ sensitivity
            rows_x0[k] = observability
            sensitivity = A @ sensitivity + np.kron(np.eye(n), U[k])
            observability = observability @ A

    rows_d = np.zeros((N, p, p * m))
    for c in range(p):
        rows_d[:, c, c * m:(c + 1) * m] = U

    regressor = np.concatenate([rows_b, rows_d, rows_x0], axis=2).reshape(N * p, -1)
    if not np.all(np.isfinite(regressor)):
        raise IdentificationError("Estimated A diverges over the data length; B and D cannot be fitted")
    theta = linalg.lstsq(regressor, Y.reshape(-1))[0]
    B = theta[:n * m].reshape(n, m)
    D = theta[n * m:n * m + p * m].reshape(p, m)
    x0 = theta[n * m + p * m:]
    return B, D, x0


def spectral_radius(A: np.ndarray) -> float:
    A = np.asarray(A, dtype=float)
    return float(np.max(np.abs(np.linalg.eigvals(A)))) if A.size else 0.0


def reflect_unstable_poles(A: np.ndarray, radius: float = _MAX_REFLECTED_RADIUS) -> np.ndarray:
    """
    Move eigenvalues with |z| >= 1 to 1/|z| on the same ray, capped at radius.

    Eigenvectors are kept, so only the offending modes change.
    """
    eig, vectors = np.linalg.eig(A)
    size = np.abs(eig)
    outside = size >= 1
    if not np.any(outside):
        return np.array(A, dtype=float)
    eig[outside] = eig[outside] / size[outside] * np.minimum(1.0 / size[outside], radius)
    return np.linalg.solve(vectors.T, (vectors * eig).T).T.real


def _propagate(A: np.ndarray, B: np.ndarray, C: np.ndarray, D: np.ndarray,
               U: np.ndarray, x0: Optional[np.ndarray]) -> np.ndarray:
    N = U.shape[0]
    n = A.shape[0]
    x = np.zeros(n) if x0 is None else x0
    forced = U @ B.T
    states = np.empty((N, n))
    for k in range(N):
        states[k] = x
        x = A @ x + forced[k]
    return states @ C.T + U @ D.T


def _simulation_cost(A, B, C, D, x0, U, Y) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        residual = Y - _propagate(A, B, C, D, U, x0)
        cost = float(np.sum(residual * residual))
    return cost if math.isfinite(cost) else math.inf


def _refine(A: np.ndarray, B: np.ndarray, C: np.ndarray, D: np.ndarray, x0: np.ndarray,
            U: np.ndarray, Y: np.ndarray, iterations: int):
    """
    Levenberg-Marquardt on the simulation error over (A, B, x0, C, D).

    Steps that raise the spectral radius to 1 or more are rejected. Returns the
    refined matrices, initial state and the number of accepted steps.
    """
    N, m = U.shape
    p, n = C.shape
    state_params = n * n + n * m + n
    total = state_params + p * n + p * m
    eye_n, eye_p = np.eye(n), np.eye(p)
    cost = _simulation_cost(A, B, C, D, x0, U, Y)
    if cost <= _EXACT_FIT * float(np.sum(Y * Y)):
        return A, B, C, D, x0, 0

    damping = 1e-3
    accepted_steps = 0
    for _ in range(iterations):
        jacobian = np.zeros((N, p, total))
        residual = np.empty((N, p))
        # d x_k / d(A, B, x0)
        sensitivity = np.zeros((n, state_params))
        sensitivity[:, n * n + n * m:] = eye_n
        x = x0.copy()
        with np.errstate(over="ignore", invalid="ignore"):
            for k in range(N):
                u = U[k]
                jacobian[k, :, :state_params] = C @ sensitivity
                jacobian[k, :, state_params:state_params + p * n] = np.kron(eye_p, x)
                jacobian[k, :, state_params + p * n:] = np.kron(eye_p, u)
                residual[k] = Y[k] - C @ x - D @ u
                sensitivity = A @ sensitivity
                sensitivity[:, :n * n] += np.kron(eye_n, x)
                sensitivity[:, n * n:n * n + n * m] += np.kron(eye_n, u)
                x = A @ x + B @ u
        J = jacobian.reshape(N * p, total)
        r = residual.reshape(-1)
        if not (np.all(np.isfinite(J)) and np.all(np.isfinite(r))):
            break
        scale = np.linalg.norm(J, axis=0)
        scale[scale == 0] = 1.0

        candidate = None
        for _ in range(_MAX_DAMPING_TRIES):
            augmented = np.vstack([J, np.diag(math.sqrt(damping) * scale)])
            step = linalg.lstsq(augmented, np.concatenate([r, np.zeros(total)]))[0]
            trial_a = A + step[:n * n].reshape(n, n)
            trial_b = B + step[n * n:n * n + n * m].reshape(n, m)
            trial_x0 = x0 + step[n * n + n * m:state_params]
            trial_c = C + step[state_params:state_params + p * n].reshape(p, n)
            trial_d = D + step[state_params + p * n:].reshape(p, m)
            trial_cost = (_simulation_cost(trial_a, trial_b, trial_c, trial_d, trial_x0, U, Y)
                          if spectral_radius(trial_a) < 1 else math.inf)
            if trial_cost < cost:
                candidate = (trial_a, trial_b, trial_c, trial_d, trial_x0, trial_cost)
                damping = max(damping / 3, 1e-12)
                break
            damping *= 4
        if candidate is None:
            break
        A, B, C, D, x0, new_cost = candidate
        accepted_steps += 1
        decrease = (cost - new_cost) / cost
        cost = new_cost
        if decrease < _REFINE_TOLERANCE:
            break
    logger.debug(f"Refinement: {accepted_steps} accepted step(s), final cost {cost:.6g}")
    return A, B, C, D, x0, accepted_steps


# ---------------------------------------------------------------------------
# Output-error estimation
# ---------------------------------------------------------------------------

def estimate_oe(inputs: Sequence[TimeSeries], output: TimeSeries,
                orders: Optional[Sequence[Tuple[int, int, int]]] = None,
                config: Optional[IdentificationConfig] = None,
                strict: bool = False) -> OutputErrorModel:
    """
    Estimate an output-error model y = sum_i B_i/F_i u_i.

    Args:
        inputs: Input series
        output: Output series on the same grid
        orders: (nb, nf, nk) per input; defaults to config.oe_orders, then (1, 1, 1)
        config: Iteration cap, tolerance and ridge weight
        strict: Raise NonConvergence instead of flagging the model

    Returns:
        OutputErrorModel; converged is False when the iteration cap was hit

    Raises:
        InsufficientExcitation: Too few samples, no excited input, or rank-deficient regressors
        NonConvergence: Only when strict is set
    """
    config = config or IdentificationConfig()
    U, Y, dt = _check_pair(inputs, [output])
    y = Y[:, 0]
    N, m = U.shape
    orders = [tuple(o) for o in (orders or config.oe_orders or [(1, 1, 1)] * m)]
    if len(orders) != m:
        raise ValueError(f"Got {len(orders)} channel orders for {m} inputs")
    for nb, nf, nk in orders:
        if nb < 1 or nf < 0 or nk < 0:
            raise ValueError(f"Invalid channel orders (nb={nb}, nf={nf}, nk={nk})")

    n_params = sum(nb + nf for nb, nf, _ in orders)
    if N <= 10 * n_params:
        raise InsufficientExcitation(f"{N} samples are too few for {n_params} parameters")
    excited = []
    for j in range(m):
        try:
            crest_factor(U[:, j], centered=True)
            excited.append(j)
        except ZeroPowerSignal:
            pass
    if not excited:
        raise InsufficientExcitation("No input carries excitation (every centered crest factor is undefined)")

    channels = _arx_initialization(U, y, orders, config.regularization)
    theta = _pack(channels)
    cost = _oe_cost(theta, orders, U, y)
    history = [cost]
    converged = False
    iterations = 0
    logger.info(f"Output-error estimation: orders {orders}, {N} samples, initial cost {cost:.6g}")

    for iterations in range(1, config.max_iterations + 1):
        if cost == 0.0:
            converged = True
            break
        step = _gauss_newton_step(theta, orders, U, y, config.regularization)
        accepted = None
        alpha = 1.0
        for _ in range(_MAX_STEP_HALVINGS):
            candidate = theta + alpha * step
            if _all_stable(candidate, orders):
                new_cost = _oe_cost(candidate, orders, U, y)
                if new_cost < cost:
                    accepted = (candidate, new_cost)
                    break
            alpha /= 2
        if accepted is None:
            converged = True
            break
        decrease = (cost - accepted[1]) / cost
        theta, cost = accepted
        history.append(cost)
        if decrease < config.tolerance:
            converged = True
            break

    warnings = []
    if not converged:
        message = f"Gauss-Newton hit the iteration cap ({config.max_iterations}) with the cost still decreasing"
        if strict:
            raise NonConvergence(message)
        logger.warning(message)
        warnings.append(message)

    model = OutputErrorModel(
        _unpack(theta, orders, [series.name for series in inputs]), dt,
        output_label=output.name, converged=converged,
        metadata={"method": "oe-gauss-newton", "iterations": iterations,
                  "initial_cost": history[0], "final_cost": cost},
        warnings=warnings,
    )
    if not model.is_stable():
        message = "Identified output-error model has denominator roots outside the unit circle"
        logger.warning(message)
        model.warnings.append(message)
    return model


def _arx_initialization(U: np.ndarray, y: np.ndarray, orders, regularization: float) -> List[OEChannel]:
    N, m = U.shape
    na = max(nf for _, nf, _ in orders)
    start = max([na] + [nk + nb - 1 for nb, _, nk in orders])
    columns = [-y[start - i:N - i] for i in range(1, na + 1)]
    for j, (nb, _, nk) in enumerate(orders):
        columns.extend(U[start - nk - i:N - nk - i, j] for i in range(nb))
    phi = np.column_stack(columns)
    target = y[start:]

    # lagged-output columns may vanish (zero output); lstsq then gives them zero weight
    inputs = phi[:, na:]
    if regularization == 0 and np.linalg.matrix_rank(inputs) < inputs.shape[1]:
        raise InsufficientExcitation("ARX regressor matrix is rank-deficient; add regularization or excitation")
    if regularization > 0:
        phi = np.vstack([phi, math.sqrt(regularization) * np.eye(phi.shape[1])])
        target = np.concatenate([target, np.zeros(phi.shape[1])])
    theta = linalg.lstsq(phi, target)[0]

    denominator = _stabilize(np.concatenate([[1.0], theta[:na]]))
    channels = []
    offset = na
    for nb, nf, nk in orders:
        f = np.zeros(nf + 1)
        f[:min(nf, na) + 1] = denominator[:min(nf, na) + 1]
        channels.append(OEChannel(theta[offset:offset + nb], _stabilize(f), nk))
        offset += nb
    return channels


def _stabilize(f: np.ndarray) -> np.ndarray:
    """Reflect denominator roots outside the unit circle to its inside."""
    if f.size < 2:
        return f
    roots = np.roots(f)
    outside = np.abs(roots) >= 1
    if not np.any(outside):
        return f
    roots[outside] = 0.99 / np.conj(roots[outside])
    return np.real(np.poly(roots))


def _pack(channels: Sequence[OEChannel]) -> np.ndarray:
    return np.concatenate([np.concatenate([c.b, c.f[1:]]) for c in channels])


def _split(theta: np.ndarray, orders):
    offset = 0
    for nb, nf, nk in orders:
        b = theta[offset:offset + nb]
        f = np.concatenate([[1.0], theta[offset + nb:offset + nb + nf]])
        offset += nb + nf
        yield b, f, nk


def _unpack(theta: np.ndarray, orders, labels: Sequence[str]) -> List[OEChannel]:
    return [OEChannel(b, f, nk, label) for (b, f, nk), label in zip(_split(theta, orders), labels)]


def _all_stable(theta: np.ndarray, orders) -> bool:
    return all(f.size < 2 or np.all(np.abs(np.roots(f)) < 1) for _, f, _ in _split(theta, orders))


def _channel_outputs(theta: np.ndarray, orders, U: np.ndarray) -> List[np.ndarray]:
    return [lfilter(np.concatenate([np.zeros(nk), b]), f, U[:, j])
            for j, (b, f, nk) in enumerate(_split(theta, orders))]


def _oe_cost(theta: np.ndarray, orders, U: np.ndarray, y: np.ndarray) -> float:
    residual = y - np.sum(_channel_outputs(theta, orders, U), axis=0)
    return float(residual @ residual)


def _delayed(signal: np.ndarray, delay: int) -> np.ndarray:
    if delay == 0:
        return signal
    return np.concatenate([np.zeros(delay), signal[:-delay]])


def _gauss_newton_step(theta: np.ndarray, orders, U: np.ndarray, y: np.ndarray,
                       regularization: float) -> np.ndarray:
    outputs = _channel_outputs(theta, orders, U)
    residual = y - np.sum(outputs, axis=0)
    columns = []
    for j, (b, f, nk) in enumerate(_split(theta, orders)):
        filtered_input = lfilter([1.0], f, U[:, j])
        filtered_output = lfilter([1.0], f, outputs[j])
        columns.extend(_delayed(filtered_input, nk + i) for i in range(b.size))
        columns.extend(-_delayed(filtered_output, i) for i in range(1, f.size))
    jacobian = np.column_stack(columns)
    if regularization > 0:
        jacobian = np.vstack([jacobian, math.sqrt(regularization) * np.eye(jacobian.shape[1])])
        residual = np.concatenate([residual, np.zeros(jacobian.shape[1])])
    return linalg.lstsq(jacobian, residual)[0]


# ---------------------------------------------------------------------------
# Simulation and conversion
# ---------------------------------------------------------------------------

def to_state_space(model: OutputErrorModel) -> StateSpaceModel:
    """Block-diagonal state-space realization of an output-error model."""
    blocks = []
    for channel in model.channels:
        num = channel.numerator()
        den = channel.f
        size = max(num.size, den.size)
        num = np.concatenate([num, np.zeros(size - num.size)])
        den = np.concatenate([den, np.zeros(size - den.size)])
        blocks.append(tf2ss(num, den))

    A = linalg.block_diag(*[a for a, _, _, _ in blocks]) if any(a.size for a, _, _, _ in blocks) \
        else np.zeros((0, 0))
    n = A.shape[0]
    B = np.zeros((n, model.n_inputs))
    C = np.zeros((1, n))
    D = np.zeros((1, model.n_inputs))
    offset = 0
    for j, (a, b, c, d) in enumerate(blocks):
        k = a.shape[0]
        B[offset:offset + k, j] = b.ravel()
        C[0, offset:offset + k] = c.ravel()
        D[0, j] = d.ravel()[0]
        offset += k
    return StateSpaceModel(A, B, C, D, model.dt, input_labels=model.input_labels,
                           output_labels=model.output_labels,
                           metadata={"realized_from": "output_error"})


def simulate_array(model: Model, U: np.ndarray, x0: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Simulate on a samples x inputs array and return samples x outputs.

    Output-error models with no initial state run channel by channel through lfilter.
    """
    U = np.atleast_2d(np.asarray(U, dtype=float))
    if U.shape[1] != model.n_inputs:
        raise ValueError(f"Model expects {model.n_inputs} inputs, got {U.shape[1]}")
    if isinstance(model, OutputErrorModel):
        if x0 is None:
            return np.sum([lfilter(c.numerator(), c.f, U[:, j])
                           for j, c in enumerate(model.channels)], axis=0)[:, None]
        model = to_state_space(model)

    n = model.order
    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).ravel()
    if x.size != n:
        raise ValueError(f"Initial state has {x.size} entries, model order is {n}")
    return _propagate(model.A, model.B, model.C, model.D, U, x)


def _check_model_dt(model: Model, dt: float) -> None:
    if isinstance(model, StateSpaceModel) and model.is_continuous:
        raise DtMismatch("Continuous models must be discretized with c2d before simulation")
    if not math.isclose(model.dt, dt, rel_tol=1e-9):
        raise DtMismatch(f"Model dt={model.dt} does not match input dt={dt}")


def simulate(model: Model, inputs: Sequence[TimeSeries],
             x0: Optional[np.ndarray] = None) -> List[TimeSeries]:
    """
    Simulate a discrete model on input series.

    Args:
        model: Discrete StateSpaceModel or OutputErrorModel
        inputs: One series per model input, sampled at model.dt
        x0: Initial state; None starts from zero

    Returns:
        One TimeSeries per model output on the input grid

    Raises:
        DtMismatch: If the model is continuous or sampled at another period
    """
    U = _stack(inputs, "input")
    _check_model_dt(model, inputs[0].dt)
    if not model.is_stable():
        logger.warning(f"Simulating an unstable model {model!r}")
    Y = simulate_array(model, U, x0)
    first = inputs[0]
    return [TimeSeries(label, "", first.t0, first.dt, Y[:, i])
            for i, label in enumerate(model.output_labels)]


def c2d(model: StateSpaceModel, dt: float) -> StateSpaceModel:
    """Zero-order-hold discretization through the matrix exponential of [[A, B], [0, 0]]."""
    if not model.is_continuous:
        raise DtMismatch("c2d needs a continuous model")
    if not dt > 0:
        raise ValueError(f"Sample period must be positive, got {dt}")
    n, m = model.order, model.n_inputs
    block = np.zeros((n + m, n + m))
    block[:n, :n] = model.A
    block[:n, n:] = model.B
    expm = linalg.expm(block * dt)
    return StateSpaceModel(expm[:n, :n], expm[:n, n:], model.C, model.D, dt,
                           input_labels=model.input_labels, output_labels=model.output_labels,
                           metadata=dict(model.metadata), warnings=list(model.warnings))


def unresolvable_eigenvalues(A: np.ndarray) -> np.ndarray:
    """Eigenvalues on the closed negative real axis (no real matrix logarithm)."""
    eig = np.linalg.eigvals(A)
    mask = (eig.real <= 0) & (np.abs(eig.imag) <= _NEGATIVE_AXIS_TOL * np.maximum(1.0, np.abs(eig)))
    return eig[mask]


def d2c(model: StateSpaceModel, dt: Optional[float] = None) -> StateSpaceModel:
    """
    Continuous equivalent of a zero-order-hold discrete model.

    Raises:
        LogUndefined: If A has an eigenvalue on the closed negative real axis
        DtMismatch: If dt disagrees with the model's sample period
    """
    if model.is_continuous:
        raise DtMismatch("d2c needs a discrete model")
    dt = model.dt if dt is None else float(dt)
    if not math.isclose(dt, model.dt, rel_tol=1e-9):
        raise DtMismatch(f"d2c dt={dt} does not match model dt={model.dt}")
    bad = unresolvable_eigenvalues(model.A)
    if bad.size:
        raise LogUndefined(f"Eigenvalues {np.round(bad, 6).tolist()} lie on the closed negative real axis")

    n, m = model.order, model.n_inputs
    block = np.eye(n + m)
    block[:n, :n] = model.A
    block[:n, n:] = model.B
    log = linalg.logm(block) / dt
    if np.iscomplexobj(log):
        if np.max(np.abs(log.imag)) > 1e-9 * max(1.0, np.max(np.abs(log.real))):
            raise LogUndefined("Matrix logarithm of the discrete model is not real")
        log = log.real
    return StateSpaceModel(log[:n, :n], log[:n, n:], model.C, model.D, None,
                           input_labels=model.input_labels, output_labels=model.output_labels,
                           metadata=dict(model.metadata), warnings=list(model.warnings))


def _resolvable_schur(A: np.ndarray):
    tol = _NEGATIVE_AXIS_TOL

    def resolvable(re, im):
        return not (re <= 0 and abs(im) <= tol * max(1.0, math.hypot(re, im)))

    return linalg.schur(A, output="real", sort=resolvable)


def remove_unresolvable_modes(model: StateSpaceModel) -> StateSpaceModel:
    """
    Truncate the discrete modes on the closed negative real axis so d2c is defined.

    The real Schur form is ordered with the resolvable modes first and only that
    leading block is kept.
    """
    T, Z, kept = _resolvable_schur(model.A)
    if kept == 0:
        raise LogUndefined("Every mode of the model lies on the closed negative real axis")
    dropped = model.order - kept
    message = f"Dropped {dropped} mode(s) on the negative real axis before d2c"
    if dropped:
        logger.warning(message)
    metadata = dict(model.metadata)
    if "x0" in metadata:
        metadata["x0"] = [float(v) for v in Z.T[:kept] @ np.asarray(metadata["x0"], dtype=float)]
    return StateSpaceModel(T[:kept, :kept], Z.T[:kept] @ model.B, model.C @ Z[:, :kept], model.D,
                           model.dt, input_labels=model.input_labels,
                           output_labels=model.output_labels, metadata=metadata,
                           warnings=list(model.warnings) + ([message] if dropped else []))


def resample_model(model: StateSpaceModel, dt: float) -> StateSpaceModel:
    """Re-discretize a discrete model at another period, truncating modes d2c cannot map."""
    try:
        continuous = d2c(model)
    except LogUndefined as exc:
        logger.warning(f"{exc}; falling back to truncated realization")
        continuous = d2c(remove_unresolvable_modes(model))
    return c2d(continuous, dt)


def resample_state(model: StateSpaceModel, x0) -> np.ndarray:
    """
    Express a state of model in the coordinates of resample_model(model, ...).

    c2d and d2c keep the state basis, so x0 only changes when modes were truncated:
    it is then projected on the kept Schur vectors.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.size != model.order:
        raise ValueError(f"Initial state has {x0.size} entries, model order is {model.order}")
    try:
        d2c(model)
        return x0
    except LogUndefined:
        _, Z, kept = _resolvable_schur(model.A)
        return Z[:, :kept].T @ x0


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def estimate_initial_state(model: Model, U: np.ndarray, Y: np.ndarray,
                           n_samples: Optional[int] = None) -> np.ndarray:
    """Least-squares initial state from the first max(2n, 20) samples of data."""
    ss = to_state_space(model) if isinstance(model, OutputErrorModel) else model
    n = ss.order
    if n == 0:
        return np.zeros(0)
    count = min(len(U), n_samples or max(2 * n, 20))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if Y.shape[0] != len(U):
        Y = Y.T
    free = Y[:count] - simulate_array(ss, U[:count])
    rows = []
    observability = ss.C.copy()
    for _ in range(count):
        rows.append(observability)
        observability = observability @ ss.A
    return linalg.lstsq(np.vstack(rows), free.reshape(-1))[0]


def fit_report(predicted: np.ndarray, measured: np.ndarray) -> FitReport:
    """Error statistics of predicted - measured."""
    predicted = np.asarray(predicted, dtype=float).ravel()
    measured = np.asarray(measured, dtype=float).ravel()
    error = predicted - measured
    denominator = np.linalg.norm(measured - measured.mean())
    numerator = np.linalg.norm(error)
    if denominator > 0:
        fit = 100.0 * (1.0 - numerator / denominator)
    else:
        fit = 100.0 if numerator == 0 else -math.inf
    return FitReport(np.mean(np.abs(error)), np.mean(error), np.std(error), fit)


def validate(model: Model, inputs: Sequence[TimeSeries], outputs: Sequence[TimeSeries],
             channel: int = 0, estimate_x0: bool = True) -> FitReport:
    """
    Simulate the model on validation data and report the error of one output channel.

    The initial state is estimated on the first samples unless estimate_x0 is False.
    """
    U, Y, dt = _check_pair(inputs, outputs)
    _check_model_dt(model, dt)
    if Y.shape[1] != model.n_outputs:
        raise ValueError(f"Model has {model.n_outputs} outputs, got {Y.shape[1]}")
    x0 = estimate_initial_state(model, U, Y) if estimate_x0 else None
    predicted = simulate_array(model, U, x0)
    return fit_report(predicted[:, channel], Y[:, channel])


def select_order(inputs: Sequence[TimeSeries], outputs: Sequence[TimeSeries],
                 orders: Sequence[int],
                 config: Optional[IdentificationConfig] = None) -> List[OrderSweepRow]:
    """Estimate on the first half and validate on the second half for each order."""
    config = config or IdentificationConfig()
    if not orders:
        return []
    est_in, val_in = zip(*(split_halves(s) for s in inputs))
    est_out, val_out = zip(*(split_halves(s) for s in outputs))
    rows = []
    for order in sorted(orders):
        try:
            model = estimate_subspace(est_in, est_out, order, config.with_order(order))
            rows.append(OrderSweepRow(order, validate(model, val_in, val_out), model=model))
        except (IdentificationError, np.linalg.LinAlgError, ValueError) as exc:
            logger.warning(f"Order {order} failed: {exc}")
            rows.append(OrderSweepRow(order, error=f"{type(exc).__name__}: {exc}"))
    return rows


def eigenvalue_distance(first: np.ndarray, second: np.ndarray) -> float:
    """Largest distance between optimally matched eigenvalues of two equal-size sets."""
    first = np.asarray(first).ravel()
    second = np.asarray(second).ravel()
    if first.size != second.size:
        raise ValueError(f"Eigenvalue sets differ in size ({first.size} vs {second.size})")
    if first.size == 0:
        return 0.0
    cost = np.abs(first[:, None] - second[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())
