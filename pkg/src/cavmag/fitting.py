"""Nonlinear least squares with the model functions used by the toolkit.

The engine is a damped Gauss-Newton (Levenberg-Marquardt) iteration with
a forward-difference Jacobian, step sqrt(eps) max(|p|, 1).  A trial step
is accepted only when it lowers the residual norm, so the cost history is
non-increasing; rejected steps raise the damping tenfold.  Box bounds are
handled by smooth parameter transforms (exp for one-sided, sine for
two-sided), used here to keep widths and saturation powers positive.

Parameter uncertainties are the square roots of the covariance diagonal,
with the covariance (J^T J)^-1 scaled by the reduced chi-square of the
fit, so they reflect the scatter of the data actually supplied.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from . import cavity

_FORWARD_STEP_REL = math.sqrt(np.finfo(float).eps)
_DAMPING_INIT = 1e-3
_DAMPING_GROW = 10.0
_DAMPING_SHRINK = 0.1
_DAMPING_MAX = 1e12

Bound = Tuple[Optional[float], Optional[float]]


@dataclass(frozen=True)
class FitResult:
    """Converged parameter vector with covariance and diagnostics."""

    parameter_names: Tuple[str, ...]
    parameters: np.ndarray
    covariance: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    cost_history: Tuple[float, ...]

    def value(self, name: str) -> float:
        return float(self.parameters[self.parameter_names.index(name)])

    def uncertainty(self, name: str) -> float:
        index = self.parameter_names.index(name)
        return float(math.sqrt(max(self.covariance[index, index], 0.0)))

    @property
    def uncertainties(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    def as_dict(self) -> dict:
        return {
            "parameters": {
                name: float(value)
                for name, value in zip(self.parameter_names, self.parameters)
            },
            "uncertainties": {
                name: float(sigma)
                for name, sigma in zip(self.parameter_names, self.uncertainties)
            },
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _to_internal(value: float, bound: Bound) -> float:
    lo, hi = bound
    if lo is None and hi is None:
        return value
    if lo is not None and hi is None:
        if value <= lo:
            raise ValueError(f"initial value {value} not above lower bound {lo}")
        return math.log(value - lo)
    if lo is None and hi is not None:
        if value >= hi:
            raise ValueError(f"initial value {value} not below upper bound {hi}")
        return math.log(hi - value)
    if not lo < value < hi:
        raise ValueError(f"initial value {value} outside bounds ({lo}, {hi})")
    return math.asin(2.0 * (value - lo) / (hi - lo) - 1.0)


def _to_external(u: float, bound: Bound) -> float:
    lo, hi = bound
    if lo is None and hi is None:
        return u
    if lo is not None and hi is None:
        return lo + math.exp(u)
    if lo is None and hi is not None:
        return hi - math.exp(u)
    return lo + (hi - lo) * (math.sin(u) + 1.0) / 2.0


def _external_gradient(u: float, bound: Bound) -> float:
    lo, hi = bound
    if lo is None and hi is None:
        return 1.0
    if lo is not None and hi is None:
        return math.exp(u)
    if lo is None and hi is not None:
        return -math.exp(u)
    return (hi - lo) * math.cos(u) / 2.0


def _forward_jacobian(
    fn: Callable[[np.ndarray], np.ndarray], point: np.ndarray, value: np.ndarray
) -> np.ndarray:
    jacobian = np.empty((value.size, point.size))
    for j in range(point.size):
        step = _FORWARD_STEP_REL * max(abs(point[j]), 1.0)
        shifted = point.copy()
        shifted[j] += step
        jacobian[:, j] = (fn(shifted) - value) / step
    return jacobian


def least_squares(
    residual_fn: Callable[[np.ndarray], np.ndarray],
    initial: Sequence[float],
    bounds: Optional[Sequence[Bound]] = None,
    parameter_names: Optional[Sequence[str]] = None,
    ftol: float = 1e-10,
    xtol: float = 1e-10,
    max_iter: int = 200,
) -> FitResult:
    """Minimize the sum of squared residuals from the given starting point.

    residual_fn maps a parameter vector to a residual vector.  bounds is
    an optional per-parameter sequence of (lo, hi) with None for an open
    side.  Raises on a non-finite residual at the starting point; during
    the iteration a non-finite trial is treated as a rejected step.
    """
    initial = np.asarray(initial, dtype=float)
    n_params = initial.size
    if bounds is None:
        bounds = [(None, None)] * n_params
    if len(bounds) != n_params:
        raise ValueError("one (lo, hi) bound pair is needed per parameter")
    if parameter_names is None:
        parameter_names = tuple(f"p{j}" for j in range(n_params))
    else:
        parameter_names = tuple(parameter_names)
        if len(parameter_names) != n_params:
            raise ValueError("one name is needed per parameter")

    def external(u: np.ndarray) -> np.ndarray:
        return np.array([_to_external(v, b) for v, b in zip(u, bounds)])

    def internal_residual(u: np.ndarray) -> np.ndarray:
        return np.asarray(residual_fn(external(u)), dtype=float)

    point = np.array([_to_internal(v, b) for v, b in zip(initial, bounds)])
    residual = internal_residual(point)
    if not np.all(np.isfinite(residual)):
        raise ValueError("residual is not finite at the starting point")
    cost = float(residual @ residual)
    history = [math.sqrt(cost)]
    damping = _DAMPING_INIT
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        jacobian = _forward_jacobian(internal_residual, point, residual)
        gradient = jacobian.T @ residual
        normal = jacobian.T @ jacobian
        diagonal = np.diag(normal).copy()
        diagonal[diagonal <= 0] = 1.0
        step = None
        while damping <= _DAMPING_MAX:
            try:
                trial_step = np.linalg.solve(
                    normal + damping * np.diag(diagonal), -gradient
                )
            except np.linalg.LinAlgError:
                trial_step = np.linalg.lstsq(
                    normal + damping * np.diag(diagonal), -gradient, rcond=None
                )[0]
            trial_point = point + trial_step
            trial_residual = internal_residual(trial_point)
            if np.all(np.isfinite(trial_residual)):
                trial_cost = float(trial_residual @ trial_residual)
                if trial_cost <= cost:
                    step = trial_step
                    break
            damping *= _DAMPING_GROW
        if step is None:
            break
        cost_drop = cost - trial_cost
        point = trial_point
        residual = trial_residual
        cost = trial_cost
        history.append(math.sqrt(cost))
        damping = max(damping * _DAMPING_SHRINK, 1e-14)
        # Component-wise so one large-magnitude parameter (a line center in
        # hertz, say) cannot mask motion in the small ones.
        if np.all(np.abs(step) <= xtol * (np.abs(point) + xtol)):
            converged = True
            break
        if cost_drop <= ftol * max(cost, np.finfo(float).tiny):
            converged = True
            break
    else:
        iterations = max_iter

    if history[0] == 0.0:
        converged = True

    jacobian = _forward_jacobian(internal_residual, point, residual)
    transform = np.array([_external_gradient(v, b) for v, b in zip(point, bounds)])
    covariance = _scaled_covariance(jacobian, residual) * np.outer(transform, transform)
    return FitResult(
        parameter_names=parameter_names,
        parameters=external(point),
        covariance=covariance,
        residual_norm=math.sqrt(cost),
        iterations=iterations,
        converged=converged,
        cost_history=tuple(history),
    )


def _scaled_covariance(jacobian: np.ndarray, residual: np.ndarray) -> np.ndarray:
    """(J^T J)^-1 scaled by the reduced chi-square (1 when dof <= 0)."""
    n_points, n_params = jacobian.shape
    normal = jacobian.T @ jacobian
    try:
        inverse = np.linalg.inv(normal)
    except np.linalg.LinAlgError:
        inverse = np.linalg.pinv(normal)
    dof = n_points - n_params
    scale = float(residual @ residual) / dof if dof > 0 else 1.0
    return inverse * scale


def lorentzian_model(x: np.ndarray, parameters: Sequence[float]) -> np.ndarray:
    """Offset plus a sum of Lorentzian peaks.

    parameters is (offset, center_1, fwhm_1, amplitude_1, center_2, ...);
    each peak contributes amplitude (w/2)^2 / ((x - c)^2 + (w/2)^2), so a
    negative amplitude is a dip.
    """
    values = np.asarray(parameters, dtype=float)
    if values.size < 4 or (values.size - 1) % 3 != 0:
        raise ValueError("parameters must be an offset plus (center, fwhm, amplitude) triples")
    x = np.asarray(x, dtype=float)
    result = np.full(x.shape, values[0])
    for start in range(1, values.size, 3):
        center, fwhm, amplitude = values[start : start + 3]
        half_sq = (fwhm / 2.0) ** 2
        result = result + amplitude * half_sq / ((x - center) ** 2 + half_sq)
    return result


def _peak_names(n_peaks: int) -> Tuple[str, ...]:
    names = ["offset"]
    for index in range(1, n_peaks + 1):
        names += [f"center_{index}", f"fwhm_{index}", f"amplitude_{index}"]
    return tuple(names)


def _initial_lorentzian_guess(
    x: np.ndarray, y: np.ndarray, n_peaks: int
) -> np.ndarray:
    """Deterministic starting point: offset from the edge samples, then
    peaks peeled off the residual one at a time, widths from half-height
    crossings around each extremum."""
    edge = max(1, x.size // 10)
    offset = float(np.median(np.concatenate([y[:edge], y[-edge:]])))
    grid_step = float(np.median(np.diff(x)))
    residual = y - offset
    guess = [offset]
    for _ in range(n_peaks):
        index = int(np.argmax(np.abs(residual)))
        amplitude = float(residual[index])
        if amplitude == 0.0:
            guess += [float(x[index]), 4.0 * grid_step, 0.0]
            continue
        half = abs(amplitude) / 2.0
        left = index
        while left > 0 and abs(residual[left]) > half:
            left -= 1
        right = index
        while right < x.size - 1 and abs(residual[right]) > half:
            right += 1
        width = float(x[right] - x[left])
        if width <= 0:
            width = 4.0 * grid_step
        guess += [float(x[index]), width, amplitude]
        half_sq = (width / 2.0) ** 2
        residual = residual - amplitude * half_sq / ((x - x[index]) ** 2 + half_sq)
    return np.asarray(guess)


def fit_lorentzian(
    x: np.ndarray,
    y: np.ndarray,
    n_peaks: int = 1,
    initial: Optional[Sequence[float]] = None,
) -> FitResult:
    """Fit an offset plus n_peaks Lorentzians to sampled data.

    Peaks in the result are sorted by center.  Warns when two fitted
    centers collapse within one grid step of each other, where the peak
    assignment is no longer meaningful.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be matching one-dimensional arrays")
    if n_peaks < 1:
        raise ValueError("at least one peak is required")
    if x.size < 3 * n_peaks + 1:
        raise ValueError("not enough samples for the requested number of peaks")
    if initial is None:
        initial = _initial_lorentzian_guess(x, y, n_peaks)
    bounds: list[Bound] = [(None, None)]
    for _ in range(n_peaks):
        bounds += [(None, None), (0.0, None), (None, None)]
    result = least_squares(
        lambda p: lorentzian_model(x, p) - y,
        initial,
        bounds=bounds,
        parameter_names=_peak_names(n_peaks),
    )
    result = _sort_peaks(result, n_peaks)
    grid_step = float(np.median(np.diff(x)))
    centers = [result.value(f"center_{i}") for i in range(1, n_peaks + 1)]
    for i in range(len(centers) - 1):
        if abs(centers[i + 1] - centers[i]) < grid_step:
            warnings.warn(
                "two fitted centers lie within one grid step; peaks are degenerate",
                UserWarning,
                stacklevel=2,
            )
            break
    return result


def _sort_peaks(result: FitResult, n_peaks: int) -> FitResult:
    if n_peaks == 1:
        return result
    order = np.argsort(
        [result.value(f"center_{i}") for i in range(1, n_peaks + 1)]
    )
    if np.array_equal(order, np.arange(n_peaks)):
        return result
    permutation = [0]
    for peak in order:
        base = 1 + 3 * int(peak)
        permutation += [base, base + 1, base + 2]
    permutation = np.asarray(permutation)
    return FitResult(
        parameter_names=result.parameter_names,
        parameters=result.parameters[permutation],
        covariance=result.covariance[np.ix_(permutation, permutation)],
        residual_norm=result.residual_norm,
        iterations=result.iterations,
        converged=result.converged,
        cost_history=result.cost_history,
    )


def _saturated_loss_at_max_power(
    max_power_transmission: float, mirrors: cavity.MirrorSet, baseline: float
) -> float:
    """Transmission drop dL at the highest power, by bisecting the exact
    cavity response; used only to seed the fit."""
    reference = cavity.peak_transmission(
        mirrors.reflectivity, mirrors.transmissivity, baseline
    )
    target = max(min(max_power_transmission, 1.0), 1e-6) * reference

    def gap(drop: float) -> float:
        return target - cavity.peak_transmission(
            mirrors.reflectivity, mirrors.transmissivity, baseline - drop
        )

    upper = baseline * (1.0 - 1e-9)
    if gap(0.0) > 0 or gap(upper) < 0:
        return 0.0
    return cavity._bisect_increasing(gap, 0.0, upper)


def fit_saturation(
    powers_w: np.ndarray,
    transmissions: np.ndarray,
    mirrors: cavity.MirrorSet,
    baseline_transmission: float,
    initial: Optional[Tuple[float, float]] = None,
) -> FitResult:
    """Fit (A0, P_sat) of the pump saturation from a relative transmission curve.

    transmissions are on-resonance cavity transmissions normalized to the
    unpumped value; the model threads L(P) = L0 - A0 P / (P + P_sat)
    through the cavity response.  Warns when the sampled powers stay well
    below the fitted saturation power, where the two parameters are
    degenerate.
    """
    powers = np.asarray(powers_w, dtype=float)
    values = np.asarray(transmissions, dtype=float)
    if powers.shape != values.shape or powers.ndim != 1:
        raise ValueError("powers and transmissions must be matching 1-d arrays")
    if powers.size < 3:
        raise ValueError("at least three points are needed for a two-parameter fit")
    if np.any(powers < 0):
        raise ValueError("powers must be non-negative")
    if not 0.0 < baseline_transmission <= 1.0:
        raise ValueError("baseline transmission must be in (0, 1]")
    reference = cavity.peak_transmission(
        mirrors.reflectivity, mirrors.transmissivity, baseline_transmission
    )
    reflectivity = mirrors.reflectivity
    transmissivity = mirrors.transmissivity

    def model(parameters: np.ndarray) -> np.ndarray:
        # Total function of the parameters: invalid single-pass values map
        # to inf so the optimizer rejects the step instead of raising.
        amplitude, p_sat = parameters
        single_pass = baseline_transmission - amplitude * powers / (powers + p_sat)
        valid = (single_pass > 0.0) & (reflectivity * single_pass < 1.0)
        safe = np.where(valid, single_pass, 0.5)
        peaks = transmissivity**2 * safe / (1.0 - reflectivity * safe) ** 2
        return np.where(valid, peaks / reference, np.inf)

    if initial is None:
        order = np.argsort(powers)
        sorted_powers = powers[order]
        sorted_values = values[order]
        max_drop = _saturated_loss_at_max_power(
            float(sorted_values[-1]), mirrors, baseline_transmission
        )
        halfway = 0.5 * (1.0 + float(sorted_values[-1]))
        below = np.nonzero(sorted_values <= halfway)[0]
        p_half = float(sorted_powers[below[0]]) if below.size else float(sorted_powers[-1])
        p_sat_guess = max(p_half, 1e-3 * float(sorted_powers[-1]), 1e-12)
        max_power = float(sorted_powers[-1])
        amplitude_guess = max_drop * (max_power + p_sat_guess) / max(max_power, 1e-300)
        initial = (amplitude_guess, p_sat_guess)

    result = least_squares(
        lambda p: model(p) - values,
        initial,
        bounds=[(None, None), (0.0, None)],
        parameter_names=("absorbance_amplitude", "saturation_power_w"),
    )
    if powers.max() < 0.3 * result.value("saturation_power_w"):
        warnings.warn(
            "all sampled powers lie well below the fitted saturation power; "
            "amplitude and saturation power are weakly identified",
            UserWarning,
            stacklevel=2,
        )
    return result
