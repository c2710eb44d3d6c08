"""Identification settings and model-quality records."""
import math
from typing import Any, Dict, Optional, Sequence, Tuple


class IdentificationConfig:
    """
    Settings shared by the estimators.

    Attributes:
        order (int): State dimension for subspace estimation
        oe_orders (list): (nb, nf, nk) per input channel for output-error estimation
        max_iterations (int): Gauss-Newton iteration cap
        tolerance (float): Relative cost decrease below which refinement stops (> 0)
        regularization (float): Ridge weight for least-squares steps (>= 0)
        horizon (int or None): Past/future block rows; None picks max(10, 2 * order)
        gap_threshold (float): Minimum sigma_n / sigma_(n+1) before an excitation warning
        stabilize (bool): Reflect subspace poles with |z| >= 1 inside the unit circle (flagged)
        refine (bool): Polish stable subspace models by damped least squares on the simulation error
        refine_iterations (int): Iteration cap of that refinement
    """

    def __init__(
        self,
        order: int = 4,
        oe_orders: Optional[Sequence[Tuple[int, int, int]]] = None,
        max_iterations: int = 50,
        tolerance: float = 1e-10,
        regularization: float = 0.0,
        horizon: Optional[int] = None,
        gap_threshold: float = 10.0,
        stabilize: bool = False,
        refine: bool = True,
        refine_iterations: int = 60
    ):
        if order < 1:
            raise ValueError(f"Model order must be at least 1, got {order}")
        if not tolerance > 0:
            raise ValueError("Convergence tolerance must be positive")
        if regularization < 0:
            raise ValueError("Regularization weight must be non-negative")
        if horizon is not None and horizon < order:
            raise ValueError(f"Horizon {horizon} must be at least the order {order}")
        if refine_iterations < 0:
            raise ValueError("Refinement iteration cap must be non-negative")
        self.order = int(order)
        self.oe_orders = [tuple(o) for o in oe_orders] if oe_orders else None
        self.max_iterations = int(max_iterations)
        self.tolerance = float(tolerance)
        self.regularization = float(regularization)
        self.horizon = horizon
        self.gap_threshold = float(gap_threshold)
        self.stabilize = bool(stabilize)
        self.refine = bool(refine)
        self.refine_iterations = int(refine_iterations)

    def horizon_for(self, order: int) -> int:
        """Block-row count used for a given order."""
        if self.horizon is not None and self.horizon >= order:
            return int(self.horizon)
        return max(10, 2 * order)

    def with_order(self, order: int) -> "IdentificationConfig":
        horizon = self.horizon if self.horizon is not None and self.horizon >= order else None
        return IdentificationConfig(order, self.oe_orders, self.max_iterations,
                                    self.tolerance, self.regularization, horizon,
                                    self.gap_threshold, self.stabilize, self.refine,
                                    self.refine_iterations)


class FitReport:
    """
    Error statistics of a simulated output against a measured one.

    Attributes:
        mu_e (float): Mean absolute error
        mu_signed (float): Mean signed error (simulated - measured)
        sigma_e (float): Standard deviation of the error
        fit_percent (float): 100 * (1 - ||y - y_hat|| / ||y - mean(y)||)
    """

    def __init__(self, mu_e: float, mu_signed: float, sigma_e: float, fit_percent: float):
        self.mu_e = float(mu_e)
        self.mu_signed = float(mu_signed)
        self.sigma_e = float(sigma_e)
        self.fit_percent = float(fit_percent)

    def __repr__(self) -> str:
        return (f"FitReport(mu_e={self.mu_e:.4g}, mu_signed={self.mu_signed:.4g}, "
                f"sigma_e={self.sigma_e:.4g}, fit_percent={self.fit_percent:.4g})")

    def to_dict(self) -> Dict[str, Any]:
        return {"mu_e": self.mu_e, "mu_signed": self.mu_signed,
                "sigma_e": self.sigma_e,
                "fit_percent": self.fit_percent if math.isfinite(self.fit_percent) else None}


class OrderSweepRow:
    """One order of a model-order sweep: a report or the error that stopped it."""

    def __init__(self, order: int, report: Optional[FitReport] = None,
                 error: Optional[str] = None, model=None):
        self.order = order
        self.report = report
        self.error = error
        self.model = model

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> Dict[str, Any]:
        return {"order": self.order,
                "report": self.report.to_dict() if self.report else None,
                "error": self.error}
