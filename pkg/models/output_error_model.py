"""Output-error polynomial model, one transfer function per input channel."""
from typing import Any, Dict, List, Optional, Sequence

import numpy as np


class OEChannel:
    """
    One B(z)/F(z) transfer of an output-error model.

    B(z) = b1 z^-nk + b2 z^-(nk+1) + ... ; F(z) = 1 + f1 z^-1 + ... + f_nf z^-nf.
    The stored denominator keeps its leading 1, so a printed '1-0.9961' is f1 = -0.9961.
    """

    def __init__(self, b: Sequence[float], f: Sequence[float], nk: int, label: str = "u"):
        f = np.array(f, dtype=float).ravel()
        if f.size == 0 or f[0] != 1.0:
            raise ValueError("Denominator leading coefficient must be exactly 1")
        if nk < 0:
            raise ValueError(f"Input delay must be non-negative, got {nk}")
        self.b = np.array(b, dtype=float).ravel()
        self.f = f
        self.nk = int(nk)
        self.label = label

    @property
    def nb(self) -> int:
        return self.b.size

    @property
    def nf(self) -> int:
        return self.f.size - 1

    def numerator(self) -> np.ndarray:
        """Numerator polynomial in z^-1 including the leading delay zeros."""
        return np.concatenate([np.zeros(self.nk), self.b])

    def poles(self) -> np.ndarray:
        if self.nf == 0:
            return np.array([])
        return np.roots(self.f)

    def is_stable(self) -> bool:
        return bool(np.all(np.abs(self.poles()) < 1))

    def to_dict(self) -> Dict[str, Any]:
        return {"label": self.label, "b": [float(v) for v in self.b],
                "f": [float(v) for v in self.f], "nk": self.nk}


class OutputErrorModel:
    """
    Output-error model y = sum_i B_i(z)/F_i(z) u_i + e.

    Attributes:
        channels (list): One OEChannel per input
        dt (float): Sample period in seconds
        output_label (str): Name of the modelled output
        converged (bool): False when Gauss-Newton refinement hit its iteration cap
        metadata (dict): Estimation details (cost history, iterations)
        warnings (list): Non-fatal findings recorded during estimation
    """

    def __init__(
        self,
        channels: List[OEChannel],
        dt: float,
        output_label: str = "y",
        converged: bool = True,
        metadata: Optional[Dict[str, Any]] = None,
        warnings: Optional[List[str]] = None
    ):
        if not channels:
            raise ValueError("An output-error model needs at least one input channel")
        if not float(dt) > 0:
            raise ValueError(f"Sample period must be positive, got {dt}")
        self.channels = list(channels)
        self.dt = float(dt)
        self.output_label = output_label
        self.converged = converged
        self.metadata = dict(metadata or {})
        self.warnings = list(warnings or [])

    @property
    def n_inputs(self) -> int:
        return len(self.channels)

    @property
    def n_outputs(self) -> int:
        return 1

    @property
    def input_labels(self) -> List[str]:
        return [channel.label for channel in self.channels]

    @property
    def output_labels(self) -> List[str]:
        return [self.output_label]

    def is_stable(self) -> bool:
        return all(channel.is_stable() for channel in self.channels)

    def parameter_count(self) -> int:
        return sum(channel.nb + channel.nf for channel in self.channels)

    def __repr__(self) -> str:
        orders = ", ".join(f"({c.nb},{c.nf},{c.nk})" for c in self.channels)
        return f"OutputErrorModel(orders=[{orders}], dt={self.dt}, converged={self.converged})"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "type": "output_error",
            "dt": self.dt,
            "output_label": self.output_label,
            "channels": [channel.to_dict() for channel in self.channels],
            "converged": self.converged,
            "metadata": self.metadata,
            "warnings": self.warnings,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OutputErrorModel":
        channels = [OEChannel(c["b"], c["f"], c["nk"], c.get("label", "u"))
                    for c in data["channels"]]
        return cls(channels, data["dt"], data.get("output_label", "y"),
                   converged=data.get("converged", True),
                   metadata=data.get("metadata"), warnings=data.get("warnings"))
