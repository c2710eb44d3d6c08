"""State-space model: the artifact produced by subspace identification."""
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

CONTINUOUS = "continuous"


def _matrix(values, rows: int, cols: int, label: str) -> np.ndarray:
    array = np.array(values, dtype=float)
    if array.size == 0:
        array = np.zeros((rows, cols))
    elif array.ndim == 0:
        array = np.full((rows, cols), float(array))
    elif array.ndim < 2:
        array = array.reshape(rows, cols)
    if array.shape != (rows, cols):
        raise ValueError(f"Matrix {label} must be {rows}x{cols}, got {array.shape}")
    return array


class StateSpaceModel:
    """
    Discrete or continuous linear system x' = A x + B u, y = C x + D u.

    Attributes:
        A, B, C, D (np.ndarray): System matrices (n x n, n x m, p x n, p x m)
        dt (float or None): Sample period in seconds; None for continuous time
        input_labels (list): One label per input column
        output_labels (list): One label per output row
        metadata (dict): Estimation details (singular values, horizon, ...)
        warnings (list): Non-fatal findings recorded during estimation
    """

    def __init__(
        self,
        A,
        B,
        C,
        D,
        dt: Optional[float],
        input_labels: Optional[Sequence[str]] = None,
        output_labels: Optional[Sequence[str]] = None,
        metadata: Optional[Dict[str, Any]] = None,
        warnings: Optional[List[str]] = None
    ):
        A = np.atleast_2d(np.array(A, dtype=float))
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError(f"A must be square, got {A.shape}")
        B = np.array(B, dtype=float)
        C = np.array(C, dtype=float)
        m = B.shape[1] if B.ndim == 2 else (len(input_labels) if input_labels else 1)
        p = C.shape[0] if C.ndim == 2 else (len(output_labels) if output_labels else 1)

        self.A = A
        self.B = _matrix(B, n, m, "B")
        self.C = _matrix(C, p, n, "C")
        self.D = _matrix(D, p, m, "D")

        if dt is not None:
            dt = float(dt)
            if not dt > 0:
                raise ValueError(f"Sample period must be positive, got {dt}")
        self.dt = dt

        self.input_labels = list(input_labels) if input_labels else [f"u{i}" for i in range(m)]
        self.output_labels = list(output_labels) if output_labels else [f"y{i}" for i in range(p)]
        if len(self.input_labels) != m or len(self.output_labels) != p:
            raise ValueError("Label counts must match the input/output dimensions")

        self.metadata = dict(metadata or {})
        self.warnings = list(warnings or [])

    @property
    def order(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.B.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.C.shape[0]

    @property
    def is_continuous(self) -> bool:
        return self.dt is None

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.A)

    def is_stable(self) -> bool:
        """Unit-circle test for discrete models, left half plane for continuous ones."""
        eig = self.eigenvalues()
        if self.is_continuous:
            return bool(np.all(eig.real < 0))
        return bool(np.all(np.abs(eig) < 1))

    def __repr__(self) -> str:
        kind = CONTINUOUS if self.is_continuous else f"dt={self.dt}"
        return (f"StateSpaceModel(order={self.order}, inputs={self.n_inputs}, "
                f"outputs={self.n_outputs}, {kind})")

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert the model to its JSON schema (matrices row-major with dimensions).

        Returns:
            Dictionary representation of the model
        """
        def pack(matrix: np.ndarray) -> Dict[str, Any]:
            return {"rows": matrix.shape[0], "cols": matrix.shape[1],
                    "data": [float(v) for v in matrix.ravel()]}

        return {
            "type": "state_space",
            "dt": CONTINUOUS if self.is_continuous else self.dt,
            "A": pack(self.A),
            "B": pack(self.B),
            "C": pack(self.C),
            "D": pack(self.D),
            "input_labels": self.input_labels,
            "output_labels": self.output_labels,
            "metadata": self.metadata,
            "warnings": self.warnings,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StateSpaceModel":
        def unpack(block: Dict[str, Any]) -> np.ndarray:
            return np.array(block["data"], dtype=float).reshape(block["rows"], block["cols"])

        dt = data["dt"]
        return cls(
            unpack(data["A"]), unpack(data["B"]), unpack(data["C"]), unpack(data["D"]),
            None if dt == CONTINUOUS else float(dt),
            input_labels=data.get("input_labels"),
            output_labels=data.get("output_labels"),
            metadata=data.get("metadata"),
            warnings=data.get("warnings"),
        )
