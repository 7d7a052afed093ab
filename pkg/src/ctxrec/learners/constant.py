"""Constant fallback model for degenerate training sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ConstantModel:
    value: float
    columns: list[str]
    kind: str
    degenerate: bool = True

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.full(len(np.asarray(X)), self.value)

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "columns": list(self.columns),
            "constant": self.value,
            "degenerate": True,
        }
