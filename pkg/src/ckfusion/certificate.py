"""Certificate values returned by every verification routine."""

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .algebra import AlgebraElement
from .hilbert_module import ModuleVector

PROOF = "proof"
EVIDENCE = "evidence"
INDEPENDENT = "conclusion checked independently"


@dataclass
class HypothesisResult:
    name: str
    passed: bool
    residual: Optional[float] = None
    note: str = ""


@dataclass
class Certificate:
    claim: str
    conclusion_verified: bool
    hypothesis_results: list = field(default_factory=list)
    predicted_bound: Any = None
    measured_bound: Any = None
    residuals: dict = field(default_factory=dict)
    witness: Optional[ModuleVector] = None
    labels: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def verdict(self):
        return self.conclusion_verified

    @property
    def hypotheses_passed(self):
        return all(h.passed for h in self.hypothesis_results)

    def hypothesis(self, name):
        for h in self.hypothesis_results:
            if h.name == name:
                return h
        raise KeyError(name)

    def to_json(self):
        out = {
            "claim": self.claim,
            "verdict": bool(self.conclusion_verified),
            "hypotheses": [
                {"name": h.name, "passed": bool(h.passed), "residual": _plain(h.residual), "note": h.note}
                for h in self.hypothesis_results
            ],
            "predicted_bound": _plain(self.predicted_bound),
            "measured_bound": _plain(self.measured_bound),
            "residuals": _plain(self.residuals),
            "labels": list(self.labels),
        }
        if self.details:
            out["details"] = _plain(self.details)
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def _plain(x):
    """Convert numpy/algebra values into JSON-friendly Python objects."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, AlgebraElement):
        v = x.values
        return v.real.tolist() if np.all(v.imag == 0) else x.to_json()
    if isinstance(x, ModuleVector):
        return x.to_json()
    if isinstance(x, Certificate) or hasattr(x, "to_json"):
        return _plain(x.to_json())
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x) and np.any(x.imag != 0):
            return _plain(np.stack([x.real, x.imag], axis=-1))
        return [_plain(v) for v in np.real(x).tolist()] if x.ndim else _plain(x.item())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if np.isnan(x) or np.isinf(x):
            return None
        return x
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x
