"""JSON persistence for frame systems.

Submodules are stored as generators; orthonormal bases are rebuilt on load.
Complex numbers are [re, im] pairs throughout.
"""

import hashlib
import json

from ._linalg import DEFAULT_TOL
from .algebra import AlgebraElement
from .errors import ShapeMismatch, ValidationFailed
from .frames import FrameSystem
from .hilbert_module import Submodule
from .operators import ModuleOperator


def frame_to_json(F):
    return {
        "algebra": {"d": F.d},
        "n": F.n,
        "submodules": [W.to_json() for W in F.submodules],
        "weights": [w.to_json() for w in F.weights],
        "C": F.C.to_json(),
        "Cp": F.Cp.to_json(),
        "K": F.K.to_json(),
    }


def frame_from_json(data, tol=DEFAULT_TOL):
    try:
        d = int(data["algebra"]["d"])
        n = int(data["n"])
        raw_subs = data["submodules"]
        raw_w = data["weights"]
        ops = {k: ModuleOperator.from_json(data[k]) for k in ("C", "Cp", "K")}
    except KeyError as exc:
        raise ValidationFailed(f"missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ValidationFailed(f"malformed field: {exc}") from None
    for name, T in ops.items():
        if (T.d, T.n) != (d, n):
            raise ShapeMismatch(f"{name} has shape (d={T.d}, n={T.n}), header says (d={d}, n={n})")
    subs = [Submodule.from_json(s, n, d, tol) for s in raw_subs]
    weights = [AlgebraElement.from_json(w) for w in raw_w]
    return FrameSystem(subs, weights, ops["C"], ops["Cp"], ops["K"], tol)


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=1)


def save_frame(F, path):
    with open(path, "w") as fh:
        fh.write(dumps(frame_to_json(F)))
        fh.write("\n")


def load_frame(path, tol=DEFAULT_TOL):
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValidationFailed(f"{path}: not valid JSON ({exc})") from None
    return frame_from_json(data, tol), hashlib.sha256(raw).hexdigest()
