"""Problem files: JSON with a space, a point ``x0`` and the basis of ``Y``.

Example::

    {"space": {"p": 1, "dim": 4},
     "x0": [1, 1, 1, 1],
     "basis": [[1, 2, 0, 0], [-1, 0, 2, 0]]}

Mixed spaces use ``{"outer_p": 5, "blocks": [{"dim": 1, "p": 2}, ...]}`` and
infinite exponents the string ``"inf"``.  ``tolerance`` and ``seed`` are
optional.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .space import DimensionError, SpaceSpec


class ProblemError(ValueError):
    """Malformed problem file."""


@dataclass(frozen=True)
class ProblemFile:
    space: SpaceSpec
    x0: np.ndarray
    basis: np.ndarray
    tolerance: float | None = None
    seed: int | None = None

    @classmethod
    def from_dict(cls, data, require_basis: bool = True) -> "ProblemFile":
        if not isinstance(data, dict):
            raise ProblemError("problem must be a JSON object")
        missing = [k for k in ("space", "x0", "basis") if k not in data]
        if missing:
            raise ProblemError(f"missing field(s): {', '.join(missing)}")
        try:
            space = SpaceSpec.from_dict(data["space"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ProblemError(f"bad space: {exc}") from exc
        x0 = _real_vector(data["x0"], "x0")
        basis = data["basis"]
        if not isinstance(basis, list) or not all(isinstance(r, list) for r in basis):
            raise ProblemError("basis must be a list of lists")
        if require_basis and not basis:
            raise ProblemError("basis must be nonempty")
        rows = [_real_vector(r, f"basis[{i}]") for i, r in enumerate(basis)]
        if x0.size != space.dim:
            raise DimensionError(f"x0 has length {x0.size}, space has dimension {space.dim}")
        for i, r in enumerate(rows):
            if r.size != space.dim:
                raise DimensionError(f"basis[{i}] has length {r.size}, space has dimension {space.dim}")
        B = np.array(rows, float).reshape(len(rows), space.dim)
        tol = data.get("tolerance")
        if tol is not None and not (_is_number(tol) and tol > 0):
            raise ProblemError("tolerance must be a positive number")
        seed = data.get("seed")
        if seed is not None and not (isinstance(seed, int) and not isinstance(seed, bool) and seed >= 0):
            raise ProblemError("seed must be a nonnegative integer")
        return cls(space, x0, B, None if tol is None else float(tol), seed)

    @classmethod
    def load(cls, path, require_basis: bool = True) -> "ProblemFile":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ProblemError(f"cannot read {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ProblemError(f"invalid JSON in {path}: {exc}") from exc
        return cls.from_dict(data, require_basis)

    def to_dict(self) -> dict:
        out = {
            "space": self.space.to_dict(),
            "x0": [float(v) for v in self.x0],
            "basis": [[float(v) for v in row] for row in self.basis],
        }
        if self.tolerance is not None:
            out["tolerance"] = self.tolerance
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form."""
        return content_digest(self.to_dict())


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), allow_nan=False)


def content_digest(data) -> str:
    return "sha256:" + hashlib.sha256(canonical_json(data).encode()).hexdigest()


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _real_vector(v, what: str) -> np.ndarray:
    if not isinstance(v, list) or not all(_is_number(t) for t in v):
        raise ProblemError(f"{what} must be a list of finite numbers")
    return np.array(v, float)
