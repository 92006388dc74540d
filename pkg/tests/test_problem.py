import json
from pathlib import Path

import numpy as np
import pytest

from bjapprox.problem import ProblemError, ProblemFile, canonical_json, content_digest
from bjapprox.space import INF, DimensionError, SpaceSpec

PROBLEMS = Path(__file__).resolve().parents[1] / "problems"

BASE = {"space": {"p": 1, "dim": 4}, "x0": [1, 1, 1, 1], "basis": [[1, 2, 0, 0], [-1, 0, 2, 0]]}


def test_from_dict():
    prob = ProblemFile.from_dict(BASE)
    assert prob.space == SpaceSpec.plain(1, 4)
    assert prob.basis.shape == (2, 4)
    assert prob.tolerance is None and prob.seed is None


def test_mixed_space_and_inf():
    data = {"space": {"outer_p": "inf", "blocks": [{"dim": 1, "p": 2}, {"dim": 2, "p": "inf"}]},
            "x0": [1, 2, 3], "basis": [[0, 1, 0]], "tolerance": 1e-8, "seed": 3}
    prob = ProblemFile.from_dict(data)
    assert prob.space.outer_p == INF and prob.space.blocks == ((1, 2.0), (2, INF))
    assert prob.tolerance == 1e-8 and prob.seed == 3
    assert ProblemFile.from_dict(prob.to_dict()).to_dict() == prob.to_dict()


@pytest.mark.parametrize("patch", [
    {"x0": None},
    {"basis": []},
    {"basis": [1, 2, 3, 4]},
    {"x0": [1, "a", 1, 1]},
    {"x0": [1, True, 1, 1]},
    {"space": {"p": 0.5, "dim": 4}},
    {"space": {"dim": 4}},
    {"tolerance": -1.0},
    {"seed": -1},
    {"seed": 1.5},
])
def test_malformed(patch):
    data = {**BASE, **patch}
    data = {k: v for k, v in data.items() if v is not None}
    with pytest.raises(ProblemError):
        ProblemFile.from_dict(data)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        ProblemFile.from_dict({**BASE, "x0": [1, 1, 1]})
    with pytest.raises(DimensionError):
        ProblemFile.from_dict({**BASE, "basis": [[1, 2, 0]]})


def test_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ProblemError):
        ProblemFile.load(bad)
    with pytest.raises(ProblemError):
        ProblemFile.load(tmp_path / "missing.json")


def test_digest_is_canonical():
    a = ProblemFile.from_dict(BASE)
    b = ProblemFile.from_dict(json.loads(json.dumps(BASE, indent=4)))
    assert a.digest() == b.digest()
    assert a.digest().startswith("sha256:")
    assert content_digest({"b": 1, "a": 2}) == content_digest({"a": 2, "b": 1})
    assert canonical_json({"b": [1.0], "a": "x"}) == '{"a":"x","b":[1.0]}'
    c = ProblemFile.from_dict({**BASE, "x0": [1, 1, 1, 2]})
    assert c.digest() != a.digest()


def test_shipped_problem_files_load():
    files = sorted(PROBLEMS.glob("*.json"))
    assert files
    for path in files:
        prob = ProblemFile.load(path)
        assert prob.x0.size == prob.space.dim
        assert np.all(np.isfinite(prob.basis))
