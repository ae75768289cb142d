import json

import numpy as np
import pytest
from instances import random_frame

from ckfusion.cli import main, run
from ckfusion.errors import ShapeMismatch, ValidationFailed
from ckfusion.generate import InstanceSpec, generate
from ckfusion.io import frame_from_json, frame_to_json, load_frame, save_frame


@pytest.mark.parametrize("mode", ["equal", "commuting", "identity"])
def test_round_trip(tmp_path, mode):
    F = random_frame(17, d=2, n=5, m=4, mode=mode, rank_range=(0, 4))
    p = tmp_path / "f.json"
    save_frame(F, p)
    G, digest = load_frame(p)
    assert len(digest) == 64
    for X, Y in ((F.C, G.C), (F.Cp, G.Cp), (F.K, G.K)):
        np.testing.assert_allclose(X.blocks, Y.blocks, atol=1e-12, rtol=0)
    for W, V in zip(F.submodules, G.submodules):
        np.testing.assert_allclose(W.projection_blocks(), V.projection_blocks(), atol=1e-12, rtol=0)
    np.testing.assert_allclose(F.frame_blocks, G.frame_blocks, atol=1e-12)


def test_malformed_json_is_rejected():
    data = frame_to_json(random_frame(1, d=1, n=3, m=2))
    bad = dict(data)
    del bad["K"]
    with pytest.raises(ValidationFailed, match="K"):
        frame_from_json(bad)
    bad = dict(data, n=4)
    with pytest.raises(ShapeMismatch):
        frame_from_json(bad)


def test_spec_validation():
    with pytest.raises(ValidationFailed):
        InstanceSpec(d=1, n=3, m=2, rank_range=(0, 4))
    with pytest.raises(ValidationFailed):
        InstanceSpec(d=1, n=3, m=2, k_rank=4)
    with pytest.raises(ValidationFailed):
        InstanceSpec(d=1, n=3, m=2, control_condition=0.5)


def test_generation_is_seeded():
    spec = InstanceSpec(d=2, n=4, m=3, rank_range=(1, 3), seed=99)
    a, b = generate(spec), generate(spec)
    assert json.dumps(frame_to_json(a)) == json.dumps(frame_to_json(b))


def _cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_gen_is_byte_identical(tmp_path, capsys):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    args = ["gen", "--d", "2", "--n", "4", "--m", "3", "--seed", "7"]
    assert _cli(args + ["--out", str(p1)], capsys)[0] == 0
    assert _cli(args + ["--out", str(p2)], capsys)[0] == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_gen_coordinate_preset_bounds(tmp_path, capsys):
    p = tmp_path / "c.json"
    code, _ = _cli(["gen", "--preset", "coordinate", "--d", "1", "--n", "2", "--m", "2", "--seed", "1", "--out", str(p)], capsys)
    assert code == 0
    code, rep = _cli(["bounds", str(p)], capsys)
    assert code == 0
    assert rep["bounds"]["A_scalar"] == pytest.approx(1) and rep["bounds"]["B_scalar"] == pytest.approx(1)


def test_gen_zero_k(tmp_path, capsys):
    p = tmp_path / "z.json"
    assert _cli(["gen", "--d", "2", "--n", "3", "--m", "2", "--k-rank", "0", "--out", str(p)], capsys)[0] == 0
    _, rep = _cli(["bounds", str(p)], capsys)
    assert rep["bounds"]["constrained_components"] == [False, False]


def test_sequence_example_command(capsys):
    code, rep = _cli(["sequence-example", "--N", "8"], capsys)
    assert code == 0
    assert rep["summary"] == {"controlled_fusion": False, "controlled_k_fusion": True}
    assert rep["certificates"][0]["witness"] is not None


def test_erase_command_fails_with_witness(tmp_path, capsys):
    p = tmp_path / "c.json"
    _cli(["gen", "--preset", "coordinate", "--n", "3", "--m", "3", "--out", str(p)], capsys)
    code, rep = _cli(["erase-check", str(p), "--J", "0"], capsys)
    assert code == 1
    assert "witness" in rep["certificates"][0]


def test_validate_reconstruct_perturb(tmp_path, capsys):
    p = tmp_path / "r.json"
    _cli(["gen", "--d", "2", "--n", "4", "--m", "4", "--mode", "identity", "--seed", "3", "--out", str(p)], capsys)
    assert _cli(["validate", str(p)], capsys)[0] == 0
    code, rep = _cli(["reconstruct", str(p), "--seed", "2"], capsys)
    assert code == 0 and rep["residuals"]["relative"] < 1e-8
    code, rep = _cli(["perturb-check", str(p), "--magnitude", "1e-4", "--samples", "50"], capsys)
    assert code == 0


def test_invalid_input_exit_code(tmp_path, capsys):
    assert main(["bounds", str(tmp_path / "missing.json")]) == 2
    err = capsys.readouterr().err
    assert "cannot read" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["validate", str(bad)]) == 2
    assert main(["sequence-example", "--N", "7"]) == 2
    assert main(["gen", "--n", "3", "--k-rank", "5"]) == 2


def test_reports_are_deterministic(tmp_path):
    p = tmp_path / "r.json"
    run(["gen", "--d", "1", "--n", "4", "--m", "3", "--seed", "5", "--out", str(p)])
    argv = ["perturb-check", str(p), "--magnitude", "0.001", "--seed", "4", "--samples", "30"]
    r1, r2 = run(argv)[1], run(argv)[1]
    r1.pop("wall_time"), r2.pop("wall_time")
    assert json.dumps(r1, sort_keys=True, default=str) == json.dumps(r2, sort_keys=True, default=str)
