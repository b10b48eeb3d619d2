import json
from pathlib import Path

import numpy as np
import pytest

from perimetry.cli import ConfigError, ExperimentConfig, main, resolve_shape
from perimetry.geometry import Disk, Union, shape_to_json
from perimetry.grids import GridSpec


def write_config(tmp_path, **data):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return path


def test_config_defaults():
    cfg = ExperimentConfig()
    assert cfg.n == 512 and cfg.length == 2.0
    assert cfg.spec() == GridSpec(512, 2.0)
    assert cfg.schedule() == (0.0625, 0.03125, 0.015625, 0.0078125)
    assert cfg.ladder() == (0.1, 0.2, 0.4)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(n=4)
    with pytest.raises(ConfigError):
        ExperimentConfig(ratio=1.2)
    with pytest.raises(ConfigError):
        ExperimentConfig(count=1)
    with pytest.raises(ConfigError):
        ExperimentConfig(threads=0)
    with pytest.raises(ConfigError):
        ExperimentConfig(delta_ladder=(0.4, 0.2))
    with pytest.raises(ConfigError):
        # schedule cannot reach two epsilons above the 2h floor
        ExperimentConfig(n=64, length=2.0)


def test_config_from_json_key_mapping():
    cfg = ExperimentConfig.from_json(
        {"grid": {"N": 256, "L": 2.0}, "schedule": {"eps0": 0.25, "ratio": 0.5},
         "angles": 64}
    )
    assert cfg.n == 256 and cfg.n_angles == 64
    assert cfg.schedule()[0] == 0.25
    # overrides win over file values
    cfg2 = ExperimentConfig.from_json({"N": 256, "eps0": 0.25}, threads=4)
    assert cfg2.threads == 4
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json({"N": 256, "wavelets": True})


def test_config_json_omits_threads():
    doc = ExperimentConfig(n=256, eps0=0.25, threads=8).to_json()
    assert "threads" not in json.dumps(doc)


def test_resolve_shape_forms(tmp_path):
    disk = resolve_shape('{"type": "disk", "center": [0, 0], "radius": 0.5}')
    assert isinstance(disk, Disk)
    path = tmp_path / "shape.json"
    path.write_text(json.dumps(shape_to_json(Disk((0.1, 0.0), 0.2))))
    loaded = resolve_shape(str(path))
    assert isinstance(loaded, Disk) and loaded.radius == 0.2
    named = resolve_shape("holed_disk")
    assert type(named).__name__ == "Difference"
    seeded = resolve_shape("random_polygon", seed=5)
    assert np.array_equal(
        np.asarray(seeded.vertices),
        np.asarray(resolve_shape("random_polygon", seed=5).vertices),
    )


def test_unknown_shape_is_config_error(tmp_path, capsys):
    code = main(["convexity", "--shape", "octagon", "--out", str(tmp_path / "o")])
    assert code == 2
    diag = json.loads(capsys.readouterr().err)
    assert "octagon" in diag["error"]


def test_bad_config_file_is_config_error(tmp_path, capsys):
    code = main([
        "perimeter-scaling", "--config", str(tmp_path / "missing.json"),
        "--out", str(tmp_path / "o"),
    ])
    assert code == 2
    diag = json.loads(capsys.readouterr().err)
    assert diag["kind"] == "ConfigError"
    bad = write_config(tmp_path, N=256, frobnicate=1)
    code = main(["perimeter-scaling", "--config", str(bad), "--out", str(tmp_path / "o")])
    assert code == 2
    diag = json.loads(capsys.readouterr().err)
    assert "frobnicate" in diag["error"]


def test_scaling_command_artifacts(tmp_path):
    cfg = write_config(tmp_path, N=256, L=2.0, eps0=0.25, angles=64)
    out = tmp_path / "scaling"
    code = main([
        "perimeter-scaling", "--config", str(cfg), "--shape", "disk", "--out", str(out),
    ])
    assert code == 0
    fit = json.loads((out / "fit.json").read_text())
    assert fit["pass"] is True
    assert fit["r2"] >= 0.99
    band = fit["ratio_band"]
    assert band[0] <= fit["slope_over_crofton"] <= band[1]
    csv = (out / "scaling.csv").read_text().splitlines()
    assert csv[0] == "abs_log_eps,energy"
    assert len(csv) == 1 + len(fit["points"])
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "perimeter-scaling"
    assert "threads" not in json.dumps(manifest["config"])
    assert "calibration_c" in manifest["constants"]
    assert (out / "scaling.png").exists()


def test_no_figures_flag(tmp_path):
    cfg = write_config(tmp_path, N=256, L=2.0, eps0=0.25, angles=64)
    out = tmp_path / "bare"
    code = main([
        "perimeter-scaling", "--config", str(cfg), "--shape", "disk",
        "--out", str(out), "--no-figures",
    ])
    assert code == 0
    assert not list(out.glob("*.png"))


def test_slice_identity_command(tmp_path):
    cfg = write_config(tmp_path, N=256, L=2.0, angles=64)
    out = tmp_path / "identity"
    code = main([
        "slice-identity", "--config", str(cfg), "--shape", "disk",
        "--epsilon", "0.03", "--slice-angles", "16", "--out", str(out), "--no-figures",
    ])
    assert code == 0
    doc = json.loads((out / "identity.json").read_text())
    assert doc["pass"] is True
    assert doc["slice_max_err"] <= 2e-2
    assert 0.98 <= doc["global_ratio"] <= 1.02
    assert doc["epsilon"] == 0.03


def test_convexity_exit_codes(tmp_path):
    cfg = write_config(tmp_path, N=256, L=2.0, angles=64, delta_ladder=[0.2, 0.4])
    convex_out = tmp_path / "c1"
    code = main([
        "convexity", "--config", str(cfg),
        "--shape", '{"type": "disk", "center": [0, 0], "radius": 0.3}',
        "--out", str(convex_out), "--no-figures",
    ])
    assert code == 0
    assert json.loads((convex_out / "report.json").read_text())["verdict"] == "CONVEX"

    literal = json.dumps(
        shape_to_json(Union(Disk((-0.35, 0.0), 0.15), Disk((0.35, 0.0), 0.15)))
    )
    split_out = tmp_path / "c2"
    code = main([
        "convexity", "--config", str(cfg), "--shape", literal,
        "--out", str(split_out), "--no-figures",
    ])
    assert code == 1
    report = json.loads((split_out / "report.json").read_text())
    assert report["verdict"] == "NON_CONVEX"
    assert report["witness"]["kind"] == "support_gap"


def test_convexity_from_mask(tmp_path, disk256):
    from perimetry.grids import save_mask

    mask = save_mask(disk256, tmp_path / "disk")
    cfg = write_config(tmp_path, N=256, L=2.0, angles=64, delta_ladder=[0.2, 0.4])
    out = tmp_path / "mask_run"
    code = main([
        "convexity", "--config", str(cfg), "--mask", str(mask),
        "--out", str(out), "--no-figures",
    ])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["mask"] == "disk.pgm"
    assert manifest["shape"] is None


def test_counterexample_command(tmp_path):
    cfg = write_config(tmp_path, N=512, L=2.75, angles=64)
    out = tmp_path / "demo"
    code = main([
        "counterexample", "--config", str(cfg), "--epsilon-bump", "0.05",
        "--out", str(out), "--no-figures",
    ])
    assert code == 0
    doc = json.loads((out / "counterexample.json").read_text())
    assert doc["marginals_pass"] is True
    assert doc["segment_found"] is True
    assert doc["violating_segment"] is not None


def test_artifacts_identical_across_threads(tmp_path):
    cfg = write_config(tmp_path, N=256, L=2.0, eps0=0.25, angles=64)
    outputs = []
    for threads in ("1", "4"):
        out = tmp_path / f"t{threads}"
        code = main([
            "perimeter-scaling", "--config", str(cfg), "--shape", "disk",
            "--threads", threads, "--out", str(out), "--no-figures",
        ])
        assert code == 0
        outputs.append({
            p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.suffix != ".png"
        })
    assert outputs[0] == outputs[1]


def test_repeat_runs_byte_identical(tmp_path):
    cfg = write_config(tmp_path, N=256, L=2.0, angles=64)
    blobs = []
    for name in ("a", "b"):
        out = tmp_path / name
        code = main([
            "slice-identity", "--config", str(cfg), "--shape", "disk",
            "--slice-angles", "8", "--out", str(out), "--no-figures",
        ])
        assert code == 0
        blobs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert blobs[0] == blobs[1]
