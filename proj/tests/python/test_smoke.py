import json
import os
import subprocess

import pytest

import ordcollab


def test_version():
    assert ordcollab.version().startswith("ordcollab ")


def test_parameter_counts():
    assert ordcollab.parameter_count(7) == 507505
    assert ordcollab.parameter_count(23) == 515505
    assert ordcollab.parameter_count(30) == 519005


def test_losses():
    p = [0.1, 0.6, 0.1, 0.1, 0.1]
    y = [0.0, 0.0, 0.0, 1.0, 0.0]
    ce = ordcollab.ce_loss(p, y)
    assert ce == pytest.approx(-__import__("math").log(0.1))
    assert ordcollab.oce_loss(p, y) == pytest.approx(3.0 * ce, rel=1e-12)
    assert ordcollab.oce_loss(p, [0, 1, 0, 0, 0]) == ordcollab.ce_loss(p, [0, 1, 0, 0, 0])


def test_lambdas_respect_threshold():
    lams = ordcollab.sample_lambdas(0.2, 0.75, 500, 3)
    assert len(lams) == 500
    assert min(lams) >= 0.75 and max(lams) <= 1.0


def test_weighted_metrics():
    m = ordcollab.weighted_metrics([0, 1, 2], [0, 1, 1])
    assert m["recall"] == pytest.approx(2 / 3)


def test_synth_and_experiment(tmp_path):
    assert ordcollab.synth_corpus(tmp_path / "corpus", {"seed": 3}) == 117
    cfg = {
        "corpus": str(tmp_path / "corpus"),
        "loss": "OCE",
        "train": {"epochs": 2},
        "network": {"hidden_width": 8},
        "seed": 1,
    }
    ds = ordcollab.load_dataset(cfg)
    assert len(ds["labels"]) == 351
    report = ordcollab.run_experiment(cfg, jobs=2)
    assert len(report["folds"]) == 14
    assert 0.0 <= report["summary"]["f1"]["mean"] <= 1.0
    assert ordcollab.run_experiment(cfg, jobs=1) == report


def test_config_error_exit_code(tmp_path):
    code, _, err = ordcollab.run_cli(["eval", "--corpus", str(tmp_path), "--tau", "1.2"])
    assert code == 1
    assert "tau must lie in [0, 1)" in err
    with pytest.raises(ordcollab.ConfigError):
        ordcollab.run_experiment({"corpus": str(tmp_path), "mixup": {"tau": 1.2}})


def test_cli_binary(tmp_path):
    exe = os.environ.get("ORDCOLLAB_CLI")
    if not exe:
        pytest.skip("ORDCOLLAB_CLI not set")
    assert subprocess.run([exe, "synth", "-o", str(tmp_path / "c")]).returncode == 0
    assert json.loads((tmp_path / "c" / "synth_config.json").read_text())["seed"] == 0
