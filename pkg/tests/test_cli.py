import json

import pytest

from stdsa.cli import main
from stdsa.ingest import load_normalized

from conftest import FIXTURES, SAMPLE_CSV


@pytest.fixture(autouse=True)
def no_env_dataset(monkeypatch):
    monkeypatch.delenv("STDSA_DATASET", raising=False)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_recommend_writes_outputs(tmp_path, capsys):
    code, out, _ = run(capsys, "recommend", "--dataset", SAMPLE_CSV, "--target", "Germany",
                       "--output-dir", tmp_path, "--k", 4, "--seed", 7, "--keep-intermediate")
    assert code == 0
    report = json.loads(out)
    assert report["parameters"]["k"] == 4 and report["parameters"]["seed"] == 7
    assert report["parameters"]["chosen_k"] == 4
    for name in ("report.json", "report.txt", "recommendations.csv", "normalized.csv", "neighbors.csv",
                 "profile.csv", "second_filter_clusters.csv", "second_filter_elbow.csv", "baseline_clusters.csv"):
        assert (tmp_path / name).exists(), name
    assert json.loads((tmp_path / "report.json").read_text())["target"] == "Germany"
    assert len(load_normalized(tmp_path / "normalized.csv")) == 10


def test_unknown_target_is_data_error(tmp_path, capsys):
    code, _, err = run(capsys, "recommend", "--dataset", SAMPLE_CSV, "--target", "Atlantis", "--output-dir", tmp_path)
    assert code == 2
    assert "unknown region" in err.lower()


def test_usage_errors(tmp_path, capsys):
    assert run(capsys, "recommend", "--dataset", SAMPLE_CSV, "--output-dir", tmp_path)[0] == 1
    assert run(capsys, "recommend", "--dataset", SAMPLE_CSV, "--target", "Germany", "--k", "many",
               "--output-dir", tmp_path)[0] == 1
    assert run(capsys, "recommend", "--target", "Germany", "--output-dir", tmp_path)[0] == 1
    assert run(capsys, "recommend", "--dataset", SAMPLE_CSV, "--target", "Germany", "--metric-variant", "x:y",
               "--output-dir", tmp_path)[0] == 1
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1


def test_missing_file_is_data_error(tmp_path, capsys):
    code, _, _ = run(capsys, "ingest", "--dataset", tmp_path / "nope.csv", "--output-dir", tmp_path)
    assert code == 2


def test_stats_outputs(tmp_path, capsys):
    code, out, _ = run(capsys, "stats", "--dataset", SAMPLE_CSV, "--output-dir", tmp_path,
                       "--indicator", "population_density")
    assert code == 0
    assert list(json.loads(out)) == ["population_density"]
    for name in ("box_stats.csv", "outliers.csv", "pcc_matrix.csv", "elbow_curve.csv"):
        assert (tmp_path / name).read_text().strip()
    assert run(capsys, "stats", "--dataset", SAMPLE_CSV, "--output-dir", tmp_path, "--indicator", "wealth")[0] == 1


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# sample run\ndataset = {SAMPLE_CSV}\nseed = 3\nrestarts = 4\noutput-dir = {tmp_path / 'o'}\n")
    code, out, _ = run(capsys, "recommend", "--config", cfg, "--target", "Germany", "--seed", 9)
    assert code == 0
    params = json.loads(out)["parameters"]
    assert (params["seed"], params["restarts"]) == (9, 4)
    assert (tmp_path / "o" / "report.json").exists()


def test_env_dataset_fallback(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("STDSA_DATASET", str(SAMPLE_CSV))
    code, out, _ = run(capsys, "baseline", "--target", "Germany", "--baseline-k", 3, "--output-dir", tmp_path)
    assert code == 0
    payload = json.loads(out)
    assert payload["chosen_k"] == 3 and sum(payload["cluster_sizes"]) == 10
    assert (tmp_path / "baseline.json").exists()


def test_metrics_from_profile(capsys):
    code, out, _ = run(capsys, "metrics", "--profile", FIXTURES / "table5_sweden.csv", "--target", "Sweden",
                       "--format", "csv")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.startswith("target,contrast")
    assert row.startswith("Sweden,") and row.endswith(",relative,half")


def test_text_format(tmp_path, capsys):
    code, out, _ = run(capsys, "metrics", "--profile", FIXTURES / "table5_sweden.csv", "--target", "Sweden",
                       "--format", "text")
    assert code == 0 and "recommended: Ireland, Italy, Spain" in out
