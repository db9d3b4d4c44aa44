"""CLI behavior: subcommands, exit codes, canonical output."""

import json

import numpy as np
import pytest

from holotet.cli import canonical_json, main
from holotet.datasets import load_dataset


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_reconstruct_bundled_elliptic(capsys):
    code, out, _ = run_cli(capsys, "reconstruct", "--dataset", "appendix_b_elliptic")
    assert code == 0
    doc = json.loads(out)
    assert doc["sigma"] == 1
    assert doc["gram"]["det"] == pytest.approx(-0.240260, abs=1e-4)


def test_reconstruct_bundled_mixed_text(capsys):
    code, out, _ = run_cli(capsys, "reconstruct", "--dataset", "appendix_b_mixed",
                           "--format", "text")
    assert code == 0
    assert "sigma: -1" in out
    assert "parabolic" in out


def test_reconstruct_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("this is { not json")
    code, _, err = run_cli(capsys, "reconstruct", "--input", str(bad))
    assert code == 2
    assert "invalid JSON" in err


def test_reconstruct_missing_field(tmp_path, capsys):
    doc = tmp_path / "doc.json"
    doc.write_text(json.dumps({"kind": "so12"}))
    code, _, err = run_cli(capsys, "reconstruct", "--input", str(doc))
    assert code == 2


def test_reconstruct_central_exit_code(tmp_path, capsys):
    ident = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    doc = tmp_path / "central.json"
    doc.write_text(json.dumps({"kind": "so12", "matrices": [ident] * 4}))
    code, _, err = run_cli(capsys, "reconstruct", "--input", str(doc))
    assert code == 25
    assert "CentralHolonomy" in err


def test_reconstruct_derive_fourth_flag(tmp_path, capsys):
    bundled = load_dataset("appendix_b_mixed")
    doc = tmp_path / "three.json"
    doc.write_text(json.dumps({"kind": "so12", "matrices": bundled["matrices"]}))
    code, _, err = run_cli(capsys, "reconstruct", "--input", str(doc))
    assert code == 2  # three matrices without the flag
    code, out, _ = run_cli(capsys, "reconstruct", "--input", str(doc),
                           "--derive-fourth")
    assert code == 0
    assert json.loads(out)["sigma"] == -1


def test_forward_inertia_mismatch_exit_code(tmp_path, capsys):
    doc = tmp_path / "identity_gram.json"
    doc.write_text(json.dumps({"upper": [1, 0, 0, 0, 1, 0, 0, 1, 0, 1],
                               "sigma": -1}))
    code, _, err = run_cli(capsys, "forward", "--input", str(doc))
    assert code == 13
    assert "InertiaMismatch" in err


def test_forward_bundled_exact(capsys):
    code, out, _ = run_cli(capsys, "forward", "--dataset", "appendix_a_null_fin",
                           "--exact")
    assert code == 0
    doc = json.loads(out)
    assert sorted(abs(t) for t in doc["lift_traces"]) == pytest.approx([2.0] * 4)
    assert doc["closure_residual"] <= 1e-12


def test_classify_bundled_and_random(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "classify", "--dataset", "appendix_a_ell_id",
                           "--exact")
    assert code == 0
    assert json.loads(out)["vertex_types"] == ["finite", "finite", "finite", "ideal"]
    rng = np.random.default_rng(3)
    a = rng.normal(size=(4, 4))
    m = (a + a.T) / 2
    upper = [m[i][j] for i in range(4) for j in range(i, 4)]
    doc = tmp_path / "rand.json"
    doc.write_text(json.dumps({"upper": upper}))
    code, out, _ = run_cli(capsys, "classify", "--input", str(doc))
    assert code == 0
    assert json.loads(out)["model"] in ("dS3", "AdS3", "indeterminate")


def test_roundtrip_command(capsys):
    code, out, _ = run_cli(capsys, "roundtrip", "--dataset", "appendix_a_ell_fin",
                           "--exact")
    assert code == 0
    doc = json.loads(out)
    assert doc["gram_deviation"] <= 1e-9
    assert doc["det_deviation"] <= 1e-9


def test_flatcheck_command(tmp_path, capsys):
    payload = {
        "faces": [
            {"normal": [1.0, 0.0, 0.0], "area": 2.0, "support": 0.3},
            {"normal": [-1.0, 0.0, 0.0], "area": 2.0, "support": 0.4},
            {"normal": [0.0, 0.0, 1.0], "area": 1.0, "support": 0.5},
            {"normal": [0.0, 0.0, -1.0], "area": 1.0, "support": 0.6},
        ],
        "radii": [6.0, 12.0],
        "sigma": 1,
    }
    doc = tmp_path / "flat.json"
    doc.write_text(json.dumps(payload))
    code, out, _ = run_cli(capsys, "flatcheck", "--input", str(doc))
    assert code == 0
    body = json.loads(out)
    assert body["closure_residual_norm"] == 0.0
    assert body["gram_scaling_ratios"][0] == pytest.approx(4.0, rel=0.1)


def test_forward_tetrahedron_document(tmp_path, capsys):
    from holotet.forward import roundtrip as run_roundtrip
    from conftest import gram_dataset
    rt = run_roundtrip(gram_dataset("appendix_a_null_fin"), -1)
    doc = tmp_path / "tetra.json"
    doc.write_text(json.dumps({"tetrahedron": {
        "sigma": -1,
        "normals": [[float(x) for x in row] for row in rt.tetrahedron.normals],
        "vertices": [[float(x) for x in row] for row in rt.tetrahedron.vertices],
    }}))
    code, out, _ = run_cli(capsys, "forward", "--input", str(doc))
    assert code == 0
    body = json.loads(out)
    assert body["face_classes"] == ["parabolic"] * 4
    assert body["closure_residual"] <= 1e-10


def test_verify_paper_command(capsys):
    code, out, _ = run_cli(capsys, "verify-paper")
    assert code == 0
    assert "failed" in out
    assert "FAIL" not in out


def test_verify_paper_json_format(capsys):
    code, out, _ = run_cli(capsys, "verify-paper", "--format", "json")
    assert code == 0
    body = json.loads(out)
    assert body["all_passed"] is True and body["failed"] == 0


def test_datasets_command(capsys):
    code, out, _ = run_cli(capsys, "datasets")
    assert code == 0
    assert "appendix_b_mixed" in out.split()


def test_dataset_directory_override(tmp_path, capsys, monkeypatch):
    bundled = load_dataset("appendix_b_elliptic")
    (tmp_path / "custom.json").write_text(json.dumps(bundled))
    monkeypatch.setenv("HOLOTET_DATASETS", str(tmp_path))
    code, out, _ = run_cli(capsys, "datasets")
    assert code == 0 and out.split() == ["custom"]
    code, out, _ = run_cli(capsys, "reconstruct", "--dataset", "custom")
    assert code == 0
    assert json.loads(out)["sigma"] == 1


def test_emitted_json_is_canonical(capsys):
    code, out, _ = run_cli(capsys, "reconstruct", "--dataset", "appendix_b_elliptic")
    assert code == 0
    assert out == canonical_json(json.loads(out)) + "\n"
