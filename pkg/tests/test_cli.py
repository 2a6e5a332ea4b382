import hashlib
import json

import numpy as np
import pytest

from dstlab.cli import main


def write_config(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def load(path):
    return json.loads(path.read_text())


# ---------------------------------------------------------------------------
# validation behavior

def test_malformed_config_exits_2_without_outputs(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "c.json",
        {"subcommand": "minimize", "params": {"n": "one", "f": 2, "m": 4}},
    )
    out = tmp_path / "out"
    rc = main(["minimize", "--config", cfg, "--out", str(out)])
    assert rc == 2
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_unknown_param_key_rejected(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "c.json",
        {"subcommand": "minimize", "params": {"n": 1, "f": 2, "m": 4, "zap": 1}},
    )
    rc = main(["minimize", "--config", cfg, "--out", str(tmp_path / "out")])
    assert rc == 2
    assert "zap" in capsys.readouterr().err


def test_unknown_toplevel_key_rejected(tmp_path):
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "lightcone-check",
            "params": {"values": {}},
            "banana": True,
        },
    )
    assert main(["lightcone-check", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_subcommand_mismatch_rejected(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "lattice",
            "params": {},
        },
    )
    rc = main(["minimize", "--config", cfg, "--out", str(tmp_path / "out")])
    assert rc == 2
    assert "invoked as" in capsys.readouterr().err


def test_missing_or_unparsable_config(tmp_path):
    assert main(["minimize", "--config", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["minimize", "--config", str(bad)]) == 2


def test_unknown_figure_rejected(tmp_path, capsys):
    rc = main(["reproduce", "--figure", "fig9", "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "fig9" in capsys.readouterr().err


def test_empty_seed_list_for_solver_rejected(tmp_path):
    cfg = write_config(
        tmp_path / "c.json",
        {"subcommand": "minimize", "params": {"n": 1, "f": 2, "m": 4}},
    )
    assert main(["minimize", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_bad_tolerance_override_rejected(tmp_path):
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "classify-causal",
            "params": {"roots": [[[1.0, 0.0]]]},
        },
    )
    tols = tmp_path / "tol.json"
    tols.write_text(json.dumps({"not_a_knob": 1e-9}))
    rc = main(
        ["classify-causal", "--config", cfg, "--out", str(tmp_path / "o"),
         "--tolerances", str(tols)]
    )
    assert rc == 2


# ---------------------------------------------------------------------------
# classify-causal

def test_classify_roots_frozen_classes(tmp_path):
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "classify-causal",
            "params": {
                "roots": [
                    [[1.0, 0.0], [2.0, 0.0]],
                    [[1.0, 1.0], [1.0, -1.0]],
                    [[1.0, 1.0], [2.0, 0.0]],
                ]
            },
        },
    )
    out = tmp_path / "out"
    assert main(["classify-causal", "--config", cfg, "--out", str(out)]) == 0
    report = load(out / "classifications.json")
    classes = [rec["class"] for rec in report["multisets"]]
    assert classes == ["timelike", "spacelike", "undetermined"]
    assert report["counts"] == {"timelike": 1, "spacelike": 1, "undetermined": 1}


def test_classify_sample_uses_seed_list_override(tmp_path):
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "classify-causal",
            "params": {"sample": {"n": 1, "m": 3, "f": 2}},
            "seeds": [0, 1, 2],
        },
    )
    out = tmp_path / "out"
    rc = main(
        ["classify-causal", "--config", cfg, "--out", str(out), "--seed-list", "7"]
    )
    assert rc == 0
    manifest = load(out / "manifest.json")
    assert manifest["seeds"] == [7]
    report = load(out / "classifications.json")
    assert [g["seed"] for g in report["graphs"]] == [7]
    assert report["graphs"][0]["graph"]["m"] == 3


# ---------------------------------------------------------------------------
# landscape + determinism + manifest contract

def _triangle_config(tmp_path, num=9):
    return write_config(
        tmp_path / "c.json",
        {
            "subcommand": "landscape",
            "params": {
                "family": "triangle",
                "start": 2.0 / 3.0,
                "stop": 0.85,
                "num": num,
            },
        },
    )


def test_landscape_csv_shape_and_endpoint(tmp_path):
    cfg = _triangle_config(tmp_path)
    out = tmp_path / "out"
    assert main(["landscape", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "landscape.csv").read_text().splitlines()
    assert lines[0] == "v,re_lam_plus,im_lam_plus,re_lam_minus,im_lam_minus"
    assert len(lines) == 10
    first = lines[1].split(",")
    assert abs(float(first[0]) - 2.0 / 3.0) < 1e-15
    # the symmetric point carries the known closed-form root pair (1/9, 0)
    assert abs(float(first[1]) - 1.0 / 9.0) < 1e-12
    assert abs(float(first[3])) < 1e-12


def test_payloads_are_byte_identical_across_runs(tmp_path):
    cfg = _triangle_config(tmp_path)
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["landscape", "--config", cfg, "--out", str(out_a)]) == 0
    assert main(["landscape", "--config", cfg, "--out", str(out_b)]) == 0
    for name in ("landscape.csv", "landscape.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    ma, mb = load(out_a / "manifest.json"), load(out_b / "manifest.json")
    ma.pop("created_utc"), mb.pop("created_utc")
    assert ma == mb


def test_manifest_indexes_every_output(tmp_path):
    cfg = _triangle_config(tmp_path)
    out = tmp_path / "out"
    assert main(["landscape", "--config", cfg, "--out", str(out)]) == 0
    manifest = load(out / "manifest.json")
    on_disk = {p.name for p in out.iterdir()} - {"manifest.json"}
    listed = {entry["path"] for entry in manifest["outputs"]}
    assert listed == on_disk
    for entry in manifest["outputs"]:
        payload = (out / entry["path"]).read_bytes()
        assert hashlib.sha256(payload).hexdigest() == entry["sha256"]
        assert len(payload) == entry["bytes"]
    assert manifest["rng"]["algorithm"] == "numpy Philox"
    assert len(manifest["config_sha256"]) == 64


# ---------------------------------------------------------------------------
# lattice

def test_lattice_scan_reports_origin_and_wells(tmp_path):
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "lattice",
            "params": {
                "n_t": 8,
                "n_r": 6,
                "states": [{"omega": -1, "k": 1}, {"omega": -2, "k": 2}],
                "weights": "sphere",
                "scan": {"start": -2.4, "stop": 2.4, "num": 13},
            },
        },
    )
    out = tmp_path / "out"
    assert main(["lattice", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "surface.csv").read_text().splitlines()
    assert lines[0] == "tau1,tau2,S"
    assert len(lines) == 1 + 13 * 13
    minima = load(out / "minima.json")
    assert minima["origin"]["on_grid"] is True
    assert minima["origin"]["is_local_minimum"] is True
    assert minima["origin"]["is_global_minimum"] is False
    assert len(minima["global_minima"]) == 2


def test_lattice_bad_occupation_is_validation_error(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "lattice",
            "params": {
                "n_t": 8,
                "n_r": 6,
                "states": [{"omega": 1, "k": 1}, {"omega": -2, "k": 2}],
                "scan": {"start": -1.0, "stop": 1.0, "num": 5},
            },
        },
    )
    rc = main(["lattice", "--config", cfg, "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "dual lattice" in capsys.readouterr().err


def test_lattice_unknown_weight_preset_is_validation_error(tmp_path):
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "lattice",
            "params": {
                "n_t": 4,
                "n_r": 3,
                "states": [{"omega": 0, "k": 1}, {"omega": -1, "k": 2}],
                "weights": "cube",
                "scan": {"start": -1.0, "stop": 1.0, "num": 5},
            },
        },
    )
    assert main(["lattice", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


# ---------------------------------------------------------------------------
# lightcone-check

def test_lightcone_check_exact_rationals(tmp_path):
    values = {
        "C0": [1, 2],
        "C1": [1, 3],
        "C2": [2, 5],
        "C3": 0,
        "D0": 1,
        "D1": [0, 1],
        "D2": [3, 7],
        "D3": [1, 4],
    }
    cfg = write_config(
        tmp_path / "c.json",
        {"subcommand": "lightcone-check", "params": {"values": values}},
    )
    out = tmp_path / "out"
    assert main(["lightcone-check", "--config", cfg, "--out", str(out)]) == 0
    report = load(out / "expansion.json")

    def coeff(terms, **key):
        for t in terms:
            if all(t[k] == v for k, v in key.items()):
                return t
        raise AssertionError(f"no term with {key}")

    chain = report["closed_chain"]["terms"]
    # C0^2 / xi^6
    lead = coeff(chain, slash=0, pole=3, theta=0)
    assert lead["re"] == [1, 4] and lead["im"] == [0, 1]
    # C1^2 + 2 C0 C2 = 1/9 + 2/5 = 23/45
    sub = coeff(chain, slash=0, pole=2, theta=0)
    assert sub["re"] == [23, 45]
    # 2 C0 D3 theta term = 2*(1/2)*(1/4) = 1/4
    theta = coeff(chain, slash=1, pole=2, theta=1)
    assert theta["re"] == [1, 4]
    # gradient doubles the vector part: 4 C0 D3 = 1/2
    grad = report["gradient"]["terms"]
    gv = coeff(grad, slash=1, pole=2, theta=1)
    assert gv["re"] == [1, 2]


def test_lightcone_check_requires_all_coefficients(tmp_path):
    cfg = write_config(
        tmp_path / "c.json",
        {"subcommand": "lightcone-check", "params": {"values": {"C0": [1, 2]}}},
    )
    assert main(["lightcone-check", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


# ---------------------------------------------------------------------------
# state-stability

def _stability_table(tmp_path, rows):
    table = tmp_path / "table.csv"
    lines = ["qsq,a,b"] + [f"{q},{a},{b}" for q, a, b in rows]
    table.write_text("\n".join(lines) + "\n")
    return "table.csv"


def test_state_stability_stable_and_unstable(tmp_path):
    qsq = np.linspace(0.5, 5.0, 46)  # step 0.1, so q^2 = 1 and 4 are on-grid
    rows = [(q, 0.0, (q - 1.0) ** 2) for q in qsq]
    rel = _stability_table(tmp_path, rows)
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "state-stability",
            "params": {"table": rel, "masses": [1.0], "tol": 1e-6},
        },
    )
    out = tmp_path / "out"
    assert main(["state-stability", "--config", cfg, "--out", str(out)]) == 0
    report = load(out / "stability.json")
    assert report["stable"] is True

    cfg2 = write_config(
        tmp_path / "c2.json",
        {
            "subcommand": "state-stability",
            "params": {"table": rel, "masses": [1.0, 2.0], "tol": 1e-6},
        },
    )
    out2 = tmp_path / "out2"
    assert main(["state-stability", "--config", cfg2, "--out", str(out2)]) == 0
    report2 = load(out2 / "stability.json")
    assert report2["stable"] is False
    kinds = {v["kind"] for v in report2["violations"]}
    assert kinds == {"not_minimal"}


def test_state_stability_mass_outside_grid_is_validation_error(tmp_path, capsys):
    rel = _stability_table(tmp_path, [(0.5, 0.0, 1.0), (1.0, 0.0, 0.5)])
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "state-stability",
            "params": {"table": rel, "masses": [5.0]},
        },
    )
    rc = main(["state-stability", "--config", cfg, "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "outside the sampled grid" in capsys.readouterr().err


def test_state_stability_missing_table(tmp_path):
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "state-stability",
            "params": {"table": "ghost.csv", "masses": [1.0]},
        },
    )
    assert main(["state-stability", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


# ---------------------------------------------------------------------------
# solver-backed subcommands

def test_minimize_writes_result_and_pauli_csv(tmp_path):
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "minimize",
            "params": {"n": 1, "f": 2, "m": 3, "mu": 0.5, "max_iter": 400},
            "seeds": [0, 1],
        },
    )
    out = tmp_path / "out"
    assert main(["minimize", "--config", cfg, "--out", str(out)]) == 0
    result = load(out / "result.json")
    assert result["status"] in ("converged", "max_iterations")
    assert len(result["per_seed"]) == 2
    lines = (out / "pauli_vectors.csv").read_text().splitlines()
    assert lines[0] == "x,rho,v1,v2,v3"
    assert len(lines) == 4
    assert (out / "geometry.json").is_file()


def test_minimize_divergence_exit_code(tmp_path):
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "minimize",
            "params": {"n": 1, "f": 2, "m": 3, "mu": 0.7, "max_iter": 5000},
            "seeds": [0],
        },
    )
    out = tmp_path / "out"
    rc = main(["minimize", "--config", cfg, "--out", str(out)])
    assert rc == 4
    result = load(out / "result.json")
    assert result["status"] == "divergence"
    assert load(out / "manifest.json")["status"] == "divergence"


def test_constrained_mode_requires_kappa(tmp_path):
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "minimize",
            "params": {"n": 1, "f": 2, "m": 3, "mode": "constrained"},
            "seeds": [0],
        },
    )
    assert main(["minimize", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


# ---------------------------------------------------------------------------
# reproduce + output-root resolution

def test_reproduce_fig3_emits_transition_table(tmp_path):
    out = tmp_path / "fig3"
    assert main(["reproduce", "--figure", "fig3", "--out", str(out)]) == 0
    lines = (out / "fig3_landscape.csv").read_text().splitlines()
    assert lines[0].startswith("v,")
    v = np.array([float(l.split(",")[0]) for l in lines[1:]])
    # grid crosses the causal transition point
    threshold = 4.0 * np.sqrt(3.0) / 9.0
    assert v.min() < threshold < v.max()
    first = lines[1].split(",")
    assert abs(float(first[1]) - 1.0 / 9.0) < 1e-12


def test_default_output_root_env(tmp_path, monkeypatch):
    monkeypatch.setenv("DSTLAB_OUT", str(tmp_path / "root"))
    cfg = write_config(
        tmp_path / "c.json",
        {
            "subcommand": "classify-causal",
            "params": {"roots": [[[1.0, 0.0], [2.0, 0.0]]]},
        },
    )
    assert main(["classify-causal", "--config", cfg]) == 0
    expected = tmp_path / "root" / "classify-causal" / "classifications.json"
    assert expected.is_file()
