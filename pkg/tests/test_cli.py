import json
import math
from pathlib import Path

import numpy as np
import pytest

import latticefrac as lf
from latticefrac.cli import main, run_scenario
from latticefrac.serialize import dumps_json, load_state, state_payload
from latticefrac.svgfig import render_pair, render_svg

SCEN = Path(__file__).resolve().parents[1] / "scenarios"
GOLDEN = Path(__file__).resolve().parent / "golden"


def test_run_identity(tmp_path):
    code = run_scenario(str(SCEN / "identity.toml"), str(tmp_path))
    assert code == 0
    payload = json.loads((tmp_path / "identity_result.json").read_text())
    assert payload["measured"] == 0.0
    assert payload["admissible"] is True


def test_run_negative_exits_two(tmp_path):
    code = run_scenario(str(SCEN / "interpenetration_negative.toml"), str(tmp_path))
    assert code == 2
    payload = json.loads((tmp_path / "interpenetration_negative_result.json").read_text())
    assert payload["admissible"] is False
    assert len(payload["report"]["violating_triangles"]) > 0


def test_run_straight_crack_convergence(tmp_path):
    code = run_scenario(str(SCEN / "straight_crack.toml"), str(tmp_path))
    assert code == 0
    rows = (tmp_path / "straight_crack_convergence.csv").read_text().strip().splitlines()
    last = rows[-1].split(",")
    assert float(last[3]) < 0.05  # final relative error


def test_unknown_kind_rejected(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text('kind = "nonsense"\n')
    with pytest.raises(SystemExit):
        run_scenario(str(bad), str(tmp_path))


def test_parse_error_reported(tmp_path):
    bad = tmp_path / "broken.toml"
    bad.write_text("kind = [unterminated\n")
    with pytest.raises(SystemExit) as exc:
        run_scenario(str(bad), str(tmp_path))
    assert "parse" in str(exc.value)


def test_state_round_trip(dom32):
    rng = np.random.default_rng(9)
    u = dom32.nodes + 0.1 * dom32.epsilon * rng.standard_normal(dom32.nodes.shape)
    payload = json.loads(dumps_json(state_payload(dom32, u)))
    dom2, u2 = load_state(payload)
    assert np.array_equal(u2, u)
    rep1 = lf.total_energy(dom32, u)
    rep2 = lf.total_energy(dom2, u2)
    assert rep1.bond_sum == rep2.bond_sum


def test_json_float_fidelity():
    x = 0.1 + 0.2
    payload = json.loads(dumps_json({"x": x, "arr": np.array([math.pi])}))
    assert payload["x"] == x
    assert payload["arr"][0] == math.pi


def test_deterministic_outputs(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for out in (a, b):
        run_scenario(str(SCEN / "identity.toml"), str(out))
    for name in ("identity_result.json", "identity_state.json",
                 "identity_reference.svg", "identity_deformed.svg",
                 "identity_bonds.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_render_identity_pair(dom32):
    ref, dfm = render_pair(dom32, dom32.nodes.copy())
    # identical geometry up to the fill palette
    assert ref.replace("#d8d8d8", "#cfe2f3") == dfm


def test_render_golden_files():
    import conftest

    dom = conftest.square_domain(1 / 16)
    I2 = np.eye(2)
    res = lf.straight_crack(dom, (0, 1), I2, I2, (0, 0.3), (0, 0), (0.5, 0.5))
    svg = render_svg(dom, res.displacement,
                     crack_segments=[((0.0, 0.5), (1.0, 0.5))])
    golden = GOLDEN / "straight_crack_deformed.svg"
    assert svg == golden.read_text()

    x0 = np.array([0.5, 0.5])
    dom_t = lf.build_domain(conftest.UNIT_SQUARE, 1 / 16, lf.triple_point_offset(x0, 1 / 16))
    data = lf.symmetric_triple_point_data(0.3)
    res_t = lf.triple_point(dom_t, x0, *data)
    central = res_t.extras["central_triangle"]
    svg_t = render_svg(dom_t, res_t.displacement, bad_triangles=[central])
    golden_t = GOLDEN / "triple_point_deformed.svg"
    assert svg_t == golden_t.read_text()


def test_cli_main_wulff_and_ground_state(tmp_path):
    code = main(["wulff", "--out", str(tmp_path / "w")])
    assert code == 0
    polar = (tmp_path / "w_polar.csv").read_text().splitlines()
    assert polar[0] == "angle,phi"
    assert len(polar) == 361
    code = main(["ground-state", "--out", str(tmp_path / "gs"),
                 "--samples", "61", "--cutoff", "4"])
    assert code == 0
    assert (tmp_path / "gs.csv").exists()


def test_cli_render_subcommand(tmp_path):
    run_scenario(str(SCEN / "identity.toml"), str(tmp_path))
    code = main(["render", str(tmp_path / "identity_state.json"),
                 "--out", str(tmp_path / "re")])
    assert code == 0
    assert (tmp_path / "re_reference.svg").exists()
    assert (tmp_path / "re_deformed.svg").exists()


def test_cli_batch_parallel(tmp_path, monkeypatch):
    monkeypatch.setenv("LATTICE_FRACTURE_THREADS", "2")
    code = main(["run", str(SCEN / "identity.toml"),
                 str(SCEN / "interpenetration_negative.toml"),
                 "--out", str(tmp_path)])
    assert code == 2  # worst status of the batch
