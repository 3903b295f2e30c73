from __future__ import annotations

import json

import pytest

from risauth.adversary import AttackKind
from risauth.channel import RisMode
from risauth.circuit import dbm_to_watts
from risauth.cli import load_preset, preset_names
from risauth.config import apply_param, parse_config, parse_power, spec_from_dict
from risauth.errors import ConfigError


def _write(tmp_path, data, name="exp.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return path


def test_minimal_config_fills_defaults(tmp_path):
    spec = parse_config(_write(tmp_path, {"geometry": {"d_TL": 1.0}}))
    cfg = spec.base
    assert spec.name == "exp"
    assert cfg.geometry.d_TL == 1.0 and cfg.geometry.f_c == 915e6
    assert cfg.circuit.alpha == 0.5 and cfg.circuit.v_d == 0.3
    assert cfg.rician.k_factor == 3.0
    assert cfg.attack.kind is AttackKind.IMPERSONATION
    assert cfg.ris_mode is RisMode.ABSENT


def test_paper_baseline_config_parses(tmp_path):
    data = {
        "geometry": {"d_ST": 1, "d_SL": 1, "d_TL": 1.5, "d_TR": 1, "d_RL": 1, "d_EL": 0.75, "d_TE": 0.75,
                     "d_ER": 0.70, "chi_direct": 3.5, "chi_ris": 2.5},
        "noise": {"sigma2_t": "-40 dBm", "sigma2_l": "-40 dBm", "sigma2_e": "-30 dBm"},
        "p_s": "1 dBm",
    }
    cfg = parse_config(_write(tmp_path, data)).base
    assert cfg.p_s == pytest.approx(dbm_to_watts(1.0))
    assert cfg.noise.sigma2_e == pytest.approx(1e-6)


def test_proximity_floor_names_key(tmp_path):
    with pytest.raises(ConfigError) as err:
        parse_config(_write(tmp_path, {"geometry": {"d_EL": 0.01}}))
    assert err.value.key == "geometry.d_EL"


@pytest.mark.parametrize(
    "data, key",
    [
        ({"bogus": 1}, "bogus"),
        ({"geometry": {"d_XX": 1}}, "geometry.d_XX"),
        ({"circuit": {"alpha": 2.0}}, "circuit.alpha"),
        ({"attack": {"kind": "jamming"}}, "attack.kind"),
        ({"p_s": "1 dBW"}, "p_s"),
        ({"n_trials": 0}, "n_trials"),
        ({"sweep": {"parameter": "d_XY", "values": [1]}}, "sweep.parameter"),
        ({"sweep": {"parameter": "d_TL", "values": []}}, "sweep.values"),
        ({"sweep": {"parameter": "d_EL", "values": [0.01]}}, "sweep.d_EL"),
        ({"formats": ["xml"]}, "formats"),
    ],
)
def test_config_errors_name_the_key(tmp_path, data, key):
    with pytest.raises(ConfigError) as err:
        parse_config(_write(tmp_path, data))
    assert err.value.key == key


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError) as err:
        parse_config(tmp_path / "absent.json")
    assert err.value.key == "path"
    with pytest.raises(ConfigError) as err:
        parse_config(_write(tmp_path, "{\n  \"p_s\": 1,,\n}"))
    assert err.value.key == "syntax" and "line 2" in str(err.value)


def test_parse_power_units():
    assert parse_power("1 dBm", "k") == pytest.approx(1.2589254117941673e-3)
    assert parse_power("2 mW", "k") == pytest.approx(2e-3)
    assert parse_power(0.5, "k") == 0.5
    with pytest.raises(ConfigError):
        parse_power(True, "k")


def test_apply_param_each_axis():
    base = spec_from_dict({}).base
    assert apply_param(base, "d_TL", 2.0).geometry.d_TL == 2.0
    assert apply_param(base, "n_elements", 20).ris_mode is RisMode.OPTIMAL
    assert apply_param(base, "sigma2_l", "-50 dBm").noise.sigma2_l == pytest.approx(1e-8)
    assert apply_param(base, "n_eve", 3).attack.n_eve == 3
    assert apply_param(base, "attack_kind", "replay").attack.kind is AttackKind.REPLAY
    with pytest.raises(ConfigError):
        apply_param(base, "alpha", 0.3)


def test_complex_gamma_and_series():
    spec = spec_from_dict({"circuit": {"gamma_on": [0.6, 0.6]},
                           "series": [{"label": "N=20", "overrides": {"n_elements": 20}}]})
    assert spec.base.circuit.gamma_on == complex(0.6, 0.6)
    assert spec.series[0].overrides == {"n_elements": 20}


def test_all_presets_parse():
    names = preset_names()
    assert names == sorted(["fig10", "fig11", "fig6", "fig7", "fig8", "fig9", "table2"])
    for name in names:
        assert load_preset(name).name == name


def test_preset_fidelity():
    t2 = load_preset("table2")
    assert t2.sweep == ("d_TL", (0.5, 1.0, 1.5, 2.0)) and t2.base.geometry.n_elements == 0
    g = t2.base.geometry
    assert (g.d_ST, g.d_SL, g.d_TR, g.d_RL, g.d_EL, g.d_TE, g.d_ER) == (1, 1, 1, 1, 0.75, 0.75, 0.70)
    assert (g.chi_direct, g.chi_ris) == (3.5, 2.5)
    assert t2.base.p_s == pytest.approx(dbm_to_watts(1.0))
    assert t2.base.noise.sigma2_l == pytest.approx(1e-7) and t2.base.noise.sigma2_e == pytest.approx(1e-6)
    assert load_preset("fig7").sweep == ("n_elements", (0, 20, 50, 100))
    assert load_preset("fig8").sweep[0] == "d_RL"
    assert load_preset("fig9").sweep == ("p_s", ("0.5 dBm", "1 dBm"))
    assert load_preset("fig10").sweep == ("d_EL", (0.2, 0.4, 0.75, 1.2))
    assert load_preset("fig11").sweep == ("n_eve", (2, 3, 4))
    assert len(load_preset("fig6").sweep[1]) == 4
