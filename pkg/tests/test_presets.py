import pytest

from rician_mimo.config import ConfigError
from rician_mimo.presets import PRESET_IDS, preset_specs


def test_preset_inventory():
    assert PRESET_IDS == ("fig1a", "fig1b", "fig2a", "fig2b", "fig4a", "fig4b", "fig5")
    for fid in PRESET_IDS:
        specs = preset_specs(fid)
        assert specs, fid
        for spec in specs:
            assert spec.scenario_id.startswith(fid)


def test_unknown_preset_rejected():
    with pytest.raises(ConfigError):
        preset_specs("fig9")


def test_fig1a_covers_tau_settings():
    labels = {s.scenario_id.rsplit("-", 1)[1] for s in preset_specs("fig1a")}
    assert labels == {"tauK", "tauopt", "tau120"}
    modes = {s.tau_mode for s in preset_specs("fig1a")}
    assert modes == {"minimum", "optimal", "fixed"}


def test_multicell_presets_use_edge_placement():
    for fid in ("fig4a", "fig4b", "fig5"):
        for spec in preset_specs(fid):
            assert spec.layout == "three_cell_edge"
            assert spec.l == 3
            assert spec.placement == "cell_edge"


def test_los_variants_paired():
    assert all(s.los == "steering" for s in preset_specs("fig2a"))
    assert all(s.los == "dft" for s in preset_specs("fig2b"))
    assert all(s.los == "steering" for s in preset_specs("fig4a"))
    assert all(s.los == "dft" for s in preset_specs("fig4b"))


def test_presets_are_seeded_and_deterministic():
    for fid in PRESET_IDS:
        a = preset_specs(fid)
        b = preset_specs(fid)
        assert a == b
        assert all(s.seed != 0 for s in a)
