import pytest

from akalab.attacks import (MATRIX, SCRIPTS, attack_imsi_catcher, expected_cell)
from akalab.core import ProtocolMode
from akalab.game import SigmaUpdate, run_game
from akalab.world import World, run_honest_schedule

TRIALS = 40


@pytest.mark.parametrize("cell", MATRIX, ids=lambda c: f"{c.attack}-{c.mode.value}-{c.sigma.value}")
def test_matrix_cell(cell):
    res = run_game(SCRIPTS[cell.attack], cell.mode, cell.sigma, TRIALS, "cells")
    assert cell.passes(res.advantage), res


@pytest.mark.parametrize("name,mode", [
    ("guti-linkability-control", ProtocolMode.AKA_PLUS),
    ("subtle-early", ProtocolMode.AKA_PLUS_MINUS),
])
def test_control_variants_gain_nothing(name, mode):
    res = run_game(SCRIPTS[name], mode, SigmaUpdate.UNLINK if "subtle" in name else SigmaUpdate.NONE,
                   TRIALS, "ctl")
    assert res.advantage <= 0.35


def test_expected_cell_lookup():
    assert expected_cell("subtle", ProtocolMode.AKA_PLUS, SigmaUpdate.UNLINK).vulnerable is False
    assert expected_cell("subtle", ProtocolMode.FIVEG_AKA, SigmaUpdate.NONE) is None


def test_scripts_respect_budget():
    for name, script in SCRIPTS.items():
        assert script.q >= 1, name


@pytest.mark.parametrize("provision", [False, True])
def test_imsi_catcher_legacy(provision):
    w = World.create(ProtocolMode.FIVEG_AKA_LEGACY, ["A"], 3)
    if provision:
        run_honest_schedule(w, 1, 0)
        assert w.subscribers["A"].guti_ue is not None
    res = attack_imsi_catcher(w, "A")
    assert res.applicable and res.captured == "A"


@pytest.mark.parametrize("mode", [ProtocolMode.FIVEG_AKA, ProtocolMode.AKA_PLUS])
def test_imsi_catcher_inapplicable(mode):
    assert not attack_imsi_catcher(World.create(mode, ["A"], 0), "A").applicable
