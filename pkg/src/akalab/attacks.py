"""Scripted adversaries.

The distinguishers talk to the game through its oracles only, so a win is
evidence about the protocol and not about the harness.  The IMSI catcher
and the PRIV-AKA desynchronization are demonstrations that drive a
:class:`~akalab.world.World` directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import ProtocolMode
from .game import GameSession, Script, SigmaUpdate
from .messages import (AuthFailure, ChallengeRequest, GutiConfirm, NoSuci, PermanentIdRequest,
                       PlainImsi, PrivConfirm, ResyncRequest, Tmsi, decode_message,
                       encode_message)
from .privaka import priv_hn_confirm, priv_run_to_confirm
from .transcript import ue_endpoint
from .world import World

CHALLENGE_REQUEST = encode_message(ChallengeRequest())
START = b""

WIN_THRESHOLD = 0.99
LOSE_THRESHOLD = 0.25


def _coin(coins: random.Random) -> int:
    return coins.getrandbits(1)


# -- honest sub-runs through the oracles ----------------------------------

def _supi_run(g: GameSession, vh: int) -> tuple[int, bytes]:
    """Full SUPI + Refresh run; returns the session and the UE's encrypted response."""
    j = g.start_session()
    nonce = g.send_hn(g.send_ue(CHALLENGE_REQUEST, vh), j)
    resp = g.send_ue(nonce, vh)
    g.send_ue(g.send_hn(resp, j), vh)
    g.send_ue(g.send_hn(START, j), vh)
    return j, resp


def _guti_run(g: GameSession, vh: int, *, confirm: bool = True,
              refresh: bool = True) -> tuple[int, bytes, bytes]:
    """GUTI run; ``confirm``/``refresh`` False keeps that message from the HN/UE."""
    j = g.start_session()
    vector = g.send_hn(g.send_ue(START, vh), j)
    conf = g.send_ue(vector, vh)
    if confirm:
        g.send_hn(conf, j)
        assignment = g.send_hn(START, j)
        if refresh:
            g.send_ue(assignment, vh)
    return j, vector, conf


def _fiveg_run(g: GameSession, vh: int) -> tuple[int, bytes, bytes]:
    """Full 5G-AKA run; returns the session, identification and vector."""
    j = g.start_session()
    ident = g.send_ue(START, vh)
    vector = g.send_hn(ident, j)
    g.send_ue(g.send_hn(g.send_ue(vector, vh), j), vh)
    return j, ident, vector


def _provision(g: GameSession, *ids: str) -> None:
    for supi in ids:
        vh = g.draw_ue(supi, supi)
        _supi_run(g, vh)
        g.free_ue(vh)


# -- distinguishers -------------------------------------------------------

def play_failure_message(g: GameSession, coins: random.Random) -> int:
    """Replay an old vector of A and read the kind of failure."""
    if g.world.mode.is_aka_plus:
        _provision(g, "A", "B")
        vh = g.draw_ue("A", "A")
        _, old_vector, _ = _guti_run(g, vh)
    else:
        vh = g.draw_ue("A", "A")
        _, _, old_vector = _fiveg_run(g, vh)
    g.free_ue(vh)
    vh = g.draw_ue("A", "B")
    g.send_ue(START, vh)
    reply = decode_message(g.send_ue(old_vector, vh))
    if isinstance(reply, ResyncRequest):
        return 0
    if isinstance(reply, AuthFailure):
        return 1
    return _coin(coins)


def play_encrypted_supi_replay(g: GameSession, coins: random.Random) -> int:
    """Substitute A's recorded identification for the handler's own."""
    vh = g.draw_ue("A", "A")
    if g.world.mode.is_aka_plus:
        _, recorded = _supi_run(g, vh)
        g.free_ue(vh)
        vh = g.draw_ue("A", "B")
        j = g.start_session()
        g.send_ue(g.send_hn(g.send_ue(CHALLENGE_REQUEST, vh), j), vh)
        g.send_hn(recorded, j)
    else:
        _, recorded, _ = _fiveg_run(g, vh)
        g.free_ue(vh)
        vh = g.draw_ue("A", "B")
        g.send_ue(START, vh)
        j = g.start_session()
        g.send_hn(g.send_ue(g.send_hn(recorded, j), vh), j)
    return 0 if g.result_hn(j) else 1


def _guti_linkability(g: GameSession, intercept: bool) -> int:
    _provision(g, "A", "B")
    vh = g.draw_ue("A", "A")
    _guti_run(g, vh, refresh=not intercept)
    g.free_ue(vh)
    vh = g.draw_ue("A", "B")
    return 0 if isinstance(decode_message(g.send_ue(START, vh)), NoSuci) else 1


def play_guti_linkability(g: GameSession, coins: random.Random) -> int:
    """A whose last GUTI assignment was cut off has nothing to present."""
    return _guti_linkability(g, intercept=True)


def play_guti_linkability_control(g: GameSession, coins: random.Random) -> int:
    return _guti_linkability(g, intercept=False)


def _subtle(g: GameSession, early: bool) -> int:
    vh = g.draw_ue("A", "A")
    _supi_run(g, vh)
    held_j, _, held_confirm = _guti_run(g, vh, confirm=False)
    g.free_ue(vh)
    vh = g.draw_ue("A", "B")
    if early:
        g.send_hn(held_confirm, held_j)
    _supi_run(g, vh)
    if not early:
        g.send_hn(held_confirm, held_j)
    j = g.start_session()
    reply = g.send_ue(g.send_hn(g.send_ue(START, vh), j), vh)
    return 1 if isinstance(decode_message(reply), GutiConfirm) else 0


def play_subtle(g: GameSession, coins: random.Random) -> int:
    """Deliver A's withheld GUTI confirmation after a fresh SUPI run of the handler."""
    return _subtle(g, early=False)


def play_subtle_early(g: GameSession, coins: random.Random) -> int:
    return _subtle(g, early=True)


def play_random_guess(g: GameSession, coins: random.Random) -> int:
    return _coin(coins)


SCRIPTS: dict[str, Script] = {s.name: s for s in (
    Script("failure-message", play_failure_message, q=32),
    Script("encrypted-supi-replay", play_encrypted_supi_replay, q=17),
    Script("guti-linkability", play_guti_linkability, q=31),
    Script("guti-linkability-control", play_guti_linkability_control, q=31),
    Script("subtle", play_subtle, q=28),
    Script("subtle-early", play_subtle_early, q=28),
    Script("random-guess", play_random_guess, q=1),
)}


@dataclass(frozen=True)
class MatrixCell:
    attack: str
    mode: ProtocolMode
    sigma: SigmaUpdate
    vulnerable: bool

    def passes(self, advantage: float) -> bool:
        if self.vulnerable:
            return advantage >= WIN_THRESHOLD
        return advantage <= LOSE_THRESHOLD


MATRIX: tuple[MatrixCell, ...] = (
    MatrixCell("failure-message", ProtocolMode.FIVEG_AKA, SigmaUpdate.NONE, True),
    MatrixCell("failure-message", ProtocolMode.AKA_PLUS, SigmaUpdate.NONE, False),
    MatrixCell("encrypted-supi-replay", ProtocolMode.FIVEG_AKA, SigmaUpdate.NONE, True),
    MatrixCell("encrypted-supi-replay", ProtocolMode.AKA_PLUS, SigmaUpdate.NONE, False),
    MatrixCell("guti-linkability", ProtocolMode.AKA_PLUS, SigmaUpdate.NONE, True),
    MatrixCell("guti-linkability", ProtocolMode.AKA_PLUS, SigmaUpdate.UNLINK, False),
    MatrixCell("subtle", ProtocolMode.AKA_PLUS_MINUS, SigmaUpdate.UNLINK, True),
    MatrixCell("subtle", ProtocolMode.AKA_PLUS, SigmaUpdate.UNLINK, False),
)


def expected_cell(attack: str, mode: ProtocolMode, sigma: SigmaUpdate):
    for cell in MATRIX:
        if (cell.attack, cell.mode, cell.sigma) == (attack, mode, sigma):
            return cell
    return None


# -- demonstrations -------------------------------------------------------

@dataclass(frozen=True)
class CatchResult:
    applicable: bool
    captured: str | None = None


def attack_imsi_catcher(world: World, target: str) -> CatchResult:
    """Intercept the identification; if it is a TMSI, ask for the permanent identity."""
    if world.mode is not ProtocolMode.FIVEG_AKA_LEGACY:
        return CatchResult(False)
    raw = world.deliver_to_ue(target, START)
    world.drop(ue_endpoint(target), raw)
    first = decode_message(raw)
    if isinstance(first, Tmsi):
        first = decode_message(world.deliver_to_ue(target, encode_message(PermanentIdRequest())))
    if isinstance(first, PlainImsi):
        return CatchResult(True, first.id)
    return CatchResult(True)


@dataclass(frozen=True)
class DesyncResult:
    delta: int
    subsequent_runs_fail: bool


def attack_privaka_desync(world: World, target: str = "A", control: bool = False,
                          followups: int = 3) -> DesyncResult:
    """Hold two confirmations across re-synchronizing runs, then release both.

    ``delta`` is the HN counter minus the UE counter afterwards.  With
    ``control`` every confirmation is delivered at once.
    """
    if world.mode is not ProtocolMode.PRIV_AKA:
        raise ValueError("the desynchronization script needs PRIV-AKA")
    held = []
    for _ in range(2):
        _, confirm, j = priv_run_to_confirm(world, target)
        if control:
            priv_hn_confirm(world, j, confirm)
        else:
            world.drop(ue_endpoint(target), encode_message(confirm))
            held.append((j, confirm))
        _, confirm, j = priv_run_to_confirm(world, target)
        priv_hn_confirm(world, j, confirm)
    for j, confirm in held:
        priv_hn_confirm(world, j, confirm)
    delta = world.hn.record(target).sqn_hn - world.subscribers[target].sqn_ue
    failed = []
    for _ in range(followups):
        _, confirm, j = priv_run_to_confirm(world, target)
        ok = isinstance(confirm, PrivConfirm) and priv_hn_confirm(world, j, confirm)[1]
        failed.append(not ok)
    return DesyncResult(delta, all(failed))
