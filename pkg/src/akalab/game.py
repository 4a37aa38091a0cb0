"""The left-right unlinkability game with a call budget.

The adversary only sees oracle replies.  ``draw_ue`` hands out an anonymous
handler that aliases one of two subscribers, chosen by the hidden bit; with
:attr:`SigmaUpdate.UNLINK` the drawn subscriber's temporary identity is
invalidated first.
"""

from __future__ import annotations

import enum
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from .core import DEFAULT_WINDOW_C, MID_SESSION, ProtocolMode
from .world import World


class SigmaUpdate(enum.Enum):
    NONE = "none"
    UNLINK = "unlink"


class OracleError(Exception):
    """An oracle was called on a dead handler, an unknown session or a busy identity."""


class BudgetExceeded(Exception):
    pass


class GameSession:
    def __init__(self, world: World, b: int, sigma: SigmaUpdate = SigmaUpdate.NONE,
                 q: int = 1000) -> None:
        if b not in (0, 1):
            raise ValueError("hidden bit must be 0 or 1")
        self.world = world
        self._b = b
        self.sigma = sigma
        self.q = q
        self.calls_made = 0
        self.handlers: dict[int, str] = {}
        self.removed_pairs: dict[int, tuple[str, str]] = {}
        self.free_list: set[str] = set(world.subscribers)
        self._next_vh = 0

    def _charge(self) -> None:
        if self.calls_made >= self.q:
            raise BudgetExceeded(f"more than {self.q} oracle calls")
        self.calls_made += 1

    def _target(self, vh: int) -> str:
        if vh not in self.handlers:
            raise OracleError(f"handler {vh} is not live")
        return self.handlers[vh]

    # -- oracles -----------------------------------------------------------

    def start_session(self) -> int:
        self._charge()
        return self.world.new_session()

    def send_ue(self, m: bytes, vh: int) -> bytes:
        self._charge()
        return self.world.deliver_to_ue(self._target(vh), m)

    def send_hn(self, m: bytes, j: int) -> bytes:
        self._charge()
        if j not in self.world.hn.sessions:
            raise OracleError(f"no session {j}")
        return self.world.deliver_to_hn(j, m)

    def result_hn(self, j: int) -> bool:
        self._charge()
        sess = self.world.hn.sessions.get(j)
        if sess is None:
            raise OracleError(f"no session {j}")
        return isinstance(sess.e_auth, str) and sess.e_auth in self.world.subscribers

    def result_ue(self, vh: int) -> bool:
        self._charge()
        return isinstance(self.world.subscribers[self._target(vh)].e_auth, bytes)

    def draw_ue(self, id0: str, id1: str) -> int:
        self._charge()
        for i in {id0, id1}:
            if i not in self.free_list:
                raise OracleError(f"{i} is not free")
        self.free_list -= {id0, id1}
        chosen = (id0, id1)[self._b]
        self.world.apply_draw(chosen, self.sigma is SigmaUpdate.UNLINK)
        vh = self._next_vh
        self._next_vh += 1
        self.handlers[vh] = chosen
        self.removed_pairs[vh] = (id0, id1)
        return vh

    def free_ue(self, vh: int) -> None:
        self._charge()
        supi = self._target(vh)
        if self.world.subscribers[supi].phase in MID_SESSION:
            raise OracleError(f"handler {vh} is mid-session")
        del self.handlers[vh]
        self.free_list |= set(self.removed_pairs.pop(vh))


# A distinguisher: plays the game and returns its guess of the hidden bit.
Strategy = Callable[[GameSession, random.Random], int]


@dataclass(frozen=True)
class Script:
    name: str
    play: Strategy
    q: int
    ids: tuple[str, ...] = ("A", "B")


@dataclass
class GameResult:
    wins: int
    trials: int
    advantage: float
    halfwidth: float
    worlds: list = field(default_factory=list, repr=False)


def hoeffding_halfwidth(trials: int, alpha: float = 0.05) -> float:
    """Half-width of the two-sided confidence band on the advantage estimate."""
    return 2 * math.sqrt(math.log(2 / alpha) / (2 * trials))


def play_trial(script: Script, mode: ProtocolMode, sigma: SigmaUpdate, seed, t: int,
               window_c: int = DEFAULT_WINDOW_C, q: Optional[int] = None) -> tuple[bool, World]:
    """One independent trial; every random stream is derived from ``(seed, t)``."""
    world = World.create(mode, script.ids, f"{seed}/{t}/world", window_c)
    b = random.Random(f"{seed}/{t}/bit").getrandbits(1)
    g = GameSession(world, b, sigma, script.q if q is None else q)
    try:
        guess = script.play(g, random.Random(f"{seed}/{t}/coins"))
    except BudgetExceeded:
        guess = random.Random(f"{seed}/{t}/flip").getrandbits(1)
    return guess == b, world


def _trial_worker(args) -> bool:
    from .attacks import SCRIPTS
    name, mode, sigma, seed, t, window_c, q = args
    return play_trial(SCRIPTS[name], mode, sigma, seed, t, window_c, q)[0]


def run_game(script: Script, mode: ProtocolMode, sigma: SigmaUpdate, trials: int, seed,
             jobs: int = 1, window_c: int = DEFAULT_WINDOW_C, q: Optional[int] = None,
             keep_worlds: bool = False) -> GameResult:
    """Estimate ``|2 Pr[guess = b] - 1|`` over independent trials.

    With ``jobs > 1`` trials run in worker processes; the result does not
    depend on the number of workers.  Parallel runs need a registered script.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    worlds = []
    if jobs > 1 and not keep_worlds:
        args = [(script.name, mode, sigma, seed, t, window_c, q) for t in range(trials)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_trial_worker, args, chunksize=max(1, trials // (4 * jobs))))
    else:
        outcomes = []
        for t in range(trials):
            won, world = play_trial(script, mode, sigma, seed, t, window_c, q)
            outcomes.append(won)
            if keep_worlds:
                worlds.append(world)
    wins = sum(outcomes)
    return GameResult(wins, trials, abs(2 * wins / trials - 1), hoeffding_halfwidth(trials), worlds)
