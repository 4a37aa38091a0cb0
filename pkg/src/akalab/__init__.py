"""Executable models of 5G-AKA, PRIV-AKA and AKA+ under a Dolev-Yao adversary."""

from .core import HarnessError, IllegalStep, ProtocolMode
from .game import GameSession, SigmaUpdate, run_game
from .world import World

__all__ = ["GameSession", "HarnessError", "IllegalStep", "ProtocolMode", "SigmaUpdate",
           "World", "run_game"]
__version__ = "0.1.0"
