"""``akalab`` command line.

Exit status: 0 on success, 1 when a verdict comes out wrong (an attack
that should win did not, an invalid trace, a failed honest run), 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from .attacks import (MATRIX, SCRIPTS, attack_imsi_catcher, attack_privaka_desync,
                      expected_cell)
from .core import DEFAULT_WINDOW_C, ProtocolMode
from .game import SigmaUpdate, play_trial, run_game
from .traces import ActionTrace, TraceSyntaxError, ufresh, validate_trace
from .world import World, honest_session, run_honest_schedule

DEMOS = ("imsi-catcher", "privaka-desync")
DEFAULT_SIGMA = {"subtle": SigmaUpdate.UNLINK, "subtle-early": SigmaUpdate.UNLINK}


class UsageError(Exception):
    pass


def _ids(n: int) -> list[str]:
    if n < 1:
        raise UsageError("--subscribers must be positive")
    return [f"sub{k}" for k in range(n)]


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def result_line(name: str, advantage: float, ci: float, trials: int, **extra) -> str:
    tail = "".join(f" {k}={v}" for k, v in extra.items())
    return f"RESULT name={name} advantage={advantage:.4f} ci={ci:.4f} trials={trials}{tail}"


# -- sub-commands -----------------------------------------------------------

def cmd_honest(a) -> int:
    world = World.create(a.protocol, _ids(a.subscribers), a.seed, a.window_c)
    results = run_honest_schedule(world, a.sessions, random.Random(f"{a.seed}/schedule"))
    _emit(world.transcript.to_jsonl(), a.out)
    return 0 if all(results) else 1


def _sigma_for(a, name: str) -> SigmaUpdate:
    if a.sigma is not None:
        return SigmaUpdate(a.sigma)
    return DEFAULT_SIGMA.get(name, SigmaUpdate.NONE)


def _run_distinguisher(a, name: str, check: bool) -> int:
    script = SCRIPTS[name]
    sigma = _sigma_for(a, name)
    res = run_game(script, a.protocol, sigma, a.trials, a.seed, jobs=a.jobs,
                   window_c=a.window_c, q=a.q_budget)
    print(result_line(name, res.advantage, res.halfwidth, res.trials,
                      protocol=a.protocol.value, sigma=sigma.value))
    if a.out:
        _, world = play_trial(script, a.protocol, sigma, a.seed, 0, a.window_c, a.q_budget)
        Path(a.out).write_text(world.transcript.to_jsonl())
    cell = expected_cell(name, a.protocol, sigma)
    return 1 if check and cell is not None and not cell.passes(res.advantage) else 0


def cmd_attack(a) -> int:
    if a.name == "imsi-catcher":
        captured, transcripts = 0, []
        for t in range(a.trials):
            world = World.create(a.protocol, ["target"], f"{a.seed}/{t}", a.window_c)
            if t % 2:
                # half the runs start from a subscriber holding a temporary identity
                list(honest_session(world, "target"))
            res = attack_imsi_catcher(world, "target")
            if not res.applicable:
                print("RESULT name=imsi-catcher inapplicable protocol=" + a.protocol.value)
                return 0
            captured += res.captured == "target"
            transcripts.append(world.transcript.to_jsonl())
        print(f"RESULT name=imsi-catcher captured={captured}/{a.trials} trials={a.trials}")
        if a.out:
            Path(a.out).write_text(transcripts[0])
        return 0 if captured == a.trials else 1
    if a.name == "privaka-desync":
        if a.protocol is not ProtocolMode.PRIV_AKA:
            raise UsageError("privaka-desync needs --protocol priv-aka")
        world = World.create(a.protocol, ["target"], a.seed, a.window_c)
        res = attack_privaka_desync(world, "target")
        print(f"RESULT name=privaka-desync delta={res.delta} "
              f"subsequent_runs_fail={str(res.subsequent_runs_fail).lower()}")
        if a.out:
            Path(a.out).write_text(world.transcript.to_jsonl())
        return 0 if res.delta == 2 and res.subsequent_runs_fail else 1
    return _run_distinguisher(a, a.name, check=True)


def cmd_game(a) -> int:
    return _run_distinguisher(a, a.script, check=False)


def cmd_trace(a) -> int:
    try:
        trace = ActionTrace.parse(Path(a.file).read_text(), copies=a.copies)
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    except TraceSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if a.action == "ufresh":
        try:
            print(ufresh(trace))
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        return 0
    ok, pos = validate_trace(trace)
    if ok:
        print("valid")
        return 0
    print(f"invalid at {pos}: {trace.actions[pos]}")
    return 1


def cmd_matrix(a) -> int:
    status = 0
    for cell in MATRIX:
        res = run_game(SCRIPTS[cell.attack], cell.mode, cell.sigma, a.trials, a.seed,
                       jobs=a.jobs, window_c=a.window_c)
        ok = cell.passes(res.advantage)
        status |= not ok
        print(result_line(cell.attack, res.advantage, res.halfwidth, res.trials,
                          protocol=cell.mode.value, sigma=cell.sigma.value,
                          expect="win" if cell.vulnerable else "lose",
                          verdict="pass" if ok else "fail"))
    return status


# -- parser ---------------------------------------------------------------

def _protocol(value: str) -> ProtocolMode:
    try:
        return ProtocolMode(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown protocol {value!r}") from None


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--protocol", type=_protocol, default=ProtocolMode.AKA_PLUS,
                        metavar="{" + "|".join(m.value for m in ProtocolMode) + "}")
    common.add_argument("--trials", type=_positive, default=100)
    common.add_argument("--seed", default="0")
    common.add_argument("--window-c", type=_positive, default=DEFAULT_WINDOW_C)
    common.add_argument("--q-budget", type=_positive, default=None,
                        help="oracle call budget (default: the script's own)")
    common.add_argument("--out", default=None, help="write the JSONL transcript here")
    common.add_argument("--jobs", type=_positive, default=1)
    common.add_argument("--sigma", choices=[s.value for s in SigmaUpdate], default=None)

    p = argparse.ArgumentParser(prog="akalab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    h = sub.add_parser("honest", parents=[common], help="run honest sessions, print the transcript")
    h.add_argument("--subscribers", type=_positive, default=2)
    h.add_argument("--sessions", type=_positive, default=2, help="sessions per subscriber")
    h.set_defaults(func=cmd_honest)

    at = sub.add_parser("attack", parents=[common], help="run an attack against --protocol")
    at.add_argument("name", choices=sorted(set(SCRIPTS) - {"random-guess"}) + list(DEMOS))
    at.set_defaults(func=cmd_attack)

    g = sub.add_parser("game", parents=[common], help="estimate a script's advantage")
    g.add_argument("script", choices=sorted(SCRIPTS))
    g.set_defaults(func=cmd_game)

    tr = sub.add_parser("trace", help="check or anonymize a symbolic trace file")
    tr.add_argument("action", choices=["validate", "ufresh"])
    tr.add_argument("file")
    tr.add_argument("--copies", type=_positive, default=8)
    tr.set_defaults(func=cmd_trace)

    mx = sub.add_parser("matrix", parents=[common], help="run the attack x protocol grid")
    mx.set_defaults(func=cmd_matrix)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"akalab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
