"""Command-line entry point.

Exit codes: 0 pass / proceed, 1 failed check, 2 I/O error, 3 abort decision,
64 usage error, 65 malformed input data.
"""
import argparse
import json
import os
import sys

from . import __version__, kernels
from .channels import ChannelError, channel_from_json, parse_preset
from .protocol import ABORT, ConfigError, ProtocolConfig, run_round
from .purification import NonDistillableError, purify_until
from .selfcheck import run_selfcheck
from .states import DensityOperator, InvalidStateError, qber_of_state
from .twirl import BellDiagonal, InvalidWeightsError, bell_diagonal_of, twirl
from .witness import OutOfRangeError, ppt_verdict_bell, ppt_verdict_numeric, threshold_scan

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_IO = 2
EXIT_ABORT = 3
EXIT_USAGE = 64
EXIT_DATA = 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _echo(command, **config):
    print(json.dumps({"command": command, "config": config}, sort_keys=True))


def _load_state(path):
    """Return a DensityOperator or BellDiagonal parsed from a JSON file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidStateError(f"invalid JSON: {exc}") from None
    if isinstance(obj, list):
        return BellDiagonal.from_json(obj)
    if isinstance(obj, dict):
        if obj.get("dim") != 4:
            raise InvalidStateError("expected a two-qubit state (dim 4)")
        return DensityOperator.from_json(obj)
    raise InvalidStateError("input must be a weight list or a density-operator object")


def cmd_sweep(args):
    if not (0.0 < args.step <= 0.01):
        raise UsageError(f"--step must lie in (0, 0.01], got {args.step}")
    _echo("sweep", step=args.step, out=args.out, backend=kernels.BACKEND)
    res = threshold_scan(args.step)
    _write(args.out, res.to_csv())
    for name, ok in res.checks.items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return EXIT_OK if res.passed else EXIT_CHECK


def _resolve_channel(source):
    if os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            try:
                return channel_from_json(fh.read())
            except json.JSONDecodeError as exc:
                raise ChannelError(f"invalid channel JSON: {exc}") from None
    return parse_preset(source)


def cmd_simulate(args):
    try:
        ch = _resolve_channel(args.channel)
        cfg = ProtocolConfig(num_pairs=args.pairs, mode=args.mode, seed=args.seed)
    except (ChannelError, ConfigError) as exc:
        raise UsageError(str(exc)) from None
    config = dict(cfg.to_json(), channel=ch.to_json(), confidence=args.confidence,
                  workers=args.workers)
    _echo("simulate", **config)
    summary = run_round(cfg, ch, confidence=args.confidence, workers=args.workers)
    _write(args.out, _dump(dict(summary.to_json(), config=config)))
    q = summary.estimated_qber
    print(f"decision: {summary.decision}  estimated_qber: "
          f"{'n/a' if q is None else format(q, '.6f')}  checked: {summary.checked}")
    return EXIT_ABORT if summary.decision == ABORT else EXIT_OK


def cmd_witness(args):
    state = _load_state(args.input)
    if isinstance(state, BellDiagonal):
        verdict = ppt_verdict_bell(state)
        q = state.qber
    else:
        verdict = ppt_verdict_numeric(state)
        q = qber_of_state(state)
    print(_dump(dict(verdict.to_json(), qber=q)), end="")
    return EXIT_OK


def cmd_qber(args):
    state = _load_state(args.input)
    q = state.qber if isinstance(state, BellDiagonal) else qber_of_state(state)
    print(_dump({"qber": q}), end="")
    return EXIT_OK


def cmd_purify(args):
    if not (0.5 < args.target < 1.0):
        raise UsageError("--target must lie in (1/2, 1)")
    if args.max_rounds < 0:
        raise UsageError("--max-rounds must be non-negative")
    state = _load_state(args.input)
    if isinstance(state, DensityOperator):
        state = bell_diagonal_of(twirl(state))
    try:
        result = purify_until(state, args.target, args.max_rounds)
    except NonDistillableError as exc:
        print(f"not distillable: {exc}", file=sys.stderr)
        return EXIT_CHECK
    print("round,lam00,lam10,lam01,lam11,p_success,cumulative_yield")
    for r, lam, p, y in result.history:
        vals = [*lam.to_json(), p, y]
        print(f"{r}," + ",".join(f"{v:.9g}" for v in vals))
    return EXIT_OK if result.converged else EXIT_CHECK


def cmd_selfcheck(args):
    ok, lines = run_selfcheck()
    for line in lines:
        print(line)
    return EXIT_OK if ok else EXIT_CHECK


def _u64(text):
    v = int(text, 0)
    if not (0 <= v < 2**64):
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser():
    p = _Parser(prog="bb84ent", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sweep", help="classify the (D, G) grid and write CSV")
    s.add_argument("--step", type=float, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("simulate", help="run one protocol round")
    s.add_argument("--mode", choices=("eb", "pm"), required=True)
    s.add_argument("--channel", required=True,
                   help="identity | depol:p | pauli:px,py,pz | ir | sep:D | path to JSON")
    s.add_argument("--pairs", type=int, required=True)
    s.add_argument("--seed", type=_u64, required=True)
    s.add_argument("--confidence", action="store_true",
                   help="also report a Clopper-Pearson 95%% interval")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("witness", help="PPT verdict for a state or weight vector")
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("purify", help="recurrence purification table")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--target", type=float, required=True)
    s.add_argument("--max-rounds", type=int, required=True)
    s.set_defaults(func=cmd_purify)

    s = sub.add_parser("qber", help="QBER of a state or weight vector")
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(func=cmd_qber)

    s = sub.add_parser("selfcheck", help="run internal consistency checks")
    s.set_defaults(func=cmd_selfcheck)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bb84ent: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidStateError, InvalidWeightsError, OutOfRangeError, ValueError) as exc:
        print(f"bb84ent: bad input: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"bb84ent: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
