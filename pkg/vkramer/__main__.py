"""vkramer command line."""
import argparse
import json
import sys

from .config import load_config
from .executor import EXIT_SCHEMA
from .runner import COMMANDS, Runner, RunOptions


def _truncations(text):
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"truncations must be comma-separated integers: {text}")


def _point(text):
    try:
        parts = [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected re,im: {text}")
    if len(parts) == 1:
        return complex(parts[0])
    if len(parts) == 2:
        return complex(parts[0], parts[1])
    raise argparse.ArgumentTypeError(f"expected re,im: {text}")


def read_betas(path):
    """betas file: a json list of [re, im] pairs (or numbers), optionally under "betas"."""
    with open(path) as f:
        payload = json.load(f)
    if isinstance(payload, dict):
        payload = payload.get("betas", [])
    return [complex(*b) if isinstance(b, list) else complex(b) for b in payload]


def parse_args(argv=None):
    parser = argparse.ArgumentParser(prog="vkramer", description="kramer sampling and de branges batteries.")
    parser.add_argument("command", choices=COMMANDS + ("all",))
    parser.add_argument("--scenario", required=True, help="scenario json (a directory for 'all')")
    parser.add_argument("--out", default=None, help="report directory; VKRAMER_OUT takes precedence")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--truncations", type=_truncations, default=None)
    parser.add_argument("--betas", default=None, help="json file of betas for invariance")
    parser.add_argument("--beta", type=_point, default=None, help="re,im for the shift command")
    parser.add_argument("--noise", type=float, default=None, help="sample noise amplitude")
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    config = load_config()

    try:
        betas = read_betas(args.betas) if args.betas else None
    except (OSError, ValueError, TypeError) as e:
        print(f"[FAIL] cannot read betas file {args.betas}: {e}", file=sys.stderr)
        return EXIT_SCHEMA

    options = RunOptions(args.out, args.seed, args.truncations, betas, args.beta, args.noise)
    return Runner(config).run(args.command, args.scenario, options)


if __name__ == "__main__":
    sys.exit(main())
