"""Command line front end.

    mtcavity <command> --config <file> [--out <dir>] [--workers <k>]

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O failure.
The output directory is taken from --out, else $MTCAVITY_OUT, else the config.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .config import COMMANDS, from_dict
from .errors import ConfigError, MtCavityError, ParseError, ValidationError
from .runner import run


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mtcavity", description="Kink transport and cavity-QED estimates for microtubules.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON config file")
    ap.add_argument("--out", default=None, help="output directory (overrides $MTCAVITY_OUT and the config)")
    ap.add_argument("--workers", type=int, default=None, help="sweep worker processes")
    return ap


def load_config(path: str, command: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if isinstance(doc, dict):
        doc.setdefault("command", command)
        if doc["command"] != command:
            raise ValidationError(f"config command {doc['command']!r} does not match {command!r}", "command")
    return from_dict(doc)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers is not None and args.workers < 1:
        print("error: --workers must be at least 1", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config, args.command)
        out = args.out or os.environ.get("MTCAVITY_OUT") or cfg.output_dir
        status = run(cfg, out, args.workers)
    except MtCavityError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    if status:
        print(f"run failed (exit {status}); see {os.path.join(out, 'manifest.json')}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
