#!/usr/bin/env python3
"""
ergolab Main Entry Point

    ergolab run <config.json> [--output DIR]
    ergolab validate <config.json>
    ergolab oracle <name> | --list

Global options: --settings PATH (lab settings YAML), --log-level LEVEL.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from src.cli.experiments import validate
from src.cli.oracles import ORACLES
from src.cli.runner import EXIT_ERROR, EXIT_INVALID, EXIT_OK, execute
from src.core.errors import ErgoLabError
from src.core.settings import LabSettings, load_settings

logger = logging.getLogger(__name__)


class ErgoLab:
    """Main application class: settings, logging and the three commands"""

    def __init__(self, settings_path: Optional[str] = None, log_level: Optional[str] = None):
        self.settings = self.load_settings(settings_path)
        self.setup_logging(log_level)

    def load_settings(self, settings_path: Optional[str] = None) -> LabSettings:
        """Load lab settings from YAML (configs/ergolab.yaml by default)"""
        return load_settings(Path(settings_path) if settings_path else None)

    def setup_logging(self, level: Optional[str] = None):
        block = self.settings.logging
        handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
        if block.file:
            handlers.append(logging.FileHandler(block.file))
        logging.basicConfig(
            level=getattr(logging, (level or block.level).upper(), logging.INFO),
            format=block.format,
            handlers=handlers,
            force=True,
        )

    def run(self, config_path: str, output: Optional[str] = None) -> int:
        return execute(Path(config_path), Path(output) if output else None, self.settings)

    def validate(self, config_path: str) -> int:
        path = Path(config_path)
        try:
            data = json.loads(path.read_bytes())
        except (OSError, ValueError) as e:
            print(f"config: cannot read {path}: {e}", file=sys.stderr)
            return EXIT_INVALID
        problems = validate(data, self.settings)
        for problem in problems:
            print(problem)
        if problems:
            return EXIT_INVALID
        print(f"{path}: ok")
        return EXIT_OK

    def oracle(self, name: Optional[str], list_only: bool = False) -> int:
        if list_only or name is None:
            for oracle_name in ORACLES.list_names():
                description = ORACLES.get_metadata(oracle_name).get('description', '')
                print(f"{oracle_name}\t{description}")
            return EXIT_OK
        handler = ORACLES.get(name)
        if handler is None:
            print(f"unknown oracle '{name}'; available: {', '.join(ORACLES.list_names())}",
                  file=sys.stderr)
            return EXIT_INVALID
        logger.info(f"Running oracle {name}")
        print(json.dumps(handler(), indent=2))
        return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='ergolab',
                                     description='Finite-horizon ergodic diagnostics lab')
    parser.add_argument('--settings', help='lab settings YAML (default configs/ergolab.yaml)')
    parser.add_argument('--log-level', help='override the configured log level')
    commands = parser.add_subparsers(dest='command', required=True)

    run_cmd = commands.add_parser('run', help='run an experiment config')
    run_cmd.add_argument('config', help='experiment config (JSON)')
    run_cmd.add_argument('--output', help='parent directory for the run directory')

    validate_cmd = commands.add_parser('validate', help='validate an experiment config')
    validate_cmd.add_argument('config', help='experiment config (JSON)')

    oracle_cmd = commands.add_parser('oracle', help='print a registered oracle')
    oracle_cmd.add_argument('name', nargs='?', help='oracle name')
    oracle_cmd.add_argument('--list', action='store_true', help='list registered oracles')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    args = build_parser().parse_args(argv)
    try:
        app = ErgoLab(args.settings, args.log_level)
    except ErgoLabError as e:
        print(f"settings: {e}", file=sys.stderr)
        return EXIT_INVALID

    try:
        if args.command == 'run':
            return app.run(args.config, args.output)
        if args.command == 'validate':
            return app.validate(args.config)
        return app.oracle(args.name, args.list)
    except ErgoLabError as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
