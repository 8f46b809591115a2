import argparse
import sys
from typing import List, Optional

from src.commands import register_commands
from src.commands.base import BUDGET, CONFIGURATION, FAILURE, NUMERICAL, OK, VALIDATION
from src.core import get_logger, set_level, setup_logger
from src.core.exceptions import (
    BeliefError,
    BudgetExceededError,
    ConfigurationError,
    ModelError,
    NumericalInstabilityError
)
from src.utils import emit, jsend_error, jsend_fail, jsend_success

setup_logger()
logger = get_logger(__name__)

ERROR_CODES = (
    (ModelError, VALIDATION),
    (BeliefError, VALIDATION),
    (BudgetExceededError, BUDGET),
    (NumericalInstabilityError, NUMERICAL),
    (ConfigurationError, CONFIGURATION),
    (OSError, CONFIGURATION),
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='cli.py', description='NS-POMDP solver')
    parser.add_argument('--log-level', default=None, help='override the configured log level')
    parser.add_argument('--json', action='store_true', help='print a JSON result line instead of text')
    subparsers = parser.add_subparsers(dest='command', required=True)
    register_commands(subparsers)
    return parser


def exit_code_for(error: Exception) -> int:
    for kind, code in ERROR_CODES:
        if isinstance(error, kind):
            return code
    return FAILURE


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        set_level(args.log_level.upper())
    try:
        result = args.handler(args)
    except Exception as e:
        code = exit_code_for(e)
        data = {'issues': e.issues} if hasattr(e, 'issues') else None
        if code == FAILURE:
            logger.exception(f"{args.command} failed")
        else:
            logger.error(f"{args.command} failed: {e}")
        emit(jsend_error(str(e), code, data), sys.stderr)
        return code
    if not args.json:
        emit(result.text)
    elif result.exit_code == OK:
        emit(jsend_success(result.data))
    else:
        emit(jsend_fail(result.data, result.exit_code))
    return result.exit_code


if __name__ == '__main__':
    sys.exit(run())
