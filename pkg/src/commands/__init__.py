from src.commands import export_values, oracle, preimage, robustness, simulate, solve
from src.commands.base import CommandResult

COMMANDS = (solve, simulate, preimage, oracle, export_values, robustness)


def register_commands(subparsers):
    for command in COMMANDS:
        command.register(subparsers)


__all__ = ['CommandResult', 'register_commands']
