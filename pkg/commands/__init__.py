"""Command-line subcommands for Hypercheck."""

from commands import evaluate, forensics, sweep, verify

SUBCOMMANDS = (verify, sweep, evaluate, forensics)
