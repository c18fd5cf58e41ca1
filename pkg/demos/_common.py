"""Shared helper: load a shipped scenario by name."""
from chirpsim.cli import resolve_path
from chirpsim.config import parse_scenario


def shipped(name):
    return parse_scenario(resolve_path(name))
