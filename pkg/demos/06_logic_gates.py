"""Chirped pulses as control inputs: an XOR gate on two levels and a three-level permutation gate."""
from chirpsim import verify_tables
from chirpsim.cli import resolve_path
from chirpsim.config import parse_gate_library

_, library = parse_gate_library(resolve_path("gates_shipped"))
report = verify_tables(library)
print(report.format_table())
