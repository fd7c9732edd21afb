"""declc: compiler and reactive runtime for a C-like language extended with
declarative constructs (unidirectional constraints, variable monitors, and
preconditional statements)."""

__version__ = "0.1.0"
