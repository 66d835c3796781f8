"""Python access to the fracflood simulator, well-test oracle and history matcher."""

from ._fracflood import (
    ConfigError,
    Deck,
    DeckError,
    FracfloodError,
    MatchError,
    ParameterError,
    RunResult,
    SolverError,
    StateError,
    default_bounds,
    default_weights,
    generate_observations,
    history_match,
    laplace_pwd,
    load_deck,
    minimize,
    parse_deck,
    representative_names,
    rock_tables,
    simulate,
    stehfest_coefficients,
    stehfest_invert,
    total_objective,
    type_curve,
    variable_count_audit,
)

__all__ = [
    "ConfigError",
    "Deck",
    "DeckError",
    "FracfloodError",
    "MatchError",
    "ParameterError",
    "RunResult",
    "SolverError",
    "StateError",
    "default_bounds",
    "default_weights",
    "generate_observations",
    "history_match",
    "laplace_pwd",
    "load_deck",
    "minimize",
    "parse_deck",
    "representative_names",
    "rock_tables",
    "simulate",
    "stehfest_coefficients",
    "stehfest_invert",
    "total_objective",
    "type_curve",
    "variable_count_audit",
]
