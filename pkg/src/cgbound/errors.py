"""Exception types shared across the package.

The CLI maps these onto exit codes: input errors -> 2, infeasible fits -> 3,
numeric failures -> 4.
"""


class InputDataError(ValueError):
    """Malformed or unusable input (files, samples, parameters)."""


class BiasedTargetError(InputDataError):
    """Target bias exceeds the symmetric-unimodal tolerance; use the paired path."""


class InfeasibleFitError(RuntimeError):
    """No feasible bound exists within the search budget."""


class NumericFailure(RuntimeError):
    """A numerical step failed (divergent grid, non-finite quantile, ...)."""
