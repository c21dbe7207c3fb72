"""Exceptions raised by bsdelattice and the CLI exit code each one maps to."""


class BsdeLatticeError(Exception):
    """Base class of all bsdelattice errors."""
    exit_code = 1


class ConfigSyntaxError(BsdeLatticeError):
    """A run configuration that cannot be parsed.

    Args:
        message: Text describing the problem.
        file_path: Path of the offending file.
        line: One-based line number of the problem.
        column: One-based column number of the problem.
    """
    exit_code = 2

    def __init__(self, message, file_path=None, line=None, column=None):
        self.file_path = file_path
        self.line = line
        self.column = column
        if line is not None:
            message = '{}:{}:{}: {}'.format(file_path or '<config>', line, column,
                                            message)
        BsdeLatticeError.__init__(self, message)


class InvariantError(BsdeLatticeError):
    """An input that violates one of the model invariants.

    Args:
        message: Text describing the problem.
        invariant: Short name of the violated invariant.
    """
    exit_code = 3

    def __init__(self, message, invariant=None):
        self.invariant = invariant
        if invariant:
            message = '{} [{}]'.format(message, invariant)
        BsdeLatticeError.__init__(self, message)


class DomainError(InvariantError):
    """A time, node or asset outside the domain of a lattice object."""


class UnsupportedCaseError(InvariantError):
    """A configuration outside the class of problems the solver handles."""


class SolverError(BsdeLatticeError):
    """The backward solver failed at a node."""
    exit_code = 4


class SearchResourceError(BsdeLatticeError):
    """A brute-force search space too large for the configured limits."""
    exit_code = 5


class GlobalProblemError(BsdeLatticeError):
    """A pricing problem whose adjustments depend on more than (t, Y, Z)."""
    exit_code = 6

    LOCALITY = 'The pricing problem is local if every adjustment satisfies ' \
        'X^k_t = h^k(t, Y_t, Z_t); otherwise it is global.'

    def __init__(self, adjustment_name, inputs):
        self.adjustment_name = adjustment_name
        self.inputs = tuple(inputs)
        message = 'Adjustment "{}" reads {} so the pricing problem is global. ' \
            '{}'.format(adjustment_name, list(self.inputs), self.LOCALITY)
        BsdeLatticeError.__init__(self, message)


def exit_code_for(error):
    """Get the CLI exit code for any exception."""
    return getattr(error, 'exit_code', 1)
