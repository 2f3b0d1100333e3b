"""Exception hierarchy shared by all modules."""


class HessQuotError(Exception):
    """Base class for every error raised by hessquot."""


class InvalidInputError(HessQuotError, ValueError):
    """Non-finite, out-of-range or otherwise malformed arguments."""


class AdmissibilityError(HessQuotError):
    """A point (or grid node) left the Garding cone the operator needs.

    ``node`` is the flat node index when the error comes from a grid sweep.
    """

    def __init__(self, message, node=None, multi_index=None):
        super().__init__(message)
        self.node = node
        self.multi_index = multi_index


class NumericalError(HessQuotError):
    """An iterative kernel failed to converge."""


class ExprError(HessQuotError):
    """Base class for expression-language failures."""


class ExprSyntaxError(ExprError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ExprError):
    def __init__(self, name, offset):
        super().__init__(f"unknown identifier {name!r} (at offset {offset})")
        self.name = name
        self.offset = offset


class NonConstantExponentError(ExprSyntaxError):
    """``^`` was given an exponent that references a variable."""


class ExprDomainError(ExprError):
    """Evaluation hit log/sqrt of a negative number, a zero divisor, etc.

    ``offset`` points at the offending AST node in the source text and
    ``sample`` is the index of the first failing point for batched calls.
    """

    def __init__(self, message, offset=None, sample=None):
        where = f" (at offset {offset})" if offset is not None else ""
        if sample is not None:
            where += f" [sample {sample}]"
        super().__init__(message + where)
        self.offset = offset
        self.sample = sample


class ConfigError(HessQuotError):
    """Run configuration could not be turned into a problem."""


class SolverError(HessQuotError):
    """Nonlinear or linear solve failed; carries the partial report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ContinuationError(SolverError):
    def __init__(self, message, last_t, report=None):
        super().__init__(f"{message} (last good t = {last_t:.6g})", report)
        self.last_t = last_t
