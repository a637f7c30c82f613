"""Exception types shared by every module of the package."""


class IncidenceError(Exception):
    """Base class for all errors raised by incidence_jordan."""


class ModulusMismatch(IncidenceError):
    pass


class NotInvertible(IncidenceError):
    pass


class BadLabel(IncidenceError):
    pass


class ContextMismatch(IncidenceError):
    pass


class TooLarge(IncidenceError):
    """An enumeration would exceed the configured cap."""


class PreconditionFailed(IncidenceError):
    """A generator or decomposition was called on inputs violating its contract.

    ``clause`` names the violated condition so that reports can quote it.
    """

    def __init__(self, clause, detail=""):
        self.clause = clause
        self.detail = detail
        msg = clause if not detail else f"{clause}: {detail}"
        super().__init__(msg)


class JordanCheckFailed(IncidenceError):
    pass


class HypothesisViolated(IncidenceError):
    pass


class NoDecomposition(IncidenceError):
    def __init__(self, cls, detail=""):
        self.cls = cls
        super().__init__(f"no central idempotent splits class {cls!r}" + (f": {detail}" if detail else ""))


class ConfigError(IncidenceError):
    pass
