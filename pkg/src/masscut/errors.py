"""Exception hierarchy shared by all solvers."""


class MassCutError(Exception):
    """Base class for every error raised by masscut."""


class DimensionError(MassCutError, ValueError):
    pass


class InputError(MassCutError, ValueError):
    pass


class NoConvergence(MassCutError):
    """A solver exhausted its budget. ``report`` holds the best attempt."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class PreconditionError(MassCutError):
    """A certificate required by a solver could not be produced."""


class NotSeparated(PreconditionError):
    def __init__(self, split, message=None):
        self.split = split
        super().__init__(message or f"no strictly separating hyperplane for split {split}")


class NotNicelySeparated(PreconditionError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"measure {index} cannot be separated from the others")


class NotConcentrated(PreconditionError):
    def __init__(self, condition, message=None):
        self.condition = condition
        super().__init__(message or f"concentration condition violated: {condition}")


class VerticalTangent(PreconditionError):
    pass


class SheetCollision(NoConvergence):
    pass


class PartitionFailure(MassCutError):
    pass
