from typing import List, Optional


class NsPomdpError(Exception):
    pass


class ConfigurationError(NsPomdpError):
    pass


class GeometryError(NsPomdpError):
    pass


class DimensionMismatchError(GeometryError):
    pass


class UnboundedPolytopeError(GeometryError):
    pass


class EmptyPolytopeError(GeometryError):
    pass


class NonInvertibleMapError(GeometryError):
    pass


class LpError(NsPomdpError):
    pass


class NumericalInstabilityError(LpError):
    pass


class ModelError(NsPomdpError):
    pass


class ModelParseError(ModelError):

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class ModelValidationError(ModelError):

    def __init__(self, issues: List[str]):
        self.issues = list(issues)
        super().__init__(f"{len(self.issues)} validation issue(s): " + "; ".join(self.issues))


class UnavailableActionError(ModelError):
    pass


class PerceptCompatibilityError(ModelError):
    pass


class PointOutsideDomainError(ModelError):
    pass


class BeliefError(NsPomdpError):
    pass


class ZeroProbabilityObservationError(BeliefError):
    pass


class BudgetExceededError(NsPomdpError):
    pass
