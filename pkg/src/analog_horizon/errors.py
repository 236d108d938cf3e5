"""Exception hierarchy for the analog-horizon toolkit."""


class AnalogHorizonError(Exception):
    """Base class for all library errors."""


class SingularMetric(AnalogHorizonError):
    """Full metric matrix is numerically singular at the queried point."""


class NotHyperbolic(AnalogHorizonError):
    """Full metric signature is not (+, -, ..., -)."""


class ComplexRoots(AnalogHorizonError):
    """Dispersion quadratic for xi0 has no real roots."""


class SingularJacobian(AnalogHorizonError):
    """Gauge transform Jacobian is singular on the domain."""


class SuperluminalFlow(AnalogHorizonError):
    """|w| >= c where the four-velocity is required."""


class StagnationPoint(AnalogHorizonError):
    """Flow speed dropped below the stagnation threshold along a trajectory."""


class NotNull(AnalogHorizonError):
    """Requested launch covector does not satisfy the characteristic condition."""


class StepFailure(AnalogHorizonError):
    """Adaptive step controller could not meet tolerance above the minimum step."""


class RankCollapse(AnalogHorizonError):
    """All spatial metric components vanish (rank 0); corrupted input."""


class NotOnErgosphere(AnalogHorizonError):
    """Point is not on the Delta = 0 surface within tolerance."""


class ZeroTimeCoupling(AnalogHorizonError):
    """Kernel direction has vanishing time coupling; inconsistent with hyperbolicity."""


class CharacteristicS1(AnalogHorizonError):
    """Inner boundary is characteristic; flux test undefined."""


class NotCharacteristic(AnalogHorizonError):
    """Curve fails the characteristic-normal residual test."""


class NoConvergence(AnalogHorizonError):
    """Return-map iteration did not contract within the winding budget."""


class EscapedRegion(AnalogHorizonError):
    """Field trajectory left the ergoregion; names the boundary crossed."""

    def __init__(self, boundary: str, message: str = ""):
        self.boundary = boundary
        super().__init__(message or f"trajectory escaped through {boundary} boundary")


class HypothesisViolation(AnalogHorizonError):
    """A scenario hypothesis failed validation; names the failing clause."""

    def __init__(self, clause: str, message: str = ""):
        self.clause = clause
        super().__init__(message or clause)


class NotAxisymmetric(AnalogHorizonError):
    """3D metric is not rotation-equivariant about the symmetry axis."""


class ParseError(AnalogHorizonError):
    """Configuration document is not well formed."""


class ValidationError(AnalogHorizonError):
    """Scenario violates a construction precondition."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class SchemaError(AnalogHorizonError):
    """Gridded-flow file does not match the expected schema."""


class NonFiniteData(AnalogHorizonError):
    """Gridded-flow file contains NaN or infinite values."""
