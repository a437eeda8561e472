"""Exception types shared across the package."""


class VlcPlaceError(Exception):
    """Base class for all package errors."""


class ScenarioError(VlcPlaceError):
    """Scenario config failed to parse or validate."""


class InfeasibleGeometryError(VlcPlaceError):
    """A layout or spacing does not fit inside the room."""


class InfeasibleScenarioError(VlcPlaceError):
    """No solution can satisfy the scenario constraints."""


class UniformityInfeasibleError(InfeasibleScenarioError):
    """The uniformity constraint cannot be met; carries the tightest CV found."""

    def __init__(self, tightest_cv, message=None):
        self.tightest_cv = tightest_cv
        super().__init__(
            message or f"uniformity constraint infeasible; tightest achievable CV(RMSE) = {tightest_cv:.6g}"
        )


class ConvergenceError(VlcPlaceError):
    """An iterative routine failed to converge within its iteration budget."""
