class ResourceCapError(RuntimeError):
    """An exhaustive computation would exceed the configured size cap."""


class InfeasibleSchedule(ValueError):
    """Sieve parameters admit no schedule satisfying the budget constraints."""
