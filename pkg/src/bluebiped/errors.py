"""Exception types shared across the package."""


class ModelError(ValueError):
    """Model file missing, malformed, or violating a physical invariant."""


class ConfigError(ValueError):
    """Scenario configuration file missing, malformed, or inconsistent."""


class DegenerateModelError(RuntimeError):
    """Mass matrix factorization failed (e.g. a zero-mass distal chain)."""


class DivergenceError(RuntimeError):
    """Simulation state became non-finite."""

    def __init__(self, t: float):
        super().__init__(f"simulation diverged (non-finite state) at t = {t:.6g} s")
        self.t = t
