"""Exception types raised across the package."""


class LindchaosError(Exception):
    """Base class for all package errors."""


class DimensionError(LindchaosError, ValueError):
    pass


class NotHermitianError(LindchaosError, ValueError):
    pass


class NotFaithfulError(LindchaosError, ValueError):
    """A state has an eigenvalue below the faithfulness floor."""


class SupportError(LindchaosError, ValueError):
    """supp(rho) is not contained in supp(sigma)."""


class NumericalError(LindchaosError, ArithmeticError):
    """Integrator blow-up or an ill-conditioned propagator."""


class InadmissibleError(LindchaosError, ValueError):
    """Moment parameter q outside the admissible interval."""


class BudgetError(LindchaosError, ValueError):
    """Enumeration or dimension budget exceeded."""


class ConfigError(LindchaosError, ValueError):
    pass


class ModelError(LindchaosError, ValueError):
    """Model operators violate a structural requirement such as swap symmetry."""
