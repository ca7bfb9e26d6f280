"""Exception hierarchy shared by all topochain modules."""


class TopochainError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(TopochainError, ValueError):
    """An input violates a precondition (shape, range, index)."""


class NonHermitianError(ValidationError):
    """A matrix that must be Hermitian is not, beyond tolerance."""

    def __init__(self, max_asymmetry: float, tol: float):
        self.max_asymmetry = max_asymmetry
        self.tol = tol
        super().__init__(
            f"matrix is not Hermitian: max |H - H^dagger| = {max_asymmetry:.3e} > {tol:.1e}"
        )


class ContractError(TopochainError):
    """A numerical contract is violated (closed gap, lost adiabaticity)."""


class CriticalPointError(ContractError, ValueError):
    """The gap is closed at the requested parameters, so the invariant is undefined."""


class GapClosedError(ContractError):
    """Adjacent bands touch somewhere on the (q, theta) grid."""

    def __init__(self, q: float, theta: float, gap: float, band: int):
        self.q = q
        self.theta = theta
        self.gap = gap
        self.band = band
        super().__init__(
            f"gap between bands {band} and {band + 1} closes at q={q:.6g}, "
            f"theta={theta:.6g} (gap={gap:.3e})"
        )


class AdiabaticityError(ContractError):
    """The pumped state left its band beyond the allowed tolerance."""


class EnsembleError(TopochainError):
    """A single disorder realization failed; carries the failing sample index."""

    def __init__(self, sample_index: int, cause: BaseException):
        self.sample_index = sample_index
        self.cause = cause
        super().__init__(f"sample {sample_index} failed: {cause!r}")


class NotEigenstateWarning(UserWarning):
    """The prepared pump state is not an eigenstate of the initial Hamiltonian."""
