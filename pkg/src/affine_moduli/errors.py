class AffineModuliError(Exception):
    """Base class for errors raised by this package."""


class ContractError(AffineModuliError, ValueError):
    """An input violates an operation's precondition."""


class DegenerateRicciError(ContractError):
    """The (symmetric) Ricci tensor is degenerate where rank 2 is required."""


class TorsionError(ContractError):
    """A torsion-free structure was required."""
