from dataclasses import dataclass, field
import numpy as np
from ..errors import DomainError
from .occupation import OccupationVector


@dataclass(frozen=True)
class ClonerSpec:
    """One economical cloning machine N -> M = N + k*d."""

    d: int
    n_in: int
    k: int

    def __post_init__(self):
        if self.d < 2:
            raise DomainError(f"d must be >= 2, got {self.d}")
        if self.n_in < 1:
            raise DomainError(f"n_in must be >= 1, got {self.n_in}")
        if self.k < 0:
            raise DomainError(f"k must be >= 0, got {self.k}")

    @classmethod
    def from_outputs(cls, d, n_in, m_out):
        """Build the spec for M outputs; M - N must be a non-negative multiple of d."""
        excess = m_out - n_in
        if excess < 0 or excess % d:
            raise DomainError(
                f"M={m_out} is not of the form M = N + k*d with N={n_in}, d={d} and integer k >= 0"
            )
        return cls(d=d, n_in=n_in, k=excess // d)

    @property
    def m_out(self):
        return self.n_in + self.k * self.d

    @property
    def block(self):
        """The uniform output label m_i = k of the optimal machine."""
        return OccupationVector.uniform(self.k, self.d)

    def to_dict(self):
        return {"d": self.d, "n_in": self.n_in, "m_out": self.m_out, "k": self.k}

    def __repr__(self):
        return f"<ClonerSpec d={self.d} {self.n_in}->{self.m_out} k={self.k}>"


@dataclass(frozen=True, eq=False)
class ChoiOperator:
    """R = sum_m p_m |r_m><r_m| on H_+^{(x)M} (x) H_+^{(x)N}, output factor first."""

    d: int
    n_in: int
    m_out: int
    matrix: np.ndarray
    block_weights: dict = field(default_factory=dict)

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.complex128)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "block_weights", dict(self.block_weights))

    @property
    def output_dim(self):
        from ..symspace import sym_dim

        return sym_dim(self.m_out, self.d)

    @property
    def input_dim(self):
        from ..symspace import sym_dim

        return sym_dim(self.n_in, self.d)

    def as_tensor(self):
        """Matrix reshaped to indices (out, in, out', in')."""
        dm, dn = self.output_dim, self.input_dim
        return self.matrix.reshape(dm, dn, dm, dn)

    def partial_trace_output(self):
        """Tr over the M-particle factor; equals the identity for a trace-preserving map."""
        return np.einsum("aiaj->ij", self.as_tensor())

    def rank(self, tol=1e-10):
        return int(np.linalg.matrix_rank(self.matrix, tol=tol, hermitian=True))

    def is_positive(self, tol=1e-12):
        return bool(np.linalg.eigvalsh(self.matrix).min() >= -tol)

    def to_dict(self):
        return {
            "d": self.d,
            "n_in": self.n_in,
            "m_out": self.m_out,
            "side": int(self.matrix.shape[0]),
            "block_weights": [
                {"block": list(block.counts), "weight": float(weight)}
                for block, weight in self.block_weights.items()
            ],
        }

    def __repr__(self):
        return f"<ChoiOperator d={self.d} {self.n_in}->{self.m_out} blocks={len(self.block_weights)}>"
