import math
from dataclasses import dataclass, field
import numpy as np
from ..errors import DomainError

TWO_PI = 2.0 * math.pi


def _frozen_array(values, dtype=np.complex128):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """Phases (phi_1, ..., phi_{d-1}) in radians; the phase on level 0 is fixed to zero."""

    phases: tuple

    def __post_init__(self):
        values = tuple(float(p) for p in self.phases)
        if not values:
            raise DomainError("a phase vector needs at least one phase (d >= 2)")
        if not all(math.isfinite(p) for p in values):
            raise DomainError(f"phases must be finite: {values}")
        object.__setattr__(self, "phases", tuple(p % TWO_PI for p in values))

    @classmethod
    def zeros(cls, d):
        if d < 2:
            raise DomainError(f"d must be >= 2, got {d}")
        return cls((0.0,) * (d - 1))

    @classmethod
    def parse(cls, text, d=None):
        """Parse comma-separated decimal radians, e.g. "0.7,1.9"."""
        if text is None or not str(text).strip():
            raise DomainError("empty phase list")
        try:
            values = tuple(float(part) for part in str(text).split(","))
        except ValueError:
            raise DomainError(f"malformed phase list: {text!r}") from None
        if d is not None and len(values) != d - 1:
            raise DomainError(f"expected {d - 1} phases for d={d}, got {len(values)}")
        return cls(values)

    @property
    def d(self):
        return len(self.phases) + 1

    def as_array(self):
        """Length-d array including the fixed zero phase of level 0."""
        return np.concatenate(([0.0], np.array(self.phases)))

    def negated(self):
        return PhaseVector(tuple(-p for p in self.phases))

    def to_dict(self):
        return {"d": self.d, "phases": list(self.phases)}


@dataclass(frozen=True, eq=False)
class QuditState:
    d: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen_array(self.amplitudes)
        if amps.shape != (self.d,):
            raise DomainError(f"qudit state of d={self.d} needs {self.d} amplitudes, got shape {amps.shape}")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-12:
            raise DomainError("qudit state must have unit norm")
        object.__setattr__(self, "amplitudes", amps)

    def to_dict(self):
        return {
            "d": self.d,
            "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }


@dataclass(frozen=True, eq=False)
class SymVector:
    """Amplitudes over the canonical occupation basis of the n-particle symmetric subspace."""

    n: int
    d: int
    amplitudes: np.ndarray
    normalized: bool = field(default=False)

    def __post_init__(self):
        from ..symspace import sym_dim

        amps = _frozen_array(self.amplitudes)
        expected = sym_dim(self.n, self.d)
        if amps.shape != (expected,):
            raise DomainError(
                f"symmetric vector for n={self.n}, d={self.d} needs {expected} amplitudes, got shape {amps.shape}"
            )
        if self.normalized and abs(self.norm() - 1.0) > 1e-12:
            raise DomainError(f"vector flagged normalized has norm {self.norm()!r}")
        object.__setattr__(self, "amplitudes", amps)

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other):
        """<self|other>."""
        if (self.n, self.d) != (other.n, other.d):
            raise DomainError("inner product between different symmetric spaces")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_dict(self):
        from ..symspace import enumerate_occupations

        return {
            "n": self.n,
            "d": self.d,
            "amplitudes": [
                {"occupation": list(occ.counts), "re": float(a.real), "im": float(a.imag)}
                for occ, a in zip(enumerate_occupations(self.n, self.d), self.amplitudes)
            ],
        }

    def __repr__(self):
        return f"<SymVector n={self.n} d={self.d} dim={self.amplitudes.shape[0]}>"
