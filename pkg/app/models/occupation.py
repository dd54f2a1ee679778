from dataclasses import dataclass
from ..errors import DomainError


@dataclass(frozen=True, order=False)
class OccupationVector:
    """Counts {n_i} of particles in each of the d levels; labels one symmetric basis state.

    Also used for the output labels {m_j} of the irreducible blocks.
    """

    counts: tuple

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) < 2:
            raise DomainError(f"occupation vector needs d >= 2 levels, got {len(counts)}")
        if any(c < 0 for c in counts):
            raise DomainError(f"occupation counts must be non-negative: {counts}")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def uniform(cls, value, d):
        return cls((value,) * d)

    @property
    def d(self):
        return len(self.counts)

    @property
    def total(self):
        return sum(self.counts)

    def shifted(self, other):
        """Level-wise sum {m} + {n}."""
        other_counts = other.counts if isinstance(other, OccupationVector) else tuple(other)
        if len(other_counts) != self.d:
            raise DomainError(f"cannot add occupations of length {len(other_counts)} and {self.d}")
        return OccupationVector(tuple(a + b for a, b in zip(self.counts, other_counts)))

    def permuted(self, order):
        return OccupationVector(tuple(self.counts[i] for i in order))

    def is_uniform(self):
        return len(set(self.counts)) == 1

    def label(self):
        return "(" + ",".join(str(c) for c in self.counts) + ")"

    def to_dict(self):
        return {"counts": list(self.counts), "total": self.total}

    def __iter__(self):
        return iter(self.counts)

    def __len__(self):
        return len(self.counts)

    def __getitem__(self, index):
        return self.counts[index]

    def __repr__(self):
        return f"<OccupationVector {self.label()}>"
