"""Numerical tolerances shared by every module."""

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Thresholds used throughout the package.

    Attributes
    ----------
    null : float
        A unit lift ``x`` is null when ``|<x, x>| <= null``.
    sign : float
        Pairings of unit lifts below ``sign * |gram| * d**2`` (``d`` the
        chordal distance between the points) count as numerically zero.
    degenerate : float
        Relative eigenvalue threshold for the numerical nullity of a form.
    dedupe_radius : float
        Angular radius below which two projective points are the same.
    proximal : float
        An element is proximal when its top modulus gap exceeds ``1 + proximal``.
    boundary : float
        Slack below which a point counts as lying on a domain boundary.
    membership : float
        Slack used for cone membership tests.
    """

    null: float = 1e-9
    sign: float = 1e-10
    degenerate: float = 1e-10
    dedupe_radius: float = 1e-6
    proximal: float = 1e-6
    boundary: float = 1e-9
    membership: float = 1e-12

    def __post_init__(self):
        for name in self.names():
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be positive")

    def updated(self, **overrides):
        return replace(self, **overrides)

    @classmethod
    def names(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def from_strings(cls, pairs, base=None):
        """Build from ``KEY=VAL`` strings, as given on the command line."""
        base = base if base is not None else cls()
        known = set(cls.names())
        overrides = {}
        for item in pairs:
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise ValueError(f"unknown tolerance override {item!r}; known keys: {sorted(known)}")
            try:
                overrides[key] = float(value)
            except ValueError as exc:
                raise ValueError(f"tolerance {key} needs a number, got {value!r}") from exc
            if not overrides[key] > 0:
                raise ValueError(f"tolerance {key} must be positive")
        return base.updated(**overrides)

    def as_dict(self):
        return {name: getattr(self, name) for name in self.names()}


DEFAULT_TOLERANCES = Tolerances()
