"""Exception types shared across the toolkit."""


class BHDensityError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(BHDensityError):
    """Operands live in different ambient dimensions."""


class DegenerateSpan(BHDensityError):
    """Two vectors were too close to linearly dependent to span a plane."""


class UnsupportedDimension(BHDensityError):
    """Ambient dimension outside the supported range (2..8)."""


class UnboundedSection(BHDensityError):
    """The functionals restricted to the plane do not cut out a bounded set."""


class NotSimple(BHDensityError):
    """A bivector failed the simplicity (decomposability) test."""


class ZeroBivector(BHDensityError):
    """Operation requires a nonzero bivector."""


class InsufficientSamples(BHDensityError):
    """Monte Carlo estimate did not reach the required relative precision."""


class InvalidId(BHDensityError):
    """Unknown member of the named plane family."""


class IllConditioned(BHDensityError):
    """Fit grid too narrow to separate the polynomial coefficients."""


class CertificateFailed(BHDensityError):
    """No positive witness gap at some projection parameter point.

    Carries the offending parameter point, the best gap found there and the
    per-plane gap table so callers can inspect what went wrong.
    """

    def __init__(self, point, max_gap, gaps=None, reason=""):
        self.point = tuple(float(t) for t in point)
        self.max_gap = float(max_gap)
        self.gaps = dict(gaps) if gaps else {}
        self.reason = reason
        msg = f"no witness above threshold at {self.point}: best gap {self.max_gap:.6g}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)
