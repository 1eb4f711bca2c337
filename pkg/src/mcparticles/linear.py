"""First-order (linearization) uncertainty propagation baseline.

A :class:`LinUncertain` carries a central value plus a sparse map from
independent standard-normal source ids to linear sensitivities
(``d_i = df/deps_i * sigma_i``).  Merging sensitivities by source id on
every operation gives exact first-order correlation handling: ``x - x``
has zero uncertainty because the shared source cancels.
"""

import itertools
import math

__all__ = ["LinUncertain", "lin_source", "lin_stats", "lin_cov"]

# unique per process; next() on itertools.count is atomic under the GIL
_source_ids = itertools.count(1)

_REAL_TYPES = (float, int)


class LinUncertain:
    """Central value + per-source linear sensitivities.

    With an empty sensitivity map this behaves exactly like a plain real.
    Values are immutable; derivatives of elementary functions are applied
    analytically (see :mod:`mcparticles.umath`).
    """

    __slots__ = ("value", "_sens")

    def __init__(self, value, sens=None):
        self.value = float(value)
        self._sens = dict(sens) if sens else {}

    @property
    def sens(self):
        """Copy of the source-id -> sensitivity map."""
        return dict(self._sens)

    @property
    def std(self):
        return math.sqrt(math.fsum(d * d for d in self._sens.values()))

    @property
    def var(self):
        return math.fsum(d * d for d in self._sens.values())

    def __repr__(self):
        return f"{self.value:.4g} ± {self.std:.3g}"

    __str__ = __repr__

    # -- linearized combination rules ----------------------------------------

    def _chain(self, value, derivative):
        """New value with sensitivities scaled by a local derivative."""
        if self._sens and not math.isfinite(derivative):
            raise ValueError(
                f"derivative undefined at center value {self.value!r} "
                "for linear propagation")
        if not self._sens:
            return LinUncertain(value)
        return LinUncertain(value, {k: d * derivative for k, d in self._sens.items()})

    def __add__(self, other):
        if isinstance(other, LinUncertain):
            sens = dict(self._sens)
            for k, d in other._sens.items():
                sens[k] = sens.get(k, 0.0) + d
            return LinUncertain(self.value + other.value, sens)
        if isinstance(other, _REAL_TYPES):
            return LinUncertain(self.value + other, self._sens)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, LinUncertain):
            sens = dict(self._sens)
            for k, d in other._sens.items():
                sens[k] = sens.get(k, 0.0) - d
            return LinUncertain(self.value - other.value, sens)
        if isinstance(other, _REAL_TYPES):
            return LinUncertain(self.value - other, self._sens)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, _REAL_TYPES):
            return LinUncertain(other - self.value, {k: -d for k, d in self._sens.items()})
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, LinUncertain):
            sens = {k: d * other.value for k, d in self._sens.items()}
            for k, d in other._sens.items():
                sens[k] = sens.get(k, 0.0) + d * self.value
            return LinUncertain(self.value * other.value, sens)
        if isinstance(other, _REAL_TYPES):
            return LinUncertain(self.value * other, {k: d * other for k, d in self._sens.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LinUncertain):
            if other.value == 0.0:
                raise ZeroDivisionError("division by a central value of zero")
            inv = 1.0 / other.value
            ratio = self.value * inv
            sens = {k: d * inv for k, d in self._sens.items()}
            for k, d in other._sens.items():
                sens[k] = sens.get(k, 0.0) - d * ratio * inv
            return LinUncertain(ratio, sens)
        if isinstance(other, _REAL_TYPES):
            if other == 0.0:
                raise ZeroDivisionError("division by zero")
            return LinUncertain(self.value / other, {k: d / other for k, d in self._sens.items()})
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _REAL_TYPES):
            if self.value == 0.0:
                raise ZeroDivisionError("division by a central value of zero")
            # d/dx (c/x) = -c/x^2
            scale = -other / (self.value * self.value)
            return LinUncertain(other / self.value, {k: d * scale for k, d in self._sens.items()})
        return NotImplemented

    def __pow__(self, other):
        if isinstance(other, LinUncertain):
            value = self.value ** other.value
            # partials: b*a^(b-1) wrt a, a^b*ln(a) wrt b
            da = other.value * self.value ** (other.value - 1.0)
            db = value * math.log(self.value) if self.value > 0.0 else math.inf
            return lin_combine(self, other, value, da, db)
        if isinstance(other, _REAL_TYPES):
            return self._chain(self.value ** other, other * self.value ** (other - 1.0))
        return NotImplemented

    def __rpow__(self, other):
        if isinstance(other, _REAL_TYPES):
            value = other ** self.value
            dv = value * math.log(other) if other > 0.0 else math.inf
            return self._chain(value, dv)
        return NotImplemented

    def __neg__(self):
        return LinUncertain(-self.value, {k: -d for k, d in self._sens.items()})

    def __pos__(self):
        return self

    def __abs__(self):
        if self.value == 0.0 and self._sens:
            raise ValueError("derivative of abs undefined at a central value of zero")
        return self._chain(abs(self.value), math.copysign(1.0, self.value))


def lin_combine(a, b, value, dfda, dfdb):
    """First-order combination of two operands with given partials.

    ``a`` and ``b`` may each be LinUncertain or plain reals (whose
    sensitivities are empty).
    """
    sens = {}
    if isinstance(a, LinUncertain) and a._sens:
        if not math.isfinite(dfda):
            raise ValueError(f"partial derivative undefined at center {a.value!r}")
        for k, d in a._sens.items():
            sens[k] = d * dfda
    if isinstance(b, LinUncertain) and b._sens:
        if not math.isfinite(dfdb):
            raise ValueError(f"partial derivative undefined at center {b.value!r}")
        for k, d in b._sens.items():
            sens[k] = sens.get(k, 0.0) + d * dfdb
    return LinUncertain(value, sens)


def lin_source(mu, sigma=0.0):
    """A fresh independent Gaussian source with mean ``mu`` and spread ``sigma``."""
    if sigma < 0.0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    if sigma == 0.0:
        return LinUncertain(mu)
    return LinUncertain(mu, {next(_source_ids): float(sigma)})


def lin_stats(a):
    """(central value, first-order standard deviation) of ``a``."""
    if isinstance(a, LinUncertain):
        return a.value, a.std
    return float(a), 0.0


def lin_cov(a, b):
    """First-order covariance: sum of sensitivity products over shared sources."""
    if not isinstance(a, LinUncertain) or not isinstance(b, LinUncertain):
        return 0.0
    if len(b._sens) < len(a._sens):
        a, b = b, a
    return math.fsum(d * b._sens[k] for k, d in a._sens.items() if k in b._sens)
