"""Forward-mode dual-number scalars and pointwise derivative helpers.

Every derivative taken anywhere in this library goes through the functions
here: first order by seeding a direction, second order by nesting duals.
There are no finite differences outside the test suite and no symbolic
expression trees anywhere.

The elementary functions (`sin`, `cos`, `tan`, `sec`, `sqrt`, `arcsin`,
`arctan`, `atan2`) accept plain floats or :class:`DualScalar` values and can
be nested to any depth.  They raise :class:`DomainError` instead of
returning non-finite values, because the chart singularities cos x = 0 and
cos y = 0 lurk behind most expressions built on top of them.
"""

from __future__ import annotations

import math

__all__ = [
    "DomainError",
    "DualScalar",
    "real_value",
    "sin",
    "cos",
    "tan",
    "sec",
    "sqrt",
    "arcsin",
    "arctan",
    "atan2",
    "derivative",
    "second_deriv",
    "directional",
    "grad3",
    "gradn",
    "second_partial",
]

# |cos| below this counts as a tan/sec pole; generous enough to catch
# float(pi/2) itself (cos of it is ~6.1e-17) while never firing on the
# open chart sampled with the default 0.1 rad margin.
_POLE_TOL = 1e-12


class DomainError(ValueError):
    """An elementary function was evaluated outside its open domain."""

    def __init__(self, func: str, argument, detail: str = ""):
        self.func = func
        self.argument = argument
        msg = f"{func} evaluated at {argument!r}"
        if detail:
            msg = f"{msg} ({detail})"
        super().__init__(msg)


class DualScalar:
    """Number carrying a value and one directional derivative.

    Components may themselves be DualScalar, which yields exact second
    (or higher) derivatives by nesting.  Arithmetic follows the Leibniz
    rule exactly; plain ints/floats mix in as constants (derivative 0).
    """

    __slots__ = ("value", "derivative")

    def __init__(self, value, derivative=0.0):
        self.value = value
        self.derivative = derivative

    def __repr__(self) -> str:
        return f"DualScalar({self.value!r}, {self.derivative!r})"

    def __add__(self, other):
        if isinstance(other, DualScalar):
            return DualScalar(self.value + other.value, self.derivative + other.derivative)
        return DualScalar(self.value + other, self.derivative)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, DualScalar):
            return DualScalar(self.value - other.value, self.derivative - other.derivative)
        return DualScalar(self.value - other, self.derivative)

    def __rsub__(self, other):
        return DualScalar(other - self.value, -self.derivative)

    def __mul__(self, other):
        if isinstance(other, DualScalar):
            return DualScalar(
                self.value * other.value,
                self.derivative * other.value + self.value * other.derivative,
            )
        return DualScalar(self.value * other, self.derivative * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, DualScalar):
            if real_value(other) == 0.0:
                raise DomainError("divide", 0.0, "zero denominator")
            ov = other.value
            return DualScalar(
                self.value / ov,
                (self.derivative * ov - self.value * other.derivative) / (ov * ov),
            )
        if other == 0.0:
            raise DomainError("divide", 0.0, "zero denominator")
        inv = 1.0 / other
        return DualScalar(self.value * inv, self.derivative * inv)

    def __rtruediv__(self, other):
        if real_value(self) == 0.0:
            raise DomainError("divide", 0.0, "zero denominator")
        quotient = other / self.value
        return DualScalar(quotient, -quotient * self.derivative / self.value)

    def __neg__(self):
        return DualScalar(-self.value, -self.derivative)

    def __pow__(self, exponent):
        if not isinstance(exponent, (int, float)):
            raise TypeError("dual powers require a numeric exponent")
        if exponent == 0:
            return DualScalar(self.value**0, 0.0)
        base = real_value(self)
        if exponent != int(exponent) and base < 0.0:
            raise DomainError("pow", base, f"fractional power {exponent} of a negative base")
        if exponent < 0 and base == 0.0:
            raise DomainError("pow", 0.0, f"negative power {exponent} of zero")
        return DualScalar(
            self.value**exponent,
            exponent * self.value ** (exponent - 1) * self.derivative,
        )

    def __float__(self):
        raise TypeError("refusing to flatten a DualScalar; use real_value()")


def real_value(u) -> float:
    """Strip all dual layers off ``u`` and return the underlying float."""
    while isinstance(u, DualScalar):
        u = u.value
    return u


def sin(u):
    if isinstance(u, DualScalar):
        return DualScalar(sin(u.value), cos(u.value) * u.derivative)
    return math.sin(u)


def cos(u):
    if isinstance(u, DualScalar):
        return DualScalar(cos(u.value), -sin(u.value) * u.derivative)
    return math.cos(u)


def tan(u):
    if isinstance(u, DualScalar):
        c = cos(u.value)
        return DualScalar(tan(u.value), u.derivative / (c * c))
    if abs(math.cos(u)) < _POLE_TOL:
        raise DomainError("tan", u, "cosine of the argument vanishes")
    return math.tan(u)


def sec(u):
    if isinstance(u, DualScalar):
        s = sec(u.value)
        return DualScalar(s, s * tan(u.value) * u.derivative)
    if abs(math.cos(u)) < _POLE_TOL:
        raise DomainError("sec", u, "cosine of the argument vanishes")
    return 1.0 / math.cos(u)


def sqrt(u):
    if isinstance(u, DualScalar):
        r = sqrt(u.value)
        if real_value(r) == 0.0:
            raise DomainError("sqrt", 0.0, "derivative singular at zero")
        return DualScalar(r, u.derivative / (2.0 * r))
    if u < 0.0:
        raise DomainError("sqrt", u, "negative radicand")
    return math.sqrt(u)


def arcsin(u):
    if isinstance(u, DualScalar):
        return DualScalar(arcsin(u.value), u.derivative / sqrt(1.0 - u.value * u.value))
    if u < -1.0 or u > 1.0:
        raise DomainError("arcsin", u, "argument outside [-1, 1]")
    return math.asin(u)


def arctan(u):
    if isinstance(u, DualScalar):
        return DualScalar(arctan(u.value), u.derivative / (1.0 + u.value * u.value))
    return math.atan(u)


def atan2(y, x):
    """Quadrant-aware arctangent, dual-capable in both arguments."""
    if isinstance(y, DualScalar) or isinstance(x, DualScalar):
        if not isinstance(y, DualScalar):
            y = DualScalar(y, 0.0)
        if not isinstance(x, DualScalar):
            x = DualScalar(x, 0.0)
        rsq = x.value * x.value + y.value * y.value
        if real_value(rsq) == 0.0:
            raise DomainError("atan2", (real_value(y), real_value(x)), "both arguments zero")
        return DualScalar(
            atan2(y.value, x.value),
            (x.value * y.derivative - y.value * x.derivative) / rsq,
        )
    if y == 0.0 and x == 0.0:
        raise DomainError("atan2", (y, x), "both arguments zero")
    return math.atan2(y, x)


def derivative(f, x0):
    """First derivative of a scalar function at ``x0``.

    ``x0`` may itself be a DualScalar, in which case the result carries the
    outer derivative along (this is how nesting composes).
    """
    result = f(DualScalar(x0, 1.0))
    if isinstance(result, DualScalar):
        return result.derivative
    return 0.0


def second_deriv(f, x0):
    """Second derivative of a scalar function at ``x0`` via nested duals."""
    return derivative(lambda t: derivative(f, t), x0)


def directional(f, args, direction):
    """Value of ``f(*args)`` and its derivative along ``direction``.

    One forward pass; both ``args`` and ``direction`` entries may be duals
    (the latter happens when an outer differentiation supplies the
    direction, e.g. in total-derivative contractions).
    """
    seeded = tuple(DualScalar(a, d) for a, d in zip(args, direction))
    result = f(*seeded)
    if isinstance(result, DualScalar):
        return result.value, result.derivative
    return result, 0.0


def grad3(f, p):
    """Gradient of a scalar function of three reals at ``p``.

    Exact to machine precision for compositions of the supported
    elementary functions.  Domain failures are re-raised with the
    evaluation point attached.
    """
    return gradn(f, p)


def gradn(f, args):
    """Gradient of a scalar function of ``len(args)`` reals."""
    n = len(args)
    out = []
    try:
        for i in range(n):
            seeded = tuple(
                DualScalar(a, 1.0 if j == i else 0.0) for j, a in enumerate(args)
            )
            result = f(*seeded)
            out.append(result.derivative if isinstance(result, DualScalar) else 0.0)
    except DomainError as err:
        if all(not isinstance(a, DualScalar) for a in args):
            raise DomainError(
                err.func, err.argument, f"at evaluation point {tuple(args)!r}"
            ) from err
        raise
    return tuple(out)


def second_partial(f, args, i, j):
    """Mixed second partial d^2 f / d args[i] d args[j] via nested duals."""
    ej = tuple(1.0 if m == j else 0.0 for m in range(len(args)))
    ei = tuple(1.0 if m == i else 0.0 for m in range(len(args)))

    def inner(*a):
        return directional(f, a, ej)[1]

    return directional(inner, args, ei)[1]
