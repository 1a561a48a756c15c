import cmath
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Union

from core.errors import InputError

Scalar = Union[Fraction, complex]

TOLERANCE_ENV = "ORBIFOLD_TOLERANCE"
DEFAULT_TOLERANCE = 1e-9

EXACT_MODE = "exact"
FLOAT_MODE = "float"


def default_tolerance() -> float:
    """Float tolerance from ORBIFOLD_TOLERANCE, else 1e-9."""
    raw = os.environ.get(TOLERANCE_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_TOLERANCE
    try:
        tol = float(raw)
    except ValueError:
        raise InputError(f"{TOLERANCE_ENV}={raw!r} is not a number")
    if not tol > 0:
        raise InputError(f"{TOLERANCE_ENV} must be positive, got {raw!r}")
    return tol


def parse_rational(token: Any) -> Fraction:
    """
    Parse an exact rational from an int, a Fraction or a "p/q" / decimal string.

    Args:
        token: Value read from a data file

    Returns:
        The rational value
    """
    if isinstance(token, bool):
        raise InputError(f"not a rational: {token!r}")
    if isinstance(token, (int, Fraction)):
        return Fraction(token)
    if isinstance(token, float):
        return Fraction(str(token))
    if isinstance(token, str):
        try:
            return Fraction(token.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise InputError(f"not a rational: {token!r}")


def is_perfect_square(n: int) -> bool:
    """Check if a non-negative integer is a perfect square."""
    if n < 0:
        return False
    root = math.isqrt(n)
    return root * root == n


def rational_sqrt(value: Fraction) -> Fraction:
    """Positive square root of a rational that is a square of a rational."""
    value = Fraction(value)
    if value < 0 or not (is_perfect_square(value.numerator) and is_perfect_square(value.denominator)):
        raise InputError(f"{value} has no rational square root; use float mode")
    return Fraction(math.isqrt(value.numerator), math.isqrt(value.denominator))


@dataclass(frozen=True)
class ScalarField:
    """
    The scalar arithmetic used by every engine.

    Exact mode computes with Fraction and compares with residual == 0. Float mode computes
    with complex and compares with residual <= tolerance.

    Args:
        mode: "exact" or "float"
        tolerance: Comparison tolerance, ignored in exact mode
    """
    mode: str = EXACT_MODE
    tolerance: float = 0.0

    def __post_init__(self):
        if self.mode not in (EXACT_MODE, FLOAT_MODE):
            raise InputError(f"unknown scalar mode {self.mode!r}")
        if self.mode == FLOAT_MODE and not self.tolerance > 0:
            raise InputError("tolerance must be positive in float mode")

    @property
    def exact(self) -> bool:
        return self.mode == EXACT_MODE

    def zero(self) -> Scalar:
        return Fraction(0) if self.exact else 0j

    def one(self) -> Scalar:
        return Fraction(1) if self.exact else 1 + 0j

    def convert(self, value: Any) -> Scalar:
        """Coerce a Python number into this field."""
        if self.exact:
            if isinstance(value, complex):
                if value.imag != 0:
                    raise InputError(f"complex value {value} in exact mode")
                value = value.real
            return parse_rational(value)
        if isinstance(value, Fraction):
            return complex(float(value))
        return complex(value)

    def parse(self, token: Any) -> Scalar:
        """
        Parse a scalar token of a data file.

        Accepted forms are numbers, "p/q" strings and [re, im] pairs.

        Args:
            token: Raw JSON value

        Returns:
            The scalar in this field
        """
        if isinstance(token, (list, tuple)):
            if len(token) != 2:
                raise InputError(f"complex scalar must be [re, im], got {token!r}")
            re, im = (parse_rational(part) if isinstance(part, str) else part for part in token)
            if self.exact:
                if parse_rational(im) != 0:
                    raise InputError(f"complex value {token!r} in exact mode")
                return parse_rational(re)
            return complex(float(re), float(im))
        if isinstance(token, str) and not self.exact:
            try:
                return complex(float(parse_rational(token)))
            except InputError:
                try:
                    return complex(token.replace(" ", ""))
                except ValueError:
                    raise InputError(f"not a scalar: {token!r}")
        if isinstance(token, bool) or not isinstance(token, (int, float, str, Fraction, complex)):
            raise InputError(f"not a scalar: {token!r}")
        return self.convert(token)

    def format(self, value: Scalar) -> str:
        """Exact values print as p/q, float values with 17 significant digits."""
        if self.exact:
            return str(Fraction(value))
        value = complex(value)
        if abs(value.imag) <= self.tolerance:
            return format(value.real, ".17g")
        return f"{value.real:.17g}{value.imag:+.17g}j"

    def to_json(self, value: Scalar) -> Any:
        if self.exact:
            return str(Fraction(value))
        value = complex(value)
        return [value.real, value.imag]

    def is_zero(self, value: Scalar) -> bool:
        if self.exact:
            return value == 0
        return abs(value) <= self.tolerance

    def residual(self, left: Scalar, right: Scalar) -> Union[Fraction, float]:
        """Absolute difference, exact in exact mode."""
        if self.exact:
            return abs(Fraction(left) - Fraction(right))
        return abs(complex(left) - complex(right))

    def passes(self, residual) -> bool:
        if self.exact:
            return residual == 0
        return residual <= self.tolerance

    def sqrt(self, value: Scalar) -> Scalar:
        """Positive root for positive reals, principal branch otherwise."""
        if self.exact:
            return rational_sqrt(value)
        value = complex(value)
        if value.imag == 0 and value.real >= 0:
            return complex(math.sqrt(value.real))
        return cmath.sqrt(value)

    def inverse(self, value: Scalar) -> Scalar:
        if value == 0:
            raise ZeroDivisionError("scalar is not invertible")
        return 1 / value if not self.exact else 1 / Fraction(value)

    def power(self, value: Scalar, exponent: int) -> Scalar:
        if exponent < 0:
            return self.inverse(value) ** (-exponent)
        return value ** exponent if exponent else self.one()


EXACT = ScalarField(EXACT_MODE)


def float_field(tolerance: float = None) -> ScalarField:
    """Float field with the given tolerance, defaulting to the environment."""
    return ScalarField(FLOAT_MODE, default_tolerance() if tolerance is None else tolerance)


def field_for(mode: str, tolerance: float = None) -> ScalarField:
    if mode == EXACT_MODE:
        return EXACT
    return float_field(tolerance)


"""
from core.math import EXACT, float_field

EXACT.parse("1/2") * 2          # Fraction(1, 1)
EXACT.format(EXACT.parse("4/8"))  # '1/2'

field = float_field(1e-12)
field.sqrt(field.parse([-1, 0]))   # 1j (principal branch)
field.passes(field.residual(0.1 + 0.2, 0.3))  # True
"""
