"""Second-order multilinear binary operations on Z_p^3 and Z_p^4.

The product is defined componentwise; it is non-commutative and
non-associative in general, has the zero vector as a two-sided identity,
and admits the g/h closed form for squaring.  Vectors and parameter sets
carry their modulus, and mixing moduli is rejected rather than coerced.
"""

from dataclasses import dataclass

from .field import PrimeModulus


class ModulusMismatchError(ValueError):
    """Operands do not share one modulus (or one dimension)."""


def _check_canonical(values, p: int) -> None:
    for v in values:
        if not (0 <= v < p):
            raise ValueError(f"residue {v} not canonical for modulus {p}")


@dataclass(frozen=True, slots=True)
class Vector3:
    a0: int
    a1: int
    a2: int
    modulus: PrimeModulus

    def __post_init__(self):
        _check_canonical((self.a0, self.a1, self.a2), self.modulus.p)

    @property
    def components(self) -> tuple[int, int, int]:
        return (self.a0, self.a1, self.a2)

    @property
    def dim(self) -> int:
        return 3


@dataclass(frozen=True, slots=True)
class Vector4:
    a0: int
    a1: int
    a2: int
    a3: int
    modulus: PrimeModulus

    def __post_init__(self):
        _check_canonical((self.a0, self.a1, self.a2, self.a3), self.modulus.p)

    @property
    def components(self) -> tuple[int, int, int, int]:
        return (self.a0, self.a1, self.a2, self.a3)

    @property
    def dim(self) -> int:
        return 4


@dataclass(frozen=True, slots=True)
class Params3:
    A: int
    B: int
    C: int
    D: int
    E: int
    modulus: PrimeModulus

    def __post_init__(self):
        _check_canonical(self.coefficients, self.modulus.p)

    @property
    def coefficients(self) -> tuple[int, ...]:
        return (self.A, self.B, self.C, self.D, self.E)

    @property
    def dim(self) -> int:
        return 3


@dataclass(frozen=True, slots=True)
class Params4:
    A: int
    B: int
    C: int
    D: int
    E: int
    F: int
    G: int
    H: int
    I: int
    modulus: PrimeModulus

    def __post_init__(self):
        _check_canonical(self.coefficients, self.modulus.p)

    @property
    def coefficients(self) -> tuple[int, ...]:
        return (self.A, self.B, self.C, self.D, self.E,
                self.F, self.G, self.H, self.I)

    @property
    def dim(self) -> int:
        return 4


def vector(components, modulus: PrimeModulus) -> Vector3 | Vector4:
    """Build a Vector3 or Vector4 from a component sequence."""
    comps = tuple(components)
    if len(comps) == 3:
        return Vector3(*comps, modulus)
    if len(comps) == 4:
        return Vector4(*comps, modulus)
    raise ValueError(f"expected 3 or 4 components, got {len(comps)}")


def params(coefficients, modulus: PrimeModulus) -> Params3 | Params4:
    """Build a Params3 (5 coefficients) or Params4 (9 coefficients)."""
    coefs = tuple(coefficients)
    if len(coefs) == 5:
        return Params3(*coefs, modulus)
    if len(coefs) == 9:
        return Params4(*coefs, modulus)
    raise ValueError(f"expected 5 or 9 coefficients, got {len(coefs)}")


def identity(dim: int, modulus: PrimeModulus) -> Vector3 | Vector4:
    """The zero vector, a two-sided multiplicative identity."""
    if dim == 3:
        return Vector3(0, 0, 0, modulus)
    if dim == 4:
        return Vector4(0, 0, 0, 0, modulus)
    raise ValueError(f"dim must be 3 or 4, got {dim}")


def _require_shared_modulus(*objs) -> PrimeModulus:
    m = objs[0].modulus
    for o in objs[1:]:
        if o.modulus != m:
            raise ModulusMismatchError(
                f"moduli differ: {m.p} vs {o.modulus.p}"
            )
    return m


def mul3(a: Vector3, b: Vector3, ps: Params3) -> Vector3:
    m = _require_shared_modulus(a, b, ps)
    p = m.p
    A, B, C, D, E = ps.coefficients
    a0, a1, a2 = a.components
    b0, b1, b2 = b.components
    c0 = (a0 + b0 + a0 * b0 + A * a1 * b1 + C * a2 * b1 + B * a2 * b2) % p
    c1 = (a1 + b1 + a1 * b0 + a0 * b1 + D * a1 * b1 + E * a1 * b2) % p
    c2 = (a2 + b2 + a2 * b0 + a0 * b2 + D * a2 * b1 + E * a2 * b2) % p
    return Vector3(c0, c1, c2, m)


def mul4(a: Vector4, b: Vector4, ps: Params4) -> Vector4:
    m = _require_shared_modulus(a, b, ps)
    p = m.p
    A, B, C, D, E, F, G, H, I = ps.coefficients
    a0, a1, a2, a3 = a.components
    b0, b1, b2, b3 = b.components
    c0 = (a0 + b0 + a0 * b0 + A * a1 * b1 + E * a3 * b1 + B * a2 * b2
          + D * a1 * b2 + F * a3 * b2 + C * a3 * b3) % p
    c1 = (a1 + b1 + a1 * b0 + a0 * b1 + G * a1 * b1 + H * a1 * b2
          + I * a1 * b3) % p
    c2 = (a2 + b2 + a2 * b0 + a0 * b2 + G * a2 * b1 + H * a2 * b2
          + I * a2 * b3) % p
    c3 = (a3 + b3 + a3 * b0 + a0 * b3 + G * a3 * b1 + H * a3 * b2
          + I * a3 * b3) % p
    return Vector4(c0, c1, c2, c3, m)


def mul(a, b, ps):
    """Dimension-dispatching product."""
    if a.dim != b.dim or a.dim != ps.dim:
        raise ModulusMismatchError(
            f"dimension mismatch: {a.dim}, {b.dim}, params {ps.dim}"
        )
    if a.dim == 3:
        return mul3(a, b, ps)
    return mul4(a, b, ps)


def square3_gh(a: Vector3, ps: Params3) -> Vector3:
    """Closed-form squaring a*a = (g(a), a1*h(a), a2*h(a))."""
    m = _require_shared_modulus(a, ps)
    p = m.p
    A, B, C, D, E = ps.coefficients
    a0, a1, a2 = a.components
    g = ((a0 + 1) ** 2 + A * a1 * a1 + B * a2 * a2 + C * a1 * a2 - 1) % p
    h = (D * a1 + E * a2 + 2 * (a0 + 1)) % p
    return Vector3(g, a1 * h % p, a2 * h % p, m)


def square4_gh(a: Vector4, ps: Params4) -> Vector4:
    m = _require_shared_modulus(a, ps)
    p = m.p
    A, B, C, D, E, F, G, H, I = ps.coefficients
    a0, a1, a2, a3 = a.components
    g = ((a0 + 1) ** 2 + A * a1 * a1 + B * a2 * a2 + C * a3 * a3
         + D * a1 * a2 + E * a1 * a3 + F * a2 * a3 - 1) % p
    h = (G * a1 + H * a2 + I * a3 + 2 * (a0 + 1)) % p
    return Vector4(g, a1 * h % p, a2 * h % p, a3 * h % p, m)


def right_mul_stepper(b, ps):
    """Fast closure computing x -> x * b on raw component tuples.

    Fixing the right factor makes the product affine in the left one, so
    the per-step work collapses to a handful of fused coefficients.  Hot
    loops (orbits, brute-force iteration, PRNG streams) use this instead
    of the boxed mul().
    """
    p = ps.modulus.p
    if b.dim == 3:
        A, B, C, D, E = ps.coefficients
        b0, b1, b2 = b.components
        u = (1 + b0) % p
        q1 = (A * b1) % p
        q2 = (C * b1 + B * b2) % p
        v = (1 + b0 + D * b1 + E * b2) % p

        def step3(x):
            x0, x1, x2 = x
            return ((b0 + x0 * u + x1 * q1 + x2 * q2) % p,
                    (b1 + x0 * b1 + x1 * v) % p,
                    (b2 + x0 * b2 + x2 * v) % p)

        return step3

    A, B, C, D, E, F, G, H, I = ps.coefficients
    b0, b1, b2, b3 = b.components
    u = (1 + b0) % p
    q1 = (A * b1 + D * b2) % p
    q2 = (B * b2) % p
    q3 = (E * b1 + F * b2 + C * b3) % p
    v = (1 + b0 + G * b1 + H * b2 + I * b3) % p

    def step4(x):
        x0, x1, x2, x3 = x
        return ((b0 + x0 * u + x1 * q1 + x2 * q2 + x3 * q3) % p,
                (b1 + x0 * b1 + x1 * v) % p,
                (b2 + x0 * b2 + x2 * v) % p,
                (b3 + x0 * b3 + x3 * v) % p)

    return step4


def left_mul_stepper(a, ps):
    """Fast closure computing y -> a * y on raw component tuples."""
    p = ps.modulus.p
    if a.dim == 3:
        A, B, C, D, E = ps.coefficients
        a0, a1, a2 = a.components
        u = (1 + a0) % p
        r1 = (A * a1 + C * a2) % p
        r2 = (B * a2) % p
        w1 = (1 + a0 + D * a1) % p
        w2 = (1 + a0 + E * a2) % p
        e1 = (E * a1) % p
        d2 = (D * a2) % p

        def lstep3(y):
            y0, y1, y2 = y
            return ((a0 + y0 * u + y1 * r1 + y2 * r2) % p,
                    (a1 + y0 * a1 + y1 * w1 + y2 * e1) % p,
                    (a2 + y0 * a2 + y1 * d2 + y2 * w2) % p)

        return lstep3

    A, B, C, D, E, F, G, H, I = ps.coefficients
    a0, a1, a2, a3 = a.components
    u = (1 + a0) % p
    r1 = (A * a1 + E * a3) % p
    r2 = (B * a2 + D * a1 + F * a3) % p
    r3 = (C * a3) % p

    def lstep4(y):
        y0, y1, y2, y3 = y
        z0 = (a0 + y0 * u + y1 * r1 + y2 * r2 + y3 * r3) % p
        z1 = (a1 + y0 * a1 + y1 * (1 + a0 + G * a1) + y2 * (H * a1) + y3 * (I * a1)) % p
        z2 = (a2 + y0 * a2 + y1 * (G * a2) + y2 * (1 + a0 + H * a2) + y3 * (I * a2)) % p
        z3 = (a3 + y0 * a3 + y1 * (G * a3) + y2 * (H * a3) + y3 * (1 + a0 + I * a3)) % p
        return (z0, z1, z2, z3)

    return lstep4
