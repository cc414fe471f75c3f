"""Lie-algebra kernels for so(3), so(4) and se(3) in R^3 vector coordinates.

Every operation broadcasts over leading axes: a single vector of shape (3,)
and a grid field of shape (n, 3) go through the same code path.  Pairs of
vectors carry a tag so that the so(4) and se(3) brackets, which differ in a
single term, can never be mixed silently.

The 4x4 matrix images exist to cross-check the vector formulas; they are not
used by the solvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SO4 = "so4"
SE3 = "se3"
TAGS = (SO4, SE3)


class TagMismatchError(ValueError):
    """Raised when a bracket or pairing receives elements of different algebras."""


def _arr(u) -> np.ndarray:
    u = np.asarray(u)
    if u.dtype.kind not in "fc":
        u = u.astype(float)
    return u


def cross(u, v) -> np.ndarray:
    """Pointwise cross product along the last axis (real or complex)."""
    u = _arr(u)
    v = _arr(v)
    return np.stack(
        [
            u[..., 1] * v[..., 2] - u[..., 2] * v[..., 1],
            u[..., 2] * v[..., 0] - u[..., 0] * v[..., 2],
            u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0],
        ],
        axis=-1,
    )


def dot(u, v) -> np.ndarray:
    """Pointwise dot product along the last axis (no conjugation)."""
    return np.sum(_arr(u) * _arr(v), axis=-1)


# --------------------------------------------------------------------------
# so(3)
# --------------------------------------------------------------------------


def hat3(u) -> np.ndarray:
    """Map u in R^3 to the skew matrix with ``hat3(u) @ v == u x v``."""
    u = _arr(u)
    m = np.zeros(u.shape[:-1] + (3, 3), dtype=u.dtype)
    x, y, z = u[..., 0], u[..., 1], u[..., 2]
    m[..., 0, 1] = -z
    m[..., 0, 2] = y
    m[..., 1, 0] = z
    m[..., 1, 2] = -x
    m[..., 2, 0] = -y
    m[..., 2, 1] = x
    return m


def unhat3(m) -> np.ndarray:
    """Inverse of :func:`hat3`; reads the three independent entries."""
    m = _arr(m)
    return np.stack([m[..., 2, 1], m[..., 0, 2], m[..., 1, 0]], axis=-1)


def ad_so3(a, b) -> np.ndarray:
    return cross(a, b)


def pair_so3(u, v) -> np.ndarray:
    return dot(u, v)


# --------------------------------------------------------------------------
# pairs: so(4) and se(3)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AlgPair:
    """Element of so(4) or se(3) stored as two R^3 legs.

    For so(4) the legs are the J and K coefficients; for se(3) they are the
    rotational and translational parts.  Legs may be single vectors or whole
    grid fields of shape (n, 3).
    """

    first: np.ndarray
    second: np.ndarray
    tag: str

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown algebra tag {self.tag!r}")
        object.__setattr__(self, "first", _arr(self.first))
        object.__setattr__(self, "second", _arr(self.second))

    def _check(self, other: "AlgPair") -> None:
        if not isinstance(other, AlgPair):
            raise TypeError(f"expected AlgPair, got {type(other).__name__}")
        if other.tag != self.tag:
            raise TagMismatchError(f"cannot combine {self.tag} with {other.tag}")

    def __add__(self, other: "AlgPair") -> "AlgPair":
        self._check(other)
        return AlgPair(self.first + other.first, self.second + other.second, self.tag)

    def __sub__(self, other: "AlgPair") -> "AlgPair":
        self._check(other)
        return AlgPair(self.first - other.first, self.second - other.second, self.tag)

    def __neg__(self) -> "AlgPair":
        return AlgPair(-self.first, -self.second, self.tag)

    def __mul__(self, c) -> "AlgPair":
        c = np.asarray(c)
        if c.ndim:
            c = c[..., None]
        return AlgPair(c * self.first, c * self.second, self.tag)

    __rmul__ = __mul__

    def norm(self) -> np.ndarray:
        """Pointwise Euclidean norm of the six coordinates."""
        return np.sqrt(
            np.sum(np.abs(self.first) ** 2, axis=-1) + np.sum(np.abs(self.second) ** 2, axis=-1)
        )

    def map(self, fn) -> "AlgPair":
        return AlgPair(fn(self.first), fn(self.second), self.tag)


def so4(first, second) -> AlgPair:
    return AlgPair(first, second, SO4)


def se3(first, second) -> AlgPair:
    return AlgPair(first, second, SE3)


def _require(tag: str, *elems: AlgPair) -> None:
    for e in elems:
        if not isinstance(e, AlgPair):
            raise TypeError(f"expected AlgPair, got {type(e).__name__}")
        if e.tag != tag:
            raise TagMismatchError(f"expected {tag} element, got {e.tag}")


def ad_so4(p: AlgPair, q: AlgPair) -> AlgPair:
    """so(4) bracket as the intertwined vector product."""
    _require(SO4, p, q)
    O, G = p.first, p.second
    o, g = q.first, q.second
    return AlgPair(cross(O, o) + cross(G, g), cross(O, g) + cross(G, o), SO4)


def ad_se3(p: AlgPair, q: AlgPair) -> AlgPair:
    """se(3) bracket: ad_(W,V)(O,G) = (W x O, W x G - O x V)."""
    _require(SE3, p, q)
    W, V = p.first, p.second
    O, G = q.first, q.second
    return AlgPair(cross(W, O), cross(W, G) - cross(O, V), SE3)


def adstar_se3(p: AlgPair, m: AlgPair) -> AlgPair:
    """Coadjoint action on se(3)* written in cross-pairing coordinates.

    Under the cross pairing the dual action is exactly the negative bracket.
    """
    _require(SE3, p, m)
    return -ad_se3(p, m)


def cross_pair_se3(m: AlgPair, x: AlgPair) -> np.ndarray:
    """<<(P, M), (O, G)>> = P.G + M.O."""
    _require(SE3, m, x)
    return dot(m.first, x.second) + dot(m.second, x.first)


def pair_so4(p: AlgPair, q: AlgPair) -> np.ndarray:
    _require(SO4, p, q)
    return dot(p.first, q.first) + dot(p.second, q.second)


def bracket(p, q):
    """Dispatch to the bracket matching the operands (cross product for bare vectors)."""
    if isinstance(p, AlgPair) or isinstance(q, AlgPair):
        if not (isinstance(p, AlgPair) and isinstance(q, AlgPair)):
            raise TypeError("cannot bracket an AlgPair with a bare vector")
        if p.tag != q.tag:
            raise TagMismatchError(f"cannot bracket {p.tag} with {q.tag}")
        return ad_so4(p, q) if p.tag == SO4 else ad_se3(p, q)
    return ad_so3(p, q)


def _hat4(p: AlgPair, bottom_skew: bool) -> np.ndarray:
    O, G = p.first, p.second
    shape = np.broadcast_shapes(O.shape, G.shape)[:-1]
    m = np.zeros(shape + (4, 4), dtype=np.result_type(O, G))
    m[..., :3, :3] = hat3(O)
    m[..., :3, 3] = G
    if bottom_skew:
        m[..., 3, :3] = -G
    return m


def hat4_so4(p: AlgPair) -> np.ndarray:
    """4x4 skew matrix O.J + G.K; the last column carries G and the last row -G."""
    _require(SO4, p)
    return _hat4(p, bottom_skew=True)


def hat4_se3(p: AlgPair) -> np.ndarray:
    """4x4 matrix of se(3): rotation block hat3(O), translation column G, zero bottom row."""
    _require(SE3, p)
    return _hat4(p, bottom_skew=False)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a
