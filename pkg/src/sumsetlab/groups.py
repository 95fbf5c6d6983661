"""Exact arithmetic for four concrete torsion-free group backends.

Every element is identified by a canonical normal form (a small tuple of
integers), so equality and hashing are structural and all arithmetic is
exact. Python integers never overflow, which matters for the Heisenberg
backend whose third coordinate grows quadratically under powers.

Backends and their normal forms:

* ``zd:<d>``   lattice Z^d; key is a d-tuple of integers.
* ``free:<k>`` free group on the letters a, b, c, ...; key is a reduced
  word stored as a tuple of signed 1-based letter indices.
* ``klein``    Klein bottle group <u, v | u^-1 v u = v^-1>; every element
  is uniquely u^a v^b and the key is the pair (a, b).
* ``heis``     discrete Heisenberg group; key is a triple (x, y, z) with
  (x, y, z)(x', y', z') = (x+x', y+y', z+z'+x*y').
"""

from __future__ import annotations

import re
from math import gcd
from typing import Optional

from .errors import DomainError, ParseError, ResourceLimitError, UsageError

DEFAULT_BALL_CAP = 12

_LETTERS = "abcdefghijklmnopqrstuvwxyz"
_WORD_TOKEN = re.compile(r"\S+")
_FACTOR = re.compile(r"([a-z])(?:\^(-?\d+))?\Z")


def divisors(n: int) -> list[int]:
    """Positive divisors of |n| in increasing order; n must be nonzero."""
    n = abs(n)
    if n == 0:
        raise DomainError("divisors of 0 are not defined")
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    large.reverse()
    return small + large


class GroupElement:
    """Immutable element of one backend, identified by its normal form."""

    __slots__ = ("backend", "key")

    def __init__(self, backend: "GroupBackend", key: tuple):
        self.backend = backend
        self.key = key

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if not isinstance(other, GroupElement):
            return NotImplemented
        if other.backend != self.backend:
            raise UsageError("cannot multiply elements of different backends")
        return GroupElement(self.backend, self.backend.mul_key(self.key, other.key))

    def __pow__(self, n: int) -> "GroupElement":
        return GroupElement(self.backend, self.backend.pow_key(self.key, n))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.backend, self.backend.inv_key(self.key))

    def is_identity(self) -> bool:
        return self.key == self.backend.identity_key

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupElement)
            and self.backend == other.backend
            and self.key == other.key
        )

    def __hash__(self) -> int:
        return hash((self.backend.spec, self.key))

    def __lt__(self, other: "GroupElement") -> bool:
        if not isinstance(other, GroupElement) or other.backend != self.backend:
            raise UsageError("cannot order elements of different backends")
        return self.key < other.key

    def __str__(self) -> str:
        return self.backend.format_key(self.key)

    def __repr__(self) -> str:
        return f"<{self.backend.spec} {self}>"


class GroupBackend:
    """Normal-form arithmetic on raw element keys plus a wrapped element API.

    The ``*_key`` methods operate on plain tuples and are the hot path for
    set-level combinatorics; the wrapped methods validate inputs and return
    :class:`GroupElement` values.
    """

    spec: str = ""
    torsion_free: bool = True
    unique_product: bool = True
    identity_key: tuple = ()

    def __init__(self):
        self._ball_cache: dict[int, tuple] = {}

    # -- key-level arithmetic -------------------------------------------

    def mul_key(self, a: tuple, b: tuple) -> tuple:
        raise NotImplementedError

    def inv_key(self, a: tuple) -> tuple:
        raise NotImplementedError

    def pow_key(self, a: tuple, n: int) -> tuple:
        # square-and-multiply; subclasses override where a closed form exists
        if n < 0:
            a, n = self.inv_key(a), -n
        acc = self.identity_key
        while n:
            if n & 1:
                acc = self.mul_key(acc, a)
            a = self.mul_key(a, a)
            n >>= 1
        return acc

    def generator_keys(self) -> list[tuple]:
        raise NotImplementedError

    def primitive_root_key(self, a: tuple) -> tuple[tuple, int]:
        raise NotImplementedError

    def in_cyclic_key(self, g: tuple, h: tuple) -> Optional[int]:
        """Return the unique k with h^k == g, or None; h must not be the identity."""
        raise NotImplementedError

    def parse_key(self, text: str, line: int | None = None) -> tuple:
        raise NotImplementedError

    def format_key(self, key: tuple) -> str:
        raise NotImplementedError

    def check_key(self, key: tuple) -> None:
        """Reject keys that are not normal forms of this backend."""
        raise NotImplementedError

    def _check_int_tuple(self, key, arity: int) -> None:
        if not (isinstance(key, tuple) and len(key) == arity and all(isinstance(x, int) for x in key)):
            raise UsageError(f"{key!r} is not a {self.spec} normal form")

    # -- wrapped element API --------------------------------------------

    @property
    def identity(self) -> GroupElement:
        return GroupElement(self, self.identity_key)

    @property
    def generators(self) -> list[GroupElement]:
        return [GroupElement(self, k) for k in self.generator_keys()]

    def element(self, key: tuple) -> GroupElement:
        return GroupElement(self, key)

    def parse(self, text: str) -> GroupElement:
        return GroupElement(self, self.parse_key(text))

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        self._check_owned(g)
        self._check_owned(h)
        return g * h

    def invert(self, g: GroupElement) -> GroupElement:
        self._check_owned(g)
        return g.inverse()

    def power(self, g: GroupElement, n: int) -> GroupElement:
        self._check_owned(g)
        return g ** n

    def primitive_root(self, g: GroupElement) -> tuple[GroupElement, int]:
        """Write g = root**exponent with the exponent maximal; g must not be 1."""
        self._check_owned(g)
        if g.key == self.identity_key:
            raise DomainError("the identity has no primitive root")
        root, exponent = self.primitive_root_key(g.key)
        return GroupElement(self, root), exponent

    def in_cyclic(self, g: GroupElement, h: GroupElement) -> Optional[int]:
        """Return k with h**k == g if one exists, else None; h = 1 needs g = 1."""
        self._check_owned(g)
        self._check_owned(h)
        if h.key == self.identity_key:
            if g.key == self.identity_key:
                return 0
            raise DomainError("membership in <1> is only defined for the identity")
        return self.in_cyclic_key(g.key, h.key)

    def ball_keys(self, radius: int, cap: int = DEFAULT_BALL_CAP) -> tuple:
        """Sorted keys of all elements of word length <= radius."""
        if radius < 0:
            raise DomainError("ball radius must be nonnegative")
        if radius > cap:
            raise ResourceLimitError(f"ball radius {radius} exceeds the cap {cap}")
        cached = self._ball_cache.get(radius)
        if cached is None:
            steps = []
            for k in self.generator_keys():
                steps.append(k)
                steps.append(self.inv_key(k))
            seen = {self.identity_key}
            frontier = [self.identity_key]
            for _ in range(radius):
                nxt = []
                for x in frontier:
                    for s in steps:
                        y = self.mul_key(x, s)
                        if y not in seen:
                            seen.add(y)
                            nxt.append(y)
                frontier = nxt
            cached = tuple(sorted(seen))
            self._ball_cache[radius] = cached
        return cached

    def ball(self, radius: int, cap: int = DEFAULT_BALL_CAP):
        """The word-metric ball of the given radius as a :class:`FiniteSubset`."""
        from .setops import FiniteSubset

        return FiniteSubset._from_keys(self, self.ball_keys(radius, cap))

    # -- plumbing ---------------------------------------------------------

    def _check_owned(self, g: GroupElement) -> None:
        if not isinstance(g, GroupElement) or g.backend != self:
            raise UsageError(f"element does not belong to backend {self.spec}")

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupBackend) and other.spec == self.spec

    def __hash__(self) -> int:
        return hash(self.spec)

    def __repr__(self) -> str:
        return f"<backend {self.spec}>"

    # shared word parsing for the free and Klein backends
    def _parse_word(self, text: str, letter_gens: dict[str, tuple], line: int | None) -> tuple:
        key = self.identity_key
        found = False
        for m in _WORD_TOKEN.finditer(text):
            tok, col = m.group(), m.start() + 1
            found = True
            if tok == "1":
                continue
            fm = _FACTOR.match(tok)
            if not fm:
                raise ParseError(f"bad factor {tok!r}", line=line, column=col)
            letter = fm.group(1)
            gen = letter_gens.get(letter)
            if gen is None:
                raise ParseError(f"generator {letter!r} not in group {self.spec}", line=line, column=col)
            exponent = int(fm.group(2)) if fm.group(2) else 1
            key = self.mul_key(key, self.pow_key(gen, exponent))
        if not found:
            raise ParseError("empty element text", line=line, column=1)
        return key


def _parse_int_tuple(text: str, arity: int, spec: str, line: int | None) -> tuple:
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ParseError(f"{spec} element must look like ({','.join('i' + str(j + 1) for j in range(arity))})",
                         line=line, column=1)
    parts = s[1:-1].split(",")
    if len(parts) != arity:
        raise ParseError(f"expected {arity} coordinates, got {len(parts)}", line=line, column=1)
    values = []
    for part in parts:
        part = part.strip()
        if not re.fullmatch(r"-?\d+", part):
            raise ParseError(f"bad integer coordinate {part!r}", line=line, column=1)
        values.append(int(part))
    return tuple(values)


def _format_int_tuple(key: tuple) -> str:
    return "(" + ",".join(str(x) for x in key) + ")"


class LatticeBackend(GroupBackend):
    """The lattice Z^d under componentwise addition."""

    def __init__(self, dim: int):
        if dim < 1:
            raise UsageError("lattice dimension must be at least 1")
        super().__init__()
        self.dim = dim
        self.spec = f"zd:{dim}"
        self.identity_key = (0,) * dim

    def mul_key(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def inv_key(self, a):
        return tuple(-x for x in a)

    def pow_key(self, a, n):
        return tuple(n * x for x in a)

    def generator_keys(self):
        keys = []
        for i in range(self.dim):
            keys.append(tuple(1 if j == i else 0 for j in range(self.dim)))
        return keys

    def primitive_root_key(self, a):
        e = 0
        for x in a:
            e = gcd(e, x)
        return tuple(x // e for x in a), e

    def in_cyclic_key(self, g, h):
        if g == self.identity_key:
            return 0
        k = None
        for x, y in zip(g, h):
            if y:
                if x % y:
                    return None
                k = x // y
                break
        if k is None:
            return None
        if tuple(k * y for y in h) == g:
            return k
        return None

    def parse_key(self, text, line=None):
        return _parse_int_tuple(text, self.dim, self.spec, line)

    def format_key(self, key):
        return _format_int_tuple(key)

    def check_key(self, key):
        self._check_int_tuple(key, self.dim)


class FreeBackend(GroupBackend):
    """The free group on k letters; keys are freely reduced words."""

    def __init__(self, rank: int):
        if not 1 <= rank <= 26:
            raise UsageError("free group rank must be between 1 and 26")
        super().__init__()
        self.rank = rank
        self.spec = f"free:{rank}"
        self.identity_key = ()
        self.letters = _LETTERS[:rank]
        self._letter_gens = {_LETTERS[i]: (i + 1,) for i in range(rank)}

    def mul_key(self, a, b):
        i, j = len(a), 0
        nb = len(b)
        while i > 0 and j < nb and a[i - 1] == -b[j]:
            i -= 1
            j += 1
        return a[:i] + b[j:]

    def inv_key(self, a):
        return tuple(-x for x in reversed(a))

    def generator_keys(self):
        return [(i + 1,) for i in range(self.rank)]

    def _cyclic_reduce(self, w: tuple) -> tuple[tuple, tuple]:
        """Split w = s * core * s^-1 with the core cyclically reduced."""
        i, j = 0, len(w)
        while j - i >= 2 and w[i] == -w[j - 1]:
            i += 1
            j -= 1
        return w[:i], w[i:j]

    def primitive_root_key(self, a):
        s, core = self._cyclic_reduce(a)
        n = len(core)
        for length in range(1, n + 1):
            if n % length:
                continue
            p = core[:length]
            if p * (n // length) == core:
                root = self.mul_key(self.mul_key(s, p), self.inv_key(s))
                return root, n // length
        raise AssertionError("unreachable: a word is always a power of itself")

    def in_cyclic_key(self, g, h):
        if not g:
            return 0
        s, core = self._cyclic_reduce(h)
        # g in <h> iff s^-1 g s is a literal power of the cyclically reduced core
        t = self.mul_key(self.mul_key(self.inv_key(s), g), s)
        n = len(core)
        if not t or len(t) % n:
            return None
        k = len(t) // n
        if core * k == t:
            return k
        if self.inv_key(core) * k == t:
            return -k
        return None

    def parse_key(self, text, line=None):
        return self._parse_word(text, self._letter_gens, line)

    def check_key(self, key):
        ok = isinstance(key, tuple) and all(
            isinstance(x, int) and 1 <= abs(x) <= self.rank for x in key
        )
        if ok:
            ok = all(key[i] != -key[i + 1] for i in range(len(key) - 1))
        if not ok:
            raise UsageError(f"{key!r} is not a reduced {self.spec} word")

    def format_key(self, key):
        if not key:
            return "1"
        parts = []
        run_val, run_len = key[0], 1
        for x in key[1:]:
            if x == run_val:
                run_len += 1
            else:
                parts.append((run_val, run_len))
                run_val, run_len = x, 1
        parts.append((run_val, run_len))
        out = []
        for val, count in parts:
            letter = self.letters[abs(val) - 1]
            exponent = count if val > 0 else -count
            out.append(letter if exponent == 1 else f"{letter}^{exponent}")
        return " ".join(out)


class KleinBackend(GroupBackend):
    """Klein bottle group <u, v | u^-1 v u = v^-1>; keys (a, b) mean u^a v^b.

    The defining relation gives v u = u v^-1, so pushing u-letters to the
    left yields the closed product law
    (u^a v^b)(u^c v^d) = u^(a+c) v^((-1)^c b + d).
    """

    def __init__(self):
        super().__init__()
        self.spec = "klein"
        self.identity_key = (0, 0)
        self._letter_gens = {"u": (1, 0), "v": (0, 1)}

    def mul_key(self, x, y):
        a, b = x
        c, d = y
        return (a + c, (b if c % 2 == 0 else -b) + d)

    def inv_key(self, x):
        a, b = x
        return (-a, -b if a % 2 == 0 else b)

    def pow_key(self, x, n):
        a, b = x
        if a % 2 == 0:
            return (n * a, n * b)
        return (n * a, b if n % 2 else 0)

    def generator_keys(self):
        return [(1, 0), (0, 1)]

    def primitive_root_key(self, x):
        a, b = x
        if a == 0:
            # pure v-power
            return (0, 1 if b > 0 else -1), abs(b)
        if a % 2:
            # odd u-exponent: (s, b)^|a| = (a, b) for s = sign(a), and any
            # root's u-exponent divides a, forcing this shape
            return (1 if a > 0 else -1, b), abs(a)
        if b == 0:
            # u^a with a even; (s, d)^|a| = (a, 0) for every d, pick d = 0
            return (1 if a > 0 else -1, 0), abs(a)
        # a even, b nonzero: roots must have even u-exponent, so e | a/2 and e | b
        e = gcd(abs(a) // 2, abs(b))
        return (a // e, b // e), e

    def in_cyclic_key(self, g, h):
        if g == self.identity_key:
            return 0
        a, b = g
        c, d = h
        if c == 0:
            if a != 0 or b % d:
                return None
            return b // d
        if a % c:
            return None
        k = a // c
        if c % 2 == 0:
            return k if k * d == b else None
        if k % 2 == 0:
            return k if b == 0 else None
        return k if b == d else None

    def parse_key(self, text, line=None):
        return self._parse_word(text, self._letter_gens, line)

    def check_key(self, key):
        self._check_int_tuple(key, 2)

    def format_key(self, key):
        a, b = key
        parts = []
        if a:
            parts.append("u" if a == 1 else f"u^{a}")
        if b:
            parts.append("v" if b == 1 else f"v^{b}")
        return " ".join(parts) if parts else "1"


class HeisenbergBackend(GroupBackend):
    """Discrete Heisenberg group on integer triples (x, y, z)."""

    def __init__(self):
        super().__init__()
        self.spec = "heis"
        self.identity_key = (0, 0, 0)

    def mul_key(self, p, q):
        x1, y1, z1 = p
        x2, y2, z2 = q
        return (x1 + x2, y1 + y2, z1 + z2 + x1 * y2)

    def inv_key(self, p):
        x, y, z = p
        return (-x, -y, -z + x * y)

    def pow_key(self, p, n):
        x, y, z = p
        return (n * x, n * y, n * z + (n * (n - 1) // 2) * x * y)

    def generator_keys(self):
        return [(1, 0, 0), (0, 1, 0)]

    def primitive_root_key(self, p):
        x, y, z = p
        if x == 0 and y == 0:
            return (0, 0, 1 if z > 0 else -1), abs(z)
        # (px, py, pz)^e = (e px, e py, e pz + C(e,2) px py), so e | gcd(x, y)
        # and the z-coordinate fixes pz when it is integral
        t = gcd(x, y)
        for e in reversed(divisors(t)):
            px, py = x // e, y // e
            num = z - (e * (e - 1) // 2) * px * py
            if num % e == 0:
                return (px, py, num // e), e
        raise AssertionError("unreachable: e = 1 always succeeds")

    def in_cyclic_key(self, g, h):
        if g == self.identity_key:
            return 0
        x, y, z = h
        if x:
            k, r = divmod(g[0], x)
        elif y:
            k, r = divmod(g[1], y)
        else:
            k, r = divmod(g[2], z)
        if r:
            return None
        return k if self.pow_key(h, k) == g else None

    def parse_key(self, text, line=None):
        return _parse_int_tuple(text, 3, self.spec, line)

    def format_key(self, key):
        return _format_int_tuple(key)

    def check_key(self, key):
        self._check_int_tuple(key, 3)


_BACKEND_CACHE: dict[str, GroupBackend] = {}


def backend_from_spec(spec: str) -> GroupBackend:
    """Resolve a backend spec string: zd:<d>, free:<k>, klein or heis."""
    s = spec.strip().lower()
    backend = _BACKEND_CACHE.get(s)
    if backend is not None:
        return backend
    if s == "klein":
        backend = KleinBackend()
    elif s == "heis":
        backend = HeisenbergBackend()
    elif s.startswith("zd:"):
        backend = LatticeBackend(_parse_spec_int(spec, s[3:]))
    elif s.startswith("free:"):
        backend = FreeBackend(_parse_spec_int(spec, s[5:]))
    else:
        raise UsageError(f"unknown group spec {spec!r} (use zd:<d>, free:<k>, klein or heis)")
    _BACKEND_CACHE[s] = backend
    return backend


def _parse_spec_int(spec: str, tail: str) -> int:
    if not re.fullmatch(r"\d+", tail):
        raise UsageError(f"bad numeric parameter in group spec {spec!r}")
    return int(tail)


# module-level conveniences mirroring the element API

def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    return g.backend.multiply(g, h)


def invert(g: GroupElement) -> GroupElement:
    return g.inverse()


def power(g: GroupElement, n: int) -> GroupElement:
    return g ** n


def primitive_root(g: GroupElement) -> tuple[GroupElement, int]:
    return g.backend.primitive_root(g)


def in_cyclic(g: GroupElement, h: GroupElement) -> Optional[int]:
    return g.backend.in_cyclic(g, h)
