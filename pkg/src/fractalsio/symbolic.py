"""Symbolic words over the alphabet {1, ..., N}.

Finite words are tuples of 1-based letters.  Eventually periodic streams are
``EPWord(pre, period)`` with a nonempty period; they address points of the
attractor through the coding map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InputError


def validate_word(word, n_letters=None) -> tuple:
    """Return ``word`` as a tuple of ints, checking letters are in range."""
    try:
        w = tuple(int(a) for a in word)
        if any(a != b for a, b in zip(w, word)):
            raise ValueError("non-integral letter")
    except (TypeError, ValueError):
        raise InputError(f"word must be an iterable of integers, got {word!r}")
    for i, a in enumerate(w):
        if a < 1:
            raise InputError(f"letters are 1-based, got {a} at position {i}")
        if n_letters is not None and a > n_letters:
            raise InputError(
                f"letter {a} at position {i} exceeds alphabet size {n_letters}"
            )
    return w


def power(word, k: int) -> tuple:
    """k-fold repetition of a finite word."""
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or k < 0:
        raise InputError("exponent must be a nonnegative integer")
    return validate_word(word) * int(k)


@dataclass(frozen=True)
class EPWord:
    """Eventually periodic word pre . period period period ..."""

    pre: tuple = ()
    period: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pre", validate_word(self.pre))
        object.__setattr__(self, "period", validate_word(self.period))
        if len(self.period) == 0:
            raise InputError("period must be nonempty")

    def letter(self, i: int) -> int:
        if i < 0:
            raise InputError("letter index must be nonnegative")
        if i < len(self.pre):
            return self.pre[i]
        return self.period[(i - len(self.pre)) % len(self.period)]

    def prefix(self, n: int) -> tuple:
        if n < 0:
            raise InputError("prefix length must be nonnegative")
        return tuple(self.letter(i) for i in range(n))

    def shift(self, n: int = 1) -> "EPWord":
        if n < 0:
            raise InputError("shift count must be nonnegative")
        if n <= len(self.pre):
            return EPWord(self.pre[n:], self.period)
        k = (n - len(self.pre)) % len(self.period)
        return EPWord((), self.period[k:] + self.period[:k])

    def is_periodic(self) -> bool:
        return len(self.pre) == 0

    def to_config(self) -> dict:
        return {"pre": list(self.pre), "period": list(self.period)}

    @classmethod
    def from_config(cls, cfg: dict) -> "EPWord":
        if not isinstance(cfg, dict) or "period" not in cfg:
            raise ConfigError("EPWord config must be a dict with a 'period' key")
        return cls(tuple(cfg.get("pre", ())), tuple(cfg["period"]))


def concat(u, w: EPWord) -> EPWord:
    """Prepend the finite word u to the stream w."""
    u = validate_word(u)
    return EPWord(u + w.pre, w.period)


def is_prefix(u, w) -> bool:
    """True when the finite word u is a prefix of w (finite word or EPWord)."""
    u = validate_word(u)
    if isinstance(w, EPWord):
        return u == w.prefix(len(u))
    w = validate_word(w)
    return len(u) <= len(w) and w[: len(u)] == u


def cylinder_prob(ratios, s: float, word) -> float:
    """Natural-measure weight of the cylinder addressed by ``word``.

    ``ratios`` are the contraction ratios and ``s`` the exponent; the weights
    r_i^s must sum to 1 within 1e-10 or the arguments are rejected.
    """
    r = np.asarray(ratios, dtype=float)
    if r.ndim != 1 or r.size < 1:
        raise InputError("ratios must be a nonempty 1-d sequence")
    if not np.all((r > 0.0) & (r < 1.0)):
        raise InputError("ratios must lie in (0, 1)")
    if not math.isfinite(s) or s <= 0:
        raise InputError("exponent s must be positive and finite")
    weights = r ** s
    if abs(float(np.sum(weights)) - 1.0) > 1e-10:
        raise ConfigError(
            f"letter weights sum to {float(np.sum(weights))!r}, expected 1"
        )
    w = validate_word(word, n_letters=r.size)
    if len(w) == 0:
        return 1.0
    idx = np.asarray(w, dtype=int) - 1
    return float(np.prod(weights[idx]))
