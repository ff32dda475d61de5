"""Discrete signed measures on R^n or on the space of n-parameter bars."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MpgradError

RN = "rn"
BARS = "bars"


@dataclass(frozen=True, eq=False)
class SignedMeasure:
    """Finite integer combination of Dirac masses, kept in canonical form.

    ``locations`` has shape (m, n) for ``ground="rn"`` and (m, 2n) for
    ``ground="bars"``, where a bar stores its birth then its death. A death at
    infinity is stored as a row of ``inf`` (a single global sentinel).
    Canonical form: locations unique and lexicographically sorted, no zero
    multiplicities.
    """

    locations: np.ndarray
    mults: np.ndarray
    n: int
    ground: str = RN

    def __post_init__(self):
        if self.ground not in (RN, BARS):
            raise MpgradError(f"unknown ground space {self.ground!r}")
        width = self.n if self.ground == RN else 2 * self.n
        locs = np.asarray(self.locations, dtype=np.float64).reshape(-1, width)
        mults = np.asarray(self.mults, dtype=np.int64).reshape(-1)
        if len(locs) != len(mults):
            raise MpgradError("locations and multiplicities differ in length")
        if np.any(np.isnan(locs)):
            raise MpgradError("NaN location")
        if self.ground == RN and not np.all(np.isfinite(locs)):
            raise MpgradError("locations in R^n must be finite")
        if self.ground == BARS and len(locs):
            birth, death = locs[:, :self.n], locs[:, self.n:]
            if not np.all(np.isfinite(birth)):
                raise MpgradError("bar births must be finite")
            inf_rows = np.any(np.isinf(death), axis=1)
            death = death.copy()
            death[inf_rows] = np.inf
            locs = np.hstack([birth, death])
            if np.any(birth > death):
                raise MpgradError("bar with birth not below death")
        if len(locs):
            uniq, inv = np.unique(locs, axis=0, return_inverse=True)
            summed = np.zeros(len(uniq), dtype=np.int64)
            np.add.at(summed, inv.reshape(-1), mults)
            keep = summed != 0
            locs, mults = uniq[keep], summed[keep]
        locs = np.ascontiguousarray(locs)
        locs.flags.writeable = False
        mults.flags.writeable = False
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "mults", mults)

    @classmethod
    def zero(cls, n: int, ground: str = RN) -> "SignedMeasure":
        width = n if ground == RN else 2 * n
        return cls(np.zeros((0, width)), np.zeros(0, dtype=np.int64), n, ground)

    def __len__(self):
        return len(self.mults)

    def __eq__(self, other):
        if not isinstance(other, SignedMeasure):
            return NotImplemented
        return (
            self.n == other.n
            and self.ground == other.ground
            and np.array_equal(self.locations, other.locations)
            and np.array_equal(self.mults, other.mults)
        )

    def __neg__(self):
        return SignedMeasure(self.locations, -self.mults, self.n, self.ground)

    def __add__(self, other: "SignedMeasure") -> "SignedMeasure":
        if (self.n, self.ground) != (other.n, other.ground):
            raise MpgradError("cannot add measures on different ground spaces")
        return SignedMeasure(
            np.vstack([self.locations, other.locations]),
            np.concatenate([self.mults, other.mults]),
            self.n,
            self.ground,
        )

    def __sub__(self, other):
        return self + (-other)

    @property
    def total_mass(self) -> int:
        return int(self.mults.sum())

    def expanded(self, sign: int) -> tuple[np.ndarray, np.ndarray]:
        """Atoms of the positive (``sign=1``) or negative part, one row per unit of mass.

        Returns the atom locations and, for each atom, the row of the mass it
        came from.
        """
        sel = np.flatnonzero(self.mults * sign > 0)
        reps = np.abs(self.mults[sel])
        src = np.repeat(sel, reps)
        return self.locations[src], src

    def mass_below(self, r) -> int:
        """Total mass in the closed downset of ``r`` (ground ``rn`` only)."""
        r = np.asarray(r, dtype=np.float64)
        inside = np.all(self.locations <= r, axis=1)
        return int(self.mults[inside].sum())

    def mass_of_hook_set(self, r, s=None) -> int:
        """Mass of bars born below ``r`` and alive at ``s``.

        A bar ``(b, d)`` counts when ``b <= r`` and ``d`` is not below ``s``;
        ``s=None`` stands for infinity, where only bars dying at infinity count.
        """
        birth, death = self.locations[:, :self.n], self.locations[:, self.n:]
        born = np.all(birth <= np.asarray(r, dtype=np.float64), axis=1)
        if s is None:
            alive = np.isinf(death[:, 0]) if len(death) else np.zeros(0, dtype=bool)
        else:
            alive = ~np.all(death <= np.asarray(s, dtype=np.float64), axis=1)
        return int(self.mults[born & alive].sum())
