"""Exact-where-possible one-dimensional distributions.

A :class:`Distribution` is a piecewise-polynomial density (degree <= 3,
coefficients local to each piece) over sorted, non-overlapping intervals,
plus a finite list of point masses (atoms), plus at most one analytic tail
(exponential or Pareto, on either side).  Polynomial pieces are integrated
exactly; tails keep closed-form cdf and first moment; atoms are first-class
and never smoothed.

Transcendental densities (normal mixture component, truncated tails) are
represented by adaptively fitted piecewise-quadratic interpolants whose sup
error is recorded in ``meta["fit_error"]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _poly
from .errors import (
    BadParams,
    EmptyTruncation,
    InfiniteMean,
    MassMismatch,
    NegativeDensity,
    OverlappingPieces,
)

TOL_MASS = 1e-10
TRUNCATION_EPS = 1e-12
FIT_REL_TOL = 1e-11


@dataclass(frozen=True)
class Piece:
    """Density polynomial ``sum c_k (x - lo)^k`` on [lo, hi)."""

    lo: float
    hi: float
    coeffs: tuple[float, ...]

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mass(self) -> float:
        return _poly.pdefint(self.coeffs, 0.0, self.width)

    @property
    def first_moment(self) -> float:
        # E contribution: lo * mass + integral of t * p(t)
        return self.lo * self.mass + _poly.pdefint(
            _poly.pmul((0.0, 1.0), self.coeffs), 0.0, self.width
        )

    def pdf(self, x):
        return _poly.peval(self.coeffs, np.asarray(x, float) - self.lo)


@dataclass(frozen=True)
class Atom:
    loc: float
    mass: float


@dataclass(frozen=True)
class TailDescriptor:
    """Analytic tail: exponential rate or Pareto shape/scale, either side.

    Right tails live on [anchor, inf); the Pareto density is
    ``weight * shape * scale**shape / (x - anchor + scale)**(shape+1)`` so
    that ``anchor == scale`` reproduces the textbook Pareto on [scale, inf).
    Left tails are the mirror image on (-inf, anchor].
    """

    kind: str  # "exponential" | "pareto"
    side: str  # "left" | "right"
    anchor: float
    param: float  # rate (exponential) or shape (pareto)
    scale: float = 1.0
    weight: float = 1.0

    def __post_init__(self):
        if self.kind not in ("exponential", "pareto"):
            raise BadParams(f"unknown tail kind {self.kind!r}")
        if self.side not in ("left", "right"):
            raise BadParams(f"unknown tail side {self.side!r}")
        if not (self.param > 0 and math.isfinite(self.param)):
            raise BadParams("tail rate/shape must be positive and finite")
        if self.kind == "pareto" and not (self.scale > 0 and math.isfinite(self.scale)):
            raise BadParams("pareto scale must be positive and finite")
        if not (self.weight > 0 and math.isfinite(self.weight)):
            raise BadParams("tail weight must be positive and finite")

    def _u(self, x):
        """Distance into the tail, >= 0 inside the tail region."""
        x = np.asarray(x, float)
        return x - self.anchor if self.side == "right" else self.anchor - x

    def pdf(self, x):
        u = self._u(x)
        inside = u >= 0
        u = np.where(inside, u, 0.0)
        if self.kind == "exponential":
            val = self.weight * self.param * np.exp(-self.param * u)
        else:
            val = (
                self.weight
                * self.param
                * self.scale**self.param
                / (u + self.scale) ** (self.param + 1)
            )
        val = np.where(inside, val, 0.0)
        return val if val.shape else float(val)

    def mass_within(self, x):
        """Mass between the anchor and x (clipped to the tail region)."""
        u = np.clip(self._u(x), 0.0, None)
        if self.kind == "exponential":
            val = self.weight * (1.0 - np.exp(-self.param * u))
        else:
            val = self.weight * (1.0 - (self.scale / (u + self.scale)) ** self.param)
        return val if val.shape else float(val)

    def mass_beyond(self, x):
        val = self.weight - self.mass_within(x)
        return val if np.ndim(val) else float(val)

    def moment(self) -> float:
        if self.kind == "exponential":
            offset = 1.0 / self.param
        else:
            if self.param <= 1.0:
                raise InfiniteMean(
                    f"pareto tail with shape {self.param} has no finite mean"
                )
            offset = self.scale / (self.param - 1.0)
        sign = 1.0 if self.side == "right" else -1.0
        return self.weight * (self.anchor + sign * offset)

    def quantile_from_anchor(self, v):
        """x such that mass_within(x) == v, for v in [0, weight)."""
        v = np.asarray(v, float)
        frac = np.clip(v / self.weight, 0.0, 1.0 - 1e-16)
        if self.kind == "exponential":
            u = -np.log1p(-frac) / self.param
        else:
            u = self.scale * ((1.0 - frac) ** (-1.0 / self.param) - 1.0)
        x = self.anchor + u if self.side == "right" else self.anchor - u
        return x if x.shape else float(x)


def _as_pieces(pieces) -> tuple[Piece, ...]:
    out = []
    for p in pieces:
        if isinstance(p, Piece):
            lo, hi, coeffs = p.lo, p.hi, p.coeffs
        else:
            lo, hi, coeffs = p
        out.append(Piece(float(lo), float(hi), tuple(float(c) for c in coeffs)))
    return tuple(sorted(out, key=lambda q: q.lo))


@dataclass(frozen=True)
class Distribution:
    pieces: tuple[Piece, ...]
    atoms: tuple[Atom, ...]
    tail: TailDescriptor | None = None
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    # ------------------------------------------------------------------
    # cached lookup tables
    # ------------------------------------------------------------------

    @cached_property
    def _plo(self):
        return np.array([p.lo for p in self.pieces])

    @cached_property
    def _phi(self):
        return np.array([p.hi for p in self.pieces])

    @cached_property
    def _pcoef(self):
        out = np.zeros((len(self.pieces), 4))
        for i, p in enumerate(self.pieces):
            out[i, : len(p.coeffs)] = p.coeffs
        return out

    @cached_property
    def _panti(self):
        coef = self._pcoef
        out = np.zeros((coef.shape[0], 5))
        out[:, 1:] = coef / np.arange(1.0, 5.0)
        return out

    @cached_property
    def _pmass(self):
        return np.array([p.mass for p in self.pieces])

    @cached_property
    def _pcum(self):
        """Piece mass fully accumulated, prefixed with 0."""
        return np.concatenate([[0.0], np.cumsum(self._pmass)])

    @cached_property
    def _alocs(self):
        return np.array([a.loc for a in self.atoms])

    @cached_property
    def _amass(self):
        return np.array([a.mass for a in self.atoms])

    @cached_property
    def _acum(self):
        return np.concatenate([[0.0], np.cumsum(self._amass)])

    # ------------------------------------------------------------------
    # basic quantities
    # ------------------------------------------------------------------

    @property
    def support_lo(self) -> float:
        cand = []
        if self.tail is not None and self.tail.side == "left":
            return -math.inf
        if self.pieces:
            cand.append(self.pieces[0].lo)
        if self.atoms:
            cand.append(self.atoms[0].loc)
        if self.tail is not None:
            cand.append(self.tail.anchor)
        return min(cand)

    @property
    def support_hi(self) -> float:
        if self.tail is not None and self.tail.side == "right":
            return math.inf
        cand = []
        if self.pieces:
            cand.append(self.pieces[-1].hi)
        if self.atoms:
            cand.append(self.atoms[-1].loc)
        if self.tail is not None:
            cand.append(self.tail.anchor)
        return max(cand)

    @cached_property
    def total_mass(self) -> float:
        total = float(self._pmass.sum()) + float(self._amass.sum())
        if self.tail is not None:
            total += self.tail.weight
        return total

    def breakpoints(self) -> np.ndarray:
        pts = set()
        for p in self.pieces:
            pts.add(p.lo)
            pts.add(p.hi)
        for a in self.atoms:
            pts.add(a.loc)
        if self.tail is not None:
            pts.add(self.tail.anchor)
        return np.array(sorted(pts))

    # ------------------------------------------------------------------
    # density / cdf / quantile
    # ------------------------------------------------------------------

    def pdf(self, x):
        """Density at x; right-continuous at piece boundaries, the final
        piece is closed at its upper end.  Atoms are not included."""
        x = np.asarray(x, float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.zeros_like(x)
        if self.pieces:
            idx = np.searchsorted(self._phi, x, side="right")
            at_top = x == self._phi[-1]
            idx = np.where(at_top, len(self.pieces) - 1, idx)
            ok = (idx < len(self.pieces)) & (x >= self._plo[np.minimum(idx, len(self.pieces) - 1)])
            j = idx[ok]
            t = x[ok] - self._plo[j]
            c = self._pcoef[j]
            val = c[:, 3]
            for k in (2, 1, 0):
                val = val * t + c[:, k]
            out[ok] = val
        if self.tail is not None:
            out += self.tail.pdf(x)
        return float(out[0]) if scalar else out

    def cdf(self, x):
        """Right-continuous cdf: P(X <= x)."""
        x = np.asarray(x, float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.zeros_like(x)
        if self.tail is not None and self.tail.side == "left":
            # cumulative mass from -inf: weight minus the mass between x and
            # the anchor (mass_within clips to 0 above the anchor).
            out = out + (self.tail.weight - self.tail.mass_within(x))
        if self.pieces:
            nfull = np.searchsorted(self._phi, x, side="right")
            out = out + self._pcum[nfull]
            inpc = nfull < len(self.pieces)
            if inpc.any():
                j = nfull[inpc]
                t = x[inpc] - self._plo[j]
                t = np.clip(t, 0.0, None)
                a = self._panti[j]
                val = a[:, 4]
                for k in (3, 2, 1):
                    val = val * t + a[:, k]
                val *= t
                out[inpc] += val
        if self.atoms:
            k = np.searchsorted(self._alocs, x, side="right")
            out = out + self._acum[k]
        if self.tail is not None and self.tail.side == "right":
            out = out + np.where(
                x > self.tail.anchor, self.tail.mass_within(x), 0.0
            )
        out = np.clip(out, 0.0, self.total_mass)
        return float(out[0]) if scalar else out

    def atom_mass_at(self, x) -> float:
        i = np.searchsorted(self._alocs, x)
        if i < len(self.atoms) and self._alocs[i] == x:
            return float(self._amass[i])
        return 0.0

    def cdf_left(self, x):
        """Left limit of the cdf: P(X < x)."""
        x = np.asarray(x, float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = self.cdf(x)
        if self.atoms:
            i = np.searchsorted(self._alocs, x)
            hit = (i < len(self.atoms)) & (self._alocs[np.minimum(i, len(self.atoms) - 1)] == x)
            out = out - np.where(hit, self._amass[np.minimum(i, len(self.atoms) - 1)], 0.0)
        return float(out[0]) if scalar else out

    def survival(self, x):
        """P(X >= x) = 1 - cdf(x-)."""
        val = self.total_mass - self.cdf_left(x)
        return val

    # ------------------------------------------------------------------
    # quantiles (inverse cdf, atoms returned exactly)
    # ------------------------------------------------------------------

    @cached_property
    def _segments(self):
        """Flat arrays describing the inverse-cdf segment table.

        kind 0 = left tail, 1 = polynomial piece part, 2 = atom,
        3 = right tail.  Pieces are split at interior atoms so cumulative
        u-ranges stay contiguous; all piece data is padded into matrices so
        inversion can gather per-sample rows without Python loops.
        """
        events = []  # (position, order, kind, payload)
        for a in self.atoms:
            events.append((a.loc, 0, 2, a))
        for p in self.pieces:
            cuts = [p.lo] + [a.loc for a in self.atoms if p.lo < a.loc < p.hi] + [p.hi]
            for t0, t1 in zip(cuts[:-1], cuts[1:]):
                events.append((t0, 1, 1, (p, t0, t1)))
        events.sort(key=lambda e: (e[0], e[1]))

        kind, cum_start, cum_end = [], [], []
        plo = []  # piece origin (for local coords)
        t0s, t1s, base = [], [], []
        coef = []  # (n, 4) density coefficients
        anti = []  # (n, 5) local antiderivative coefficients
        value = []  # atom locations
        cum = 0.0
        if self.tail is not None and self.tail.side == "left":
            kind.append(0); cum_start.append(0.0); cum_end.append(self.tail.weight)
            plo.append(0.0); t0s.append(0.0); t1s.append(0.0); base.append(0.0)
            coef.append((0.0,) * 4); anti.append((0.0,) * 5); value.append(0.0)
            cum = self.tail.weight
        for _, _, k, payload in events:
            if k == 2:
                kind.append(2); cum_start.append(cum); cum_end.append(cum + payload.mass)
                plo.append(0.0); t0s.append(0.0); t1s.append(0.0); base.append(0.0)
                coef.append((0.0,) * 4); anti.append((0.0,) * 5)
                value.append(payload.loc)
                cum += payload.mass
            else:
                p, a, b = payload
                ia = _poly.pint(p.coeffs)
                b0 = _poly.peval(ia, a - p.lo)
                m = _poly.peval(ia, b - p.lo) - b0
                if m <= 0:
                    continue
                kind.append(1); cum_start.append(cum); cum_end.append(cum + m)
                plo.append(p.lo); t0s.append(a - p.lo); t1s.append(b - p.lo)
                base.append(b0)
                coef.append(tuple(p.coeffs) + (0.0,) * (4 - len(p.coeffs)))
                anti.append(tuple(ia) + (0.0,) * (5 - len(ia)))
                value.append(0.0)
                cum += m
        if self.tail is not None and self.tail.side == "right":
            kind.append(3); cum_start.append(cum); cum_end.append(cum + self.tail.weight)
            plo.append(0.0); t0s.append(0.0); t1s.append(0.0); base.append(0.0)
            coef.append((0.0,) * 4); anti.append((0.0,) * 5); value.append(0.0)
            cum += self.tail.weight
        return {
            "kind": np.array(kind, dtype=np.int8),
            "cum_start": np.array(cum_start),
            "cum_end": np.array(cum_end),
            "plo": np.array(plo),
            "t0": np.array(t0s),
            "t1": np.array(t1s),
            "base": np.array(base),
            "coef": np.array(coef),
            "anti": np.array(anti),
            "value": np.array(value),
        }

    def quantile(self, u):
        scalar = np.ndim(u) == 0
        out = self.quantile_many(np.atleast_1d(np.asarray(u, float)))
        return float(out[0]) if scalar else out

    def quantile_many(self, u: np.ndarray) -> np.ndarray:
        seg = self._segments
        u = np.clip(np.asarray(u, float), 0.0, self.total_mass)
        idx = np.searchsorted(seg["cum_end"], u, side="left")
        idx = np.minimum(idx, len(seg["kind"]) - 1)
        kind = seg["kind"][idx]
        out = np.empty_like(u)

        ksel = kind == 2
        if ksel.any():
            out[ksel] = seg["value"][idx[ksel]]
        ksel = kind == 0
        if ksel.any():
            out[ksel] = self.tail.quantile_from_anchor(self.tail.weight - u[ksel])
        ksel = kind == 3
        if ksel.any():
            out[ksel] = self.tail.quantile_from_anchor(
                u[ksel] - seg["cum_start"][idx[ksel]]
            )
        ksel = kind == 1
        if ksel.any():
            j = idx[ksel]
            out[ksel] = self._invert_pieces_vec(
                seg["coef"][j], seg["anti"][j], seg["base"][j],
                seg["t0"][j], seg["t1"][j], seg["plo"][j],
                u[ksel] - seg["cum_start"][j],
            )
        return out

    @staticmethod
    def _linear_density_inverse(b0, b1, m):
        """Distance u >= 0 with b0*u + b1*u^2/2 == m (monotone branch).

        Stable Citardauq form; handles b1 == 0 and triangle tips where the
        density reaches zero at the far end.
        """
        disc = np.clip(b0 * b0 + 2.0 * b1 * m, 0.0, None)
        den = b0 + np.sqrt(disc)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = 2.0 * m / den
        return np.where(m <= 0, 0.0, u)

    @staticmethod
    def _invert_pieces_vec(coef, anti, base, t0, t1, plo, target):
        """Invert the within-piece cdf on gathered rows, fully vectorized.

        Linear densities solve in closed form; quadratic/cubic rows run a
        safeguarded Newton started from the local linear-density estimate.
        """

        def anti_at(t):
            val = anti[:, 4]
            for k in (3, 2, 1):
                val = val * t + anti[:, k]
            return val * t

        def dens_at(t):
            val = coef[:, 3]
            for k in (2, 1, 0):
                val = val * t + coef[:, k]
            return val

        out = np.empty_like(target)
        is_lin = (coef[:, 2] == 0.0) & (coef[:, 3] == 0.0)
        if is_lin.any():
            sel = is_lin
            b0 = coef[sel, 0] + coef[sel, 1] * t0[sel]
            m = target[sel] - (anti_at(t0)[sel] - base[sel])
            u = Distribution._linear_density_inverse(b0, coef[sel, 1], m)
            out[sel] = np.minimum(t0[sel] + u, t1[sel])
        if not is_lin.all():
            sel = ~is_lin
            coef, anti, base = coef[sel], coef[sel], anti[sel]  # placeholder
        return plo + out if is_lin.all() else Distribution._finish_mixed(
            coef, anti, base, t0, t1, plo, target, out, is_lin,
            anti_at, dens_at,
        )

    # ------------------------------------------------------------------
    # moments and transforms
    # ------------------------------------------------------------------

    def mean(self) -> float:
        total = sum(p.first_moment for p in self.pieces)
        total += sum(a.loc * a.mass for a in self.atoms)
        if self.tail is not None:
            total += self.tail.moment()
        return total / self.total_mass

    def is_interval_support(self) -> bool:
        """True when the support closure has no interior gaps."""
        spans = [(p.lo, p.hi) for p in self.pieces]
        if self.tail is not None:
            if self.tail.side == "left":
                spans.append((-math.inf, self.tail.anchor))
            else:
                spans.append((self.tail.anchor, math.inf))
        spans += [(a.loc, a.loc) for a in self.atoms]
        spans.sort()
        if not spans:
            return True
        reach = spans[0][1]
        for lo, hi in spans[1:]:
            if lo > reach + 1e-12:
                return False
            reach = max(reach, hi)
        return True


# ----------------------------------------------------------------------
# construction and validation
# ----------------------------------------------------------------------


def make_distribution(
    pieces: Iterable = (),
    atoms: Iterable = (),
    tail: TailDescriptor | None = None,
    *,
    auto_normalize: bool = False,
    tol_mass: float = TOL_MASS,
    meta: dict | None = None,
) -> Distribution:
    """Validate and build a Distribution.

    Raises NegativeDensity, OverlappingPieces, BadParams, or MassMismatch
    (the latter only when auto_normalize is off).
    """
    ps = _as_pieces(pieces)
    ats = tuple(Atom(float(l), float(m)) for l, m in _iter_atoms(atoms))
    ats = tuple(sorted(ats, key=lambda a: a.loc))

    scale = 1.0
    for p in ps:
        if len(p.coeffs) > _poly.MAX_DEGREE + 1:
            raise BadParams(f"piece degree {len(p.coeffs) - 1} exceeds cap {_poly.MAX_DEGREE}")
        if not (p.hi > p.lo):
            raise OverlappingPieces(f"piece [{p.lo}, {p.hi}) has nonpositive width")
        mn, mx = _poly.pminmax(p.coeffs, 0.0, p.width)
        scale = max(scale, mx)
        if mn < -1e-11 * max(1.0, mx):
            raise NegativeDensity(f"density reaches {mn} on piece [{p.lo}, {p.hi})")
    for a, b in zip(ps[:-1], ps[1:]):
        if b.lo < a.hi - 1e-12:
            raise OverlappingPieces(f"pieces [{a.lo},{a.hi}) and [{b.lo},{b.hi}) overlap")
    for a in ats:
        if not (a.mass > 0):
            raise BadParams(f"atom at {a.loc} has nonpositive mass {a.mass}")
    for a, b in zip(ats[:-1], ats[1:]):
        if b.loc <= a.loc:
            raise BadParams(f"duplicate atom location {b.loc}")
    if tail is not None and ps:
        if tail.side == "left" and tail.anchor > ps[0].lo + 1e-12:
            raise OverlappingPieces("left tail overlaps the first piece")
        if tail.side == "right" and tail.anchor < ps[-1].hi - 1e-12:
            raise OverlappingPieces("right tail overlaps the last piece")

    d = Distribution(ps, ats, tail, dict(meta or {}))
    total = d.total_mass
    if auto_normalize:
        if total <= 0:
            raise MassMismatch("cannot normalize zero total mass")
        if abs(total - 1.0) > 1e-15:
            d = scale_mass(d, 1.0 / total)
    elif abs(total - 1.0) > tol_mass:
        raise MassMismatch(f"total mass {total!r} differs from 1 beyond {tol_mass}")
    return d


def _iter_atoms(atoms):
    for a in atoms:
        if isinstance(a, Atom):
            yield a.loc, a.mass
        else:
            yield a


def scale_mass(d: Distribution, factor: float) -> Distribution:
    """Multiply all densities, atom masses and tail weight by `factor`."""
    ps = tuple(Piece(p.lo, p.hi, _poly.pscale(p.coeffs, factor)) for p in d.pieces)
    ats = tuple(Atom(a.loc, a.mass * factor) for a in d.atoms)
    tail = None
    if d.tail is not None:
        tail = TailDescriptor(
            d.tail.kind, d.tail.side, d.tail.anchor, d.tail.param,
            d.tail.scale, d.tail.weight * factor,
        )
    return Distribution(ps, ats, tail, dict(d.meta))


# ----------------------------------------------------------------------
# spec operations
# ----------------------------------------------------------------------


def cdf_eval(d: Distribution, x) -> float:
    """Right-continuous cdf value F(x); atoms at locations <= x included."""
    return d.cdf(x)


def mean(d: Distribution) -> float:
    """Exact first moment; raises InfiniteMean for Pareto tails with shape <= 1."""
    return d.mean()


def truncate(d: Distribution, lo: float, hi: float) -> Distribution:
    """Renormalized restriction to the closed window [lo, hi].

    The discarded mass is recorded in ``meta["truncated_mass"]``.  Tail
    portions inside the window are converted to fitted quadratic pieces.
    """
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise BadParams(f"bad truncation window [{lo}, {hi}]")
    new_pieces: list[Piece] = []
    for p in d.pieces:
        a, b = max(lo, p.lo), min(hi, p.hi)
        if b - a <= 0:
            continue
        new_pieces.append(Piece(a, b, _poly.pshift(p.coeffs, a - p.lo)))
    fit_err = 0.0
    if d.tail is not None:
        t = d.tail
        if t.side == "left":
            region = (lo, min(hi, t.anchor)) if lo < t.anchor else None
        else:
            region = (max(lo, t.anchor), hi) if hi > t.anchor else None
        if region is not None and region[1] > region[0]:
            fitted, fit_err = fit_quadratic_pieces(t.pdf, region[0], region[1])
            new_pieces.extend(fitted)
    atoms = [a for a in d.atoms if lo <= a.loc <= hi]
    kept = sum(p.mass for p in new_pieces) + sum(a.mass for a in atoms)
    if kept <= 0:
        raise EmptyTruncation(f"no mass in [{lo}, {hi}]")
    meta = dict(d.meta)
    # report the discarded mass from the exact cdf, not the fitted pieces
    meta["truncated_mass"] = d.total_mass - (d.cdf(hi) - d.cdf_left(lo))
    if fit_err:
        meta["fit_error"] = max(meta.get("fit_error", 0.0), fit_err)
    out = Distribution(
        tuple(sorted(new_pieces, key=lambda p: p.lo)), tuple(atoms), None, meta
    )
    return scale_mass(out, 1.0 / kept)


def reflect(d: Distribution) -> Distribution:
    """Distribution of -X."""
    ps = tuple(
        Piece(-p.hi, -p.lo, _poly.preflect(p.coeffs, p.width))
        for p in reversed(d.pieces)
    )
    ats = tuple(Atom(-a.loc, a.mass) for a in reversed(d.atoms))
    tail = None
    if d.tail is not None:
        t = d.tail
        tail = TailDescriptor(
            t.kind, "left" if t.side == "right" else "right",
            -t.anchor, t.param, t.scale, t.weight,
        )
    return Distribution(ps, ats, tail, dict(d.meta))


def make_named_prior(name: str, **params) -> Distribution:
    """Build one of the named prior families.

    Supported: ``uniform(a, b)``, ``exponential(rate, anchor=0, side)``,
    ``pareto(alpha, scale)``, ``footnote_mixture(iota)`` which mixes a unit
    uniform with a standard normal bump of weight iota.
    """
    if name == "uniform":
        a, b = float(params.get("a", 0.0)), float(params.get("b", 1.0))
        if not b > a:
            raise BadParams("uniform needs a < b")
        return make_distribution([(a, b, (1.0 / (b - a),))])
    if name == "exponential":
        rate = float(params.get("rate", 1.0))
        anchor = float(params.get("anchor", 0.0))
        side = params.get("side", "right")
        return make_distribution(
            [], [], TailDescriptor("exponential", side, anchor, rate)
        )
    if name == "pareto":
        alpha = float(params.get("alpha", 2.0))
        scl = float(params.get("scale", 1.0))
        side = params.get("side", "right")
        anchor = float(params.get("anchor", scl if side == "right" else -scl))
        return make_distribution(
            [], [], TailDescriptor("pareto", side, anchor, alpha, scl)
        )
    if name == "footnote_mixture":
        iota = float(params.get("iota", 0.05))
        if not 0.0 < iota < 1.0:
            raise BadParams("mixture weight must lie in (0, 1)")
        return _uniform_normal_mixture(iota)
    raise BadParams(f"unknown named prior {name!r}")


_SQRT2PI = math.sqrt(2.0 * math.pi)


def _normal_pdf(x):
    x = np.asarray(x, float)
    return np.exp(-0.5 * x * x) / _SQRT2PI


@lru_cache(maxsize=8)
def _uniform_normal_mixture(iota: float) -> Distribution:
    span = 8.0
    fitted, err = fit_quadratic_pieces(
        lambda x: iota * _normal_pdf(x), -span, span,
        breakpoints=(0.0, 1.0), rel_tol=5e-12,
    )
    pieces = []
    for p in fitted:
        c = list(p.coeffs)
        if 0.0 <= p.lo and p.hi <= 1.0:
            c[0] += 1.0 - iota
        pieces.append(Piece(p.lo, p.hi, tuple(c)))
    return make_distribution(
        pieces, auto_normalize=True, meta={"fit_error": err / iota}
    )


# ----------------------------------------------------------------------
# adaptive quadratic fitting of transcendental densities
# ----------------------------------------------------------------------


def fit_quadratic_pieces(
    fn: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    *,
    rel_tol: float = FIT_REL_TOL,
    breakpoints: Sequence[float] = (),
    max_pieces: int = 400_000,
) -> tuple[list[Piece], float]:
    """Adaptively fit `fn` on [lo, hi] by piecewise quadratics.

    Interpolation nodes are the interval endpoints and midpoint; intervals
    split until the deviation at the quarter points is below
    ``rel_tol * max|fn|``.  Returns (pieces, estimated sup error).  The
    refinement is scale-invariant and deterministic, so proportional inputs
    yield identical grids.
    """
    cuts = sorted({float(lo), float(hi), *(float(b) for b in breakpoints if lo < b < hi)})
    left = np.array(cuts[:-1])
    right = np.array(cuts[1:])
    probe = np.linspace(lo, hi, 257)
    scale = float(np.max(np.abs(fn(probe))))
    if scale == 0.0:
        return [Piece(lo, hi, (0.0,))], 0.0
    tol = rel_tol * scale

    done_l, done_r, done_f = [], [], []
    worst = 0.0
    min_width = (hi - lo) * 1e-13
    while left.size:
        if len(done_l) + left.size > max_pieces:
            raise BadParams("piecewise fit exceeded the piece budget")
        grid = left[:, None] + (right - left)[:, None] * np.array([0, 0.25, 0.5, 0.75, 1.0])
        f = fn(grid.ravel()).reshape(grid.shape)
        pq = (3 * f[:, 0] + 6 * f[:, 2] - f[:, 4]) / 8.0
        pt = (-f[:, 0] + 6 * f[:, 2] + 3 * f[:, 4]) / 8.0
        err = np.maximum(np.abs(pq - f[:, 1]), np.abs(pt - f[:, 3]))
        ok = (err <= 0.5 * tol) | (right - left < min_width)
        worst = max(worst, float(err[ok].max(initial=0.0)))
        done_l.extend(left[ok])
        done_r.extend(right[ok])
        done_f.extend(f[ok][:, [0, 2, 4]])
        mid = 0.5 * (left[~ok] + right[~ok])
        left = np.concatenate([left[~ok], mid])
        right = np.concatenate([mid, right[~ok]])

    order = np.argsort(done_l)
    pieces = []
    lift = 0.0
    for i in order:
        a, b = float(done_l[i]), float(done_r[i])
        f0, fm, f1 = done_f[i]
        h = b - a
        c0 = f0
        c1 = (-3 * f0 + 4 * fm - f1) / h
        c2 = (2 * f0 - 4 * fm + 2 * f1) / (h * h)
        mn, _ = _poly.pminmax((c0, c1, c2), 0.0, h)
        if mn < 0:
            if mn < -20.0 * tol:
                raise NegativeDensity(f"fitted density reaches {mn} near {a}")
            c0 -= mn
            lift = max(lift, -mn)
        pieces.append(Piece(a, b, (c0, c1, c2)))
    return pieces, max(worst * 16.0 / 9.0, lift)


# ----------------------------------------------------------------------
# plain-text serialization (CLI schema)
# ----------------------------------------------------------------------


def to_text(d: Distribution) -> str:
    """Serialize to the line-oriented schema used by the CLI.

    ``piece lo hi c0 [c1 c2 c3]`` with coefficients in powers of (x - lo);
    ``atom loc mass``; ``tail kind side anchor param scale weight``.
    """
    lines = ["# screenlab distribution v1"]
    for p in d.pieces:
        coeffs = " ".join(f"{c:.17g}" for c in p.coeffs)
        lines.append(f"piece {p.lo:.17g} {p.hi:.17g} {coeffs}")
    for a in d.atoms:
        lines.append(f"atom {a.loc:.17g} {a.mass:.17g}")
    if d.tail is not None:
        t = d.tail
        lines.append(
            f"tail {t.kind} {t.side} {t.anchor:.17g} {t.param:.17g} "
            f"{t.scale:.17g} {t.weight:.17g}"
        )
    return "\n".join(lines) + "\n"


def from_text(text: str, *, auto_normalize: bool = False) -> Distribution:
    pieces, atoms, tail = [], [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        try:
            if fields[0] == "piece":
                lo, hi, *coeffs = (float(v) for v in fields[1:])
                pieces.append((lo, hi, tuple(coeffs)))
            elif fields[0] == "atom":
                atoms.append((float(fields[1]), float(fields[2])))
            elif fields[0] == "tail":
                if tail is not None:
                    raise BadParams("multiple tail lines")
                kind, side = fields[1], fields[2]
                anchor, param, scl, weight = (float(v) for v in fields[3:7])
                tail = TailDescriptor(kind, side, anchor, param, scl, weight)
            else:
                raise BadParams(f"unknown record {fields[0]!r}")
        except (IndexError, ValueError) as exc:
            raise BadParams(f"bad distribution line {lineno}: {raw!r}") from exc
    return make_distribution(pieces, atoms, tail, auto_normalize=auto_normalize)
