"""Sampled radial functions y(r) with quintic Hermite interpolation and disc quadrature."""
import logging
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import BPoly

from .errors import ParameterError, QuadratureError

logger = logging.getLogger(__name__)

# integrand(r, y, dy) -> g; integrals are 2π∫ g(r) r dr
RadialIntegrand = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]

_ORDERS = (8, 16, 32, 64)


def _quintic_hermite(x, y, dy, d2y) -> BPoly:
    h = np.diff(x)
    c = np.empty((6, len(h)))
    c[0] = y[:-1]
    c[1] = y[:-1] + h * dy[:-1] / 5.0
    c[2] = y[:-1] + 2.0 * h * dy[:-1] / 5.0 + h * h * d2y[:-1] / 20.0
    c[3] = y[1:] - 2.0 * h * dy[1:] / 5.0 + h * h * d2y[1:] / 20.0
    c[4] = y[1:] - h * dy[1:] / 5.0
    c[5] = y[1:]
    return BPoly(c, x, extrapolate=False)


class RadialSamples:
    """Nodes (r, y, y', y'') of a radial function, exact at the nodes.

    Intervals below `log_from` are interpolated in r. From the first node at
    or above `log_from` the interpolant is quintic in t = ln r with data
    (y, r y', r² Δy), so Δy = y_tt / r² keeps its accuracy relative to the
    right-hand side however fast that decays. `laplacian` carries Δy at the
    nodes when the caller knows it better than y'' + y'/r.
    """

    def __init__(self, r, y, dy, d2y, log_from: Optional[float] = None, laplacian=None):
        self.r = np.asarray(r, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.dy = np.asarray(dy, dtype=float)
        self.d2y = np.asarray(d2y, dtype=float)
        n = len(self.r)
        if n < 2 or any(len(a) != n for a in (self.y, self.dy, self.d2y)):
            raise ParameterError("radial samples need at least two aligned nodes", nodes=n)
        if self.r[0] < 0 or np.any(np.diff(self.r) <= 0):
            raise ParameterError("sample radii must be nonnegative and strictly increasing")
        if not (np.all(np.isfinite(self.y)) and np.all(np.isfinite(self.dy))):
            raise ParameterError("non-finite sample values")
        if log_from is not None and log_from <= 0:
            raise ParameterError("log_from must be positive", log_from=log_from)

        if laplacian is None:
            laplacian = np.empty(n)
            pos = self.r > 0
            laplacian[pos] = self.d2y[pos] + self.dy[pos] / self.r[pos]
            laplacian[~pos] = 2.0 * self.d2y[~pos]
        self.lap = np.asarray(laplacian, dtype=float)
        if len(self.lap) != n:
            raise ParameterError("laplacian must align with the nodes", nodes=n)

        # nodes [0, split] carry the r-interpolant, nodes [split, n) the ln r one
        split = n - 1
        if log_from is not None:
            split = int(np.searchsorted(self.r, log_from * (1.0 - 1e-12), side="left"))
            split = min(max(split, 1 if self.r[0] == 0.0 else 0), n - 1)
        self.log_from = None if log_from is None else float(log_from)
        self._split = float(self.r[split]) if split < n - 1 else np.inf
        self._poly = self._dpoly = self._d2poly = None
        self._tpoly = self._tdpoly = self._td2poly = None
        if split > 0:
            k = split + 1
            self._poly = _quintic_hermite(self.r[:k], self.y[:k], self.dy[:k], self.d2y[:k])
            self._dpoly = self._poly.derivative()
            self._d2poly = self._poly.derivative(2)
        if split < n - 1:
            r = self.r[split:]
            self._tpoly = _quintic_hermite(np.log(r), self.y[split:], r * self.dy[split:], r * r * self.lap[split:])
            self._tdpoly = self._tpoly.derivative()
            self._td2poly = self._tpoly.derivative(2)
        self._cumulative: Dict[object, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.r)

    @property
    def r_min(self) -> float:
        return float(self.r[0])

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    def _clip(self, r):
        r = np.asarray(r, dtype=float)
        slack = 1e-12 * max(1.0, self.r_max)
        if np.any(r < self.r_min - slack) or np.any(r > self.r_max + slack):
            bad = r[(r < self.r_min - slack) | (r > self.r_max + slack)]
            raise ParameterError(
                "radius outside the sampled range",
                radius=float(np.ravel(bad)[0]), r_min=self.r_min, r_max=self.r_max,
            )
        return np.clip(r, self.r_min, self.r_max)

    def _evaluate(self, r, second: bool = True):
        """(y, y') and, with `second`, (y'', Δy) at radii r of any shape."""
        r = self._clip(r)
        shape = np.shape(r)
        x = np.atleast_1d(r).ravel()
        out = [np.empty_like(x) for _ in range(4 if second else 2)]
        far = x >= self._split
        near = ~far
        if near.any():
            xr = x[near]
            out[0][near] = self._poly(xr)
            out[1][near] = self._dpoly(xr)
            if second:
                d2 = self._d2poly(xr)
                out[2][near] = d2
                with np.errstate(divide="ignore", invalid="ignore"):
                    out[3][near] = np.where(xr > 0, d2 + out[1][near] / xr, 2.0 * d2)
        if far.any():
            xf = x[far]
            t = np.log(xf)
            p1 = self._tdpoly(t)
            out[0][far] = self._tpoly(t)
            out[1][far] = p1 / xf
            if second:
                p2 = self._td2poly(t)
                out[2][far] = (p2 - p1) / (xf * xf)
                out[3][far] = p2 / (xf * xf)
        return tuple(a.reshape(shape) for a in out)

    def value(self, r):
        return self._evaluate(r, second=False)[0]

    def slope(self, r):
        return self._evaluate(r, second=False)[1]

    def curvature(self, r):
        return self._evaluate(r)[2]

    def laplacian(self, r):
        """y'' + y'/r, taken as 2y''(0) at the center."""
        return self._evaluate(r)[3]

    def __call__(self, r) -> Tuple[np.ndarray, np.ndarray]:
        return self._evaluate(r, second=False)

    def derivatives(self, r):
        """(y, y', y'', Δy) at r."""
        return self._evaluate(r)

    def scaled(self, radius: float, shift: float, factor: float = 1.0) -> "RadialSamples":
        """Samples of x -> factor * (y(radius * x) - shift) on [0, 1]."""
        k = int(np.searchsorted(self.r, radius, side="left"))
        # a kept node crowding the cut would leave a sliver interval
        if k >= 2 and radius - self.r[k - 1] < 0.5 * (self.r[k - 1] - self.r[k - 2]):
            k -= 1
        y_c, dy_c, d2_c, lap_c = (float(a) for a in self._evaluate(radius))
        s = radius * radius * factor
        return RadialSamples(
            np.append(self.r[:k], radius) / radius,
            factor * (np.append(self.y[:k], y_c) - shift),
            factor * radius * np.append(self.dy[:k], dy_c),
            s * np.append(self.d2y[:k], d2_c),
            log_from=None if self.log_from is None else self.log_from / radius,
            laplacian=s * np.append(self.lap[:k], lap_c),
        )

    def affine(self, factor: float = 1.0, shift: float = 0.0, stretch: float = 1.0) -> "RadialSamples":
        """Samples of x -> factor * y(x / stretch) + shift on [stretch·r_min, stretch·r_max]."""
        s = factor / (stretch * stretch)
        return RadialSamples(
            stretch * self.r,
            factor * self.y + shift,
            factor * self.dy / stretch,
            s * self.d2y,
            log_from=None if self.log_from is None else stretch * self.log_from,
            laplacian=s * self.lap,
        )

    def with_boundary(self, value: float) -> "RadialSamples":
        """Same samples with y(r_max) replaced by `value`."""
        y = self.y.copy()
        y[-1] = value
        return RadialSamples(self.r, y, self.dy, self.d2y, log_from=self.log_from, laplacian=self.lap)

    # -----------------------------
    # quadrature
    # -----------------------------
    def _panel_sums(self, g: RadialIntegrand, lo, hi, order: int) -> np.ndarray:
        x, w = leggauss(order)
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        pts = mid[:, None] + half[:, None] * x[None, :]
        flat = pts.ravel()
        y, dy = self._evaluate(flat, second=False)
        vals = g(flat, y, dy) * flat
        return 2.0 * np.pi * half * (vals.reshape(pts.shape) @ w)

    def _edges(self, upper: float):
        upper = float(self._clip(upper))
        inner = self.r[self.r < upper]
        edges = np.append(inner, upper)
        return edges[:-1], edges[1:]

    def radial_integral(self, g: RadialIntegrand, upper: Optional[float] = None, tol: float = 1e-10) -> float:
        """2π∫_{r_min}^{upper} g r dr over node-aligned Gauss–Legendre panels, order-refined."""
        upper = self.r_max if upper is None else upper
        if upper <= self.r_min:
            return 0.0
        lo, hi = self._edges(upper)
        prev = None
        for order in _ORDERS:
            val = float(np.sum(self._panel_sums(g, lo, hi, order)))
            if not np.isfinite(val):
                raise QuadratureError("non-finite integrand", upper=upper, order=order)
            if prev is not None and abs(val - prev) <= tol * max(abs(val), 1e-300):
                return val
            prev = val
        logger.warning("quadrature refinement stalled upper=%.6g last_change=%.3g", upper, abs(val - prev))
        return val

    def segment_integral(self, g: RadialIntegrand, lo: float, hi: float, order: int = 32) -> float:
        """2π∫_lo^hi g r dr on a single panel; callers keep [lo, hi] inside one node interval."""
        if hi <= lo:
            return 0.0
        return float(self._panel_sums(g, np.array([lo]), np.array([hi]), order)[0])

    def cumulative(self, key, g: RadialIntegrand) -> np.ndarray:
        """Running integral 2π∫_{r_min}^{r_k} g r dr at every node (cached under `key`)."""
        if key not in self._cumulative:
            lo, hi = self.r[:-1], self.r[1:]
            coarse = self._panel_sums(g, lo, hi, 16)
            fine = self._panel_sums(g, lo, hi, 32)
            if not np.allclose(coarse, fine, rtol=1e-8, atol=0.0):
                fine = self._panel_sums(g, lo, hi, 64)
            self._cumulative[key] = np.concatenate(([0.0], np.cumsum(fine)))
        return self._cumulative[key]

    def integral_to(self, key, g: RadialIntegrand, upper: float) -> float:
        """Cached node totals up to the last node below `upper`, plus one panel."""
        upper = float(self._clip(upper))
        k = max(int(np.searchsorted(self.r, upper, side="right")) - 1, 0)
        return float(self.cumulative(key, g)[k]) + self.segment_integral(g, float(self.r[k]), upper)
