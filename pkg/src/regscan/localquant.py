"""Scaling-invariant local quantities on parabolic cylinders.

All quantities are invariant under the natural scaling
u -> lambda u(x0 + lambda (x - x0), t0 + lambda^2 (t - t0)) about a pivot
z0 = (x0, t0): the cubed-velocity density q3, the single-time level-set
criterion ratio, both sides of the Caccioppoli-type inequality, and the
scaled kinetic energy supremum. Space integrals are cell sums, time
integrals use the trapezoid rule on the piecewise-linear interpolant of
the per-frame integrand.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .grid import Box3, Ball, Cylinder, VectorGrid, SpaceTimeField, region_measure, gradient

__all__ = [
    "AnalysisConfig",
    "QuantReport",
    "E16Result",
    "CaccioppoliReport",
    "q3",
    "criterion_e16",
    "caccioppoli_sides",
    "energy_sup",
    "rescale",
]


@dataclass(frozen=True)
class AnalysisConfig:
    """Thresholds for the regularity diagnostics.

    eps is the level-set criterion parameter (must lie in (0, 1/4));
    zeta is the smallness threshold for q3 (no constructive value is
    available, so it is a configuration default).
    """

    eps: float
    zeta: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.eps < 0.25):
            raise ValueError("eps must lie in (0, 1/4)")
        if self.zeta <= 0:
            raise ValueError("zeta must be positive")


def _time_integral(times, values, ta, tb):
    """Integral of the piecewise-linear interpolant of (times, values) over [ta, tb]."""
    tol = 1e-9 * max(1.0, abs(ta), abs(tb))
    if ta < times[0] - tol or tb > times[-1] + tol:
        raise ValueError(
            f"time window [{ta}, {tb}] not covered by samples "
            f"[{times[0]}, {times[-1]}]"
        )
    ta = min(max(ta, times[0]), times[-1])
    tb = min(max(tb, times[0]), times[-1])
    if tb <= ta:
        raise ValueError("time window has zero length at the sampled resolution")
    inside = times[(times > ta) & (times < tb)]
    knots = np.concatenate([[ta], inside, [tb]])
    return float(np.trapezoid(np.interp(knots, times, values), knots))


def _frames_in_window(f, cyl):
    tol = 1e-9 * max(1.0, abs(cyl.t0))
    idx = np.nonzero((f.times > cyl.t_start - tol) & (f.times <= cyl.t0 + tol))[0]
    if len(idx) == 0:
        raise ValueError("no frames inside the cylinder time window")
    return idx


def _check_cylinder(f, cyl):
    tol = 1e-9 * max(1.0, abs(cyl.t0))
    if cyl.t_start < f.times[0] - tol or cyl.t0 > f.times[-1] + tol:
        raise ValueError("cylinder time window exceeds the sampled range")
    if not cyl.ball.mask(f.box).any():
        raise ValueError("empty region: cylinder ball misses all cell centers")


def q3(f, cyl):
    """r^-2 * integral of |u|^3 over Q(z0, r)."""
    _check_cylinder(f, cyl)
    mask = cyl.ball.mask(f.box)
    c = f.box.cell_volume
    vals = np.array([
        np.sum(fr.magnitude().data[mask] ** 3) * c for fr in f.frames
    ])
    return _time_integral(f.times, vals, cyl.t_start, cyl.t0) / cyl.r ** 2


@dataclass
class E16Result:
    """Single-time level-set criterion: r^-3 m{x in B : |u| > eps/r} <= eps."""

    ratio: float
    eps: float
    level: float
    passes: bool

    def to_dict(self):
        return {"ratio": self.ratio, "eps": self.eps, "level": self.level,
                "passes": self.passes}


def criterion_e16(frame, x0, r, eps):
    """Evaluate the level-set criterion for one frame and one ball."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    level = eps / r
    m = region_measure(frame.magnitude(), Ball(x0, r), level)
    ratio = m / r ** 3
    return E16Result(ratio=ratio, eps=float(eps), level=level, passes=ratio <= eps)


@dataclass
class CaccioppoliReport:
    """Both sides of the Caccioppoli-type inequality on Q(z0, r).

    lhs = r^-1 (int_{Q(z0,r/2)} |u|^{10/3})^{3/5} + r^-1 int_{Q(z0,r/2)} |grad u|^2
    rhs = (r^-5 int (int_B |u|^2)^3 dt)^{1/3} + r^-5 int (int_B |u|^2)^3 dt
    with the rhs time integral over the full window of Q(z0, r). When both
    sides vanish the ratio is reported as None (both_zero sentinel).
    """

    lhs: float
    rhs: float
    ratio: float | None
    both_zero: bool
    lhs_terms: tuple
    rhs_terms: tuple

    def to_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio,
                "both_zero": self.both_zero,
                "lhs_terms": list(self.lhs_terms), "rhs_terms": list(self.rhs_terms)}


def caccioppoli_sides(f, cyl):
    """Evaluate both sides of the Caccioppoli-type inequality."""
    _check_cylinder(f, cyl)
    r = cyl.r
    if r < 4.0 * max(f.box.spacing):
        raise ValueError(
            f"inner cylinder under-resolved: radius {r} spans fewer than 4 cells"
        )
    inner = Cylinder(cyl.center, cyl.t0, r / 2.0)
    mask_in = inner.ball.mask(f.box)
    mask_out = cyl.ball.mask(f.box)
    c = f.box.cell_volume

    v103 = []
    vgrad = []
    ve2 = []
    for fr in f.frames:
        mag = fr.magnitude().data
        v103.append(np.sum(mag[mask_in] ** (10.0 / 3.0)) * c)
        g = gradient(fr)
        vgrad.append(np.sum((g ** 2).sum(axis=(0, 1))[mask_in]) * c)
        ve2.append(np.sum(mag[mask_out] ** 2) * c)
    v103 = np.array(v103)
    vgrad = np.array(vgrad)
    ve2 = np.array(ve2)

    i103 = _time_integral(f.times, v103, inner.t_start, inner.t0)
    igrad = _time_integral(f.times, vgrad, inner.t_start, inner.t0)
    ie23 = _time_integral(f.times, ve2 ** 3, cyl.t_start, cyl.t0)

    lhs1 = i103 ** 0.6 / r
    lhs2 = igrad / r
    rhs1 = (ie23 / r ** 5) ** (1.0 / 3.0)
    rhs2 = ie23 / r ** 5
    lhs = lhs1 + lhs2
    rhs = rhs1 + rhs2
    both_zero = lhs == 0.0 and rhs == 0.0
    return CaccioppoliReport(
        lhs=lhs,
        rhs=rhs,
        ratio=None if both_zero else (lhs / rhs if rhs > 0 else float("inf")),
        both_zero=both_zero,
        lhs_terms=(lhs1, lhs2),
        rhs_terms=(rhs1, rhs2),
    )


def energy_sup(f, cyl):
    """r^-1 * max over frames in the window of int_{B(x0,r)} |u|^2 dx."""
    _check_cylinder(f, cyl)
    idx = _frames_in_window(f, cyl)
    mask = cyl.ball.mask(f.box)
    c = f.box.cell_volume
    best = max(
        float(np.sum(f.frames[i].magnitude().data[mask] ** 2) * c) for i in idx
    )
    return best / cyl.r


@dataclass
class QuantReport:
    """All local quantities for one cylinder."""

    center: tuple
    t0: float
    r: float
    q3: float
    zeta: float
    q3_small: bool
    e16: E16Result
    caccioppoli: CaccioppoliReport
    energy_sup: float

    def to_dict(self):
        return {
            "center": list(self.center),
            "t0": self.t0,
            "r": self.r,
            "q3": self.q3,
            "zeta": self.zeta,
            "q3_small": self.q3_small,
            "e16": self.e16.to_dict(),
            "caccioppoli": self.caccioppoli.to_dict(),
            "energy_sup": self.energy_sup,
        }


def quant_report(f, cyl, cfg):
    """Evaluate every local quantity on one cylinder."""
    val = q3(f, cyl)
    i0 = f.frame_index_at(cyl.t0)
    e16 = criterion_e16(f.frames[i0], cyl.center, cyl.r, cfg.eps)
    cacc = caccioppoli_sides(f, cyl)
    esup = energy_sup(f, cyl)
    return QuantReport(
        center=cyl.center,
        t0=cyl.t0,
        r=cyl.r,
        q3=val,
        zeta=cfg.zeta,
        q3_small=val <= cfg.zeta ** 3,
        e16=e16,
        caccioppoli=cacc,
        energy_sup=esup,
    )


def rescale(f, lam, pivot, target_box=None, target_times=None):
    """Resample the rescaled field lambda*u(x0+lambda(x-x0), t0+lambda^2(t-t0)).

    pivot is (x0, t0). By default the target grid is the pullback of the
    source grid under the scaling map (same cell counts), in which case
    the sample points land exactly on source cell centers and no genuine
    interpolation happens. Any other target box/times are resampled with
    trilinear interpolation in space and linear interpolation in time.
    """
    if lam <= 0:
        raise ValueError("scale factor must be positive")
    x0, t0 = pivot
    x0 = np.asarray(x0, dtype=float)
    src_box = f.box

    if target_box is None:
        lo = x0 + (np.asarray(src_box.lo) - x0) / lam
        hi = x0 + (np.asarray(src_box.hi) - x0) / lam
        target_box = Box3(tuple(lo), tuple(hi), src_box.n)
    if target_times is None:
        target_times = t0 + (f.times - t0) / lam ** 2
    target_times = np.asarray(target_times, dtype=float)

    # forward-map target cell centers into the source box
    tx, ty, tz = target_box.centers()
    sx = x0[0] + lam * (tx - x0[0])
    sy = x0[1] + lam * (ty - x0[1])
    sz = x0[2] + lam * (tz - x0[2])
    cs = src_box.centers()
    for axis_pts, axis_src in zip((sx, sy, sz), cs):
        if axis_pts.min() > axis_src[-1] or axis_pts.max() < axis_src[0]:
            raise ValueError("rescaled domain does not intersect the source box")
    mesh = np.stack(np.meshgrid(sx, sy, sz, indexing="ij"), axis=-1)
    pts = mesh.reshape(-1, 3)

    interps = {}

    def interp_frame(i):
        if i not in interps:
            interps[i] = [
            RegularGridInterpolator(cs, comp.data, method="linear",
                                    bounds_error=False, fill_value=None)
            for comp in f.frames[i].components
        ]
        return interps[i]

    src_t = t0 + lam ** 2 * (target_times - t0)
    tol = 1e-9 * max(1.0, float(np.max(np.abs(f.times))))
    if src_t.min() < f.times[0] - tol or src_t.max() > f.times[-1] + tol:
        raise ValueError("rescaled time range exceeds the sampled times")
    src_t = np.clip(src_t, f.times[0], f.times[-1])

    frames = []
    for s in src_t:
        j = int(np.searchsorted(f.times, s, side="right")) - 1
        j = min(max(j, 0), len(f.times) - 2) if len(f.times) > 1 else 0
        if len(f.times) == 1 or abs(f.times[j] - s) <= tol:
            comps = [ip(pts) for ip in interp_frame(j)]
        else:
            t_lo, t_hi = f.times[j], f.times[j + 1]
            w = (s - t_lo) / (t_hi - t_lo)
            lo_v = interp_frame(j)
            hi_v = interp_frame(j + 1)
            comps = [(1 - w) * a(pts) + w * b(pts) for a, b in zip(lo_v, hi_v)]
        arr = lam * np.stack([cmp.reshape(target_box.n) for cmp in comps])
        frames.append(VectorGrid.from_array(target_box, arr))
    return SpaceTimeField(target_times, frames)
