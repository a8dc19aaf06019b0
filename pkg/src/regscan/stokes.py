"""Local pressure projection on a cube and its verification quantities.

estar(F) solves the steady Stokes system -Δv + ∇p = F, div v = 0 on a
cube with zero boundary velocity and mean-zero pressure, and returns ∇p.
The discretization is a staggered (MAC) grid: pressures at cell centers,
velocity components on their normal faces, which gives exact discrete
div/grad duality and no pressure checkerboard. Each velocity component's
Laplacian block separates per axis into fixed-zero (face) and reflected
(cell-line) second differences, both diagonal in fast sine bases, so the
inner vector solves are exact; an outer conjugate-gradient iteration on
the pressure Schur complement enforces incompressibility.

On top of the projection sit the derived quantities used by the local
regularity analysis: the pressure triple (∇p_h, ∇p₁, ∇p₂), the interior
harmonicity residual of p_h, the seven-integral local energy balance for
a space-time field, and the mean-value gradient bound for harmonic
candidates.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .grid import Ball, Box3, ScalarGrid, VectorGrid, scalar_gradient, gradient
from .synth import _workers

__all__ = [
    "StokesError",
    "StokesSolution",
    "LocalPressure",
    "BumpTestFunction",
    "estar",
    "pressure_parts",
    "harmonic_residual",
    "local_energy_residual",
    "harmonic_rigidity_check",
    "restrict_to_cube",
    "vector_laplacian",
    "convective_divergence",
]


class StokesError(RuntimeError):
    """Solver failure; carries the Schur residual history."""

    def __init__(self, message, residual_history=None):
        super().__init__(message)
        self.residual_history = list(residual_history or [])


def _check_domain(box):
    ext = box.extent
    if max(ext) - min(ext) > 1e-9 * max(ext):
        raise ValueError("solver domain must be a cube")
    if min(box.n) < 16:
        raise ValueError("solver needs at least 16 cells per axis")


# -- staggered-grid operators -------------------------------------------------
#
# Component a lives on a-faces: array shape n with n[a]+1 along axis a.
# Faces 0 and n[a] are wall values, pinned to zero; the interior slice is
# the actual unknown.


def _to_faces(v):
    out = []
    for a in range(3):
        data = v.components[a].data
        shape = list(data.shape)
        shape[a] += 1
        f = np.zeros(shape)
        # interior face i sits between cells i-1 and i; walls stay zero
        interior = [slice(None)] * 3
        interior[a] = slice(1, -1)
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[a] = slice(None, -1)
        hi[a] = slice(1, None)
        f[tuple(interior)] = 0.5 * (data[tuple(lo)] + data[tuple(hi)])
        out.append(f)
    return out


def _faces_to_centers(faces):
    out = []
    for a, f in enumerate(faces):
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[a] = slice(None, -1)
        hi[a] = slice(1, None)
        out.append(0.5 * (f[tuple(lo)] + f[tuple(hi)]))
    return out


def _div_faces(faces, h):
    return sum(np.diff(faces[a], axis=a) / h[a] for a in range(3))


def _grad_to_faces(p, h, shapes):
    out = []
    for a in range(3):
        f = np.zeros(shapes[a])
        interior = [slice(None)] * 3
        interior[a] = slice(1, -1)
        f[tuple(interior)] = np.diff(p, axis=a) / h[a]
        out.append(f)
    return out


class _ComponentSolver:
    """Exact inverse of the no-slip vector Laplacian, one velocity component.

    Along the component's own axis the unknowns are interior faces with
    zero wall values (type-I sine basis, n-1 points); along the other two
    axes they are cell lines with reflected, sign-flipped ghosts (type-II
    sine basis, n points). Both second-difference operators have
    eigenvalues (2 - 2 cos(pi (k+1) / n)) / h^2.
    """

    def __init__(self, a, n, h):
        self.a = a
        self.types = [1 if b == a else 2 for b in range(3)]
        lam = []
        for b in range(3):
            m = n[b] - 1 if b == a else n[b]
            k = np.arange(1, m + 1)
            lam.append((2.0 - 2.0 * np.cos(np.pi * k / n[b])) / h[b] ** 2)
        self.denom = (
            lam[0][:, None, None] + lam[1][None, :, None] + lam[2][None, None, :]
        )

    def solve(self, rhs_interior):
        w = _workers()
        x = rhs_interior
        for b in range(3):
            x = scipy.fft.dst(x, type=self.types[b], axis=b, workers=w)
        x = x / self.denom
        for b in range(3):
            x = scipy.fft.idst(x, type=self.types[b], axis=b, workers=w)
        return x


def _interior(a):
    sl = [slice(None)] * 3
    sl[a] = slice(1, -1)
    return tuple(sl)


def _apply_ainv(faces, solvers):
    out = []
    for a, f in enumerate(faces):
        g = np.zeros_like(f)
        g[_interior(a)] = solvers[a].solve(f[_interior(a)])
        out.append(g)
    return out


def _apply_a(faces, h):
    """Forward no-slip vector Laplacian (for residual reporting)."""
    out = []
    for a, f in enumerate(faces):
        acc = np.zeros_like(f)
        for b in range(3):
            if b == a:
                padded = f  # wall faces already carry the zero values
            else:
                lo = [slice(None)] * 3
                hi = [slice(None)] * 3
                lo[b] = slice(0, 1)
                hi[b] = slice(-1, None)
                padded = np.concatenate(
                    [-f[tuple(lo)], f, -f[tuple(hi)]], axis=b
                )
            sl0 = [slice(None)] * 3
            sl1 = [slice(None)] * 3
            sl2 = [slice(None)] * 3
            sl0[b] = slice(None, -2)
            sl1[b] = slice(1, -1)
            sl2[b] = slice(2, None)
            second = (
                padded[tuple(sl0)] - 2.0 * padded[tuple(sl1)] + padded[tuple(sl2)]
            ) / h[b] ** 2
            if b == a:
                pad = [(0, 0)] * 3
                pad[b] = (1, 1)
                second = np.pad(second, pad)
            acc += second
        g = -acc
        # wall faces are constraints, not equations
        mask = np.ones_like(f, dtype=bool)
        mask[_interior(a)] = False
        g[mask] = 0.0
        out.append(g)
    return out


@dataclass
class StokesSolution:
    """Velocity, mean-zero pressure and its gradient from one projection."""

    v: VectorGrid
    p: ScalarGrid
    grad_p: VectorGrid
    residuals: dict
    iterations: int
    residual_history: list = field(default_factory=list, repr=False)
    _face_grad: list = field(default=None, repr=False)
    _face_v: list = field(default=None, repr=False)


def estar(F, tol=1e-8):
    """Gradient part of F on a cube: solve the zero-boundary steady Stokes
    system and return ∇p (plus the full solution record).

    Accepts a cell-centered VectorGrid; a StokesSolution may be passed to
    reapply the projection to its own gradient without the cell/face
    transfer loss (used by the projection-property tests).
    """
    if isinstance(F, StokesSolution):
        box = F.p.box
        faces = [f.copy() for f in F._face_grad]
    else:
        box = F.box
        faces = None
    _check_domain(box)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = box.n
    h = box.spacing
    if faces is None:
        faces = _to_faces(F)

    solvers = [_ComponentSolver(a, n, h) for a in range(3)]
    cap = 10 * max(n)

    def schur(p):
        g = _grad_to_faces(p, h, [f.shape for f in faces])
        return -_div_faces(_apply_ainv(g, solvers), h)

    aif = _apply_ainv(faces, solvers)
    rhs = -_div_faces(aif, h)
    rhs -= rhs.mean()
    bnorm = float(np.linalg.norm(rhs))

    p = np.zeros(box.n)
    history = []
    if bnorm > 0.0:
        r = rhs.copy()
        d = r.copy()
        rs = float((r * r).sum())
        history.append(1.0)
        it = 0
        while np.sqrt(rs) > tol * bnorm:
            if it >= cap:
                raise StokesError(
                    f"Schur iteration failed to reach {tol} within {cap} steps",
                    history,
                )
            q = schur(d)
            denom = float((d * q).sum())
            if not np.isfinite(denom) or denom <= 0.0:
                # round-off breakdown: the direction carries no energy left
                raise StokesError(
                    f"Schur iteration stagnated before reaching {tol}", history
                )
            alpha = rs / denom
            p += alpha * d
            r -= alpha * q
            rs_new = float((r * r).sum())
            history.append(np.sqrt(rs_new) / bnorm)
            d = r + (rs_new / rs) * d
            rs = rs_new
            it += 1
        p -= p.mean()

    gfaces = _grad_to_faces(p, h, [f.shape for f in faces])
    vfaces = _apply_ainv([faces[a] - gfaces[a] for a in range(3)], solvers)

    av = _apply_a(vfaces, h)
    fnorm = np.sqrt(sum(float((f[_interior(a)] ** 2).sum())
                        for a, f in enumerate(faces)))
    mom = np.sqrt(sum(
        float(((av[a] + gfaces[a] - faces[a])[_interior(a)] ** 2).sum())
        for a in range(3)
    ))
    divv = float(np.linalg.norm(_div_faces(vfaces, h)))
    residuals = {
        "momentum": mom / fnorm if fnorm > 0 else 0.0,
        "divergence": divv / bnorm if bnorm > 0 else divv,
        "mean_p": abs(float(p.mean())),
    }

    p_grid = ScalarGrid(box, p)
    sol = StokesSolution(
        v=VectorGrid.from_array(box, np.array(_faces_to_centers(vfaces))),
        p=p_grid,
        grad_p=VectorGrid.from_array(box, scalar_gradient(p_grid)),
        residuals=residuals,
        iterations=len(history) - 1 if history else 0,
        residual_history=history,
        _face_grad=gfaces,
        _face_v=vfaces,
    )
    return sol


# -- discrete right-hand sides -----------------------------------------------


def _second_derivative(data, axis, h):
    """Second difference, second-order one-sided at the walls."""
    out = np.empty_like(data)
    sl0, sl1, sl2 = [slice(None)] * 3, [slice(None)] * 3, [slice(None)] * 3
    sl0[axis], sl1[axis], sl2[axis] = slice(None, -2), slice(1, -1), slice(2, None)
    mid = [slice(None)] * 3
    mid[axis] = slice(1, -1)
    out[tuple(mid)] = data[tuple(sl0)] - 2 * data[tuple(sl1)] + data[tuple(sl2)]

    def line(idx):
        sl = [slice(None)] * 3
        sl[axis] = idx
        return data[tuple(sl)]

    first = [slice(None)] * 3
    first[axis] = 0
    out[tuple(first)] = 2 * line(0) - 5 * line(1) + 4 * line(2) - line(3)
    last = [slice(None)] * 3
    last[axis] = -1
    out[tuple(last)] = 2 * line(-1) - 5 * line(-2) + 4 * line(-3) - line(-4)
    return out / h[axis] ** 2


def vector_laplacian(v):
    """Componentwise 7-point Laplacian with one-sided wall stencils."""
    h = v.box.spacing
    data = np.array([
        sum(_second_derivative(c.data, axis, h) for axis in range(3))
        for c in v.components
    ])
    return VectorGrid.from_array(v.box, data)


def convective_divergence(u):
    """∇·(u⊗u) by divergence of face-interpolated products."""
    h = u.box.spacing
    comps = [c.data for c in u.components]
    out = np.zeros((3,) + comps[0].shape)
    for a in range(3):
        for b in range(3):
            prod = comps[a] * comps[b]
            lo, hi = [slice(None)] * 3, [slice(None)] * 3
            lo[b], hi[b] = slice(None, -1), slice(1, None)
            shape = list(prod.shape)
            shape[b] += 1
            flux = np.empty(shape)
            interior = [slice(None)] * 3
            interior[b] = slice(1, -1)
            flux[tuple(interior)] = 0.5 * (prod[tuple(lo)] + prod[tuple(hi)])

            def line(idx):
                sl = [slice(None)] * 3
                sl[b] = idx
                return prod[tuple(sl)]

            wall0 = [slice(None)] * 3
            wall0[b] = 0
            flux[tuple(wall0)] = 1.5 * line(0) - 0.5 * line(1)
            wall1 = [slice(None)] * 3
            wall1[b] = -1
            flux[tuple(wall1)] = 1.5 * line(-1) - 0.5 * line(-2)
            out[a] += np.diff(flux, axis=b) / h[b]
    return VectorGrid.from_array(u.box, out)


@dataclass
class LocalPressure:
    """The pressure-gradient triple of the local decomposition.

    grad_ph solves with forcing -u (so p_h absorbs the harmonic part),
    grad_p1 with -∇·(u⊗u) (convective pressure), grad_p2 with Δu
    (viscous pressure); all on the same cube with mean-zero gauge.
    """

    grad_ph: VectorGrid
    grad_p1: VectorGrid
    grad_p2: VectorGrid
    solutions: dict


def pressure_parts(u, tol=1e-8):
    divu = sum(np.gradient(c.data, x, axis=a, edge_order=2)
               for a, (c, x) in enumerate(zip(u.components, u.box.centers())))
    rms_div = float(np.sqrt(np.mean(divu ** 2)))
    rms_grad = float(np.sqrt(np.mean(gradient(u) ** 2)))
    if rms_grad > 0 and rms_div > 0.1 * rms_grad:
        warnings.warn(
            f"input is far from solenoidal (|div u| rms {rms_div:.3e}); "
            "the pressure decomposition assumes div u ≈ 0"
        )
    neg_u = VectorGrid.from_array(u.box, -u.stack())
    sol_h = estar(neg_u, tol)
    conv = convective_divergence(u)
    sol_1 = estar(VectorGrid.from_array(u.box, -conv.stack()), tol)
    sol_2 = estar(vector_laplacian(u), tol)
    return LocalPressure(
        grad_ph=sol_h.grad_p,
        grad_p1=sol_1.grad_p,
        grad_p2=sol_2.grad_p,
        solutions={"ph": sol_h, "p1": sol_1, "p2": sol_2},
    )


def harmonic_residual(ph_solution, u=None):
    """Interior 7-point Laplacian residual of the pressure, relative to ‖p‖."""
    p = ph_solution.p.data
    h = ph_solution.p.box.spacing
    lap = np.zeros_like(p)
    for axis in range(3):
        sl0, sl1, sl2 = [slice(None)] * 3, [slice(None)] * 3, [slice(None)] * 3
        sl0[axis], sl1[axis], sl2[axis] = (slice(None, -2), slice(1, -1),
                                           slice(2, None))
        term = (p[tuple(sl0)] - 2 * p[tuple(sl1)] + p[tuple(sl2)]) / h[axis] ** 2
        pad = [(0, 0)] * 3
        pad[axis] = (1, 1)
        lap += np.pad(term, pad)
    inner = lap[1:-1, 1:-1, 1:-1]
    denom = float(np.sqrt(np.mean(p[1:-1, 1:-1, 1:-1] ** 2)))
    if denom == 0.0:
        return 0.0
    if u is not None:
        # relative check: smooth solenoidal fields carry O(h^2) discrete
        # divergence, so compare against the gradient magnitude
        divu = sum(np.gradient(c.data, x, axis=a, edge_order=2)
                   for a, (c, x) in enumerate(zip(u.components, u.box.centers())))
        rms = float(np.sqrt(np.mean(divu[1:-1, 1:-1, 1:-1] ** 2)))
        rms_grad = float(np.sqrt(np.mean(gradient(u) ** 2)))
        if rms_grad > 0 and rms > 0.1 * rms_grad:
            warnings.warn(
                f"harmonicity of the pressure is only expected for solenoidal "
                f"input; |div u| rms = {rms:.3e}"
            )
    return float(np.sqrt(np.mean(inner ** 2))) / denom


# -- local energy balance ------------------------------------------------------


@dataclass(frozen=True)
class BumpTestFunction:
    """C∞ space-time bump: exp(1 - 1/(1-s)) in |x-c|²/R² times the same
    profile in (t-t_c)²/t_r²; vanishes identically outside the ball/interval.

    All derivatives used by the energy balance are analytic, so the test
    function contributes no differencing error.
    """

    center: tuple
    radius: float
    t_center: float
    t_radius: float

    def _profile(self, s):
        out = np.zeros_like(s)
        inside = s < 1.0 - 1e-12
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside]))
        return out

    def _sq(self, mesh):
        c = self.center
        return (
            (mesh[0] - c[0]) ** 2 + (mesh[1] - c[1]) ** 2 + (mesh[2] - c[2]) ** 2
        ) / self.radius ** 2

    def _tq(self, t):
        return (t - self.t_center) ** 2 / self.t_radius ** 2

    def _tval(self, t):
        q = self._tq(np.asarray(t, dtype=float))
        return float(self._profile(np.atleast_1d(q))[0])

    def value(self, mesh, t):
        return self._profile(self._sq(mesh)) * self._tval(t)

    def grad(self, mesh, t):
        s = self._sq(mesh)
        psi = self._profile(s)
        inside = s < 1.0 - 1e-12
        wp = np.zeros_like(s)
        wp[inside] = -1.0 / (1.0 - s[inside]) ** 2
        coef = psi * wp * (2.0 / self.radius ** 2) * self._tval(t)
        return np.array([coef * (mesh[a] - self.center[a]) for a in range(3)])

    def laplacian(self, mesh, t):
        s = self._sq(mesh)
        psi = self._profile(s)
        inside = s < 1.0 - 1e-12
        wp = np.zeros_like(s)
        wpp = np.zeros_like(s)
        wp[inside] = -1.0 / (1.0 - s[inside]) ** 2
        wpp[inside] = -2.0 / (1.0 - s[inside]) ** 3
        grad_sq = 4.0 * s / self.radius ** 2
        lap_s = 6.0 / self.radius ** 2
        return ((wp ** 2 + wpp) * grad_sq + wp * lap_s) * psi * self._tval(t)

    def dt(self, mesh, t):
        q = self._tq(float(t))
        if q >= 1.0 - 1e-12:
            return np.zeros_like(mesh[0])
        tau = np.exp(1.0 - 1.0 / (1.0 - q))
        dtau = tau * (-1.0 / (1.0 - q) ** 2) * (2.0 * (t - self.t_center)
                                                / self.t_radius ** 2)
        return self._profile(self._sq(mesh)) * dtau


def _cube_slices(box, corner, side):
    """Snap a requested cube onto the cell lattice of the parent box."""
    slices = []
    lo = []
    hi = []
    nn = []
    for a in range(3):
        h = box.spacing[a]
        i0 = int(round((corner[a] - box.lo[a]) / h))
        i1 = int(round((corner[a] + side - box.lo[a]) / h))
        i0 = max(i0, 0)
        i1 = min(i1, box.n[a])
        if i1 - i0 < 16:
            raise ValueError("analysis cube must span at least 16 cells per axis")
        slices.append(slice(i0, i1))
        lo.append(box.lo[a] + i0 * h)
        hi.append(box.lo[a] + i1 * h)
        nn.append(i1 - i0)
    return tuple(slices), Box3(tuple(lo), tuple(hi), tuple(nn))


def _restrict_frame(frame, slices, sub_box):
    data = np.array([c.data[slices] for c in frame.components])
    return VectorGrid.from_array(sub_box, data)


def restrict_to_cube(frame, cube):
    """Extract the sub-grid of a frame covered by a Cube region."""
    slices, sub_box = _cube_slices(frame.box, cube.corner, cube.side)
    return _restrict_frame(frame, slices, sub_box)


def local_energy_residual(f, cube, phi, tol=1e-8, s=None, pressures=None,
                          nu=1.0):
    """Evaluate the seven integrals of the localized energy balance.

    For v = u + ∇p_h the balance reads::

        ∫|v(s)|²φ(s) + 2ν∫∫|∇v|²φ
          ≤ ∫∫|v|²(∂_t+νΔ)φ + ∫∫|v|²(v-∇p_h)·∇φ
            + 2∫∫(v⊗v - v⊗∇p_h : ∇²p_h)φ + 2∫∫(p₁+νp₂)v·∇φ

    with equality for smooth solutions, so slack = rhs - lhs measures the
    discretization error of a resolved run. nu is the viscosity the field
    evolved under; it multiplies the dissipation, the Δφ term, and p₂
    (the part of the local pressure driven by Δu). Time integrals use the
    frame trapezoid rule; φ and its derivatives are analytic.

    pressures may carry a precomputed list of LocalPressure records (one
    per frame) to amortize solves across several test functions.
    """
    if nu <= 0:
        raise ValueError("viscosity must be positive")
    slices, sub_box = _cube_slices(f.box, cube.corner, cube.side)
    mesh = sub_box.center_mesh()
    times = f.times

    if s is None:
        s = times[-1]
    idx = [i for i, t in enumerate(times) if t <= s + 1e-12]
    if len(idx) < 3:
        raise ValueError("need at least 3 frames up to the evaluation time")

    # the bump must live strictly inside the cube and the covered time span
    r = phi.radius
    for a in range(3):
        if (phi.center[a] - r < sub_box.lo[a] - 1e-12
                or phi.center[a] + r > sub_box.hi[a] + 1e-12):
            raise ValueError("test function support leaves the analysis cube")
    if phi.t_center - phi.t_radius < times[0] - 1e-12:
        raise ValueError("test function support starts before the field")
    hmax = max(sub_box.spacing)
    if r < 4 * hmax:
        raise ValueError("test function is unresolved: radius < 4 cells")
    dt_frames = np.diff(times[idx[0]:idx[-1] + 1])
    if len(dt_frames) and phi.t_radius < 2 * dt_frames.max():
        raise ValueError("test function is unresolved in time")

    vol = sub_box.cell_volume
    terms_t = {"grad": [], "phi_t": [], "phi_lap": [], "transport": [],
               "hessian": [], "pressure": []}
    v_at_s = None
    phi_at_s = None

    for i in idx:
        t = times[i]
        u = _restrict_frame(f.frames[i], slices, sub_box)
        lp = pressures[i] if pressures is not None else pressure_parts(u, tol)
        gph = lp.grad_ph.stack()
        uarr = u.stack()
        varr = uarr + gph
        v2 = (varr ** 2).sum(axis=0)

        phi_val = phi.value(mesh, t)
        phi_grad = phi.grad(mesh, t)
        phi_lap = phi.laplacian(mesh, t)
        phi_dt = phi.dt(mesh, t)

        vg = VectorGrid.from_array(sub_box, varr)
        gv = gradient(vg)
        terms_t["grad"].append(float(((gv ** 2).sum(axis=(0, 1)) * phi_val).sum())
                               * vol)
        terms_t["phi_t"].append(float((v2 * phi_dt).sum()) * vol)
        terms_t["phi_lap"].append(float((v2 * phi_lap).sum()) * vol)
        terms_t["transport"].append(
            float((v2 * (uarr * phi_grad).sum(axis=0)).sum()) * vol
        )
        hess = np.array([scalar_gradient(ScalarGrid(sub_box, gph[a]))
                         for a in range(3)])
        contraction = sum(
            varr[a] * uarr[b] * hess[a][b] for a in range(3) for b in range(3)
        )
        terms_t["hessian"].append(float((contraction * phi_val).sum()) * vol)
        psum = lp.solutions["p1"].p.data + nu * lp.solutions["p2"].p.data
        terms_t["pressure"].append(
            float((psum * (varr * phi_grad).sum(axis=0)).sum()) * vol
        )
        if i == idx[-1]:
            v_at_s = v2
            phi_at_s = phi_val

    tt = np.asarray(times)[idx]

    def integrate(key):
        return float(np.trapezoid(np.asarray(terms_t[key]), tt))

    boundary = float((v_at_s * phi_at_s).sum()) * vol
    term_grad = 2.0 * nu * integrate("grad")
    t_phi_t = integrate("phi_t")
    t_phi_lap = nu * integrate("phi_lap")
    t_transport = integrate("transport")
    t_hessian = 2.0 * integrate("hessian")
    t_pressure = 2.0 * integrate("pressure")

    lhs = boundary + term_grad
    rhs = t_phi_t + t_phi_lap + t_transport + t_hessian + t_pressure
    terms = {
        "boundary": boundary,
        "grad": term_grad,
        "phi_t": t_phi_t,
        "phi_lap": t_phi_lap,
        "transport": t_transport,
        "hessian": t_hessian,
        "pressure": t_pressure,
    }
    scale = max(abs(x) for x in terms.values())
    return {
        "lhs": lhs,
        "rhs": rhs,
        "slack": rhs - lhs,
        "slack_relative": (rhs - lhs) / scale if scale > 0 else 0.0,
        "terms": terms,
        "s": float(tt[-1]),
        "frames_used": len(idx),
    }


# -- harmonic rigidity ----------------------------------------------------------


def harmonic_rigidity_check(f, radii, center=None, M=None):
    """Mean-value gradient bound |∇f(x₀)| ≤ (12/π) R⁻⁴ ∫_{B_R}|f| over radii.

    The constant comes from averaging the spherical mean-value identity for
    ∇f over shells in (R/2, R). When M is given, the layer-cake split at
    height H = 1/R adds the closed-form bound
    (12/π)((4π/3) + M³/2) R⁻², which decays like R⁻² whenever the weak-L³
    norm is finite. Reports both bounds per radius, the measured |∇f(x₀)|,
    fitted log-log decay slopes, and the radius where the direct bound
    stops decaying (the crossover of the negative controls).
    """
    box = f.box
    if center is None:
        center = tuple(0.5 * (lo + hi) for lo, hi in zip(box.lo, box.hi))
    centers = box.centers()
    i0 = tuple(int(np.argmin(np.abs(c - x))) for c, x in zip(centers, center))
    if min(i0) < 1 or any(i >= nn - 1 for i, nn in zip(i0, box.n)):
        raise ValueError("center too close to the box boundary")

    grad = np.array([
        (f.data[i0[0] + 1, i0[1], i0[2]] - f.data[i0[0] - 1, i0[1], i0[2]])
        / (2 * box.spacing[0]),
        (f.data[i0[0], i0[1] + 1, i0[2]] - f.data[i0[0], i0[1] - 1, i0[2]])
        / (2 * box.spacing[1]),
        (f.data[i0[0], i0[1], i0[2] + 1] - f.data[i0[0], i0[1], i0[2] - 1])
        / (2 * box.spacing[2]),
    ])
    grad_norm = float(np.linalg.norm(grad))
    x0 = tuple(centers[a][i0[a]] for a in range(3))

    const = 12.0 / np.pi
    records = []
    for R in sorted(radii):
        if R < 3 * max(box.spacing):
            raise ValueError("radius below 3 cells cannot be integrated")
        mask = Ball(x0, R).mask(box)
        integral = float(np.abs(f.data[mask]).sum()) * box.cell_volume
        direct = const * integral / R ** 4
        rec = {
            "R": float(R),
            "integral": integral,
            "bound_direct": direct,
            "grad_norm": grad_norm,
            "bound_holds": grad_norm <= direct * (1 + 1e-9),
        }
        if M is not None:
            rec["bound_split"] = const * (4 * np.pi / 3 + M ** 3 / 2.0) / R ** 2
        records.append(rec)

    rr = np.array([r["R"] for r in records])
    bd = np.array([r["bound_direct"] for r in records])
    slope_direct = float(np.polyfit(np.log(rr), np.log(bd), 1)[0])
    out = {
        "records": records,
        "grad_norm": grad_norm,
        "slope_direct": slope_direct,
        "crossover_R": float(rr[int(np.argmin(bd))]),
    }
    if M is not None:
        bs = np.array([r["bound_split"] for r in records])
        out["slope_split"] = float(np.polyfit(np.log(rr), np.log(bs), 1)[0])
    return out
