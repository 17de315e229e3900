"""Detectable-subspace analysis for the rank-one model.

Routes to the defect number dim S-perp:

* root counting for data in the upper Hardy class: the meromorphic
  continuation D_plus of the perturbation determinant is rational, and the
  defect is N - P - M - M0 (pole count of psi minus pole/root orders of
  phibar/D_plus below and on the axis, minus degenerate data poles);
* the Toeplitz route for data in the lower Hardy class: the defect is the
  number of lower-half-plane zeros of the shifted symbol a - mu_alpha,
  i.e. the Blaschke degree of its inner factor;
* disjoint-support classification for piecewise data, where detectability
  is decided by whether 1 - psi(k) phibarhat(k - i0) vanishes on a set of
  positive measure.

The module also evaluates M-function jumps across the real axis, certifies
S-perp candidates by residuals against solution-operator ranges, compares
resolvent and M-function jump ranks by extrapolation, and samples the
multiplication-symbol curve whose complement components organize the
(1/alpha)-plane.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ratfun import (
    Poly, RatFun, REAL_BAND, _CLUSTER, cauchy_transform, conj_reflect,
    inner_product, l2_norm, partial_fractions, poly_roots,
)
from .hardy import (
    PiecewiseFun, QuadratureError, boundary_value, cauchy_transform_num,
    factorize_rational, quad_gk, quad_real_line, riesz_split,
)
from .friedrichs import FriedrichsModel

__all__ = [
    "DefectReport", "JumpReport", "PiecewiseModel", "RankCheck",
    "SpectrumMembership", "DisjointReport", "SymbolCurve",
    "defect_hardy_plus", "sperp_basis", "sperp_residual",
    "toeplitz_defect", "toeplitz_sperp_basis", "spectrum_T_membership",
    "disjoint_support_classify", "mb_jump", "jump_rank_check",
    "symbol_M_curve", "cauchy_kernel_model",
]

PI = np.pi
INFINITE = "INFINITE"

# classification tolerances; the real-axis band matches the root finder's
_PHIBAR_ZERO_TOL = 1e-10
_M0_LIMIT_TOL = 1e-8
_RANK_SV_REL = 1e-6


@dataclass(frozen=True)
class DefectReport:
    N: int
    P: int
    M: int
    M0: int
    defect: object            # int or "INFINITE"
    roots: tuple              # ((location, class), ...)
    route: str                # HARDY_PLUS | TOEPLITZ | DISJOINT
    degenerate: bool = False
    notes: tuple = ()

    def as_dict(self):
        return {
            "N": self.N, "P": self.P, "M": self.M, "M0": self.M0,
            "defect": self.defect,
            "roots": [[z.real, z.imag, cls] for z, cls in self.roots],
            "route": self.route, "degenerate": self.degenerate,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class JumpReport:
    k: float
    jump_Minv: complex
    jump_M: complex
    rank: int
    method: str = "closed-form"

    def as_dict(self):
        jm = self.jump_M
        return {
            "k": self.k,
            "jump_Minv": [self.jump_Minv.real, self.jump_Minv.imag],
            "jump_M": None if jm is None or not np.isfinite(jm) else [jm.real, jm.imag],
            "rank": self.rank, "method": self.method,
        }


@dataclass(frozen=True)
class PiecewiseModel:
    """Model data where phi and/or psi are compactly supported piecewise
    functions (assumed real-valued, so conjugation is the identity)."""

    phi: object
    psi: object
    B: complex = 0.0


@dataclass(frozen=True)
class RankCheck:
    rank_resolvent: int
    rank_M: int
    equal: bool
    resolved: bool
    jump_matrix: object = None


# ---------------------------------------------------------------------------
# generic scalar transforms that work for rational and piecewise data
# ---------------------------------------------------------------------------

def _phibar_of(f):
    return conj_reflect(f) if isinstance(f, RatFun) else f


def _hat(f, lam):
    """int f(t)/(t - lam) dt for rational or piecewise f, lam off the axis."""
    if isinstance(f, RatFun):
        return cauchy_transform(f, lam)
    return cauchy_transform_num(f, lam)


def _hat_side(f, k, side):
    return boundary_value(f, k, side)


def _support_quad(pw, g, lam):
    """int pw(t) g(t)/(t - lam) over the support of the piecewise factor."""
    total = 0j
    for a, b in pw.support:
        total += quad_gk(lambda t: pw(t) * g(t) / (t - lam), a, b)
    return total


def _hat_product(a, b, lam):
    """int a(t) b(t)/(t - lam) dt, mixed rational/piecewise."""
    ra, rb = isinstance(a, RatFun), isinstance(b, RatFun)
    if ra and rb:
        return cauchy_transform(a * b, lam)
    if not ra:
        return _support_quad(a, b, lam)
    return _support_quad(b, a, lam)


def _d_at(phi, psi, lam):
    """Perturbation determinant 1 + int psi phibar/(t - lam)."""
    phibar = _phibar_of(phi)
    if isinstance(phi, RatFun) and isinstance(psi, RatFun):
        return 1.0 + cauchy_transform(psi * phibar, lam)
    if not isinstance(psi, RatFun) and not isinstance(phi, RatFun):
        # disjoint piecewise supports make the product vanish identically
        sup_psi = psi.support
        sup_phi = phi.support
        if all(b1 <= a2 or b2 <= a1 for a1, b1 in sup_psi for a2, b2 in sup_phi):
            return 1.0 + 0j
    return 1.0 + _hat_product(psi, phibar, lam)


def _l2_of(g):
    if isinstance(g, RatFun):
        return l2_norm(g)
    val = 0.0
    for a, b in g.support:
        val += quad_gk(lambda t: np.abs(g(t)) ** 2, a, b).real
    return float(np.sqrt(val))


# ---------------------------------------------------------------------------
# upper-Hardy route: root counting on the continued determinant
# ---------------------------------------------------------------------------

def _require_halfplane(f, where, name):
    for p in f.poles:
        if p.half_plane != where:
            raise ValueError(f"{name} must have all poles in the "
                             f"{'lower' if where == 'LOWER' else 'upper'} half-plane")


def _rat_deriv_at(f, z):
    n, d = f.num, f.den
    nv, dv = n(z), d(z)
    npv = n.deriv()(z) if n.degree >= 1 else 0j
    dpv = d.deriv()(z) if d.degree >= 1 else 0j
    return (npv * dv - nv * dpv) / (dv * dv)


def _psi_pole_data(psi):
    terms, _ = partial_fractions(psi)
    if any(k > 1 for _, k, _ in terms):
        raise ValueError("psi must have simple poles only")
    data = [(z, c) for z, k, c in terms if abs(c) > 1e-13]
    return data


def d_plus(model):
    """Meromorphic continuation of D from the upper half-plane, as a RatFun.

    For psi = sum c_j/(x - z_j) with poles below the axis and phi in the same
    class, D_plus(mu) = 1 + 2 pi i sum_j c_j phibar(z_j)/(mu - z_j).
    """
    phibar = conj_reflect(model.phi)
    out = RatFun.const(1.0)
    for z, c in _psi_pole_data(model.psi):
        w = 2j * PI * c * complex(phibar(z))
        if w != 0:
            out = out + RatFun.simple_pole(z, w)
    return out


def defect_hardy_plus(model):
    """Defect number for data in the upper Hardy class, by root counting.

    N counts the psi poles; P and M the lower/real pole orders of
    phibar/D_plus away from the data poles; M0 the degenerate data poles
    (phibar vanishing there without restoring the unit limit).
    """
    _require_halfplane(model.phi, "LOWER", "phi")
    _require_halfplane(model.psi, "LOWER", "psi")
    pole_data = _psi_pole_data(model.psi)
    zs = [z for z, _ in pole_data]
    if len(set(np.round(np.array(zs, dtype=complex), 9))) != len(zs):
        raise ValueError("psi poles must be distinct")
    N = len(pole_data)
    phibar = conj_reflect(model.phi)
    dp = d_plus(model)
    g0 = phibar / dp
    P = M = 0
    roots = []
    degenerate = False
    notes = []
    for p in g0.poles:
        near_data = any(abs(p.location - z) <= _CLUSTER * (1 + abs(z)) for z in zs)
        if p.half_plane == "UPPER":
            roots.append((p.location, "UPPER"))
        elif p.half_plane == "REAL":
            M += p.order
            degenerate = True
            roots.append((p.location, "M"))
        elif near_data:
            notes.append(f"continuation pole at data pole {p.location:.6g}")
            roots.append((p.location, "EXCLUDED"))
        else:
            P += p.order
            roots.append((p.location, "P"))
    M0 = 0
    for z, c in pole_data:
        if abs(phibar(z)) <= _PHIBAR_ZERO_TOL:
            limit = 2j * PI * c * _rat_deriv_at(phibar, z) / complex(dp(z))
            if abs(limit - 1.0) > _M0_LIMIT_TOL:
                M0 += 1
                roots.append((z, "M0"))
            else:
                notes.append(f"data pole {z:.6g} degenerate but unit limit")
    defect = N - P - M - M0
    if defect < 0:
        raise RuntimeError(f"negative defect {defect}: classification failed")
    return DefectReport(N, P, M, M0, defect, tuple(roots), "HARDY_PLUS",
                        degenerate, tuple(notes))


def sperp_basis(model, report=None):
    """Orthogonal-complement basis for the upper-Hardy route.

    Solves the linear constraints that cancel every continuation pole of
    phibar/D_plus in the values (gbar(z_1), ..., gbar(z_N)), then rebuilds
    each basis function from the interpolation formula
    gbar = (phibar/D_plus) * sum_j c_j gbar(z_j)/(mu - z_j).
    """
    if report is None:
        report = defect_hardy_plus(model)
    if report.defect == INFINITE:
        raise ValueError("infinite defect has no finite basis")
    pole_data = _psi_pole_data(model.psi)
    N = len(pole_data)
    if report.defect == 0:
        return []
    phibar = conj_reflect(model.phi)
    dp = d_plus(model)
    g0 = phibar / dp
    rows = []
    for p in g0.poles:
        if any(cls in ("P", "M") and abs(z - p.location) < 1e-12
               for z, cls in report.roots):
            for m in range(1, p.order + 1):
                rows.append([c / (p.location - z) ** m for z, c in pole_data])
    for z, cls in report.roots:
        if cls == "M0":
            j = int(np.argmin([abs(z - zz) for zz, _ in pole_data]))
            row = [0.0] * N
            row[j] = 1.0
            rows.append(row)
    if rows:
        A = np.array(rows, dtype=complex)
        _, s, vh = np.linalg.svd(A)
        rank = int(np.sum(s > 1e-10 * max(1.0, s[0])))
        null = vh[rank:].conj()
    else:
        null = np.eye(N, dtype=complex)
    if null.shape[0] != report.defect:
        raise RuntimeError(
            f"nullspace dimension {null.shape[0]} != defect {report.defect}")
    basis = []
    for w in null:
        hsum = RatFun.zero()
        for (z, c), wj in zip(pole_data, w):
            hsum = hsum + RatFun.simple_pole(z, c * wj)
        gbar = g0 * hsum
        g = conj_reflect(gbar)
        basis.append(g * (1.0 / l2_norm(g)))
    return basis


# deterministic probe grid: both half-planes, several heights; the offsets
# keep the points off round pole locations common in worked examples
_MU_RE = (-2.13, -0.87, 0.04, 1.09, 2.21)
_MU_IM = (0.53, 1.07, 1.71, 2.49, 3.93)
_MU_GRID = tuple(complex(re, s * im) for re in _MU_RE for im in _MU_IM
                 for s in (1.0, -1.0))


def sperp_residual(model, g, mus=_MU_GRID, Bs=None):
    """Max normalized pairing |<S_{mu,B} 1, g>| over a probe grid of mu.

    Vanishing (below ~1e-8) certifies g orthogonal to every solution-operator
    range, i.e. g in S-perp.  The pairing divided by M_B(mu) is B-independent,
    so the default drops the M factor; passing Bs multiplies it back in for
    each B in the list (same pass/fail by construction).
    """
    phi, psi = model.phi, model.psi
    phibar = _phibar_of(phi)
    gbar = conj_reflect(g) if isinstance(g, RatFun) else g
    gnorm = _l2_of(g)
    if gnorm == 0:
        raise ValueError("zero candidate")
    worst = 0.0
    for mu in mus:
        try:
            D = _d_at(phi, psi, mu)
            if abs(D) < 1e-9:
                continue
            F = _hat(gbar, mu) - (_hat(phibar, mu) / D) * _hat_product(psi, gbar, mu)
        except ValueError:
            continue    # probe collided with a pole; plenty of grid remains
        scale = np.sqrt(abs(mu.imag) / PI) / gnorm
        if Bs is None:
            worst = max(worst, abs(F) * scale)
        else:
            sign = np.sign(mu.imag)
            ph = _hat(psi, mu)
            for B in Bs:
                bracket = sign * PI * 1j - ph * _hat(phibar, mu) / D - complex(B)
                if abs(bracket) < 1e-10:
                    continue
                worst = max(worst, abs(F / bracket) * scale)
    return worst


# ---------------------------------------------------------------------------
# Toeplitz route (lower-Hardy data)
# ---------------------------------------------------------------------------

def toeplitz_defect(model, alpha):
    """Defect via the inner factor of the shifted symbol a - mu_alpha.

    a = psi phibar lies in the lower Hardy algebra (all poles above the
    axis); mu_alpha = 1/(2 pi i alpha).  The defect equals the number of
    lower-half-plane zeros of a - mu_alpha counted with multiplicity.
    """
    alpha = complex(alpha)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    _require_halfplane(model.phi, "UPPER", "phi")
    a = model.psi * conj_reflect(model.phi)
    _require_halfplane(a, "UPPER", "symbol a")
    mu_a = 1.0 / (2j * PI * alpha)
    fac = factorize_rational(a - mu_a)
    roots = [(z, "BLASCHKE") for z, _ in fac.blaschke.zeros]
    roots += [(z, "BOUNDARY") for z, _ in fac.boundary_zeros]
    defect = sum(m for _, m in fac.blaschke.zeros)
    boundary = sum(m for _, m in fac.boundary_zeros)
    return DefectReport(N=defect, P=0, M=boundary, M0=0, defect=defect,
                        roots=tuple(roots), route="TOEPLITZ",
                        degenerate=fac.degenerate,
                        notes=(f"mu_alpha={mu_a:.6g}",))


def toeplitz_sperp_basis(model, alpha, report=None):
    """S-perp representatives phi/(x - conj(w))^m over the inner-factor zeros."""
    if report is None:
        report = toeplitz_defect(model, alpha)
    mu_a = 1.0 / (2j * PI * complex(alpha))
    a = model.psi * conj_reflect(model.phi)
    fac = factorize_rational(a - mu_a)
    out = []
    for w, mult in fac.blaschke.zeros:
        for m in range(1, mult + 1):
            g = model.phi * _recip_power(np.conj(w), m)
            out.append(g * (1.0 / l2_norm(g)))
    return out


def _recip_power(z0, m):
    den = Poly([1.0])
    for _ in range(m):
        den = den * Poly([-z0, 1.0])
    return RatFun(Poly([1.0]), den, den_roots=[(complex(z0), m)])


def cauchy_kernel_model(model, alpha):
    """The effective model whose determinant zeros the Toeplitz route counts."""
    return FriedrichsModel(model.phi, model.psi * complex(alpha), model.B)


# ---------------------------------------------------------------------------
# Toeplitz spectrum membership
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumMembership:
    membership: str            # INTERIOR | BOUNDARY | OUTSIDE
    point_spectrum: bool
    isolated: bool
    preimages: tuple


def spectrum_T_membership(a, mu, curve_halfwidth=60.0, n_curve=4001, tol=1e-8):
    """Locate mu relative to the spectrum of the Toeplitz operator with symbol a.

    Counts lower-half-plane solutions of a(z) = mu (point spectrum when > 0),
    flags BOUNDARY when a preimage sits in the real-axis band or mu lies on
    the boundary curve a(R) (including its value at infinity).
    """
    mu = complex(mu)
    _require_halfplane(a, "UPPER", "symbol a")
    if a.decay_order < 0:
        raise ValueError("symbol must be bounded on the axis")
    a_inf = 0j if a.decay_order >= 1 else a.num.coeffs[-1] / a.den.coeffs[-1]
    diff = a - mu
    if diff.is_zero or diff.num.is_zero:
        raise ValueError("mu equals the symbol identically")
    if diff.num.degree < 1:
        roots = []
    else:
        roots = poly_roots(diff.num)
    lower = [(z, m) for z, m in roots if z.imag < -REAL_BAND]
    band = [(z, m) for z, m in roots if abs(z.imag) <= REAL_BAND]
    count = sum(m for _, m in lower)
    ts = np.linspace(-curve_halfwidth, curve_halfwidth, n_curve)
    curve_dist = float(np.min(np.abs(a(ts) - mu)))
    scale = 1.0 + abs(mu)
    near_curve = curve_dist <= 1e-6 * scale or band
    at_infinity = abs(a_inf - mu) <= tol * scale
    if near_curve or at_infinity:
        # reached only in the t -> +-infinity limit, with no half-plane or
        # axis preimage: the compactification point of the symbol curve
        isolated = bool(at_infinity and not band and count == 0)
        return SpectrumMembership("BOUNDARY", count > 0, isolated,
                                  tuple(lower + band))
    if count > 0:
        return SpectrumMembership("INTERIOR", True, False, tuple(lower))
    return SpectrumMembership("OUTSIDE", False, False, ())


# ---------------------------------------------------------------------------
# disjoint-support classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DisjointReport:
    classification: str        # FULL | INFINITE_DEFECT | UNRESOLVED
    near_zero_intervals: tuple
    min_abs: float
    sides_agreement: float


def disjoint_support_classify(phi, psi, n=200, tol=1e-6):
    """Detectability for piecewise data with disjoint supports.

    Samples v(k) = 1 - psi(k) phibarhat(k - i0) over the support of psi.
    Both one-sided boundary values are evaluated; they must agree there
    (the Plemelj jump is carried by phi, supported elsewhere).  v == 0 on an
    interval (confirmed at two grid refinements) means infinite defect; v
    bounded away from zero means the detectable subspace is everything.
    """
    sup_phi, sup_psi = phi.support, psi.support
    for a1, b1 in sup_psi:
        for a2, b2 in sup_phi:
            if not (b1 <= a2 or b2 <= a1):
                raise ValueError("supports must be disjoint")
    phibar = _phibar_of(phi)

    def scan(npts):
        ks, vs, agree = [], [], 0.0
        for a, b in sup_psi:
            pad = (b - a) * 1e-3
            grid = np.linspace(a + pad, b - pad, npts)
            for k in grid:
                vm = 1.0 - complex(psi(k)) * _hat_side(phibar, k, "-")
                vp = 1.0 - complex(psi(k)) * _hat_side(phibar, k, "+")
                agree = max(agree, abs(vp - vm))
                ks.append(k)
                vs.append(vm)
        return np.array(ks), np.array(vs), agree

    ks, vs, agree = scan(n)
    min_abs = float(np.min(np.abs(vs)))
    if min_abs > tol:
        return DisjointReport("FULL", (), min_abs, agree)

    def zero_intervals(ks, vs):
        mask = np.abs(vs) < tol
        spans = []
        start = None
        for i, m in enumerate(mask):
            if m and start is None:
                start = i
            elif not m and start is not None:
                spans.append((ks[start], ks[i - 1]))
                start = None
        if start is not None:
            spans.append((ks[start], ks[-1]))
        return spans

    spacing = (ks[1] - ks[0]) if len(ks) > 1 else 0.0
    spans1 = [s for s in zero_intervals(ks, vs) if s[1] - s[0] >= 2 * spacing]
    ks2, vs2, agree2 = scan(2 * n)
    spacing2 = ks2[1] - ks2[0]
    spans2 = [s for s in zero_intervals(ks2, vs2) if s[1] - s[0] >= 2 * spacing2]
    agree = max(agree, agree2)
    if spans1 and spans2:
        return DisjointReport("INFINITE_DEFECT", tuple(spans2),
                              float(np.min(np.abs(vs2))), agree)
    return DisjointReport("UNRESOLVED", tuple(spans2), min_abs, agree)


# ---------------------------------------------------------------------------
# M-function jumps across the axis
# ---------------------------------------------------------------------------

def mb_jump(model, k, tol=1e-8):
    """Jump of M_B^{-1} (and of M_B) across the axis at k.

    M^{-1}(k +- i0) = +-pi i - psihat phibarhat / D - B with one-sided
    Plemelj boundary values; rank 1 exactly when M itself jumps.
    """
    k = float(k)
    phi, psi, B = model.phi, model.psi, complex(model.B)
    phibar = _phibar_of(phi)

    def minv(side):
        sgn = PI * 1j if side == "+" else -PI * 1j
        ph = _hat_side(psi, k, side)
        fh = _hat_side(phibar, k, side)
        if isinstance(phi, RatFun) and isinstance(psi, RatFun):
            D = 1.0 + _hat_side(psi * phibar, k, side)
        else:
            D = _d_at(phi, psi, complex(k, 1e-300 if side == "+" else -1e-300))
        if abs(D) < 1e-12:
            raise ZeroDivisionError(f"determinant vanishes at {k}{side}i0")
        return sgn - ph * fh / D - B

    mp, mm = minv("+"), minv("-")
    jump_minv = mp - mm
    if min(abs(mp), abs(mm)) < tol:
        jump_m = np.inf
        rank = 1
    else:
        jump_m = 1.0 / mp - 1.0 / mm
        rank = 0 if abs(jump_m) <= tol else 1
    return JumpReport(k, jump_minv, jump_m, rank, "closed-form")


def _d_boundary(phi, psi, k, side):
    phibar = _phibar_of(phi)
    if isinstance(phi, RatFun) and isinstance(psi, RatFun):
        return 1.0 + _hat_side(psi * phibar, k, side)
    # disjoint-support piecewise data: the product vanishes
    return 1.0 + 0j


# ---------------------------------------------------------------------------
# jump rank comparison: bordered resolvent vs M-function
# ---------------------------------------------------------------------------

def _model_m(model, lam):
    """M-function value for rational or piecewise model data."""
    phi, psi, B = model.phi, model.psi, complex(model.B)
    phibar = _phibar_of(phi)
    D = _d_at(phi, psi, lam)
    ph = _hat(psi, lam)
    fh = _hat(phibar, lam)
    bracket = np.sign(lam.imag) * PI * 1j - ph * fh / D - B
    return 1.0 / bracket, D, ph, fh


def _kernel_callable(model, mu, f=1.0):
    """Kernel element u = S_{mu,B} f as a plain callable, with gamma_2."""
    phi, psi = model.phi, model.psi
    M, D, _, fh = _model_m(model, mu)
    g2 = M * complex(f)
    coef = fh / D

    def u(t):
        return g2 * (1.0 - coef * np.asarray(psi(t), dtype=complex)) / (t - mu)

    return u, g2


def _pair_l2(F, v):
    return quad_real_line(lambda t: F(t) * np.conj(v(t)))


def _neville_zero(xs, ys):
    """Polynomial extrapolation of ys(xs) to 0, with a crude error estimate."""
    ys = [np.asarray(y, dtype=complex) for y in ys]
    n = len(xs)
    tab = list(ys)
    prev = tab[0]
    for m in range(1, n):
        nxt = []
        for i in range(n - m):
            num = (0.0 - xs[i]) * tab[i + 1] - (0.0 - xs[i + m]) * tab[i]
            nxt.append(num / (xs[i + m] - xs[i]))
        tab = nxt
        prev = tab[0]
    err = float(np.max(np.abs(prev - ys[-1])))
    return prev, err


def jump_rank_check(model, k, fs, ws, mus, mu_ts,
                    eps_ladder=(3e-3, 1e-3, 3e-4, 1e-4), tol=1e-6):
    """Compare the rank of the bordered-resolvent jump with the M jump at k.

    The bordered matrix entries <(A_B - lam)^{-1} F_{i,l}, v_{j,nu}> are
    evaluated through the pairing identity

      <R F, v> = [<F, v>(conj(mu_t) - lam) - M f conj(w) + f conj(g2t)]
                 / ((mu - lam)(conj(mu_t) - lam)),

    which needs only scalar transforms, so it applies to piecewise data too.
    The jump matrix at k is Richardson-extrapolated over the eps ladder and
    its numerical rank compared with that of [M](k) f_i conj(w_j).
    """
    k = float(k)
    fs = [complex(f) for f in fs]
    ws = [complex(w) for w in ws]
    mus = [complex(m) for m in mus]
    mu_ts = [complex(m) for m in mu_ts]
    tm = PiecewiseModel(model.psi, model.phi, np.conj(model.B))
    rows = [(i, l) for i in range(len(fs)) for l in range(len(mus))]
    cols = [(j, nu) for j in range(len(ws)) for nu in range(len(mu_ts))]

    # lam-independent data
    Fdata = {}
    for i, l in rows:
        if fs[i] == 0:
            Fdata[(i, l)] = None
            continue
        F, _ = _kernel_callable(model, mus[l], fs[i])
        Fdata[(i, l)] = F
    vdata = {}
    for j, nu in cols:
        if ws[j] == 0:
            vdata[(j, nu)] = None
            continue
        v, g2t = _kernel_callable(tm, mu_ts[nu], ws[j])
        vdata[(j, nu)] = (v, g2t)
    pair0 = {}
    for r in rows:
        for c in cols:
            if Fdata[r] is None or vdata[c] is None:
                pair0[(r, c)] = 0j
            else:
                pair0[(r, c)] = _pair_l2(Fdata[r], vdata[c][0])

    def bordered(lam):
        Mv, _, _, _ = _model_m(model, lam)
        out = np.zeros((len(rows), len(cols)), dtype=complex)
        for a, r in enumerate(rows):
            i, l = r
            for b, c in enumerate(cols):
                j, nu = c
                if Fdata[r] is None or vdata[c] is None:
                    continue
                mtc = np.conj(mu_ts[nu])
                val = (pair0[(r, c)] * (mtc - lam)
                       - Mv * fs[i] * np.conj(ws[j])
                       + fs[i] * np.conj(vdata[c][1]))
                out[a, b] = val / ((mus[l] - lam) * (mtc - lam))
        return out

    def extrapolate(lad):
        jumps = [bordered(complex(k, e)) - bordered(complex(k, -e))
                 for e in lad]
        J0, _ = _neville_zero(list(lad), jumps)
        if len(lad) > 2:
            # sub-ladder consistency is a far better error gauge than the
            # raw Neville defect near an embedded resonance of M
            Ja, _ = _neville_zero(list(lad[:-1]), jumps[:-1])
            Jb, _ = _neville_zero(list(lad[1:]), jumps[1:])
            err = float(np.max(np.abs(Ja - Jb))) if J0.size else 0.0
        else:
            err = float(np.max(np.abs(J0 - jumps[-1]))) if J0.size else 0.0
        return J0, err

    lad = tuple(float(e) for e in eps_ladder)
    J0 = np.zeros((len(rows), len(cols)), dtype=complex)
    resolved = False
    prev = None
    for _ in range(3):
        try:
            J0, err = extrapolate(lad)
        except (QuadratureError, ZeroDivisionError):
            break
        if prev is not None and J0.size:
            # agreement between successive shrunk ladders is the sharper
            # gauge once the pole of J(eps) has been left behind
            err = min(err, float(np.max(np.abs(J0 - prev))))
        smax = float(np.max(np.abs(J0))) if J0.size else 0.0
        if err <= max(0.3 * tol, 1e-3 * smax):
            resolved = True
            break
        prev = J0
        lad = tuple(0.3 * e for e in lad)   # resonance nearby: tighten
    if J0.size:
        s = np.linalg.svd(J0, compute_uv=False)
        rank_res = int(np.sum(s > max(_RANK_SV_REL * s[0], tol)))
    else:
        rank_res = 0
    jr = mb_jump(model, k, tol=tol)
    fmat = np.outer(fs, np.conj(ws))
    jm = jr.jump_M if np.isfinite(jr.jump_M) else 1.0
    rank_m = 0 if (jr.rank == 0 or np.max(np.abs(fmat)) < tol) else \
        int(np.linalg.matrix_rank(jm * fmat, tol=tol))
    return RankCheck(min(rank_res, 1), min(rank_m, 1),
                     min(rank_res, 1) == min(rank_m, 1), resolved, J0)


# ---------------------------------------------------------------------------
# multiplication-symbol curve
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymbolCurve:
    ks: np.ndarray
    values: np.ndarray        # 2 pi i script-M(k): the 1/alpha-plane curve

    def membership(self, alpha=None, target=None, tol=1e-6):
        """(on_curve, winding, distance) of 1/alpha (or an explicit target)."""
        if target is None:
            if alpha is None or alpha == 0:
                raise ValueError("need alpha != 0 or an explicit target")
            target = 1.0 / complex(alpha)
        target = complex(target)
        pts = np.concatenate([[0.0], self.values, [0.0]])  # closes through 0
        dist = float(np.min(np.abs(pts - target)))
        scale = 1.0 + abs(target)
        on_curve = dist <= tol * scale
        if on_curve:
            return True, None, dist
        rel = pts - target
        dphi = np.angle(rel[1:] / rel[:-1])
        winding = int(np.round(np.sum(dphi) / (2 * PI)))
        return False, winding, dist


def symbol_M_curve(model, halfwidth=40.0, n=4001):
    """Sample the curve 2 pi i script-M(R) organizing the 1/alpha-plane.

    script-M(k) = (P_plus phibar)(k) psi(k) - P_plus(psi phibar)(k); its
    2 pi i multiple is the boundary curve of the exceptional set in the
    1/alpha plane.  Rational data uses Riesz projections in closed form,
    piecewise data one-sided boundary values.
    """
    phi, psi = model.phi, model.psi
    phibar = _phibar_of(phi)
    ks = np.linspace(-halfwidth, halfwidth, n)
    if isinstance(phi, RatFun) and isinstance(psi, RatFun):
        pb_plus, _ = riesz_split(phibar) if not phibar.is_zero else (RatFun.zero(),) * 2
        prod = psi * phibar
        pr_plus = riesz_split(prod)[0] if not prod.is_zero else RatFun.zero()
        script = pb_plus * psi - pr_plus
        vals = script(ks)
    else:
        def pplus(f, k):
            return _hat_side(f, k, "+") / (2j * PI)
        vals = np.array([
            pplus(phibar, k) * complex(psi(k)) - _pp_product(psi, phibar, k)
            for k in ks])
    return SymbolCurve(ks, 2j * PI * vals)


def _pp_product(psi, phibar, k):
    """P_plus(psi phibar)(k) for piecewise factors with disjoint supports."""
    if not isinstance(psi, RatFun) and not isinstance(phibar, RatFun):
        disjoint = all(b1 <= a2 or b2 <= a1
                       for a1, b1 in psi.support for a2, b2 in phibar.support)
        if disjoint:
            return 0j
    raise ValueError("overlapping piecewise supports are unsupported here")
