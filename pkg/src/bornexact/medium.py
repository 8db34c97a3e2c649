"""Permittivity/permeability profiles with one-sided transverse Fourier support.

A compliant medium has eta_eps = eps - I and eta_mu = mu - I confined to a
slab a_- < z < a_+ whose 2D transverse Fourier transforms vanish for
p_x <= alpha.  The built-in nonmagnetic isotropic families realize this with

    eta(r) = e^{i alpha x} E(x) f(y, z),

where the envelope E is either rational, E(x) = 1/(1 - i x/a)^(m+1), or the
Gauss-erf form E(x) = sqrt(pi) e^{-x^2/a^2} [1 + erf(i x/a)], and f is a box
footprint of amplitude zeta.  Both envelopes have spectral densities u(K)
supported on K > 0 only, so the x-transform of eta is 2 pi u(p_x - alpha)
exactly: zero at and below the threshold.

Fourier convention (matching the transfer machinery):
    eta2(p, z) = int d^2r e^{-i p.r} eta(r, z)
    eta3(q)    = int dz  e^{-i q_z z} eta2((q_x, q_y), z)

A plain Gaussian envelope with no modulation serves as the noncompliant
control in all contrast baselines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import dawsn, gammaln

from .errors import BoundsViolated, ConfigError, WindowTooSmall

_EYE3 = np.eye(3)

# Reciprocal-symbol Neumann series is truncated when the geometric tail bound
# |eta|_inf^(N+1) / (1 - |eta|_inf) drops below this.
_RECIP_TAIL_TOL = 1e-14


def _sinc(z):
    """sin(z)/z, stable near 0 and valid for complex z."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-5
    zs = np.where(small, 1.0, z)
    out = np.where(small, 1.0 - z * z / 6.0, np.sin(zs) / zs)
    return out


def _scalar_to_tensor(s):
    """Promote a scalar field (...,) to an isotropic tensor field (..., 3, 3)."""
    s = np.asarray(s, dtype=complex)
    return s[..., None, None] * _EYE3


@dataclass(frozen=True)
class TransverseBox:
    """Rectangular footprint f(y,z) = zeta inside |y|<=ly/2, |z|<=lz/2."""

    zeta: complex
    ly: float
    lz: float

    def __post_init__(self):
        if self.ly <= 0 or self.lz <= 0:
            raise ValueError("box side lengths must be positive")

    def value(self, y, z):
        y = np.asarray(y, dtype=float)
        z = np.asarray(z, dtype=float)
        inside = (np.abs(y) <= self.ly / 2) & (np.abs(z) <= self.lz / 2)
        return np.where(inside, self.zeta, 0.0 + 0.0j)

    def indicator_z(self, z):
        return (np.abs(np.asarray(z, dtype=float)) <= self.lz / 2).astype(float)

    def ft_y(self, py):
        """1D transform of the unit box in y: ly sinc(py ly / 2)."""
        return self.ly * _sinc(np.asarray(py) * self.ly / 2.0)

    def ft_z(self, qz):
        """1D transform of the unit box in z; accepts complex qz."""
        return self.lz * _sinc(np.asarray(qz) * self.lz / 2.0)


class MediumProfile:
    """Base interface shared by all profile families.

    Subclasses provide scalar closed forms (or grid transforms) for the
    position-space tensors, the 2D/3D Fourier transforms and the Fourier
    transform of the reciprocal symbols eta_{1/eps33}, eta_{1/mu33}.
    """

    alpha: float | None = None
    slab: tuple[float, float] = (0.0, 0.0)
    isotropic_nonmagnetic = False

    # -- position space -------------------------------------------------
    def eval_eta(self, r):
        raise NotImplementedError

    # -- momentum space --------------------------------------------------
    def eta2_tensors(self, p2, z):
        raise NotImplementedError

    def eta3_tensors(self, q3):
        raise NotImplementedError

    def recip33_ft2(self, p2, z, which: str):
        raise NotImplementedError

    def recip33_ft3(self, q3, which: str):
        raise NotImplementedError

    # -- metadata ---------------------------------------------------------
    def scaled(self, sigma: float):
        raise NotImplementedError

    def spectral_extent(self, rel_tol: float = 1e-9) -> float:
        """Largest |K| carrying x-spectrum above rel_tol of its peak."""
        raise NotImplementedError

    def default_window(self) -> float:
        raise NotImplementedError

    def sampling_box(self):
        """((x-,x+),(y-,y+),(z-,z+)) region containing the inhomogeneity."""
        raise NotImplementedError

    def eta3_peak(self) -> float:
        """max_q |eta3_eps(q)| over the scalar component (normalization scale)."""
        raise NotImplementedError


class _EnvelopeProfile(MediumProfile):
    """Shared machinery of the separable isotropic nonmagnetic families."""

    isotropic_nonmagnetic = True

    def __init__(self, alpha, a, footprint: TransverseBox, slab=None):
        if a <= 0:
            raise ValueError("envelope length a must be positive")
        self.alpha = alpha
        self.a = float(a)
        self.footprint = footprint
        box_slab = (-footprint.lz / 2.0, footprint.lz / 2.0)
        if slab is None:
            slab = box_slab
        elif slab[0] > box_slab[0] + 1e-12 or slab[1] < box_slab[1] - 1e-12:
            raise ValueError("declared slab does not contain the footprint support")
        self.slab = (float(slab[0]), float(slab[1]))

    # subclasses: envelope_x(x), ft_env_pow(n, K), env_abs_max()

    def envelope_x(self, x):
        raise NotImplementedError

    def ft_env_pow(self, n: int, K):
        """Fourier transform of [e^{i a0 x} E(x)]^n along x (a0 = modulation)."""
        raise NotImplementedError

    def env_abs_max(self) -> float:
        raise NotImplementedError

    def scalar_eta(self, r):
        r = np.asarray(r, dtype=float)
        return self.envelope_x(r[..., 0]) * self.footprint.value(r[..., 1], r[..., 2])

    def eval_eta(self, r):
        ee = _scalar_to_tensor(self.scalar_eta(r))
        return ee, np.zeros_like(ee)

    def scalar_eta2(self, p2, z):
        p2 = np.asarray(p2, dtype=float)
        return (
            self.ft_env_pow(1, p2[..., 0])
            * self.footprint.zeta
            * self.footprint.ft_y(p2[..., 1])
            * self.footprint.indicator_z(z)
        )

    def scalar_eta3(self, q3):
        q3 = np.asarray(q3)
        return (
            self.ft_env_pow(1, np.real(q3[..., 0]))
            * self.footprint.zeta
            * self.footprint.ft_y(np.real(q3[..., 1]))
            * self.footprint.ft_z(q3[..., 2])
        )

    def eta2_tensors(self, p2, z):
        ee = _scalar_to_tensor(self.scalar_eta2(p2, z))
        return ee, np.zeros_like(ee)

    def eta3_tensors(self, q3):
        ee = _scalar_to_tensor(self.scalar_eta3(q3))
        return ee, np.zeros_like(ee)

    # reciprocal symbol: 1/(1 + eta) - 1 = sum_n (-1)^n eta^n, with each
    # power's x-transform known per family (one-sided support preserved
    # exactly, which the compliance arguments rely on).
    def _recip_terms(self):
        b = abs(self.footprint.zeta) * self.env_abs_max()
        if b >= 1.0:
            raise BoundsViolated(f"|eta| reaches {b:.3g} >= 1; reciprocal series diverges")
        n = 1
        while b ** (n + 1) / (1.0 - b) > _RECIP_TAIL_TOL:
            n += 1
            if n > 64:
                break
        return n

    def _recip_ft_x(self, K):
        K = np.asarray(K, dtype=float)
        out = np.zeros(K.shape, dtype=complex)
        zeta = self.footprint.zeta
        for n in range(1, self._recip_terms() + 1):
            out += (-1.0) ** n * zeta**n * self.ft_env_pow(n, K)
        return out

    def recip33_ft2(self, p2, z, which: str):
        if which == "mu":
            return np.zeros(np.asarray(p2).shape[:-1], dtype=complex)
        p2 = np.asarray(p2, dtype=float)
        return (
            self._recip_ft_x(p2[..., 0])
            * self.footprint.ft_y(p2[..., 1])
            * self.footprint.indicator_z(z)
        )

    def recip33_ft3(self, q3, which: str):
        if which == "mu":
            return np.zeros(np.asarray(q3).shape[:-1], dtype=complex)
        q3 = np.asarray(q3)
        return (
            self._recip_ft_x(np.real(q3[..., 0]))
            * self.footprint.ft_y(np.real(q3[..., 1]))
            * self.footprint.ft_z(q3[..., 2])
        )

    def scaled(self, sigma: float):
        out = self.__class__.__new__(self.__class__)
        out.__dict__.update(self.__dict__)
        out.footprint = replace(self.footprint, zeta=sigma * self.footprint.zeta)
        if hasattr(out, "_u_cache"):
            out._u_cache = {}
        return out

    def sampling_box(self):
        x_ext = max(20.0 * self.a, 3.0 * self.footprint.ly)
        return (
            (-x_ext, x_ext),
            (-0.75 * self.footprint.ly, 0.75 * self.footprint.ly),
            self.slab,
        )

    def eta3_peak(self) -> float:
        Ks = np.linspace(0.0, self.spectral_extent(1e-12) + (self.alpha or 0.0), 4096)
        env_pk = float(np.abs(self.ft_env_pow(1, Ks)).max())
        return env_pk * abs(self.footprint.zeta) * self.footprint.ly * self.footprint.lz


class RationalEnvelopeProfile(_EnvelopeProfile):
    """eta(r) = zeta e^{i alpha x} f(y,z) / (1 - i x/a)^(m+1), eta_mu = 0.

    Spectral density u(K) = (a/m!) (aK)^m e^{-aK} on K > 0; powers of the
    envelope stay in the same family, so every Neumann term of the
    reciprocal symbol has a closed-form one-sided transform.
    """

    def __init__(self, alpha, a, m_exp: int, footprint: TransverseBox, slab=None):
        if m_exp < 1 or int(m_exp) != m_exp:
            raise ValueError("m_exp must be a positive integer")
        super().__init__(alpha, a, footprint, slab)
        self.m_exp = int(m_exp)

    def envelope_x(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(1j * self.alpha * x) / (1.0 - 1j * x / self.a) ** (self.m_exp + 1)

    def ft_env_pow(self, n: int, K):
        # envelope^n = 1/(1 - ix/a)^(n(m+1)): transform is a Gamma density
        # 2 pi (a / (M-1)!) (a kk)^(M-1) e^{-a kk} at kk = K - n alpha, M = n(m+1)
        K = np.asarray(K, dtype=float)
        kk = K - n * self.alpha
        M = n * (self.m_exp + 1)
        out = np.zeros(kk.shape, dtype=complex)
        pos = kk > 0
        if np.any(pos):
            lg = (
                np.log(2 * np.pi * self.a)
                + (M - 1) * np.log(self.a * kk[pos])
                - self.a * kk[pos]
                - gammaln(M)
            )
            out[pos] = np.exp(lg)
        return out

    def env_abs_max(self) -> float:
        return 1.0

    def spectral_extent(self, rel_tol: float = 1e-9) -> float:
        # solve (aK)^m e^{-aK} = rel_tol * peak by bisection on aK > m
        m = self.m_exp
        pk = m**m * np.exp(-m)
        lo, hi = float(m), float(m)
        while hi**m * np.exp(-hi) > rel_tol * pk:
            hi *= 2.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if mid**m * np.exp(-mid) > rel_tol * pk:
                lo = mid
            else:
                hi = mid
        return (self.alpha or 0.0) + hi / self.a

    def default_window(self) -> float:
        return 100.0 * self.a


class GaussErfProfile(_EnvelopeProfile):
    """eta(r) = sqrt(pi) e^{i alpha x} e^{-x^2/a^2} [1 + erf(i x/a)] f(y,z).

    Evaluated through the Dawson function, sqrt(pi) e^{-s^2} erf(is) =
    2 i D(s), which stays bounded for large |x| (the envelope decays like
    i a/x, not super-exponentially).  Spectral density u(K) = a e^{-a^2K^2/4}
    on K > 0.  Neumann powers beyond n = 1 are built by cached numerical
    self-convolution of u.
    """

    def __init__(self, alpha, a, footprint: TransverseBox, slab=None):
        super().__init__(alpha, a, footprint, slab)
        if abs(footprint.zeta) >= 1.0 / np.sqrt(np.pi):
            raise BoundsViolated("gausserf requires |zeta| < 1/sqrt(pi)")
        self._u_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def envelope_x(self, x):
        x = np.asarray(x, dtype=float)
        s = x / self.a
        env = np.sqrt(np.pi) * np.exp(-(s**2)) + 2j * dawsn(s)
        return np.exp(1j * self.alpha * x) * env

    def _u1(self, kk):
        return self.a * np.exp(-((self.a * kk) ** 2) / 4.0) * (kk > 0)

    def _u_pow(self, n: int):
        """n-fold autoconvolution of u on a cached grid over [0, n*Kmax]."""
        if n in self._u_cache:
            return self._u_cache[n]
        kmax1 = 14.0 / self.a
        nk = 4096
        dk = kmax1 / nk
        base_k = np.arange(nk) * dk
        base = self._u1(base_k + 1e-300)  # keep K=0 sample at u(0+) limit a
        base[0] = self.a  # one-sided density: right-limit at the jump
        cur = base
        for _ in range(n - 1):
            new = np.convolve(cur, base) * dk
            # trapezoid endpoint correction: the rectangle sum double-counts
            # half a cell at each end of [0, K]
            new[: cur.size] -= 0.5 * dk * base[0] * cur
            new[: base.size] -= 0.5 * dk * cur[0] * base
            cur = new
        grid = np.arange(cur.size) * dk
        self._u_cache[n] = (grid, cur)
        return self._u_cache[n]

    def ft_env_pow(self, n: int, K):
        K = np.asarray(K, dtype=float)
        kk = K - n * self.alpha
        if n == 1:
            return 2 * np.pi * self._u1(kk).astype(complex)
        grid, vals = self._u_pow(n)
        out = np.interp(kk, grid, vals, left=0.0, right=0.0)
        out[kk <= 0] = 0.0
        return 2 * np.pi * out.astype(complex)

    def env_abs_max(self) -> float:
        return float(np.sqrt(np.pi))

    def spectral_extent(self, rel_tol: float = 1e-9) -> float:
        return (self.alpha or 0.0) + 2.0 * np.sqrt(np.log(1.0 / rel_tol)) / self.a

    def default_window(self) -> float:
        return 40.0 * self.a


class GaussianControlProfile(_EnvelopeProfile):
    """Unmodulated Gaussian envelope: the deliberately noncompliant control.

    eta(r) = zeta e^{-x^2/a^2} f(y,z); its x-spectrum is a Gaussian centered
    at 0, straddling every threshold.  Used for all contrast baselines.
    """

    def __init__(self, a, footprint: TransverseBox, slab=None):
        super().__init__(alpha=None, a=a, footprint=footprint, slab=slab)
        self.alpha = None

    def envelope_x(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-((x / self.a) ** 2)).astype(complex)

    def ft_env_pow(self, n: int, K):
        K = np.asarray(K, dtype=float)
        return (self.a * np.sqrt(np.pi / n)) * np.exp(
            -((self.a * K) ** 2) / (4.0 * n)
        ).astype(complex)

    def env_abs_max(self) -> float:
        return 1.0

    def spectral_extent(self, rel_tol: float = 1e-9) -> float:
        return 2.0 * np.sqrt(np.log(1.0 / rel_tol)) / self.a

    def default_window(self) -> float:
        return 40.0 * self.a


class RotatedProfile(MediumProfile):
    """View of a base profile rotated about z so that direction e -> e_x.

    Tensors conjugate with the rotation; transverse momenta counter-rotate.
    """

    def __init__(self, base: MediumProfile, phi: float):
        self.base = base
        self.phi = float(phi)
        self.alpha = base.alpha
        self.slab = base.slab
        self.isotropic_nonmagnetic = base.isotropic_nonmagnetic
        c, s = np.cos(self.phi), np.sin(self.phi)
        # rotation taking old coordinates to new: new = R old
        self._R3 = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])

    def _back2(self, p2):
        p2 = np.asarray(p2, dtype=float)
        R = self._R3[:2, :2]
        return p2 @ R  # R^{-1} p = R^T p applied to row vectors

    def eval_eta(self, r):
        r = np.asarray(r, dtype=float)
        r_old = r @ self._R3  # R^{-1} r for row vectors
        ee, em = self.base.eval_eta(r_old)
        R = self._R3
        return R @ ee @ R.T, R @ em @ R.T

    def eta2_tensors(self, p2, z):
        ee, em = self.base.eta2_tensors(self._back2(p2), z)
        R = self._R3
        return R @ ee @ R.T, R @ em @ R.T

    def eta3_tensors(self, q3):
        q3 = np.asarray(q3)
        q_old = np.concatenate(
            [self._back2(np.real(q3[..., :2])), q3[..., 2:]], axis=-1
        )
        ee, em = self.base.eta3_tensors(q_old)
        R = self._R3
        return R @ ee @ R.T, R @ em @ R.T

    def recip33_ft2(self, p2, z, which):
        # 33-component is invariant under z-rotations
        return self.base.recip33_ft2(self._back2(p2), z, which)

    def recip33_ft3(self, q3, which):
        q3 = np.asarray(q3)
        q_old = np.concatenate(
            [self._back2(np.real(q3[..., :2])), q3[..., 2:]], axis=-1
        )
        return self.base.recip33_ft3(q_old, which)

    def scaled(self, sigma):
        return RotatedProfile(self.base.scaled(sigma), self.phi)

    def spectral_extent(self, rel_tol=1e-9):
        return self.base.spectral_extent(rel_tol)

    def default_window(self):
        return self.base.default_window()

    def sampling_box(self):
        (x0, x1), (y0, y1), zz = self.base.sampling_box()
        ext = max(abs(x0), abs(x1), abs(y0), abs(y1))
        return ((-ext, ext), (-ext, ext), zz)

    def eta3_peak(self):
        return self.base.eta3_peak()


def rotate_to_x(profile: MediumProfile, e) -> MediumProfile:
    """Rotate the profile about z so the unit vector e maps onto e_x."""
    e = np.asarray(e, dtype=float)
    if e.shape != (2,) or abs(np.linalg.norm(e) - 1.0) > 1e-9:
        raise ValueError("e must be a unit 2-vector in the x-y plane")
    phi = np.arctan2(e[1], e[0])
    if abs(phi) < 1e-15:
        return profile
    return RotatedProfile(profile, -phi)


# ---------------------------------------------------------------------------
# module-level operation wrappers


def eval_eta(profile: MediumProfile, r):
    """(eta_eps(r), eta_mu(r)) as 3x3 tensors; r may be batched (..., 3)."""
    return profile.eval_eta(r)


def fourier_eta_2d(profile: MediumProfile, p, z):
    """2D transverse Fourier transforms (eta_eps~, eta_mu~) at (p, z)."""
    return profile.eta2_tensors(p, z)


def fourier_eta_3d(profile: MediumProfile, q):
    """Full 3D Fourier transforms at q = (qx, qy, qz); qz may be complex."""
    return profile.eta3_tensors(q)


@dataclass(frozen=True)
class SupportReport:
    """Result of the one-sided-support scan of a profile's x-spectrum."""

    max_leak: float
    window: float
    margin: float
    threshold: float
    grid: tuple[int, int, int]
    tolerance: float
    verdict: str

    @property
    def compliant(self) -> bool:
        return self.verdict == "compliant"


def _tapered_line_ft(vals, x, sigma_w):
    """FT along the leading axis of centered samples with a Gaussian taper."""
    dx = x[1] - x[0]
    taper = np.exp(-(x**2) / (2.0 * sigma_w**2))
    f = vals * taper.reshape((-1,) + (1,) * (vals.ndim - 1))
    F = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(f, axes=0), axis=0), axes=0) * dx
    p = np.fft.fftshift(np.fft.fftfreq(x.size, dx)) * 2 * np.pi
    return p, F


def support_report(
    profile: MediumProfile,
    alpha: float,
    window: float | None = None,
    grid: tuple[int, int, int] = (512, 512, 64),
    tolerance: float = 1e-6,
    taper_sigmas: float = 6.5,
    margin_sigmas: float = 7.0,
    window_tol: float = 0.05,
) -> SupportReport:
    """Scan the windowed x-spectrum of eta for leakage at p_x <= alpha - margin.

    The window is multiplied by a Gaussian taper of width sigma_w =
    window/taper_sigmas before the FFT; the scan stops margin =
    margin_sigmas/sigma_w short of the threshold, since a finite-window
    measurement cannot localize spectral support below its own bandwidth.
    max_leak is reported relative to the global spectral peak.

    Raises WindowTooSmall when the untapered profile at the window edge is
    not negligible or when the grid cannot resolve the profile's spectrum
    without aliasing into the scan region.
    """
    nx, ny, nz = grid
    X = float(window) if window is not None else profile.default_window()
    sigma_w = X / taper_sigmas
    margin = margin_sigmas / sigma_w

    # Nyquist must clear the spectral extent, else tails alias into the scan.
    nyq = np.pi * nx / (2.0 * X)
    need = profile.spectral_extent(1e-9) + margin
    if window is None and nyq < need:
        nx = int(2 ** np.ceil(np.log2(need * 2.0 * X / np.pi)))
        nyq = np.pi * nx / (2.0 * X)
    if nyq < need:
        raise WindowTooSmall(
            f"grid nx={nx} gives Nyquist {nyq:.3g} < spectral extent {need:.3g}; "
            "increase nx or shrink the window"
        )

    (_, _), (y0, y1), (z0, z1) = profile.sampling_box()
    x = (np.arange(nx) - nx // 2) * (2.0 * X / nx)
    y = np.linspace(y0, y1, ny)
    zs = z0 + (np.arange(nz) + 0.5) * (z1 - z0) / nz

    # window-edge check on the raw profile
    redge = np.stack(
        np.broadcast_arrays(X, y[:, None], zs[None, :]), axis=-1
    ).reshape(-1, 3)
    ee_edge, em_edge = profile.eval_eta(redge)
    edge_mag = max(np.abs(ee_edge).max(), np.abs(em_edge).max())

    peak = 0.0
    leak = 0.0
    separable = profile.isotropic_nonmagnetic and hasattr(profile, "envelope_x")
    env_x = profile.envelope_x(x)[:, None] if separable else None
    for icomp in range(2):  # eps then mu
        # evaluate component-wise over z-chunks to bound memory
        for z_idx in range(nz):
            if separable:
                comps = (env_x * profile.footprint.value(y[None, :], zs[z_idx]))[
                    ..., None
                ]
            else:
                pts = np.stack(
                    np.broadcast_arrays(x[:, None], y[None, :], zs[z_idx]), axis=-1
                )
                ee, em = profile.eval_eta(pts.reshape(-1, 3))
                ten = (ee if icomp == 0 else em).reshape(nx, ny, 3, 3)
                if not np.any(ten):
                    continue
                comps = ten.reshape(nx, ny, 9)
            p, F = _tapered_line_ft(comps, x, sigma_w)
            mag = np.abs(F)
            peak = max(peak, float(mag.max()))
            scan = p <= alpha - margin
            if np.any(scan):
                leak = max(leak, float(mag[scan].max()))
        if profile.isotropic_nonmagnetic:
            break  # eta_mu = 0 identically for the built-in families

    max_leak = 0.0 if peak == 0.0 else leak / peak
    # position-space edge criterion
    ctr = np.stack(np.broadcast_arrays(0.0, 0.0, 0.5 * (z0 + z1)), axis=-1)
    ee0, em0 = profile.eval_eta(ctr.reshape(-1, 3))
    center_mag = max(np.abs(ee0).max(), np.abs(em0).max(), 1e-300)
    if edge_mag > window_tol * center_mag:
        raise WindowTooSmall(
            f"|eta| at the window edge is {edge_mag / center_mag:.3g} of its "
            f"central value (tolerance {window_tol:g})"
        )

    verdict = "compliant" if max_leak < tolerance else "noncompliant"
    return SupportReport(
        max_leak=max_leak,
        window=X,
        margin=margin,
        threshold=alpha,
        grid=(nx, ny, nz),
        tolerance=tolerance,
        verdict=verdict,
    )


@dataclass(frozen=True)
class BoundsReport:
    """Monte-Carlo bounds on the 33-components over the inhomogeneity."""

    m_eps: float
    M_eps: float
    m_mu: float
    M_mu: float
    samples: int

    @property
    def m(self) -> float:
        return min(self.m_eps, self.m_mu)

    @property
    def M(self) -> float:
        return max(self.M_eps, self.M_mu)

    @property
    def passed(self) -> bool:
        return self.m > 0.0


def bounds_check(profile: MediumProfile, sample_count: int = 20000, seed: int = 0):
    """Sample eps33 = 1 + eta_eps,33 and mu33 over the profile's region.

    Returns a BoundsReport with the empirical min of the real parts and max
    of the moduli; passed requires a strictly positive lower bound.
    """
    if sample_count <= 0:
        raise ValueError("sample_count must be positive")
    rng = np.random.default_rng(seed)
    (x0, x1), (y0, y1), (z0, z1) = profile.sampling_box()
    pts = np.column_stack(
        [
            rng.uniform(x0, x1, sample_count),
            rng.uniform(y0, y1, sample_count),
            rng.uniform(z0, z1, sample_count),
        ]
    )
    ee, em = profile.eval_eta(pts)
    eps33 = 1.0 + ee[..., 2, 2]
    mu33 = 1.0 + em[..., 2, 2]
    return BoundsReport(
        m_eps=float(np.real(eps33).min()),
        M_eps=float(np.abs(eps33).max()),
        m_mu=float(np.real(mu33).min()),
        M_mu=float(np.abs(mu33).max()),
        samples=sample_count,
    )


# ---------------------------------------------------------------------------
# JSON profile schema


def profile_from_dict(cfg: dict) -> MediumProfile:
    """Build a profile from its JSON description.

    Recognized types: "rational", "gausserf", "gaussian" (noncompliant
    control) and "sampled" (columnar binary grid, see bornexact.sampled).
    """
    try:
        kind = cfg["type"]
    except (KeyError, TypeError) as exc:
        raise ConfigError("medium config needs a 'type' field") from exc

    if kind == "sampled":
        from .sampled import SampledProfile

        return SampledProfile.load(cfg["path"], alpha=cfg.get("alpha"))

    try:
        fp = cfg["footprint"]
        if fp.get("type", "box") != "box":
            raise ConfigError(f"unknown footprint type {fp.get('type')!r}")
        zr, zi = fp["zeta"]
        box = TransverseBox(zeta=complex(zr, zi), ly=fp["ly"], lz=fp["lz"])
        slab = tuple(cfg["slab"]) if "slab" in cfg else None
        if kind == "rational":
            return RationalEnvelopeProfile(
                cfg["alpha"], cfg["a"], cfg.get("m_exp", 1), box, slab
            )
        if kind == "gausserf":
            return GaussErfProfile(cfg["alpha"], cfg["a"], box, slab)
        if kind == "gaussian":
            return GaussianControlProfile(cfg["a"], box, slab)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad medium config: {exc}") from exc
    raise ConfigError(f"unknown medium type {kind!r}")


def profile_to_dict(profile: MediumProfile) -> dict:
    """Inverse of profile_from_dict for the closed-form families."""
    if isinstance(profile, RationalEnvelopeProfile):
        kind = "rational"
    elif isinstance(profile, GaussErfProfile):
        kind = "gausserf"
    elif isinstance(profile, GaussianControlProfile):
        kind = "gaussian"
    else:
        raise ConfigError("only closed-form profiles round-trip through JSON")
    fp = profile.footprint
    out = {
        "type": kind,
        "a": profile.a,
        "footprint": {
            "type": "box",
            "zeta": [fp.zeta.real, fp.zeta.imag],
            "ly": fp.ly,
            "lz": fp.lz,
        },
        "slab": list(profile.slab),
    }
    if profile.alpha is not None:
        out["alpha"] = profile.alpha
    if isinstance(profile, RationalEnvelopeProfile):
        out["m_exp"] = profile.m_exp
    return out


def load_profile(path) -> MediumProfile:
    with open(path, "r", encoding="utf-8") as fh:
        return profile_from_dict(json.load(fh))


def reference_medium() -> RationalEnvelopeProfile:
    """The reference rational medium: zeta=0.01, m=1, a=2, ly=3, lz=4 (alpha=1)."""
    return RationalEnvelopeProfile(
        alpha=1.0, a=2.0, m_exp=1, footprint=TransverseBox(0.01, 3.0, 4.0)
    )
