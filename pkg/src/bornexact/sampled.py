"""Sampled tensor profiles on regular grids, with a columnar binary format.

File layout (little-endian throughout):

    magic    8 bytes   b"ETAGRID1"
    nx,ny,nz 3 x int64
    x0,y0,z0 3 x float64   coordinates of grid node [0,0,0]
    dx,dy,dz 3 x float64   grid spacings
    has_mu   int64         0 or 1
    data     float64, C-order: eta_eps as [nx,ny,nz,3,3,2] (re,im pairs),
             followed by eta_mu in the same layout when has_mu = 1.

Compliance of a sampled profile is never assumed; it is measured by
support_report.  Fourier transforms are windowed FFTs of the grid data with
multilinear interpolation in momentum.
"""

from __future__ import annotations

import struct

import numpy as np

from .medium import MediumProfile

_MAGIC = b"ETAGRID1"
_HEADER = struct.Struct("<8s3q6dq")


def write_grid(path, eta_eps, origin, spacing, eta_mu=None):
    """Write sampled tensors to the columnar binary format.

    eta_eps (and eta_mu when given) must have shape (nx, ny, nz, 3, 3).
    """
    eta_eps = np.ascontiguousarray(eta_eps, dtype=complex)
    nx, ny, nz = eta_eps.shape[:3]
    if eta_eps.shape != (nx, ny, nz, 3, 3):
        raise ValueError("eta_eps must have shape (nx, ny, nz, 3, 3)")
    has_mu = eta_mu is not None
    with open(path, "wb") as fh:
        fh.write(
            _HEADER.pack(
                _MAGIC, nx, ny, nz, *map(float, origin), *map(float, spacing),
                int(has_mu),
            )
        )
        buf = np.empty(eta_eps.shape + (2,), dtype="<f8")
        buf[..., 0], buf[..., 1] = eta_eps.real, eta_eps.imag
        fh.write(buf.tobytes())
        if has_mu:
            eta_mu = np.ascontiguousarray(eta_mu, dtype=complex)
            buf[..., 0], buf[..., 1] = eta_mu.real, eta_mu.imag
            fh.write(buf.tobytes())


def read_grid(path):
    """Read a grid file; returns (eta_eps, eta_mu_or_None, origin, spacing)."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        magic, nx, ny, nz, x0, y0, z0, dx, dy, dz, has_mu = _HEADER.unpack(head)
        if magic != _MAGIC:
            raise ValueError(f"not an ETAGRID1 file: {path}")
        count = nx * ny * nz * 18
        raw = np.frombuffer(fh.read(count * 8), dtype="<f8").reshape(
            nx, ny, nz, 3, 3, 2
        )
        ee = raw[..., 0] + 1j * raw[..., 1]
        em = None
        if has_mu:
            raw = np.frombuffer(fh.read(count * 8), dtype="<f8").reshape(
                nx, ny, nz, 3, 3, 2
            )
            em = raw[..., 0] + 1j * raw[..., 1]
    return ee, em, (x0, y0, z0), (dx, dy, dz)


def _interp_axis(coords, x0, dx, n):
    """Clamped linear-interpolation indices/weights along one axis."""
    t = (np.asarray(coords, dtype=float) - x0) / dx
    i0 = np.floor(t).astype(int)
    frac = t - i0
    inside = (t >= -0.5) & (t <= n - 0.5)
    i0c = np.clip(i0, 0, n - 2)
    frac = np.clip(np.where(i0 == i0c, frac, np.where(i0 < 0, 0.0, 1.0)), 0.0, 1.0)
    return i0c, frac, inside


class SampledProfile(MediumProfile):
    """Tensor-valued medium ingested as a regular grid plus declared slab."""

    isotropic_nonmagnetic = False

    def __init__(self, eta_eps, eta_mu, origin, spacing, alpha=None, slab=None):
        self.ee = np.asarray(eta_eps, dtype=complex)
        nx, ny, nz = self.ee.shape[:3]
        self.em = (
            np.asarray(eta_mu, dtype=complex)
            if eta_mu is not None
            else np.zeros_like(self.ee)
        )
        self.origin = tuple(map(float, origin))
        self.spacing = tuple(map(float, spacing))
        self.alpha = alpha
        z_lo = self.origin[2]
        z_hi = self.origin[2] + (nz - 1) * self.spacing[2]
        self.slab = tuple(slab) if slab is not None else (z_lo, z_hi)
        self._ft2_cache = None
        self._ft3_cache = None
        self._recip_cache = {}

    @classmethod
    def load(cls, path, alpha=None, slab=None):
        ee, em, origin, spacing = read_grid(path)
        return cls(ee, em, origin, spacing, alpha=alpha, slab=slab)

    def save(self, path):
        write_grid(path, self.ee, self.origin, self.spacing, self.em)

    # -- position space ----------------------------------------------------
    def _trilinear(self, data, r):
        r = np.asarray(r, dtype=float)
        nx, ny, nz = data.shape[:3]
        ix, fx, okx = _interp_axis(r[..., 0], self.origin[0], self.spacing[0], nx)
        iy, fy, oky = _interp_axis(r[..., 1], self.origin[1], self.spacing[1], ny)
        iz, fz, okz = _interp_axis(r[..., 2], self.origin[2], self.spacing[2], nz)
        out = np.zeros(r.shape[:-1] + (3, 3), dtype=complex)
        for bx in (0, 1):
            for by in (0, 1):
                for bz in (0, 1):
                    w = (
                        (fx if bx else 1 - fx)
                        * (fy if by else 1 - fy)
                        * (fz if bz else 1 - fz)
                    )
                    out += w[..., None, None] * data[ix + bx, iy + by, iz + bz]
        out *= (okx & oky & okz)[..., None, None]
        return out

    def eval_eta(self, r):
        return self._trilinear(self.ee, r), self._trilinear(self.em, r)

    # -- momentum space ------------------------------------------------------
    def _ft2(self):
        """Cached per-z-slice 2D transforms of both tensors."""
        if self._ft2_cache is None:
            nx, ny = self.ee.shape[:2]
            dx, dy = self.spacing[:2]
            x = self.origin[0] + np.arange(nx) * dx
            y = self.origin[1] + np.arange(ny) * dy
            px = np.fft.fftshift(np.fft.fftfreq(nx, dx)) * 2 * np.pi
            py = np.fft.fftshift(np.fft.fftfreq(ny, dy)) * 2 * np.pi
            phase = np.exp(-1j * px[:, None] * x[0]) * np.exp(
                -1j * py[None, :] * y[0]
            )

            def tf(data):
                F = np.fft.fft2(data, axes=(0, 1))
                F = np.fft.fftshift(F, axes=(0, 1))
                return F * (dx * dy) * phase[:, :, None, None, None]

            self._ft2_cache = (px, py, tf(self.ee), tf(self.em))
        return self._ft2_cache

    def _interp_p2(self, px, py, F, p2):
        p2 = np.asarray(p2, dtype=float)
        ix, fx, okx = _interp_axis(p2[..., 0], px[0], px[1] - px[0], px.size)
        iy, fy, oky = _interp_axis(p2[..., 1], py[0], py[1] - py[0], py.size)
        out = np.zeros(p2.shape[:-1] + F.shape[2:], dtype=complex)
        for bx in (0, 1):
            for by in (0, 1):
                w = (fx if bx else 1 - fx) * (fy if by else 1 - fy)
                out += w.reshape(w.shape + (1,) * (out.ndim - w.ndim)) * F[
                    ix + bx, iy + by
                ]
        out *= (okx & oky).reshape(okx.shape + (1,) * (out.ndim - okx.ndim))
        return out

    def _zslice_index(self, z):
        nz = self.ee.shape[2]
        iz = np.rint((np.asarray(z, dtype=float) - self.origin[2]) / self.spacing[2])
        return np.clip(iz.astype(int), 0, nz - 1), (iz >= 0) & (iz <= nz - 1)

    def eta2_tensors(self, p2, z):
        px, py, Fe, Fm = self._ft2()
        iz, ok = self._zslice_index(z)
        e = self._interp_p2(px, py, Fe[:, :, iz], p2)
        m = self._interp_p2(px, py, Fm[:, :, iz], p2)
        mask = np.asarray(ok)[..., None, None]
        return e * mask, m * mask

    def eta3_tensors(self, q3):
        # z-transform of the per-slice 2D data by direct summation so that
        # complex q_z (evanescent channels) is supported.
        q3 = np.asarray(q3)
        px, py, Fe, Fm = self._ft2()
        dz = self.spacing[2]
        z = self.origin[2] + np.arange(self.ee.shape[2]) * dz
        w = np.exp(-1j * np.multiply.outer(q3[..., 2], z)) * dz
        e2 = self._interp_p2(px, py, Fe, np.real(q3[..., :2]))
        m2 = self._interp_p2(px, py, Fm, np.real(q3[..., :2]))
        e = np.einsum("...z,...zij->...ij", w, e2)
        m = np.einsum("...z,...zij->...ij", w, m2)
        return e, m

    # -- reciprocal symbols ---------------------------------------------------
    def _recip_grid(self, which):
        if which not in self._recip_cache:
            comp = self.ee[..., 2, 2] if which == "eps" else self.em[..., 2, 2]
            self._recip_cache[which] = 1.0 / (1.0 + comp) - 1.0
        return self._recip_cache[which]

    def _recip_ft2_full(self, which):
        key = which + "_ft2"
        if key not in self._recip_cache:
            g = self._recip_grid(which)
            nx, ny = g.shape[:2]
            dx, dy = self.spacing[:2]
            x0, y0 = self.origin[:2]
            px = np.fft.fftshift(np.fft.fftfreq(nx, dx)) * 2 * np.pi
            py = np.fft.fftshift(np.fft.fftfreq(ny, dy)) * 2 * np.pi
            F = np.fft.fftshift(np.fft.fft2(g, axes=(0, 1)), axes=(0, 1)) * (dx * dy)
            F = F * np.exp(-1j * px[:, None, None] * x0) * np.exp(
                -1j * py[None, :, None] * y0
            )
            self._recip_cache[key] = (px, py, F)
        return self._recip_cache[key]

    def recip33_ft2(self, p2, z, which):
        px, py, F = self._recip_ft2_full(which)
        iz, ok = self._zslice_index(z)
        out = self._interp_p2(px, py, F[:, :, iz], p2)
        return out * np.asarray(ok)

    def recip33_ft3(self, q3, which):
        q3 = np.asarray(q3)
        px, py, F = self._recip_ft2_full(which)
        dz = self.spacing[2]
        z = self.origin[2] + np.arange(self.ee.shape[2]) * dz
        w = np.exp(-1j * np.multiply.outer(q3[..., 2], z)) * dz
        g2 = self._interp_p2(px, py, F, np.real(q3[..., :2]))
        return np.einsum("...z,...z->...", w, g2)

    # -- metadata ----------------------------------------------------------
    def scaled(self, sigma):
        return SampledProfile(
            sigma * self.ee,
            sigma * self.em,
            self.origin,
            self.spacing,
            alpha=self.alpha,
            slab=self.slab,
        )

    def spectral_extent(self, rel_tol=1e-9):
        return np.pi / self.spacing[0]

    def default_window(self):
        nx = self.ee.shape[0]
        return 0.5 * nx * self.spacing[0]

    def sampling_box(self):
        nx, ny, nz = self.ee.shape[:3]
        x0, y0, z0 = self.origin
        dx, dy, dz = self.spacing
        return (
            (x0, x0 + (nx - 1) * dx),
            (y0, y0 + (ny - 1) * dy),
            (z0, z0 + (nz - 1) * dz),
        )

    def eta3_peak(self):
        px, py, Fe, Fm = self._ft2()
        dz = self.spacing[2]
        acc = np.abs(Fe.sum(axis=2) * dz).max()
        if np.any(self.em):
            acc = max(acc, np.abs(Fm.sum(axis=2) * dz).max())
        return float(acc)


def sample_profile(profile, shape, origin, spacing, alpha=None):
    """Evaluate any profile onto a regular grid as a SampledProfile."""
    nx, ny, nz = shape
    x = origin[0] + np.arange(nx) * spacing[0]
    y = origin[1] + np.arange(ny) * spacing[1]
    z = origin[2] + np.arange(nz) * spacing[2]
    pts = np.stack(np.meshgrid(x, y, z, indexing="ij"), axis=-1)
    ee, em = profile.eval_eta(pts.reshape(-1, 3))
    return SampledProfile(
        ee.reshape(nx, ny, nz, 3, 3),
        em.reshape(nx, ny, nz, 3, 3),
        origin,
        spacing,
        alpha=alpha,
        slab=profile.slab,
    )
