"""Spectral-density models and the time-domain memory kernel.

A two-level emitter coupled to a structured environment is characterised by
its spectral density function (SDF) ``D(omega_r)``: a shape profile with
height ``Gamma = 2*pi*D0``, width ``lam``, centre ``omega0``, and an energy
offset between the atomic transition and the spectral centre expressed as
the dimensionless ratio ``c`` (offset ``E = c*lam``).

The decay amplitude obeys a Volterra equation whose kernel is the Fourier
transform of the SDF,

    F(u) = -i * integral D(omega_r) exp(-i*(omega_r - omega0 - E) u) domega_r ,

written here with the free atomic phase already removed.  Because every
supported SDF is stored as a dimensionless profile of ``(omega_r-omega0)/lam``,
the rescaled kernel

    g(x) = F(x/lam) / lam

depends only on ``x`` (and on ``Gamma``, ``c``, and the peak-split ratio ``b``
of the double-peak shape), never on ``lam`` itself.  That structure is what
makes the joint variable ``x = lam*tau`` the natural scaling parameter of
frequently interrupted decay, so ``g`` is the primary object here and the
physical kernel is recovered as ``F(u) = lam * g(lam*u)``.

Closed forms exist for the four named shapes; arbitrary tabulated profiles
are handled by numerical Fourier quadrature.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

__all__ = [
    "Shape",
    "KernelMode",
    "SpectralDensity",
    "MemoryKernel",
    "sdf_value",
    "kernel_value",
    "scaled_kernel_g",
    "load_tabulated_profile",
]


class Shape(enum.Enum):
    """Supported spectral-density shapes."""

    LORENTZIAN = "lorentzian"
    GAUSSIAN = "gaussian"
    RECTANGULAR = "rectangular"
    DOUBLE_LORENTZIAN = "double_lorentzian"
    TABULATED = "tabulated"


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """Parametrised spectral density ``D(omega_r)``.

    Parameters
    ----------
    shape : Shape
        Profile variant.
    gamma : float
        Coupling rate ``Gamma = 2*pi*D0`` (sets the spectral height
        ``D0 = gamma/(2*pi)``).  Must be positive.
    lam : float
        Spectral width ``lam`` (half-width for the Lorentzian peaks, standard
        deviation for the Gaussian, full bandwidth for the rectangle).  Must
        be positive.
    omega0 : float
        Spectral centre.
    c : float
        Detuning ratio; the transition-to-centre offset is ``E = c*lam``.
    b : float
        Peak-split ratio of the double-Lorentzian (peaks at ``omega0 +- b*lam``).
        Ignored by the other shapes.
    table : ndarray or None
        ``(n, 2)`` samples ``(omega_tilde, d_tilde)`` of the dimensionless
        profile ``D(omega_r) = D0 * d_tilde((omega_r-omega0)/lam)``, strictly
        increasing in the first column and nonnegative in the second.  The
        profile is linearly interpolated and zero outside the sampled range.
        Required for (and only for) the tabulated shape.
    """

    shape: Shape
    gamma: float
    lam: float
    omega0: float = 0.0
    c: float = 0.0
    b: float = 1.0
    table: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.b < 0:
            raise ValueError(f"b must be nonnegative, got {self.b}")
        if self.shape is Shape.TABULATED:
            if self.table is None:
                raise ValueError("tabulated shape requires a profile table")
            tab = np.atleast_2d(np.asarray(self.table, dtype=float))
            if tab.ndim != 2 or tab.shape[1] != 2 or tab.shape[0] < 2:
                raise ValueError("profile table must contain >= 2 rows of (omega_tilde, d_tilde)")
            if not np.all(np.diff(tab[:, 0]) > 0):
                raise ValueError("profile table abscissae must be strictly increasing")
            if np.any(tab[:, 1] < 0):
                raise ValueError("profile table values must be nonnegative")
            object.__setattr__(self, "table", tab)
        elif self.table is not None:
            raise ValueError(f"table is only meaningful for the tabulated shape, not {self.shape}")

    # -- convenience constructors ------------------------------------------

    @classmethod
    def lorentzian(cls, gamma, lam, omega0=0.0, c=0.0):
        return cls(Shape.LORENTZIAN, gamma, lam, omega0, c)

    @classmethod
    def gaussian(cls, gamma, lam, omega0=0.0, c=0.0):
        return cls(Shape.GAUSSIAN, gamma, lam, omega0, c)

    @classmethod
    def rectangular(cls, gamma, lam, omega0=0.0, c=0.0):
        return cls(Shape.RECTANGULAR, gamma, lam, omega0, c)

    @classmethod
    def double_lorentzian(cls, gamma, lam, omega0=0.0, c=0.0, b=1.0):
        return cls(Shape.DOUBLE_LORENTZIAN, gamma, lam, omega0, c, b)

    @classmethod
    def tabulated(cls, gamma, lam, table, omega0=0.0, c=0.0):
        return cls(Shape.TABULATED, gamma, lam, omega0, c, table=np.asarray(table, float))

    @property
    def d0(self) -> float:
        """Spectral height ``D0 = gamma / (2*pi)``."""
        return self.gamma / (2.0 * math.pi)

    @property
    def energy_offset(self) -> float:
        """Offset of the transition energy from the spectral centre, ``E = c*lam``."""
        return self.c * self.lam

    def with_width(self, lam: float) -> "SpectralDensity":
        """Same dimensionless profile deformed to a new width ``lam``."""
        return SpectralDensity(self.shape, self.gamma, lam, self.omega0, self.c,
                               self.b, self.table)


class KernelMode(enum.Enum):
    ANALYTIC = "analytic"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class MemoryKernel:
    """Evaluator of the memory kernel of one spectral density.

    ``mode`` selects between the closed-form kernels of the four named shapes
    and numerical Fourier quadrature of the profile.  Tabulated densities
    only support quadrature.  Compact-support profiles (rectangular,
    tabulated) are integrated by a composite Simpson rule with ``n_panels``
    panels over their exact support; infinite-support profiles by adaptive
    Fourier quadrature over the whole frequency axis.  ``window`` (in units
    of ``lam``) optionally truncates the latter to ``|omega_tilde| <= window``
    -- the slowly decaying Lorentzian tails make any fixed cutoff lose
    several per cent of the kernel, so the untruncated default is what meets
    the analytic kernels to high accuracy.
    """

    density: SpectralDensity
    mode: KernelMode = None  # type: ignore[assignment]
    window: float | None = None
    n_panels: int = 8192

    def __post_init__(self):
        if self.mode is None:
            mode = (KernelMode.QUADRATURE if self.density.shape is Shape.TABULATED
                    else KernelMode.ANALYTIC)
            object.__setattr__(self, "mode", mode)
        elif isinstance(self.mode, str):
            object.__setattr__(self, "mode", KernelMode(self.mode))
        if self.mode is KernelMode.ANALYTIC and self.density.shape is Shape.TABULATED:
            raise ValueError("tabulated densities have no analytic kernel; use quadrature mode")
        if self.window is not None and not self.window > 0:
            raise ValueError(f"window must be positive, got {self.window}")
        if self.n_panels < 2:
            raise ValueError(f"n_panels must be >= 2, got {self.n_panels}")
        if self.n_panels % 2:
            object.__setattr__(self, "n_panels", self.n_panels + 1)


def load_tabulated_profile(path) -> np.ndarray:
    """Read a dimensionless SDF profile from a two-column text file.

    The format is a header line ``omega_tilde,d_tilde`` followed by
    comma-separated float rows with strictly increasing first column.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if [col.strip() for col in header.split(",")] != ["omega_tilde", "d_tilde"]:
            raise ValueError(f"expected header 'omega_tilde,d_tilde', got {header!r}")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected two comma-separated values")
            rows.append((float(parts[0]), float(parts[1])))
    if len(rows) < 2:
        raise ValueError("profile file must contain at least two samples")
    return np.asarray(rows, dtype=float)


def _profile(density: SpectralDensity, w):
    """Dimensionless profile ``d_tilde(w)`` with ``w = (omega_r - omega0)/lam``."""
    w = np.asarray(w, dtype=float)
    shape = density.shape
    if shape is Shape.LORENTZIAN:
        return 1.0 / (1.0 + w * w)
    if shape is Shape.GAUSSIAN:
        return np.exp(-0.5 * w * w)
    if shape is Shape.RECTANGULAR:
        return np.where(np.abs(w) <= 0.5, 1.0, 0.0)
    if shape is Shape.DOUBLE_LORENTZIAN:
        b = density.b
        return 1.0 / (1.0 + (w - b) ** 2) + 1.0 / (1.0 + (w + b) ** 2)
    tab = density.table
    return np.interp(w, tab[:, 0], tab[:, 1], left=0.0, right=0.0)


def sdf_value(density: SpectralDensity, omega_r):
    """Spectral density ``D(omega_r)``; accepts scalars or arrays."""
    w = (np.asarray(omega_r, dtype=float) - density.omega0) / density.lam
    out = density.d0 * _profile(density, w)
    return float(out) if np.isscalar(omega_r) else out


def _g_analytic(density: SpectralDensity, x):
    gamma, c = density.gamma, density.c
    phase = np.exp(1j * c * x)
    shape = density.shape
    if shape is Shape.LORENTZIAN:
        return -0.5j * gamma * phase * np.exp(-x)
    if shape is Shape.GAUSSIAN:
        return -1j * gamma / math.sqrt(2.0 * math.pi) * phase * np.exp(-0.5 * x * x)
    if shape is Shape.RECTANGULAR:
        # sin(x/2)/x = (1/2) sinc(x/(2 pi)); finite x -> 0 limit Gamma/(2 pi)
        return -1j * gamma / math.pi * phase * 0.5 * np.sinc(x / (2.0 * math.pi))
    if shape is Shape.DOUBLE_LORENTZIAN:
        return -1j * gamma * phase * np.exp(-x) * np.cos(density.b * x)
    raise ValueError(f"no analytic kernel for shape {shape}")


def _g_quadrature_scalar(kernel: MemoryKernel, x: float) -> complex:
    density = kernel.density
    d0, c = density.d0, density.c
    shape = density.shape

    if shape in (Shape.RECTANGULAR, Shape.TABULATED):
        # Compact support: composite Simpson over the exact support.
        if shape is Shape.RECTANGULAR:
            lo, hi = -0.5, 0.5
        else:
            lo, hi = density.table[0, 0], density.table[-1, 0]
        nodes = np.linspace(lo, hi, kernel.n_panels + 1)
        h = (hi - lo) / kernel.n_panels
        weights = np.full(kernel.n_panels + 1, 2.0)
        weights[1:-1:2] = 4.0
        weights[0] = weights[-1] = 1.0
        integrand = _profile(density, nodes) * np.exp(-1j * (nodes - c) * x)
        integral = (h / 3.0) * np.dot(weights, integrand)
        return complex(-1j * d0 * integral)

    # Infinite support (all even profiles): adaptive Fourier quadrature of
    # 2 * integral d_tilde(w) cos(w x) dw over the positive half-axis.
    f = lambda w: float(_profile(density, w))
    upper = np.inf if kernel.window is None else kernel.window
    if x == 0.0:
        val, _ = quad(f, 0.0, upper, limit=200)
    else:
        val, _ = quad(f, 0.0, upper, weight="cos", wvar=x, limlst=200, limit=200)
    return complex(-1j * d0 * 2.0 * val * np.exp(1j * c * x))


def scaled_kernel_g(kernel: MemoryKernel, x):
    """Rescaled memory kernel ``g(x) = F(x/lam)/lam``.

    Independent of ``kernel.density.lam`` by construction: only ``gamma``,
    ``c``, ``b``, and the dimensionless profile enter.  Accepts scalars or
    arrays of ``x >= 0``.
    """
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0):
        raise ValueError("x must be nonnegative")
    if kernel.mode is KernelMode.ANALYTIC:
        out = _g_analytic(kernel.density, xs)
    else:
        out = np.asarray([_g_quadrature_scalar(kernel, float(xi)) for xi in np.atleast_1d(xs)],
                         dtype=complex).reshape(xs.shape)
    return complex(out) if np.isscalar(x) else out


def kernel_value(kernel: MemoryKernel, u):
    """Memory kernel ``F(u) = lam * g(lam*u)`` for times ``u >= 0``."""
    us = np.asarray(u, dtype=float)
    if np.any(us < 0):
        raise ValueError("u must be nonnegative")
    lam = kernel.density.lam
    out = lam * scaled_kernel_g(kernel, lam * us)
    return complex(out) if np.isscalar(u) else out
