"""Bergman kernel densities on the diagonal.

The density is always the coefficient with respect to Lebesgue measure in
the ambient chart, with the L^2 inner product ``int f conj(g) dV``.  Three
routes are provided:

* closed forms for the disk, ball, polydisc, upper half-plane and products;
* the monomial series ``sum |z^a|^2 / ||z^a||^2`` on Reinhardt domains,
  where monomials are mutually orthogonal;
* a Gram-matrix method for any bounded domain: assemble the monomial Gram
  matrix by Monte Carlo or tensor quadrature, Cholesky-factor it and sum
  ``|phi_k(z)|^2`` over the induced orthonormal family.  Truncation to a
  finite basis makes this a lower bound up to estimation error.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import solve_triangular

from . import gauge as G
from . import geometry as geo
from . import sampling
from .reports import CheckReport, ReportBuilder

METHODS = ("exact", "reinhardt-series", "gram")

_EPS = 2.0 ** -52


class KernelError(ValueError):
    pass


class GramDegreeError(KernelError):
    """The Gram matrix is numerically singular at the requested degree."""

    def __init__(self, requested: int, usable: int):
        self.requested = requested
        self.usable = usable
        super().__init__(f"Gram matrix singular at degree {requested}; "
                         f"largest usable degree is {usable}")


@dataclass(frozen=True)
class KernelValue:
    density: float
    method: str
    degree: int
    err_est: float
    std_error: float = 0.0

    def __post_init__(self):
        for name in ("density", "err_est", "std_error"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.method not in METHODS:
            raise KernelError(f"unknown kernel method {self.method!r}")
        if not self.density > 0:
            raise KernelError("kernel density must be positive")
        if (self.err_est == 0) != (self.method == "exact"):
            raise KernelError("err_est vanishes exactly for closed-form values")


def _require_inside(spec, z) -> np.ndarray:
    pt = geo.as_point(z, spec.dim)
    if not geo.contains(spec, pt):
        raise KernelError(f"point {pt.tolist()} is not inside the {geo.kind_of(spec)} domain")
    return pt


# ---------------------------------------------------------------- closed forms


def _exact_density(spec, pt: np.ndarray) -> float:
    if isinstance(spec, geo.Disk):
        r2 = spec.radius ** 2
        return r2 / (math.pi * (r2 - abs(pt[0]) ** 2) ** 2)
    if isinstance(spec, geo.Ball):
        n, rho = spec.n, spec.radius
        t = 1.0 - float(np.vdot(pt, pt).real) / rho ** 2
        return math.factorial(n) / math.pi ** n / rho ** (2 * n) * t ** (-(n + 1))
    if isinstance(spec, geo.Polydisc):
        return math.prod(_exact_density(geo.Disk(r), pt[j:j + 1]) for j, r in enumerate(spec.radii))
    if isinstance(spec, geo.HalfPlane):
        return 1.0 / (4.0 * math.pi * pt[0].imag ** 2)
    if isinstance(spec, geo.Product):
        k = spec.first.dim
        return _exact_density(spec.first, pt[:k]) * _exact_density(spec.second, pt[k:])
    raise KernelError(f"no closed-form kernel for {geo.kind_of(spec)} domain")


def has_exact_kernel(spec) -> bool:
    spec = geo.canonicalize(spec)
    if isinstance(spec, geo.Product):
        return has_exact_kernel(spec.first) and has_exact_kernel(spec.second)
    return not isinstance(spec, geo.Balanced)


def exact_kernel(spec, z) -> KernelValue:
    spec = geo.canonicalize(spec)
    pt = _require_inside(spec, z)
    return KernelValue(_exact_density(spec, pt), "exact", 0, 0.0)


# ---------------------------------------------------------------- Reinhardt series


def multi_indices(dim: int, max_degree: int) -> np.ndarray:
    """All multi-indices of total degree <= max_degree, ordered by degree."""
    rows = []
    for d in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(dim), d):
            alpha = [0] * dim
            for j in combo:
                alpha[j] += 1
            rows.append(alpha)
    return np.array(rows, dtype=int).reshape(-1, dim)


def _monomials(pt: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    return np.prod(pt[None, :] ** alphas, axis=1)


@functools.lru_cache(maxsize=64)
def _cached_moments(g, dim: int, max_degree: int):
    alphas = multi_indices(dim, max_degree)
    vals, errs = geo.reinhardt_moments(g, dim, alphas)
    return alphas, vals, errs


def reinhardt_kernel(spec, z, max_degree: int = 20) -> KernelValue:
    """Partial sum of the orthogonal monomial series up to total degree ``max_degree``.

    ``err_est`` is a geometric extrapolation of the tail from the last two
    degree shells plus the propagated moment quadrature error.
    """
    if max_degree < 0:
        raise KernelError("max_degree must be nonnegative")
    if not geo.has_gauge(spec):
        raise KernelError(f"{geo.kind_of(spec)} domain is not a complete Reinhardt domain")
    pt = _require_inside(spec, z)
    g = geo.canonical_gauge(spec)
    alphas, c, c_err = _cached_moments(g, spec.dim, max_degree)
    if not (np.all(np.isfinite(c)) and np.all(c > 0)):
        raise KernelError("monomial norm quadrature failed")
    terms = np.abs(_monomials(pt, alphas)) ** 2 / c
    degrees = alphas.sum(axis=1)
    shells = np.bincount(degrees, weights=terms, minlength=max_degree + 1)
    density = float(terms.sum())
    last = shells[max_degree]
    if last == 0.0:
        tail = 0.0
    elif max_degree == 0 or shells[max_degree - 1] == 0.0:
        tail = math.inf
    else:
        q = last / shells[max_degree - 1]
        tail = last * q / (1.0 - q) if q < 1.0 else math.inf
    quad = float(np.sum(terms * c_err / c))
    err = max(tail + quad, _EPS * density)
    return KernelValue(density, "reinhardt-series", max_degree, err)


# ---------------------------------------------------------------- Gram method


@dataclass(frozen=True)
class QuadSpec:
    """How to assemble the Gram matrix: ``mc`` (``samples``, ``seed``) or ``tensor`` (``order`` per real axis)."""
    method: str = "mc"
    samples: int = 1_000_000
    seed: int = 0
    order: int = 48

    def __post_init__(self):
        if self.method not in ("mc", "tensor"):
            raise KernelError(f"unknown Gram quadrature {self.method!r}")
        if self.samples <= 0 or self.order < 2:
            raise KernelError("quadrature size must be positive")


@dataclass(frozen=True)
class GramFactor:
    """Cholesky factor of the diagonally normalized Gram matrix of scaled monomials.

    Basis functions are ``(z / scale)^alpha``; ``factor @ factor^H`` equals
    ``D^-1/2 G D^-1/2`` with ``D = diag(G)``.
    """
    basis: tuple[tuple[int, ...], ...]
    factor: np.ndarray
    diag: np.ndarray
    scale: float
    residual: float
    batch_factors: tuple
    quad_error_factor: "GramFactor | None" = None

    @property
    def degree(self) -> int:
        return max(sum(a) for a in self.basis)

    def _solve(self, z: np.ndarray) -> np.ndarray:
        alphas = np.array(self.basis)
        v = _monomials(z / self.scale, alphas) / np.sqrt(self.diag)
        return solve_triangular(self.factor, v, lower=True)

    def density(self, z) -> float:
        return float(np.sum(np.abs(self._solve(geo.as_point(z))) ** 2))

    def shell_contribution(self, z) -> float:
        """Increase of the density from the top-degree basis elements."""
        y = self._solve(geo.as_point(z))
        top = np.array([sum(a) == self.degree for a in self.basis])
        return float(np.sum(np.abs(y[top]) ** 2))

    def sampling_error(self, z) -> float:
        if self.quad_error_factor is not None:
            return abs(self.density(z) - self.quad_error_factor.density(z))
        vals = [f.density(z) for f in self.batch_factors]
        if len(vals) < 2:
            return math.inf
        return float(np.std(vals, ddof=1) / math.sqrt(len(vals)))


def _factorize(gram: np.ndarray, alphas: np.ndarray, requested: int):
    # Returns (L, diag, residual) or raises GramDegreeError with the usable degree.
    degrees = alphas.sum(axis=1)

    def attempt(m: int):
        block = gram[:m, :m]
        diag = np.real(np.diag(block)).copy()
        if np.any(diag <= 0) or not np.all(np.isfinite(block)):
            return None
        d = 1.0 / np.sqrt(diag)
        normed = block * d[:, None] * d[None, :]
        normed = 0.5 * (normed + normed.conj().T)
        try:
            L = np.linalg.cholesky(normed)
        except np.linalg.LinAlgError:
            return None
        if np.min(np.real(np.diag(L))) ** 2 < 1e-10:
            return None
        resid = float(np.linalg.norm(L @ L.conj().T - normed) / np.linalg.norm(normed))
        if resid > 1e-10:
            return None
        return L, diag, resid

    res = attempt(len(alphas))
    if res is not None:
        return res
    for d in range(requested - 1, -1, -1):
        if attempt(int(np.sum(degrees <= d))) is not None:
            raise GramDegreeError(requested, d)
    raise GramDegreeError(requested, -1)


def _assemble_mc(spec, alphas, scale, quad: QuadSpec, n_batches: int = 16):
    dim = spec.dim
    half = 1.01 * geo.outer_radius(spec)
    box = (2 * half) ** (2 * dim)
    chunk = 1 << 14

    def accumulate(rng, size, _):
        x = rng.uniform(-half, half, (size, 2 * dim))
        z = x[:, :dim] + 1j * x[:, dim:]
        z = z[geo.contains_many(spec, z)]
        B = np.prod((z / scale)[:, None, :] ** alphas[None, :, :], axis=2)
        return B.T @ B.conj()

    parts = sampling.map_chunks(accumulate, quad.samples, quad.seed, sampling.STREAM_GRAM, chunk_size=chunk)
    sizes = sampling.chunk_sizes(quad.samples, chunk)
    nb = min(n_batches, len(parts))
    batches, counts = [], []
    for b in range(nb):
        idx = range(b, len(parts), nb)
        batches.append(sum(parts[i] for i in idx))
        counts.append(sum(sizes[i] for i in idx))
    full = sum(batches) * (box / quad.samples)
    batch_grams = [gb * (box / cb) for gb, cb in zip(batches, counts)] if nb >= 2 else []
    return full, batch_grams


def _assemble_tensor(spec, alphas, scale, order: int):
    """Product rule in polar coordinates ``z_j = rho r_j e^{i theta_j}``.

    The radius uses Gauss-Legendre with enough nodes to be exact for the
    polynomial radial integrands, each phase uses the trapezoid rule with
    ``2d + 1`` points (exact for the trigonometric integrands), and the
    positive-orthant sphere uses a composite Gauss-Legendre grid with about
    ``order`` nodes per angle.  The phase sums factor out of the discrete
    sum, which keeps the cost independent of the number of phase points.
    """
    dim = spec.dim
    g = geo.canonical_gauge(spec)
    d = int(alphas.sum(axis=1).max())
    if dim == 1:
        om, w_om = np.ones((1, 1)), np.ones(1)
    else:
        om, w_om = geo._hyperspherical_grid(dim, max(1, order // 8))
    rmax = 1.0 / G.evaluate_moduli(g, om)
    xr, wr = leggauss(d + dim + 1)
    t, wt = 0.5 * (xr + 1), 0.5 * wr
    # moduli s = rho * r with rho = rmax * t; dV = rho^(2N-1) drho prod r_j dsigma(r) prod dtheta_j
    s = (rmax[:, None, None] * t[None, :, None]) * om[:, None, :]
    W = (w_om * np.prod(om, axis=1) * rmax ** (2 * dim))[:, None] * (t ** (2 * dim - 1) * wt)[None, :]
    s, W = s.reshape(-1, dim) / scale, W.ravel()
    Bm = np.prod(s[:, None, :] ** alphas[None, :, :], axis=2)
    radial = (Bm * W[:, None]).T @ Bm
    M = 2 * d + 1
    diff = alphas[:, None, :] - alphas[None, :, :]
    phase = np.prod(np.where(diff % M == 0, 2 * math.pi, 0.0), axis=2)
    return (radial * phase).astype(complex)


def _build(spec, alphas, scale, gram, max_degree, batch_grams=(), quad_error_factor=None):
    L, diag, resid = _factorize(gram, alphas, max_degree)
    batch_factors = []
    for gb in batch_grams:
        try:
            Lb, db, rb = _factorize(gb, alphas, max_degree)
        except GramDegreeError:
            continue
        batch_factors.append(GramFactor(tuple(map(tuple, alphas.tolist())), Lb, db, scale, rb, ()))
    L.setflags(write=False)
    diag.setflags(write=False)
    return GramFactor(tuple(map(tuple, alphas.tolist())), L, diag, scale, resid,
                      tuple(batch_factors), quad_error_factor)


@functools.lru_cache(maxsize=32)
def build_gram_factor(spec, max_degree: int, quad: QuadSpec = QuadSpec()) -> GramFactor:
    """Assemble and factor the monomial Gram matrix up to ``max_degree``."""
    if max_degree < 0:
        raise KernelError("max_degree must be nonnegative")
    if not geo.is_bounded(spec):
        raise KernelError("the Gram method needs a bounded domain")
    alphas = multi_indices(spec.dim, max_degree)
    scale = geo.outer_radius(spec)
    if quad.method == "mc":
        gram, batch_grams = _assemble_mc(spec, alphas, scale, quad)
        return _build(spec, alphas, scale, gram, max_degree, batch_grams)
    gram = _assemble_tensor(spec, alphas, scale, quad.order)
    coarse_gram = _assemble_tensor(spec, alphas, scale, max(2, quad.order // 2))
    coarse = _build(spec, alphas, scale, coarse_gram, max_degree)
    return _build(spec, alphas, scale, gram, max_degree, quad_error_factor=coarse)


def gram_kernel(spec, z, max_degree: int = 6, quad: QuadSpec = QuadSpec()) -> KernelValue:
    pt = _require_inside(spec, z)
    fac = build_gram_factor(spec, max_degree, quad)
    density = fac.density(pt)
    sigma = fac.sampling_error(pt)
    shell = fac.shell_contribution(pt) if max_degree > 0 else 0.0
    err = max(math.hypot(sigma, shell), _EPS * density)
    return KernelValue(density, "gram", max_degree, err, std_error=sigma)


def kernel_density(spec, z, method: str = "auto", degree: int | None = None,
                   quad: QuadSpec = QuadSpec()) -> KernelValue:
    """Dispatch to ``exact``, ``reinhardt``, ``gram`` or ``auto`` (first that applies)."""
    if method == "auto":
        method = "exact" if has_exact_kernel(spec) else "reinhardt" if geo.has_gauge(spec) else "gram"
    if method == "exact":
        return exact_kernel(spec, z)
    if method in ("reinhardt", "reinhardt-series"):
        return reinhardt_kernel(spec, z, 20 if degree is None else degree)
    if method == "gram":
        return gram_kernel(spec, z, 6 if degree is None else degree, quad)
    raise KernelError(f"unknown kernel method {method!r}")


# ---------------------------------------------------------------- checks

MAPS = ("identity", "disk-automorphism", "cayley", "affine")


def _biholomorphism(name: str, source, param):
    """Return (target, F, det F') for a named map."""
    if name == "identity":
        return source, (lambda z: z), (lambda z: 1.0)
    if name == "disk-automorphism":
        a = complex(param if param is not None else 0.5)
        if not isinstance(source, geo.Disk) or source.radius != 1.0 or abs(a) >= 1:
            raise KernelError("disk automorphisms act on the unit disk with |a| < 1")
        return (source, lambda z: (z + a) / (1 + a.conjugate() * z),
                lambda z: (1 - abs(a) ** 2) / (1 + a.conjugate() * z[0]) ** 2)
    if name == "cayley":
        if not isinstance(source, geo.Disk) or source.radius != 1.0:
            raise KernelError("the Cayley map is defined on the unit disk")
        return (geo.HalfPlane(), lambda z: 1j * (1 + z) / (1 - z), lambda z: 2j / (1 - z[0]) ** 2)
    if name == "affine":
        lam = complex(param if param is not None else 2.0)
        if lam == 0:
            raise KernelError("affine scale must be nonzero")
        return (geo.dilate(source, abs(lam)), lambda z: lam * z, lambda z: lam ** source.dim)
    raise KernelError(f"unknown map {name!r}; expected one of {MAPS}")


def transformation_check(map_name: str, z, source=None, param=None, tol: float = 1e-12) -> CheckReport:
    """Compare ``K_target(F(z)) |det F'(z)|^2`` with ``K_source(z)``."""
    source = geo.disk() if source is None else source
    target, F, jac = _biholomorphism(map_name, source, param)
    pt = _require_inside(source, z)
    b = ReportBuilder("transformation", "Bergman kernel transformation law under a biholomorphism",
                      {"map": map_name, "source": geo.spec_to_dict(source),
                       "param": None if param is None else [complex(param).real, complex(param).imag],
                       "point": geo.CPoint(tuple(pt)).to_list()}, tol)
    image = np.asarray(F(pt), dtype=complex)
    b.q("pulled_back", exact_kernel(target, image).density * abs(jac(pt)) ** 2)
    b.q("source", exact_kernel(source, pt).density)
    b.close("relative_error", "pulled_back", "source", scale="source")
    return b.build()


def _nested(inner, outer, n_directions: int = 20000) -> bool:
    if inner == outer:
        return True
    inner_c, outer_c = geo.canonicalize(inner), geo.canonicalize(outer)
    if type(inner_c) is type(outer_c) and isinstance(inner_c, (geo.Disk, geo.Ball)):
        return inner_c.dim == outer_c.dim and inner_c.radius <= outer_c.radius
    if isinstance(inner_c, geo.Polydisc) and isinstance(outer_c, geo.Polydisc):
        return inner_c.dim == outer_c.dim and all(a <= b for a, b in zip(inner_c.radii, outer_c.radii))
    if not (geo.has_gauge(inner) and geo.has_gauge(outer)) or inner.dim != outer.dim:
        return False
    # both gauges only see moduli; inner is contained iff m_outer <= m_inner on directions
    dim = inner.dim
    dirs = np.vstack([geo._diagonal_directions(dim),
                      geo._positive_orthant_directions(n_directions, 7, dim)])
    gi = G.evaluate_moduli(geo.canonical_gauge(inner), dirs)
    go = G.evaluate_moduli(geo.canonical_gauge(outer), dirs)
    return bool(np.all(go <= gi * (1 + 1e-12)))


def monotonicity_check(inner, outer, z, tol: float = 1e-6, method: str = "auto",
                       degree: int | None = None) -> CheckReport:
    """Smaller domains carry larger kernels: ``K_outer(z) <= K_inner(z)``."""
    if not _nested(inner, outer):
        raise KernelError("could not certify that the inner domain lies in the outer one")
    pt = _require_inside(inner, z)
    b = ReportBuilder("monotonicity", "Bergman kernel decreases as the domain grows",
                      {"inner": geo.spec_to_dict(inner), "outer": geo.spec_to_dict(outer),
                       "point": geo.CPoint(tuple(pt)).to_list(), "method": method}, tol)
    k_in = kernel_density(inner, pt, method, degree)
    k_out = kernel_density(outer, pt, method, degree)
    b.q("K_inner", k_in.density, k_in.err_est)
    b.q("K_outer", k_out.density, k_out.err_est)
    b.q("combined_error", k_in.err_est + k_out.err_est)
    b.margin("inner_minus_outer", [(1, "K_inner"), (1, "combined_error"), (-1, "K_outer")], scale="K_outer")
    return b.build()
