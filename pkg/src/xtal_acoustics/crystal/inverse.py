"""
Hearing the torus: the Gaussian Poisson identity between L and L*, recovery of the
length spectrum of L* from Asp up to the constant c, and the two generalized inverse
problems (window divisors, quadratic-form four-tuples).
"""

from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from math import ceil, floor, fsum, pi, sqrt

import numpy as np
from loguru import logger

from xtal_acoustics.crystal.lattice import (
    Lattice,
    SpectrumSet,
    dual_lattice,
    enumerate_vectors,
    shortest_vector_length,
    spectrum_from_values,
)
from xtal_acoustics.crystal.parallel import parallel_map
from xtal_acoustics.errors import InputError, NumericalError
from xtal_acoustics.models import (
    Example1Candidate,
    Example1Element,
    Example1Result,
    SpectrumKind,
    ThetaReport,
    TupleCandidate,
)

# ==================== Poisson identity ====================


def gaussian_tail_bound(shortest: float, dim: int, a: float, radius: float) -> float:
    """
    Upper bound for Σ_{|v| > radius} exp(−a|v|²) over a lattice with shortest vector
    `shortest`.

    Balls of radius shortest/2 around lattice points are disjoint, so at most
    (2r/shortest + 1)^dim points have |v| <= r; shells of width shortest/2 are then
    summed as a series until the Gaussian underflows.
    """
    width = shortest / 2
    total = 0.0
    k = 0
    while True:
        inner = radius + k * width
        exponent = a * inner * inner
        if exponent > 745.0:
            break
        count = (2 * (inner + width) / shortest + 1) ** dim
        total += count * np.exp(-exponent)
        k += 1
    return float(total)


def truncation_radius(lattice: Lattice, a: float, target_tail: float) -> float:
    """Smallest radius on a shortest/4 grid whose Gaussian tail bound is below target."""
    shortest = shortest_vector_length(lattice)
    radius = shortest
    for _ in range(100_000):
        if gaussian_tail_bound(shortest, lattice.dim, a, radius) <= target_tail:
            return radius
        radius += shortest / 4
    raise NumericalError(f"no truncation radius reaches tail {target_tail}")


def gaussian_sum(lattice: Lattice, a: float, radius: float) -> float:
    """Σ_{v ∈ L, |v| <= radius} exp(−a|v|²), zero vector included, summed small to large."""
    norms = enumerate_vectors(lattice, radius).norms
    terms = np.sort(np.exp(-a * norms**2))
    return fsum(terms.tolist() + [1.0])


def theta_check(lattice: Lattice, t: float, target_tail: float = 1e-12) -> ThetaReport:
    """
    Evaluate Σ_{y∈L*} e^{−4π²|y|²t} and Vol(L)/(4πt)^{n/2} Σ_{s∈L} e^{−|s|²/(4t)}.

    Truncation radii are chosen so each side's Gaussian tail is below `target_tail`.
    """
    if not t > 0:
        raise InputError(f"t must be positive, got {t}")
    if not target_tail > 0:
        raise InputError(f"target tail must be positive, got {target_tail}")
    dual = dual_lattice(lattice)
    a_dual, a_primal = 4 * pi**2 * t, 1 / (4 * t)
    prefactor = lattice.volume / (4 * pi * t) ** (lattice.dim / 2)

    radius_dual = truncation_radius(dual, a_dual, target_tail)
    radius_primal = truncation_radius(lattice, a_primal, target_tail)
    lhs = gaussian_sum(dual, a_dual, radius_dual)
    rhs = prefactor * gaussian_sum(lattice, a_primal, radius_primal)
    tail = gaussian_tail_bound(
        shortest_vector_length(dual), lattice.dim, a_dual, radius_dual
    ) + prefactor * gaussian_tail_bound(
        shortest_vector_length(lattice), lattice.dim, a_primal, radius_primal
    )
    report = ThetaReport(
        t=t,
        lhs=lhs,
        rhs=rhs,
        volume=lattice.volume,
        truncation_radius_primal=radius_primal,
        truncation_radius_dual=radius_dual,
        tail_bound=tail,
        relative_error=abs(lhs - rhs) / abs(lhs),
    )
    logger.info("Theta identity evaluated", t=t, relative_error=report.relative_error)
    return report


def poisson_consistency(
    recovered: SpectrumSet, primal: Lattice, t: float, target_tail: float = 1e-12
) -> ThetaReport:
    """
    Poisson identity with the dual side taken from a recovered length spectrum of L*.

    The dual sum runs over the recovered entries up to their cutoff; the tail bound
    uses the smallest recovered length as the shortest dual vector.
    """
    if not t > 0:
        raise InputError(f"t must be positive, got {t}")
    if recovered.kind != SpectrumKind.LATTICE_LENGTHS or not recovered.entries:
        raise InputError("poisson consistency needs a nonempty lattice-lengths spectrum")
    a_dual, a_primal = 4 * pi**2 * t, 1 / (4 * t)
    prefactor = primal.volume / (4 * pi * t) ** (primal.dim / 2)

    terms = sorted(m * float(np.exp(-a_dual * v * v)) for v, m in recovered.entries)
    lhs = fsum(terms + [1.0])
    radius_primal = truncation_radius(primal, a_primal, target_tail)
    rhs = prefactor * gaussian_sum(primal, a_primal, radius_primal)
    tail = gaussian_tail_bound(
        recovered.entries[0][0], primal.dim, a_dual, recovered.cutoff
    ) + prefactor * gaussian_tail_bound(
        shortest_vector_length(primal), primal.dim, a_primal, radius_primal
    )
    if tail > target_tail:
        logger.warning(
            "Recovered spectrum cutoff too small for the requested tail",
            cutoff=recovered.cutoff,
            tail_bound=tail,
        )
    return ThetaReport(
        t=t,
        lhs=lhs,
        rhs=rhs,
        volume=primal.volume,
        truncation_radius_primal=radius_primal,
        truncation_radius_dual=recovered.cutoff,
        tail_bound=tail,
        relative_error=abs(lhs - rhs) / abs(lhs),
    )


# ==================== Recovery up to c ====================


def recover_lsp(asp: SpectrumSet, c: float) -> SpectrumSet:
    """Lengths √(a/c) of L* from a full-lattice Asp of a standard realization."""
    if not c > 0:
        raise InputError(f"c must be positive, got {c}")
    if any(value < 0 for value, _ in asp.entries):
        raise InputError("acoustic spectrum has negative values")
    return spectrum_from_values(
        (sqrt(value / c) for value, _ in asp.entries),
        sqrt(asp.cutoff / c),
        SpectrumKind.LATTICE_LENGTHS,
        multiplicities=(m for _, m in asp.entries),
    )


def estimate_c(asp: SpectrumSet, reference: SpectrumSet) -> float:
    """Diagnostic scale: smallest Asp value over the smallest squared reference length."""
    if not asp.entries or not reference.entries:
        raise InputError("scale estimate needs two nonempty spectra")
    shortest = reference.entries[0][0]
    if shortest <= 0:
        raise InputError("reference spectrum must start at a positive length")
    return asp.entries[0][0] / shortest**2


# ==================== Example 1: window divisors ====================


def example1_forward(v4: Sequence[float] | None = None, radius: float = 3.0) -> list[tuple[float, int]]:
    """
    Asp of L = Z³ with v1, v2, v3 the standard basis and a unit v4, as
    (value, true |χ|²) pairs sorted by value: value = |χ|² + (χ·v4)².

    The default v4 makes equal angles arccos(−1/√3) with the three axes.
    """
    direction = np.full(3, -1.0) if v4 is None else np.asarray(v4, dtype=float)
    if direction.shape != (3,) or not np.any(direction):
        raise InputError("v4 must be a nonzero vector in R^3")
    direction = direction / np.linalg.norm(direction)
    points = enumerate_vectors(Lattice(np.eye(3)), radius)
    norms_sq = np.sum(points.coefficients**2, axis=1)
    values = norms_sq + (points.vectors @ direction) ** 2
    order = np.lexsort((norms_sq, values))
    return [(float(values[i]), int(norms_sq[i])) for i in order]


def example1_candidates(
    asp: SpectrumSet, window_lo: float = 1.0, window_hi: float = 2.0
) -> Example1Result:
    """
    For each Asp value a, every integer k with a/window_hi < k < a/window_lo.

    k is a candidate |χ|² and a/k the per-element divisor 1 + cos²θ.
    """
    if not asp.entries:
        raise InputError("acoustic spectrum is empty")
    if not 0 < window_lo < window_hi:
        raise InputError(f"window must satisfy 0 < lo < hi, got ({window_lo}, {window_hi})")

    elements = []
    shared: Counter[float] = Counter()
    for value, multiplicity in asp.entries:
        if value <= 0:
            raise InputError(f"Example-1 values must be positive, got {value}")
        candidates = []
        for k in range(floor(value / window_hi) + 1, ceil(value / window_lo)):
            divisor = value / k
            if window_lo < divisor < window_hi:
                candidates.append(Example1Candidate(k=k, divisor=divisor, length=sqrt(k)))
        for candidate in candidates:
            shared[round(candidate.divisor, 9)] += 1
        elements.append(
            Example1Element(value=value, multiplicity=multiplicity, candidates=candidates)
        )

    consistent = all(element.candidates for element in elements)
    if not consistent:
        outside = [e.value for e in elements if not e.candidates]
        logger.warning("Elements without window candidates", values=outside)
    ranking = sorted(shared.items(), key=lambda item: (-item[1], item[0]))
    return Example1Result(
        window=(window_lo, window_hi),
        consistent=consistent,
        elements=elements,
        divisor_ranking=ranking,
    )


# ==================== Example 2: quadratic-form four-tuples ====================


@dataclass(frozen=True, eq=False)
class Example2Grid:
    """Finite parameter grid for the four-tuple search."""

    m: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    @property
    def size(self) -> int:
        return len(self.m) * len(self.alpha) * len(self.beta) * len(self.gamma)

    @classmethod
    def from_spec(cls, m: str, alpha: str, beta: str, gamma: str) -> "Example2Grid":
        return cls(
            m=_integer_axis(m),
            alpha=parse_grid_axis(alpha),
            beta=parse_grid_axis(beta),
            gamma=parse_grid_axis(gamma),
        )


def parse_grid_axis(spec: str) -> np.ndarray:
    """`lo:hi:step` (inclusive) or a single value; values rounded to 12 decimals."""
    try:
        parts = [float(p) for p in spec.split(":")]
    except ValueError as e:
        raise InputError(f"malformed grid axis {spec!r}") from e
    if len(parts) == 1:
        return np.array(parts)
    if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
        raise InputError(f"grid axis {spec!r} must be lo:hi:step with step > 0 and lo <= hi")
    lo, hi, step = parts
    count = floor((hi - lo) / step + 1e-9) + 1
    return np.round(lo + step * np.arange(count), 12)


def _integer_axis(spec: str) -> np.ndarray:
    values = parse_grid_axis(spec)
    if not np.all(values == np.round(values)):
        raise InputError(f"m axis {spec!r} must contain integers only, got {values.tolist()}")
    return values.astype(np.int64)


def _form_values(m, alpha, beta, gamma, bound: int) -> np.ndarray:
    """(mα) k² + (mβ) l² + 2(mγ) kl on the box |k|, |l| <= bound; broadcasts over parameters.

    m is folded into the coefficients first, so (m, α, β, γ) and (1, mα, mβ, mγ) give
    bitwise equal values.
    """
    k, l = np.meshgrid(np.arange(-bound, bound + 1), np.arange(-bound, bound + 1), indexing="ij")
    k2, l2, kl = (k * k).ravel(), (l * l).ravel(), (k * l).ravel()
    m, alpha, beta, gamma = (np.asarray(x)[..., None] for x in (m, alpha, beta, gamma))
    return (m * alpha) * k2 + (m * beta) * l2 + 2 * (m * gamma) * kl


def example2_forward(m: int, alpha: float, beta: float, gamma: float, K: int) -> np.ndarray:
    """Sorted set M = {m(α k² + β l² + 2γ kl) : |k|, |l| <= K}, merged within 1e-9."""
    if K <= 0:
        raise InputError(f"coefficient bound K must be positive, got {K}")
    if m == 0:
        raise InputError("m must be a nonzero integer")
    if alpha * beta < gamma * gamma:
        logger.warning(
            "Form is indefinite (alpha * beta < gamma²)", alpha=alpha, beta=beta, gamma=gamma
        )
    values = _form_values(m, alpha, beta, gamma, K)
    # signed values: shift so the merge helper sees nonnegative inputs
    low = float(min(values.min(), 0.0))
    merged = spectrum_from_values(values - low, 0.0, SpectrumKind.SQUARED_LENGTHS)
    return merged.values + low


def example2_form(vectors: Sequence[Sequence[float]], chi, eta) -> tuple[float, float, float]:
    """
    Cosine sums (Σcos²θ_iχ, Σcos²θ_iη, Σcosθ_iχ cosθ_iη) for unit bond vectors v_i and
    lattice generators χ, η of equal length.

    With these (α, β, γ), Σ_i (v_i·(kχ + lη))² = |χ|² (α k² + β l² + 2γ kl).
    """
    v = np.asarray(vectors, dtype=float)
    chi, eta = np.asarray(chi, dtype=float), np.asarray(eta, dtype=float)
    if not np.allclose(np.linalg.norm(v, axis=1), 1.0):
        raise InputError("bond vectors must have unit length")
    if not np.isclose(np.linalg.norm(chi), np.linalg.norm(eta)):
        raise InputError("χ and η must have the same length")
    cos_chi = v @ chi / np.linalg.norm(chi)
    cos_eta = v @ eta / np.linalg.norm(eta)
    return (
        float(np.sum(cos_chi**2)),
        float(np.sum(cos_eta**2)),
        float(np.sum(cos_chi * cos_eta)),
    )


def _hausdorff(rows: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Hausdorff distance between each row (as a set) and the sorted target set."""
    idx = np.clip(np.searchsorted(target, rows), 1, len(target) - 1) if len(target) > 1 else None
    if idx is None:
        to_target = np.abs(rows - target[0])
    else:
        to_target = np.minimum(np.abs(rows - target[idx - 1]), np.abs(rows - target[idx]))
    from_target = np.min(np.abs(target[None, :, None] - rows[:, None, :]), axis=2)
    return np.maximum(to_target.max(axis=1), from_target.max(axis=1))


def example2_search(
    target: Sequence[float], K: int, grid: Example2Grid, tol: float = 1e-9, chunk: int = 4096
) -> list[TupleCandidate]:
    """
    Brute-force every grid tuple; keep those whose generated set lies within `tol`
    (Hausdorff) of the target. Tuples with α <= 0 or β <= 0 are skipped.
    """
    if grid.size == 0:
        raise InputError("example-2 grid is empty")
    if K <= 0:
        raise InputError(f"coefficient bound K must be positive, got {K}")
    target = np.unique(np.asarray(target, dtype=float))
    if target.size == 0:
        raise InputError("example-2 target set is empty")

    m, alpha, beta, gamma = (
        axis.ravel()
        for axis in np.meshgrid(grid.m, grid.alpha, grid.beta, grid.gamma, indexing="ij")
    )
    admissible = (alpha > 0) & (beta > 0) & (m != 0)
    m, alpha, beta, gamma = m[admissible], alpha[admissible], beta[admissible], gamma[admissible]

    # keep the pairwise distance block of one chunk near 2^22 entries
    chunk = max(1, min(chunk, 2**22 // (target.size * (2 * K + 1) ** 2)))
    starts = list(range(0, len(m), chunk))

    def score_chunk(start: int) -> np.ndarray:
        s = slice(start, start + chunk)
        return _hausdorff(_form_values(m[s], alpha[s], beta[s], gamma[s], K), target)

    scores = np.concatenate(parallel_map(score_chunk, starts)) if starts else np.array([])
    matches = np.flatnonzero(scores <= tol)

    origin = 2 * K * (K + 1)
    candidates = []
    for i in matches:
        box = np.delete(_form_values(1, alpha[i], beta[i], gamma[i], K), origin)
        candidates.append(
            TupleCandidate(
                m=int(m[i]),
                alpha=float(alpha[i]),
                beta=float(beta[i]),
                gamma=float(gamma[i]),
                score=float(scores[i]),
                positive_semidefinite=bool(alpha[i] * beta[i] >= gamma[i] ** 2),
                min_alpha_beta=float(min(alpha[i], beta[i])) if gamma[i] > 0 else None,
                min_form_value=float(box.min()),
            )
        )
    candidates.sort(key=lambda c: (c.score, c.m, c.alpha, c.beta, c.gamma))
    logger.info("Example-2 search finished", grid=grid.size, matches=len(candidates))
    return candidates
