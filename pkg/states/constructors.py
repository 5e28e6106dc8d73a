"""
Module 'states.constructors'

Constructors of the bipartite states used throughout the project.

Key Functions:

- **max_entangled**: Phi_d = |Phi_d><Phi_d|, |Phi_d> = d^{-1/2} sum_i |ii>.
- **omega3**: omega3 = (P3 - Phi3) / 2 with P3 = sum_j |jj><jj|.
- **sigma_pm**: the PPT pair sigma_+ = (1 + d Phi_d) / (d (d+1)),
  sigma_- = (1 - Phi_d) / (d^2 - 1), with d sigma_+ - (d-1) sigma_- = Phi_d.
- **product_state**, **from_pure**, **depolarize**, **maximally_mixed**.
- **haar_pure_state**, **random_state_corpus**: seeded random states.
- **two_copy**: rho (x) sigma regrouped as (A A') (B B').
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from linalg.operations import permute_systems, projector, tensor
from tempered.exceptions import ValidationError
from .models import DensityOperator
from .validators import validate_local_dimension

DEFAULT_CORPUS_DIMS: Tuple[Tuple[int, int], ...] = ((2, 2), (3, 3))
DEFAULT_NOISE_LEVELS: Tuple[float, ...] = (0.0, 0.3, 0.7)


def max_entangled_vector(d: int) -> np.ndarray:
    """
    Returns |Phi_d> = d^{-1/2} sum_i |ii>.
    """
    d = validate_local_dimension(d)
    return np.eye(d, dtype=np.complex128).reshape(-1) / np.sqrt(d)


def max_entangled(d: int) -> DensityOperator:
    """
    Returns the maximally entangled state Phi_d on C^d (x) C^d.

    Raises:
        ValidationError: If d < 2.
    """
    return DensityOperator.from_matrix(projector(max_entangled_vector(d)), d, d)


def correlated_projector(d: int) -> np.ndarray:
    """
    Returns P_d = sum_j |jj><jj|.
    """
    return np.diag(np.eye(d).reshape(-1)).astype(np.complex128)


def omega3() -> DensityOperator:
    """
    Returns the two-qutrit state omega3 = (P3 - Phi3) / 2.
    """
    return DensityOperator.from_matrix(
        (correlated_projector(3) - max_entangled(3).matrix) / 2, 3, 3)


def sigma_pm(d: int) -> Tuple[DensityOperator, DensityOperator]:
    """
    Returns (sigma_+, sigma_-) for local dimension d.

    Both are PPT states and d sigma_+ - (d-1) sigma_- = Phi_d.

    Args:
        d (int): Local dimension, at least 2.

    Returns:
        tuple: (sigma_+, sigma_-).
    """
    phi = max_entangled(d).matrix
    identity = np.eye(d * d)
    plus = (identity + d * phi) / (d * (d + 1))
    minus = (identity - phi) / (d * d - 1)
    return DensityOperator.from_matrix(plus, d, d), DensityOperator.from_matrix(minus, d, d)


def maximally_mixed(dim_a: int, dim_b: int) -> DensityOperator:
    n = dim_a * dim_b
    return DensityOperator.from_matrix(np.eye(n) / n, dim_a, dim_b)


def product_state(rho_a: npt.ArrayLike, rho_b: npt.ArrayLike) -> DensityOperator:
    """
    Returns rho_a (x) rho_b as a bipartite state.
    """
    a = np.asarray(rho_a, dtype=np.complex128)
    b = np.asarray(rho_b, dtype=np.complex128)
    return DensityOperator.from_matrix(tensor(a, b), a.shape[0], b.shape[0])


def from_pure(psi: npt.ArrayLike, dim_a: int, dim_b: int) -> DensityOperator:
    """
    Returns |psi><psi| / <psi|psi> on C^dim_a (x) C^dim_b.

    Raises:
        ValidationError: If psi is zero or has the wrong length.
    """
    vector = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if vector.size != dim_a * dim_b:
        raise ValidationError(f"vector of length {vector.size} does not live on "
                              f"{dim_a} x {dim_b}", "psi")
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        raise ValidationError("zero vector", "psi")
    return DensityOperator.from_matrix(projector(vector / norm), dim_a, dim_b)


def depolarize(rho: DensityOperator, p: float) -> DensityOperator:
    """
    Returns (1 - p) rho + p 1/n.

    Args:
        rho (DensityOperator): The state.
        p (float): Noise level in [0, 1].
    """
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"noise level must lie in [0, 1], got {p}", "p")
    n = rho.dim
    return DensityOperator(rho.op.with_matrix((1 - p) * rho.matrix + p * np.eye(n) / n))


def haar_pure_state(dim_a: int, dim_b: int, rng: np.random.Generator) -> DensityOperator:
    """
    Returns a Haar-random pure state drawn from ``rng``.
    """
    n = dim_a * dim_b
    vector = rng.normal(size=n) + 1j * rng.normal(size=n)
    return from_pure(vector, dim_a, dim_b)


def random_state_corpus(seed: int, count: int,
                        dims: Sequence[Tuple[int, int]] = DEFAULT_CORPUS_DIMS,
                        noise_levels: Sequence[float] = DEFAULT_NOISE_LEVELS
                        ) -> List[DensityOperator]:
    """
    Builds a reproducible list of random states.

    State ``i`` is a Haar-random pure state on ``dims[i % len(dims)]`` mixed
    with white noise at level ``noise_levels[(i // len(dims)) % len(noise_levels)]``.

    Args:
        seed (int): Seed of the generator.
        count (int): Number of states.
        dims: Bipartite dimensions to cycle through.
        noise_levels: Depolarising levels to cycle through.

    Returns:
        list[DensityOperator]: The corpus.
    """
    rng = np.random.default_rng(seed)
    corpus = []
    for i in range(count):
        dim_a, dim_b = dims[i % len(dims)]
        noise = noise_levels[(i // len(dims)) % len(noise_levels)]
        corpus.append(depolarize(haar_pure_state(dim_a, dim_b, rng), noise))
    return corpus


def two_copy(rho: DensityOperator, sigma: Optional[DensityOperator] = None) -> DensityOperator:
    """
    Returns rho (x) sigma as a state on (A A') (B B').

    Args:
        rho (DensityOperator): State on A B.
        sigma (DensityOperator, optional): State on A' B'. Defaults to rho.
    """
    sigma = rho if sigma is None else sigma
    (a, b), (a2, b2) = rho.dims, sigma.dims
    joint = permute_systems(tensor(rho.matrix, sigma.matrix), [a, b, a2, b2], [0, 2, 1, 3])
    return DensityOperator.from_matrix(joint, a * a2, b * b2)
