"""
Module 'channels.zoo'

Constructors of the channels used throughout the project.

Key Functions:

- **identity**: id_d.
- **dephasing**: Delta(X) = sum_i |i><i| X |i><i|.
- **omega3_channel**: Omega3 = (3/2) Delta - (1/2) id on a qutrit, whose Choi
  state is omega3.
- **gamma_pm**: the entanglement-breaking pair Gamma_+, Gamma_- with Choi
  states sigma_+, sigma_-.
- **unitary_channel**, **pauli_z_channel**, **replacement_channel**,
  **random_channel**.

Every constructor validates its result; a failure here is a defect and
surfaces as ``ValidationError``.
"""
from typing import Optional, Tuple

import numpy as np
import numpy.typing as npt

from linalg.operations import eigh
from states.constructors import sigma_pm
from states.validators import validate_local_dimension
from tempered import settings
from tempered.exceptions import ValidationError
from .models import Channel, HermitianPreservingMap
from .validators import validate_channel_dims


def identity(d: int) -> Channel:
    """
    Returns the identity channel on C^d.
    """
    d = validate_local_dimension(d)
    return Channel.from_kraus([np.eye(d)], name=f"id{d}")


def dephasing(d: int) -> Channel:
    """
    Returns the completely dephasing channel on C^d.

    Its Kraus operators are the projectors |i><i|, and its Choi state is
    P_d / d.
    """
    d = validate_local_dimension(d)
    kraus = []
    for i in range(d):
        k = np.zeros((d, d))
        k[i, i] = 1.0
        kraus.append(k)
    return Channel.from_kraus(kraus, name=f"dephasing{d}")


def omega3_channel() -> Channel:
    """
    Returns Omega3 = (3/2) Delta - (1/2) id on C^3.

    The combination is validated as CPTP; its Choi state is omega3.
    """
    combination = 1.5 * HermitianPreservingMap.from_channel(dephasing(3)) \
        - 0.5 * HermitianPreservingMap.from_channel(identity(3))
    return combination.to_channel(name="omega3")


def gamma_pm(d: int) -> Tuple[Channel, Channel]:
    """
    Returns (Gamma_+, Gamma_-) on C^d.

        Gamma_+(X) = (Tr X 1 + X) / (d + 1)
        Gamma_-(X) = (d Tr X 1 - X) / (d^2 - 1)

    Their Choi states are sigma_+ and sigma_-; both are PPT-binding.
    """
    plus, minus = sigma_pm(d)
    return (Channel.from_choi(plus.op, name=f"gamma_plus{d}"),
            Channel.from_choi(minus.op, name=f"gamma_minus{d}"))


def unitary_channel(u: npt.ArrayLike, name: str = "unitary") -> Channel:
    """
    Returns X -> U X U^dagger.

    Raises:
        ValidationError: If U is not unitary.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {u.shape}", "unitary")
    return Channel.from_kraus([u], name=name)


def pauli_z_channel() -> Channel:
    """
    Returns conjugation by the Pauli Z matrix on a qubit.
    """
    return unitary_channel(np.diag([1.0, -1.0]), name="pauliZ")


def replacement_channel(dim_in: int, dim_out: int,
                        state: Optional[npt.ArrayLike] = None) -> Channel:
    """
    Returns X -> Tr X sigma.

    Args:
        dim_in (int): Input dimension.
        dim_out (int): Output dimension.
        state: The prepared state sigma. Defaults to 1 / dim_out, which makes
            this the maximally mixing channel.
    """
    validate_channel_dims(dim_in, dim_out)
    sigma = np.eye(dim_out) / dim_out if state is None else np.asarray(state, dtype=np.complex128)
    if sigma.shape != (dim_out, dim_out):
        raise ValidationError(f"prepared state of shape {sigma.shape} does not live on "
                              f"C^{dim_out}", "state")
    values, vectors = eigh(sigma)
    kraus = []
    for m, value in enumerate(values):
        if value <= settings.KRAUS_CUTOFF:
            continue
        for i in range(dim_in):
            bra = np.zeros(dim_in)
            bra[i] = 1.0
            kraus.append(np.sqrt(value) * np.outer(vectors[:, m], bra))
    return Channel.from_kraus(kraus, dim_in, dim_out, name="replacement")


def random_channel(dim_in: int, dim_out: int, n_kraus: int = 2, seed: int = 0) -> Channel:
    """
    Returns a seeded random channel.

    A Ginibre matrix of shape (dim_out * n_kraus) x dim_in is orthonormalised
    by QR into a Stinespring isometry V; the Kraus operators are its
    dim_out-row blocks.

    Args:
        dim_in (int): Input dimension.
        dim_out (int): Output dimension.
        n_kraus (int): Number of Kraus operators.
        seed (int): Seed of the generator.

    Raises:
        ValidationError: If dim_out * n_kraus < dim_in.
    """
    validate_channel_dims(dim_in, dim_out)
    if n_kraus < 1 or dim_out * n_kraus < dim_in:
        raise ValidationError(f"{n_kraus} Kraus operators of {dim_out} rows cannot carry "
                              f"a {dim_in}-dimensional input", "n_kraus")
    rng = np.random.default_rng(seed)
    rows = dim_out * n_kraus
    ginibre = rng.normal(size=(rows, dim_in)) + 1j * rng.normal(size=(rows, dim_in))
    isometry, _ = np.linalg.qr(ginibre)
    kraus = [isometry[m * dim_out:(m + 1) * dim_out, :] for m in range(n_kraus)]
    return Channel.from_kraus(kraus, dim_in, dim_out, name=f"random{seed}")
