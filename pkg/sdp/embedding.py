"""
Module 'sdp.embedding'

Real symmetric embedding of complex Hermitian matrices.

    embed(H) = [[Re H, -Im H],
                [Im H,  Re H]]

H is PSD iff embed(H) is, every eigenvalue of H appears twice in embed(H),
and <embed(A), embed(B)> = 2 Re Tr(A^dagger B).
"""
import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

from linalg.validators import validate_hermitian
from tempered.exceptions import ValidationError


def embed_hermitian(h: npt.ArrayLike) -> np.ndarray:
    """
    Returns the 2n x 2n real symmetric embedding of a Hermitian matrix.

    Args:
        h: An n x n Hermitian matrix.

    Returns:
        np.ndarray: The embedding.

    Raises:
        NonHermitianError: If h is not Hermitian within tolerance.
    """
    m = validate_hermitian(h)
    return np.block([[m.real, -m.imag], [m.imag, m.real]])


def compress_hermitian(x: npt.ArrayLike) -> np.ndarray:
    """
    Inverse of ``embed_hermitian``, projecting onto the image of the embedding.

    Averages the two diagonal blocks for the real part and the two
    off-diagonal blocks for the imaginary part.

    Args:
        x: A 2n x 2n real matrix.

    Returns:
        np.ndarray: The n x n complex Hermitian matrix.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
        raise ValidationError(f"expected an even square matrix, got shape {arr.shape}", "x")
    n = arr.shape[0] // 2
    real = (arr[:n, :n] + arr[n:, n:]) / 2
    imag = (arr[n:, :n] - arr[:n, n:]) / 2
    h = real + 1j * imag
    return (h + h.conj().T) / 2


def embed_columns(coefficients: sp.spmatrix, n: int) -> sp.csr_matrix:
    """
    Embeds every column of a coefficient matrix.

    Column j of ``coefficients`` is the row-major vectorisation of a complex
    n x n matrix F_j; column j of the result is the row-major vectorisation of
    embed(F_j), a (2n)^2-vector.

    Args:
        coefficients: Sparse (n^2 x k) complex matrix.
        n (int): Matrix order.

    Returns:
        sp.csr_matrix: Sparse ((2n)^2 x k) real matrix.
    """
    coo = sp.coo_matrix(coefficients)
    rows, cols = np.divmod(coo.row, n)
    width = 2 * n
    re, im = coo.data.real, coo.data.imag
    out_rows = np.concatenate([rows * width + cols,
                               rows * width + (cols + n),
                               (rows + n) * width + cols,
                               (rows + n) * width + (cols + n)])
    out_cols = np.tile(coo.col, 4)
    values = np.concatenate([re, -im, im, re])
    keep = values != 0
    return sp.csr_matrix((values[keep], (out_rows[keep], out_cols[keep])),
                         shape=(width * width, coo.shape[1]))
