"""
Truncated bosonic Fock space and qubit algebra.

All joint operators and states use the spin-major ordering: index
``s * (n_max + 1) + n`` with ``s = 0`` for the qubit state down and ``s = 1``
for up. This is the only interchange format used by the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..utils.logging_config import get_logger

logger = get_logger(__name__)

SPIN_DOWN = 0
SPIN_UP = 1

# Fraction of the Fock ladder regarded as the truncation tail
TAIL_FRACTION = 0.95
HERMITIAN_RTOL = 1e-13


@dataclass(frozen=True)
class FockConfig:
    """
    Truncation of the oscillator Fock space.

    Attributes
    ----------
    n_max : int
        Highest retained occupation number.
    tail_tol : float
        Maximum probability weight allowed above ``0.95 * n_max``.

    Examples
    --------
    >>> cfg = FockConfig.for_size(100.0)
    >>> cfg.n_max, cfg.dimension
    (400, 802)
    """

    n_max: int
    tail_tol: float = 1e-8

    def __post_init__(self) -> None:
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max}")
        if not 0.0 < self.tail_tol < 1.0:
            raise ValueError(f"tail_tol must lie in (0, 1), got {self.tail_tol}")

    @classmethod
    def for_size(cls, R: float, tail_tol: float = 1e-8) -> FockConfig:
        """Default truncation ``n_max = ceil(4 R)`` for a size parameter R."""
        if R <= 0:
            raise ValueError(f"R must be positive, got {R}")
        return cls(n_max=max(1, math.ceil(4.0 * R)), tail_tol=tail_tol)

    @property
    def n_levels(self) -> int:
        """Number of oscillator levels, ``n_max + 1``."""
        return self.n_max + 1

    @property
    def dimension(self) -> int:
        """Dimension of the joint qubit-oscillator space."""
        return 2 * self.n_levels

    def tail_start(self) -> int:
        """Lowest occupation number counted in the truncation tail."""
        return int(math.floor(TAIL_FRACTION * self.n_max)) + 1


@dataclass(frozen=True)
class SparseOperator:
    """
    Immutable sparse matrix with an optional hermiticity guarantee.

    The hermitian flag is verified at construction time, to rounding.

    Attributes
    ----------
    matrix : sp.csr_matrix
        Complex CSR matrix.
    hermitian : bool
        Whether the operator was declared hermitian.
    """

    matrix: sp.csr_matrix
    hermitian: bool = False

    def __post_init__(self) -> None:
        m = sp.csr_matrix(self.matrix, dtype=complex)
        m.sum_duplicates()
        m.eliminate_zeros()
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"SparseOperator must be square, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)
        if self.hermitian:
            deviation = abs(m - m.conj().T)
            scale = max(1.0, float(abs(m).max())) if m.nnz else 1.0
            if deviation.nnz and deviation.max() > HERMITIAN_RTOL * scale:
                raise ValueError(
                    f"Operator flagged hermitian deviates by {deviation.max():.3e}"
                )

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    def entries(self) -> list[tuple[int, int, complex]]:
        """List of ``(row, col, value)`` triples of the stored nonzeros."""
        coo = self.matrix.tocoo()
        return [
            (int(r), int(c), complex(v))
            for r, c, v in zip(coo.row, coo.col, coo.data, strict=True)
        ]

    def dag(self) -> SparseOperator:
        """Conjugate transpose."""
        return SparseOperator(self.matrix.conj().T.tocsr(), hermitian=self.hermitian)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def __matmul__(self, other):
        if isinstance(other, SparseOperator):
            return SparseOperator(self.matrix @ other.matrix)
        return self.matrix @ other

    def __add__(self, other: SparseOperator) -> SparseOperator:
        return SparseOperator(self.matrix + other.matrix)

    def __sub__(self, other: SparseOperator) -> SparseOperator:
        return SparseOperator(self.matrix - other.matrix)

    def scaled(self, factor: complex) -> SparseOperator:
        """Operator multiplied by a scalar; hermiticity kept for real factors."""
        keep = self.hermitian and complex(factor).imag == 0.0
        return SparseOperator(self.matrix * factor, hermitian=keep)

    def max_abs(self) -> float:
        """Largest entry modulus, 0 for the empty operator."""
        return float(abs(self.matrix).max()) if self.nnz else 0.0


@dataclass(frozen=True)
class JointState:
    """
    Pure state of the qubit-oscillator system.

    Attributes
    ----------
    amps : np.ndarray
        Complex amplitudes of length ``2 (n_max + 1)``, spin-major.
    n_max : int
        Fock truncation the amplitudes refer to.
    time : float
        Time label (units of 1/omega).
    """

    amps: np.ndarray
    n_max: int
    time: float = 0.0
    norm_tol: float = field(default=1e-10, repr=False)

    def __post_init__(self) -> None:
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.size != 2 * (self.n_max + 1):
            raise ValueError(
                f"Expected {2 * (self.n_max + 1)} amplitudes for n_max={self.n_max}, "
                f"got {amps.size}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > self.norm_tol:
            raise ValueError(f"JointState not normalized: <psi|psi> = {norm:.12g}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def down(self) -> np.ndarray:
        """Amplitudes alpha_{down, n}."""
        return self.amps[: self.n_max + 1]

    @property
    def up(self) -> np.ndarray:
        """Amplitudes alpha_{up, n}."""
        return self.amps[self.n_max + 1 :]

    def spin_blocks(self) -> np.ndarray:
        """Amplitudes as a ``(2, n_max + 1)`` array."""
        return self.amps.reshape(2, self.n_max + 1)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))

    def tail_weight(self) -> float:
        """Probability weight above ``0.95 n_max`` summed over both spins."""
        return tail_weight(self.amps, self.n_max)


def tail_weight(amps: np.ndarray, n_max: int) -> float:
    """
    Probability weight of the top Fock levels.

    Parameters
    ----------
    amps : np.ndarray
        Spin-major amplitudes, shape ``(dim,)`` or ``(T, dim)``.
    n_max : int
        Truncation.

    Returns
    -------
    float
        Largest tail weight over all supplied states.
    """
    start = int(math.floor(TAIL_FRACTION * n_max)) + 1
    blocks = np.asarray(amps).reshape(-1, 2, n_max + 1)
    weights = np.sum(np.abs(blocks[:, :, start:]) ** 2, axis=(1, 2))
    return float(weights.max()) if weights.size else 0.0


def build_ladder_ops(cfg: FockConfig) -> tuple[SparseOperator, SparseOperator]:
    """
    Annihilation and creation operators of the truncated oscillator.

    Parameters
    ----------
    cfg : FockConfig
        Truncation.

    Returns
    -------
    Tuple[SparseOperator, SparseOperator]
        ``(b, b_dag)`` of dimension ``n_max + 1`` with ``<n-1|b|n> = sqrt(n)``.

    Examples
    --------
    >>> b, bd = build_ladder_ops(FockConfig(n_max=2))
    >>> b.toarray()[1, 2]
    (1.4142135623730951+0j)
    """
    n = np.arange(1, cfg.n_levels)
    b = sp.diags(np.sqrt(n).astype(complex), offsets=1, shape=(cfg.n_levels,) * 2)
    b = SparseOperator(sp.csr_matrix(b))
    return b, b.dag()


def number_op(cfg: FockConfig) -> SparseOperator:
    """Diagonal number operator with entries 0, 1, ..., n_max."""
    diag = np.arange(cfg.n_levels, dtype=complex)
    return SparseOperator(sp.diags(diag, format="csr"), hermitian=True)


def identity_op(dimension: int) -> SparseOperator:
    return SparseOperator(sp.identity(dimension, dtype=complex, format="csr"), hermitian=True)


def pauli_ops() -> tuple[SparseOperator, ...]:
    """
    Qubit operators in the (down, up) basis.

    The ladder operators follow ``sigma_pm = sigma_x +- i sigma_y``, twice the
    half-spin convention, so ``sigma_plus |down> = 2 |up>``.

    Returns
    -------
    Tuple[SparseOperator, ...]
        ``(sigma_x, sigma_y, sigma_z, sigma_plus, sigma_minus)``
    """
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, 1j], [-1j, 0]], dtype=complex)
    sz = np.array([[-1, 0], [0, 1]], dtype=complex)
    s_plus = sx + 1j * sy
    s_minus = sx - 1j * sy
    return (
        SparseOperator(sp.csr_matrix(sx), hermitian=True),
        SparseOperator(sp.csr_matrix(sy), hermitian=True),
        SparseOperator(sp.csr_matrix(sz), hermitian=True),
        SparseOperator(sp.csr_matrix(s_plus)),
        SparseOperator(sp.csr_matrix(s_minus)),
    )


def tensor(a: SparseOperator, b: SparseOperator) -> SparseOperator:
    """
    Kronecker product ``a (x) b``.

    With ``a`` acting on the qubit and ``b`` on the oscillator this yields the
    spin-major joint ordering.
    """
    return SparseOperator(
        sp.kron(a.matrix, b.matrix, format="csr"),
        hermitian=a.hermitian and b.hermitian,
    )


def basis_index(spin: int, n: int, n_max: int) -> int:
    """Joint index of the product state ``|spin>|n>``."""
    if spin not in (SPIN_DOWN, SPIN_UP):
        raise ValueError(f"spin must be 0 (down) or 1 (up), got {spin}")
    if not 0 <= n <= n_max:
        raise ValueError(f"n must lie in [0, {n_max}], got {n}")
    return spin * (n_max + 1) + n


def basis_state(cfg: FockConfig, spin: int, n: int) -> JointState:
    """Product state ``|spin>|n>``."""
    amps = np.zeros(cfg.dimension, dtype=complex)
    amps[basis_index(spin, n, cfg.n_max)] = 1.0
    return JointState(amps, cfg.n_max)


def initial_state(cfg: FockConfig) -> JointState:
    """The factorized ground state ``|down>|0>`` of the free Hamiltonian."""
    return basis_state(cfg, SPIN_DOWN, 0)
