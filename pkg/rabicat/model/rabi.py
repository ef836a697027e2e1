"""
Extended Rabi Hamiltonian, parity operator and classical field vector.

Energies are in units of the oscillator frequency, times in units of its
inverse. The Hamiltonian reads

    H = b^dag b + (R/2) sz
        + lambda sqrt(R) [ (1+delta)/2 (b^dag s- + b s+) + (1-delta)/2 (b^dag s+ + b s-) ]
        + mu sqrt(R) (b^dag + b)(sz + 1)

with ``s+- = sx +- i sy`` (see ``pauli_ops``).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp

from ..utils.logging_config import get_logger
from .fock_space import (
    FockConfig,
    SparseOperator,
    build_ladder_ops,
    identity_op,
    number_op,
    pauli_ops,
    tensor,
)

logger = get_logger(__name__)


@dataclass(frozen=True)
class ModelParams:
    """
    Physical parameters of the extended Rabi model.

    Attributes
    ----------
    R : float
        Size parameter, ratio of qubit and oscillator frequencies.
    lam : float
        Coupling strength lambda (>= 0).
    delta : float
        Mixing of rotating and counter-rotating couplings, in [-1, 1].
    mu : float
        Parity-breaking strength.
    gamma : float
        Oscillator damping constant in units of the oscillator frequency.
        Zero means unitary evolution.

    Examples
    --------
    >>> p = ModelParams(R=100.0, lam=0.75, delta=0.5, mu=1.3e-3)
    >>> p.with_mu(-p.mu).mu
    -0.0013
    """

    R: float
    lam: float
    delta: float
    mu: float = 0.0
    gamma: float = 0.0

    def __post_init__(self) -> None:
        for name in ("R", "lam", "delta", "mu", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if self.R <= 0:
            raise ValueError(f"R must be positive, got {self.R}")
        if self.lam < 0:
            raise ValueError(f"lambda must be non-negative, got {self.lam}")
        if abs(self.delta) > 1:
            raise ValueError(f"delta must lie in [-1, 1], got {self.delta}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")

    @property
    def kappa(self) -> float:
        """Jump-operator rate ``gamma / R``."""
        return self.gamma / self.R

    def with_mu(self, mu: float) -> ModelParams:
        return ModelParams(self.R, self.lam, self.delta, mu, self.gamma)

    def with_gamma(self, gamma: float) -> ModelParams:
        return ModelParams(self.R, self.lam, self.delta, self.mu, gamma)

    def with_size(self, R: float, mu: float | None = None) -> ModelParams:
        return ModelParams(
            R, self.lam, self.delta, self.mu if mu is None else mu, self.gamma
        )

    def to_dict(self) -> dict[str, float]:
        """Mapping using the configuration key names."""
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return {k: float(v) for k, v in d.items()}


@dataclass(frozen=True)
class FieldVector:
    """
    Effective field B(x, p) acting on the qubit in the classical limit.

    Only the magnitude enters the effective Hamiltonians; the component signs
    follow ``bx = -sqrt(2) lam x``, ``by = sqrt(2) lam delta p`` and
    ``bz = -(1/2 + sqrt(2) mu x)``.
    """

    bx: float
    by: float
    bz: float

    @property
    def magnitude_squared(self) -> float:
        return self.bx**2 + self.by**2 + self.bz**2

    @property
    def magnitude(self) -> float:
        return math.sqrt(self.magnitude_squared)


def build_hamiltonian(params: ModelParams, cfg: FockConfig) -> SparseOperator:
    """
    Assemble the joint Hamiltonian in the spin-major basis.

    Parameters
    ----------
    params : ModelParams
        Model parameters; ``gamma`` is ignored here.
    cfg : FockConfig
        Fock truncation.

    Returns
    -------
    SparseOperator
        Hermitian operator of dimension ``2 (n_max + 1)``.

    Examples
    --------
    >>> H = build_hamiltonian(ModelParams(100.0, 0.75, 0.5), FockConfig(n_max=4))
    >>> H.toarray()[5, 1].real  # <up,0|H|down,1>
    11.25
    """
    b, b_dag = build_ladder_ops(cfg)
    _, _, sz, s_plus, s_minus = pauli_ops()
    i2 = identity_op(2)
    i_osc = identity_op(cfg.n_levels)

    sqrt_r = math.sqrt(params.R)
    c_rot = params.lam * sqrt_r * (1.0 + params.delta) / 2.0
    c_counter = params.lam * sqrt_r * (1.0 - params.delta) / 2.0
    c_mu = params.mu * sqrt_r

    h = tensor(i2, number_op(cfg)).matrix + (params.R / 2.0) * tensor(sz, i_osc).matrix
    h = h + c_rot * (tensor(s_minus, b_dag).matrix + tensor(s_plus, b).matrix)
    h = h + c_counter * (tensor(s_plus, b_dag).matrix + tensor(s_minus, b).matrix)
    if c_mu != 0.0:
        sz_plus_one = sz.matrix + i2.matrix
        h = h + c_mu * sp.kron(sz_plus_one, b.matrix + b_dag.matrix, format="csr")

    H = SparseOperator(sp.csr_matrix(h), hermitian=True)
    logger.debug(
        f"Built Hamiltonian: dim={H.dimension}, nnz={H.nnz}, params={params.to_dict()}"
    )
    return H


def build_parity(cfg: FockConfig) -> SparseOperator:
    """
    Parity operator ``(-1)^(n + (sz + 1)/2)``, diagonal with entries +-1.
    """
    n = np.arange(cfg.n_levels)
    signs = np.concatenate([(-1.0) ** n, -((-1.0) ** n)])
    return SparseOperator(sp.diags(signs.astype(complex), format="csr"), hermitian=True)


def field_vector(x: float, p: float, params: ModelParams) -> FieldVector:
    """
    Effective field vector at the scaled phase-space point (x, p).

    Parameters
    ----------
    x, p : float
        Scaled coordinate and momentum.
    params : ModelParams
        Model parameters.

    Returns
    -------
    FieldVector
        Components with ``|B|^2 = 1/4 + 2(lam^2 + mu^2) x^2 + 2 (lam delta)^2 p^2 + sqrt(2) mu x``.
    """
    s2 = math.sqrt(2.0)
    return FieldVector(
        bx=-s2 * params.lam * x,
        by=s2 * params.lam * params.delta * p,
        bz=-(0.5 + s2 * params.mu * x),
    )


def commutator_norm(a: SparseOperator, b: SparseOperator) -> float:
    """Largest entry modulus of ``[a, b]``."""
    c = a.matrix @ b.matrix - b.matrix @ a.matrix
    return float(abs(c).max()) if c.nnz else 0.0
