"""Finite-dimensional quantum probability: states, effects, channels.

States are density matrices (PSD, trace 1), effects (fuzzy predicates)
are operators with 0 <= p <= I, and validity is the Born rule

    sigma |= p  =  tr(sigma p).

Sequential conjunction and the two conditionings:

    p & q            =  sqrt(p) q sqrt(p)
    lower  sigma|_p  =  sqrt(p) sigma sqrt(p) / (sigma |= p)
    upper  sigma|^p  =  sqrt(sigma) p sqrt(sigma) / (sigma |= p)

Lower conditioning satisfies the product rule for &; upper conditioning
satisfies Bayes' rule. They agree on commuting (e.g. diagonal) data and
genuinely differ in general.

Channels are kept in Heisenberg form, as the grid of values on matrix
units of the codomain: a channel c : H -> K with flat dimensions n, m is
stored as the (m, m, n, n) array of blocks

    c[k, l]  =  c(|k><l|),

so predicate transformation is the linear extension

    c << q           =  sum_kl q[k, l] c[k, l]

and state transformation is its Born dual, which comes out with the
block indices swapped:

    (c >> sigma)[k, l]  =  tr(c[l, k] sigma).

Unital grids (sum_k c[k, k] = I) preserve truth and send states to
states; assert maps are the canonical sub-unital example.

Composite indices flatten row-major, matching numpy's kron.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .classical import Dist, FuzzyPred, StochChannel
from .errors import DimensionError, NotPositiveError, ZeroValidityError
from .linalg import (
    as_matrix,
    check_dims,
    matrix_from_json,
    matrix_to_json,
    partial_trace,
    psd_sqrt,
)

STATE_TRACE_TOL = 1e-9
EFFECT_EIG_TOL = 1e-10
UNITAL_TOL = 1e-9
CP_TOL = 1e-8
ZERO_VALIDITY = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class QState:
    """Density matrix with a recorded component structure `dims`."""

    __slots__ = ("mat", "dims")

    def __init__(self, mat, dims):
        m = as_matrix(mat).copy()
        dims = check_dims(dims, m.shape[0])
        if m.shape[0] != m.shape[1]:
            raise DimensionError("a state must be square")
        if not linalg.is_hermitian(m):
            raise NotPositiveError("state is not Hermitian")
        eigs = np.linalg.eigvalsh((m + m.conj().T) / 2)
        if eigs.min() < -linalg.EIG_CLIP:
            raise NotPositiveError(f"state has eigenvalue {eigs.min():.3e}")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > STATE_TRACE_TOL:
            raise ValueError(f"state has trace {tr!r}, not 1")
        self.mat = _freeze(m)
        self.dims = dims

    @property
    def flat(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_vector(cls, v, dims) -> "QState":
        vec = np.asarray(v, dtype=np.complex128).reshape(-1)
        nrm = np.linalg.norm(vec)
        if nrm == 0:
            raise ValueError("zero vector")
        vec = vec / nrm
        return cls(np.outer(vec, vec.conj()), dims)

    @classmethod
    def maximally_mixed(cls, dims) -> "QState":
        dims = check_dims(dims)
        n = int(np.prod(dims))
        return cls(np.eye(n) / n, dims)

    def tensor(self, other: "QState") -> "QState":
        return QState(np.kron(self.mat, other.mat), self.dims + other.dims)

    def marginal(self, mask) -> "QState":
        kept = tuple(d for d, b in zip(self.dims, mask) if int(b))
        return QState(partial_trace(self.mat, self.dims, mask), kept)

    def transpose(self) -> "QState":
        return QState(self.mat.T.copy(), self.dims)

    def to_json(self) -> dict:
        d = matrix_to_json(self.mat)
        d["dims"] = list(self.dims)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "QState":
        return cls(matrix_from_json(d), d["dims"])

    def __repr__(self) -> str:
        return f"QState(dims={self.dims})"


class Effect:
    """Operator p with 0 <= p <= I; the quantum analogue of a fuzzy event."""

    __slots__ = ("mat", "dims")

    def __init__(self, mat, dims):
        m = as_matrix(mat).copy()
        dims = check_dims(dims, m.shape[0])
        if m.shape[0] != m.shape[1]:
            raise DimensionError("an effect must be square")
        if not linalg.is_hermitian(m):
            raise NotPositiveError("effect is not Hermitian")
        eigs = np.linalg.eigvalsh((m + m.conj().T) / 2)
        if eigs.min() < -EFFECT_EIG_TOL or eigs.max() > 1.0 + EFFECT_EIG_TOL:
            raise NotPositiveError(
                f"effect eigenvalues [{eigs.min():.3e}, {eigs.max():.3e}] "
                "leave [0, 1]"
            )
        self.mat = _freeze(m)
        self.dims = dims

    @property
    def flat(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def truth(cls, dims) -> "Effect":
        dims = check_dims(dims)
        return cls(np.eye(int(np.prod(dims))), dims)

    def tensor(self, other: "Effect") -> "Effect":
        return Effect(np.kron(self.mat, other.mat), self.dims + other.dims)

    def transpose(self) -> "Effect":
        return Effect(self.mat.T.copy(), self.dims)

    def to_json(self) -> dict:
        d = matrix_to_json(self.mat)
        d["dims"] = list(self.dims)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Effect":
        return cls(matrix_from_json(d), d["dims"])

    def __repr__(self) -> str:
        return f"Effect(dims={self.dims})"


class QChannel:
    """A CP map in Heisenberg block form (see the module docstring).

    blocks[k, l] = c(|k><l|) over the codomain basis; shape is
    (flat_out, flat_out, flat_in, flat_in). `unital` is detected from
    sum_k blocks[k, k]: equal to I means unital, below I a sub-channel,
    anything else is rejected.
    """

    __slots__ = ("blocks", "in_dims", "out_dims", "unital")

    def __init__(self, blocks, in_dims, out_dims, *, check_cp: bool = True):
        arr = np.asarray(blocks, dtype=np.complex128)
        in_dims = check_dims(in_dims)
        out_dims = check_dims(out_dims)
        n = int(np.prod(in_dims))
        m = int(np.prod(out_dims))
        if arr.shape != (m, m, n, n):
            raise DimensionError(
                f"blocks shape {arr.shape}, expected {(m, m, n, n)}"
            )
        if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
            raise ValueError("block entries must be finite")
        # hermiticity pattern c[l, k] = c[k, l]^dag
        flipped = np.conj(np.transpose(arr, (1, 0, 3, 2)))
        if np.max(np.abs(arr - flipped)) > linalg.HERMITIAN_TOL:
            raise NotPositiveError("blocks break the hermiticity pattern")
        unit = np.einsum("kkij->ij", arr)
        gap = unit - np.eye(n)
        if np.max(np.abs(gap)) <= UNITAL_TOL:
            unital = True
        else:
            defect = np.linalg.eigvalsh((gap + gap.conj().T) / 2)
            if defect.max() > UNITAL_TOL:
                raise NotPositiveError("block diagonal sums above the identity")
            unital = False
        if check_cp:
            # complete positivity == PSD of the block matrix [c[k, l]]_kl
            choi = np.transpose(arr, (0, 2, 1, 3)).reshape(m * n, m * n)
            eigs = np.linalg.eigvalsh((choi + choi.conj().T) / 2)
            if eigs.min() < -CP_TOL:
                raise NotPositiveError(
                    f"blocks are not completely positive ({eigs.min():.3e})"
                )
        arr = arr.copy()
        self.blocks = _freeze(arr)
        self.in_dims = in_dims
        self.out_dims = out_dims
        self.unital = unital

    @property
    def in_flat(self) -> int:
        return self.blocks.shape[2]

    @property
    def out_flat(self) -> int:
        return self.blocks.shape[0]

    @classmethod
    def from_kraus(cls, kraus, in_dims, out_dims) -> "QChannel":
        """Build blocks c[k, l] = sum_r A_r^dag |k><l| A_r.

        Kraus-generated grids are CP by construction, so the explicit
        check is skipped.
        """
        in_dims = check_dims(in_dims)
        out_dims = check_dims(out_dims)
        n = int(np.prod(in_dims))
        m = int(np.prod(out_dims))
        ops = [as_matrix(a) for a in kraus]
        if not ops or any(a.shape != (m, n) for a in ops):
            raise DimensionError(f"Kraus operators must all be {m}x{n}")
        stack = np.stack(ops)
        blocks = np.einsum("rki,rlj->klij", stack.conj(), stack)
        return cls(blocks, in_dims, out_dims, check_cp=False)

    @classmethod
    def identity(cls, dims) -> "QChannel":
        dims = check_dims(dims)
        return cls.from_kraus([np.eye(int(np.prod(dims)))], dims, dims)

    def pull(self, q: Effect) -> Effect:
        """Predicate transformation c << q = sum_kl q[k, l] c[k, l]."""
        if q.dims != self.out_dims:
            raise DimensionError(f"effect dims {q.dims} vs {self.out_dims}")
        return Effect(self.pull_matrix(q.mat), self.in_dims)

    def pull_matrix(self, mat: np.ndarray) -> np.ndarray:
        """Linear extension of the block grid to an arbitrary matrix."""
        mat = as_matrix(mat)
        if mat.shape != (self.out_flat, self.out_flat):
            raise DimensionError("matrix does not match the codomain")
        return np.einsum("kl,klij->ij", mat, self.blocks)

    def push(self, sigma: QState) -> QState:
        """State transformation; requires a unital (truth-preserving) grid."""
        if not self.unital:
            raise ValueError(
                "push on a sub-unital channel loses mass; "
                "use push_operator for the raw subnormalized output"
            )
        return QState(self.push_operator(sigma.mat), self.out_dims)

    def push_operator(self, mat: np.ndarray) -> np.ndarray:
        """(c >> sigma)[k, l] = tr(c[l, k] sigma), without normalization.

        For sub-unital grids the result is subnormalized (trace below 1)
        and is returned as a bare matrix rather than a QState.
        """
        mat = as_matrix(mat)
        if mat.shape != (self.in_flat, self.in_flat):
            raise DimensionError("matrix does not match the domain")
        return np.einsum("lkij,ji->kl", self.blocks, mat)

    def then(self, d: "QChannel") -> "QChannel":
        """Composite running self first, then d."""
        if self.out_dims != d.in_dims:
            raise DimensionError(
                f"cannot chain {self.out_dims} into {d.in_dims}"
            )
        blocks = np.einsum("uvkl,klij->uvij", d.blocks, self.blocks)
        return QChannel(blocks, self.in_dims, d.out_dims)

    def tensor(self, other: "QChannel") -> "QChannel":
        # np.kron on the 4-d block arrays is exactly blockwise Kronecker
        return QChannel(
            np.kron(self.blocks, other.blocks),
            self.in_dims + other.in_dims,
            self.out_dims + other.out_dims,
        )

    def to_json(self) -> dict:
        return {
            "in_dims": list(self.in_dims),
            "out_dims": list(self.out_dims),
            "blocks": [
                [matrix_to_json(self.blocks[k, l]) for l in range(self.out_flat)]
                for k in range(self.out_flat)
            ],
            "unital": bool(self.unital),
        }

    @classmethod
    def from_json(cls, d: dict) -> "QChannel":
        blocks = np.array(
            [[matrix_from_json(b) for b in row] for row in d["blocks"]]
        )
        chan = cls(blocks, d["in_dims"], d["out_dims"])
        if bool(d.get("unital", chan.unital)) != chan.unital:
            raise ValueError("stored unital flag contradicts the blocks")
        return chan

    def __repr__(self) -> str:
        kind = "unital" if self.unital else "sub-unital"
        return f"QChannel({self.in_dims} -> {self.out_dims}, {kind})"


def _same_dims(a, b) -> None:
    if a.dims != b.dims:
        raise DimensionError(f"dims mismatch: {a.dims} vs {b.dims}")


def validity(sigma: QState, p: Effect) -> float:
    """Born validity sigma |= p = tr(sigma p), clamped to [0, 1]."""
    _same_dims(sigma, p)
    v = complex(np.trace(sigma.mat @ p.mat))
    if abs(v.imag) > 1e-10:
        raise ValueError(f"validity has imaginary part {v.imag:.3e}")
    x = v.real
    if x < -1e-10 or x > 1.0 + 1e-10:
        raise ValueError(f"validity {x!r} leaves [0, 1]")
    return min(1.0, max(0.0, x))


def orthosupplement(p: Effect) -> Effect:
    """The negation I - p."""
    return Effect(np.eye(p.flat) - p.mat, p.dims)


def andthen(p: Effect, q: Effect) -> Effect:
    """Sequential conjunction p & q = sqrt(p) q sqrt(p).

    Commutative exactly when p and q commute; the order matters in
    general, which is what blocks a naive successive-conditioning law.
    """
    _same_dims(p, q)
    root = psd_sqrt(p.mat)
    return Effect(root @ q.mat @ root, p.dims)


def condition_lower(sigma: QState, p: Effect) -> QState:
    """sigma|_p = sqrt(p) sigma sqrt(p) / validity. Product-rule form."""
    _same_dims(sigma, p)
    v = validity(sigma, p)
    if v <= ZERO_VALIDITY:
        raise ZeroValidityError(f"evidence has validity {v:.3e}")
    root = psd_sqrt(p.mat)
    return QState(root @ sigma.mat @ root / v, sigma.dims)


def condition_upper(sigma: QState, p: Effect) -> QState:
    """sigma|^p = sqrt(sigma) p sqrt(sigma) / validity. Bayes-rule form."""
    _same_dims(sigma, p)
    v = validity(sigma, p)
    if v <= ZERO_VALIDITY:
        raise ZeroValidityError(f"evidence has validity {v:.3e}")
    root = psd_sqrt(sigma.mat)
    return QState(root @ p.mat @ root / v, sigma.dims)


def asrt(p: Effect) -> QChannel:
    """Assert map of p: blocks sqrt(p) |k><l| sqrt(p); unital iff p = I."""
    return QChannel.from_kraus([psd_sqrt(p.mat)], p.dims, p.dims)


def cup(n: int) -> QState:
    """Maximally correlated state (1/n) sum_ij |ii><jj| on H (x) H."""
    if n < 1:
        raise DimensionError("cup needs n >= 1")
    v = np.zeros(n * n, dtype=np.complex128)
    v[:: n + 1] = 1.0
    return QState(np.outer(v, v.conj()) / n, (n, n))


def cap(n: int) -> Effect:
    """The matching effect: same matrix as cup(n), read as a predicate.

    Normalized by 1/n so its eigenvalues stay in [0, 1] (it is a rank-1
    projection); the n=1 case is truth on the one-dimensional system.
    """
    return Effect(cup(n).mat, (n, n))


def hat_state(omega: Dist) -> QState:
    """Diagonal embedding of a distribution, dims = component sizes."""
    return QState(np.diag(omega.probs).astype(np.complex128), omega.space.shape)


def hat_pred(p: FuzzyPred) -> Effect:
    """Diagonal embedding of a fuzzy predicate."""
    return Effect(np.diag(p.values).astype(np.complex128), p.space.shape)


def hat_channel(c: StochChannel) -> QChannel:
    """Embed a stochastic matrix as a diagonal-block grid.

    blocks[k, k] = diag_x c(x)(y_k) and the off-diagonal blocks vanish,
    so pull/push reduce to the classical transforms on diagonal data.
    """
    n, m = c.dom.size, c.cod.size
    blocks = np.zeros((m, m, n, n), dtype=np.complex128)
    for k in range(m):
        blocks[k, k] = np.diag(c.matrix[:, k])
    return QChannel(blocks, c.dom.shape, c.cod.shape)
