"""Query selection: which pair of configurations to show next.

The acquisition score of a candidate pair is the empirical variance of
its utility difference under shapes sampled from the current model; a
high-variance pair is one the model is most uncertain how the respondent
would rank.  Every presented pair must be incomparable, i.e. not already
decided by monotonicity.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .model import HyperParams, SeedLike, ShapeSamples, joint_utilities, sample_shapes
from .space import MetricSpace, check_point, incomparable, incomparable_mask

__all__ = [
    "PolicyKind",
    "QueryPolicy",
    "QueryPair",
    "incomparable",
    "acquisition_value",
    "sample_incomparable_pairs",
    "propose_query",
]

# Rejection sampling of incomparable pairs draws at most this multiple of
# the requested count before giving up (e.g. a one-metric space, where no
# pair is ever incomparable).
REJECTION_CAP_FACTOR = 100


class PolicyKind(str, Enum):
    RANDOM = "random"
    SINGLE_ENTROPY = "single_entropy"
    PAIR_ENTROPY = "pair_entropy"


@dataclass(frozen=True)
class QueryPolicy:
    """How to pick the next query pair.

    n_candidates is the size of the random candidate set searched by the
    entropy policies; n_shape_samples the size of the one shape-sample set
    shared across all candidates of a proposal.
    """

    kind: PolicyKind = PolicyKind.PAIR_ENTROPY
    n_candidates: int = 2048
    n_shape_samples: int = 512
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be at least 1")
        if self.n_shape_samples < 2:
            raise ValueError("n_shape_samples must be at least 2")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "n_candidates": self.n_candidates,
            "n_shape_samples": self.n_shape_samples,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QueryPolicy":
        return cls(
            kind=PolicyKind(d["kind"]),
            n_candidates=int(d["n_candidates"]),
            n_shape_samples=int(d["n_shape_samples"]),
            seed=int(d["seed"]),
        )


@dataclass(frozen=True)
class QueryPair:
    """A proposed comparison, tagged with its acquisition score."""

    a: np.ndarray
    b: np.ndarray
    acquisition_value: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=np.float64))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=np.float64))
        if self.acquisition_value < 0.0:
            raise ValueError("acquisition_value cannot be negative")

    def __eq__(self, other) -> bool:
        if not isinstance(other, QueryPair):
            return NotImplemented
        return (
            np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
            and self.acquisition_value == other.acquisition_value
        )


def sample_incomparable_pairs(
    seed: SeedLike, space: MetricSpace, count: int, cap_factor: int = REJECTION_CAP_FACTOR
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform incomparable pairs by rejection sampling.

    Returns (A, B) arrays of shape (count, N).  Raises RuntimeError once
    cap_factor * count candidate draws failed to produce enough pairs.
    """
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    n = space.n_metrics
    kept_a, kept_b = [], []
    kept = 0
    drawn = 0
    cap = cap_factor * count
    while kept < count:
        batch = min(max(64, 2 * (count - kept)), cap - drawn)
        if batch <= 0:
            raise RuntimeError(
                f"could not sample {count} incomparable pairs within {cap} draws; "
                "is the space one-dimensional?"
            )
        A = rng.uniform(0.0, 1.0, size=(batch, n))
        B = rng.uniform(0.0, 1.0, size=(batch, n))
        drawn += batch
        ok = incomparable_mask(A, B, space)
        if ok.any():
            kept_a.append(A[ok])
            kept_b.append(B[ok])
            kept += int(ok.sum())
    return np.concatenate(kept_a)[:count], np.concatenate(kept_b)[:count]


def acquisition_value(
    f1, f2, theta: HyperParams, shapes: ShapeSamples, space: MetricSpace
) -> float:
    """Unbiased sample variance of the pair's utility difference.

    theta is accepted for signature symmetry with proposal code paths; the
    variance is computed on the supplied shape samples.
    """
    if len(shapes) < 2:
        raise ValueError("variance needs at least two shape samples")
    f1 = check_point(f1, space)
    f2 = check_point(f2, space)
    U = joint_utilities(np.stack([f1, f2]), shapes, space)
    return float(np.var(U[:, 1] - U[:, 0], ddof=1))


def _score_candidates(
    A: np.ndarray, B: np.ndarray, shapes: ShapeSamples, space: MetricSpace
) -> np.ndarray:
    endpoints = np.concatenate([A, B])
    U = joint_utilities(endpoints, shapes, space)
    diffs = U[:, len(A) :] - U[:, : len(A)]
    # reduce along the contiguous axis so each candidate's variance is
    # bit-identical to the single-pair computation (exact zeros for
    # degenerate models, exact ties for the index tie-break)
    return np.ascontiguousarray(diffs.T).var(axis=1, ddof=1)


def propose_query(
    policy: QueryPolicy,
    theta: HyperParams,
    incumbent: Optional[np.ndarray],
    space: MetricSpace,
) -> QueryPair:
    """Pick the next pair to present, deterministically for a fixed seed.

    random: one uniform incomparable pair, no model involved.
    pair_entropy: the best of n_candidates random incomparable pairs by
        acquisition value.
    single_entropy: anchors one side at the incumbent (the most recently
        preferred configuration) and searches partners; falls back to
        pair_entropy while no incumbent exists or when the rejection cap
        finds no incomparable partner at all.

    Ties in the acquisition value break toward the lowest candidate
    index.  The pair stream and the shape stream are derived separately
    from policy.seed, so policies that share a seed generate identical
    candidate pairs.
    """
    pair_ss, shape_ss = np.random.SeedSequence(policy.seed).spawn(2)
    kind = policy.kind
    if kind is PolicyKind.SINGLE_ENTROPY and incumbent is None:
        kind = PolicyKind.PAIR_ENTROPY

    if kind is PolicyKind.RANDOM:
        A, B = sample_incomparable_pairs(pair_ss, space, 1)
        return QueryPair(a=A[0], b=B[0], acquisition_value=0.0)

    shapes = sample_shapes(theta, policy.n_shape_samples, shape_ss)
    if kind is PolicyKind.SINGLE_ENTROPY:
        anchor = check_point(incumbent, space)
        rng = np.random.default_rng(pair_ss)
        partners = []
        kept = 0
        drawn = 0
        cap = REJECTION_CAP_FACTOR * policy.n_candidates
        while kept < policy.n_candidates and drawn < cap:
            batch = min(max(64, 2 * (policy.n_candidates - kept)), cap - drawn)
            C = rng.uniform(0.0, 1.0, size=(batch, space.n_metrics))
            drawn += batch
            ok = incomparable_mask(np.broadcast_to(anchor, C.shape), C, space)
            if ok.any():
                partners.append(C[ok])
                kept += int(ok.sum())
        if kept > 0:
            # a near-corner incumbent may not yield the full candidate
            # count within the cap; search whatever was found
            B = np.concatenate(partners)[: policy.n_candidates]
            A = np.broadcast_to(anchor, B.shape).copy()
        else:
            kind = PolicyKind.PAIR_ENTROPY
    if kind is PolicyKind.PAIR_ENTROPY:
        A, B = sample_incomparable_pairs(pair_ss, space, policy.n_candidates)

    scores = _score_candidates(A, B, shapes, space)
    best = int(np.argmax(scores))
    return QueryPair(a=A[best], b=B[best], acquisition_value=float(scores[best]))
