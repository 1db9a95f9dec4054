"""The active preference-learning loop, end to end.

A session asks 5N random incomparable initialization queries, then
alternates: refit the hyperparameters on everything observed so far,
propose the next pair by the session's policy, record the respondent's
choice.  All randomness derives from the session seed plus the query
index, so a session replays bit-identically from its exported document.
"""

from __future__ import annotations

import json
import time
import uuid
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np

from .acquisition import PolicyKind, QueryPair, QueryPolicy, propose_query, sample_incomparable_pairs
from .fitting import FitConfig, FitResult, box_center, fit_mle
from .likelihood import PreferenceDataset
from .model import HyperParams
from .space import MetricSpace

SESSION_FORMAT_VERSION = 1

# Initialization pairs per metric, and the default total budget multiplier.
INIT_QUERIES_PER_METRIC = 5
DEFAULT_BUDGET_PER_METRIC = 10

# Intermediate refits inside the loop use a lighter multi-start schedule
# than the standalone fit defaults; the final fit after the last response
# runs the full schedule.  Warm starts carry the previous optimum through.
REFIT_N_STARTS = 3
REFIT_MAX_EVALS = 150

# Stream tags for deriving per-purpose seeds from the session seed.
_STREAM_INIT = 0
_STREAM_FIT = 1
_STREAM_ACQUIRE = 2
_STREAM_INTROSPECT = 3


class BudgetExhaustedError(RuntimeError):
    """next_query was called on a completed session."""


class NoPendingQueryError(RuntimeError):
    """record_response was called with no outstanding query."""


class SessionFormatError(ValueError):
    """A session document is corrupt or has an unsupported version."""


class SessionReplayError(RuntimeError):
    """A replay diverged from the recorded history."""


class OracleResponse(str, Enum):
    A = "A"
    B = "B"
    EQUAL = "E"


@dataclass(frozen=True)
class HistoryEntry:
    pair: QueryPair
    response: OracleResponse
    timestamp_ms: int


def derived_seed(base_seed: int, *key: int) -> int:
    """A stable integer sub-seed for one purpose within a session."""
    ss = np.random.SeedSequence([int(base_seed), *[int(k) for k in key]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _now_ms() -> int:
    return time.time_ns() // 1_000_000


class PreferenceSession:
    """State and operations of one respondent's preference-learning run."""

    def __init__(
        self,
        space: MetricSpace,
        policy: QueryPolicy,
        budget: int,
        fit_config: Optional[FitConfig] = None,
        seed: int = 0,
        refit_config: Optional[FitConfig] = None,
        session_id: Optional[str] = None,
    ):
        self.space = space
        self.policy = policy
        self.budget = int(budget)
        self.fit_config = fit_config if fit_config is not None else FitConfig()
        self.refit_config = (
            refit_config
            if refit_config is not None
            else replace(
                self.fit_config, n_starts=REFIT_N_STARTS, max_evals_per_start=REFIT_MAX_EVALS
            )
        )
        self.seed = int(seed)
        self.session_id = session_id if session_id is not None else uuid.uuid4().hex
        self.init_size = INIT_QUERIES_PER_METRIC * space.n_metrics
        if self.budget < self.init_size:
            raise ValueError(
                f"budget {self.budget} is below the {self.init_size} initialization queries"
            )
        # the fit box must be resolvable for this space
        self.fit_config.resolved_bounds(space.n_metrics)
        self.refit_config.resolved_bounds(space.n_metrics)

        self.dataset = PreferenceDataset(space)
        self.history: list[HistoryEntry] = []
        self.incumbent: Optional[np.ndarray] = None
        self.theta_mle: HyperParams = box_center(space.n_metrics, self.fit_config.bounds)
        self.last_fit: Optional[FitResult] = None
        self.n_fits = 0
        self._pending: Optional[QueryPair] = None
        self._finalized = False

        init_a, init_b = sample_incomparable_pairs(
            np.random.SeedSequence([self.seed, _STREAM_INIT]), space, self.init_size
        )
        self._init_pairs = [QueryPair(a=a, b=b) for a, b in zip(init_a, init_b)]

    # -- bookkeeping ------------------------------------------------------

    @property
    def queries_answered(self) -> int:
        return len(self.history)

    @property
    def is_complete(self) -> bool:
        return len(self.history) >= self.budget

    @property
    def in_initialization(self) -> bool:
        return len(self.history) < self.init_size

    @property
    def pending_query(self) -> Optional[QueryPair]:
        return self._pending

    @property
    def is_finalized(self) -> bool:
        return self._finalized

    # -- the loop ---------------------------------------------------------

    def _refit(self, config: FitConfig, fit_seed_key: int) -> None:
        config = replace(config, base_seed=derived_seed(self.seed, _STREAM_FIT, fit_seed_key))
        self.last_fit = fit_mle(self.dataset, config, self.space, warm_start=self.theta_mle)
        self.theta_mle = self.last_fit.theta_mle
        self.n_fits += 1

    def next_query(self) -> QueryPair:
        """The pair to present now; stable until a response is recorded."""
        if self.is_complete:
            raise BudgetExhaustedError(f"all {self.budget} queries have been answered")
        if self._pending is not None:
            return self._pending
        q_index = len(self.history)
        if q_index < self.init_size:
            pair = self._init_pairs[q_index]
        else:
            self._refit(self.refit_config, q_index)
            policy = replace(self.policy, seed=derived_seed(self.seed, _STREAM_ACQUIRE, q_index))
            pair = propose_query(policy, self.theta_mle, self.incumbent, self.space)
        self._pending = pair
        return pair

    def record_response(self, response: Union[OracleResponse, str]) -> "PreferenceSession":
        """Commit the respondent's choice for the pending query."""
        if self._pending is None:
            raise NoPendingQueryError("no query is awaiting a response")
        response = OracleResponse(response)
        pair = self._pending
        if response is OracleResponse.EQUAL:
            self.dataset.add_equivalence(pair.a, pair.b)
        elif response is OracleResponse.A:
            self.dataset.add_preference(worse=pair.b, better=pair.a)
            self.incumbent = pair.a
        else:
            self.dataset.add_preference(worse=pair.a, better=pair.b)
            self.incumbent = pair.b
        self.history.append(
            HistoryEntry(pair=pair, response=response, timestamp_ms=_now_ms())
        )
        self._pending = None
        return self

    def finalize(self) -> HyperParams:
        """Run the final full fit once the budget is exhausted."""
        if not self.is_complete:
            raise RuntimeError("cannot finalize before the budget is exhausted")
        if not self._finalized:
            self._refit(self.fit_config, self.budget)
            self._finalized = True
        return self.theta_mle

    def run_to_completion(
        self, oracle: Callable[[QueryPair], Union[OracleResponse, str]]
    ) -> "PreferenceSession":
        """Drive the loop with a response callback until the budget is spent."""
        while not self.is_complete:
            pair = self.next_query()
            self.record_response(oracle(pair))
        self.finalize()
        return self

    # -- persistence ------------------------------------------------------

    def to_document(self) -> dict:
        return {
            "version": SESSION_FORMAT_VERSION,
            "session_id": self.session_id,
            "n_metrics": self.space.n_metrics,
            "directions": [d.value for d in self.space.directions],
            "policy": self.policy.to_dict(),
            "budget": self.budget,
            "seeds": {"base": self.seed},
            "fit_config": self.fit_config.to_dict(),
            "refit_config": self.refit_config.to_dict(),
            "history": [
                {
                    "pair": {"a": e.pair.a.tolist(), "b": e.pair.b.tolist()},
                    "response": e.response.value,
                    "t": e.timestamp_ms,
                }
                for e in self.history
            ],
        }

    def save(self) -> bytes:
        return json.dumps(self.to_document(), indent=2).encode("utf-8")

    @classmethod
    def _from_header(cls, doc: dict) -> "PreferenceSession":
        try:
            if doc["version"] != SESSION_FORMAT_VERSION:
                raise SessionFormatError(
                    f"unsupported session format version {doc['version']!r}"
                )
            space = MetricSpace(doc["directions"])
            if len(doc["directions"]) != doc["n_metrics"]:
                raise SessionFormatError("directions do not match n_metrics")
            return cls(
                space=space,
                policy=QueryPolicy.from_dict(doc["policy"]),
                budget=int(doc["budget"]),
                fit_config=FitConfig.from_dict(doc["fit_config"]),
                seed=int(doc["seeds"]["base"]),
                refit_config=FitConfig.from_dict(doc["refit_config"]),
                session_id=doc["session_id"],
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SessionFormatError):
                raise
            raise SessionFormatError(f"malformed session document: {exc}") from exc

    @staticmethod
    def _parse(data: Union[bytes, str, dict]) -> dict:
        if isinstance(data, dict):
            return data
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise SessionFormatError(f"not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise SessionFormatError("session document must be a JSON object")
        return doc

    @classmethod
    def load(cls, data: Union[bytes, str, dict]) -> "PreferenceSession":
        """Rebuild a session from its document.

        The dataset and incumbent are reconstructed by replaying the
        recorded responses; the model state is left at the prior center
        (refits happen lazily on the next query or via `replay`).
        """
        doc = cls._parse(data)
        session = cls._from_header(doc)
        try:
            entries = [
                (
                    QueryPair(
                        a=np.asarray(e["pair"]["a"], dtype=np.float64),
                        b=np.asarray(e["pair"]["b"], dtype=np.float64),
                    ),
                    OracleResponse(e["response"]),
                    int(e["t"]),
                )
                for e in doc["history"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise SessionFormatError(f"malformed history entry: {exc}") from exc
        if len(entries) > session.budget:
            raise SessionFormatError("history exceeds the recorded budget")
        for pair, response, t in entries:
            session._pending = pair
            session.record_response(response)
            # keep the recorded timestamp rather than the replay time
            session.history[-1] = HistoryEntry(pair, response, t)
        return session

    @classmethod
    def replay(cls, data: Union[bytes, str, dict]) -> "PreferenceSession":
        """Re-drive the full loop against the recorded responses.

        Every proposal is recomputed (including the per-iteration refits)
        and checked against the recorded pair, so the resulting model
        state is bit-identical to the live session's.
        """
        doc = cls._parse(data)
        session = cls._from_header(doc)
        for i, entry in enumerate(doc["history"]):
            pair = session.next_query()
            rec_a = np.asarray(entry["pair"]["a"], dtype=np.float64)
            rec_b = np.asarray(entry["pair"]["b"], dtype=np.float64)
            if not (np.array_equal(pair.a, rec_a) and np.array_equal(pair.b, rec_b)):
                raise SessionReplayError(
                    f"replayed proposal {i} does not match the recorded pair"
                )
            session.record_response(OracleResponse(entry["response"]))
            session.history[-1] = HistoryEntry(
                session.history[-1].pair, session.history[-1].response, int(entry["t"])
            )
        if session.is_complete:
            session.finalize()
        return session

    def __eq__(self, other) -> bool:
        if not isinstance(other, PreferenceSession):
            return NotImplemented
        if (
            self.session_id != other.session_id
            or self.space != other.space
            or self.policy != other.policy
            or self.budget != other.budget
            or self.seed != other.seed
            or self.fit_config != other.fit_config
            or self.refit_config != other.refit_config
            or len(self.history) != len(other.history)
        ):
            return False
        for mine, theirs in zip(self.history, other.history):
            if (
                mine.response != theirs.response
                or mine.timestamp_ms != theirs.timestamp_ms
                or not np.array_equal(mine.pair.a, theirs.pair.a)
                or not np.array_equal(mine.pair.b, theirs.pair.b)
            ):
                return False
        return True


def init_session(
    space: MetricSpace,
    policy: QueryPolicy,
    budget: int,
    fit_config: Optional[FitConfig] = None,
    seed: int = 0,
    **kwargs,
) -> PreferenceSession:
    """Create a fresh session (see PreferenceSession)."""
    return PreferenceSession(
        space=space, policy=policy, budget=budget, fit_config=fit_config, seed=seed, **kwargs
    )


def save_session(session: PreferenceSession) -> bytes:
    return session.save()


def load_session(data: Union[bytes, str, dict]) -> PreferenceSession:
    return PreferenceSession.load(data)


def replay_session(data: Union[bytes, str, dict]) -> PreferenceSession:
    return PreferenceSession.replay(data)
