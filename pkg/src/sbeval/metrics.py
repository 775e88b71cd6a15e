"""Stability/similarity/diversity scoring, character weights and ranking.

Score arrays are indexed ``[i, j, k]`` = (trial, character, program).
Failed trials carry sta = sim = 0 and no probability vector.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import EvaluationConfig


def similarity(v, target_index: int) -> float:
    return float(v[target_index])


def _as_list(u) -> list[float]:
    return [float(a) for a in (u.tolist() if isinstance(u, np.ndarray) else u)]


def _norm(u: list[float]) -> float:
    return math.sqrt(math.fsum(a * a for a in u))


def _distance(u: list[float], v: list[float], nu: float, nv: float) -> float:
    if nu == 0.0 or nv == 0.0 or u == v:
        return 0.0
    dot = math.fsum(a * b for a, b in zip(u, v))
    return min(max(1.0 - dot / (nu * nv), 0.0), 1.0)


def cosine_distance(u, v) -> float:
    """1 - cos(u, v); zero when either vector is zero or the two are equal.

    Sums use ``math.fsum`` so the result does not depend on summation order.
    """
    u, v = _as_list(u), _as_list(v)
    return _distance(u, v, _norm(u), _norm(v))


def pair_count(trials: int) -> int:
    """Unordered pairs of distinct trials, 0.5*T*(T+1) - T."""
    return trials * (trials + 1) // 2 - trials


def diversity(vectors, trials: int) -> float:
    """Mean pairwise cosine distance over the present vectors.

    The denominator is the pair count for all ``trials`` trials, so missing
    (failed) trials pull the score down.
    """
    if trials < 2:
        raise ValueError("diversity needs T >= 2")
    vectors = list(vectors)
    if len(vectors) > trials:
        raise ValueError(f"{len(vectors)} vectors for {trials} trials")
    items = [(u, _norm(u)) for u in map(_as_list, vectors)]
    total = math.fsum(
        _distance(u, v, nu, nv) for (u, nu), (v, nv) in itertools.combinations(items, 2)
    )
    return total / pair_count(trials)


def weight_factor(mean_score: float, n_chars: int) -> float:
    return max(1.0 - mean_score, 1.0 / n_chars)


@dataclass(frozen=True)
class Weights:
    w_sta: np.ndarray
    w_sim: np.ndarray
    w_div: np.ndarray

    @property
    def weight(self) -> np.ndarray:
        return self.w_sta * self.w_sim * self.w_div


def character_weights(sta, sim, div, n_chars: int | None = None) -> Weights:
    """``sta``/``sim`` have shape (T, C, P); ``div`` has shape (C, P).

    sta and sim are averaged over trials and programs, div over programs only.
    """
    sta = np.asarray(sta, dtype=np.float64)
    sim = np.asarray(sim, dtype=np.float64)
    div = np.asarray(div, dtype=np.float64)
    if n_chars is None:
        n_chars = sta.shape[1]
    floor = 1.0 / n_chars
    return Weights(
        np.maximum(1.0 - sta.mean(axis=(0, 2)), floor),
        np.maximum(1.0 - sim.mean(axis=(0, 2)), floor),
        np.maximum(1.0 - div.mean(axis=1), floor),
    )


def trial_score(weight: float, sta: float, sim: float) -> float:
    return weight * sta * sim


def character_score(div: float, trial_scores) -> float:
    trial_scores = list(trial_scores)
    return div * math.fsum(trial_scores) / len(trial_scores)


def competition_ranks(scores) -> list[int]:
    """Descending "1224" ranking: ties share the best rank, the next rank skips."""
    scores = [float(s) for s in scores]
    return [1 + sum(other > s for other in scores) for s in scores]


def normalize(prompt_scores) -> np.ndarray:
    """Percentage share of the summed prompt scores (all zero if the sum is zero)."""
    prompt_scores = np.asarray(prompt_scores, dtype=np.float64)
    total = prompt_scores.sum()
    if total <= 0:
        return np.zeros_like(prompt_scores)
    return 100.0 * prompt_scores / total


@dataclass(frozen=True)
class ProgramResult:
    program: str
    prompt: float
    norm_prompt: float
    rank: int


@dataclass(frozen=True)
class RankedReport:
    """Final standings plus every intermediate score array."""

    programs: tuple[str, ...]
    alphabet: tuple[str, ...]
    prompt: np.ndarray
    norm_prompt: np.ndarray
    ranks: tuple[int, ...]
    char: np.ndarray | None = None
    div: np.ndarray | None = None
    trial: np.ndarray | None = None
    weights: Weights | None = None

    def standings(self) -> list[ProgramResult]:
        """Rows sorted by rank; ties keep input order."""
        rows = [
            ProgramResult(p, float(s), float(n), r)
            for p, s, n, r in zip(self.programs, self.prompt, self.norm_prompt, self.ranks)
        ]
        return sorted(rows, key=lambda row: row.rank)


def rank_prompt_scores(programs, prompt_scores, alphabet=()) -> RankedReport:
    prompt_scores = np.asarray(prompt_scores, dtype=np.float64)
    norm = normalize(prompt_scores)
    return RankedReport(tuple(programs), tuple(alphabet), prompt_scores, norm, tuple(competition_ranks(norm)))


def aggregate_and_rank(char_scores, config: EvaluationConfig, programs=None) -> RankedReport:
    """``char_scores`` has shape (C, P); prompt score is the mean over characters."""
    char_scores = np.asarray(char_scores, dtype=np.float64)
    if programs is None:
        programs = [f"program_{k + 1}" for k in range(char_scores.shape[1])]
    prompt = char_scores.sum(axis=0) / config.characters
    report = rank_prompt_scores(programs, prompt, config.alphabet)
    return RankedReport(
        report.programs, report.alphabet, report.prompt, report.norm_prompt, report.ranks, char=char_scores
    )


def score_tables(sta, sim, div, config: EvaluationConfig, programs=None) -> RankedReport:
    """Weights, trial, character and prompt scores from the raw metric tables.

    ``sta``/``sim`` have shape (T, C, P) and ``div`` (C, P); every program's
    raw metrics must be present since the weights pool all of them.
    """
    sta = np.asarray(sta, dtype=np.float64)
    sim = np.asarray(sim, dtype=np.float64)
    div = np.asarray(div, dtype=np.float64)
    T, C, P = sta.shape
    if (T, C) != (config.trials, config.characters) or div.shape != (C, P) or sim.shape != sta.shape:
        raise ValueError(
            f"score arrays sta{sta.shape} sim{sim.shape} div{div.shape} do not match "
            f"T={config.trials} C={config.characters}"
        )
    weights = character_weights(sta, sim, div, C)
    trial = weights.weight[None, :, None] * sta * sim
    char = np.array(
        [[character_score(div[j, k], trial[:, j, k]) for k in range(P)] for j in range(C)]
    ).reshape(C, P)
    ranked = aggregate_and_rank(char, config, programs)
    return RankedReport(
        ranked.programs, ranked.alphabet, ranked.prompt, ranked.norm_prompt, ranked.ranks,
        char=char, div=div, trial=trial, weights=weights,
    )


def score_all(sta, sim, vectors, config: EvaluationConfig, programs=None) -> RankedReport:
    """Whole scoring pass. ``vectors[j][k]`` lists the probability vectors of
    the successful trials for character j, program k."""
    sta = np.asarray(sta, dtype=np.float64)
    T, C, P = sta.shape
    div = np.array([[diversity(vectors[j][k], T) for k in range(P)] for j in range(C)]).reshape(C, P)
    return score_tables(sta, sim, div, config, programs)
