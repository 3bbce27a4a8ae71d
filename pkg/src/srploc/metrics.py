"""Per-frame multi-source localization scoring: matching, MAE, MDR, FAR.

An estimate and an active ground-truth source match when their azimuth
error is at most 30 degrees (wrapped); matching is one-to-one. Misses
and false alarms are counted against the total number of active
source-frames.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .geometry import Doa, azimuth_error

SUCCESS_AZIMUTH_ERROR = math.radians(30.0)


@dataclass
class MatchResult:
    """One frame's assignment: (estimate idx, truth idx) pairs plus leftovers."""

    pairs: list[tuple[int, int]] = field(default_factory=list)
    unmatched_estimates: list[int] = field(default_factory=list)
    unmatched_truths: list[int] = field(default_factory=list)


def match_frame(
    estimates: list[Doa],
    truths: list[Doa],
    max_azimuth_error: float = SUCCESS_AZIMUTH_ERROR,
) -> MatchResult:
    """Greedy one-to-one matching by ascending azimuth error.

    Candidate pairs with azimuth error above the gate are never
    matched.
    """
    cand = [
        (azimuth_error(e.azimuth, t.azimuth), i, j)
        for i, e in enumerate(estimates)
        for j, t in enumerate(truths)
    ]
    cand.sort(key=lambda c: (c[0], c[1], c[2]))
    used_e: set[int] = set()
    used_t: set[int] = set()
    res = MatchResult()
    for err, i, j in cand:
        if err > max_azimuth_error or i in used_e or j in used_t:
            continue
        used_e.add(i)
        used_t.add(j)
        res.pairs.append((i, j))
    res.unmatched_estimates = [i for i in range(len(estimates)) if i not in used_e]
    res.unmatched_truths = [j for j in range(len(truths)) if j not in used_t]
    return res


def optimal_match_frame(
    estimates: list[Doa],
    truths: list[Doa],
    max_azimuth_error: float = SUCCESS_AZIMUTH_ERROR,
) -> MatchResult:
    """Exhaustive assignment maximizing matches, then minimizing total
    azimuth error. Cross-check for the greedy matcher on small frames."""
    if len(estimates) > 6 or len(truths) > 6:
        raise ValueError("exhaustive matching is limited to small frames")
    errs = {
        (i, j): azimuth_error(e.azimuth, t.azimuth)
        for i, e in enumerate(estimates)
        for j, t in enumerate(truths)
    }
    best: tuple[int, float, list[tuple[int, int]]] = (0, 0.0, [])
    e_idx = range(len(estimates))
    for r in range(min(len(estimates), len(truths)), -1, -1):
        for e_subset in itertools.combinations(e_idx, r):
            for t_perm in itertools.permutations(range(len(truths)), r):
                pairs = [
                    (i, j)
                    for i, j in zip(e_subset, t_perm)
                    if errs[(i, j)] <= max_azimuth_error
                ]
                total = sum(errs[p] for p in pairs)
                if len(pairs) > best[0] or (len(pairs) == best[0] and total < best[1]):
                    best = (len(pairs), total, pairs)
        if best[0] == r:
            break
    res = MatchResult(pairs=sorted(best[2]))
    matched_e = {i for i, _ in best[2]}
    matched_t = {j for _, j in best[2]}
    res.unmatched_estimates = [i for i in range(len(estimates)) if i not in matched_e]
    res.unmatched_truths = [j for j in range(len(truths)) if j not in matched_t]
    return res


@dataclass
class MetricsReport:
    """Aggregate scores; MAE/MDR/FAR are None when undefined."""

    mae_azimuth_deg: float | None
    mae_elevation_deg: float | None
    mdr_percent: float | None
    far_percent: float | None
    num_active: int
    num_detected: int
    num_matched: int
    num_missed: int
    num_false: int

    def summary(self) -> str:
        def fmt(v, unit):
            return "n/a" if v is None else f"{v:.2f}{unit}"

        return (
            f"active {self.num_active}  detected {self.num_detected}  "
            f"matched {self.num_matched}\n"
            f"MAE azimuth {fmt(self.mae_azimuth_deg, ' deg')}  "
            f"elevation {fmt(self.mae_elevation_deg, ' deg')}\n"
            f"MDR {fmt(self.mdr_percent, ' %')}  FAR {fmt(self.far_percent, ' %')}"
        )


def score(
    estimates_per_frame: list[list[Doa]],
    truths_per_frame: list[list[Doa]],
    max_azimuth_error: float = SUCCESS_AZIMUTH_ERROR,
) -> MetricsReport:
    """Score per-frame estimates against per-frame active truths.

    MDR = 100 * missed / active, FAR = 100 * false / active, both over
    all frames; MAE is averaged over matched pairs only. Frames with no
    active truth still contribute their estimates as false alarms.
    """
    if len(estimates_per_frame) != len(truths_per_frame):
        raise ValueError(
            f"{len(estimates_per_frame)} estimate frames vs "
            f"{len(truths_per_frame)} truth frames"
        )
    active = detected = matched = missed = false = 0
    az_sum = el_sum = 0.0
    for ests, trus in zip(estimates_per_frame, truths_per_frame):
        res = match_frame(ests, trus, max_azimuth_error)
        active += len(trus)
        detected += len(ests)
        matched += len(res.pairs)
        missed += len(res.unmatched_truths)
        false += len(res.unmatched_estimates)
        for i, j in res.pairs:
            az_sum += float(azimuth_error(ests[i].azimuth, trus[j].azimuth))
            el_sum += abs(ests[i].elevation - trus[j].elevation)
    return MetricsReport(
        mae_azimuth_deg=math.degrees(az_sum / matched) if matched else None,
        mae_elevation_deg=math.degrees(el_sum / matched) if matched else None,
        mdr_percent=100.0 * missed / active if active else None,
        far_percent=100.0 * false / active if active else None,
        num_active=active,
        num_detected=detected,
        num_matched=matched,
        num_missed=missed,
        num_false=false,
    )
