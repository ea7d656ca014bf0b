"""The two comparison policies, sharing the SplitDecision interface."""

from __future__ import annotations

import numpy as np

from .config import SimConfig
from .episode import ActionRecord
from .envmarl import AgentView


class HeuristicSplit:
    """Uniform split over candidates that make geographic progress.

    The shared traffic-aware execution resampling is applied by the
    episode runner, exactly as for the learned policy.
    """

    use_resampling = True

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg

    def reset(self, cfg: SimConfig) -> None:
        pass

    def act_batch(self, views: list[AgentView], streams) -> list[ActionRecord]:
        records = []
        for view in views:
            a = np.zeros(self.cfg.max_neighbors + 1)
            progress = [
                n
                for n, d in enumerate(view.cand_distance, start=1)
                if d < view.own_distance
            ]
            if progress:
                for n in progress:
                    a[n] = 1.0 / len(progress)
            else:
                a[0] = 1.0
            records.append(ActionRecord(ratios=a, valid_dims=1 + len(view.candidates)))
        return records


class GreedyShortest:
    """Single-path forwarding to the candidate nearest the GBS.

    Ties break toward the lower global id.  With `greedy_progress_gate`
    set, forwarding is suppressed when even the best candidate is farther
    from the GBS than the current node.
    """

    use_resampling = False

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg

    def reset(self, cfg: SimConfig) -> None:
        pass

    def act_batch(self, views: list[AgentView], streams) -> list[ActionRecord]:
        records = []
        for view in views:
            a = np.zeros(self.cfg.max_neighbors + 1)
            if view.candidates:
                best = int(np.argmin(view.cand_distance))  # argmin is first on ties;
                # candidates are in ascending id order, so first = lowest id
                if self.cfg.greedy_progress_gate and view.cand_distance[best] >= view.own_distance:
                    a[0] = 1.0
                else:
                    a[1 + best] = 1.0
            else:
                a[0] = 1.0
            records.append(ActionRecord(ratios=a, valid_dims=1 + len(view.candidates)))
        return records
