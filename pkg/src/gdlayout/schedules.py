"""Per-criterion weight schedules: smooth-step segments with plateaus.

A schedule is a sorted, non-overlapping list of segments
(t_start, t_stop, w_start, w_stop); between segments the weight holds the
previous segment's stop value, before the first it holds that segment's
start value. Interpolation uses f(x) = 3x^2 - 2x^3.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Segment:
    t_start: float
    t_stop: float
    w_start: float
    w_stop: float

    def __post_init__(self):
        if self.t_stop <= self.t_start:
            raise ValueError("segment needs t_stop > t_start")
        if self.w_start < 0 or self.w_stop < 0:
            raise ValueError("weights must be non-negative")


def smooth_step_weight(t: float, seg: Segment) -> float:
    """Scaled and translated smooth-step on one segment (clamped outside)."""
    x = (t - seg.t_start) / (seg.t_stop - seg.t_start)
    x = min(1.0, max(0.0, x))
    f = 3.0 * x * x - 2.0 * x * x * x
    return (seg.w_stop - seg.w_start) * f + seg.w_start


class Schedule:
    def __init__(self, segments=()):
        segs = [s if isinstance(s, Segment) else Segment(*s) for s in segments]
        segs.sort(key=lambda s: s.t_start)
        for a, b in zip(segs, segs[1:]):
            if b.t_start < a.t_stop:
                raise ValueError("schedule segments overlap")
        self.segments = segs

    @classmethod
    def constant(cls, w: float) -> "Schedule":
        if w < 0:
            raise ValueError("weights must be non-negative")
        sched = cls(())
        sched._base = w
        return sched

    _base = 0.0

    def __call__(self, t: float) -> float:
        if not self.segments:
            return self._base
        if t < self.segments[0].t_start:
            return self.segments[0].w_start
        current = self.segments[0]
        for seg in self.segments:
            if t < seg.t_start:
                break
            current = seg
        return smooth_step_weight(t, current)

    def ever_positive(self, maxiter: int) -> bool:
        if not self.segments:
            return self._base > 0
        if self.segments[0].w_start > 0:
            return True
        return any(s.w_start > 0 or s.w_stop > 0 for s in self.segments if s.t_start <= maxiter)


def as_schedule(value) -> Schedule:
    """Coerce a constant, a Schedule, or a segment list into a Schedule."""
    if isinstance(value, Schedule):
        return value
    if isinstance(value, (int, float)):
        return Schedule.constant(float(value))
    return Schedule(value)
