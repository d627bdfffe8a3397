"""Detection-selection policies.

Four variants of the keep/drop rule applied before planning:

  confidence_only  keep iff conf >= tau_c (the classical filter)
  cascade          keep iff conf >= tau_c and kappa >= tau_k
  override         keep iff kappa >= tau_k_keep or conf >= tau_c
  binned_map       keep iff conf >= tau_c of the criticality bin

All thresholds are inclusive so sweeping over observed score values is
exact. Criticality is computed from the detection's own predicted
kinematics - at filtering time there is no ground truth to lean on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .criticality import OcmParams, criticality
from .scene import Detection, EgoState

LOW_CONFIDENCE = "low_confidence"
LOW_CRITICALITY = "low_criticality"


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class ConfidenceOnly:
    tau_c: float

    def __post_init__(self):
        _check_unit("tau_c", self.tau_c)

    def keep(self, confidence: float, kappa: float) -> tuple[bool, str]:
        if confidence >= self.tau_c:
            return True, ""
        return False, LOW_CONFIDENCE

    def thresholds(self) -> dict:
        return {"tau_c": self.tau_c}


@dataclass(frozen=True)
class Cascade:
    """Confidence filter first, then drop what little criticality remains."""

    tau_c: float
    tau_k: float

    def __post_init__(self):
        _check_unit("tau_c", self.tau_c)
        _check_unit("tau_k", self.tau_k)

    def keep(self, confidence: float, kappa: float) -> tuple[bool, str]:
        if confidence < self.tau_c:
            return False, LOW_CONFIDENCE
        if kappa < self.tau_k:
            return False, LOW_CRITICALITY
        return True, ""

    def thresholds(self) -> dict:
        return {"tau_c": self.tau_c, "tau_k": self.tau_k}


@dataclass(frozen=True)
class Override:
    """Highly critical detections are kept regardless of confidence."""

    tau_c: float
    tau_k_keep: float

    def __post_init__(self):
        _check_unit("tau_c", self.tau_c)
        _check_unit("tau_k_keep", self.tau_k_keep)

    def keep(self, confidence: float, kappa: float) -> tuple[bool, str]:
        if kappa >= self.tau_k_keep or confidence >= self.tau_c:
            return True, ""
        return False, LOW_CONFIDENCE

    def thresholds(self) -> dict:
        return {"tau_c": self.tau_c, "tau_k_keep": self.tau_k_keep}


@dataclass(frozen=True)
class BinnedMap:
    """Step function from criticality to confidence threshold.

    bins are (kappa_lower_bound, tau_c) pairs; the bin with the largest
    lower bound <= kappa applies. Bounds must start at 0 and strictly
    increase.
    """

    bins: tuple[tuple[float, float], ...]

    def __post_init__(self):
        bins = tuple((float(k), float(t)) for k, t in self.bins)
        if not bins:
            raise ValueError("binned_map needs at least one bin")
        if bins[0][0] != 0.0:
            raise ValueError("first bin must start at kappa = 0")
        for (k0, _), (k1, _) in zip(bins, bins[1:]):
            if not k1 > k0:
                raise ValueError("bin bounds must strictly increase")
        for k, t in bins:
            _check_unit("kappa_lower_bound", k)
            _check_unit("bin tau_c", t)
        object.__setattr__(self, "bins", bins)

    def threshold_for(self, kappa: float) -> float:
        tau = self.bins[0][1]
        for k, t in self.bins:
            if k <= kappa:
                tau = t
            else:
                break
        return tau

    def keep(self, confidence: float, kappa: float) -> tuple[bool, str]:
        if confidence >= self.threshold_for(kappa):
            return True, ""
        return False, LOW_CONFIDENCE

    def thresholds(self) -> dict:
        return {"bins": [list(b) for b in self.bins]}


FilterPolicy = Union[ConfidenceOnly, Cascade, Override, BinnedMap]

POLICY_NAMES = {
    ConfidenceOnly: "confidence_only",
    Cascade: "cascade",
    Override: "override",
    BinnedMap: "binned_map",
}


def policy_name(policy: FilterPolicy) -> str:
    return POLICY_NAMES[type(policy)]


@dataclass(frozen=True)
class FilterOutcome:
    """Kept/dropped partition of the input detections, in input order."""

    kept: tuple[Detection, ...]
    kept_indices: tuple[int, ...]
    dropped: tuple[tuple[Detection, str], ...]
    dropped_indices: tuple[int, ...]
    kappas: tuple[float, ...]  # per input detection, in input order


def apply_policy(
    detections: Sequence[Detection],
    ego: EgoState,
    policy: FilterPolicy,
    params: OcmParams,
) -> FilterOutcome:
    kappas = tuple(criticality(ego, d.box, params).kappa for d in detections)
    kept, kept_idx, dropped, dropped_idx = [], [], [], []
    for i, (det, kappa) in enumerate(zip(detections, kappas)):
        ok, reason = policy.keep(det.confidence, kappa)
        if ok:
            kept.append(det)
            kept_idx.append(i)
        else:
            dropped.append((det, reason))
            dropped_idx.append(i)
    return FilterOutcome(tuple(kept), tuple(kept_idx), tuple(dropped), tuple(dropped_idx), kappas)


def policy_monotone_check(policy: FilterPolicy, samples: int = 101) -> bool:
    """True iff the effective confidence threshold never rises with criticality.

    Guards binned_map configurations against "more critical means harder to
    keep"; the fixed-threshold variants pass trivially.
    """
    if not isinstance(policy, BinnedMap):
        return True
    taus = [policy.threshold_for(i / (samples - 1)) for i in range(samples)]
    return all(b <= a for a, b in zip(taus, taus[1:]))
