"""Decision procedure for the dilation / logarithm-like dichotomy.

Finite evidence cannot decide a limit, so every verdict comes with the curves
it was read from and the thresholds used; ambiguous cases are reported as
``Inconclusive`` instead of being forced.
"""
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np

from .concave_lab import lambda_estimate
from .errors import BoundedTransform
from .transforms import GridSpec, nondecreasing_defect

DEFAULT_SCHEDULE = (1e2, 1e3, 1e4, 1e5, 1e6)


class Verdict(str, Enum):
    APPROXIMATE_DILATION = "ApproximateDilation"
    LOG_LIKE = "LogLike"
    NEITHER = "Neither"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Thresholds:
    plateau_rtol: float = 1e-3
    plateau_atol: float = 1e-9
    # relative changes in [plateau_rtol, ambiguity_factor * plateau_rtol) are undecided
    ambiguity_factor: float = 10.0
    lambda_min: float = 1e-6
    unbounded_min: float = 1.0
    # λ̂ is probed this far beyond the largest schedule entry
    lambda_probe_factor: float = 1e6
    t_min: float = 1e-2


@dataclass
class ClassificationReport:
    eta_hat: float
    lambda_hat: float
    dilation_residual: list
    doubling_gap: list
    unboundedness_witness: tuple
    verdict: Verdict
    thresholds_used: dict
    eta_witness: tuple = None
    tests: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "verdict": self.verdict.value,
            "eta_hat": self.eta_hat,
            "eta_witness": None if self.eta_witness is None else list(self.eta_witness),
            "lambda_hat": self.lambda_hat,
            "dilation_residual": [list(p) for p in self.dilation_residual],
            "doubling_gap": [list(p) for p in self.doubling_gap],
            "unboundedness_witness": list(self.unboundedness_witness),
            "tests": dict(self.tests),
            "thresholds_used": dict(self.thresholds_used),
        }


def evidence_grid(T_schedule, density, t_min):
    """Geometric grid with ``density`` points per decade from t_min to max(T), plus 0 and every T."""
    T_max = float(max(T_schedule))
    decades = np.log10(T_max / t_min)
    count = max(3, int(np.ceil(decades * density)) + 2)
    t = GridSpec.geometric(t_min, T_max, count).points()
    return np.union1d(t, np.asarray(T_schedule, dtype=float))


def running_sup_at(t, values, T_schedule):
    """[(T, max of values over t ≤ T)] for each T."""
    run = np.maximum.accumulate(values)
    idx = np.searchsorted(t, T_schedule, side="right") - 1
    return [(float(T), float(run[i])) for T, i in zip(T_schedule, idx)]


def plateau_state(curve, th):
    """'plateau', 'ambiguous' or 'growing' from the last two curve values."""
    a, b = curve[-2][1], curve[-1][1]
    if abs(a) <= th.plateau_atol and abs(b) <= th.plateau_atol:
        return "plateau"
    rel = abs(b - a) / max(abs(a), abs(b))
    if rel < th.plateau_rtol:
        return "plateau"
    if rel < th.plateau_rtol * th.ambiguity_factor:
        return "ambiguous"
    return "growing"


def classify_transform(phi, T_schedule=DEFAULT_SCHEDULE, density=256, thresholds=None):
    """Evidence curves and a verdict for an (approximately nondecreasing) transform φ.

    ApproximateDilation needs λ̂ > λ_min and a plateau in
    sup_{t≤T} |φ(t) − λ̂t|; LogLike needs a plateau in sup_{t≤T} (φ(2t) − φ(t)).
    Exactly one passing test gives that verdict, none gives Neither, and an
    ambiguous plateau or two passing tests give Inconclusive.
    """
    th = thresholds or Thresholds()
    schedule = sorted(float(T) for T in T_schedule)
    if len(schedule) < 2:
        raise ValueError("need at least two schedule entries to detect a plateau")
    T_max = schedule[-1]
    top = float(phi(T_max))
    if not top > th.unbounded_min:
        raise BoundedTransform(
            f"phi({T_max!r}) = {top!r} does not exceed {th.unbounded_min!r}; "
            "the dichotomy needs an unbounded transform",
            witness=(T_max, top),
        )

    t = evidence_grid(schedule, density, th.t_min)
    v = np.asarray(phi(t), dtype=float)
    eta, eta_wit = nondecreasing_defect(phi, t)
    lam = lambda_estimate(phi, T_max * th.lambda_probe_factor)
    lam_hat = lam.lambda_hat

    residual = running_sup_at(t, np.abs(v - lam_hat * t), schedule)
    gap = running_sup_at(t, np.asarray(phi(2 * t)) - v, schedule)

    dil_state = plateau_state(residual, th) if lam_hat > th.lambda_min else "rejected"
    log_state = plateau_state(gap, th)
    if "ambiguous" in (dil_state, log_state):
        verdict = Verdict.INCONCLUSIVE
    elif dil_state == "plateau" and log_state == "plateau":
        # the two branches are mutually exclusive; finite evidence disagrees
        verdict = Verdict.INCONCLUSIVE
    elif dil_state == "plateau":
        verdict = Verdict.APPROXIMATE_DILATION
    elif log_state == "plateau":
        verdict = Verdict.LOG_LIKE
    else:
        verdict = Verdict.NEITHER

    used = asdict(th)
    used.update(
        T_schedule=schedule,
        density=density,
        lambda_probe_T=lam.T_used,
        grid_points=int(t.size),
    )
    return ClassificationReport(
        eta_hat=eta,
        lambda_hat=lam_hat,
        dilation_residual=residual,
        doubling_gap=gap,
        unboundedness_witness=(T_max, top),
        verdict=verdict,
        thresholds_used=used,
        eta_witness=eta_wit,
        tests={"dilation": dil_state, "log_like": log_state},
    )


def midconcavity_from_hyperbolicity_bound(eta_hat, delta):
    """½η + δ: the midpoint-concavity budget of φ if its half line is δ-hyperbolic."""
    if eta_hat < 0 or delta < 0:
        raise ValueError("eta and delta must be nonnegative")
    return 0.5 * eta_hat + delta


def with_thresholds(**overrides):
    return replace(Thresholds(), **overrides)
