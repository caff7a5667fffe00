"""Randomised property checks of the isotropy bounds, runnable outside pytest.

Every check returns (ok, residual); a run tallies failures and the worst
residual per property family into a LemmaReport.
"""

import logging
from functools import partial
from typing import Callable, List, Tuple

import numpy as np

from isolab.channels import (
    amplitude_damping,
    apply_symmetric_channel_pauli,
    channel_isotropy,
    compose_channels,
    conjugate_channel,
    dephasing,
    depolarizing,
    mix_channels,
    random_symmetric_channel,
    rotation,
    state_isotropy,
)
from isolab.exceptions import AmbiguousToleranceError
from isolab.isotropy import DEFAULT_TOL, DEFAULT_TOL_ABS, classify
from isolab.lattice import equivalent, leq, meet
from isolab.models import LemmaReport, LemmaResult, QubitChannelPTM, SubgroupClass, SubgroupDescriptor
from isolab.pauli import decompose, pauli_form, product_state, random_state, relative_entropy, trace_distance
from isolab.projectors import (
    conjugated_project,
    fixed_point_residual,
    non_normalizer_witness,
    normalizer_samples,
    project,
    project_arrays,
    random_descriptor,
    random_member,
)
from isolab.su2 import act, conjugate_descriptor, haar_sample, random_axis

logger = logging.getLogger(__name__)

LEMMA_NAMES = (
    'tensor',
    'composition',
    'mixing',
    'conjugation',
    'monotonicity',
    'zero_distance',
    'idempotence',
    'relative_entropy_minimizer',
    'normalizer',
)

EXACT_TOL = 1e-12
ENTROPY_SLACK = 1e-10
WITNESS_GAP = 1e-3
ZERO_DISTANCE_EPS = 1e-3

_CLASSES = list(SubgroupClass)

Check = Callable[[np.random.Generator], Tuple[bool, float]]


def _max_abs(*pairs: Tuple[np.ndarray, np.ndarray]) -> float:
    return float(max(np.max(np.abs(np.asarray(x) - np.asarray(y))) for x, y in pairs))


def _channel_fixed_residual(H: SubgroupDescriptor, ch: QubitChannelPTM) -> float:
    """How far P_H moves the channel's (t, lambda) pair."""
    new_t, _, new_lambda = project_arrays(H, ch.t, np.zeros(3), ch.lambda_)
    return _max_abs((ch.t, new_t), (ch.lambda_, new_lambda))


def _random_class(rng: np.random.Generator) -> SubgroupClass:
    return _CLASSES[int(rng.integers(len(_CLASSES)))]


def _random_channel(rng: np.random.Generator, axis: np.ndarray) -> QubitChannelPTM:
    """One of the axial factories with a parameter away from degenerate values."""
    kind = int(rng.integers(4))
    if kind == 0:
        return rotation(float(rng.uniform(0.2, 1.2)), axis)
    if kind == 1:
        return dephasing(float(rng.uniform(0.2, 0.8)), axis)
    if kind == 2:
        return amplitude_damping(float(rng.uniform(0.2, 0.8)), axis)
    return depolarizing(float(rng.uniform(0.2, 0.8)))


def _channel_pair(rng: np.random.Generator) -> Tuple[QubitChannelPTM, QubitChannelPTM]:
    first = random_axis(rng)
    second = first if rng.integers(2) else random_axis(rng)
    return _random_channel(rng, first), _random_channel(rng, second)


def _check_bound(
    parts: List[SubgroupDescriptor], combined: SubgroupDescriptor, residual: float, tol: float
) -> Tuple[bool, float]:
    lower = meet(parts[0], parts[1])
    return leq(lower, combined) and residual <= tol, residual


def check_tensor(rng: np.random.Generator, tol: float, tol_abs: float) -> Tuple[bool, float]:
    """Iso(sigma_a x sigma_b) contains the meet of the factors' isotropies."""
    a = random_axis(rng) * rng.uniform(0.2, 1.0)
    b = a if rng.integers(2) else random_axis(rng) * rng.uniform(0.2, 1.0)
    Ha = state_isotropy(a, tol, tol_abs).descriptor
    Hb = state_isotropy(b, tol, tol_abs).descriptor
    pf = product_state(a, b)
    combined = classify(pf, tol, tol_abs).descriptor
    return _check_bound([Ha, Hb], combined, fixed_point_residual(meet(Ha, Hb), pf), tol)


def check_composition(rng: np.random.Generator, tol: float, tol_abs: float) -> Tuple[bool, float]:
    """Iso(E o F) contains Iso(E) meet Iso(F)."""
    e, f = _channel_pair(rng)
    He = channel_isotropy(e, tol, tol_abs).descriptor
    Hf = channel_isotropy(f, tol, tol_abs).descriptor
    composed = compose_channels(e, f)
    combined = channel_isotropy(composed, tol, tol_abs).descriptor
    return _check_bound([He, Hf], combined, _channel_fixed_residual(meet(He, Hf), composed), tol)


def check_mixing(rng: np.random.Generator, tol: float, tol_abs: float) -> Tuple[bool, float]:
    """Iso(p E + (1 - p) F) contains Iso(E) meet Iso(F)."""
    e, f = _channel_pair(rng)
    He = channel_isotropy(e, tol, tol_abs).descriptor
    Hf = channel_isotropy(f, tol, tol_abs).descriptor
    mixed = mix_channels(float(rng.uniform(0.1, 0.9)), e, f)
    combined = channel_isotropy(mixed, tol, tol_abs).descriptor
    return _check_bound([He, Hf], combined, _channel_fixed_residual(meet(He, Hf), mixed), tol)


def check_conjugation(rng: np.random.Generator, tol: float, tol_abs: float) -> Tuple[bool, float]:
    """Conjugating a channel or a state by g conjugates its isotropy by g."""
    g = haar_sample(rng, 1)[0]
    ch = _random_channel(rng, random_axis(rng))
    expected_ch = conjugate_descriptor(g, channel_isotropy(ch, tol, tol_abs).descriptor)
    moved_ch = conjugate_channel(g, ch)
    found_ch = channel_isotropy(moved_ch, tol, tol_abs).descriptor

    pf, _ = random_member(_random_class(rng), rng)
    expected_state = conjugate_descriptor(g, classify(pf, tol, tol_abs).descriptor)
    moved_state = act(g, pf)
    found_state = classify(moved_state, tol, tol_abs).descriptor

    residual = max(
        _channel_fixed_residual(expected_ch, moved_ch),
        fixed_point_residual(expected_state, moved_state),
    )
    ok = equivalent(expected_ch, found_ch) and equivalent(expected_state, found_state) and residual <= tol
    return ok, residual


def check_monotonicity(rng: np.random.Generator, tol: float, tol_abs: float) -> Tuple[bool, float]:
    """A symmetric operation never shrinks isotropy."""
    pf, _ = random_member(_random_class(rng), rng)
    before = classify(pf, tol, tol_abs).descriptor
    out = apply_symmetric_channel_pauli(random_symmetric_channel(rng), pf)
    after = classify(out, tol, tol_abs).descriptor
    residual = fixed_point_residual(before, out)
    return leq(before, after) and residual <= tol, residual


def check_zero_distance(rng: np.random.Generator, tol: float, tol_abs: float) -> Tuple[bool, float]:
    """Noisy members of two classes keep their classes while coming within eps of each other."""
    eps = ZERO_DISTANCE_EPS
    ok = True
    shrunk = []
    for subgroup_class in (_random_class(rng), _random_class(rng)):
        pf, _ = random_member(subgroup_class, rng)
        noisy = pauli_form(eps * pf.a, eps * pf.b, eps * pf.T)
        ok = ok and equivalent(classify(pf, tol, tol_abs).descriptor, classify(noisy, tol, tol_abs).descriptor)
        shrunk.append(noisy)
    excess = max(0.0, trace_distance(shrunk[0], shrunk[1]) - eps)
    return ok and excess <= EXACT_TOL, excess


def check_idempotence(rng: np.random.Generator, tol: float, tol_abs: float) -> Tuple[bool, float]:
    """P_H o P_H = P_H."""
    H = random_descriptor(_random_class(rng), rng)
    once = project(H, decompose(random_state(rng)))
    twice = project(H, once)
    residual = _max_abs((once.a, twice.a), (once.b, twice.b), (once.T, twice.T))
    return residual <= EXACT_TOL, residual


def check_relative_entropy_minimizer(
    rng: np.random.Generator, tol: float, tol_abs: float, n_competitors: int = 100
) -> Tuple[bool, float]:
    """P_H(rho) is the closest H-invariant state to rho in relative entropy."""
    H = random_descriptor(_random_class(rng), rng)
    pf = decompose(random_state(rng))
    best = relative_entropy(pf, project(H, pf))
    closest = min(relative_entropy(pf, project(H, decompose(random_state(rng)))) for _ in range(n_competitors))
    excess = max(0.0, best - closest)
    return excess <= ENTROPY_SLACK, excess


def check_normalizer(rng: np.random.Generator, tol: float, tol_abs: float) -> Tuple[bool, float]:
    """Normaliser elements commute with P_H; an element moving H does not."""
    H = random_descriptor(_random_class(rng), rng)
    pf = decompose(random_state(rng))
    g = normalizer_samples(H, rng, 1)[0]
    lhs = conjugated_project(g, H, pf)
    rhs = project(H, pf)
    residual = _max_abs((lhs.a, rhs.a), (lhs.b, rhs.b), (lhs.T, rhs.T))
    ok = residual <= EXACT_TOL

    witness = non_normalizer_witness(H)
    if witness is not None:
        mover, state = witness
        moved = conjugated_project(mover, H, state)
        fixed = project(H, state)
        ok = ok and _max_abs((moved.T, fixed.T)) >= WITNESS_GAP
    return ok, residual


_CHECKS = {
    'tensor': check_tensor,
    'composition': check_composition,
    'mixing': check_mixing,
    'conjugation': check_conjugation,
    'monotonicity': check_monotonicity,
    'zero_distance': check_zero_distance,
    'idempotence': check_idempotence,
    'relative_entropy_minimizer': check_relative_entropy_minimizer,
    'normalizer': check_normalizer,
}


def _run_lemma(name: str, check: Check, rng: np.random.Generator, n_trials: int) -> LemmaResult:
    failures = 0
    worst = 0.0
    for trial in range(n_trials):
        try:
            ok, residual = check(rng)
        except AmbiguousToleranceError as e:
            logger.warning("Lemma %s trial %d hit an ambiguous decision (%s=%.3e)", name, trial, e.quantity, e.value)
            ok, residual = False, e.value
        if not ok:
            failures += 1
            logger.debug("Lemma %s failed on trial %d (residual %.3e)", name, trial, residual)
        worst = max(worst, residual)
    return LemmaResult(name=name, trials=n_trials, failures=failures, worst_residual=worst, passed=failures == 0)


def run_lemma_suite(
    seed: int = 0,
    n_trials: int = 100,
    tol: float = DEFAULT_TOL,
    tol_abs: float = DEFAULT_TOL_ABS,
    n_competitors: int = 100,
) -> LemmaReport:
    """Run every property family; each gets its own child generator of the seed.

    Raises:
        ValueError: If n_trials < 1
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be at least 1, got {n_trials}")

    results = []
    for index, name in enumerate(LEMMA_NAMES):
        rng = np.random.default_rng([seed, index])
        extra = {"n_competitors": n_competitors} if name == "relative_entropy_minimizer" else {}
        check = partial(_CHECKS[name], tol=tol, tol_abs=tol_abs, **extra)
        result = _run_lemma(name, check, rng, n_trials)
        logger.info(
            "Lemma %s: %d/%d passed, worst residual %.3e",
            name, result.trials - result.failures, result.trials, result.worst_residual,
        )
        results.append(result)

    report = LemmaReport(seed=seed, n_trials=n_trials, lemmas=results)
    logger.info("Lemma suite %s", "passed" if report.passed else "FAILED")
    return report
