import math
import random

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import brute_entropy
from hcinfo import (
    CostModel,
    DeviceVariable,
    EpsilonPolicy,
    InputDeviceSpec,
    JointDistribution,
    MistakeModel,
    ProbabilityDistribution as PD,
    apply_mistake_shift,
    bandwidth,
    device_utilization,
    dpi_check,
    entropy,
    epsilon_adjust,
    evaluate_task,
    instantaneous_capacity,
    kl_divergence,
    mutual_information,
    radio_alphabet,
    reassign_steps,
)
from hcinfo.info_core import random_chain
from hcinfo.study_analyzer import StudyDesign, SubModelSpec, TrialRecord, study_cost_benefit


@st.composite
def distributions(draw, min_size=1, max_size=8, allow_zero=True):
    n = draw(st.integers(min_size, max_size))
    lo = 0.0 if allow_zero else 1e-3
    w = draw(st.lists(st.floats(lo, 1.0), min_size=n, max_size=n))
    assume(sum(w) > 1e-6)
    total = sum(w)
    return PD(tuple(f"z{i}" for i in range(n)), tuple(x / total for x in w))


@st.composite
def pairs(draw, min_size=2):
    q = draw(distributions(min_size=min_size))
    w = draw(st.lists(st.floats(0.0, 1.0), min_size=len(q), max_size=len(q)))
    assume(sum(w) > 1e-6)
    return q, PD(q.labels, tuple(x / sum(w) for x in w))


@given(distributions())
def test_entropy_bounds(d):
    h = entropy(d)
    assert -1e-12 <= h <= math.log2(len(d)) + 1e-9
    assert h == pytest.approx(brute_entropy(d.probs), abs=1e-9)


@given(st.integers(1, 300))
def test_uniform_is_maximal(n):
    assert entropy(PD.uniform([f"x{i}" for i in range(n)])) == pytest.approx(math.log2(n), abs=1e-12)


@given(pairs(), st.randoms(use_true_random=False))
def test_reordering_invariance(qp, rnd):
    q, p = qp
    order = list(q.labels)
    rnd.shuffle(order)
    assert entropy(q.reordered(order)) == pytest.approx(entropy(q), abs=1e-12)
    assert kl_divergence(q.reordered(order), p) == pytest.approx(kl_divergence(q, p), abs=1e-9)


@given(pairs(), st.floats(1e-6, 0.49))
def test_kl_non_negative(qp, eps):
    q, p = qp
    assert kl_divergence(q, p, EpsilonPolicy(eps)) >= 0.0


@given(pairs())
def test_kl_zero_iff_adjusted_equal(qp):
    q, p = qp
    pol = EpsilonPolicy()
    same = epsilon_adjust(q, pol).is_close(epsilon_adjust(p, pol), 1e-9)
    kl = kl_divergence(q, p, pol)
    if same:
        assert kl == pytest.approx(0.0, abs=1e-9)
    else:
        assert kl > 0.0
    assert kl_divergence(q, q, pol) == 0.0


@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_mutual_information_identity(r, c, data):
    cells = np.array(data.draw(st.lists(st.floats(0, 1), min_size=r * c, max_size=r * c)))
    assume(cells.sum() > 1e-6)
    j = JointDistribution.from_array((cells / cells.sum()).reshape(r, c))
    mi = mutual_information(j)
    flat = PD(tuple(f"c{i}" for i in range(r * c)), tuple(j.array.ravel()))
    via_entropies = entropy(j.row_marginal()) + entropy(j.col_marginal()) - entropy(flat)
    assert mi >= 0
    assert mi == pytest.approx(via_entropies, abs=1e-9)


def test_dpi_holds_on_1000_seeds():
    for seed in range(1000):
        res = dpi_check(*random_chain(np.random.default_rng(seed)))
        assert res.holds, seed


@given(st.lists(st.integers(1, 10**6), min_size=1, max_size=6), st.lists(st.integers(1, 10**6), min_size=1, max_size=6))
def test_device_capacity_additive(a, b):
    va = tuple(DeviceVariable(f"a{i}", c) for i, c in enumerate(a))
    vb = tuple(DeviceVariable(f"b{i}", c) for i, c in enumerate(b))
    whole = InputDeviceSpec("ab", va + vb, 10)
    assert instantaneous_capacity(whole) == pytest.approx(
        instantaneous_capacity(InputDeviceSpec("a", va, 10)) + instantaneous_capacity(InputDeviceSpec("b", vb, 10))
    )
    assert instantaneous_capacity(InputDeviceSpec("ba", vb + va, 10)) == pytest.approx(instantaneous_capacity(whole))


@given(st.floats(0.1, 1e4))
def test_bandwidth_linear_in_rate(rate):
    vars_ = (DeviceVariable("x", 640), DeviceVariable("b", 2))
    one = bandwidth(InputDeviceSpec("d", vars_, rate))
    assert bandwidth(InputDeviceSpec("d", vars_, 2 * rate)) == 2 * one


@given(st.floats(0, 1e3), st.floats(0.01, 100), st.floats(1, 1e5), st.floats(0.1, 10))
def test_du_dimensionless(cap, t, bw, k):
    assert device_utilization(k * cap, t, k * bw) == pytest.approx(device_utilization(cap, t, bw), rel=1e-12, abs=1e-300)


@given(distributions(min_size=2), st.data())
def test_mistake_shift_conserves_mass(d, data):
    i, j = data.draw(st.lists(st.integers(0, len(d) - 1), min_size=2, max_size=2, unique=True))
    frac = data.draw(st.floats(0, 1))
    mass = min(d.probs[i] * frac, np.nextafter(1.0, 0))
    out = apply_mistake_shift(d, MistakeModel(d.labels[i], d.labels[j], mass))
    assert math.fsum(out.probs) == pytest.approx(1.0, abs=1e-12)
    assert out.probs[i] == pytest.approx(d.probs[i] - mass, abs=1e-12)
    assert out.probs[j] == pytest.approx(d.probs[j] + mass, abs=1e-12)


@given(distributions(min_size=2, max_size=6), st.randoms(use_true_random=False), st.data())
def test_reassign_steps_keeps_capacity(d, rnd, data):
    a = radio_alphabet(list(zip(d.labels, d.probs)))
    steps = {x: data.draw(st.integers(1, 9)) for x in d.labels}
    cost = CostModel(steps, 1.5)
    target = list(d.labels)
    rnd.shuffle(target)
    ev = reassign_steps(a, cost, dict(zip(d.labels, target)))
    assert ev.action_capacity == evaluate_task(a, cost).action_capacity


@given(distributions(min_size=3, max_size=3, allow_zero=False), st.floats(0.01, 0.5), st.floats(0.1, 5))
def test_cost_benefit_monotonicity(d, extra_mass, extra_s):
    a = radio_alphabet(list(zip(d.labels, d.probs)))
    cost = CostModel({"z0": 1, "z1": 2, "z2": 3}, 2.0)
    base = evaluate_task(a, cost)
    slower = evaluate_task(a, CostModel(cost.per_letter_steps, 2.0, extra_s))
    assert slower.cost_benefit <= base.cost_benefit
    mass = min(extra_mass, d.probs[1])
    worse = evaluate_task(a, cost, MistakeModel("z1", "z0", mass, 0.0))
    assert worse.potential_distortion >= 0
    assert worse.cost_benefit <= base.cost_benefit + 1e-12


def test_cost_benefit_monotone_in_capacity():
    cost = CostModel({"a": 1, "b": 1}, 1.0)
    ratios = [evaluate_task(radio_alphabet({"a": p, "b": 1 - p}), cost).cost_benefit for p in np.linspace(0.01, 0.5, 30)]
    assert all(x < y for x, y in zip(ratios, ratios[1:]))


DESIGN = StudyDesign(tuple(SubModelSpec(f"S{i}", 1) for i in range(3)), "111")
LETTERS = [format(i, "03b") for i in range(8)]


def _records(counts, seed=0):
    out = []
    for answer, n in counts.items():
        out += [TrialRecord(f"p{k}", f"{answer}-{k}", "111", answer, 1000.0 + 10 * k) for k in range(n)]
    return out


def test_consistent_ac_independent_of_responses():
    rng = random.Random(11)
    ref = None
    for _ in range(100):
        counts = {x: rng.randint(0, 20) for x in LETTERS}
        if not any(counts.values()):
            counts["111"] = 1
        ac = study_cost_benefit(DESIGN, _records(counts)).alphabet_compression
        if ref is None:
            ref = ac
        assert ac == pytest.approx(ref, abs=1e-12)


@given(st.randoms(use_true_random=False))
@settings(max_examples=30)
def test_study_invariant_under_record_order_and_ids(rnd):
    recs = _records({"111": 7, "101": 3, "000": 2})
    base = study_cost_benefit(DESIGN, recs)
    shuffled = list(recs)
    rnd.shuffle(shuffled)
    renamed = [TrialRecord("anon" + r.participant_id[::-1], r.trial_id, r.ground_truth, r.response, r.response_time_ms) for r in shuffled]
    other = study_cost_benefit(DESIGN, renamed)
    assert other.benefit == pytest.approx(base.benefit, abs=1e-12)
    assert other.mean_response_time_s == pytest.approx(base.mean_response_time_s, abs=1e-12)


@pytest.mark.parametrize("target", [x for x in LETTERS if x != "111"])
def test_benefit_decreases_as_mass_leaves_truth(target):
    benefits = []
    for moved in range(0, 101, 5):
        counts = {"111": 100 - moved, target: moved}
        benefits.append(study_cost_benefit(DESIGN, _records({k: v for k, v in counts.items() if v})).benefit)
    assert all(b <= a + 1e-12 for a, b in zip(benefits, benefits[1:]))
