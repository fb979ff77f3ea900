import numpy as np
import pytest

from lindsim.formulas import Direction, Method, qdrift_exact, s1_dir, s2_ran_exact
from lindsim.lindblad import GkslGenerator, is_cptp
from lindsim.linalg import DensityMatrix, devectorize, vectorize
from lindsim.models import builtin_model
from lindsim.norms import diamond_norm
from lindsim.sampling import (
    GateSet,
    S1Block,
    S2Block,
    TermExp,
    apply_gateset,
    draw_gateset,
    gateset_channel,
    mixture_estimate,
    sample_gateset,
)

SZ = np.diag([1.0, -1.0]).astype(complex)


@pytest.fixture(scope="module")
def gen():
    return builtin_model("random", dict(d=2, m=3, seed=7))


def test_draws_are_deterministic(gen):
    for method in (Method.S1_RAN, Method.S2_RAN, Method.QDRIFT):
        a = draw_gateset(method, gen, 1.0, 32, seed=5)
        b = draw_gateset(method, gen, 1.0, 32, seed=5)
        assert a == b
        assert a != draw_gateset(method, gen, 1.0, 32, seed=6)


def test_draws_ignore_trailing_state(gen):
    # streams are indexed by (trajectory, step): a draw never depends on how
    # many draws happened before it
    long = draw_gateset(Method.QDRIFT, gen, 1.0, 64, seed=5)
    short = draw_gateset(Method.QDRIFT, gen, 1.0, 16, seed=5)
    ratio = long.n_steps / short.n_steps  # dt differs, steps prefix-match
    assert long.steps[:16] == short.steps
    assert long.dt == pytest.approx(short.dt / ratio)


def test_qdrift_single_term_always_first():
    single = GkslGenerator(dim=2, hamiltonian=SZ, terms=())
    for seed in (0, 1, 99):
        gs = draw_gateset(Method.QDRIFT, single, 1.0, 10, seed=seed)
        assert all(step == TermExp(k=1, with_rate=False) for step in gs.steps)


def test_coin_frequency_concentration(gen):
    gs = draw_gateset(Method.S1_RAN, gen, 1.0, 10_000, seed=42)
    frac = sum(1 for s in gs.steps if s.direction == Direction.FORWARD) / 10_000
    assert 0.48 <= frac <= 0.52


def test_qdrift_frequency_concentration():
    amp = builtin_model("amp_damp", dict(gamma=3.0))  # p = (1/4, 3/4)
    gs = draw_gateset(Method.QDRIFT, amp, 1.0, 10_000, seed=42)
    frac = sum(1 for s in gs.steps if s.k == 2) / 10_000
    assert 0.73 <= frac <= 0.77


def test_s2_permutations_are_uniformish(gen):
    gs = draw_gateset(Method.S2_RAN, gen, 1.0, 6000, seed=3)
    counts = {}
    for step in gs.steps:
        counts[step.perm] = counts.get(step.perm, 0) + 1
    assert len(counts) == 6  # all of Sym(3) appears
    assert min(counts.values()) > 6000 / 6 * 0.8


def test_sample_gateset_sizes_by_bound(gen):
    from lindsim.formulas import step_count
    from lindsim.norms import generator_stats

    stats = generator_stats(gen)
    gs = sample_gateset(Method.QDRIFT, gen, 1.0, 0.5, seed=1, stats=stats)
    assert gs.n_steps == step_count(Method.QDRIFT, stats, 1.0, 0.5).n_steps
    assert gs.dt == pytest.approx(1.0 * stats.total_rate / gs.n_steps)


def test_empty_gateset_is_identity(gen):
    empty = GateSet(steps=(), seed=0, method=Method.S1_RAN, dt=0.1, n_steps=0)
    assert np.array_equal(gateset_channel(empty, gen), np.eye(4))


def test_all_forward_gateset_matches_formula_power(gen):
    n = 5
    steps = tuple(S1Block(Direction.FORWARD) for _ in range(n))
    gs = GateSet(steps=steps, seed=0, method=Method.S1_RAN, dt=0.2, n_steps=n)
    expected = np.linalg.matrix_power(s1_dir(gen, 0.2, Direction.FORWARD), n)
    assert np.max(np.abs(gateset_channel(gs, gen) - expected)) < 1e-12


def test_gateset_channel_is_cptp(gen):
    for method in (Method.S1_RAN, Method.S2_RAN, Method.QDRIFT):
        gs = draw_gateset(method, gen, 1.0, 8, seed=11)
        assert is_cptp(gateset_channel(gs, gen))


def test_apply_gateset_returns_valid_state(gen):
    gs = draw_gateset(Method.QDRIFT, gen, 1.0, 12, seed=2)
    out = apply_gateset(gs, gen, DensityMatrix.ground(2))
    assert isinstance(out, DensityMatrix)


def test_apply_gateset_rejects_dim_mismatch(gen):
    gs = draw_gateset(Method.QDRIFT, gen, 1.0, 4, seed=2)
    with pytest.raises(ValueError, match="does not match"):
        apply_gateset(gs, gen, np.eye(3) / 3)


def test_mixture_estimate_single_sample_reproduces_gateset(gen):
    est = mixture_estimate(Method.S1_RAN, gen, 1.0, 6, r_samples=1, seed=9)
    gs = draw_gateset(Method.S1_RAN, gen, 1.0, 6, seed=9)
    assert np.array_equal(est, gateset_channel(gs, gen))


def test_mixture_estimate_tracks_exact_mixture(gen):
    n = 8
    t = 0.5
    est = mixture_estimate(Method.S2_RAN, gen, t, n, r_samples=5000, seed=0)
    target = np.linalg.matrix_power(s2_ran_exact(gen, t / n), n)
    assert diamond_norm(est - target) <= 0.05


def test_mixture_estimate_variance_shrinks(gen):
    n, t = 8, 0.5
    target = np.linalg.matrix_power(s2_ran_exact(gen, t / n), n)
    d_small = diamond_norm(mixture_estimate(Method.S2_RAN, gen, t, n, 250, seed=0) - target)
    d_large = diamond_norm(mixture_estimate(Method.S2_RAN, gen, t, n, 4000, seed=0) - target)
    assert d_large <= d_small


def test_qdrift_mixture_estimate_against_exact_power():
    amp = builtin_model("amp_damp")
    n, t = 16, 1.0
    omega = t * float(np.sum(amp.rates)) / n
    est = mixture_estimate(Method.QDRIFT, amp, t, n, r_samples=1024, seed=42)
    target = np.linalg.matrix_power(qdrift_exact(amp, omega), n)
    assert diamond_norm(est - target) <= 0.05


def test_gateset_validation():
    with pytest.raises(ValueError, match="n_steps"):
        GateSet(steps=(S1Block(Direction.FORWARD),), seed=0, method=Method.S1_RAN,
                dt=0.1, n_steps=3)
    with pytest.raises(ValueError, match="positive"):
        draw_gateset(Method.S1_RAN, builtin_model("amp_damp"), 1.0, 0, seed=0)
    with pytest.raises(ValueError, match="sampled methods"):
        draw_gateset(Method.S1_DET, builtin_model("amp_damp"), 1.0, 4, seed=0)
