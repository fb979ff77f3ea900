import numpy as np
import pytest

from lindsim.lindblad import (
    GeneratorFormatError,
    GkslGenerator,
    choi,
    constituent_channel,
    exact_channel,
    full_liouvillian,
    is_cptp,
    parse_generator,
    term_superop,
)
from lindsim.linalg import dagger, devectorize, kron, mat_exp, vectorize
from lindsim.models import builtin_model

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SM = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|


@pytest.fixture
def amp_damp():
    return GkslGenerator(dim=2, hamiltonian=np.zeros((2, 2)), terms=((SM, 1.0),))


def test_generator_validation():
    with pytest.raises(ValueError, match="Hermitian"):
        GkslGenerator(dim=2, hamiltonian=np.array([[0, 1], [0, 0]]), terms=())
    with pytest.raises(ValueError, match="negative rate"):
        GkslGenerator(dim=2, hamiltonian=np.zeros((2, 2)), terms=((SM, -0.5),))
    gen = GkslGenerator(dim=2, hamiltonian=SZ, terms=((SM, 2.0),))
    assert gen.m_total == 2
    assert gen.rate(1) == 1.0 and gen.rate(2) == 2.0


def test_term_superop_zero_hamiltonian(amp_damp):
    assert np.allclose(term_superop(amp_damp, 1), np.zeros((4, 4)))


def test_term_superop_out_of_range(amp_damp):
    with pytest.raises(ValueError, match="out of range"):
        term_superop(amp_damp, 3)


def test_term_superop_decay_dissipator(amp_damp):
    # hand evaluation of conj(L)(x)L - (I(x)L^dag L + (L^dag L)^T(x)I)/2 for L=|0><1|
    expected = np.array(
        [
            [0, 0, 0, 1],
            [0, -0.5, 0, 0],
            [0, 0, -0.5, 0],
            [0, 0, 0, -1],
        ],
        dtype=complex,
    )
    assert np.allclose(term_superop(amp_damp, 2, with_rate=True), expected)


def test_term_superop_rate_scaling():
    gen = GkslGenerator(dim=2, hamiltonian=np.zeros((2, 2)), terms=((SM, 2.5),))
    assert np.allclose(term_superop(gen, 2, with_rate=True),
                       2.5 * term_superop(gen, 2, with_rate=False))


def test_term_superop_matches_direct_action():
    gen = builtin_model("qubit3")
    rng = np.random.default_rng(17)
    h = gen.hamiltonian
    for _ in range(20):
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = (g + dagger(g)) / 2
        via_matrix = devectorize(term_superop(gen, 1) @ vectorize(rho))
        assert np.max(np.abs(via_matrix - (-1j) * (h @ rho - rho @ h))) < 1e-12
        for k in range(2, gen.m_total + 1):
            op, rate = gen.terms[k - 2]
            ldl = dagger(op) @ op
            direct = rate * (op @ rho @ dagger(op) - 0.5 * (ldl @ rho + rho @ ldl))
            via_matrix = devectorize(term_superop(gen, k) @ vectorize(rho))
            assert np.max(np.abs(via_matrix - direct)) < 1e-12


def test_full_liouvillian_zero_and_linearity():
    empty = GkslGenerator(dim=2, hamiltonian=np.zeros((2, 2)), terms=())
    assert np.allclose(full_liouvillian(empty), np.zeros((4, 4)))
    gen = builtin_model("qubit3")
    acc = sum(term_superop(gen, k) for k in range(1, gen.m_total + 1))
    assert np.max(np.abs(full_liouvillian(gen) - acc)) < 1e-14


def test_amplitude_damping_analytic_solution(amp_damp):
    # populations decay as exp(-t): at t=ln2 the excited state is half emptied
    chan = exact_channel(amp_damp, np.log(2.0))
    rho1 = np.diag([0.0, 1.0]).astype(complex)
    out = devectorize(chan @ vectorize(rho1))
    assert np.allclose(out, np.diag([0.5, 0.5]), atol=1e-12)


def test_exact_channel_semigroup():
    gen = builtin_model("random", dict(d=2, m=3, seed=3))
    lhs = exact_channel(gen, 0.4) @ exact_channel(gen, 0.9)
    assert np.max(np.abs(lhs - exact_channel(gen, 1.3))) < 1e-9


def test_exact_channel_time_zero_and_negative(amp_damp):
    assert np.allclose(exact_channel(amp_damp, 0.0), np.eye(4))
    with pytest.raises(ValueError, match="nonnegative"):
        exact_channel(amp_damp, -0.1)


def test_constituent_channel_identity_at_zero(amp_damp):
    assert np.allclose(constituent_channel(amp_damp, 2, 0.0), np.eye(4))


def test_constituent_channel_unitary_conjugation():
    gen = GkslGenerator(dim=2, hamiltonian=SZ, terms=())
    dt = 0.37
    u = mat_exp(-1j * dt * SZ)
    assert np.max(np.abs(constituent_channel(gen, 1, dt) - kron(u.conj(), u))) < 1e-12


def test_constituent_channel_cptp_random():
    gen = builtin_model("random", dict(d=2, m=4, seed=12))
    for k in range(1, gen.m_total + 1):
        assert is_cptp(constituent_channel(gen, k, 0.3))


def test_choi_identity_channel():
    d = 3
    omega = np.zeros(d * d, dtype=complex)
    for i in range(d):
        omega[i * d + i] = 1 / np.sqrt(d)
    expected = d * np.outer(omega, omega.conj())
    assert np.allclose(choi(np.eye(d * d)), expected)


def test_choi_trace_of_cptp(amp_damp):
    j = choi(exact_channel(amp_damp, 0.8))
    assert abs(np.trace(j) - 2.0) < 1e-8


def test_choi_sigma_x_conjugation():
    s = kron(SX.conj(), SX)
    j = choi(s)
    eigs = np.sort(np.linalg.eigvalsh(j))
    assert np.allclose(eigs, [0, 0, 0, 2], atol=1e-12)
    # rank one: J = 2 |psi><psi| with psi = (|01> + |10>)/sqrt(2)
    psi = np.array([0, 1, 1, 0]) / np.sqrt(2)
    assert np.allclose(j, 2 * np.outer(psi, psi.conj()), atol=1e-12)


def test_is_cptp_accepts_physical_channels(amp_damp):
    assert is_cptp(np.eye(4))
    assert is_cptp(exact_channel(amp_damp, 1.0))
    assert is_cptp(exact_channel(builtin_model("two_qubit_xy"), 0.5))


def test_is_cptp_rejects_transpose_map():
    transpose = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2))
            e[i, j] = 1.0
            transpose[:, j * 2 + i] = vectorize(e.T).real
    check = is_cptp(transpose)
    assert not check
    assert check.min_choi_eig == pytest.approx(-1.0, abs=1e-12)


def test_is_cptp_reports_diagnostics(amp_damp):
    check = is_cptp(exact_channel(amp_damp, 0.3))
    assert check.ok and check.tp_deviation < 1e-12


def test_cptp_invariant_library_sweep():
    models = [builtin_model("amp_damp"), builtin_model("qubit3"),
              builtin_model("two_qubit_xy"),
              builtin_model("random", dict(d=3, m=4, seed=5))]
    for gen in models:
        for t in (0.1, 1.0):
            assert is_cptp(exact_channel(gen, t))
            for k in range(1, gen.m_total + 1):
                assert is_cptp(constituent_channel(gen, k, t))


def test_liouvillian_infinitesimal_trace_preservation():
    rng = np.random.default_rng(2)
    gen = builtin_model("random", dict(d=3, m=3, seed=8))
    liou = full_liouvillian(gen)
    for _ in range(5):
        g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        rho = (g + dagger(g)) / 2
        image = devectorize(liou @ vectorize(rho))
        assert abs(np.trace(image)) < 1e-12
        assert np.max(np.abs(image - dagger(image))) < 1e-12


GOOD_FILE = """
# damped qubit
dim 2
hamiltonian 0.5,0 0,0 0,0 -0.5,0

jump
matrix 0,0 1,0 0,0 0,0
rate 1.0
end
"""


def test_parse_generator_round_trip():
    gen = parse_generator(GOOD_FILE)
    assert gen.dim == 2 and gen.m_total == 2
    assert np.allclose(gen.hamiltonian, 0.5 * SZ)
    assert np.allclose(gen.terms[0][0], SM)
    assert gen.terms[0][1] == 1.0


@pytest.mark.parametrize(
    "text, message",
    [
        ("dim 2\nhamiltonian 1,0 0,0\n", "line 2: expected 4 entries"),
        ("dim 2\nhamiltonian 0,0 1,0 0,0 0,0\n", "line 2: hamiltonian is not Hermitian"),
        ("dim 2\nhamiltonian 0,0 0,0 0,0 0,0\njump\nmatrix 0,0 1,0 0,0 0,0\nrate -1\nend\n",
         "line 5: negative rate"),
        ("dim 2\nhamiltonian 0,0 0,0 0,0 0,0\njump\nmatrix 0,0 1,0 0,0 0,0\nend\n",
         "no rate"),
        ("dim 2\nfoo 1\n", "line 2: unknown directive 'foo'"),
        ("hamiltonian 0,0 0,0 0,0 0,0\n", "line 1: dim must come before"),
        ("dim 2\nhamiltonian 0,0 0,0 0,0 0,0\njump\nmatrix 0,0 1,0 0,0 0,0\nrate 1\n",
         "never closed"),
    ],
)
def test_parse_generator_positional_errors(text, message):
    with pytest.raises(GeneratorFormatError, match=message):
        parse_generator(text)
