"""Experiment harness: sweeps, validation suites and report generation.

The harness consumes experiment configs (INI-style, one ``[experiment]``
section), runs method-by-method N sweeps against the exact evolution, checks
every error bound, fits convergence orders and writes CSV / gnuplot-ready
output.  ``validate_all`` bundles the whole property suite behind one call so
a fresh checkout can certify itself from the command line.
"""

from __future__ import annotations

import concurrent.futures
import configparser
import itertools
import math
import os
import time
from dataclasses import dataclass

import numpy as np

from . import forking
from .formulas import (
    Direction,
    Implementation,
    Method,
    GATE_COMPLEXITY,
    error_bound,
    gate_count,
    qdrift_exact,
    s1_dir,
    s1_ran_exact,
    s2_det,
    s2_ran_exact,
    step_count,
)
from .lindblad import (
    GkslGenerator,
    constituent_channel,
    exact_channel,
    full_liouvillian,
    is_cptp,
    load_generator,
    term_superop,
)
from .linalg import DensityMatrix, dagger, devectorize, trace_distance, vectorize
from .models import builtin_model
from .norms import (
    GeneratorStats,
    diamond_norm,
    diamond_norm_solution,
    generator_stats,
    power_contraction_check,
    sampled_diamond_lower_bound,
)
from .sampling import draw_gateset, gateset_channel, mixture_estimate
from .tolerances import TOL

__all__ = [
    "CheckResult",
    "ConfigError",
    "ExperimentSpec",
    "SweepRecord",
    "ValidationReport",
    "approximation_step_channel",
    "fit_order",
    "load_experiment",
    "resolve_model",
    "run_sweep",
    "table1_report",
    "validate_all",
]

ENV_WORKER_CAP = "LINDBLAD_RAND_THREADS"

CSV_COLUMNS = [
    "method", "n", "epsilon_bound", "epsilon_empirical", "trace_dist",
    "gates_cs", "gates_qf", "status", "wall_time_ms",
]

SAMPLED_METHODS = (Method.S1_RAN, Method.S2_RAN, Method.QDRIFT)


class ConfigError(ValueError):
    """Malformed experiment configuration."""


@dataclass(frozen=True)
class ExperimentSpec:
    model: str
    methods: tuple
    t: float
    n_grid: tuple = ()
    epsilon_grid: tuple = ()
    trajectories: int = 1024
    seed: int = 0
    outputs: str = "./out"
    initial_state: str = "ground"
    sampled: bool = False
    conservative: bool = False

    def __post_init__(self):
        if bool(self.n_grid) == bool(self.epsilon_grid):
            raise ConfigError("exactly one of n_grid / epsilon_grid must be given")
        grid = self.n_grid or self.epsilon_grid
        if any(g <= 0 for g in grid):
            raise ConfigError("grid values must be positive")
        increasing = all(a < b for a, b in zip(grid, grid[1:]))
        decreasing = all(a > b for a, b in zip(grid, grid[1:]))
        if not (increasing or decreasing):
            raise ConfigError("grid values must be strictly monotone")
        if self.t <= 0:
            raise ConfigError("t must be positive")
        if self.trajectories < 1:
            raise ConfigError("trajectories must be positive")
        if self.initial_state not in ("ground", "mixed"):
            raise ConfigError(f"unknown initial_state '{self.initial_state}'")
        if not self.methods:
            raise ConfigError("at least one method is required")


@dataclass
class SweepRecord:
    method: Method
    n: int
    epsilon_bound: float
    epsilon_empirical: float
    trace_dist: float
    gates_cs: int
    gates_qf: int | None
    status: str
    wall_time_ms: int
    stat_err: float | None = None


def _parse_model_field(value: str):
    tokens = value.split()
    if not tokens:
        raise ConfigError("model field is empty")
    if tokens[0] == "file":
        if len(tokens) != 2:
            raise ConfigError("model file form is: model = file <path>")
        return ("file", tokens[1], {})
    params = {}
    for tok in tokens[1:]:
        key, sep, raw = tok.partition("=")
        if not sep:
            raise ConfigError(f"model parameter '{tok}' is not key=value")
        try:
            params[key] = int(raw)
        except ValueError:
            try:
                params[key] = float(raw)
            except ValueError:
                raise ConfigError(f"model parameter '{tok}' is not numeric") from None
    return ("builtin", tokens[0], params)


def resolve_model(spec: ExperimentSpec) -> GkslGenerator:
    kind, name, params = _parse_model_field(spec.model)
    if kind == "file":
        return load_generator(name)
    return builtin_model(name, params)


def load_experiment(path) -> ExperimentSpec:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    if "experiment" not in parser:
        raise ConfigError("config must contain an [experiment] section")
    sec = parser["experiment"]

    def req(key):
        if key not in sec:
            raise ConfigError(f"missing mandatory key '{key}'")
        return sec[key]

    methods = []
    for name in req("methods").split():
        try:
            methods.append(Method(name))
        except ValueError:
            known = ", ".join(m.value for m in Method)
            raise ConfigError(f"unknown method '{name}' (known: {known})") from None

    def grid(key, conv):
        if key not in sec:
            return ()
        return tuple(conv(x) for x in sec[key].split())

    try:
        return ExperimentSpec(
            model=req("model"),
            methods=tuple(methods),
            t=float(req("t")),
            n_grid=grid("n_grid", int),
            epsilon_grid=grid("epsilon_grid", float),
            trajectories=sec.getint("trajectories", fallback=1024),
            seed=int(req("seed")),
            outputs=sec.get("outputs", fallback="./out"),
            initial_state=sec.get("initial_state", fallback="ground"),
            sampled=sec.getboolean("sampled", fallback=False),
            conservative=sec.getboolean("conservative_bounds", fallback=False),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


def approximation_step_channel(method: Method, gen: GkslGenerator, t: float, n: int,
                               total_rate: float) -> np.ndarray:
    """Exact-mixture single-step channel of a method at step count n."""
    if method == Method.S1_DET:
        return s1_dir(gen, t / n, Direction.FORWARD)
    if method == Method.S2_DET:
        return s2_det(gen, t / n)
    if method == Method.S1_RAN:
        return s1_ran_exact(gen, t / n)
    if method == Method.S2_RAN:
        return s2_ran_exact(gen, t / n)
    if method == Method.QDRIFT:
        return qdrift_exact(gen, t * total_rate / n)
    raise ValueError(f"unknown method {method!r}")


def _sampled_channel_with_batches(method, gen, t, n, trajectories, seed, n_batches=8):
    """Mean sampled channel plus contiguous-batch means for the error bar."""
    memo: dict = {}
    d2 = gen.dim**2
    batch_sums = [np.zeros((d2, d2), dtype=complex) for _ in range(n_batches)]
    batch_counts = [0] * n_batches
    per = max(1, trajectories // n_batches)
    for r in range(trajectories):
        gs = draw_gateset(method, gen, t, n, seed, trajectory=r)
        b = min(r // per, n_batches - 1)
        batch_sums[b] += gateset_channel(gs, gen, _memo=memo)
        batch_counts[b] += 1
    total = sum(batch_sums) / trajectories
    batches = [s / c for s, c in zip(batch_sums, batch_counts) if c > 0]
    return total, batches


def _batch_standard_error(eps_batches) -> float:
    if len(eps_batches) < 2:
        return 0.0
    return float(np.std(eps_batches, ddof=1) / math.sqrt(len(eps_batches)))


def _worker_cap(n_jobs: int) -> int:
    env = os.environ.get(ENV_WORKER_CAP)
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ConfigError(f"{ENV_WORKER_CAP} must be an integer, got '{env}'") from None
        return max(1, min(cap, n_jobs))
    return max(1, min(4, os.cpu_count() or 1, n_jobs))


def run_sweep(spec: ExperimentSpec, write_files: bool = True):
    """Run every method over the grid; returns records and writes the CSV."""
    gen = resolve_model(spec)
    stats = generator_stats(gen)
    t_exact = exact_channel(gen, spec.t)
    rho0 = (DensityMatrix.ground(gen.dim) if spec.initial_state == "ground"
            else DensityMatrix.maximally_mixed(gen.dim))
    rho_t = devectorize(t_exact @ vectorize(rho0.matrix))

    points = []
    for method in spec.methods:
        if spec.n_grid:
            for n in spec.n_grid:
                points.append((method, int(n)))
        else:
            for eps in spec.epsilon_grid:
                points.append((method, step_count(method, stats, spec.t, eps,
                                                  conservative=spec.conservative).n_steps))

    def run_point(point):
        method, n = point
        start = time.perf_counter()
        try:
            bound = error_bound(method, stats, spec.t, n, conservative=spec.conservative)
            stat_err = None
            if spec.sampled and method in SAMPLED_METHODS:
                total, batches = _sampled_channel_with_batches(
                    method, gen, spec.t, n, spec.trajectories, spec.seed)
                eps_batches = [diamond_norm(t_exact - b) for b in batches]
                stat_err = _batch_standard_error(eps_batches)
            else:
                step = approximation_step_channel(method, gen, spec.t, n, stats.total_rate)
                total = np.linalg.matrix_power(step, n)
            eps_emp = diamond_norm(t_exact - total)
            rho_approx = devectorize(total @ vectorize(rho0.matrix))
            record = SweepRecord(
                method=method,
                n=n,
                epsilon_bound=bound,
                epsilon_empirical=eps_emp,
                trace_dist=trace_distance(rho_t, rho_approx),
                gates_cs=gate_count(method, stats.term_count, n, Implementation.CS),
                gates_qf=(gate_count(method, stats.term_count, n, Implementation.QF)
                          if method in (Method.S1_RAN, Method.QDRIFT) else None),
                status="ok",
                wall_time_ms=0,
                stat_err=stat_err,
            )
        except Exception as exc:  # recorded, run continues
            record = SweepRecord(
                method=method, n=n, epsilon_bound=float("nan"),
                epsilon_empirical=float("nan"), trace_dist=float("nan"),
                gates_cs=0, gates_qf=None, status=f"error: {exc}", wall_time_ms=0,
            )
        record.wall_time_ms = int(round(1000 * (time.perf_counter() - start)))
        return record

    workers = _worker_cap(len(points))
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run_point, points))
    else:
        records = [run_point(p) for p in points]

    if write_files:
        os.makedirs(spec.outputs, exist_ok=True)
        write_sweep_csv(records, os.path.join(spec.outputs, "sweep.csv"),
                        sampled=spec.sampled)
        _write_gnuplot_files(records, spec.outputs)
    return records


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "nan" if math.isnan(x) else f"{x:.12g}"
    return str(x)


def write_sweep_csv(records, path, sampled: bool = False):
    columns = CSV_COLUMNS + (["stat_err"] if sampled else [])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for r in records:
            row = [r.method.value, str(r.n), _fmt(r.epsilon_bound),
                   _fmt(r.epsilon_empirical), _fmt(r.trace_dist), _fmt(r.gates_cs),
                   _fmt(r.gates_qf), r.status.replace(",", ";"), str(r.wall_time_ms)]
            if sampled:
                row.append(_fmt(r.stat_err))
            fh.write(",".join(row) + "\n")
    return path


def _write_gnuplot_files(records, outdir):
    plotted = []
    for method in Method:
        rows = [r for r in records if r.method == method and r.status == "ok"]
        if not rows:
            continue
        name = f"sweep_{method.value}.dat"
        with open(os.path.join(outdir, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write("# n  epsilon_bound  epsilon_empirical\n")
            for r in sorted(rows, key=lambda r: r.n):
                fh.write(f"{r.n} {_fmt(r.epsilon_bound)} {_fmt(r.epsilon_empirical)}\n")
        plotted.append((method.value, name))
    with open(os.path.join(outdir, "sweep.gp"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("set logscale xy\nset xlabel 'steps N'\nset ylabel 'diamond-norm error'\n")
        parts = [f"'{name}' using 1:3 with linespoints title '{label}'"
                 for label, name in plotted]
        parts += [f"'{name}' using 1:2 with lines dashtype 2 notitle"
                  for _, name in plotted]
        fh.write("plot " + ", \\\n     ".join(parts) + "\n")


def fit_order(records) -> dict:
    """Least-squares slope of log(error) vs log(N), one entry per method."""
    slopes = {}
    for method in {r.method for r in records}:
        pts = [(r.n, r.epsilon_empirical) for r in records
               if r.method == method and r.status == "ok" and r.epsilon_empirical > 0]
        if len(pts) < 3:
            raise ValueError(f"need at least 3 points to fit an order for {method.value}")
        ns, eps = zip(*sorted(pts))
        slopes[method] = float(np.polyfit(np.log(ns), np.log(eps), 1)[0])
    return slopes


# ---------------------------------------------------------------------------
# Validation suites
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str


@dataclass
class ValidationReport:
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def table(self) -> str:
        width = max(len(f"{r.suite}/{r.name}") for r in self.results)
        lines = []
        for r in self.results:
            flag = "PASS" if r.passed else "FAIL"
            lines.append(f"{flag}  {r.suite + '/' + r.name:<{width}}  {r.detail}")
        lines.append(f"{'OK' if self.passed else 'FAILED'}: "
                     f"{sum(r.passed for r in self.results)}/{len(self.results)} checks passed")
        return "\n".join(lines)

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("suite,check,passed,detail\n")
            for r in self.results:
                fh.write(f"{r.suite},{r.name},{int(r.passed)},{r.detail.replace(',', ';')}\n")
        return path


def _model_library():
    return [
        ("amp_damp", builtin_model("amp_damp")),
        ("qubit3", builtin_model("qubit3")),
        ("two_qubit_xy", builtin_model("two_qubit_xy")),
        ("random_2_3", builtin_model("random", dict(d=2, m=3, seed=7))),
    ]


def _random_channel(rng, d=2) -> np.ndarray:
    gen = builtin_model("random", dict(d=d, m=3, seed=int(rng.integers(0, 2**31))))
    return exact_channel(gen, float(rng.uniform(0.2, 0.8)))


def _restricted_sum_enumeration(m: int, p: int, x: float) -> float:
    total = 0.0
    for js in itertools.product(range(p + 1), repeat=m):
        if sum(js) == p:
            total += x**p / np.prod([math.factorial(j) for j in js])
    return total


def _checks_norms(seed: int):
    out = []
    rng = np.random.default_rng(seed)
    sol = diamond_norm_solution(exact_channel(builtin_model("amp_damp"), 0.7))
    out.append(CheckResult("norms", "cptp_channel_norm_one",
                           abs(sol.value - 1.0) <= TOL.diamond_abs_tol,
                           f"value={sol.value:.9f} gap={sol.gap:.2e}"))
    zero = diamond_norm(np.zeros((4, 4)))
    out.append(CheckResult("norms", "zero_map", zero <= TOL.diamond_abs_tol, f"value={zero:.2e}"))
    u = np.diag([1.0, np.exp(1j * np.pi / 2)])
    pair = diamond_norm(np.eye(4) - np.kron(u.conj(), u))
    out.append(CheckResult("norms", "unitary_pair_sqrt2",
                           abs(pair - math.sqrt(2)) <= TOL.diamond_abs_tol,
                           f"value={pair:.9f}"))

    hp = term_superop(builtin_model("qubit3"), 2, with_rate=True)
    base = diamond_norm(hp)
    homog = abs(diamond_norm(2.0 * hp) - 2.0 * base) <= 1e-6
    other = term_superop(builtin_model("qubit3"), 3, with_rate=True)
    subadd = diamond_norm(hp + other) <= diamond_norm(hp) + diamond_norm(other) + 1e-6
    out.append(CheckResult("norms", "homogeneity_subadditivity", homog and subadd,
                           f"homogeneous={homog} subadditive={subadd}"))

    chan = _random_channel(rng)
    val = diamond_norm(chan - np.eye(4))
    lower = sampled_diamond_lower_bound(chan - np.eye(4), n_samples=50,
                                        seed=int(rng.integers(0, 2**31)))
    out.append(CheckResult("norms", "dominates_sampled_inputs", val >= lower - 1e-6,
                           f"sdp={val:.6f} best_sample={lower:.6f}"))

    ok = True
    details = []
    for name, gen in _model_library():
        stats = generator_stats(gen)
        lnorm = diamond_norm(full_liouvillian(gen))
        ok = ok and lnorm <= stats.term_count * stats.max_scaled_norm + 1e-6
        details.append(f"{name}:{lnorm:.3f}<={stats.term_count * stats.max_scaled_norm:.3f}")
    out.append(CheckResult("norms", "generator_norm_bound", ok, " ".join(details)))
    return out


def _checks_cptp(seed: int):
    out = []
    rng = np.random.default_rng(seed)
    models = _model_library() + [
        (f"random_d{d}_m{m}", builtin_model("random", dict(d=d, m=m, seed=int(rng.integers(2**31)))))
        for d, m in ((2, 2), (3, 3), (4, 4))
    ]
    worst = 0.0
    ok = True
    for name, gen in models:
        for t in (0.1, 1.0):
            check = is_cptp(exact_channel(gen, t))
            ok = ok and bool(check)
            worst = min(worst, check.min_choi_eig)
            for k in range(1, gen.m_total + 1):
                check = is_cptp(constituent_channel(gen, k, t))
                ok = ok and bool(check)
                worst = min(worst, check.min_choi_eig)
    out.append(CheckResult("cptp", "channels_cptp", ok, f"min Choi eigenvalue {worst:.2e}"))

    ok = True
    worst = 0.0
    for name, gen in _model_library():
        liou = full_liouvillian(gen)
        for _ in range(5):
            g = rng.normal(size=(gen.dim, gen.dim)) + 1j * rng.normal(size=(gen.dim, gen.dim))
            rho = (g + dagger(g)) / 2
            image = devectorize(liou @ vectorize(rho))
            dev = max(abs(np.trace(image)), float(np.max(np.abs(image - dagger(image)))))
            worst = max(worst, dev)
            ok = ok and dev <= 1e-12 * max(1.0, float(np.max(np.abs(rho))))
    out.append(CheckResult("cptp", "liouvillian_traceless_hermitian", ok, f"max deviation {worst:.2e}"))

    gen = builtin_model("qubit3")
    worst = 0.0
    for _ in range(20):
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = (g + dagger(g)) / 2
        h = gen.hamiltonian
        direct = -1j * (h @ rho - rho @ h)
        worst = max(worst, float(np.max(np.abs(
            devectorize(term_superop(gen, 1) @ vectorize(rho)) - direct))))
        for k in range(2, gen.m_total + 1):
            op, rate = gen.terms[k - 2]
            ldl = dagger(op) @ op
            direct = rate * (op @ rho @ dagger(op) - 0.5 * (ldl @ rho + rho @ ldl))
            worst = max(worst, float(np.max(np.abs(
                devectorize(term_superop(gen, k) @ vectorize(rho)) - direct))))
    out.append(CheckResult("cptp", "term_action_matches_direct", worst <= 1e-12,
                           f"max deviation {worst:.2e}"))
    return out


def _checks_identities(seed: int):
    out = []
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(20):
        t_chan = _random_channel(rng)
        v_chan = _random_channel(rng)
        for n in (2, 4, 8):
            ok = ok and power_contraction_check(t_chan, v_chan, n)
    out.append(CheckResult("identities", "power_difference_contraction", ok, "20 channel pairs, N in {2,4,8}"))

    ok = True
    details = []
    for m, p, x in ((2, 3, 1.0), (3, 4, 0.5), (4, 2, 0.3)):
        brute = _restricted_sum_enumeration(m, p, x)
        closed = m**p * x**p / math.factorial(p)
        ok = ok and abs(brute - closed) <= 1e-12
        details.append(f"({m},{p},{x}):{brute:.7f}")
    out.append(CheckResult("identities", "restricted_sum_identity", ok, " ".join(details)))
    return out


def _checks_bounds(seed: int):
    out = []
    t = 1.0
    grid = (4, 8, 16, 32, 64)
    violations = []
    slopes_detail = []
    slopes_ok = True
    targets = {Method.S1_DET: -1.0, Method.S2_DET: -2.0, Method.S1_RAN: -2.0,
               Method.S2_RAN: -2.0, Method.QDRIFT: -1.0}
    for name in ("amp_damp", "qubit3"):
        spec = ExperimentSpec(model=name, methods=tuple(Method), t=t, n_grid=grid, seed=seed)
        records = run_sweep(spec, write_files=False)
        violations += [f"{name}/{r.method.value}/N={r.n}" for r in records
                       if r.status == "ok" and r.epsilon_empirical > r.epsilon_bound]
    spec = ExperimentSpec(model="random d=2 m=3 seed=7", methods=tuple(Method), t=t,
                          n_grid=grid, seed=seed)
    records = run_sweep(spec, write_files=False)
    violations += [f"random/{r.method.value}/N={r.n}" for r in records
                   if r.status == "ok" and r.epsilon_empirical > r.epsilon_bound]
    for method, slope in sorted(fit_order(records).items(), key=lambda kv: kv[0].value):
        good = abs(slope - targets[method]) <= 0.15
        slopes_ok = slopes_ok and good
        slopes_detail.append(f"{method.value}:{slope:+.2f}")
    out.append(CheckResult("bounds", "error_bounds_hold", not violations,
                           "no violations" if not violations else " ".join(violations)))
    out.append(CheckResult("bounds", "convergence_orders", slopes_ok, " ".join(slopes_detail)))

    # leading-order cancellation of the mixture channel against the exact step
    gen = builtin_model("random", dict(d=2, m=3, seed=7))
    total_rate = float(np.sum(gen.rates))
    dts = np.array([0.2, 0.1, 0.05, 0.025])
    errs = [np.max(np.abs(qdrift_exact(gen, dt * total_rate) - exact_channel(gen, dt)))
            for dt in dts]
    slope = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])
    out.append(CheckResult("bounds", "qdrift_first_order_cancellation",
                           abs(slope - 2.0) <= 0.2, f"slope {slope:+.2f}"))
    return out


def _checks_forking(seed: int):
    out = []
    rho0 = DensityMatrix.ground(2)
    phis = [DensityMatrix.maximally_mixed(2), DensityMatrix.ground(2),
            DensityMatrix(np.array([[0.75, 0.25], [0.25, 0.25]], dtype=complex))]
    worst_equiv = 0.0
    worst_phi = 0.0
    bounds_ok = True
    for name, gen in _model_library():
        if gen.dim > 2 or gen.m_total > 3:
            continue
        for dt in (0.05, 0.2):
            mix = devectorize(s1_ran_exact(gen, dt) @ vectorize(rho0.matrix))
            forked = [forking.fork_s1_step(gen, dt, rho0, phi) for phi in phis]
            worst_equiv = max(worst_equiv, trace_distance(forked[0].matrix, mix))
            worst_phi = max(worst_phi, trace_distance(forked[0], forked[1]),
                            trace_distance(forked[0], forked[2]))
            mixq = devectorize(qdrift_exact(gen, dt) @ vectorize(rho0.matrix))
            forkedq = [forking.fork_qdrift_step(gen, dt, rho0, phi) for phi in phis]
            worst_equiv = max(worst_equiv, trace_distance(forkedq[0].matrix, mixq))
            worst_phi = max(worst_phi, trace_distance(forkedq[0], forkedq[1]))
        stats = generator_stats(gen)
        for n in (1, 4, 8):
            t = 1.0
            exact_state = devectorize(exact_channel(gen, t) @ vectorize(rho0.matrix))
            run = forking.fork_s1_run(gen, t, n, rho0, phis[0])
            bound = (stats.term_count * t * stats.max_scaled_norm) ** 3 / (6 * n**2)
            bounds_ok = bounds_ok and trace_distance(run.matrix, exact_state) <= bound
            runq = forking.fork_qdrift_run(gen, t, n, rho0, phis[0])
            boundq = (t * stats.total_rate * stats.max_bare_norm) ** 2 / (2 * n)
            bounds_ok = bounds_ok and trace_distance(runq.matrix, exact_state) <= boundq
    out.append(CheckResult("forking", "matches_exact_mixture", worst_equiv <= 1e-10,
                           f"max trace distance {worst_equiv:.2e}"))
    out.append(CheckResult("forking", "work_state_independence", worst_phi <= 1e-10,
                           f"max trace distance {worst_phi:.2e}"))
    out.append(CheckResult("forking", "trace_distance_bounds", bounds_ok,
                           "first-order and rate-weighted bounds hold"))
    return out


def _checks_sampling(seed: int):
    out = []
    gen = builtin_model("random", dict(d=2, m=3, seed=7))
    a = draw_gateset(Method.S2_RAN, gen, 1.0, 64, seed)
    b = draw_gateset(Method.S2_RAN, gen, 1.0, 64, seed)
    out.append(CheckResult("sampling", "deterministic_gatesets", a == b, "byte-identical draws"))

    coin = draw_gateset(Method.S1_RAN, gen, 1.0, 10_000, 42)
    frac = sum(1 for s in coin.steps if s.direction == Direction.FORWARD) / 10_000
    out.append(CheckResult("sampling", "coin_frequency", 0.48 <= frac <= 0.52, f"forward {frac:.4f}"))

    amp3 = builtin_model("amp_damp", dict(gamma=3.0))
    qd = draw_gateset(Method.QDRIFT, amp3, 1.0, 10_000, 42)
    frac2 = sum(1 for s in qd.steps if s.k == 2) / 10_000
    out.append(CheckResult("sampling", "rate_weighted_frequency", 0.73 <= frac2 <= 0.77,
                           f"term-2 {frac2:.4f}"))

    amp = builtin_model("amp_damp")
    omega = 1.0 * float(np.sum(amp.rates)) / 16
    target = np.linalg.matrix_power(qdrift_exact(amp, omega), 16)
    dist_small = diamond_norm(mixture_estimate(Method.QDRIFT, amp, 1.0, 16, 250, 42) - target)
    dist_large = diamond_norm(mixture_estimate(Method.QDRIFT, amp, 1.0, 16, 4000, 42) - target)
    out.append(CheckResult("sampling", "mixture_estimate_converges",
                           dist_large <= 0.05 and dist_large <= dist_small,
                           f"r=250: {dist_small:.4f}, r=4000: {dist_large:.4f}"))
    return out


_SUITES = {
    "norms": _checks_norms,
    "cptp": _checks_cptp,
    "identities": _checks_identities,
    "bounds": _checks_bounds,
    "forking": _checks_forking,
    "sampling": _checks_sampling,
}


def validate_all(seed: int = 0, suite: str = "all") -> ValidationReport:
    """Run the property suite (or one named sub-suite)."""
    if suite == "all":
        names = list(_SUITES)
    elif suite in _SUITES:
        names = [suite]
    else:
        raise ConfigError(f"unknown suite '{suite}' (known: all, {', '.join(_SUITES)})")
    results = []
    for name in names:
        results.extend(_SUITES[name](seed))
    return ValidationReport(results=results)


# ---------------------------------------------------------------------------
# Gate-complexity report
# ---------------------------------------------------------------------------

_COMPLEXITY_ROWS = [
    ("First-order deterministic", Method.S1_DET, Implementation.CS),
    ("Second-order deterministic", Method.S2_DET, Implementation.CS),
    ("First-order randomised (CS)", Method.S1_RAN, Implementation.CS),
    ("Second-order randomised (CS)", Method.S2_RAN, Implementation.CS),
    ("QDRIFT (CS)", Method.QDRIFT, Implementation.CS),
    ("First-order randomised (QF)", Method.S1_RAN, Implementation.QF),
    ("Second-order randomised (QF)", Method.S2_RAN, Implementation.QF),
    ("QDRIFT (QF)", Method.QDRIFT, Implementation.QF),
]


def table1_report(m: int, t: float, lam: float, gamma: float, omega: float,
                  eps: float, conservative: bool = False) -> str:
    """Gate-complexity comparison for user-supplied bound scalars."""
    stats = GeneratorStats(max_scaled_norm=lam, max_bare_norm=omega,
                           total_rate=gamma, term_count=m)
    header = f"{'method':<30} {'complexity':<28} {'N':>8} {'gates':>10}"
    lines = [header, "-" * len(header)]
    for label, method, impl in _COMPLEXITY_ROWS:
        if (method, impl) not in GATE_COMPLEXITY:
            lines.append(f"{label:<30} {'infeasible (M!)':<28} {'-':>8} {'-':>10}")
            continue
        complexity = GATE_COMPLEXITY[(method, impl)]
        n = step_count(method, stats, t, eps, conservative=conservative).n_steps
        gates = gate_count(method, m, n, impl)
        lines.append(f"{label:<30} {complexity:<28} {n:>8} {gates:>10}")
    return "\n".join(lines)
