"""scenario runner behind the vkramer command line."""
from dataclasses import dataclass
import glob
import os

import numpy as np
from rich.console import Console
from rich.table import Table
from scipy import linalg

from . import reporting
from .debranges import positivity_check, sinc_cross_check, space_equality_battery
from .errors import KernelBuildError, PreconditionViolation, ScenarioError
from .executor import EXIT_BATTERY, EXIT_OK, EXIT_SCHEMA, BatteryResult, Executor
from .hilbert import norm, random_vectors
from .kernels import RESOLVENT, ZAYED, build_zayed, evaluate, make_grid
from .rkhs import (
    GENERIC_PROBES, lift, null_space, parallelogram_defect, pointwise_bound_defect, probe_points,
    reproducing_check, vanishing_subspace,
)
from .sampling import (
    certify, convergence_sweep, extract_factorization, is_monotone, kramer_kernel_form,
    kramer_reconstruct, lagrange_reconstruct, quasi_lagrange_reconstruct, take_samples,
)
from .scalar_entire import SIN_PI
from .scenario import build_debranges, build_kernel, load_scenario, to_array, to_complex
from .shift import (
    backward_shift, bijection_check, debranges_isometry_check, invariance_check, mult_apply,
    regular_type_bound, simplicity_check,
)

RECONSTRUCT_TOL = 1e-9
SERIES_TOL = 1e-8
ISOMETRY_BETAS = (1j, 1 + 2j, -3 + 0.5j)

COMMANDS = ("certify", "reconstruct", "sweep", "invariance", "factorize", "debranges", "shift", "structure")
# batteries that need a certified sampling system
NEEDS_CERTIFICATE = ("sweep", "invariance", "factorize", "debranges", "shift", "structure")
SKIPPED = "skipped"


@dataclass
class RunOptions:
    out: str = None
    seed: int = None
    truncations: list = None
    betas: list = None
    beta: complex = None
    noise: float = None


@dataclass
class Context:
    scenario: object
    kernel: object
    grid: np.ndarray
    seed: int
    out_dir: str
    options: RunOptions

    def rng(self, tag):
        """generator per battery, independent of battery order."""
        return np.random.default_rng([self.seed, COMMANDS.index(tag) + 1])

    def path(self, filename):
        return os.path.join(self.out_dir, filename)

    @property
    def noise(self):
        return self.options.noise if self.options.noise is not None else self.scenario.noise


class Runner:
    """runs batteries over scenario files and reports through a stderr console."""

    def __init__(self, config, console=None):
        self.config = config
        self.executor = Executor(config)
        self.console = console or Console(stderr=True, quiet=config.quiet)
        self.results = []

    def _status(self, ok, message):
        self.console.print(f"[{'OK' if ok else 'FAIL'}] {message}", markup=False,
                           style="green" if ok else "red", highlight=False)

    def out_root(self, options):
        if self.config.out_from_env:
            return self.config.out_dir
        return options.out or self.config.out_dir

    def prepare(self, scenario, options):
        """kernel, grid and output directory for one scenario."""
        seed = options.seed
        if seed is None:
            seed = scenario.seed if scenario.seed is not None else self.config.seed

        kernel = build_kernel(scenario, np.random.default_rng(seed), self.config.dimension)
        spec = scenario.grid
        grid = make_grid(kernel.nodes, spec.count, spec.real_span, spec.circle_radius)
        out_dir = os.path.join(self.out_root(options), scenario.name)
        return Context(scenario, kernel, grid, seed, out_dir, options)

    # batteries: each returns (passed, details) and writes its own reports

    def _certified(self, ctx):
        return certify(ctx.kernel, ctx.rng("certify"))

    def battery_certify(self, ctx):
        S = self._certified(ctx)
        reporting.write_csv(ctx.path("certify.csv"), reporting.CERTIFY_COLUMNS, reporting.certify_rows(S))
        details = {"coefficients": S.coefficients, "residuals": S.residuals}
        reporting.write_json(ctx.path("certify.json"), details)
        return True, details

    def _random_element(self, ctx, tag):
        u = random_vectors(ctx.rng(tag), ctx.kernel.dim, 1)[0]
        return lift(ctx.kernel, u)

    def battery_reconstruct(self, ctx):
        F = ctx.kernel
        f = self._random_element(ctx, "reconstruct")
        rng = ctx.rng("reconstruct")
        overrides = {n: to_array(v) for n, v in ctx.scenario.samples.items()}
        exact = [f.value(z) for z in ctx.grid]
        scale = max(1.0, max(norm(v) for v in exact))

        if F.family == RESOLVENT:
            samples = take_samples(f.value, F.nodes, ctx.noise, rng).with_overrides(overrides)
            error = max(norm(lagrange_reconstruct(F, samples, z) - v) for z, v in zip(ctx.grid, exact)) / scale
            details = {"series": "lagrange", "max_error": error}
            reporting.write_json(ctx.path("samples.json"), samples.to_records())
            reporting.write_json(ctx.path("reconstruct.json"), details)
            return ctx.noise > 0 or error <= RECONSTRUCT_TOL, details

        S = self._certified(ctx)
        samples = take_samples(f.value, S.nodes, ctx.noise, rng).with_overrides(overrides)
        H = null_space(F)
        error, gap = 0.0, 0.0
        for z, v in zip(ctx.grid, exact):
            series = kramer_reconstruct(S, samples, z)
            error = max(error, norm(series - v) / scale)
            gap = max(gap, norm(series - kramer_kernel_form(S, samples, z, H=H)) / scale)

        details = {"series": "kramer", "max_error": error, "kernel_form_gap": gap}
        reporting.write_json(ctx.path("samples.json"), samples.to_records())
        reporting.write_json(ctx.path("reconstruct.json"), details)
        exact_ok = ctx.noise > 0 or error <= RECONSTRUCT_TOL
        return exact_ok and gap <= SERIES_TOL, details

    def battery_sweep(self, ctx):
        S = self._certified(ctx)
        f = self._random_element(ctx, "sweep")
        truncations = ctx.options.truncations or ctx.scenario.truncations or list(range(S.dim + 1))
        samples = take_samples(f.value, S.nodes, ctx.noise, ctx.rng("sweep"))
        rows = convergence_sweep(S, f, truncations, ctx.grid, self.config.record_timings, samples)
        reporting.write_csv(ctx.path("sweep.csv"), reporting.SWEEP_COLUMNS, reporting.sweep_rows(rows))

        full = [r.max_error for r in rows if r.N >= S.dim]
        monotone = is_monotone(rows)
        passed = ctx.noise > 0 or all(e <= RECONSTRUCT_TOL for e in full)
        if ctx.kernel.family == ZAYED and not ctx.noise:
            passed = passed and monotone
        return passed, {"rows": len(rows), "monotone": monotone, "full_error": max(full, default=None)}

    def _betas(self, ctx):
        if ctx.options.betas:
            return list(ctx.options.betas)
        if ctx.scenario.betas:
            return [to_complex(b) for b in ctx.scenario.betas]
        scale = 1.0 + float(np.max(np.abs(ctx.kernel.nodes)))
        return [scale * p for p in GENERIC_PROBES]

    def battery_invariance(self, ctx):
        S = self._certified(ctx)
        reports = invariance_check(S, self._betas(ctx), ctx.grid, self.config.membership_tol)
        reporting.write_csv(ctx.path("invariance.csv"), reporting.INVARIANCE_COLUMNS,
                            reporting.invariance_rows(reports))
        failing = [r.beta for r in reports if not r.all_shifts_in_space]
        worst = max((r.max_residual for r in reports), default=0.0)
        return not failing, {"betas": len(reports), "failing": failing, "max_residual": worst}

    def battery_factorize(self, ctx):
        S = self._certified(ctx)
        probes = None if ctx.scenario.probes is None else [to_complex(p) for p in ctx.scenario.probes]
        fact = extract_factorization(S, probes, ctx.grid)

        f = self._random_element(ctx, "factorize")
        samples = take_samples(f.value, S.nodes)
        scale = max(1.0, max(norm(f.value(z)) for z in ctx.grid))
        gap = max(
            norm(quasi_lagrange_reconstruct(fact, S, samples, z) - kramer_reconstruct(S, samples, z))
            for z in ctx.grid
        ) / scale

        details = {"a": fact.a, "A_at_nodes": fact.A_at_nodes, "residual": fact.residual,
                   "c_residual": fact.c_residual, "series_gap": gap}
        reporting.write_json(ctx.path("factorize.json"), details)
        return gap <= SERIES_TOL, details

    def battery_debranges(self, ctx):
        scenario = ctx.scenario
        if scenario.debranges is None:
            raise ScenarioError(f"scenario {scenario.name} has no debranges block")

        S = self._certified(ctx)
        spec = scenario.debranges
        op = build_debranges(scenario, ctx.kernel.dim)
        points = [to_complex(p) for p in spec.points] or list(np.linspace(-3.5, 3.5, 8))
        op.require_invertible(points + [to_complex(spec.beta)])
        positivity = positivity_check(op, points)

        details = {"min_eig": positivity.min_eig, "max_eig": positivity.max_eig, "psd": positivity.psd}
        passed = positivity.psd

        if scenario.Q.variant == SIN_PI and op.dim == 1:
            Q = ctx.kernel.Q
            zayed = build_zayed(Q, Q.nodes, np.eye(Q.nodes.size, dtype=complex))
            pairs = [(a, b) for a in Q.nodes for b in Q.nodes]
            details["sinc_defect"] = sinc_cross_check(op, zayed, pairs)
            passed = passed and details["sinc_defect"] <= RECONSTRUCT_TOL

        probes = None if spec.probes is None else [to_complex(p) for p in spec.probes]
        battery = space_equality_battery(S, to_complex(spec.beta), probes, ctx.grid, self.config.cond_limit)
        details["verdict"] = battery.verdict
        details["cond_F_beta"] = battery.cond_F_beta
        details["cond_F_beta_bar"] = battery.cond_F_beta_bar
        details["conditions"] = [{"name": e.name, "status": e.status, "value": e.value} for e in battery.entries]

        reporting.write_json(ctx.path("debranges.json"), details)
        return passed and battery.verdict != "inconsistent", details

    def battery_shift(self, ctx):
        S = self._certified(ctx)
        F = S.kernel
        beta = ctx.options.beta
        if beta is None:
            beta = self._betas(ctx)[0]

        H = null_space(F)
        basis = vanishing_subspace(F, beta, H)
        if basis.shape[1] == 0:
            details = {"beta": beta, "dim_H_beta": 0}
            reporting.write_json(ctx.path("shift.json"), details)
            return True, details

        weights = random_vectors(ctx.rng("shift"), basis.shape[1], 1)[0]
        f = lift(F, basis @ weights, H)
        result = backward_shift(S, f, beta, ctx.grid, self.config.membership_tol)
        scale = max(norm(result.output_coeff), 1e-300)
        agreement = norm(result.output_coeff - result.solved_coeff) / scale

        details = {
            "beta": beta, "dim_H_beta": basis.shape[1], "in_space": result.in_space,
            "residual": result.residual, "output_coeff": result.output_coeff,
            "solved_coeff": result.solved_coeff, "coefficient_gap": agreement,
        }
        reporting.write_json(ctx.path("shift.json"), details)
        return result.in_space and agreement <= SERIES_TOL, details

    def battery_structure(self, ctx):
        S = self._certified(ctx)
        F = S.kernel
        rng = ctx.rng("structure")
        H = null_space(F)

        reproducing, pointwise = 0.0, 0.0
        for k, (u, v) in enumerate(zip(random_vectors(rng, F.dim, 100), random_vectors(rng, F.dim, 100))):
            gamma = ctx.grid[k % len(ctx.grid)]
            f = lift(F, u, H)
            scale = 1.0 + norm(f.value(gamma)) * norm(v)
            reproducing = max(reproducing, reproducing_check(f, gamma, v, H) / scale)
            op_norm = float(linalg.svdvals(evaluate(F, gamma))[0])
            pointwise = max(pointwise, pointwise_bound_defect(f, gamma) / (1.0 + op_norm * f.norm))

        f, g = (lift(F, u, H) for u in random_vectors(rng, F.dim, 2))
        parallelogram = parallelogram_defect(f, g) / (f.norm ** 2 + g.norm ** 2)
        simple_dim = simplicity_check(S, probe_points(F))

        details = {
            "reproducing_residual": reproducing, "pointwise_defect": pointwise,
            "parallelogram_defect": parallelogram, "simplicity_dim": simple_dim,
        }
        passed = reproducing <= RECONSTRUCT_TOL and pointwise <= RECONSTRUCT_TOL
        passed = passed and parallelogram <= 1e-12 and simple_dim == 0

        z1, z2 = ISOMETRY_BETAS[:2]
        bijection = bijection_check(S, z1, z2, ctx.grid)
        details["bijection"] = {"bijective": bijection.bijective, "dim": bijection.dim_z1,
                                "max_roundtrip": bijection.max_roundtrip}
        details["regular_type_bound"] = regular_type_bound(S, z1, ctx.grid)
        details["mult_in_domain"] = mult_apply(S, f, ctx.grid, self.config.membership_tol).in_domain
        passed = passed and bijection.bijective

        if np.all(np.abs(S.nodes.imag) <= 1e-12 * (1.0 + np.abs(S.nodes))):
            isometry = [debranges_isometry_check(S, beta, ctx.grid) for beta in ISOMETRY_BETAS]
            details["isometry_defect"] = max(r.max_norm_defect for r in isometry)
            passed = passed and all(r.isometric for r in isometry)

        reporting.write_json(ctx.path("structure.json"), details)
        return passed, details

    # dispatch

    def run_battery(self, command, ctx):
        battery = getattr(self, f"battery_{command}")
        result = self.executor.execute(command, battery, ctx)
        result.details = dict(result.details, scenario=ctx.scenario.name)
        return result

    def run_scenario(self, command, path, options):
        """one command on one scenario file; returns the exit code."""
        try:
            scenario = load_scenario(path)
            ctx = self.prepare(scenario, options)
        except (ScenarioError, KernelBuildError, PreconditionViolation) as e:
            result = BatteryResult(command, False, {"scenario": str(path)}, e)
            if not isinstance(e, ScenarioError):
                result.error = ScenarioError(str(e))
            self._record(result)
            return EXIT_SCHEMA

        result = self.run_battery(command, ctx)
        self._record(result)
        return result.exit_code

    def run_all(self, path, options):
        """every battery on every scenario under path, checked against its expect map."""
        paths = sorted(glob.glob(os.path.join(path, "*.json"))) if os.path.isdir(path) else [path]
        if not paths:
            self._status(False, f"no scenarios found in {path}")
            return EXIT_SCHEMA

        code = EXIT_OK
        for scenario_path in paths:
            try:
                scenario = load_scenario(scenario_path)
                ctx = self.prepare(scenario, options)
            except (ScenarioError, KernelBuildError, PreconditionViolation) as e:
                self._record(BatteryResult("load", False, {"scenario": scenario_path}, ScenarioError(str(e))))
                code = code or EXIT_SCHEMA
                continue

            summary, payloads = {}, []
            certificate_failed = False
            for command in COMMANDS:
                if command == "debranges" and scenario.debranges is None:
                    continue
                expected = scenario.expect.get(command, "pass")
                if certificate_failed and command in NEEDS_CERTIFICATE:
                    summary[command] = SKIPPED
                    continue

                result = self.run_battery(command, ctx)
                outcome = "pass" if result.passed else "fail"
                summary[command] = outcome
                payloads.append(reporting.battery_payload(command, result.passed, result.details, result.error))
                self._record(result, expected)

                if command == "certify" and not result.passed:
                    certificate_failed = True
                if outcome != expected:
                    code = code or (result.exit_code if expected == "pass" else EXIT_BATTERY)

            reporting.write_json(os.path.join(ctx.out_dir, "summary.json"),
                                 {"scenario": scenario.name, "seed": ctx.seed, "batteries": summary,
                                  "results": payloads})
        return code

    def _record(self, result, expected="pass"):
        self.results.append((result, expected))
        name = result.details.get("scenario", "")
        ok = result.passed == (expected == "pass")
        note = "" if expected == "pass" else " (expected fail)"
        message = f"{result.name} {name}{note}"
        if result.error is not None:
            message += f": {result.error}"
        self._status(ok, message)

    def summary_table(self):
        table = Table(title="vkramer batteries")
        table.add_column("scenario")
        table.add_column("battery")
        table.add_column("status")
        table.add_column("expected")
        table.add_column("exit")
        for result, expected in self.results:
            table.add_row(
                str(result.details.get("scenario", "")), result.name,
                "pass" if result.passed else "fail", expected, str(result.exit_code),
            )
        self.console.print(table)

    def run(self, command, path, options=None):
        """entry point: returns the process exit code."""
        options = options or RunOptions()
        if command == "all":
            code = self.run_all(path, options)
        elif command in COMMANDS:
            code = self.run_scenario(command, path, options)
        else:
            raise ValueError(f"unknown command: {command}")

        self.summary_table()
        return code

