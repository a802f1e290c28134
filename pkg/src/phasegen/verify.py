"""Acceptance suite: every check compares generating-function results with
an independent reference (Fock-basis oracle, special-function formula or
explicit closed form) at a fixed tolerance.

Each check returns ``(passed, detail)``; :func:`run_suite` times them and
collects :class:`CheckResult` rows for the CLI and the test suite.
"""

from __future__ import annotations

import contextlib
import functools
import io
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import oracle, subtraction
from .fock import fock_wigner, laguerre_oracle, squeezed_fock_marginal, squeezed_fock_wigner
from .jets import JetSpace
from .states import (
    SqueezeParams,
    StateSpec,
    ab_from_mean_n,
    loss_equivalence,
    lossy_squeezed,
    squeezed_thermal,
)
from .statistics import (
    K,
    distribution,
    double_generating_formal,
    formal_subtracted_distribution,
    heralded_subtracted_distribution,
)
from .subtraction import (
    ETA,
    ETABAR,
    default_grid,
    herald_probabilities,
    heralded_generating,
    small_zeta_deviation,
    subtract,
)

__all__ = ["CheckResult", "CHECKS", "run_suite", "format_report"]

A_FIG = 3.0
B_FIG = 2.0 * np.sqrt(2.0)
PURITIES = (1.0, 0.9)
ZETA = 0.2
ORACLE_N = oracle.DEFAULT_N
SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    skipped: bool = False

    @property
    def status(self) -> str:
        if self.skipped:
            return "SKIP"
        return "PASS" if self.passed else "FAIL"


def _slice(lo=-3.0, hi=3.0, step=0.05) -> np.ndarray:
    return np.round(np.arange(lo, hi + step / 2, step), 12)


def _on_q_axis(q) -> np.ndarray:
    return np.asarray(q) / SQRT2 + 0j


def _fig_state(T):
    return squeezed_thermal(T, A_FIG, B_FIG)


# -- individual checks ------------------------------------------------------


def check_parameter_bridge():
    A, B = ab_from_mean_n(1.0)
    sq = SqueezeParams.from_mean_n(1.0)
    err_B = abs(B - 2.8284)
    ok = A == 3.0 and abs(B.imag) == 0.0 and err_B <= 5e-4
    ok &= abs(sq.A - A) < 1e-12 and abs(sq.B - B) < 1e-12
    return ok, f"A={A:.12g} B={B.real:.10f} |B-2.8284|={err_B:.2e}"


def check_loss_equivalence(seed: int = 7):
    rng = np.random.default_rng(seed)
    alpha = default_grid()
    worst = 0.0
    for _ in range(10):
        t = rng.uniform(0.05, 1.0)
        A, B = ab_from_mean_n(rng.uniform(0.0, 3.0), rng.uniform(0.0, 2 * np.pi))
        direct = lossy_squeezed(t, A, B)(alpha)
        T, A0, B0 = loss_equivalence(t, A, B)
        equiv = squeezed_thermal(T, A0, B0)(alpha)
        worst = max(worst, float(np.abs(direct - equiv).max()))
    return worst < 1e-12, f"max|dW|={worst:.2e} over 10 random (t, n)"


def check_formal_vs_oracle(n_max: int = 5, N: int = ORACLE_N):
    q = _slice()
    alpha = _on_q_axis(q)
    worst = 0.0
    for T in PURITIES:
        rho = oracle.squeezed_thermal_dm(T, A_FIG, N=N)
        refs = oracle.wigner_from_dm([oracle.annihilate(rho, n) for n in range(n_max + 1)], alpha)
        closed = _closed_formal(T, n_max, alpha)
        for n in range(n_max + 1):
            ours = subtract(_fig_state(T), n, "formal")(alpha)
            worst = max(worst, float(np.abs(ours - refs[n]).max()), float(np.abs(closed[n] - refs[n]).max()))
    return worst < 1e-6, f"max|dW|={worst:.2e} (oracle N={N}, generic and closed form)"


def _closed_formal(T, n_max, alpha):
    """Normalized slices from the squeezed-thermal closed forms."""
    space = JetSpace.build({ETA: n_max, ETABAR: n_max})
    values = subtraction.formal_generating_sts(T, A_FIG, B_FIG, space)(alpha)
    trace = subtraction.formal_trace_sts(T, A_FIG, B_FIG, space)
    return [np.real(values.extract((n, n)) / trace.extract((n, n))) for n in range(n_max + 1)]


def _closed_heralded(T, n_max, alpha):
    space = JetSpace.build({"J": n_max})
    values = subtraction.heralded_generating_sts(T, A_FIG, B_FIG, ZETA, space)(alpha)
    trace = subtraction.heralded_trace_sts(T, A_FIG, ZETA, space)
    return [np.real(values.extract((n,)) / trace.extract((n,))) for n in range(n_max + 1)]


def negative_intervals(w) -> int:
    neg = np.asarray(w) < 0
    return int(neg[0]) + int(np.sum(neg[1:] & ~neg[:-1]))


def check_figure_structure(n_max: int = 5):
    q = _slice(-6.0, 6.0, 0.01)
    alpha = _on_q_axis(q)
    problems = []
    origins = {}
    for T in PURITIES:
        vals = []
        for n in range(n_max + 1):
            res = subtract(_fig_state(T), n, "formal")
            w = res(alpha)
            if negative_intervals(w) != n:
                problems.append(f"T={T} n={n}: {negative_intervals(w)} negative regions")
            w0 = float(res(0.0))
            vals.append(w0)
            if n % 2 == 1 and not w0 < 0:
                problems.append(f"T={T} n={n}: W(0)={w0:.3g} not negative")
        origins[T] = vals
    if any(abs(abs(v) - 2.0) > 1e-8 for v in origins[1.0]):
        problems.append(f"T=1 |W(0)| not 2: {origins[1.0]}")
    mags = np.abs(origins[0.9])
    if not np.all(np.diff(mags) < 0):
        problems.append(f"T=0.9 |W(0)| not decreasing: {mags}")
    detail = "; ".join(problems) or ("T=0.9 |W(0)|=" + ", ".join(f"{m:.4f}" for m in mags))
    return not problems, detail


def check_negativity_criterion():
    bad = []
    for T in np.linspace(0.15, 1.0, 10):
        for A in np.linspace(1.25, 6.0, 10):
            state = squeezed_thermal(T, A, np.sqrt(A * A - 1.0))
            w0 = float(subtract(state, 1, "formal")(0.0))
            if np.sign(w0) != np.sign(1.0 - T * A):
                bad.append((round(T, 3), round(A, 3)))
    return not bad, f"{100 - len(bad)}/100 grid points agree" + (f"; mismatches {bad[:5]}" if bad else "")


def check_small_zeta():
    details = []
    ok = True
    for T in PURITIES:
        d2 = small_zeta_deviation(_fig_state(T), 1e-2)
        d3 = small_zeta_deviation(_fig_state(T), 1e-3)
        ratio = d2 / d3
        ok &= 5.0 <= ratio <= 20.0
        details.append(f"T={T}: ratio={ratio:.3f}")
    return ok, "; ".join(details)


def check_heralded_vs_oracle(n_max: int = 3, N: int = ORACLE_N):
    q = _slice()
    alpha = _on_q_axis(q)
    w_err = p_err = sum_err = 0.0
    for T in PURITIES:
        state = _fig_state(T)
        rho = oracle.squeezed_thermal_dm(T, A_FIG, N=N)
        states, probs = oracle.herald_distribution(rho, ZETA)
        refs = oracle.wigner_from_dm([states[n] / probs[n] for n in range(n_max + 1)], alpha)
        closed = _closed_heralded(T, n_max, alpha)
        for n in range(n_max + 1):
            w_err = max(w_err, float(np.abs(subtract(state, n, "heralded", ZETA)(alpha) - refs[n]).max()))
            w_err = max(w_err, float(np.abs(closed[n] - refs[n]).max()))
        analytic = herald_probabilities(state, ZETA, N)
        p_err = max(p_err, float(np.abs(analytic[: n_max + 1] - probs[: n_max + 1]).max()))
        sum_err = max(sum_err, abs(analytic.sum() - 1.0), abs(probs.sum() - 1.0))
    ok = w_err < 1e-5 and p_err < 1e-6 and sum_err < 1e-8
    return ok, f"max|dW|={w_err:.2e} max|dP|={p_err:.2e} |sum P - 1|={sum_err:.2e}"


def check_unconditioned_loss(N: int = ORACLE_N):
    alpha = default_grid()
    t = 1.0 - ZETA
    A, B = A_FIG, B_FIG
    exact = float(np.abs(heralded_generating(_fig_state(1.0), ZETA, 1.0)(alpha) - lossy_squeezed(t, A, B)(alpha)).max())
    q = _slice()
    rho = oracle.loss_channel(oracle.squeezed_thermal_dm(0.9, A, N=N), t)
    ref = oracle.wigner_from_dm(rho, _on_q_axis(q))
    ours = heralded_generating(_fig_state(0.9), ZETA, 1.0)(_on_q_axis(q))
    general = float(np.abs(ours - ref).max())
    ok = exact < 1e-10 and general < 1e-6
    return ok, f"T=1 vs lossy closed form {exact:.2e}; T=0.9 vs oracle {general:.2e}"


def check_fock_family(n_max: int = 8):
    q = _slice()
    alpha = _on_q_axis(q) + 0.3j
    refs = oracle.wigner_from_dm([oracle.fock_dm(n, N=60) for n in range(n_max + 1)], alpha)
    lag = orc = 0.0
    for n in range(n_max + 1):
        w = fock_wigner(n, alpha)
        lag = max(lag, float(np.abs(w - laguerre_oracle(n, alpha)).max()))
        orc = max(orc, float(np.abs(w - refs[n]).max()))
    grid = default_grid()
    sq_fock = squeezed_fock_wigner(1, SqueezeParams.from_A(A_FIG), grid)
    sub = subtract(_fig_state(1.0), 1, "formal")(grid)
    same = float(np.abs(sq_fock - sub).max())
    ok = lag < 1e-8 and orc < 1e-8 and same < 1e-10
    return ok, f"Laguerre {lag:.2e}; oracle {orc:.2e}; squeezed |1> vs subtracted {same:.2e}"


def check_statistics(two_mode: bool = True, N: int = ORACLE_N):
    problems = []
    mean_err = 0.0
    for T in np.linspace(0.2, 1.0, 5):
        for A in np.linspace(1.0, 5.0, 5):
            d = distribution(squeezed_thermal(T, A, np.sqrt(A * A - 1.0)), n_report=2)
            mean_err = max(mean_err, abs(d.mean - (A - T) / (2 * T)))
    if mean_err >= 1e-10:
        problems.append(f"mean error {mean_err:.2e}")
    space = JetSpace.build({ETA: 4, ETABAR: 4, K: 0}, centers={K: 1.0})
    jet_err = 0.0
    for T in PURITIES:
        R = double_generating_formal(_fig_state(T), space).derivative_jet(K, 0)
        tr = subtraction.formal_trace_sts(T, A_FIG, B_FIG, JetSpace.build({ETA: 4, ETABAR: 4}))
        jet_err = max(jet_err, float(np.abs(R.coeffs - tr.coeffs).max()))
    if jet_err >= 1e-12:
        problems.append(f"R(K=1) vs trace jet {jet_err:.2e}")
    dist_err = 0.0
    for T in PURITIES:
        rho = oracle.squeezed_thermal_dm(T, A_FIG, N=N)
        for n in range(4):
            ours = formal_subtracted_distribution(_fig_state(T), n)
            ref = oracle.photon_dist_dm(oracle.annihilate(rho, n))
            dist_err = max(dist_err, float(np.abs(ours.probs - ref.probs[: ours.probs.size]).max()))
        if two_mode:
            states, probs = oracle.herald_distribution(rho, ZETA, 4)
            for n in range(4):
                ours = heralded_subtracted_distribution(_fig_state(T), ZETA, n)
                ref = oracle.photon_dist_dm(states[n] / probs[n])
                dist_err = max(dist_err, float(np.abs(ours.probs - ref.probs[: ours.probs.size]).max()))
    if dist_err >= 1e-6:
        problems.append(f"distribution vs oracle {dist_err:.2e}")
    odd = float(np.abs(distribution(_fig_state(1.0)).probs[1::2]).max())
    if odd >= 1e-12:
        problems.append(f"squeezed vacuum P(odd) {odd:.2e}")
    detail = f"mean {mean_err:.1e}; R(K=1) {jet_err:.1e}; P(n) {dist_err:.1e}; P(odd) {odd:.1e}"
    if not two_mode:
        detail += " (heralded distributions skipped)"
    return not problems, detail


def _normalized_states():
    """(label, Wigner callable, marginal callable) for every normalized output family."""
    out = []
    for T in PURITIES:
        state = _fig_state(T)
        for n in range(6):
            res = subtract(state, n, "formal")
            out.append((f"formal T={T} n={n}", res, res.marginal))
        for n in range(4):
            res = subtract(state, n, "heralded", ZETA)
            out.append((f"heralded T={T} n={n}", res, res.marginal))
        res = subtract(state, 1, "npnr", ZETA)
        out.append((f"click T={T}", res, res.marginal))
    sq = SqueezeParams.from_A(A_FIG)
    for n in range(6):
        out.append((
            f"squeezed Fock n={n}",
            functools.partial(squeezed_fock_wigner, n, sq),
            functools.partial(squeezed_fock_marginal, n, sq),
        ))
    res = subtract(StateSpec("lossy_squeezed", mean_n=1.0, transmission=0.7), 0, "formal")
    out.append(("lossy squeezed t=0.7", res, res.marginal))
    return out


def phase_space_quadrature(wigner, q_max=8.0, p_max=25.0, step=0.1, rows=40) -> float:
    """Trapezoid estimate of ``int W dq dp / 2 pi`` (spectrally accurate for these forms)."""
    q = np.round(np.arange(-q_max, q_max + step / 2, step), 12)
    p = np.round(np.arange(-p_max, p_max + step / 2, step), 12)
    total = 0.0
    for i in range(0, q.size, rows):
        alpha = (q[i : i + rows, None] + 1j * p[None, :]) / SQRT2
        total += float(np.sum(wigner(alpha)))
    return total * step * step / (2 * np.pi)


def check_normalization():
    s = _slice(-25.0, 25.0, 0.02)
    trace_err = marg_err = 0.0
    marg_min = np.inf
    for _, wigner, marg in _normalized_states():
        trace_err = max(trace_err, abs(phase_space_quadrature(wigner) - 1.0))
        for axis in ("q", "p"):
            values = marg(axis, s)
            marg_min = min(marg_min, float(values.min()))
            marg_err = max(marg_err, abs(float(np.trapezoid(values, s)) - 1.0))
    ok = trace_err < 1e-8 and marg_min >= -1e-9 and marg_err < 1e-6
    return ok, f"|int W - 1|={trace_err:.1e}; min marginal={marg_min:.1e}; |int marginal - 1|={marg_err:.1e}"


def check_cli_determinism():
    from .cli import main

    argv = ["slice", "--state", "squeezed_thermal", "--purity", "0.9", "--subtract", "3", "--range", "-2:2:0.25"]
    outputs = []
    for _ in range(2):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = main(argv)
        outputs.append((code, buf.getvalue().encode()))
    same = outputs[0] == outputs[1] and outputs[0][0] == 0
    return same, f"{len(outputs[0][1])} bytes, identical={outputs[0][1] == outputs[1][1]}"


# -- registry ---------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    number: int
    name: str
    fn: Callable
    budget: float | None = None
    two_mode: bool = False


CHECKS = (
    Check(1, "parameter bridge", check_parameter_bridge, 1.0),
    Check(2, "lossy squeezed vs squeezed thermal", check_loss_equivalence, 5.0),
    Check(3, "formal subtraction vs Fock oracle", check_formal_vs_oracle, 60.0),
    Check(4, "slice structure", check_figure_structure),
    Check(5, "single-subtraction negativity", check_negativity_criterion),
    Check(6, "heralded to formal at small zeta", check_small_zeta),
    Check(7, "heralded vs two-mode oracle", check_heralded_vs_oracle, 120.0, two_mode=True),
    Check(8, "unconditioned herald equals loss", check_unconditioned_loss, two_mode=True),
    Check(9, "Fock family", check_fock_family),
    Check(10, "photon statistics", check_statistics),
    Check(11, "normalization and marginals", check_normalization),
    Check(12, "CLI determinism and suite runtime", check_cli_determinism),
)

SUITE_BUDGET = 300.0


def run_suite(fast: bool = False, only=None) -> list[CheckResult]:
    results = []
    start = time.perf_counter()
    for check in CHECKS:
        if only is not None and check.number not in only:
            continue
        if fast and check.two_mode:
            results.append(CheckResult(check.number, check.name, True, "skipped (--fast)", 0.0, skipped=True))
            continue
        t0 = time.perf_counter()
        try:
            if check.fn is check_statistics:
                passed, detail = check.fn(two_mode=not fast)
            else:
                passed, detail = check.fn()
        except Exception as exc:  # a crash is a failure, not an abort
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        seconds = time.perf_counter() - t0
        if check.budget is not None and seconds > check.budget:
            passed = False
            detail += f"; over budget {seconds:.1f}s > {check.budget:.0f}s"
        if check.number == 12:
            total = time.perf_counter() - start
            detail += f"; suite {total:.1f}s"
            if total > SUITE_BUDGET:
                passed = False
        results.append(CheckResult(check.number, check.name, bool(passed), detail, seconds))
    return results


def format_report(results: list[CheckResult]) -> str:
    lines = [f"[{r.status}] {r.number:2d}. {r.name} ({r.seconds:.2f}s): {r.detail}" for r in results]
    failed = sum(1 for r in results if not r.passed)
    lines.append(f"{len(results) - failed}/{len(results)} passed")
    return "\n".join(lines)
