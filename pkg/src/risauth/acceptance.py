"""Acceptance checks, shared by ``risauth verify`` and the test suite.

Each check returns a :class:`CheckResult`; a check passes only if its
assertion holds and it finishes inside its time budget.
"""

from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .adversary import AttackKind, AttackSpec, RelayGain
from .auth import BaselineProfile, Thresholds, decide, normalized_score, profile_delta
from .channel import (
    ChannelRealization,
    RicianParams,
    ScenarioGeometry,
    cascade_coefficient,
    optimal_ris_phases,
    sample_realization,
)
from .circuit import (
    CircuitParams,
    NoiseParams,
    VoltageProfile,
    demodulator_voltage,
    demodulator_voltage_stepwise,
    harvester_voltage,
    harvester_voltage_stepwise,
)
from .config import apply_param
from .sim import SimResult, TABLE_FPRS, TrialConfig, fpr, roc_curve, simulate, tpr_at_fpr, wilson_interval

FPR_GRID = np.round(np.arange(0.01, 1.0, 0.01), 2)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: float = math.inf

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.seconds:.1f} s / {self.budget:.0f} s) {self.detail}"


def _timed(number: int, name: str, budget: float, fn) -> CheckResult:
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    if elapsed >= budget:
        ok, detail = False, f"{detail}; over time budget"
    return CheckResult(number, name, bool(ok), detail, elapsed, budget)


def _preset_base(name: str) -> TrialConfig:
    from .cli import load_preset

    return load_preset(name).base


def _rate(cfg: TrialConfig, target: float = 0.2) -> tuple[float, SimResult]:
    res = simulate(cfg)
    return tpr_at_fpr(roc_curve(res.legit, res.attack), target).tpr, res


def _not_significantly_below(a: float, b: float, n: int) -> bool:
    """False only when a's 95% interval lies entirely below b's."""
    return not wilson_interval(a, n)[1] < wilson_interval(b, n)[0]


def _significantly_below(a: float, b: float, n: int) -> bool:
    return wilson_interval(a, n)[1] < wilson_interval(b, n)[0]


def _fmt(values) -> str:
    return "[" + ", ".join(f"{v:.4f}" for v in values) + "]"


# 1 -------------------------------------------------------------------------

def check_circuit_equivalence(n: int = 10_000, seed: int = 1, per_set: int = 10) -> tuple[bool, str]:
    """Stage-by-stage vs closed-form outputs on ``n`` random (circuit, power, resistor) draws.

    Errors are relative to the magnitude of the terms being subtracted, so
    outputs near diode turn-on are not judged by cancellation noise.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n // per_set):
        cp = CircuitParams(
            v_d=rng.uniform(0.05, 0.5), k_hrv=10 ** rng.uniform(0, 12), k_dem=10 ** rng.uniform(0, 12),
            alpha=rng.uniform(0.05, 0.95), divider_ratio=rng.uniform(0.05, 1.0),
        )
        p = 10 ** rng.uniform(-12, -2, per_set)
        r2 = 10 ** rng.uniform(2, 6)
        r1 = r2 * (1.0 - cp.divider_ratio) / cp.divider_ratio
        scale_h = 4.0 * np.sqrt(cp.k_hrv * cp.alpha * p) + 4.0 * cp.v_d
        scale_d = (np.sqrt(cp.k_dem * (1 - cp.alpha) * p) + 2.0 * cp.v_d) * cp.divider_ratio
        err_h = np.abs(harvester_voltage_stepwise(p, cp) - harvester_voltage(p, cp)) / scale_h
        err_d = np.abs(demodulator_voltage_stepwise(p, cp, r1, r2) - demodulator_voltage(p, cp)) / scale_d
        worst = max(worst, float(err_h.max()), float(err_d.max()))
    return worst <= 1e-12, f"max relative error {worst:.2e} over {n} draws"


# 2 -------------------------------------------------------------------------

def check_ris_optimality(n_real: int = 100, n_random: int = 10_000, n_el: int = 8, seed: int = 2):
    rng = np.random.default_rng(seed)
    geom = ScenarioGeometry(n_elements=n_el)
    p = RicianParams()
    losses = 0
    for _ in range(n_real):
        real = sample_realization(geom, p, rng)
        best = abs(cascade_coefficient(real.H_TR, real.H_RL, optimal_ris_phases(real)))
        phases = rng.uniform(0, 2 * np.pi, (n_random, n_el))
        rand = np.abs(np.sum(real.H_TR * real.H_RL * np.exp(1j * phases), axis=-1))
        losses += int(np.count_nonzero(rand > best * (1 + 1e-12)))
    exact = []
    for n in (1, 4, 16, 64):
        ones = np.ones(n, dtype=complex)
        unit = ChannelRealization(1 + 0j, 1 + 0j, 1 + 0j, ones, ones)
        exact.append(bool(abs(cascade_coefficient(unit.H_TR, unit.H_RL, optimal_ris_phases(unit))) ** 2 == n * n))
    return losses == 0 and all(exact), f"random phases beating optimum: {losses}; N^2 exact: {exact}"


# 3 -------------------------------------------------------------------------

def check_test_equivalence(n: int = 10_000, seed: int = 3) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    disagreements = 0
    for i in range(n):
        if i % 10 == 0:
            # exact boundary: power-of-two spreads make t * s and d / s exact
            s = 2.0 ** rng.integers(-4, 4, 4)
            mean = rng.uniform(1, 5, 4)
            t = float(rng.integers(1, 8))
            spread = VoltageProfile.from_array(s)
            s_h, s_d = max(s[0], s[1]), max(s[2], s[3])
            measured = mean.copy()
            measured[0] = mean[0] + t * s_h if rng.random() < 0.5 else mean[0]
            measured[2] = mean[2] + t * s_d
        else:
            mean = rng.uniform(0, 5, 4)
            spread = VoltageProfile.from_array(rng.uniform(0, 0.5, 4) * (rng.random(4) > 0.05))
            measured = np.abs(mean + rng.normal(0, 1, 4))
            t = float(rng.uniform(0, 5))
        base = BaselineProfile(VoltageProfile.from_array(mean), spread, 100)
        deltas = profile_delta(VoltageProfile.from_array(measured), base)
        two = decide(deltas, Thresholds.scaled(base, t)).accepted
        one = normalized_score(deltas, base) <= t
        disagreements += int(two != one)
    return disagreements == 0, f"{disagreements} disagreements in {n} cases"


# 4 -------------------------------------------------------------------------

def check_table2(n_trials: int | None = None) -> tuple[bool, str]:
    base = _preset_base("table2")
    if n_trials:
        base = replace(base, n_trials=n_trials)
    table = []
    for d in (0.5, 1.0, 1.5, 2.0):
        res = simulate(apply_param(base, "d_TL", d))
        roc = roc_curve(res.legit, res.attack)
        table.append([tpr_at_fpr(roc, f).tpr for f in TABLE_FPRS])
    at15 = [row[0] for row in table]
    strict = all(a > b for a, b in zip(at15, at15[1:]))
    in_fpr = all(all(a <= b for a, b in zip(row, row[1:])) for row in table)
    bracket = at15[0] >= 0.90 and at15[-1] <= 0.90
    detail = "TPR@0.15 by d_TL " + _fmt(at15) + "; rows " + "; ".join(_fmt(r) for r in table)
    return strict and in_fpr and bracket, detail


# 5 -------------------------------------------------------------------------

def check_fig7(n_trials: int | None = None) -> tuple[bool, str]:
    base = _preset_base("fig7")
    if n_trials:
        base = replace(base, n_trials=n_trials)
    n = base.n_trials
    curves = {}
    for n_el in (0, 20, 50, 100):
        res = simulate(apply_param(base, "n_elements", n_el))
        roc = roc_curve(res.legit, res.attack)
        curves[n_el] = np.array([tpr_at_fpr(roc, f).tpr for f in FPR_GRID])
    inversions, dominated = 0, 0
    order = (100, 50, 20, 0)
    for hi, lo in zip(order, order[1:]):
        for a, b in zip(curves[hi], curves[lo]):
            inversions += int(_significantly_below(a, b, n))
            dominated += int(_significantly_below(b, a, n))
    detail = (f"significant inversions {inversions}, significant dominance points {dominated}; "
              + "TPR@0.2 by N " + _fmt(curves[k][19] for k in (0, 20, 50, 100)))
    return inversions == 0 and dominated > 0, detail


# 6 -------------------------------------------------------------------------

def _trend(rates: list[float], n: int, increasing: bool, require_endpoint: bool) -> bool:
    seq = rates if increasing else rates[::-1]
    ok = all(_not_significantly_below(b, a, n) for a, b in zip(seq, seq[1:]))
    if require_endpoint:
        ok = ok and _significantly_below(seq[0], seq[-1], n)
    return ok


def check_fig6_to_10(n_trials: int | None = None) -> tuple[bool, str]:
    results, notes = [], []

    def sweep(preset, param, values, overrides=None):
        base = _preset_base(preset)
        if n_trials:
            base = replace(base, n_trials=n_trials)
        for k, v in (overrides or {}).items():
            base = apply_param(base, k, v)
        return [_rate(apply_param(base, param, v))[0] for v in values], base.n_trials

    snr, n = sweep("fig6", "sigma2_l", ["-30 dBm", "-40 dBm", "-50 dBm", "-60 dBm"])
    results.append(_trend(snr, n, increasing=True, require_endpoint=True))
    notes.append("SNR " + _fmt(snr))

    by_n = {}
    for n_el in (20, 50, 100):
        rates, n = sweep("fig8", "d_RL", [0.5, 1.0, 1.5, 2.0], {"n_elements": n_el})
        by_n[n_el] = rates
        results.append(_trend(rates, n, increasing=False, require_endpoint=True))
        notes.append(f"d_RL N={n_el} " + _fmt(rates))
    results.append(all(_significantly_below(a, b, n) for a, b in zip(by_n[20], by_n[100])))

    for n_el in (0, 20, 50, 100):
        rates, n = sweep("fig9", "p_s", ["0.5 dBm", "1 dBm"], {"n_elements": n_el})
        results.append(_trend(rates, n, increasing=True, require_endpoint=False))
        notes.append(f"P_s N={n_el} " + _fmt(rates))

    rates, n = sweep("fig10", "d_EL", [0.2, 0.4, 0.75, 1.2], {"n_elements": 100})
    results.append(_trend(rates, n, increasing=True, require_endpoint=True))
    notes.append("d_EL N=100 " + _fmt(rates))
    return all(results), "; ".join(notes)


# 7 -------------------------------------------------------------------------

def check_fig11(n_trials: int | None = None) -> tuple[bool, str]:
    base = _preset_base("fig11")
    if n_trials:
        base = replace(base, n_trials=n_trials)
    n = base.n_trials
    grid = np.geomspace(1e-3, 1e3, 256)
    mono, drops, tprs = True, {}, {}
    for n_el in (0, 100):
        cfg_n = apply_param(base, "n_elements", n_el)
        fprs, rates = [], []
        for k in (2, 3, 4):
            res = simulate(apply_param(cfg_n, "n_eve", k))
            fprs.append(np.array([fpr(res.attack, t) for t in grid]))
            rates.append(tpr_at_fpr(roc_curve(res.legit, res.attack), 0.2).tpr)
        mono &= all(np.all(b >= a) for a, b in zip(fprs, fprs[1:]))
        drops[n_el] = rates[0] - rates[-1]
        tprs[n_el] = rates
    var = sum(p * (1 - p) / n for k in tprs for p in (tprs[k][0], tprs[k][-1]))
    gap = drops[0] - drops[100]
    significant = gap > 1.959963984540054 * math.sqrt(var)
    detail = (f"FPR monotone in n_eve: {mono}; TPR@0.2 no RIS {_fmt(tprs[0])}, N=100 {_fmt(tprs[100])}; "
              f"drop no RIS {drops[0]:.4f} vs N=100 {drops[100]:.4f}")
    return mono and significant, detail


# 8 -------------------------------------------------------------------------

def check_noiseless_gap(n_trials: int = 100) -> tuple[bool, str]:
    variants = [(k, RelayGain.UNIT) for k in AttackKind] + [(AttackKind.RELAY, RelayGain.MATCHED)]
    ok, notes = True, []
    for n_el in (0, 20):
        base = TrialConfig(geometry=ScenarioGeometry(n_elements=n_el), noise=NoiseParams.noiseless(),
                           n_trials=n_trials, master_seed=8)
        for kind, gain in variants:
            res = simulate(replace(base, attack=AttackSpec(kind=kind, relay_gain=gain)))
            legit_max, attack_min = float(res.legit.max()), float(res.attack.min())
            t = attack_min / 2.0
            exact = fpr(res.attack, t) == 0.0 and float(np.mean(res.legit <= t)) == 1.0
            ok &= legit_max == 0.0 and attack_min > 0.0 and exact
            if not (legit_max == 0.0 and attack_min > 0.0):
                notes.append(f"N={n_el} {kind.value}/{gain.value}: legit max {legit_max}, attack min {attack_min}")
    return ok, "; ".join(notes) or "legit deviation 0 and attack deviation > 0 in every trial"


# 9 -------------------------------------------------------------------------

def check_determinism(seed: int = 42) -> tuple[bool, str]:
    from .cli import load_preset, override, run_experiment, write_experiment

    outputs = []
    with tempfile.TemporaryDirectory() as tmp:
        for run in ("a", "b"):
            spec = override(load_preset("table2"), seed=seed, out=Path(tmp) / run)
            paths = write_experiment(run_experiment(spec))
            outputs.append({p.name: p.read_bytes() for p in paths})
    same = outputs[0] == outputs[1] and len(outputs[0]) > 0
    return same, f"{len(outputs[0])} files, identical: {same}"


CHECKS = {
    1: ("closed-form circuit equivalence", 1.0, check_circuit_equivalence),
    2: ("RIS optimality and N^2 law", 5.0, check_ris_optimality),
    3: ("two-threshold vs normalized-score equivalence", 1.0, check_test_equivalence),
    4: ("distance trend table", 60.0, check_table2),
    5: ("RIS element-count ROC dominance", 120.0, check_fig7),
    6: ("SNR, d_RL, P_s and d_EL trends", 180.0, check_fig6_to_10),
    7: ("multi-attacker trends", 120.0, check_fig11),
    8: ("noiseless security gap", 1.0, check_noiseless_gap),
    9: ("seeded output determinism", 60.0, check_determinism),
}


def run_check(number: int) -> CheckResult:
    name, budget, fn = CHECKS[number]
    return _timed(number, name, budget, fn)


def run_all(only=None) -> list[CheckResult]:
    return [run_check(k) for k in (only or sorted(CHECKS))]
