"""Comparison schemes: FMI, FLC, GMO, IDD, DBRO and the age-only ablation.

Every baseline shares the outer loop (interval solve, offloading block,
multiplier update, joint stopping rule) and differs only in how it sets
the sampling intervals (FMI) or the offload flags (the rest).  That keeps
comparisons apples-to-apples: observed gaps come from the policy, not
from a different iteration scheme.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .metric import OBJECTIVE_AOI, OBJECTIVE_MAOI
from .optimizer import (
    Decision,
    ScenarioEvaluator,
    SolveTrace,
    _offloading_equilibrium,
    run_outer_loop,
    solve_jso,
)
from .system_model import DeviceProfile, SystemConfig

DBRO_MAX_SWEEPS = 200


def solve_fmi(profiles: Sequence[DeviceProfile], config: SystemConfig,
              init: Decision | None = None,
              objective: str = OBJECTIVE_MAOI) -> tuple[Decision, SolveTrace]:
    """Fixed minimum-energy-feasible interval; offloading/multipliers as usual.

    The interval rule is re-evaluated every iteration, so a device that
    switches branch immediately re-tightens to its new minimum.
    """
    ev = ScenarioEvaluator(profiles, config, objective)

    def tau_rule(mu, x, _tau):
        trans = ev.trans_times(x)
        e = ev.energies(x, trans)
        return np.maximum(config.tau_min, e / ev.e_budget), 0

    def offload_rule(tau, mu, x):
        x_next, committed, _ = _offloading_equilibrium(ev, tau, mu, x)
        return x_next, committed

    return run_outer_loop(ev, tau_rule, offload_rule, init)


def solve_flc(profiles: Sequence[DeviceProfile], config: SystemConfig,
              init: Decision | None = None,
              objective: str = OBJECTIVE_MAOI) -> tuple[Decision, SolveTrace]:
    """Full local computing: offloading disabled, intervals still optimized."""
    ev = ScenarioEvaluator(profiles, config, objective)

    def offload_rule(tau, mu, x):
        return np.zeros_like(x), []

    return run_outer_loop(ev, lambda mu, x, _t: ev.sampling_step(mu, x),
                          offload_rule, init)


def solve_gmo(profiles: Sequence[DeviceProfile], config: SystemConfig,
              init: Decision | None = None,
              objective: str = OBJECTIVE_MAOI) -> tuple[Decision, SolveTrace]:
    """Greedy marginal-cost offloading: one irreversible fix per iteration.

    Starting all-local, each iteration trials every still-local device on
    the edge (capacity permitting) and permanently fixes the one with the
    largest strict system-cost decrease; fixed decisions are never
    reverted.
    """
    ev = ScenarioEvaluator(profiles, config, objective)
    fixed: set[int] = set()

    def offload_rule(tau, mu, x):
        base = np.zeros_like(x)
        base[sorted(fixed)] = 1
        load = float(base @ ev.payload)
        cost_now = ev.system_cost(tau, mu, base)
        best_d, best_gain = None, 0.0
        for d in range(ev.n_devices):
            if d in fixed or load + ev.payload[d] > config.capacity_threshold:
                continue
            trial = base.copy()
            trial[d] = 1
            gain = cost_now - ev.system_cost(tau, mu, trial)
            if gain > best_gain:
                best_d, best_gain = d, gain
        if best_d is None:
            return base, []
        fixed.add(best_d)
        base[best_d] = 1
        return base, [best_d]

    return run_outer_loop(ev, lambda mu, x, _t: ev.sampling_step(mu, x),
                          offload_rule, init)


def solve_idd(profiles: Sequence[DeviceProfile], config: SystemConfig,
              init: Decision | None = None, rho: float = 0.5,
              objective: str = OBJECTIVE_MAOI) -> tuple[Decision, SolveTrace]:
    """Independent distributed decisions under an assumed interference level.

    Each device compares its branches against the fixed prior
    ``rho * sum_{j != d} P_j g_j`` instead of the real offload pattern;
    devices never react to each other.  Capacity admission is in device
    order.
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    ev = ScenarioEvaluator(profiles, config, objective)
    assumed = rho * (ev.rx_power.sum() - ev.rx_power)
    rate = config.bandwidth * np.log2(1.0 + ev.rx_power / (config.noise_power + assumed))
    trans = ev.payload / rate

    def offload_rule(tau, mu, x):
        age_loc = ev.age_term(tau, ev.t_local, ev.psi)
        age_off = ev.age_term(tau, ev.t_edge0 + trans[:, None], ev.psi)
        cost_loc = age_loc + mu * ((ev.e_sens + ev.e_comp) / tau - ev.e_budget)
        cost_off = age_off + mu * ((ev.e_sens + ev.tx_power * trans) / tau - ev.e_budget)
        prefers = cost_off < cost_loc
        out = np.zeros_like(x)
        load = 0.0
        for d in range(ev.n_devices):
            if prefers[d] and load + ev.payload[d] <= config.capacity_threshold:
                out[d] = 1
                load += ev.payload[d]
        return out, []

    return run_outer_loop(ev, lambda mu, x, _t: ev.sampling_step(mu, x),
                          offload_rule, init)


def solve_dbro(profiles: Sequence[DeviceProfile], config: SystemConfig,
               init: Decision | None = None,
               objective: str = OBJECTIVE_MAOI) -> tuple[Decision, SolveTrace]:
    """Device-wise best response: sweep in index order, commit immediately.

    Each device optimizes its own cost given the pattern left by its
    predecessors; sweeps repeat until one full pass changes nothing.
    Unlike the joint solver there is no system-level commit rule.
    """
    ev = ScenarioEvaluator(profiles, config, objective)

    def offload_rule(tau, mu, x):
        out = x.copy()
        committed = []
        for _ in range(DBRO_MAX_SWEEPS):
            changed = False
            responses = ev.best_responses(tau, mu, out)
            for d in range(ev.n_devices):
                br = int(responses[d])
                if br != out[d]:
                    out[d] = br
                    committed.append(d)
                    changed = True
                    responses = ev.best_responses(tau, mu, out)
            if not changed:
                break
        return out, committed

    return run_outer_loop(ev, lambda mu, x, _t: ev.sampling_step(mu, x),
                          offload_rule, init)


def solve_jso_a(profiles: Sequence[DeviceProfile], config: SystemConfig,
                init: Decision | None = None) -> tuple[Decision, SolveTrace]:
    """The joint solver with the plain (weight-free) age objective."""
    return solve_jso(profiles, config, init, objective=OBJECTIVE_AOI)


#: Algorithm selector used by the CLI and the sweep runner.
ALGORITHMS = {
    "jso": solve_jso,
    "jso_a": solve_jso_a,
    "fmi": solve_fmi,
    "flc": solve_flc,
    "gmo": solve_gmo,
    "idd": solve_idd,
    "dbro": solve_dbro,
}


def solve(name: str, profiles: Sequence[DeviceProfile], config: SystemConfig,
          init: Decision | None = None) -> tuple[Decision, SolveTrace]:
    """Run the named algorithm; see ``ALGORITHMS`` for valid names."""
    try:
        fn = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; "
                         f"choose from {sorted(ALGORITHMS)}") from None
    return fn(profiles, config, init)


__all__ = ["solve_fmi", "solve_flc", "solve_gmo", "solve_idd", "solve_dbro",
           "solve_jso_a", "ALGORITHMS", "solve", "DBRO_MAX_SWEEPS"]
