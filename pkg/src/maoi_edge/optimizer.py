"""Joint sampling/offloading optimization.

The relaxed problem penalizes each device's energy overdraw with a
Lagrange multiplier and alternates three blocks until the system cost is
flat and every budget is met within tolerance:

1. sampling block: per-device interval update.  Below a convexity
   threshold the penalized cost is strictly convex and a projected Newton
   solve applies; elsewhere a convex upper-bound surrogate yields a
   closed-form candidate.  The cheaper candidate (by true cost) wins.
2. offloading block: best-response dynamics on the offloading game. Per
   round every device computes its own best response; among improving
   deviations the one with the largest system-cost reduction is committed.
3. multiplier block: projected subgradient step on each energy budget.

``ScenarioEvaluator`` holds the device-vectorized arrays the solver loops
over; the module-level functions are the per-device reference
implementations used by the tests and the public API.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import energy as energy_model
from . import metric, radio
from .metric import OBJECTIVE_MAOI
from .system_model import (
    MODALITIES,
    DeviceProfile,
    SystemConfig,
    compute_time,
    local_waiting_time,
    sensing_time,
    total_data_bits,
)

# ---------------------------------------------------------------------------
# per-device cost terms (everything Algorithm 1 needs once x and mu are fixed)

@dataclass(frozen=True)
class CostTerms:
    """Per-device penalized cost as a function of the sampling interval.

    Freezes the system times and per-update energy implied by the current
    offload pattern, so cost/derivatives are scalar functions of tau.
    """

    psi: tuple[float, float, float]
    lambdas: tuple[float, float, float]
    t_sys: tuple[float, float, float]
    energy: float
    energy_budget: float
    mu: float

    @classmethod
    def from_scenario(cls, profiles: Sequence[DeviceProfile],
                      config: SystemConfig, d: int, mu_d: float, x,
                      objective: str = OBJECTIVE_MAOI) -> "CostTerms":
        if objective not in metric.OBJECTIVES:
            raise ValueError(f"unknown objective {objective!r}")
        psi = profiles[d].maoi_weights if objective == OBJECTIVE_MAOI else (0.0, 0.0, 0.0)
        return cls(
            psi=tuple(psi),
            lambdas=tuple(config.event_rates),
            t_sys=metric.device_system_times(profiles, config, d, x),
            energy=energy_model.total_energy(d, profiles, config, x),
            energy_budget=profiles[d].energy_budget,
            mu=mu_d,
        )

    def cost(self, tau: float) -> float:
        age = sum((1.0 + p * (1.0 - math.exp(-lam * tau))) * (0.5 * tau + t)
                  for p, lam, t in zip(self.psi, self.lambdas, self.t_sys))
        return age + self.mu * (self.energy / tau - self.energy_budget)

    def cost_d1(self, tau: float) -> float:
        """First derivative of the penalized cost in tau."""
        acc = 0.0
        for p, lam, t in zip(self.psi, self.lambdas, self.t_sys):
            decay = p * lam * math.exp(-lam * tau)
            acc += decay * t + 0.5 * tau * decay
            acc += 0.5 * (1.0 + p * (1.0 - math.exp(-lam * tau)))
        return acc - self.mu * self.energy / tau**2

    def cost_d2(self, tau: float) -> float:
        """Second derivative; positive everywhere below the convexity threshold."""
        acc = 2.0 * self.mu * self.energy / tau**3
        for p, lam, t in zip(self.psi, self.lambdas, self.t_sys):
            acc += p * lam * math.exp(-lam * tau) * (1.0 - 0.5 * lam * tau - lam * t)
        return acc


# ---------------------------------------------------------------------------
# sampling block (per-device reference implementation)

def convexity_threshold(terms: CostTerms) -> float:
    """Largest interval below which the penalized cost is strictly convex.

    May be non-positive, in which case no convex region exists.
    """
    return min(2.0 * (1.0 - lam * t) / lam
               for lam, t in zip(terms.lambdas, terms.t_sys))


def surrogate_minimizer(terms: CostTerms, tau_upper: float) -> float:
    """Closed-form minimizer of the convex upper-bound surrogate.

    The surrogate freezes the event-probability factors at ``tau_upper``,
    leaving a linear-plus-hyperbolic function of tau.
    """
    denom = sum(1.0 + p * (1.0 - math.exp(-lam * tau_upper))
                for p, lam in zip(terms.psi, terms.lambdas))
    return math.sqrt(2.0 * terms.mu * terms.energy / denom)


def feasible_approximation(tau_th: float, tau_min: float, tau_sub: float) -> float:
    return max(tau_th, tau_min, tau_sub)


def _bisect_slope(terms: CostTerms, lo: float, hi: float, tol: float) -> float:
    # fallback when curvature turns numerically non-positive inside the
    # nominal convex region: bracket the root of the first derivative
    if terms.cost_d1(lo) >= 0.0:
        return lo
    if terms.cost_d1(hi) <= 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if terms.cost_d1(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def newton_refine(terms: CostTerms, tau_init: float, tau_min: float,
                  tau_th: float, tol: float = 1e-8,
                  max_iters: int = 50) -> tuple[float, int]:
    """Projected Newton solve on the convex region [tau_min, tau_th].

    Iterates are clipped to the region after every step; returns the
    converged interval and the iteration count.
    """
    if not tau_min < tau_th:
        raise ValueError(f"no convex region: tau_min={tau_min} >= tau_th={tau_th}")
    tau = min(max(tau_init, tau_min), tau_th)
    for n in range(1, max_iters + 1):
        d2 = terms.cost_d2(tau)
        if d2 <= 0.0:
            return _bisect_slope(terms, tau_min, tau_th, tol), n
        new = tau - terms.cost_d1(tau) / d2
        new = min(max(new, tau_min), tau_th)
        if abs(new - tau) < tol:
            return new, n
        tau = new
    return tau, max_iters


def optimal_sampling_interval(terms: CostTerms, config: SystemConfig,
                              ) -> tuple[float, int]:
    """One full sampling-interval solve for a single device.

    Returns ``(tau_star, newton_iterations)``.  The Newton candidate is
    considered only when a convex region exists; equal candidate costs fall
    back to the clamped approximation.
    """
    tau_min = config.tau_min
    tau_th = convexity_threshold(terms)
    tau_upper = max(tau_min, tau_th)
    tau_sub = surrogate_minimizer(terms, tau_upper)
    tau_approx = feasible_approximation(tau_th, tau_min, tau_sub)
    if tau_min < tau_th:
        tau_newton, iters = newton_refine(
            terms, 0.5 * (tau_min + tau_th), tau_min, tau_th,
            tol=config.newton_tol, max_iters=config.newton_max_iters)
        if terms.cost(tau_newton) < terms.cost(tau_approx):
            return tau_newton, iters
        return tau_approx, iters
    return tau_approx, 0


# ---------------------------------------------------------------------------
# vectorized scenario evaluation

class ScenarioEvaluator:
    """Device-vectorized cost evaluation for one scenario and objective.

    Static per-device quantities (payloads, sensing/compute times, sensing
    and compute energies) are precomputed; anything that depends on the
    offload pattern is evaluated on demand.
    """

    def __init__(self, profiles: Sequence[DeviceProfile], config: SystemConfig,
                 objective: str = OBJECTIVE_MAOI):
        if objective not in metric.OBJECTIVES:
            raise ValueError(f"unknown objective {objective!r}")
        self.profiles = list(profiles)
        self.config = config
        self.objective = objective
        D = len(self.profiles)
        if D == 0:
            raise ValueError("need at least one device")
        self.n_devices = D
        self.lam = np.asarray(config.event_rates, dtype=float)
        self.payload = np.array([total_data_bits(p) for p in self.profiles])
        self.tx_power = np.array([p.tx_power for p in self.profiles])
        self.rx_power = np.array([p.tx_power * p.channel_gain for p in self.profiles])
        self.e_budget = np.array([p.energy_budget for p in self.profiles])
        self.e_sens = np.array([energy_model.sensing_energy(p) for p in self.profiles])
        self.e_comp = np.array([energy_model.computation_energy(p, config)
                                for p in self.profiles])
        self.psi_true = np.array([p.maoi_weights for p in self.profiles])
        self.psi = (self.psi_true if objective == OBJECTIVE_MAOI
                    else np.zeros_like(self.psi_true))
        sens = np.array([[sensing_time(p, m) for m in MODALITIES]
                         for p in self.profiles])
        wait = np.array([[local_waiting_time(p, config, m) for m in MODALITIES]
                         for p in self.profiles])
        t_lc = np.array([[compute_time(p, config, m, "local") for m in MODALITIES]
                         for p in self.profiles])
        t_ec = np.array([[compute_time(p, config, m, "edge") for m in MODALITIES]
                         for p in self.profiles])
        self.wait = wait
        self.t_local_comp = t_lc
        self.t_edge_comp = t_ec
        self.t_local = sens + wait + t_lc       # full local system times
        self.t_edge0 = sens + t_ec              # edge system times minus transmission
        # operation counter: device-cost element evaluations (complexity checks)
        self.cost_elements = 0

    # -- pattern-dependent quantities ------------------------------------

    def rates(self, x: np.ndarray) -> np.ndarray:
        """Uplink rate every device would see, given the others' flags."""
        total = float(x @ self.rx_power)
        interference = total - x * self.rx_power
        sinr = self.rx_power / (self.config.noise_power + interference)
        return self.config.bandwidth * np.log2(1.0 + sinr)

    def trans_times(self, x: np.ndarray) -> np.ndarray:
        return self.payload / self.rates(x)

    def energies(self, x: np.ndarray, trans: np.ndarray) -> np.ndarray:
        return self.e_sens + np.where(x == 1, self.tx_power * trans, self.e_comp)

    def system_times(self, x: np.ndarray, trans: np.ndarray) -> np.ndarray:
        return np.where((x == 1)[:, None], self.t_edge0 + trans[:, None], self.t_local)

    # -- costs ------------------------------------------------------------

    def age_term(self, tau: np.ndarray, t_sys: np.ndarray,
                 psi: np.ndarray) -> np.ndarray:
        phi = 1.0 + psi * (1.0 - np.exp(-self.lam[None, :] * tau[:, None]))
        self.cost_elements += tau.size
        return (phi * (0.5 * tau[:, None] + t_sys)).sum(axis=1)

    def device_costs(self, tau: np.ndarray, mu: np.ndarray, x: np.ndarray,
                     *, trans: np.ndarray | None = None) -> np.ndarray:
        if trans is None:
            trans = self.trans_times(x)
        age = self.age_term(tau, self.system_times(x, trans), self.psi)
        e = self.energies(x, trans)
        return age + mu * (e / tau - self.e_budget)

    def system_cost(self, tau: np.ndarray, mu: np.ndarray, x: np.ndarray) -> float:
        return float(self.device_costs(tau, mu, x).sum())

    def energy_violation(self, tau: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Relative overdraw (Ebar - budget)/budget per device."""
        trans = self.trans_times(x)
        e = self.energies(x, trans)
        return (e / tau - self.e_budget) / self.e_budget

    def cost_terms(self, d: int, mu_d: float, x: np.ndarray) -> CostTerms:
        trans = self.trans_times(x)
        t_sys = self.system_times(x, trans)
        e = self.energies(x, trans)
        return CostTerms(psi=tuple(self.psi[d]), lambdas=tuple(self.lam),
                         t_sys=tuple(t_sys[d]), energy=float(e[d]),
                         energy_budget=float(self.e_budget[d]), mu=mu_d)

    # -- sampling block ---------------------------------------------------

    def sampling_step(self, mu: np.ndarray, x: np.ndarray,
                      ) -> tuple[np.ndarray, int]:
        """Algorithm-1 interval update for every device; returns Newton total."""
        cfg = self.config
        trans = self.trans_times(x)
        t_sys = self.system_times(x, trans)
        e = self.energies(x, trans)
        tau_th = (2.0 * (1.0 - self.lam[None, :] * t_sys) / self.lam[None, :]).min(axis=1)
        tau_upper = np.maximum(cfg.tau_min, tau_th)
        sphi_up = (1.0 + self.psi * (1.0 - np.exp(-self.lam[None, :]
                                                  * tau_upper[:, None]))).sum(axis=1)
        tau_sub = np.sqrt(2.0 * mu * e / sphi_up)
        tau_star = np.maximum(tau_th, np.maximum(cfg.tau_min, tau_sub))
        newton_total = 0
        for d in np.nonzero(cfg.tau_min < tau_th)[0]:
            terms = CostTerms(psi=tuple(self.psi[d]), lambdas=tuple(self.lam),
                              t_sys=tuple(t_sys[d]), energy=float(e[d]),
                              energy_budget=float(self.e_budget[d]), mu=float(mu[d]))
            tau_newton, iters = newton_refine(
                terms, 0.5 * (cfg.tau_min + tau_th[d]), cfg.tau_min, tau_th[d],
                tol=cfg.newton_tol, max_iters=cfg.newton_max_iters)
            newton_total += iters
            if terms.cost(tau_newton) < terms.cost(float(tau_star[d])):
                tau_star[d] = tau_newton
        return tau_star, newton_total

    # -- offloading block ---------------------------------------------------

    def branch_costs(self, tau: np.ndarray, mu: np.ndarray, x: np.ndarray,
                     ) -> tuple[np.ndarray, np.ndarray]:
        """Own penalized cost of every device on its local and edge branch.

        A device's own rate does not depend on its own flag, so both
        branch costs are valid simultaneously for the fixed pattern of the
        other devices.
        """
        trans = self.trans_times(x)
        age_loc = self.age_term(tau, self.t_local, self.psi)
        age_off = self.age_term(tau, self.t_edge0 + trans[:, None], self.psi)
        e_loc = self.e_sens + self.e_comp
        e_off = self.e_sens + self.tx_power * trans
        cost_loc = age_loc + mu * (e_loc / tau - self.e_budget)
        cost_off = age_off + mu * (e_off / tau - self.e_budget)
        return cost_loc, cost_off

    def admissible_offload(self, x: np.ndarray) -> np.ndarray:
        """Whether each device could (or already does) offload within capacity."""
        load = float(x @ self.payload)
        return np.where(x == 1, True, load + self.payload <= self.config.capacity_threshold)

    def best_responses(self, tau: np.ndarray, mu: np.ndarray, x: np.ndarray,
                       ) -> np.ndarray:
        cost_loc, cost_off = self.branch_costs(tau, mu, x)
        admissible = self.admissible_offload(x)
        br = x.copy()
        br[(cost_off < cost_loc) & admissible] = 1
        br[cost_loc < cost_off] = 0
        return br

    def br_round(self, tau: np.ndarray, mu: np.ndarray, x: np.ndarray,
                 ) -> tuple[np.ndarray, int | None, float]:
        """One best-response round: commit the largest system-cost reduction.

        Returns ``(x_next, committed_device_or_None, reduction)``.
        """
        br = self.best_responses(tau, mu, x)
        deviators = np.nonzero(br != x)[0]
        if deviators.size == 0:
            return x, None, 0.0
        cost_now = self.system_cost(tau, mu, x)
        best_d, best_gain = None, 0.0
        for d in deviators:
            trial = x.copy()
            trial[d] = br[d]
            gain = cost_now - self.system_cost(tau, mu, trial)
            if gain > best_gain:
                best_d, best_gain = int(d), gain
        if best_d is None:
            return x, None, 0.0
        out = x.copy()
        out[best_d] = br[best_d]
        return out, best_d, best_gain

    # -- diagnostics --------------------------------------------------------

    def lemma_threshold(self, d: int, tau_d: float, mu_d: float) -> float:
        """Interference threshold of the closed-form offloading rule.

        Implements the printed expression literally; it serves as a
        diagnostic cross-check of the canonical two-branch comparison, not
        as the decision rule.
        """
        cfg = self.config
        phi = 1.0 + self.psi[d] * (1.0 - np.exp(-self.lam * tau_d))
        gap = self.wait[d] + self.t_local_comp[d] - self.t_edge_comp[d]
        num = (phi.sum() * tau_d + mu_d * self.tx_power[d]) * self.payload[d]
        den = cfg.bandwidth * tau_d * float(phi @ gap) + mu_d * self.e_comp[d]
        if den <= 0.0:
            return -math.inf
        exponent = num / den
        if exponent > 600.0:  # 2**exponent overflows; threshold degenerates
            return -cfg.noise_power
        return float(self.rx_power[d] / (2.0**exponent - 1.0) - cfg.noise_power)

    def lemma_best_response(self, d: int, tau_d: float, mu_d: float,
                            x: np.ndarray) -> int:
        total = float(x @ self.rx_power)
        interference = total - float(x[d] * self.rx_power[d])
        return int(interference <= self.lemma_threshold(d, tau_d, mu_d))

    # -- reporting ----------------------------------------------------------

    def achieved_metrics(self, tau: np.ndarray, x: np.ndarray) -> dict:
        """Realized (unpenalized) ages and energy state of a decision.

        MAoI always uses the true modality weights, whatever objective the
        evaluator optimizes.
        """
        trans = self.trans_times(x)
        t_sys = self.system_times(x, trans)
        phi = 1.0 + self.psi_true * (1.0 - np.exp(-self.lam[None, :] * tau[:, None]))
        maoi = phi * (0.5 * tau[:, None] + t_sys)
        aoi = 0.5 * tau[:, None] + t_sys
        viol = self.energy_violation(tau, x)
        out = {
            "avg_maoi": float(maoi.sum(axis=1).mean()),
            "avg_aoi": float(aoi.sum(axis=1).mean()),
            "max_energy_violation": float(viol.max()),
            "n_offloaded": int(x.sum()),
            "offload_bits": float(x @ self.payload),
        }
        for s, m in enumerate(MODALITIES):
            name = m.name.lower()
            out[f"maoi_{name}"] = float(maoi[:, s].mean())
            out[f"aoi_{name}"] = float(aoi[:, s].mean())
        return out


# ---------------------------------------------------------------------------
# public per-device wrappers (reference API over profile lists)

def best_response(d: int, profiles: Sequence[DeviceProfile], config: SystemConfig,
                  tau: Sequence[float], mu: Sequence[float], x_current,
                  objective: str = OBJECTIVE_MAOI) -> int:
    """Cost-minimizing offload flag for device ``d``, others held fixed.

    Offloading is admissible only while the aggregate offloaded payload
    stays within the cell capacity; ties keep the current flag.
    """
    x = radio.as_offload_vector(x_current, len(profiles))
    ev = ScenarioEvaluator(profiles, config, objective)
    tau = np.asarray(tau, dtype=float)
    mu = np.asarray(mu, dtype=float)
    return int(ev.best_responses(tau, mu, x)[d])


def best_response_round(profiles: Sequence[DeviceProfile], config: SystemConfig,
                        tau: Sequence[float], mu: Sequence[float], x,
                        objective: str = OBJECTIVE_MAOI,
                        ) -> tuple[np.ndarray, int | None]:
    """One commit of the offloading game; returns (x', committed device or None)."""
    ev = ScenarioEvaluator(profiles, config, objective)
    x = radio.as_offload_vector(x, len(profiles))
    out, committed, _ = ev.br_round(np.asarray(tau, float), np.asarray(mu, float), x)
    return out, committed


def solve_offloading(profiles: Sequence[DeviceProfile], config: SystemConfig,
                     tau: Sequence[float], mu: Sequence[float], x_init,
                     objective: str = OBJECTIVE_MAOI,
                     ) -> tuple[np.ndarray, int]:
    """Iterate best-response rounds to a Nash point; returns (x*, rounds)."""
    ev = ScenarioEvaluator(profiles, config, objective)
    x = radio.as_offload_vector(x_init, len(profiles))
    x, _committed, rounds = _offloading_equilibrium(
        ev, np.asarray(tau, float), np.asarray(mu, float), x)
    return x, rounds


def _offloading_equilibrium(ev: ScenarioEvaluator, tau: np.ndarray,
                            mu: np.ndarray, x: np.ndarray,
                            ) -> tuple[np.ndarray, list[int], int]:
    """Run rounds until no strictly improving commit remains.

    Terminates because every commit strictly decreases the system cost over
    a finite strategy space (finite improvement property).
    """
    committed: list[int] = []
    rounds = 0
    while True:
        rounds += 1
        x_next, device, _ = ev.br_round(tau, mu, x)
        if device is None:
            return x, committed, rounds
        committed.append(device)
        x = x_next


def update_multipliers(profiles: Sequence[DeviceProfile], config: SystemConfig,
                       tau: Sequence[float], x, mu: Sequence[float],
                       eta: float | None = None) -> np.ndarray:
    """Projected subgradient step on the energy multipliers."""
    if eta is None:
        eta = config.lagrange_step
    x = radio.as_offload_vector(x, len(profiles))
    out = np.empty(len(profiles))
    for d, p in enumerate(profiles):
        overdraw = (energy_model.avg_energy_rate(d, profiles, config, x, tau[d])
                    - p.energy_budget)
        out[d] = max(0.0, mu[d] + eta * overdraw)
    return out


# ---------------------------------------------------------------------------
# outer loop

@dataclass
class Decision:
    """Solver state: sampling intervals, offload flags, multipliers."""

    tau: np.ndarray
    x: np.ndarray
    mu: np.ndarray

    def __post_init__(self) -> None:
        self.tau = np.asarray(self.tau, dtype=float)
        self.x = np.asarray(self.x, dtype=np.int64)
        self.mu = np.asarray(self.mu, dtype=float)
        if not (self.tau.shape == self.x.shape == self.mu.shape):
            raise ValueError("tau, x, mu must have equal length")
        if (self.mu < 0).any():
            raise ValueError("multipliers must be >= 0")

    def copy(self) -> "Decision":
        return Decision(self.tau.copy(), self.x.copy(), self.mu.copy())


@dataclass
class SolveTrace:
    """Per-outer-iteration record of a solve."""

    costs: list[float] = field(default_factory=list)
    max_violations: list[float] = field(default_factory=list)
    energy_rates: list[np.ndarray] = field(default_factory=list)
    committed: list[list[int]] = field(default_factory=list)
    newton_iters: list[int] = field(default_factory=list)
    converged: bool = False
    n_iters: int = 0

    def append(self, cost: float, violation: float, energy_rates: np.ndarray,
               committed: list[int], newton: int) -> None:
        if not math.isfinite(cost):
            raise ValueError(f"non-finite system cost {cost}")
        self.costs.append(cost)
        self.max_violations.append(violation)
        self.energy_rates.append(energy_rates)
        self.committed.append(committed)
        self.newton_iters.append(newton)
        self.n_iters += 1

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "cost", "max_energy_violation",
                             "committed_device", "newton_iters"])
            for k in range(self.n_iters):
                devices = ";".join(str(d) for d in self.committed[k])
                writer.writerow([k + 1, repr(self.costs[k]),
                                 repr(self.max_violations[k]), devices,
                                 self.newton_iters[k]])


def default_decision(profiles: Sequence[DeviceProfile],
                     config: SystemConfig) -> Decision:
    """All-local start at the minimum interval with small uniform multipliers."""
    D = len(profiles)
    return Decision(tau=np.full(D, config.tau_min), x=np.zeros(D, dtype=np.int64),
                    mu=np.full(D, config.mu_init))


TauRule = Callable[[np.ndarray, np.ndarray, np.ndarray], tuple[np.ndarray, int]]
OffloadRule = Callable[[np.ndarray, np.ndarray, np.ndarray], tuple[np.ndarray, list[int]]]


def run_outer_loop(ev: ScenarioEvaluator, tau_rule: TauRule,
                   offload_rule: OffloadRule,
                   init: Decision | None = None) -> tuple[Decision, SolveTrace]:
    """Alternate interval, offloading, and multiplier blocks to convergence.

    Convergence requires both a flat system cost (|delta| < eps) and every
    energy budget met within the configured relative tolerance; the
    subgradient multipliers only reach feasibility asymptotically, so the
    cost criterion alone would stop at infeasible points.
    """
    cfg = ev.config
    state = (init or default_decision(ev.profiles, cfg)).copy()
    if float(state.x @ ev.payload) > cfg.capacity_threshold:
        raise ValueError("initial offload pattern exceeds the capacity threshold")
    if (state.tau < cfg.tau_min).any():
        raise ValueError("initial intervals below tau_min")
    trace = SolveTrace()
    prev_cost = ev.system_cost(state.tau, state.mu, state.x)
    best: Decision | None = None
    best_key = (math.inf, math.inf)
    for _ in range(cfg.max_outer_iters):
        tau, newton = tau_rule(state.mu, state.x, state.tau)
        x, committed = offload_rule(tau, state.mu, state.x)
        rel_overdraw = ev.energy_violation(tau, x)
        mu = np.maximum(0.0, state.mu + cfg.lagrange_step
                        * rel_overdraw * ev.e_budget)
        state = Decision(tau=tau, x=x, mu=mu)
        cost = ev.system_cost(tau, mu, x)
        violation = float(rel_overdraw.max())
        trace.append(cost, violation, ev.e_budget * (1.0 + rel_overdraw),
                     committed, newton)
        feasible = violation <= cfg.energy_tol
        key = (0.0 if feasible else violation, cost)
        if key < best_key:
            best_key, best = key, state.copy()
        if abs(cost - prev_cost) < cfg.convergence_eps and feasible:
            trace.converged = True
            return state, trace
        prev_cost = cost
    return (best if best is not None else state), trace


def solve_jso(profiles: Sequence[DeviceProfile], config: SystemConfig,
              init: Decision | None = None, objective: str = OBJECTIVE_MAOI,
              ) -> tuple[Decision, SolveTrace]:
    """Full joint solve: Algorithm-1 intervals + best-response offloading."""
    ev = ScenarioEvaluator(profiles, config, objective)

    def tau_rule(mu, x, _tau):
        return ev.sampling_step(mu, x)

    def offload_rule(tau, mu, x):
        x_next, committed, _rounds = _offloading_equilibrium(ev, tau, mu, x)
        return x_next, committed

    return run_outer_loop(ev, tau_rule, offload_rule, init)


__all__ = [
    "CostTerms", "convexity_threshold", "surrogate_minimizer",
    "feasible_approximation", "newton_refine", "optimal_sampling_interval",
    "ScenarioEvaluator", "best_response", "best_response_round",
    "solve_offloading", "update_multipliers", "Decision", "SolveTrace",
    "default_decision", "run_outer_loop", "solve_jso",
]
