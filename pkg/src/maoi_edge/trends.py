"""Trend assertions over seed-averaged sweep curves.

The figures of interest report no absolute values, so acceptance works on
qualitative shapes: monotone rises/falls (with slack for sampling noise),
pointwise dominance of one algorithm, flatness of a curve relative to a
reference range, and saturation plateaus.  Checks are data-driven so the
CLI can evaluate a declarative spec against any aggregate table.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass


@dataclass(frozen=True)
class TrendResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


@dataclass
class TrendReport:
    results: list[TrendResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def render(self) -> str:
        lines = [r.line() for r in self.results]
        verdict = "ALL TRENDS PASS" if self.passed else "TREND FAILURES PRESENT"
        return "\n".join(lines + [verdict])


def _curve(rows: Sequence[dict], algorithm: str, metric: str,
           ) -> tuple[list[float], list[float]]:
    pts = sorted((float(r["value"]), float(r[metric]))
                 for r in rows if r["algorithm"] == algorithm)
    if not pts:
        raise ValueError(f"no rows for algorithm {algorithm!r}")
    return [p[0] for p in pts], [p[1] for p in pts]


def check_monotone(xs: Sequence[float], ys: Sequence[float], direction: str,
                   slack_frac: float = 0.05) -> tuple[bool, str]:
    """Monotone trend with slack: wrong-direction steps are tolerated up to
    ``slack_frac`` of the curve's total range."""
    if direction not in ("increasing", "decreasing"):
        raise ValueError(f"direction must be increasing/decreasing, got {direction!r}")
    sign = 1.0 if direction == "increasing" else -1.0
    span = max(ys) - min(ys)
    slack = slack_frac * span
    for i in range(len(ys) - 1):
        step = sign * (ys[i + 1] - ys[i])
        if step < -slack:
            return False, (f"step {xs[i]}->{xs[i + 1]} moves {ys[i]:.6g}->"
                           f"{ys[i + 1]:.6g} against {direction} beyond slack {slack:.3g}")
    return True, f"{direction} over {len(ys)} points (slack {slack:.3g})"


def check_dominance(rows: Sequence[dict], metric: str, reference: str,
                    others: Sequence[str], tol: float = 1e-6) -> tuple[bool, str]:
    """Reference curve at or below every other curve at every grid value."""
    ref_xs, ref_ys = _curve(rows, reference, metric)
    ref = dict(zip(ref_xs, ref_ys))
    for alg in others:
        xs, ys = _curve(rows, alg, metric)
        for x, y in zip(xs, ys):
            if x in ref and ref[x] > y + tol:
                return False, (f"{reference}={ref[x]:.6g} exceeds {alg}={y:.6g} "
                               f"at value {x}")
    return True, f"{reference} <= {{{', '.join(others)}}} at every grid value"


def check_flat(rows: Sequence[dict], metric: str, algorithm: str,
               reference: str, within_frac: float = 0.02) -> tuple[bool, str]:
    """Curve variation bounded by a fraction of the reference curve's range."""
    _, ys = _curve(rows, algorithm, metric)
    _, ref_ys = _curve(rows, reference, metric)
    spread = max(ys) - min(ys)
    allowed = within_frac * (max(ref_ys) - min(ref_ys))
    ok = spread <= allowed
    return ok, (f"{algorithm} spread {spread:.4g} vs allowed {allowed:.4g} "
                f"({within_frac:.0%} of {reference} range)")


def check_plateau(xs: Sequence[float], ys: Sequence[float],
                  step_frac: float = 0.01) -> tuple[bool, str]:
    """Final budget step changes the curve by less than ``step_frac`` relatively."""
    if len(ys) < 2:
        raise ValueError("plateau check needs at least 2 points")
    last, prev = ys[-1], ys[-2]
    rel = abs(last - prev) / max(abs(prev), 1e-12)
    ok = rel < step_frac
    return ok, (f"final step {xs[-2]}->{xs[-1]} relative change {rel:.4%} "
                f"(threshold {step_frac:.0%})")


def evaluate_checks(rows: Sequence[dict], checks: Sequence[dict]) -> TrendReport:
    """Evaluate declarative checks against an aggregate table.

    Each check is a mapping with a ``type`` of ``monotone``, ``dominance``,
    ``flat`` or ``plateau`` plus the type's parameters; see the check
    functions for semantics.
    """
    results = []
    for spec in checks:
        kind = spec.get("type")
        name = spec.get("name", kind)
        try:
            if kind == "monotone":
                xs, ys = _curve(rows, spec["algorithm"], spec["metric"])
                ok, detail = check_monotone(xs, ys, spec["direction"],
                                            spec.get("slack", 0.05))
            elif kind == "dominance":
                algorithms = sorted({r["algorithm"] for r in rows})
                others = spec.get("others") or [a for a in algorithms
                                                if a != spec["reference"]]
                ok, detail = check_dominance(rows, spec["metric"],
                                             spec["reference"], others,
                                             spec.get("tol", 1e-6))
            elif kind == "flat":
                ok, detail = check_flat(rows, spec["metric"], spec["algorithm"],
                                        spec["reference"],
                                        spec.get("within_frac", 0.02))
            elif kind == "plateau":
                xs, ys = _curve(rows, spec["algorithm"], spec["metric"])
                ok, detail = check_plateau(xs, ys, spec.get("step_frac", 0.01))
            else:
                raise ValueError(f"unknown check type {kind!r}")
        except (KeyError, ValueError) as exc:
            results.append(TrendResult(name=name, passed=False,
                                       detail=f"check error: {exc}"))
            continue
        results.append(TrendResult(name=name, passed=ok, detail=detail))
    return TrendReport(results)


__all__ = ["TrendResult", "TrendReport", "check_monotone", "check_dominance",
           "check_flat", "check_plateau", "evaluate_checks"]
