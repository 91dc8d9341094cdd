"""Evaluate reference cases and compare them against their stored values."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cases import CASES, TABLE_TOL, Case
from .distwise import fit_distwise, group_repeated_points
from .gpcore import PI, fit
from .kernels import covariance_matrix
from .redundancy import diagnose
from .spectral import eigendecompose, image_projector

DISCR_SQ_TOL = 1e-6
DISCR_RMS_TOL = 0.005
RESIDUAL_TOL = 1e-8


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.name}: {self.detail}"


def evaluate_case(case: Case) -> dict:
    """Compute everything a case can be checked against."""
    C = covariance_matrix(case.kernel, case.X)
    sd = eigendecompose(C, case.eta)
    out = {
        "name": case.name,
        "kernel": case.kernel.to_dict(),
        "design": case.X.tolist(),
        "trace": float(np.trace(C)),
        "eigenvalues": sd.eigenvalues.tolist(),
        "rank": sd.rank,
        "projector": image_projector(sd).tolist(),
    }
    report = diagnose(case.X, case.kernel, y=case.y, eta=case.eta)
    out["redundancy"] = report.to_dict()
    if case.y is not None:
        out["outputs"] = case.y.tolist()
    preds = {}
    if case.policy == "distwise":
        sites = group_repeated_points(case.X, case.y)
        model = fit_distwise(sites, case.kernel)
        out["sites"] = [{"location": list(s.location), "count": s.count, "mean": s.mean, "variance": s.variance}
                        for s in sites]
        for key, (x, _, _, kind) in case.predictions.items():
            preds[key] = model.predict_mean(x) if kind == "mean" else model.predict_var(x)
    elif case.y is not None:
        model = fit(case.X, case.y, case.kernel, PI(case.eta))
        for key, (x, _, _, kind) in case.predictions.items():
            preds[key] = model.predict_mean(x) if kind == "mean" else model.predict_var(x)
        out["mean_at_design"] = model.predict_mean_at_design().tolist()
        out["var_at_design"] = np.atleast_1d(model.predict_var(model.X)).tolist()
    out["predictions"] = preds
    return out


def _close(name, got, expected, tol):
    got = np.asarray(got, dtype=float)
    expected = np.asarray(expected, dtype=float)
    if got.shape != expected.shape:
        return CheckResult(name, False, f"shape {got.shape} != expected {expected.shape}")
    err = float(np.max(np.abs(got - expected))) if got.size else 0.0
    return CheckResult(name, err <= tol, f"max abs error {err:.3g} (tol {tol:g})")


def check_case(case: Case, result: dict | None = None):
    """Compare a case's computed values with its stored references."""
    r = evaluate_case(case) if result is None else result
    checks = []
    if case.trace is not None:
        checks.append(_close("trace", r["trace"], case.trace, 1e-9))
    if case.eigenvalues is not None:
        checks.append(_close("eigenvalues", r["eigenvalues"], case.eigenvalues, TABLE_TOL))
    if case.projector is not None:
        checks.append(_close("projector", r["projector"], case.projector, TABLE_TOL))
    if case.groups:
        got = [(tuple(i - 1 for i in g["indices"]), g["degree"]) for g in r["redundancy"]["groups"]]
        want = [(tuple(g), d) for g, d in case.groups]
        checks.append(CheckResult("groups", got == want, f"got {got}, expected {want}"))
    if case.residual is not None:
        checks.append(_close("residual", r["redundancy"]["residual"], case.residual, RESIDUAL_TOL))
    if case.discr_sq_ratio is not None:
        checks.append(_close("discr_sq_ratio", r["redundancy"]["discr_sq_ratio"], case.discr_sq_ratio, DISCR_SQ_TOL))
    if case.discr_rms_ratio is not None:
        checks.append(_close("discr_rms_ratio", r["redundancy"]["discr_rms_ratio"], case.discr_rms_ratio,
                             DISCR_RMS_TOL))
    for key, (_, expected, tol, _) in case.predictions.items():
        checks.append(_close(key, r["predictions"][key], expected, tol))
    if "var_at_design" in r:
        checks.append(_close("variance at design points", r["var_at_design"], np.zeros(len(r["var_at_design"])),
                             1e-8))
    return checks


def check_all():
    return {name: check_case(case) for name, case in CASES.items()}
