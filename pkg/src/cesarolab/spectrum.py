"""Symbolic spectrum classification with numeric corroboration.

The point spectrum, spectrum and equicontinuity-spectrum of the
averaging operator on the weighted inductive limits fall into exactly
three regimes, decided by two growth predicates on alpha: nuclearity
(log n / alpha_n bounded) and the log-log dichotomy.  Region descriptors
come from a closed vocabulary; probe numerics only corroborate, since no
finite scan can certify membership of a single point in the spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import resolvent as rsv
from .operators import delta_log_abs
from .weights import (AlphaSequence, GrowthVerdict, WeightFamily,
                      check_loglog, check_nuclear)

__all__ = [
    "SpectralReport",
    "REGIONS",
    "region_contains",
    "point_spectrum_test",
    "classify_spectrum",
    "sample_grid",
    "GridPoint",
]

REGIONS = ("Sigma", "Sigma0", "{1}", "{0,1}uD(1)", "closure(D(1))",
           "unknown")
REGION_TOL = 1e-9
GRID_MARGIN = 1e-3
POINT_K_MAX = 64


def region_contains(region, z, tol=REGION_TOL):
    """Membership of z in a symbolic region descriptor."""
    z = complex(z)
    in_sigma = rsv.dist_sigma0(z) <= tol and abs(z) > tol
    near_zero = abs(z) <= tol
    in_disc_open = abs(z - 0.5) < 0.5 - tol
    in_disc_closed = abs(z - 0.5) <= 0.5 + tol
    if region == "Sigma":
        return in_sigma
    if region == "Sigma0":
        return in_sigma or near_zero
    if region == "{1}":
        return abs(z - 1.0) <= tol
    if region == "{0,1}uD(1)":
        return in_disc_open or near_zero or abs(z - 1.0) <= tol
    if region == "closure(D(1))":
        return in_disc_closed
    if region == "unknown":
        return False
    raise ValueError(f"unknown region descriptor {region!r}")


@dataclass
class SpectralReport:
    alpha_name: str
    nuclear: object          # True / False / None
    loglog_finite: object
    sigma_pt: str
    sigma: str
    sigma_star: str
    status: str              # "classified" | "inconclusive"
    evidence: list = field(default_factory=list)

    def as_dict(self):
        return {
            "alpha": self.alpha_name,
            "nuclear": self.nuclear,
            "loglog_finite": self.loglog_finite,
            "sigma_pt": self.sigma_pt,
            "sigma": self.sigma,
            "sigma_star": self.sigma_star,
            "status": self.status,
            "evidence": self.evidence,
        }


def point_spectrum_test(m, alpha: AlphaSequence, W: WeightFamily,
                        horizon=10 ** 4, k_max=POINT_K_MAX):
    """Does the eigenvector of eigenvalue 1/m live in the space?

    The m-th eigenvector row grows like n^{m-1}; membership means some
    step k tames it: sup_n |row_n| v_k(n) finite.  m = 1 is the constant
    vector and always holds.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if alpha.max_index is not None:
        horizon = min(horizon, alpha.max_index)
    ns = np.arange(max(m, 1), horizon + 1)
    if m == 1:
        return GrowthVerdict("holds", horizon, 1.0, 1, False)
    log_row = np.array([delta_log_abs(int(n), m) for n in ns])
    # membership of the m-th eigenvector (m >= 2) is equivalent to
    # nuclearity, and the row grows too slowly for a finite scan to
    # expose divergence (it sets in beyond n = e^k); a declared
    # nuclearity flag therefore decides the verdict outright
    declared = alpha.flag("nuclear")
    if declared is not None:
        k = 1
        vals = log_row + W.log_weights(k, ns)
        i = int(np.argmax(vals))
        sup = math.exp(min(float(vals[i]), 709.0))
        status = "holds" if declared else "fails"
        return GrowthVerdict(status, horizon, sup, int(ns[i]), True)
    cut = max(horizon // 10, int(ns[0]))
    early = ns <= cut
    late = ns > cut
    best = None
    for k in range(1, k_max + 1):
        vals = log_row + W.log_weights(k, ns)
        sup = float(np.max(vals))
        grew = (late.any() and early.any()
                and float(np.max(vals[late]))
                > float(np.max(vals[early])) + 1e-9)
        i = int(np.argmax(vals))
        if best is None or sup < best[1]:
            best = (k, sup, int(ns[i]))
        if sup <= math.log(1e3) and not grew:
            return GrowthVerdict("holds", horizon,
                                 math.exp(sup), int(ns[i]), False)
    _, sup, wit = best
    with np.errstate(over="ignore"):
        sup_v = math.exp(min(sup, 709.0))
    return GrowthVerdict("fails", horizon, sup_v, wit, False)


def _trit(verdict: GrowthVerdict):
    if verdict.status == "holds":
        return True
    if verdict.status == "fails":
        return False
    return None


def classify_spectrum(alpha: AlphaSequence, W: WeightFamily = None,
                      horizon=10 ** 5, with_probe=True):
    """Full symbolic classification driven by the two predicates.

    nuclear            -> (Sigma, Sigma, Sigma0)
    else, loglog finite -> ({1}, {0,1} u D(1), closure(D(1)))
    else                -> ({1}, closure(D(1)), closure(D(1)))
    Unresolvable predicates propagate to "unknown" descriptors with
    status inconclusive.
    """
    W = W or WeightFamily(alpha)
    nuc = _trit(check_nuclear(alpha, horizon))
    llog = _trit(check_loglog(alpha, min(horizon, 10 ** 5)))
    evidence = []

    if nuc is True:
        sigma_pt, sigma, sigma_star = "Sigma", "Sigma", "Sigma0"
        status = "classified"
    elif nuc is False and llog is True:
        sigma_pt, sigma, sigma_star = "{1}", "{0,1}uD(1)", "closure(D(1))"
        status = "classified"
    elif nuc is False and llog is False:
        sigma_pt, sigma, sigma_star = "{1}", "closure(D(1))", "closure(D(1))"
        status = "classified"
    else:
        sigma_pt = sigma = sigma_star = "unknown"
        status = "inconclusive"

    if status == "classified":
        pt_h = min(horizon, 10 ** 4)
        for m in (1, 2):
            v = point_spectrum_test(m, alpha, W, horizon=pt_h)
            evidence.append({"kind": "point_spectrum", "m": m,
                             "status": v.status, "sup": v.sup_value})
        if with_probe:
            for mu in (2.0 + 0.0j, -1.0 + 0.0j):
                probe = rsv.equicontinuity_probe(
                    mu, 0.05, W, k=1, horizon=min(horizon, 10 ** 4),
                    samples=4)
                evidence.append({"kind": "probe", "mu": [mu.real, mu.imag],
                                 "verdict": probe["verdict"],
                                 "l_found": probe["l_found"]})
    return SpectralReport(alpha.name, nuc, llog, sigma_pt, sigma,
                          sigma_star, status, evidence)


@dataclass
class GridPoint:
    re: float
    im: float
    region_label: str        # "spectrum" | "resolvent" | "excluded"
    probe_status: str        # "bounded" | "unbounded_evidence" | "skipped"
    probe_sup: float
    l_found: object


def sample_grid(alpha, W, re_range, im_range, resolution,
                horizon=10 ** 4, probe_subsample=0, probe_delta=0.01,
                margin=GRID_MARGIN):
    """Per-point verdicts over a rectangle of the complex plane.

    Points within ``margin`` of {0} u {1/n} are excluded; the remaining
    points are labeled by the symbolic sigma descriptor, and a
    deterministic subsample of them is probed numerically.
    """
    if resolution < 1 or resolution ** 2 > 10 ** 6:
        raise ValueError("resolution out of range")
    report = classify_spectrum(alpha, W, horizon=horizon, with_probe=False)
    res = np.linspace(re_range[0], re_range[1], resolution)
    ims = np.linspace(im_range[0], im_range[1], resolution)
    points = []
    probe_idx = set()
    usable = [(i, j) for i in range(resolution) for j in range(resolution)
              if rsv.dist_sigma0(complex(res[j], ims[i])) > margin]
    if probe_subsample > 0 and usable:
        step = max(len(usable) // probe_subsample, 1)
        probe_idx = set(usable[::step][:probe_subsample])
    for i in range(resolution):
        for j in range(resolution):
            z = complex(res[j], ims[i])
            if rsv.dist_sigma0(z) <= margin:
                points.append(GridPoint(res[j], ims[i], "excluded",
                                        "skipped", math.nan, None))
                continue
            label = ("spectrum" if region_contains(report.sigma, z,
                                                   tol=margin)
                     else "resolvent")
            if (i, j) in probe_idx:
                try:
                    probe = rsv.equicontinuity_probe(
                        z, probe_delta, W, k=1, horizon=horizon, samples=4)
                    points.append(GridPoint(
                        res[j], ims[i], label, probe["verdict"],
                        probe["sup_row_sum"], probe["l_found"]))
                except ValueError:
                    points.append(GridPoint(res[j], ims[i], label,
                                            "skipped", math.nan, None))
            else:
                points.append(GridPoint(res[j], ims[i], label, "skipped",
                                        math.nan, None))
    return report, points


def grid_to_csv(points, fh):
    fh.write("re,im,region_label,probe_status,probe_sup,l_found\n")
    for p in points:
        sup = "" if math.isnan(p.probe_sup) else f"{p.probe_sup:.17g}"
        lf = "" if p.l_found is None else str(p.l_found)
        fh.write(f"{p.re:.17g},{p.im:.17g},{p.region_label},"
                 f"{p.probe_status},{sup},{lf}\n")


_PALETTE = {
    ("spectrum", False): "#7a1f1f",
    ("spectrum", True): "#c23b3b",
    ("resolvent", False): "#1f4f7a",
    ("resolvent", True): "#3b8ac2",
    ("excluded", False): "#cccccc",
    ("excluded", True): "#cccccc",
}


def grid_to_svg(points, resolution, fh, cell=4):
    """Deterministic SVG heatmap, one cell per grid point."""
    size = resolution * cell
    fh.write(f'<svg xmlns="http://www.w3.org/2000/svg" '
             f'width="{size}" height="{size}">\n')
    for idx, p in enumerate(points):
        i, j = divmod(idx, resolution)
        probed = p.probe_status != "skipped"
        color = _PALETTE[(p.region_label, probed)]
        fh.write(f'<rect x="{j * cell}" y="{(resolution - 1 - i) * cell}" '
                 f'width="{cell}" height="{cell}" fill="{color}"/>\n')
    fh.write("</svg>\n")
