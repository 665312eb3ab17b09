"""Maximum-likelihood estimation for the dependent toroidal model."""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import special, stats
from scipy.stats import qmc

from .circular import TWO_PI, circular_mean, wrap_angle
from .dependent import PARAM_NAMES, ToroidalParams, sample_joint
from .exceptions import DomainError
from .optimize import nelder_mead

N_PARAMS = 5
MIN_OBS_FOR_SE = 10
SE_METHOD = "observed information (finite-difference Hessian)"
HESSIAN_STEP = 1e-4
TIE_TOL = 1e-9
# Estimates this close to nu = 1 or |kappa| = 1 are reported as boundary
# solutions; their standard errors are not asymptotically valid.
BOUNDARY_TOL = 1e-6

# Likelihood-ratio level below which the dependence block is declared flat.
DEPENDENCE_LR_CRITICAL = float(stats.chi2.isf(0.001, df=3))

# Box from which Latin-hypercube starts are drawn, in natural units.
START_BOX = {
    "nu": (0.05, 0.95),
    "kappa": (-0.9, 0.9),
    "lambda": (-5.0, 5.0),
    "mu1": (0.0, TWO_PI),
    "mu2": (0.0, TWO_PI),
}
HEURISTIC_LAMBDA_GRID = np.linspace(-10.0, 10.0, 2001)
N_HEURISTIC_PEAKS = 3


def _loglik_raw(x, phi, theta) -> float:
    """Log-likelihood at the natural vector ``x``, with no range checks."""
    nu, kappa, lam, mu1, mu2 = x
    d = theta - mu1
    a = 1.0 + nu * np.cos(d)
    b = 1.0 - kappa * np.sin(phi - mu2 + lam * d)
    if np.any(a <= 0.0) or np.any(b <= 0.0):
        return -np.inf
    return float(np.sum(np.log(a)) + np.sum(np.log(b)) - 2.0 * phi.size * np.log(TWO_PI))


def _score_raw(x, phi, theta) -> np.ndarray:
    nu, kappa, lam, mu1, mu2 = x
    d = theta - mu1
    arg = phi - mu2 + lam * d
    a = 1.0 + nu * np.cos(d)
    b = 1.0 - kappa * np.sin(arg)
    kc = kappa * np.cos(arg) / b
    return np.array([
        np.sum(np.cos(d) / a),
        np.sum(-np.sin(arg) / b),
        np.sum(-d * kc),
        np.sum(nu * np.sin(d) / a) + lam * np.sum(kc),
        np.sum(kc),
    ])


def _as_data(phi, theta):
    phi = np.asarray(phi, float).ravel()
    theta = np.asarray(theta, float).ravel()
    if phi.shape != theta.shape:
        raise DomainError("phi and theta must have equal length")
    return phi, theta


def log_likelihood(p: ToroidalParams, phi, theta) -> float:
    """Sum of log joint densities; ``-inf`` if any point has zero density."""
    phi, theta = _as_data(phi, theta)
    return _loglik_raw(p.as_array(), phi, theta)


def score(p: ToroidalParams, phi, theta) -> np.ndarray:
    """Analytic gradient of :func:`log_likelihood` in the order (nu, kappa, lambda, mu1, mu2).

    With ``d = theta - mu1`` and ``u = phi - mu2 + lambda d``::

        d/dnu     = sum cos d / (1 + nu cos d)
        d/dkappa  = -sum sin u / (1 - kappa sin u)
        d/dlambda = -sum kappa d cos u / (1 - kappa sin u)
        d/dmu1    = sum nu sin d / (1 + nu cos d) + lambda sum kappa cos u / (1 - kappa sin u)
        d/dmu2    = sum kappa cos u / (1 - kappa sin u)
    """
    phi, theta = _as_data(phi, theta)
    if not np.isfinite(log_likelihood(p, phi, theta)):
        raise DomainError("score undefined: a data point has zero density")
    return _score_raw(p.as_array(), phi, theta)


def aic(loglik: float, k: int) -> float:
    return 2.0 * k - 2.0 * loglik


def bic(loglik: float, k: int, n: int) -> float:
    if n < 1:
        raise DomainError("BIC needs at least one observation")
    return k * np.log(n) - 2.0 * loglik


def finite_difference_hessian(f, x, rel_step=HESSIAN_STEP) -> np.ndarray:
    """Central-difference Hessian of scalar ``f`` with steps ``rel_step * max(1, |x_i|)``."""
    x = np.asarray(x, float)
    m = x.size
    h = rel_step * np.maximum(1.0, np.abs(x))
    f0 = f(x)
    H = np.empty((m, m))
    for i in range(m):
        ei = np.zeros(m)
        ei[i] = h[i]
        H[i, i] = (f(x + ei) - 2.0 * f0 + f(x - ei)) / h[i] ** 2
        for j in range(i + 1, m):
            ej = np.zeros(m)
            ej[j] = h[j]
            H[i, j] = H[j, i] = (
                f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)
            ) / (4.0 * h[i] * h[j])
    return H


def observed_information(p: ToroidalParams, phi, theta) -> np.ndarray:
    """Negative finite-difference Hessian of the log-likelihood at ``p``."""
    phi, theta = _as_data(phi, theta)
    return -finite_difference_hessian(lambda x: _loglik_raw(x, phi, theta), p.as_array())


def standard_errors(p_hat: ToroidalParams, phi, theta) -> Optional[np.ndarray]:
    """Square roots of the diagonal of the inverse observed information.

    Returns ``None`` when the information matrix is not positive definite or
    not finite, which happens at boundary or flat maxima.
    """
    info = observed_information(p_hat, phi, theta)
    if not np.all(np.isfinite(info)):
        return None
    try:
        np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        return None
    return np.sqrt(np.diag(np.linalg.inv(info)))


@dataclass
class FitConfig:
    n_starts: int = 32
    max_iter: int = 2000
    ftol: float = 1e-9
    seed: int = 0
    starts: Sequence[ToroidalParams] = ()

    def __post_init__(self):
        if self.n_starts < 1:
            raise DomainError("n_starts must be at least 1")
        if self.max_iter < 1 or not self.ftol > 0:
            raise DomainError("max_iter must be positive and ftol > 0")


@dataclass
class StartOutcome:
    start: ToroidalParams
    log_likelihood: float
    converged: bool
    iterations: int


@dataclass
class FitResult:
    params: ToroidalParams
    standard_errors: Optional[np.ndarray]
    log_likelihood: float
    aic: float
    bic: float
    n_obs: int
    converged: bool
    starts_summary: list = field(default_factory=list)
    flat_parameters: tuple = ()
    dependence_lr: float = float("nan")
    se_method: str = SE_METHOD
    boundary_parameters: tuple = ()

    def to_record(self) -> dict:
        """Flat JSON-ready record; unavailable standard errors become ``None``."""
        rec = self.params.to_dict()
        for i, name in enumerate(PARAM_NAMES):
            se = None if self.standard_errors is None else float(self.standard_errors[i])
            rec[f"se_{name}"] = se
        rec.update(
            logL=self.log_likelihood,
            aic=self.aic,
            bic=self.bic,
            n=self.n_obs,
            converged=self.converged,
            flat_parameters=list(self.flat_parameters),
            boundary_parameters=list(self.boundary_parameters),
            se_method=self.se_method,
        )
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "FitResult":
        params = ToroidalParams(*(float(rec[k]) for k in PARAM_NAMES))
        ses = [rec.get(f"se_{k}") for k in PARAM_NAMES]
        se = None if any(s is None for s in ses) else np.array(ses, float)
        return cls(
            params=params,
            standard_errors=se,
            log_likelihood=float(rec["logL"]),
            aic=float(rec["aic"]),
            bic=float(rec["bic"]),
            n_obs=int(rec["n"]),
            converged=bool(rec["converged"]),
            flat_parameters=tuple(rec.get("flat_parameters", ())),
            se_method=rec.get("se_method", SE_METHOD),
            boundary_parameters=tuple(rec.get("boundary_parameters", ())),
        )


# Unconstrained coordinates: nu = logistic(z0), kappa = tanh(z1), the rest raw.

def _to_natural(z) -> np.ndarray:
    # nu -> 0 is a legitimate limit; keep it representable as a valid parameter.
    nu = max(special.expit(z[0]), np.finfo(float).tiny)
    return np.array([nu, np.tanh(z[1]), z[2], z[3], z[4]])


def _to_unconstrained(x) -> np.ndarray:
    nu = np.clip(x[0], 1e-9, 1.0 - 1e-9)
    kappa = np.clip(x[1], -1.0 + 1e-9, 1.0 - 1e-9)
    return np.array([np.log(nu / (1.0 - nu)), np.arctanh(kappa), x[2], x[3], x[4]])


def _lambda_peaks(phi, theta, k=N_HEURISTIC_PEAKS):
    """Slopes at which ``phi + lambda*theta`` is most concentrated.

    The dependence factor makes ``phi - mu2 + lambda (theta - mu1)`` a
    Cardioid variable, so the resultant length of ``phi + lambda*theta``
    peaks near the true slope. Returns up to ``k`` local maxima, best first.
    """
    grid = HEURISTIC_LAMBDA_GRID
    r = np.abs(np.exp(1j * (phi[None, :] + grid[:, None] * theta[None, :])).mean(axis=1))
    interior = np.flatnonzero((r[1:-1] >= r[:-2]) & (r[1:-1] >= r[2:])) + 1
    best = interior[np.argsort(-r[interior], kind="stable")][:k]
    return grid[best]


def heuristic_starts(phi, theta) -> list:
    """Moment-based starting points, one per candidate slope."""
    mu1, r_theta = circular_mean(theta)
    mu1 = 0.0 if mu1 is None else mu1
    nu = float(np.clip(2.0 * r_theta, 0.05, 0.95))
    starts = []
    for lam in _lambda_peaks(phi, theta):
        m, r_u = circular_mean(wrap_angle(phi + lam * (theta - mu1)))
        m = 0.0 if m is None else m
        kappa = float(np.clip(2.0 * r_u, 0.05, 0.95))
        starts.append(ToroidalParams.canonical(nu, kappa, float(lam), mu1, m - 1.5 * np.pi))
    return starts


def latin_hypercube_starts(n: int, seed) -> list:
    if n <= 0:
        return []
    unit = qmc.LatinHypercube(d=N_PARAMS, seed=np.random.default_rng(seed)).random(n)
    lo = np.array([START_BOX[k][0] for k in PARAM_NAMES])
    hi = np.array([START_BOX[k][1] for k in PARAM_NAMES])
    pts = lo + unit * (hi - lo)
    return [ToroidalParams(*row) for row in pts]


def _valid_natural(x) -> bool:
    return 0.0 < x[0] <= 1.0 and abs(x[1]) <= 1.0


def _newton_polish(x, phi, theta, max_steps=25):
    """Refine an interior maximum with Newton steps on the analytic score.

    The Hessian is the central difference of the analytic score. A step is
    taken only if it improves the log-likelihood (with step halving), so the
    result is never worse than the input.
    """
    ll = _loglik_raw(x, phi, theta)
    for _ in range(max_steps):
        g = _score_raw(x, phi, theta)
        h = 1e-6 * np.maximum(1.0, np.abs(x))
        H = np.empty((N_PARAMS, N_PARAMS))
        for i in range(N_PARAMS):
            e = np.zeros(N_PARAMS)
            e[i] = h[i]
            H[:, i] = (_score_raw(x + e, phi, theta) - _score_raw(x - e, phi, theta)) / (2 * h[i])
        H = 0.5 * (H + H.T)
        try:
            np.linalg.cholesky(-H)
        except np.linalg.LinAlgError:
            break
        step = np.linalg.solve(H, -g)
        t = 1.0
        while t > 1e-6:
            cand = x + t * step
            if _valid_natural(cand):
                ll_c = _loglik_raw(cand, phi, theta)
                if ll_c >= ll:
                    break
            t *= 0.5
        else:
            break
        x, ll_prev, ll = cand, ll, ll_c
        if np.max(np.abs(t * step)) < 1e-13 or ll - ll_prev < 1e-13:
            break
    return x, ll


def _independent_loglik(phi, theta, p: ToroidalParams, config: FitConfig) -> float:
    """Best log-likelihood with ``kappa = 0`` (phi uniform, theta Cardioid)."""

    def nll(z):
        nu = special.expit(z[0])
        a = 1.0 + nu * np.cos(theta - z[1])
        return -np.sum(np.log(a))

    z0 = [_to_unconstrained(p.as_array())[0], p.mu1]
    res = nelder_mead(nll, z0, step=0.3, max_iter=config.max_iter, ftol=config.ftol)
    return float(-res.fun - 2.0 * phi.size * np.log(TWO_PI))


def _flat_from_information(info) -> tuple:
    """Parameters dominating near-null directions of the information matrix."""
    w, v = np.linalg.eigh(info)
    scale = np.max(np.abs(w))
    if scale == 0:
        return PARAM_NAMES
    flat = set()
    for val, vec in zip(w, v.T):
        if val <= 1e-8 * scale:
            flat.update(PARAM_NAMES[i] for i in np.flatnonzero(np.abs(vec) > 0.3))
    return tuple(n for n in PARAM_NAMES if n in flat)


def fit_mle(phi, theta, config: Optional[FitConfig] = None) -> FitResult:
    """Multi-start Nelder-Mead maximum-likelihood fit.

    Starts are any user-supplied points, then moment-based heuristic starts
    (one per candidate slope), then Latin-hypercube draws, up to
    ``config.n_starts`` in total. Each start runs Nelder-Mead on
    ``(logit nu, atanh kappa, lambda, mu1, mu2)``. The best run is restarted
    once, polished with Newton steps on the analytic score, and mapped to the
    canonical parameter representative. Ties within ``1e-9`` in
    log-likelihood go to the lexicographically smallest canonical vector.
    """
    config = config or FitConfig()
    phi, theta = _as_data(phi, theta)
    n = phi.size
    if n < 2:
        raise DomainError("need at least two observations")

    starts = list(config.starts) + heuristic_starts(phi, theta)
    starts = starts[: config.n_starts]
    starts += latin_hypercube_starts(config.n_starts - len(starts), config.seed)

    def nll(z):
        return -_loglik_raw(_to_natural(z), phi, theta)

    runs = []
    for start in starts:
        res = nelder_mead(nll, _to_unconstrained(start.as_array()), step=0.5,
                          max_iter=config.max_iter, ftol=config.ftol)
        x = _to_natural(res.x)
        canon = ToroidalParams.canonical(*x)
        runs.append((-res.fun, canon.as_array(), res))

    summary = [StartOutcome(s, ll, r.converged, r.iterations) for s, (ll, _, r) in zip(starts, runs)]
    top = max(ll for ll, _, _ in runs)
    tied = [r for r in runs if r[0] >= top - TIE_TOL]
    best_ll, _, best = min(tied, key=lambda r: tuple(r[1]))
    converged = best.converged

    restart = nelder_mead(nll, best.x, step=0.1, max_iter=config.max_iter, ftol=config.ftol)
    z = restart.x if restart.fun <= best.fun else best.x
    converged = converged and (restart.converged or restart.fun > best.fun)
    x, ll = _newton_polish(_to_natural(z), phi, theta)
    params = ToroidalParams.canonical(*x)
    ll = log_likelihood(params, phi, theta)

    se = None
    flat = ()
    if n >= MIN_OBS_FOR_SE:
        info = observed_information(params, phi, theta)
        if np.all(np.isfinite(info)):
            flat = _flat_from_information(info)
            se = standard_errors(params, phi, theta)
    lr = 2.0 * (ll - _independent_loglik(phi, theta, params, config))
    if lr < DEPENDENCE_LR_CRITICAL:
        flat = tuple(n_ for n_ in PARAM_NAMES if n_ in set(flat) | {"lambda", "mu2"})

    boundary = tuple(name for name, hit in (("nu", params.nu > 1.0 - BOUNDARY_TOL),
                                            ("kappa", abs(params.kappa) > 1.0 - BOUNDARY_TOL))
                     if hit)
    return FitResult(
        params=params,
        standard_errors=se,
        log_likelihood=ll,
        aic=aic(ll, N_PARAMS),
        bic=bic(ll, N_PARAMS, n),
        n_obs=n,
        converged=bool(converged),
        starts_summary=summary,
        flat_parameters=flat,
        dependence_lr=float(lr),
        boundary_parameters=boundary,
    )


def align_to(estimate: ToroidalParams, reference: ToroidalParams) -> np.ndarray:
    """Express ``estimate`` in the equivalent parameterisation nearest ``reference``.

    Uses the exact symmetries of the density: ``kappa`` takes the sign of the
    reference (moving ``mu2`` by pi if flipped) and ``mu1`` is shifted by a
    multiple of 2*pi to lie within pi of the reference, with the compensating
    ``2*pi*k*lambda`` shift of ``mu2``. Returns the natural vector, with
    ``mu1`` possibly outside ``[0, 2*pi)``.
    """
    nu, kappa, lam, mu1, mu2 = estimate.as_array()
    if kappa * reference.kappa < 0:
        kappa, mu2 = -kappa, mu2 + np.pi
    k = np.round((mu1 - reference.mu1) / TWO_PI)
    mu1, mu2 = mu1 - TWO_PI * k, mu2 + TWO_PI * k * lam
    return np.array([nu, kappa, lam, mu1, mu2])


def parameter_errors(estimate: ToroidalParams, truth: ToroidalParams) -> np.ndarray:
    """Signed estimate-minus-truth after :func:`align_to`.

    The ``mu2`` difference is wrapped into ``[-pi, pi)``; ``mu1`` needs no
    wrapping after alignment.
    """
    diff = align_to(estimate, truth) - truth.as_array()
    diff[4] = np.mod(diff[4] + np.pi, TWO_PI) - np.pi
    return diff


@dataclass
class RecoveryStudy:
    rows: list
    summary: list


def recovery_study(scenarios, replications: int, config: Optional[FitConfig] = None,
                   seed: int = 0) -> RecoveryStudy:
    """Simulate-and-refit study of estimator accuracy.

    Parameters
    ----------
    scenarios : sequence of (ToroidalParams, int)
        True parameters and sample size.
    replications : int
        Data sets simulated per scenario.
    config : FitConfig, optional
        Optimiser settings; its ``seed`` is replaced per replication.
    seed : int
        Master seed. Each (scenario, replication) gets its own child stream.

    Returns
    -------
    RecoveryStudy
        ``rows`` holds one dict per fit; ``summary`` one dict per scenario and
        parameter with bias, empirical SD, mean reported SE and the coverage
        of ``truth +- 3 SE``. Failed fits are counted, not raised.
    """
    if replications < 1:
        raise DomainError("replications must be at least 1")
    config = config or FitConfig()
    children = np.random.SeedSequence(seed).spawn(len(scenarios) * replications)
    rows = []
    for s, (truth, n) in enumerate(scenarios):
        for rep in range(replications):
            ss = children[s * replications + rep]
            data_seed, fit_seed = ss.spawn(2)
            phi, theta = sample_joint(truth, n, np.random.default_rng(data_seed))
            cfg = FitConfig(config.n_starts, config.max_iter, config.ftol,
                            int(fit_seed.generate_state(1)[0]), config.starts)
            row = {"scenario": s, "replication": rep, "n": n}
            row.update({f"true_{k}": v for k, v in truth.to_dict().items()})
            try:
                fit = fit_mle(phi, theta, cfg)
            except (DomainError, ArithmeticError, np.linalg.LinAlgError) as exc:
                row.update(failed=True, error=str(exc))
                rows.append(row)
                continue
            err = parameter_errors(fit.params, truth)
            rec = fit.to_record()
            row.update({k: rec[k] for k in PARAM_NAMES})
            row.update({f"se_{k}": rec[f"se_{k}"] for k in PARAM_NAMES})
            row.update({f"err_{k}": float(e) for k, e in zip(PARAM_NAMES, err)})
            row.update(logL=fit.log_likelihood, aic=fit.aic, bic=fit.bic,
                       converged=fit.converged, flat=";".join(fit.flat_parameters),
                       failed=False)
            rows.append(row)

    summary = []
    for s, (truth, n) in enumerate(scenarios):
        ok = [r for r in rows if r["scenario"] == s and not r["failed"]]
        for k in PARAM_NAMES:
            errs = np.array([r[f"err_{k}"] for r in ok])
            ses = np.array([r[f"se_{k}"] for r in ok if r[f"se_{k}"] is not None])
            covered = [abs(r[f"err_{k}"]) <= 3.0 * r[f"se_{k}"]
                       for r in ok if r[f"se_{k}"] is not None]
            summary.append({
                "scenario": s,
                "n": n,
                "parameter": k,
                "fits": len(ok),
                "failures": replications - len(ok),
                "bias": float(errs.mean()) if errs.size else float("nan"),
                "empirical_sd": float(errs.std(ddof=1)) if errs.size > 1 else float("nan"),
                "mean_se": float(ses.mean()) if ses.size else float("nan"),
                "coverage_3se": float(np.mean(covered)) if covered else float("nan"),
            })
    return RecoveryStudy(rows, summary)

