use crate::consts::YamabeConstants;
use crate::error::{Error, Result};
use crate::grid::DiscreteFunction;
use crate::solver::{solve_tridiagonal, Assembled, SolverConfig};

/// Outcome of a descent run on `Q_s(u) = (E + P)(u) / ‖u‖_s²`.
#[derive(Debug, Clone)]
pub struct QuotientMinimum {
    pub value: f64,
    /// Nonnegative, `‖u‖_s = 1`.
    pub u: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// A stationary point of the subcritical functional.
#[derive(Debug, Clone)]
pub struct SubcriticalSolution {
    pub p: f64,
    pub y_p: f64,
    pub u: DiscreteFunction,
    pub residual: f64,
    /// Multiplier of the nonlinear term; equals `y_p` under `‖u‖ = 1`.
    pub lambda: f64,
    pub iterations: usize,
}

fn normalize(a: &Assembled, u: &mut [f64], s: f64) -> bool {
    let norm = a.grid.norm(u, s);
    if !(norm > 0.0) || !norm.is_finite() {
        return false;
    }
    u.iter_mut().for_each(|v| *v /= norm);
    true
}

fn apply(a: &Assembled, u: &[f64], out: &mut [f64]) {
    a.stiffness_apply(u, out);
    for i in 0..u.len() {
        out[i] += a.grid.weights[i] * a.potential[i] * u[i];
    }
}

fn weighted_residual(a: &Assembled, au: &[f64], u: &[f64], q: f64, s: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..u.len() {
        let w = a.grid.weights[i];
        let r = (q * w * u[i].powf(s - 1.0) - au[i]) / w;
        acc += w * r * r;
    }
    acc.sqrt()
}

/// Weighted `L²` norm of `Δu - c(n) scal u + Y u^{(p+2)/(p-2)}`.
pub fn residual(u: &[f64], p: f64, y_p: f64, a: &Assembled) -> f64 {
    let s = YamabeConstants::subcritical_exponent(p);
    let mut au = vec![0.0; u.len()];
    apply(a, u, &mut au);
    weighted_residual(a, &au, u, y_p, s)
}

const POLISH_START: f64 = 1e-3;
const POLISH_STEPS: usize = 40;

/// Newton iteration on `A v = ±W v^{s-1}` with the tridiagonal Jacobian,
/// mapped back through `u = v / ‖v‖_s`. Returns the best iterate if it
/// improves on `res`.
fn newton_polish(a: &Assembled, s: f64, u: &[f64], res: f64, kdiag: &[f64], off: &[f64]) -> Option<QuotientMinimum> {
    let n = u.len();
    let mut au = vec![0.0; n];
    apply(a, u, &mut au);
    let q: f64 = u.iter().zip(&au).map(|(x, y)| x * y).sum();
    if !(q.abs() > 1e-12) {
        return None;
    }
    let sign = q.signum();
    let scale = q.abs().powf(1.0 / (s - 2.0));
    let mut v: Vec<f64> = u.iter().map(|x| x * scale).collect();
    let mut best: Option<QuotientMinimum> = None;
    let mut best_res = res;
    let mut av = vec![0.0; n];
    let mut trial = vec![0.0; n];
    for _ in 0..POLISH_STEPS {
        apply(a, &v, &mut av);
        let w = &a.grid.weights;
        let rhs: Vec<f64> = (0..n).map(|i| av[i] - sign * w[i] * v[i].powf(s - 1.0)).collect();
        let jdiag: Vec<f64> = (0..n)
            .map(|i| kdiag[i] + w[i] * a.potential[i] - sign * (s - 1.0) * w[i] * v[i].powf(s - 2.0))
            .collect();
        let dv = solve_tridiagonal(&jdiag, off, &rhs);
        for i in 0..n {
            v[i] = (v[i] - dv[i]).abs();
        }
        if v.iter().any(|x| !x.is_finite()) {
            break;
        }
        trial.copy_from_slice(&v);
        if !normalize(a, &mut trial, s) {
            break;
        }
        apply(a, &trial, &mut au);
        let qt: f64 = trial.iter().zip(&au).map(|(x, y)| x * y).sum();
        let rt = weighted_residual(a, &au, &trial, qt, s);
        if !(rt < best_res) {
            break;
        }
        best_res = rt;
        best = Some(QuotientMinimum {
            value: qt,
            u: trial.clone(),
            residual: rt,
            iterations: 0,
            converged: false,
        });
    }
    best
}

/// Preconditioned projected gradient on `{u ≥ 0, ‖u‖_s = 1}`.
///
/// The search direction is the gradient preconditioned by the tridiagonal
/// `K + diag(w (|V| + σ))`; each trial point is projected by `u ↦ |u|` and
/// renormalized, and steps are accepted by Armijo backtracking. Once the
/// residual is small the iterate is polished by Newton steps. A run that
/// exhausts its budget or stalls is returned with `converged = false`.
pub fn minimize_quotient(a: &Assembled, s: f64, init: &[f64], config: &SolverConfig) -> Result<QuotientMinimum> {
    let n = a.len();
    if init.len() != n {
        return Err(Error::Parameter(format!("initial guess has {} values, grid has {n}", init.len())));
    }
    if !(s > 2.0) {
        return Err(Error::Parameter(format!("norm exponent must exceed 2, got {s}")));
    }
    let mut u: Vec<f64> = init.iter().map(|v| v.abs()).collect();
    if u.iter().any(|v| !v.is_finite()) || !normalize(a, &mut u, s) {
        return Err(Error::Parameter("initial guess is degenerate".into()));
    }

    let mut kdiag = a.dirichlet.clone();
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for (k, c) in a.face_coupling.iter().enumerate() {
        kdiag[k] += c;
        kdiag[k + 1] += c;
        off.push(-c);
    }

    let mut au = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut step: f64 = 0.25;
    let mut res = f64::INFINITY;
    let mut q = f64::NAN;
    let mut polish_below = POLISH_START;
    for it in 0..config.max_iterations {
        apply(a, &u, &mut au);
        q = u.iter().zip(&au).map(|(x, y)| x * y).sum::<f64>();
        if !q.is_finite() || q < config.unbounded_floor {
            return Err(Error::UnboundedBelow(format!("quotient reached {q:e} at iteration {it}")));
        }
        res = weighted_residual(a, &au, &u, q, s);
        if res <= config.tolerance {
            return Ok(QuotientMinimum {
                value: q,
                u,
                residual: res,
                iterations: it,
                converged: true,
            });
        }
        if res < polish_below {
            polish_below = 0.1 * res;
            if let Some(p) = newton_polish(a, s, &u, res, &kdiag, &off) {
                if p.residual <= config.tolerance {
                    return Ok(QuotientMinimum {
                        iterations: it + 1,
                        converged: true,
                        ..p
                    });
                }
                u = p.u;
                continue;
            }
        }
        for i in 0..n {
            g[i] = 2.0 * (au[i] - q * a.grid.weights[i] * u[i].powf(s - 1.0));
        }
        let mass = a.mass(&u);
        let sigma = q.abs() / mass + 1e-12;
        let pdiag: Vec<f64> = (0..n)
            .map(|i| kdiag[i] + a.grid.weights[i] * (a.potential[i].abs() + sigma))
            .collect();
        let d: Vec<f64> = solve_tridiagonal(&pdiag, &off, &g).into_iter().map(|v| -v).collect();
        let slope: f64 = g.iter().zip(&d).map(|(x, y)| x * y).sum();
        if !(slope < 0.0) {
            break;
        }
        let mut t = (2.0 * step).min(4.0);
        let mut accepted = false;
        while t > 1e-14 {
            for i in 0..n {
                trial[i] = (u[i] + t * d[i]).abs();
            }
            if normalize(a, &mut trial, s) {
                let qt = a.numerator(&trial);
                if qt <= q + config.armijo * t * slope {
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            // rounding floor of the Armijo test; only Newton can go further
            if let Some(p) = newton_polish(a, s, &u, res, &kdiag, &off) {
                if p.residual <= config.tolerance {
                    return Ok(QuotientMinimum {
                        iterations: it + 1,
                        converged: true,
                        ..p
                    });
                }
                u = p.u;
                continue;
            }
            break;
        }
        step = t;
        std::mem::swap(&mut u, &mut trial);
        if it % 500 == 499 {
            log::debug!("descent iteration {}: Q = {q:.12e}, residual {res:.3e}", it + 1);
        }
    }
    apply(a, &u, &mut au);
    let value = u.iter().zip(&au).map(|(x, y)| x * y).sum::<f64>();
    let final_res = weighted_residual(a, &au, &u, value, s);
    if final_res.is_finite() {
        res = final_res;
        q = value;
    }
    Ok(QuotientMinimum {
        value: q,
        converged: res <= config.tolerance,
        u,
        residual: res,
        iterations: config.max_iterations,
    })
}

/// Minimizes `Q_p` starting from `u ≡ 1`.
pub fn minimize_subcritical(a: &Assembled, p: f64, config: &SolverConfig) -> Result<SubcriticalSolution> {
    minimize_subcritical_from(a, p, config, &vec![1.0; a.len()])
}

/// Minimizes `Q_p` from the given initial guess.
pub fn minimize_subcritical_from(
    a: &Assembled,
    p: f64,
    config: &SolverConfig,
    init: &[f64],
) -> Result<SubcriticalSolution> {
    let n = a.constants.dim();
    if !(p > n && p <= 2.0 * n) {
        return Err(Error::Parameter(format!("p must lie in (n, 2n], got {p}")));
    }
    let s = YamabeConstants::subcritical_exponent(p);
    let m = minimize_quotient(a, s, init, config)?;
    if !m.converged {
        return Err(Error::NonConvergence {
            iterations: m.iterations,
            residual: m.residual,
        });
    }
    Ok(SubcriticalSolution {
        p,
        y_p: m.value,
        u: DiscreteFunction(m.u),
        residual: m.residual,
        lambda: m.value,
        iterations: m.iterations,
    })
}
