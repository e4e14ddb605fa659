//! Direct numerical evaluation of
//!
//! ```text
//! inf { (1/2) sum_j arcsin(pi lambda_j / 2) : 0 <= lambda_j <= 2/pi, prod_j (1 - lambda_j) = 1 - x }
//! ```
//!
//! over step counts up to `n_max`. This is the quantity `N(x/2)` is the
//! closed form of, so it serves as an oracle for [`super::bound_n`].
//!
//! The search works in log coordinates `mu_j = -ln(1 - lambda_j)`, where the
//! product constraint becomes the linear constraint `sum_j mu_j = -ln(1 - x)`
//! and the step cap becomes the box `0 <= mu_j <= -ln(1 - 2/pi)`. Every step
//! count `m` is tried with the equal split and with several randomized
//! starts refined by projected gradient descent on that capped simplex. No
//! assumption about the shape of the optimal partition is made.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const RANDOM_STARTS: usize = 4;
const MAX_DESCENT_ITERS: usize = 400;
const ORACLE_SEED: u64 = 0x005E_ED0F_1AB5;

/// Contribution `(1/2) arcsin(pi lambda / 2)` of one step, `lambda = 1 - e^-mu`.
fn step_cost(mu: f64) -> f64 {
    let lambda = -(-mu).exp_m1();
    0.5 * (FRAC_PI_2 * lambda).min(1.0).asin()
}

/// Derivative of [`step_cost`] in `mu`.
fn step_slope(mu: f64, mu_cap: f64) -> f64 {
    // The slope blows up at the cap; evaluate just inside it.
    let mu = mu.min(mu_cap * (1.0 - 1e-9));
    let lambda = -(-mu).exp_m1();
    let s = FRAC_PI_2 * lambda;
    0.5 * FRAC_PI_2 * (-mu).exp() / (1.0 - s * s).sqrt()
}

fn total_cost(mu: &[f64]) -> f64 {
    mu.iter().map(|&m| step_cost(m)).sum()
}

/// Euclidean projection onto `{ sum = total, 0 <= mu_j <= cap }`.
fn project_capped_simplex(y: &mut [f64], total: f64, cap: f64) {
    let mass = |tau: f64, y: &[f64]| -> f64 { y.iter().map(|&v| (v - tau).clamp(0.0, cap)).sum() };
    let mut lo = y.iter().copied().fold(f64::INFINITY, f64::min) - cap;
    let mut hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // mass is nonincreasing in tau: mass(lo) = m * cap >= total, mass(hi) = 0.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid, y) > total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    for v in y.iter_mut() {
        *v = (*v - tau).clamp(0.0, cap);
    }
}

/// Projected gradient descent with step halving; returns the local minimum value.
fn refine(mu: &mut [f64], total: f64, cap: f64, tol: f64) -> f64 {
    let mut value = total_cost(mu);
    let mut step = 0.1 * total.max(1e-3);
    let mut trial = vec![0.0; mu.len()];
    for _ in 0..MAX_DESCENT_ITERS {
        let grad: Vec<f64> = mu.iter().map(|&m| step_slope(m, cap)).collect();
        let mut improved = false;
        while step > 1e-14 {
            for ((t, &m), &g) in trial.iter_mut().zip(mu.iter()).zip(&grad) {
                *t = m - step * g;
            }
            project_capped_simplex(&mut trial, total, cap);
            let candidate = total_cost(&trial);
            if candidate < value {
                let gain = value - candidate;
                mu.copy_from_slice(&trial);
                value = candidate;
                improved = gain > tol;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    value
}

/// Infimum of `(1/2) sum arcsin(pi lambda_j / 2)` subject to
/// `prod (1 - lambda_j) = 1 - x` and `0 <= lambda_j <= 2/pi`, over at most
/// `n_max` steps. Requires `0 <= x <= 2 c_crit`.
pub fn n_via_partition_infimum(x: f64, n_max: usize, tol: f64) -> Result<f64> {
    let upper = 2.0 * super::c_crit();
    if !(0.0..=upper).contains(&x) {
        return Err(Error::DomainError(format!(
            "x = {x} must lie in [0, 2 c_crit] = [0, {upper}]"
        )));
    }
    if n_max == 0 {
        return Err(Error::DomainError("n_max must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::DomainError(format!("tolerance {tol} must be positive")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let total = -(-x).ln_1p();
    let cap = -(-2.0 / PI).ln_1p();
    if (n_max as f64) * cap < total {
        return Err(Error::InfeasibleConstraint {
            target: 1.0 - x,
            n_max,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    let mut best = f64::INFINITY;
    for m in 1..=n_max {
        if (m as f64) * cap < total {
            continue;
        }
        let equal = total / m as f64;
        best = best.min(m as f64 * step_cost(equal));
        if m == 1 {
            continue;
        }
        for _ in 0..RANDOM_STARTS {
            let mut mu: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 1e-3).collect();
            let scale = total / mu.iter().sum::<f64>();
            mu.iter_mut().for_each(|v| *v *= scale);
            project_capped_simplex(&mut mu, total, cap);
            best = best.min(refine(&mut mu, total, cap, tol));
        }
    }
    Ok(best)
}

/// Objective in the limit of infinitely many equal steps.
#[cfg(test)]
fn fine_partition_limit(x: f64) -> f64 {
    -std::f64::consts::FRAC_PI_4 * (-x).ln_1p()
}
