//! Homotopy scan `t -> E_{A+tV}(omega_t)` on a uniform grid of `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::bounds::path_step_bound;
use crate::error::{Error, Result};
use crate::harness::instance::Instance;
use crate::linalg::{eigh, sign_split, spectral_projector, Projector};
use crate::spectrum::{gap_condition, partition_spectrum, perturbed_component_at_t, PerturbedSeparation};

#[derive(Clone, Debug, PartialEq)]
pub struct PathPoint {
    pub t: f64,
    pub separation: PerturbedSeparation,
    pub projector: Projector,
    /// `|E_{t_prev} - E_t|`; zero at `t = 0`.
    pub step_delta: f64,
    /// The bound on `step_delta`; zero at `t = 0`.
    pub step_bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathViolationKind {
    StepBound,
    RankJump,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathViolation {
    /// Index of the grid point ending the offending step.
    pub step: usize,
    pub kind: PathViolationKind,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathScan {
    pub points: Vec<PathPoint>,
    pub violations: Vec<PathViolation>,
}

impl PathScan {
    pub fn max_delta(&self) -> f64 {
        self.points.iter().map(|p| p.step_delta).fold(0.0, f64::max)
    }

    /// Largest `step_delta - step_bound` over all steps.
    pub fn max_slack(&self) -> f64 {
        self.points
            .iter()
            .skip(1)
            .map(|p| p.step_delta - p.step_bound)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Computes the spectral projector of `omega_t` at `t_j = j / steps` and
/// checks each consecutive difference against the path step bound (plus
/// `tol`) and that the projector rank never changes.
pub fn path_scan(inst: &Instance, steps: usize, tol: f64) -> Result<PathScan> {
    if steps < 2 {
        return Err(Error::DomainError(format!("need at least 2 steps, got {steps}")));
    }
    let decomp_a = eigh(&inst.a)?;
    let partition = partition_spectrum(&decomp_a, &inst.sigma_spec)?;
    let split = sign_split(&inst.v)?;
    if !gap_condition(&split, partition.gap) {
        return Err(Error::GapConditionViolated {
            norm_sum: split.norm_sum(),
            gap: partition.gap,
        });
    }
    let rank = partition.sigma_indices.len();

    let mut points: Vec<PathPoint> = Vec::with_capacity(steps + 1);
    let mut violations = Vec::new();
    for j in 0..=steps {
        let t = j as f64 / steps as f64;
        let decomp = eigh(&inst.a.add_scaled(&inst.v, t)?)?;
        let separation = perturbed_component_at_t(&decomp, &partition, &split, t)?;
        let projector = spectral_projector(&decomp, &separation.omega_indices)?;
        if projector.rank != rank {
            violations.push(PathViolation {
                step: j,
                kind: PathViolationKind::RankJump,
                slack: projector.rank.abs_diff(rank) as f64,
            });
        }
        let (step_delta, step_bound) = match points.last() {
            None => (0.0, 0.0),
            Some(prev) => {
                let delta = eigh(&prev.projector.difference(&projector)?)?.spectral_radius();
                let bound = path_step_bound(
                    prev.t,
                    t,
                    split.norm_v,
                    split.norm_plus,
                    split.norm_minus,
                    partition.gap,
                )?;
                if delta - bound > tol {
                    violations.push(PathViolation {
                        step: j,
                        kind: PathViolationKind::StepBound,
                        slack: delta - bound,
                    });
                }
                (delta, bound)
            }
        };
        points.push(PathPoint {
            t,
            separation,
            projector,
            step_delta,
            step_bound,
        });
    }
    Ok(PathScan { points, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::instance::sharp_example_2x2;
    use crate::linalg::HermitianMatrix;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_perturbation_has_zero_steps() {
        let mut inst = sharp_example_2x2(0.0, 0.0).unwrap().instance;
        inst.v = HermitianMatrix::zeros(2).unwrap();
        let scan = path_scan(&inst, 10, 1e-9).unwrap();
        assert_eq!(scan.points.len(), 11);
        assert!(scan.points.iter().all(|p| p.step_delta == 0.0));
        assert!(scan.violations.is_empty());
    }

    #[test]
    fn sharp_example_steps_are_bounded() {
        let inst = sharp_example_2x2(0.3, 0.2).unwrap().instance;
        let scan = path_scan(&inst, 100, 1e-9).unwrap();
        assert!(scan.violations.is_empty(), "{:?}", scan.violations);
        // |V| = 0.3, d = 1, |V+| + |V-| = 0.5
        let coarse = FRAC_PI_2 * (0.3 / 100.0) / (1.0 - 0.5);
        assert!(scan.max_delta() <= coarse);
        assert!(scan.points.iter().all(|p| p.projector.rank == 1));
        assert_eq!(scan.points[0].separation.omega_indices, vec![1]);
    }

    #[test]
    fn requires_gap_condition_and_steps() {
        let inst = sharp_example_2x2(0.3, 0.2).unwrap().instance;
        assert!(path_scan(&inst, 1, 1e-9).is_err());
        let mut wide = inst.clone();
        wide.v = HermitianMatrix::from_real_diagonal(&[0.6, -0.6]).unwrap();
        assert!(matches!(
            path_scan(&wide, 10, 1e-9),
            Err(Error::GapConditionViolated { .. })
        ));
    }
}
