//! Spectral partitions `spec(A) = sigma ∪ Sigma`, enlargements of a component
//! by `[-|V-|, |V+|]`, and the perturbed components `omega` / `omega_t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{PerturbationSplit, SpectralDecomposition};

const BOUNDARY_REL_TOL: f64 = 1e-12;
const ENCLOSURE_REL_TOL: f64 = 1e-9;

/// A closed real interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Distance from `x` to the interval (0 inside).
    pub fn distance(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }
}

/// The split of `spec(A)` into `sigma` and its complement `Sigma`, with gap
/// `d = dist(sigma, Sigma)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPartition {
    pub sigma_indices: Vec<usize>,
    pub complement_indices: Vec<usize>,
    pub sigma_values: Vec<f64>,
    pub complement_values: Vec<f64>,
    pub gap: f64,
}

impl SpectralPartition {
    /// Largest eigenvalue modulus of `A`.
    pub fn spectral_radius(&self) -> f64 {
        self.sigma_values
            .iter()
            .chain(&self.complement_values)
            .fold(0.0, |m, l| m.max(l.abs()))
    }
}

/// Assigns every eigenvalue to `sigma` if it lies in one of `sigma_spec`'s
/// closed intervals, otherwise to `Sigma`.
pub fn partition_spectrum(
    decomp: &SpectralDecomposition,
    sigma_spec: &[Interval],
) -> Result<SpectralPartition> {
    let mut sigma_indices = Vec::new();
    let mut complement_indices = Vec::new();
    for (k, &lambda) in decomp.eigenvalues.iter().enumerate() {
        for iv in sigma_spec {
            for boundary in [iv.lo, iv.hi] {
                if (lambda - boundary).abs() <= BOUNDARY_REL_TOL * (1.0 + boundary.abs()) {
                    return Err(Error::AmbiguousMembership {
                        eigenvalue: lambda,
                        boundary,
                    });
                }
            }
        }
        if sigma_spec.iter().any(|iv| iv.contains(lambda)) {
            sigma_indices.push(k);
        } else {
            complement_indices.push(k);
        }
    }
    if sigma_indices.is_empty() {
        return Err(Error::EmptyComponent("sigma"));
    }
    if complement_indices.is_empty() {
        return Err(Error::EmptyComponent("Sigma"));
    }
    let sigma_values: Vec<f64> = sigma_indices.iter().map(|&k| decomp.eigenvalues[k]).collect();
    let complement_values: Vec<f64> = complement_indices
        .iter()
        .map(|&k| decomp.eigenvalues[k])
        .collect();
    let gap = min_cross_distance(&sigma_values, &complement_values);
    Ok(SpectralPartition {
        sigma_indices,
        complement_indices,
        sigma_values,
        complement_values,
        gap,
    })
}

/// `|V+| + |V-| < d`.
pub fn gap_condition(split: &PerturbationSplit, gap: f64) -> bool {
    split.norm_sum() < gap
}

fn min_cross_distance(left: &[f64], right: &[f64]) -> f64 {
    left.iter()
        .flat_map(|&a| right.iter().map(move |&b| (a - b).abs()))
        .fold(f64::INFINITY, f64::min)
}

/// A finite union of closed intervals, sorted and pairwise disjoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnlargedSet {
    pub intervals: Vec<Interval>,
}

impl EnlargedSet {
    pub fn distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|iv| iv.distance(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.distance(x) <= tol
    }
}

/// `values + [-norm_minus, norm_plus]`, with overlapping intervals merged.
pub fn enlarge(values: &[f64], norm_minus: f64, norm_plus: f64) -> EnlargedSet {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut intervals: Vec<Interval> = Vec::with_capacity(sorted.len());
    for lambda in sorted {
        let lo = lambda - norm_minus;
        let hi = lambda + norm_plus;
        match intervals.last_mut() {
            Some(last) if lo <= last.hi => last.hi = last.hi.max(hi),
            _ => intervals.push(Interval { lo, hi }),
        }
    }
    EnlargedSet { intervals }
}

/// The perturbed components `omega`, `Omega` of `spec(A + tV)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbedSeparation {
    pub omega_indices: Vec<usize>,
    pub complement_indices: Vec<usize>,
    /// `d - t (|V+| + |V-|)`.
    pub gap_lower_bound: f64,
    /// `dist(omega, Omega)` as measured.
    pub measured_gap: f64,
}

fn enclosure_tolerance(partition: &SpectralPartition, split: &PerturbationSplit) -> f64 {
    ENCLOSURE_REL_TOL * (1.0 + partition.spectral_radius() + split.norm_v)
}

/// `omega = spec(A + V) ∩ (sigma + [-|V-|, |V+|])`, and likewise `Omega`.
pub fn perturbed_component(
    decomp_av: &SpectralDecomposition,
    partition: &SpectralPartition,
    split: &PerturbationSplit,
) -> Result<PerturbedSeparation> {
    perturbed_component_at_t(decomp_av, partition, split, 1.0)
}

/// `omega_t = spec(A + tV) ∩ (sigma + [-t|V-|, t|V+|])`.
///
/// Requires `t (|V+| + |V-|) < d`. An eigenvalue of `A + tV` outside both
/// enlargements cannot occur in exact arithmetic and is reported as an error.
/// `omega` normally has as many elements as `sigma`; callers check this, and
/// `measured_gap` is infinite if either side came out empty.
pub fn perturbed_component_at_t(
    decomp_atv: &SpectralDecomposition,
    partition: &SpectralPartition,
    split: &PerturbationSplit,
    t: f64,
) -> Result<PerturbedSeparation> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::DomainError(format!("path parameter t = {t} not in [0, 1]")));
    }
    if decomp_atv.dim() != partition.sigma_indices.len() + partition.complement_indices.len() {
        return Err(Error::DimensionMismatch {
            left: decomp_atv.dim(),
            right: partition.sigma_indices.len() + partition.complement_indices.len(),
        });
    }
    let norm_sum = t * split.norm_sum();
    if !(norm_sum < partition.gap) {
        return Err(Error::GapConditionViolated {
            norm_sum,
            gap: partition.gap,
        });
    }
    let (minus, plus) = (t * split.norm_minus, t * split.norm_plus);
    let near = enlarge(&partition.sigma_values, minus, plus);
    let far = enlarge(&partition.complement_values, minus, plus);
    let tol = enclosure_tolerance(partition, split);

    let mut omega_indices = Vec::new();
    let mut complement_indices = Vec::new();
    for (k, &mu) in decomp_atv.eigenvalues.iter().enumerate() {
        let (d_near, d_far) = (near.distance(mu), far.distance(mu));
        if d_near.min(d_far) > tol {
            return Err(Error::EnclosureViolation {
                eigenvalue: mu,
                excess: d_near.min(d_far),
            });
        }
        if d_near <= d_far {
            omega_indices.push(k);
        } else {
            complement_indices.push(k);
        }
    }
    let values = |idx: &[usize]| -> Vec<f64> {
        idx.iter().map(|&k| decomp_atv.eigenvalues[k]).collect()
    };
    let measured_gap = min_cross_distance(&values(&omega_indices), &values(&complement_indices));
    Ok(PerturbedSeparation {
        omega_indices,
        complement_indices,
        gap_lower_bound: partition.gap - norm_sum,
        measured_gap,
    })
}

/// Outcome of checking `spec(A + V) ⊂ spec(A) + [-|V-|, |V+|]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnclosureCheck {
    pub holds: bool,
    /// Largest distance of an eigenvalue of `A + V` from the enlarged spectrum.
    pub max_excess: f64,
}

pub fn spectral_enclosure_check(
    decomp_a: &SpectralDecomposition,
    decomp_av: &SpectralDecomposition,
    split: &PerturbationSplit,
) -> EnclosureCheck {
    let enlarged = enlarge(&decomp_a.eigenvalues, split.norm_minus, split.norm_plus);
    let tol = ENCLOSURE_REL_TOL * (1.0 + decomp_a.spectral_radius() + split.norm_v);
    let max_excess = decomp_av
        .eigenvalues
        .iter()
        .map(|&mu| enlarged.distance(mu))
        .fold(0.0, f64::max);
    EnclosureCheck {
        holds: max_excess <= tol,
        max_excess,
    }
}

/// Given a gap `(a, b)` in `spec(A)`, the open interval `(a + |V+|, b - |V-|)`
/// that stays free of `spec(A + V)`, if it is nonempty.
pub fn resolvent_interval(a: f64, b: f64, split: &PerturbationSplit) -> Result<Option<Interval>> {
    if !(a < b) {
        return Err(Error::InvalidInterval { lo: a, hi: b });
    }
    if split.norm_sum() < b - a {
        Ok(Some(Interval {
            lo: a + split.norm_plus,
            hi: b - split.norm_minus,
        }))
    } else {
        Ok(None)
    }
}

/// Result of scanning every gap between consecutive distinct eigenvalues of
/// `A` for eigenvalues of `A + V` inside the corresponding resolvent interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventCheck {
    pub intervals_checked: usize,
    /// Deepest penetration of an eigenvalue of `A + V` into an open
    /// resolvent interval; 0 when none enters.
    pub max_intrusion: f64,
}

pub fn resolvent_check(
    decomp_a: &SpectralDecomposition,
    decomp_av: &SpectralDecomposition,
    split: &PerturbationSplit,
) -> ResolventCheck {
    let mut intervals_checked = 0;
    let mut max_intrusion: f64 = 0.0;
    for pair in decomp_a.eigenvalues.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if !(a < b) {
            continue;
        }
        // (a, b) is a gap of spec(A), so the arguments are valid.
        if let Ok(Some(iv)) = resolvent_interval(a, b, split) {
            intervals_checked += 1;
            for &mu in &decomp_av.eigenvalues {
                if iv.lo < mu && mu < iv.hi {
                    max_intrusion = max_intrusion.max((mu - iv.lo).min(iv.hi - mu));
                }
            }
        }
    }
    ResolventCheck {
        intervals_checked,
        max_intrusion,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, sign_split, HermitianMatrix};

    fn diag(values: &[f64]) -> SpectralDecomposition {
        eigh(&HermitianMatrix::from_real_diagonal(values).unwrap()).unwrap()
    }

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn partition_examples() {
        let p = partition_spectrum(&diag(&[-0.5, 0.5]), &[iv(0.4, 0.6)]).unwrap();
        assert_eq!(p.sigma_indices, vec![1]);
        assert_eq!(p.gap, 1.0);

        let p = partition_spectrum(&diag(&[0.0, 1.0, 2.0, 3.0]), &[iv(-0.5, 1.5)]).unwrap();
        assert_eq!(p.sigma_indices, vec![0, 1]);
        assert_eq!(p.complement_indices, vec![2, 3]);
        assert_eq!(p.gap, 1.0);

        let p = partition_spectrum(&diag(&[0.0, 5.0]), &[iv(4.0, 6.0)]).unwrap();
        assert_eq!(p.gap, 5.0);
    }

    #[test]
    fn partition_errors() {
        assert_eq!(
            partition_spectrum(&diag(&[0.0, 1.0]), &[iv(3.0, 4.0)]),
            Err(Error::EmptyComponent("sigma"))
        );
        assert_eq!(
            partition_spectrum(&diag(&[0.0, 1.0]), &[iv(-1.0, 4.0)]),
            Err(Error::EmptyComponent("Sigma"))
        );
        assert!(matches!(
            partition_spectrum(&diag(&[0.0, 1.0]), &[iv(1.0, 4.0)]),
            Err(Error::AmbiguousMembership { .. })
        ));
        assert!(Interval::new(1.0, 0.0).is_err());
    }

    #[test]
    fn enlarge_examples() {
        assert_eq!(enlarge(&[0.5], 0.2, 0.3).intervals, vec![Interval { lo: 0.3, hi: 0.8 }]);
        let merged = enlarge(&[0.0, 0.1], 0.05, 0.05);
        assert_eq!(merged.intervals.len(), 1);
        assert_eq!(merged.intervals[0].lo, -0.05);
        assert!((merged.intervals[0].hi - 0.15).abs() < 1e-15);
        assert_eq!(
            enlarge(&[10.0, 0.0], 1.0, 1.0).intervals,
            vec![Interval { lo: -1.0, hi: 1.0 }, Interval { lo: 9.0, hi: 11.0 }]
        );
    }

    #[test]
    fn zero_perturbation_reproduces_sigma() {
        let d = diag(&[0.0, 1.0, 3.0]);
        let p = partition_spectrum(&d, &[iv(0.5, 1.5)]).unwrap();
        let split = sign_split(&HermitianMatrix::zeros(3).unwrap()).unwrap();
        let sep = perturbed_component(&d, &p, &split).unwrap();
        assert_eq!(sep.omega_indices, p.sigma_indices);
        assert_eq!(sep.measured_gap, p.gap);
        assert_eq!(sep.gap_lower_bound, p.gap);
    }

    #[test]
    fn commuting_diagonal_perturbation() {
        let a = HermitianMatrix::from_real_diagonal(&[0.0, 10.0]).unwrap();
        let v = HermitianMatrix::from_real_diagonal(&[0.5, -0.5]).unwrap();
        let da = eigh(&a).unwrap();
        let p = partition_spectrum(&da, &[iv(-1.0, 1.0)]).unwrap();
        let split = sign_split(&v).unwrap();
        let dav = eigh(&a.add(&v).unwrap()).unwrap();
        let sep = perturbed_component(&dav, &p, &split).unwrap();
        assert_eq!(sep.omega_indices.len(), 1);
        assert_eq!(dav.eigenvalues[sep.omega_indices[0]], 0.5);
        assert_eq!(sep.gap_lower_bound, 9.0);
        assert_eq!(sep.measured_gap, 9.0);
    }

    #[test]
    fn perturbed_component_rejects_closed_gap() {
        let d = diag(&[0.0, 1.0]);
        let p = partition_spectrum(&d, &[iv(-0.5, 0.5)]).unwrap();
        let split = sign_split(&HermitianMatrix::from_real_diagonal(&[0.6, -0.5]).unwrap()).unwrap();
        assert!(matches!(
            perturbed_component(&d, &p, &split),
            Err(Error::GapConditionViolated { .. })
        ));
    }

    #[test]
    fn enclosure_examples() {
        let zero = sign_split(&HermitianMatrix::zeros(2).unwrap()).unwrap();
        let d = diag(&[0.0, 1.0]);
        assert_eq!(
            spectral_enclosure_check(&d, &d, &zero),
            EnclosureCheck {
                holds: true,
                max_excess: 0.0
            }
        );

        let v = HermitianMatrix::from_real_diagonal(&[1.0, -2.0]).unwrap();
        let split = sign_split(&v).unwrap();
        let da = diag(&[0.0, 0.0]);
        let dav = eigh(&v).unwrap();
        assert!(spectral_enclosure_check(&da, &dav, &split).holds);

        // A wrong "perturbed" spectrum is caught.
        let bogus = diag(&[-5.0, 1.0]);
        let check = spectral_enclosure_check(&da, &bogus, &split);
        assert!(!check.holds);
        assert_eq!(check.max_excess, 3.0);
    }

    #[test]
    fn resolvent_interval_examples() {
        let split = |p: f64, m: f64| {
            sign_split(&HermitianMatrix::from_real_diagonal(&[p, -m]).unwrap()).unwrap()
        };
        let r = resolvent_interval(0.0, 1.0, &split(0.3, 0.2)).unwrap().unwrap();
        assert!((r.lo - 0.3).abs() < 1e-15 && (r.hi - 0.8).abs() < 1e-15);
        assert_eq!(resolvent_interval(0.0, 1.0, &split(0.6, 0.5)).unwrap(), None);
        assert!(matches!(
            resolvent_interval(1.0, 1.0, &split(0.1, 0.1)),
            Err(Error::InvalidInterval { .. })
        ));
    }
}
