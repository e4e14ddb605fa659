//! Test problems: the 2×2 family on which the favourable-geometry bound is
//! attained, and seeded random instances with a prescribed spectral gap.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sign_split, CMatrix, HermitianMatrix};
use crate::spectrum::Interval;

/// A problem `(A, V, sigma)` ready for verification.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub a: HermitianMatrix,
    pub v: HermitianMatrix,
    pub sigma_spec: Vec<Interval>,
    pub seed: u64,
    pub label: String,
}

/// The 2×2 example together with the angle it is known to produce.
#[derive(Clone, Debug, PartialEq)]
pub struct SharpExample {
    pub instance: Instance,
    /// `(1/2) arcsin(v+ + v-)`.
    pub expected_angle: f64,
}

/// `A = diag(1/2, -1/2)` and the perturbation with `spec(V) = {-v-, v+}`
/// that rotates the eigenvector of `1/2` by exactly `(1/2) arcsin(v+ + v-)`.
pub fn sharp_example_2x2(v_plus: f64, v_minus: f64) -> Result<SharpExample> {
    let v = v_plus + v_minus;
    if !(0.0..1.0).contains(&v_plus) || !(0.0..1.0).contains(&v_minus) || !(v < 1.0) {
        return Err(Error::DomainError(format!(
            "need 0 <= v+, v- and v+ + v- < 1, got ({v_plus}, {v_minus})"
        )));
    }
    let off = v * (1.0 - v * v).sqrt() / 2.0;
    let shift = v_plus - v_minus;
    let a = HermitianMatrix::from_real_diagonal(&[0.5, -0.5])?;
    let pert = HermitianMatrix::from_rows(
        &[
            vec![(shift - v * v) / 2.0, off],
            vec![off, (v * v + shift) / 2.0],
        ],
        None,
    )?;
    Ok(SharpExample {
        instance: Instance {
            a,
            v: pert,
            sigma_spec: vec![Interval { lo: 0.25, hi: 0.75 }],
            seed: 0,
            label: format!("sharp_2x2(v_plus={v_plus}, v_minus={v_minus})"),
        },
        expected_angle: 0.5 * v.asin(),
    })
}

/// How the two spectral components of a random `A` are arranged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// `sigma` is the block of the lowest eigenvalues; favourable geometry.
    Clustered,
    /// `sigma` and `Sigma` alternate along the real line so that each convex
    /// hull meets the other component; generic geometry. Needs at least two
    /// eigenvalues on each side.
    Interlaced,
}

/// Spectral gap and component sizes for [`random_instance`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSpec {
    pub d_target: f64,
    /// Number of eigenvalues in `sigma`.
    pub component_split: usize,
    pub layout: Layout,
}

/// Shape of the random perturbation before rescaling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    /// Hermitian part of a complex Gaussian matrix.
    Indefinite,
    PositiveSemidefinite,
    NegativeSemidefinite,
    /// `u u* - c w w*`.
    LowRank,
    /// Couples `sigma` and `Sigma` only: zero diagonal blocks in the
    /// eigenbasis of `A`.
    Coupling,
}

impl PerturbationKind {
    pub const ALL: [PerturbationKind; 5] = [
        PerturbationKind::Indefinite,
        PerturbationKind::PositiveSemidefinite,
        PerturbationKind::NegativeSemidefinite,
        PerturbationKind::LowRank,
        PerturbationKind::Coupling,
    ];
}

/// Per-instance seed for instance `index` of a campaign seeded with `seed`.
///
/// Counter-based, so a campaign produces the same instances in any order and
/// under any degree of parallelism.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random instance with the perturbation kind drawn from the seed.
pub fn random_instance(
    n: usize,
    gap: &GapSpec,
    perturbation_scale: f64,
    seed: u64,
) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = PerturbationKind::ALL[rng.random_range(0..PerturbationKind::ALL.len())];
    build_instance(n, gap, perturbation_scale, kind, seed, &mut rng)
}

/// Random instance with a fixed perturbation kind.
///
/// `A = Q diag(lambda) Q*` with a Haar-distributed unitary `Q` and eigenvalues
/// placed so that `dist(sigma, Sigma)` is exactly `d_target`. `V` is rescaled
/// so that `|V+| + |V-| = perturbation_scale * d_target`.
pub fn random_instance_with(
    n: usize,
    gap: &GapSpec,
    perturbation_scale: f64,
    kind: PerturbationKind,
    seed: u64,
) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Keep the stream aligned with `random_instance`.
    let _: usize = rng.random_range(0..PerturbationKind::ALL.len());
    build_instance(n, gap, perturbation_scale, kind, seed, &mut rng)
}

fn build_instance(
    n: usize,
    gap: &GapSpec,
    perturbation_scale: f64,
    kind: PerturbationKind,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Instance> {
    validate(n, gap, perturbation_scale)?;
    let d = gap.d_target;
    let labels = component_labels(n, gap, rng);
    let eigenvalues = place_eigenvalues(&labels, d, rng);
    let sigma_spec = sigma_intervals(&labels, &eigenvalues, d);

    let q = haar_unitary(n, rng);
    let a = conjugate_diagonal(&q, &eigenvalues);

    let raw = raw_perturbation(n, kind, &labels, &q, rng);
    let v = if perturbation_scale == 0.0 {
        HermitianMatrix::zeros(n)?
    } else {
        let norm_sum = sign_split(&raw)?.norm_sum();
        if norm_sum == 0.0 {
            HermitianMatrix::zeros(n)?
        } else {
            raw.scaled(perturbation_scale * d / norm_sum)
        }
    };

    Ok(Instance {
        a,
        v,
        sigma_spec,
        seed,
        label: format!(
            "random(n={n}, d={d}, split={}, layout={:?}, kind={kind:?}, scale={perturbation_scale})",
            gap.component_split, gap.layout
        ),
    })
}

fn validate(n: usize, gap: &GapSpec, scale: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("dimension {n} must be at least 2")));
    }
    if !(gap.d_target > 0.0 && gap.d_target.is_finite()) {
        return Err(Error::InvalidSpec(format!("gap {} must be positive", gap.d_target)));
    }
    if !(1..n).contains(&gap.component_split) {
        return Err(Error::InvalidSpec(format!(
            "component split {} must lie in [1, {}]",
            gap.component_split,
            n - 1
        )));
    }
    if gap.layout == Layout::Interlaced
        && (gap.component_split < 2 || n - gap.component_split < 2)
    {
        return Err(Error::InvalidSpec(
            "interlaced layout needs at least two eigenvalues in each component".into(),
        ));
    }
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Error::InvalidSpec(format!("perturbation scale {scale} must be >= 0")));
    }
    Ok(())
}

/// `true` marks a `sigma` eigenvalue; labels are in ascending eigenvalue order.
fn component_labels(n: usize, gap: &GapSpec, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let k = gap.component_split;
    match gap.layout {
        Layout::Clustered => (0..n).map(|i| i < k).collect(),
        Layout::Interlaced => {
            // A leading sigma, Sigma, sigma, Sigma guarantees each hull meets
            // the other component; the rest is shuffled.
            let mut tail: Vec<bool> = std::iter::repeat_n(true, k - 2)
                .chain(std::iter::repeat_n(false, n - k - 2))
                .collect();
            for i in (1..tail.len()).rev() {
                let j = rng.random_range(0..=i);
                tail.swap(i, j);
            }
            let mut labels = vec![true, false, true, false];
            labels.extend(tail);
            labels
        }
    }
}

/// Ascending eigenvalues whose cross-component gaps are all at least `d`,
/// with one equal to `d`. Equal neighbours within a component are allowed.
fn place_eigenvalues(labels: &[bool], d: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = labels.len();
    let crossings: Vec<usize> = (1..n).filter(|&i| labels[i] != labels[i - 1]).collect();
    let tight = crossings[rng.random_range(0..crossings.len())];
    let mut values = Vec::with_capacity(n);
    let mut current = d * (rng.random::<f64>() * 4.0 - 2.0);
    values.push(current);
    for i in 1..n {
        let step = if labels[i] != labels[i - 1] {
            if i == tight {
                d
            } else {
                d * (1.0 + rng.random::<f64>())
            }
        } else if rng.random::<f64>() < 0.15 {
            0.0
        } else {
            d * 1.2 * rng.random::<f64>()
        };
        current += step;
        values.push(current);
    }
    values
}

/// One interval per maximal run of `sigma` eigenvalues, padded by `d/2`.
fn sigma_intervals(labels: &[bool], values: &[f64], d: f64) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < labels.len() {
        if labels[i] {
            let start = i;
            while i + 1 < labels.len() && labels[i + 1] {
                i += 1;
            }
            out.push(Interval {
                lo: values[start] - d / 2.0,
                hi: values[i] + d / 2.0,
            });
        }
        i += 1;
    }
    out
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// QR of a complex Gaussian matrix with the phases of `R`'s diagonal moved
/// into `Q`, which makes `Q` Haar distributed.
fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let qr = gaussian_matrix(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    q
}

fn conjugate_diagonal(q: &CMatrix, diagonal: &[f64]) -> HermitianMatrix {
    let n = diagonal.len();
    let mut scaled = q.clone();
    for (j, &lambda) in diagonal.iter().enumerate() {
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= lambda);
    }
    debug_assert_eq!(q.ncols(), n);
    HermitianMatrix::hermitian_part(scaled * q.adjoint())
}

fn raw_perturbation(
    n: usize,
    kind: PerturbationKind,
    labels: &[bool],
    q: &CMatrix,
    rng: &mut ChaCha8Rng,
) -> HermitianMatrix {
    let gram = |b: CMatrix| HermitianMatrix::hermitian_part(&b * b.adjoint());
    match kind {
        PerturbationKind::Indefinite => {
            let g = gaussian_matrix(n, n, rng);
            HermitianMatrix::hermitian_part((&g + g.adjoint()) * Complex64::new(0.5, 0.0))
        }
        PerturbationKind::PositiveSemidefinite => {
            let rank = rng.random_range(1..=n);
            gram(gaussian_matrix(n, rank, rng))
        }
        PerturbationKind::NegativeSemidefinite => {
            let rank = rng.random_range(1..=n);
            gram(gaussian_matrix(n, rank, rng)).scaled(-1.0)
        }
        PerturbationKind::LowRank => {
            let u = gram(gaussian_matrix(n, 1, rng));
            let w = gram(gaussian_matrix(n, 1, rng));
            let weight = 2.0 * rng.random::<f64>();
            u.add_scaled(&w, -weight).expect("same dimension")
        }
        PerturbationKind::Coupling => {
            let mut block = CMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..i {
                    if labels[i] != labels[j] {
                        let z = complex_normal(rng);
                        block[(i, j)] = z;
                        block[(j, i)] = z.conj();
                    }
                }
            }
            HermitianMatrix::hermitian_part(q * block * q.adjoint())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, max_abs};
    use crate::spectrum::partition_spectrum;

    fn spec(layout: Layout, split: usize) -> GapSpec {
        GapSpec {
            d_target: 0.7,
            component_split: split,
            layout,
        }
    }

    #[test]
    fn sharp_example_spectra() {
        let ex = sharp_example_2x2(0.3, 0.2).unwrap();
        let dv = eigh(&ex.instance.v).unwrap();
        assert!((dv.eigenvalues[0] + 0.2).abs() < 1e-10);
        assert!((dv.eigenvalues[1] - 0.3).abs() < 1e-10);
        let dav = eigh(&ex.instance.a.add(&ex.instance.v).unwrap()).unwrap();
        let root = 0.75f64.sqrt();
        assert!((dav.eigenvalues[0] - (0.1 - root) / 2.0).abs() < 1e-14);
        assert!((dav.eigenvalues[1] - (0.1 + root) / 2.0).abs() < 1e-14);
        assert!((ex.expected_angle - 0.5 * 0.5f64.asin()).abs() < 1e-16);
    }

    #[test]
    fn sharp_example_zero_and_domain() {
        let ex = sharp_example_2x2(0.0, 0.0).unwrap();
        assert_eq!(max_abs(ex.instance.v.entries()), 0.0);
        assert_eq!(ex.expected_angle, 0.0);
        assert!(sharp_example_2x2(0.5, 0.5).is_err());
        assert!(sharp_example_2x2(-0.1, 0.5).is_err());
    }

    #[test]
    fn zero_scale_gives_zero_perturbation() {
        let inst = random_instance(6, &spec(Layout::Clustered, 3), 0.0, 5).unwrap();
        assert_eq!(max_abs(inst.v.entries()), 0.0);
    }

    #[test]
    fn gap_is_recovered() {
        for seed in 0..40 {
            for (layout, n, split) in [(Layout::Clustered, 7, 3), (Layout::Interlaced, 9, 4)] {
                let gap = spec(layout, split);
                let inst = random_instance(n, &gap, 0.5, seed).unwrap();
                let p = partition_spectrum(&eigh(&inst.a).unwrap(), &inst.sigma_spec).unwrap();
                assert!((p.gap - gap.d_target).abs() < 1e-10, "seed {seed}: {}", p.gap);
                assert_eq!(p.sigma_indices.len(), split);
                let s = sign_split(&inst.v).unwrap();
                assert!((s.norm_sum() - 0.5 * gap.d_target).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn each_kind_has_expected_sign() {
        let gap = spec(Layout::Clustered, 2);
        for kind in PerturbationKind::ALL {
            let inst = random_instance_with(5, &gap, 0.8, kind, 11).unwrap();
            let s = sign_split(&inst.v).unwrap();
            match kind {
                PerturbationKind::PositiveSemidefinite => assert_eq!(s.norm_minus, 0.0),
                PerturbationKind::NegativeSemidefinite => assert_eq!(s.norm_plus, 0.0),
                _ => assert!(s.norm_plus > 0.0 && s.norm_minus > 0.0, "{kind:?}"),
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let gap = spec(Layout::Interlaced, 3);
        let a = random_instance(8, &gap, 0.4, 77).unwrap();
        let b = random_instance(8, &gap, 0.4, 77).unwrap();
        assert_eq!(a, b);
        let c = random_instance(8, &gap, 0.4, 78).unwrap();
        assert_ne!(a, c);
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }

    #[test]
    fn invalid_specs() {
        assert!(random_instance(1, &spec(Layout::Clustered, 1), 0.5, 0).is_err());
        assert!(random_instance(4, &spec(Layout::Clustered, 4), 0.5, 0).is_err());
        assert!(random_instance(4, &spec(Layout::Clustered, 0), 0.5, 0).is_err());
        assert!(random_instance(5, &spec(Layout::Interlaced, 1), 0.5, 0).is_err());
        assert!(random_instance(5, &spec(Layout::Clustered, 2), -0.5, 0).is_err());
        let bad_gap = GapSpec {
            d_target: 0.0,
            ..spec(Layout::Clustered, 2)
        };
        assert!(random_instance(5, &bad_gap, 0.5, 0).is_err());
    }
}
