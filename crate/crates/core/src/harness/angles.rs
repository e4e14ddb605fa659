//! Angles between the ranges of two orthogonal projections.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{eigh, Projector};
use crate::spectrum::SpectralPartition;

/// Principal-angle data for a pair of projections `P`, `Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleMeasurement {
    /// `theta = arcsin |P - Q|`.
    pub max_angle: f64,
    /// `|sin 2Theta| = max_s 2 s sqrt(1 - s^2)` over the singular values `s`.
    pub sin2_theta_norm: f64,
    /// Singular values of `P - Q`, descending, clamped to `[0, 1]`.
    pub singular_values: Vec<f64>,
}

impl AngleMeasurement {
    /// `sin(2 theta)`.
    pub fn sin_double_max_angle(&self) -> f64 {
        (2.0 * self.max_angle).sin()
    }
}

/// Measures `theta` and `|sin 2Theta|` from the singular values of `P - Q`.
///
/// `P - Q` is Hermitian, so its singular values are the moduli of its
/// eigenvalues.
pub fn measure_angles(p: &Projector, q: &Projector) -> Result<AngleMeasurement> {
    let diff = p.difference(q)?;
    let decomp = eigh(&diff)?;
    let mut singular_values: Vec<f64> = decomp
        .eigenvalues
        .iter()
        .map(|l| l.abs().min(1.0))
        .collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let largest = singular_values.first().copied().unwrap_or(0.0);
    let sin2_theta_norm = singular_values
        .iter()
        .map(|&s| 2.0 * s * (1.0 - s * s).max(0.0).sqrt())
        .fold(0.0, f64::max);
    Ok(AngleMeasurement {
        max_angle: largest.asin(),
        sin2_theta_norm,
        singular_values,
    })
}

/// Whether one spectral component lies outside the convex hull of the other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    /// `conv(sigma) ∩ Sigma = ∅` or `sigma ∩ conv(Sigma) = ∅`.
    Favourable,
    Generic,
}

impl GeometryKind {
    pub fn is_favourable(self) -> bool {
        self == GeometryKind::Favourable
    }
}

pub fn geometry_kind(partition: &SpectralPartition) -> GeometryKind {
    let hull_avoids = |hull: &[f64], points: &[f64]| {
        let lo = hull.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = hull.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        points.iter().all(|&p| p < lo || p > hi)
    };
    let (sigma, rest) = (&partition.sigma_values, &partition.complement_values);
    if hull_avoids(sigma, rest) || hull_avoids(rest, sigma) {
        GeometryKind::Favourable
    } else {
        GeometryKind::Generic
    }
}
