//! Evaluate every applicable bound on an instance and record what holds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    corollary_half_arcsin_bound, favgeom_bound, generic_bound, integral_bound,
    sin2_theta_bound,
};
use crate::error::Result;
use crate::harness::angles::{geometry_kind, measure_angles, AngleMeasurement, GeometryKind};
use crate::harness::instance::Instance;
use crate::linalg::{eigh, sign_split, spectral_projector};
use crate::spectrum::{
    gap_condition, partition_spectrum, perturbed_component, resolvent_check,
    spectral_enclosure_check, EnclosureCheck, PerturbedSeparation, ResolventCheck,
    SpectralPartition,
};

/// Slack tolerances for [`verify_instance`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Absolute slack for every angle and `sin 2Theta` comparison.
    pub angle_tol: f64,
    /// Absolute slack for `sin 2theta <= |sin 2Theta|`.
    pub ordering_tol: f64,
    /// Absolute slack for `dist(omega, Omega) >= d - |V+| - |V-|`.
    pub gap_tol: f64,
    /// Relative slack for eigenvalue enclosures, scaled by `1 + |A| + |V|`.
    pub enclosure_rel_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            angle_tol: 1e-9,
            ordering_tol: 1e-10,
            gap_tol: 1e-10,
            enclosure_rel_tol: 1e-9,
        }
    }
}

/// Name of an individual inequality check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    FavourableAngle,
    GenericAngle,
    CorollaryAngle,
    IntegralAngle,
    Sin2ThetaNorm,
    Sin2ThetaEstimate,
    DoubleAngleOrdering,
    GapLowerBound,
    Enclosure,
    ResolventInterval,
    /// `omega` could not be formed, or came out with the wrong size.
    OmegaAssignment,
}

/// A failed check and by how much it failed (positive = violated).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub check: CheckKind,
    pub slack: f64,
}

/// One bound together with the quantity it constrains.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub applicable: bool,
    pub bound: Option<f64>,
    pub measured: Option<f64>,
    /// `measured - bound`; nonpositive when the bound holds exactly.
    pub slack: Option<f64>,
}

impl BoundCheck {
    fn inapplicable() -> Self {
        Self::default()
    }

    fn new(bound: f64, measured: f64) -> Self {
        Self {
            applicable: true,
            bound: Some(bound),
            measured: Some(measured),
            slack: Some(measured - bound),
        }
    }
}

/// Every bound evaluated on one instance, with violations listed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub gap: f64,
    pub norm_plus: f64,
    pub norm_minus: f64,
    pub norm_v: f64,
    pub gap_condition: bool,
    pub geometry: GeometryKind,
    /// `arcsin |E_A(sigma) - E_{A+V}(omega)|`; absent when `omega` is undefined.
    pub measured_angle: Option<f64>,
    pub favgeom: BoundCheck,
    pub generic: BoundCheck,
    pub half_arcsin: BoundCheck,
    pub integral: BoundCheck,
    pub integral_below_threshold: Option<bool>,
    /// `|sin 2Theta|` against its bound.
    pub sin2_theta: BoundCheck,
    /// `sin 2theta` against the same bound.
    pub sin2_theta_estimate: BoundCheck,
    pub gap_lower_bound: Option<f64>,
    pub measured_gap: Option<f64>,
    pub enclosure: EnclosureCheck,
    pub resolvent: ResolventCheck,
    pub violations: Vec<Violation>,
}

impl BoundReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// The angle and `sin 2Theta` checks, by name.
    pub fn bound_checks(&self) -> [(CheckKind, &BoundCheck); 6] {
        [
            (CheckKind::FavourableAngle, &self.favgeom),
            (CheckKind::GenericAngle, &self.generic),
            (CheckKind::CorollaryAngle, &self.half_arcsin),
            (CheckKind::IntegralAngle, &self.integral),
            (CheckKind::Sin2ThetaNorm, &self.sin2_theta),
            (CheckKind::Sin2ThetaEstimate, &self.sin2_theta_estimate),
        ]
    }

    /// Largest `measured - bound` over the applicable bound checks.
    pub fn max_slack(&self) -> Option<f64> {
        self.bound_checks()
            .iter()
            .filter_map(|(_, c)| c.slack)
            .reduce(f64::max)
    }
}

/// Everything computed while verifying an instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Analysis {
    pub report: BoundReport,
    pub partition: SpectralPartition,
    pub separation: Option<PerturbedSeparation>,
    pub angles: Option<AngleMeasurement>,
}

/// Runs the full pipeline and returns the [`BoundReport`].
pub fn verify_instance(inst: &Instance, opts: &VerifyOptions) -> Result<BoundReport> {
    Ok(analyze_instance(inst, opts)?.report)
}

/// Builds `E_A(sigma)` and `E_{A+V}(omega)`, measures their angles and
/// compares them with every bound whose hypotheses hold. Violations are
/// recorded, never raised.
pub fn analyze_instance(inst: &Instance, opts: &VerifyOptions) -> Result<Analysis> {
    let decomp_a = eigh(&inst.a)?;
    let partition = partition_spectrum(&decomp_a, &inst.sigma_spec)?;
    let split = sign_split(&inst.v)?;
    let decomp_av = eigh(&inst.a.add(&inst.v)?)?;
    let d = partition.gap;
    let (np, nm) = (split.norm_plus, split.norm_minus);
    let sum = split.norm_sum();
    let geometry = geometry_kind(&partition);
    let favourable = geometry.is_favourable();
    let gap_ok = gap_condition(&split, d);
    let mut violations = Vec::new();

    let enclosure = spectral_enclosure_check(&decomp_a, &decomp_av, &split);
    let scale_tol = opts.enclosure_rel_tol * (1.0 + decomp_a.spectral_radius() + split.norm_v);
    if enclosure.max_excess > scale_tol {
        violations.push(Violation {
            check: CheckKind::Enclosure,
            slack: enclosure.max_excess,
        });
    }
    let resolvent = resolvent_check(&decomp_a, &decomp_av, &split);
    if resolvent.max_intrusion > scale_tol {
        violations.push(Violation {
            check: CheckKind::ResolventInterval,
            slack: resolvent.max_intrusion,
        });
    }

    let mut separation = None;
    let mut angles = None;
    if gap_ok {
        match perturbed_component(&decomp_av, &partition, &split) {
            Ok(sep) if sep.omega_indices.len() == partition.sigma_indices.len() => {
                let p = spectral_projector(&decomp_a, &partition.sigma_indices)?;
                let q = spectral_projector(&decomp_av, &sep.omega_indices)?;
                angles = Some(measure_angles(&p, &q)?);
                separation = Some(sep);
            }
            Ok(sep) => violations.push(Violation {
                check: CheckKind::OmegaAssignment,
                slack: sep.omega_indices.len().abs_diff(partition.sigma_indices.len()) as f64,
            }),
            Err(crate::Error::EnclosureViolation { excess, .. }) => violations.push(Violation {
                check: CheckKind::OmegaAssignment,
                slack: excess,
            }),
            Err(e) => return Err(e),
        }
    }

    let measured_angle = angles.as_ref().map(|m| m.max_angle);
    let angle_check = |bound: Result<f64>| match (bound, measured_angle) {
        (Ok(b), Some(m)) => BoundCheck::new(b, m),
        _ => BoundCheck::inapplicable(),
    };

    let favgeom = if favourable {
        angle_check(favgeom_bound(np, nm, d))
    } else {
        BoundCheck::inapplicable()
    };
    let generic = angle_check(generic_bound(np, nm, d));
    let half_arcsin = if sum <= 2.0 * d / PI {
        angle_check(corollary_half_arcsin_bound(np, nm, d))
    } else {
        BoundCheck::inapplicable()
    };
    let integral_full = integral_bound(np, nm, d);
    let integral = angle_check(integral_full.clone().map(|b| b.value));

    let (sin2_theta, sin2_theta_estimate) = match &angles {
        Some(m) => {
            let bound = sin2_theta_bound(np, nm, d, favourable)?;
            (
                BoundCheck::new(bound, m.sin2_theta_norm),
                BoundCheck::new(bound, m.sin_double_max_angle()),
            )
        }
        None => (BoundCheck::inapplicable(), BoundCheck::inapplicable()),
    };

    for (check, bc) in [
        (CheckKind::FavourableAngle, &favgeom),
        (CheckKind::GenericAngle, &generic),
        (CheckKind::CorollaryAngle, &half_arcsin),
        (CheckKind::IntegralAngle, &integral),
        (CheckKind::Sin2ThetaNorm, &sin2_theta),
        (CheckKind::Sin2ThetaEstimate, &sin2_theta_estimate),
    ] {
        if let Some(slack) = bc.slack {
            if slack > opts.angle_tol {
                violations.push(Violation { check, slack });
            }
        }
    }
    if let Some(m) = &angles {
        let slack = m.sin_double_max_angle() - m.sin2_theta_norm;
        if slack > opts.ordering_tol {
            violations.push(Violation {
                check: CheckKind::DoubleAngleOrdering,
                slack,
            });
        }
    }
    if let Some(sep) = &separation {
        let slack = sep.gap_lower_bound - sep.measured_gap;
        if slack > opts.gap_tol {
            violations.push(Violation {
                check: CheckKind::GapLowerBound,
                slack,
            });
        }
    }

    let report = BoundReport {
        gap: d,
        norm_plus: np,
        norm_minus: nm,
        norm_v: split.norm_v,
        gap_condition: gap_ok,
        geometry,
        measured_angle,
        favgeom,
        generic,
        half_arcsin,
        integral,
        integral_below_threshold: integral_full.ok().map(|b| b.below_threshold),
        sin2_theta,
        sin2_theta_estimate,
        gap_lower_bound: separation.as_ref().map(|s| s.gap_lower_bound),
        measured_gap: separation.as_ref().map(|s| s.measured_gap),
        enclosure,
        resolvent,
        violations,
    };
    Ok(Analysis {
        report,
        partition,
        separation,
        angles,
    })
}
