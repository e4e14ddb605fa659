//! Scalar bound functions: the piecewise angle bound `N`, its constants
//! `c_crit` and `kappa`, and the closed-form estimates built on them.
//!
//! All angles are in radians. Perturbation strength always enters through
//! `|V+| + |V-|` relative to the spectral gap `d`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod infimum;

pub use infimum::n_via_partition_infimum;

/// Residual target for the memoized `kappa`.
pub const KAPPA_TOL: f64 = 1e-13;

/// `c_crit = 1/2 - (1/2)(1 - sqrt(3)/pi)^3`, the right end of the domain of `N`.
pub fn c_crit() -> f64 {
    0.5 - 0.5 * (1.0 - 3f64.sqrt() / PI).powi(3)
}

/// `4 / (pi^2 + 4)`: end of the first branch of `N`.
pub fn branch_point_1() -> f64 {
    4.0 / (PI * PI + 4.0)
}

/// `4 (pi^2 - 2) / pi^4`: start of the third branch of `N`.
pub fn branch_point_2() -> f64 {
    4.0 * (PI * PI - 2.0) / PI.powi(4)
}

/// `2 (pi - 1) / pi^2`: right end of the bracket in which `kappa` is sought.
pub fn kappa_bracket_upper() -> f64 {
    2.0 * (PI - 1.0) / (PI * PI)
}

/// `2 sinh(1) / e = 1 - e^-2`: largest `(|V+| + |V-|) / d` for which the
/// logarithmic bound stays strictly below `pi/2`.
pub fn integral_threshold() -> f64 {
    2.0 * 1f64.sinh() / 1f64.exp()
}

/// One of the four closed-form pieces of `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    One = 1,
    Two = 2,
    Three = 3,
    Four = 4,
}

impl Branch {
    pub fn number(self) -> u8 {
        self as u8
    }

    /// Evaluates this branch's formula at `x`, ignoring the branch's range.
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Branch::One => 0.5 * clamped_asin(PI * x),
            Branch::Two => {
                let arg = (2.0 * PI * PI * x - 4.0) / (PI * PI - 4.0);
                clamped_asin(arg.max(0.0).sqrt())
            }
            Branch::Three => clamped_asin(FRAC_PI_2 * (1.0 - (1.0 - 2.0 * x).sqrt())),
            Branch::Four => 1.5 * clamped_asin(FRAC_PI_2 * (1.0 - (1.0 - 2.0 * x).cbrt())),
        }
    }
}

fn clamped_asin(x: f64) -> f64 {
    x.clamp(-1.0, 1.0).asin()
}

/// Residual of the equation defining `kappa`: branch three minus branch four.
pub fn kappa_residual(x: f64) -> f64 {
    Branch::Three.eval(x) - Branch::Four.eval(x)
}

/// Solves `kappa_residual(k) = 0` by bisection on
/// `(branch_point_2, kappa_bracket_upper]`.
pub fn solve_kappa(tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::DomainError(format!("tolerance {tol} must be positive")));
    }
    let (mut lo, mut hi) = (branch_point_2(), kappa_bracket_upper());
    let (f_lo, f_hi) = (kappa_residual(lo), kappa_residual(hi));
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::BracketFailure { lo, hi, f_lo, f_hi });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if kappa_residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (r_lo, r_hi) = (kappa_residual(lo).abs(), kappa_residual(hi).abs());
    let (root, residual) = if r_lo <= r_hi { (lo, r_lo) } else { (hi, r_hi) };
    if residual > tol {
        return Err(Error::RootTolerance {
            residual,
            tolerance: tol,
        });
    }
    Ok(root)
}

/// `kappa`, solved once to [`KAPPA_TOL`].
pub fn kappa() -> f64 {
    static KAPPA: OnceLock<f64> = OnceLock::new();
    *KAPPA.get_or_init(|| solve_kappa(KAPPA_TOL).expect("kappa bracket is valid"))
}

/// Every constant attached to `N`, gathered in one place.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub c_crit: f64,
    pub kappa: f64,
    pub branch_points: [f64; 3],
    /// Upper limit `2 c_crit` for `(|V+| + |V-|) / d` in the generic bound.
    pub upper_validity: f64,
    pub integral_threshold: f64,
}

pub fn constants() -> BoundConstants {
    let kappa = kappa();
    BoundConstants {
        c_crit: c_crit(),
        kappa,
        branch_points: [branch_point_1(), branch_point_2(), kappa],
        upper_validity: 2.0 * c_crit(),
        integral_threshold: integral_threshold(),
    }
}

/// Which branch of `N` covers `x`. Requires `0 <= x <= c_crit`.
pub fn branch_of(x: f64) -> Result<Branch> {
    if !(0.0..=c_crit()).contains(&x) {
        return Err(Error::DomainError(format!(
            "N is defined on [0, c_crit], got x = {x}"
        )));
    }
    Ok(if x <= branch_point_1() {
        Branch::One
    } else if x < branch_point_2() {
        Branch::Two
    } else if x <= kappa() {
        Branch::Three
    } else {
        Branch::Four
    })
}

/// The piecewise bound function `N: [0, c_crit] -> [0, pi/2]`.
pub fn bound_n(x: f64) -> Result<f64> {
    Ok(branch_of(x)?.eval(x))
}

/// `(1/2) arcsin((|V+| + |V-|) / d)`, valid when `|V+| + |V-| < d` and the
/// favourable geometry holds.
pub fn favgeom_bound(norm_plus: f64, norm_minus: f64, d: f64) -> Result<f64> {
    let sum = checked_sum(norm_plus, norm_minus, d)?;
    if !(sum < d) {
        return Err(Error::GapConditionViolated { norm_sum: sum, gap: d });
    }
    Ok(0.5 * (sum / d).asin())
}

/// `N((|V+| + |V-|) / (2d))`, valid when `|V+| + |V-| < 2 c_crit d`.
pub fn generic_bound(norm_plus: f64, norm_minus: f64, d: f64) -> Result<f64> {
    let sum = checked_sum(norm_plus, norm_minus, d)?;
    if !(sum < 2.0 * c_crit() * d) {
        return Err(Error::DomainError(format!(
            "|V+| + |V-| = {sum} must be below 2 c_crit d = {}",
            2.0 * c_crit() * d
        )));
    }
    bound_n(sum / (2.0 * d))
}

/// `(1/2) arcsin((pi/2)(|V+| + |V-|) / d)`, valid when `|V+| + |V-| <= 2d/pi`.
pub fn corollary_half_arcsin_bound(norm_plus: f64, norm_minus: f64, d: f64) -> Result<f64> {
    let sum = checked_sum(norm_plus, norm_minus, d)?;
    let arg = FRAC_PI_2 * sum / d;
    // arcsin is not Lipschitz at 1, so a sum of exactly 2d/pi that picked up
    // round-off in the product is snapped to the endpoint.
    if (arg - 1.0).abs() <= 4.0 * f64::EPSILON {
        return Ok(FRAC_PI_4);
    }
    if !(arg < 1.0) {
        return Err(Error::DomainError(format!(
            "|V+| + |V-| = {sum} exceeds 2d/pi = {}",
            2.0 * d / PI
        )));
    }
    Ok(0.5 * arg.asin())
}

/// Bound on `|sin 2Theta|`: `(pi/2)(|V+| + |V-|) / d`, with constant 1 instead
/// of `pi/2` under favourable geometry.
pub fn sin2_theta_bound(norm_plus: f64, norm_minus: f64, d: f64, favourable: bool) -> Result<f64> {
    let sum = checked_sum(norm_plus, norm_minus, d)?;
    let constant = if favourable { 1.0 } else { FRAC_PI_2 };
    Ok(constant * sum / d)
}

/// Bound on `|E_{A+sV}(omega_s) - E_{A+tV}(omega_t)|` for `0 <= s <= t <= 1`:
/// `(pi/2) |t - s| |V| / (d - t (|V+| + |V-|))`.
pub fn path_step_bound(
    s: f64,
    t: f64,
    norm_v: f64,
    norm_plus: f64,
    norm_minus: f64,
    d: f64,
) -> Result<f64> {
    if !(0.0 <= s && s <= t && t <= 1.0) {
        return Err(Error::DomainError(format!(
            "need 0 <= s <= t <= 1, got s = {s}, t = {t}"
        )));
    }
    let sum = checked_sum(norm_plus, norm_minus, d)?;
    let denominator = d - t * sum;
    if !(denominator > 0.0) {
        return Err(Error::DomainError(format!(
            "d - t(|V+| + |V-|) = {denominator} must be positive"
        )));
    }
    Ok(FRAC_PI_2 * (t - s) * norm_v / denominator)
}

/// The logarithmic bound from integrating the path estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralBound {
    /// `(pi/4) log(d / (d - |V+| - |V-|))`.
    pub value: f64,
    /// Whether `(|V+| + |V-|) / d <= 2 sinh(1) / e`.
    pub below_threshold: bool,
}

pub fn integral_bound(norm_plus: f64, norm_minus: f64, d: f64) -> Result<IntegralBound> {
    let sum = checked_sum(norm_plus, norm_minus, d)?;
    if !(sum < d) {
        return Err(Error::GapConditionViolated { norm_sum: sum, gap: d });
    }
    let ratio = sum / d;
    Ok(IntegralBound {
        value: -FRAC_PI_4 * (-ratio).ln_1p(),
        below_threshold: ratio <= integral_threshold(),
    })
}

fn checked_sum(norm_plus: f64, norm_minus: f64, d: f64) -> Result<f64> {
    if !(norm_plus >= 0.0 && norm_minus >= 0.0) {
        return Err(Error::DomainError(format!(
            "norms must be nonnegative, got ({norm_plus}, {norm_minus})"
        )));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::DomainError(format!("gap d = {d} must be positive")));
    }
    Ok(norm_plus + norm_minus)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    // Reference values computed independently with 40-digit mpmath.
    const C_CRIT_REF: f64 = 0.454_839_961_132_706_05;
    const KAPPA_REF: f64 = 0.409_862_308_769_886_61;
    const N_REF: [(f64, f64); 6] = [
        (0.1, 0.159_785_476_653_629_86),
        (0.2, 0.339_694_963_375_475_45),
        (0.3, 0.609_182_056_790_688_77),
        (0.35, 0.790_117_181_745_692_94),
        (0.4, 1.051_794_770_116_548_1),
        (0.45, 1.500_628_389_320_504_2),
    ];

    #[test]
    fn c_crit_value() {
        assert!((c_crit() - C_CRIT_REF).abs() < 1e-15);
        assert!((c_crit() - 0.454_839_9).abs() < 1e-7);
        assert!(0.0 < c_crit() && c_crit() < 0.5);
    }

    #[test]
    fn kappa_matches_reference_and_bracket() {
        let k = solve_kappa(1e-13).unwrap();
        assert!((k - KAPPA_REF).abs() < 1e-12);
        assert!(branch_point_2() < k && k < kappa_bracket_upper());
        assert!(kappa_residual(k).abs() <= 1e-13);
        assert!((Branch::Three.eval(k) - Branch::Four.eval(k)).abs() <= 1e-10);
        assert_eq!(kappa(), kappa());
        assert!(solve_kappa(0.0).is_err());
    }

    #[test]
    fn n_matches_reference() {
        for (x, want) in N_REF {
            assert!((bound_n(x).unwrap() - want).abs() < 1e-13, "N({x})");
        }
    }

    #[test]
    fn n_endpoints() {
        assert_eq!(bound_n(0.0).unwrap(), 0.0);
        assert!((bound_n(c_crit()).unwrap() - FRAC_PI_2).abs() < 1e-12);
        assert_eq!(branch_of(c_crit()).unwrap(), Branch::Four);
        assert!(bound_n(-1e-9).is_err());
        assert!(bound_n(c_crit() + 1e-9).is_err());
    }

    #[test]
    fn n_continuous_at_branch_points() {
        let pairs = [
            (branch_point_1(), Branch::One, Branch::Two),
            (branch_point_2(), Branch::Two, Branch::Three),
            (kappa(), Branch::Three, Branch::Four),
        ];
        for (x, left, right) in pairs {
            assert!((left.eval(x) - right.eval(x)).abs() <= 1e-9, "{left:?}/{right:?} at {x}");
        }
        assert_eq!(branch_of(branch_point_1()).unwrap(), Branch::One);
        assert_eq!(branch_of(branch_point_2()).unwrap(), Branch::Three);
        assert_eq!(branch_of(kappa()).unwrap(), Branch::Three);
    }

    #[test]
    fn favgeom_examples() {
        assert_eq!(favgeom_bound(0.0, 0.0, 2.0).unwrap(), 0.0);
        assert!((favgeom_bound(0.25, 0.25, 1.0).unwrap() - PI / 12.0).abs() < 1e-15);
        assert!(matches!(
            favgeom_bound(0.5, 0.5, 1.0),
            Err(Error::GapConditionViolated { .. })
        ));
        assert!(favgeom_bound(0.5, 0.4999999, 1.0).unwrap() < FRAC_PI_4);
    }

    #[test]
    fn generic_examples() {
        assert_eq!(generic_bound(0.0, 0.0, 1.0).unwrap(), 0.0);
        let top = 2.0 * c_crit();
        let near = generic_bound(top * (1.0 - 1e-12), 0.0, 1.0).unwrap();
        assert!(near < FRAC_PI_2 && FRAC_PI_2 - near < 1e-4);
        assert!(generic_bound(top, 0.0, 1.0).is_err());
        // First branch coincides with the half-arcsin corollary.
        for sum in [0.05, 0.2, 0.5] {
            let g = generic_bound(sum / 2.0, sum / 2.0, 1.0).unwrap();
            let c = corollary_half_arcsin_bound(sum / 2.0, sum / 2.0, 1.0).unwrap();
            assert!((g - c).abs() < 1e-15);
        }
    }

    #[test]
    fn corollary_examples() {
        assert_eq!(corollary_half_arcsin_bound(0.0, 0.0, 1.0).unwrap(), 0.0);
        let d = 3.0;
        assert_eq!(corollary_half_arcsin_bound(2.0 * d / PI, 0.0, d).unwrap(), FRAC_PI_4);
        assert!((corollary_half_arcsin_bound(0.0, d / PI, d).unwrap() - PI / 12.0).abs() < 1e-15);
        assert!(corollary_half_arcsin_bound(0.7, 0.0, 1.0).is_err());
    }

    #[test]
    fn sin2_theta_examples() {
        assert_eq!(sin2_theta_bound(0.0, 0.0, 1.0, true).unwrap(), 0.0);
        assert_eq!(sin2_theta_bound(0.25, 0.25, 1.0, true).unwrap(), 0.5);
        assert_eq!(sin2_theta_bound(0.25, 0.25, 1.0, false).unwrap(), FRAC_PI_4);
        assert!(sin2_theta_bound(0.1, 0.1, 0.0, false).is_err());
    }

    #[test]
    fn path_step_examples() {
        assert_eq!(path_step_bound(0.3, 0.3, 1.0, 0.2, 0.2, 1.0).unwrap(), 0.0);
        let b = path_step_bound(0.0, 1.0, 0.3, 0.25, 0.25, 1.0).unwrap();
        assert!((b - 0.3 * PI).abs() < 1e-15);
        assert!(path_step_bound(0.0, 1.0, 1.0, 0.5, 0.5, 1.0).is_err());
        assert!(path_step_bound(0.6, 0.5, 1.0, 0.1, 0.1, 1.0).is_err());
        let short = path_step_bound(0.2, 0.3, 0.5, 0.2, 0.2, 1.0).unwrap();
        let long = path_step_bound(0.1, 0.3, 0.5, 0.2, 0.2, 1.0).unwrap();
        assert!(short < long);
    }

    #[test]
    fn integral_examples() {
        let zero = integral_bound(0.0, 0.0, 1.0).unwrap();
        assert_eq!(zero.value, 0.0);
        assert!(zero.below_threshold);
        let edge = 1.0 - (-2f64).exp();
        assert!((integral_threshold() - edge).abs() < 1e-15);
        let b = integral_bound(edge, 0.0, 1.0).unwrap();
        assert!((b.value - FRAC_PI_2).abs() < 1e-14);
        assert!(integral_threshold() < 2.0 * c_crit());
        assert!(!integral_bound(0.9, 0.0, 1.0).unwrap().below_threshold);
        assert!(integral_bound(0.6, 0.4, 1.0).is_err());
    }
}
