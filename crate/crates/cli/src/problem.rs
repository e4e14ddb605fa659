//! The JSON problem format.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "a": { "n": 2, "real": [[0.5, 0.0], [0.0, -0.5]] },
//!   "v": { "n": 2, "real": [[0.0, 0.1], [0.1, 0.0]], "imag": [[0.0, 0.0], [0.0, 0.0]] },
//!   "sigma": [[0.25, 0.75]]
//! }
//! ```

use serde::{Deserialize, Serialize};

use specpert_core::harness::Instance;
use specpert_core::{HermitianMatrix, Interval};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

/// A dense `n × n` matrix given by its real and (optional) imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixBlock {
    pub n: usize,
    pub real: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imag: Option<Vec<Vec<f64>>>,
}

impl MatrixBlock {
    pub fn from_matrix(m: &HermitianMatrix) -> Self {
        let n = m.dim();
        let e = m.entries();
        let real = (0..n).map(|i| (0..n).map(|j| e[(i, j)].re).collect()).collect();
        let imag: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| e[(i, j)].im).collect()).collect();
        let has_imag = imag.iter().flatten().any(|&x| x != 0.0);
        Self {
            n,
            real,
            imag: has_imag.then_some(imag),
        }
    }

    fn check_shape(&self, name: &str, rows: &[Vec<f64>], part: &str) -> CliResult<()> {
        if rows.len() != self.n {
            return Err(CliError::Invalid(format!(
                "{name}.{part}: expected {} rows, found {}",
                self.n,
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != self.n {
                return Err(CliError::Invalid(format!(
                    "{name}.{part}[{i}]: expected {} entries, found {}",
                    self.n,
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|x| !x.is_finite()) {
                return Err(CliError::Invalid(format!("{name}.{part}[{i}][{j}] is not finite")));
            }
        }
        Ok(())
    }

    pub fn to_matrix(&self, name: &str) -> CliResult<HermitianMatrix> {
        if self.n == 0 {
            return Err(CliError::Invalid(format!("{name}.n must be at least 1")));
        }
        self.check_shape(name, &self.real, "real")?;
        if let Some(im) = &self.imag {
            self.check_shape(name, im, "imag")?;
        }
        HermitianMatrix::from_rows(&self.real, self.imag.as_deref())
            .map_err(|e| CliError::Invalid(format!("{name}: {e}")))
    }
}

/// A problem `(A, V, sigma)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub format_version: u32,
    pub a: MatrixBlock,
    pub v: MatrixBlock,
    /// Closed intervals `[lo, hi]`, sorted and disjoint, whose union selects
    /// `sigma` from the spectrum of `a`.
    pub sigma: Vec<[f64; 2]>,
}

impl ProblemFile {
    pub fn from_instance(inst: &Instance) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            a: MatrixBlock::from_matrix(&inst.a),
            v: MatrixBlock::from_matrix(&inst.v),
            sigma: inst.sigma_spec.iter().map(|iv| [iv.lo, iv.hi]).collect(),
        }
    }

    /// Parses and validates a problem document.
    pub fn parse(text: &str) -> CliResult<Self> {
        let problem: ProblemFile = serde_json::from_str(text)?;
        problem.to_instance("input")?;
        Ok(problem)
    }

    pub fn to_instance(&self, label: &str) -> CliResult<Instance> {
        if self.format_version != FORMAT_VERSION {
            return Err(CliError::Invalid(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        let a = self.a.to_matrix("a")?;
        let v = self.v.to_matrix("v")?;
        if a.dim() != v.dim() {
            return Err(CliError::Invalid(format!(
                "a is {0}x{0} but v is {1}x{1}",
                a.dim(),
                v.dim()
            )));
        }
        if self.sigma.is_empty() {
            return Err(CliError::Invalid("sigma: at least one interval is required".into()));
        }
        let mut sigma_spec = Vec::with_capacity(self.sigma.len());
        for (k, &[lo, hi]) in self.sigma.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(CliError::Invalid(format!("sigma[{k}] is not finite")));
            }
            let iv = Interval::new(lo, hi).map_err(|e| CliError::Invalid(format!("sigma[{k}]: {e}")))?;
            if let Some(prev) = sigma_spec.last() {
                let prev: &Interval = prev;
                if !(prev.hi < iv.lo) {
                    return Err(CliError::Invalid(format!(
                        "sigma[{k}] must start after sigma[{}] ends; intervals must be sorted and disjoint",
                        k - 1
                    )));
                }
            }
            sigma_spec.push(iv);
        }
        Ok(Instance {
            a,
            v,
            sigma_spec,
            seed: 0,
            label: label.to_string(),
        })
    }
}
