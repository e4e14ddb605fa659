//! Seeded fuzz campaigns over random instances.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use specpert_core::harness::{
    derive_seed, random_instance, BoundReport, CheckKind, GapSpec, Instance, Layout,
    VerifyOptions,
};

use crate::error::{CliError, CliResult};
use crate::problem::ProblemFile;
use crate::report::{to_json, ReportFile};

/// Which spectral layouts a campaign draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum LayoutChoice {
    Clustered,
    Interlaced,
    /// Each instance picks one; interlaced needs `n >= 4`.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub n: usize,
    pub count: u64,
    pub scale: f64,
    pub seed: u64,
    pub layout: LayoutChoice,
    pub gap: f64,
}

/// Totals over a campaign. Independent of how many workers produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub config: FuzzConfig,
    pub checked: u64,
    pub gap_condition_held: u64,
    pub favourable: u64,
    pub applicable: BTreeMap<CheckKind, u64>,
    pub violations: BTreeMap<CheckKind, u64>,
    /// Largest `measured - bound` per bound check.
    pub max_slack: BTreeMap<CheckKind, f64>,
    pub max_measured_angle: f64,
    /// Indices of instances with at least one violation.
    pub violating_instances: Vec<u64>,
}

impl FuzzSummary {
    pub fn total_violations(&self) -> u64 {
        self.violations.values().sum()
    }
}

impl FuzzConfig {
    fn validate(&self) -> CliResult<()> {
        let invalid = |msg: String| Err(CliError::Core(specpert_core::Error::InvalidSpec(msg)));
        if self.n < 2 {
            return invalid(format!("n = {} must be at least 2", self.n));
        }
        if self.count < 1 {
            return invalid("count must be at least 1".into());
        }
        if !(self.scale >= 0.0 && self.scale.is_finite()) {
            return invalid(format!("scale = {} must be finite and >= 0", self.scale));
        }
        if !(self.gap > 0.0 && self.gap.is_finite()) {
            return invalid(format!("gap = {} must be positive", self.gap));
        }
        if self.layout == LayoutChoice::Interlaced && self.n < 4 {
            return invalid("interlaced layout needs n >= 4".into());
        }
        Ok(())
    }

    /// Instance `index` of the campaign; a pure function of the config and
    /// the index.
    pub fn instance(&self, index: u64) -> CliResult<Instance> {
        let s = derive_seed(self.seed, index);
        let interlaced = match self.layout {
            LayoutChoice::Clustered => false,
            LayoutChoice::Interlaced => true,
            LayoutChoice::Mixed => self.n >= 4 && s & 1 == 1,
        };
        let pick = (s >> 1) as usize;
        let (layout, split) = if interlaced {
            (Layout::Interlaced, 2 + pick % (self.n - 3))
        } else {
            (Layout::Clustered, 1 + pick % (self.n - 1))
        };
        let gap = GapSpec {
            d_target: self.gap,
            component_split: split,
            layout,
        };
        let mut inst = random_instance(self.n, &gap, self.scale, s)?;
        inst.label = format!("{index}: {}", inst.label);
        Ok(inst)
    }
}

/// Runs the campaign on the current rayon pool. With `out`, writes one
/// report per instance as `instance-<index>.json`.
pub fn run_fuzz(config: &FuzzConfig, out: Option<&Path>) -> CliResult<FuzzSummary> {
    config.validate()?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    let opts = VerifyOptions::default();
    let reports: Vec<BoundReport> = (0..config.count)
        .into_par_iter()
        .map(|i| -> CliResult<BoundReport> {
            let inst = config.instance(i)?;
            let problem = ProblemFile::from_instance(&inst);
            let file = ReportFile::build_generated(problem, opts)?;
            if let Some(dir) = out {
                let path = dir.join(format!("instance-{i:06}.json"));
                std::fs::write(&path, to_json(&file)?).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
            }
            Ok(file.report)
        })
        .collect::<CliResult<_>>()?;
    Ok(summarize(config, &reports))
}

fn summarize(config: &FuzzConfig, reports: &[BoundReport]) -> FuzzSummary {
    let mut summary = FuzzSummary {
        config: config.clone(),
        checked: reports.len() as u64,
        gap_condition_held: 0,
        favourable: 0,
        applicable: BTreeMap::new(),
        violations: BTreeMap::new(),
        max_slack: BTreeMap::new(),
        max_measured_angle: 0.0,
        violating_instances: Vec::new(),
    };
    for (i, r) in reports.iter().enumerate() {
        summary.gap_condition_held += u64::from(r.gap_condition);
        summary.favourable += u64::from(r.geometry.is_favourable());
        if let Some(a) = r.measured_angle {
            summary.max_measured_angle = summary.max_measured_angle.max(a);
        }
        for (kind, check) in r.bound_checks() {
            if check.applicable {
                *summary.applicable.entry(kind).or_default() += 1;
            }
            if let Some(s) = check.slack {
                let m = summary.max_slack.entry(kind).or_insert(f64::NEG_INFINITY);
                *m = m.max(s);
            }
        }
        for v in &r.violations {
            *summary.violations.entry(v.check).or_default() += 1;
        }
        if !r.violations.is_empty() {
            summary.violating_instances.push(i as u64);
        }
    }
    summary
}
