//! Report documents and the fixed-precision JSON writer.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use specpert_core::harness::{
    analyze_instance, AngleMeasurement, BoundReport, GeometryKind, VerifyOptions,
};
use specpert_core::PerturbedSeparation;

use crate::error::CliResult;
use crate::problem::{ProblemFile, FORMAT_VERSION};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub format_version: u32,
    pub tool_version: String,
    /// Hex SHA-256 of the input bytes.
    pub input_sha256: String,
    pub problem: ProblemFile,
    pub options: VerifyOptions,
    pub geometry: GeometryKind,
    pub report: BoundReport,
    pub angles: Option<AngleMeasurement>,
    pub separation: Option<PerturbedSeparation>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl ReportFile {
    /// Runs the verification pipeline on `problem`. `input` is the document
    /// the problem was read from and is only hashed.
    pub fn build(problem: ProblemFile, input: &[u8], options: VerifyOptions) -> CliResult<Self> {
        let inst = problem.to_instance("input")?;
        let analysis = analyze_instance(&inst, &options)?;
        Ok(Self {
            format_version: FORMAT_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            input_sha256: sha256_hex(input),
            problem,
            options,
            geometry: analysis.report.geometry,
            report: analysis.report,
            angles: analysis.angles,
            separation: analysis.separation,
        })
    }

    /// Report for a problem that was generated rather than read; the digest
    /// covers its canonical serialization.
    pub fn build_generated(problem: ProblemFile, options: VerifyOptions) -> CliResult<Self> {
        let canonical = to_json(&problem)?;
        Self::build(problem, canonical.as_bytes(), options)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Re-runs the pipeline on the embedded problem with the recorded options.
    pub fn reverify(&self) -> CliResult<BoundReport> {
        let inst = self.problem.to_instance("input")?;
        Ok(analyze_instance(&inst, &self.options)?.report)
    }
}

/// Pretty JSON in which every float carries 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let tree = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &tree, 0);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) if !n.is_f64() => write!(out, "{u}").unwrap(),
            (_, Some(i), _) if !n.is_f64() => write!(out, "{i}").unwrap(),
            (_, _, Some(f)) => write!(out, "{f:.16e}").unwrap(),
            _ => out.push_str(&n.to_string()),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            // Rows of numbers stay on one line.
            if items.iter().all(|x| x.is_number()) {
                out.push('[');
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, depth);
                }
                out.push(']');
                return;
            }
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (k, x) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, x, depth + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, x)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, depth + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}
