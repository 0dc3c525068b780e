//! CSV and JSON schemas.
//!
//! CSV files open with `#` comment lines carrying the run configuration;
//! JSON documents carry `schema_version = 1`. Floats are written in shortest
//! round-trip form, so reading a file back reproduces every value bit for bit.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::{Source, SurvivalSeries};
use crate::pole_solver::{Pole, PoleSet};
use crate::resonant_basis::ResonantBasis;
use crate::singularity::{PoleTrajectory, Singularity};

pub const SCHEMA_VERSION: u32 = 1;

/// Ordered `key = value` pairs describing how a file was produced.
pub type Config = Vec<(String, String)>;

const IM_K_NOTE: &str = "im_k is Im k with k = alpha - i*beta, so proper poles carry im_k = -beta < 0";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleRecord {
    pub index: i32,
    pub re_k: f64,
    pub im_k: f64,
    /// Empty for improper poles.
    pub resonance_position: Option<f64>,
    pub width: Option<f64>,
}

impl From<&Pole> for PoleRecord {
    fn from(p: &Pole) -> Self {
        let proper = p.is_proper();
        Self {
            index: p.index,
            re_k: p.k.re,
            im_k: p.k.im,
            resonance_position: proper.then(|| p.resonance_position()),
            width: proper.then(|| p.width()),
        }
    }
}

/// Improper poles first (`−1, −2, …`), then proper (`1, 2, …`).
pub fn pole_records(set: &PoleSet) -> Vec<PoleRecord> {
    set.improper.iter().chain(&set.proper).map(PoleRecord::from).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub index: i32,
    pub re_k: f64,
    pub im_k: f64,
    pub resonance_position: Option<f64>,
    pub width: Option<f64>,
    #[serde(rename = "re_A")]
    pub re_a: f64,
    #[serde(rename = "im_A")]
    pub im_a: f64,
}

pub fn state_records(basis: &ResonantBasis) -> Vec<StateRecord> {
    basis
        .improper
        .iter()
        .chain(&basis.proper)
        .map(|s| {
            let p = PoleRecord::from(&s.pole);
            StateRecord {
                index: p.index,
                re_k: p.re_k,
                im_k: p.im_k,
                resonance_position: p.resonance_position,
                width: p.width,
                re_a: s.amplitude.re,
                im_a: s.amplitude.im,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct SurvivalRow {
    pub t: f64,
    pub t_over_tau: f64,
    pub re_A: f64,
    pub im_A: f64,
    pub S: f64,
    pub S_exp_only: f64,
    pub S_tail_only: f64,
}

/// A survival row followed by the oracle amplitude at the same time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ComparedSurvivalRow {
    pub t: f64,
    pub t_over_tau: f64,
    pub re_A: f64,
    pub im_A: f64,
    pub S: f64,
    pub S_exp_only: f64,
    pub S_tail_only: f64,
    pub re_A_oracle: f64,
    pub im_A_oracle: f64,
    pub S_oracle: f64,
}

pub fn survival_rows(series: &SurvivalSeries) -> Vec<SurvivalRow> {
    (0..series.len())
        .map(|i| {
            let a = series.amplitude[i];
            SurvivalRow {
                t: series.t[i],
                t_over_tau: series.t[i] / series.tau,
                re_A: a.re,
                im_A: a.im,
                S: a.norm_sqr(),
                S_exp_only: series.exponential[i].norm_sqr(),
                S_tail_only: series.tail[i].norm_sqr(),
            }
        })
        .collect()
}

/// Rows pairing an expansion series with an oracle series on the same grid.
pub fn compared_rows(series: &SurvivalSeries, oracle: &SurvivalSeries) -> Result<Vec<ComparedSurvivalRow>> {
    if series.t != oracle.t {
        return Err(Error::domain("expansion and oracle series use different time grids"));
    }
    Ok(survival_rows(series)
        .into_iter()
        .zip(&oracle.amplitude)
        .map(|(r, o)| ComparedSurvivalRow {
            t: r.t,
            t_over_tau: r.t_over_tau,
            re_A: r.re_A,
            im_A: r.im_A,
            S: r.S,
            S_exp_only: r.S_exp_only,
            S_tail_only: r.S_tail_only,
            re_A_oracle: o.re,
            im_A_oracle: o.im,
            S_oracle: o.norm_sqr(),
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub b: f64,
    pub re_k: f64,
    pub im_k: f64,
    pub family: i32,
}

pub fn trajectory_rows(traj: &PoleTrajectory) -> Vec<TrajectoryRow> {
    traj.samples
        .iter()
        .map(|s| TrajectoryRow {
            b: s.b,
            re_k: s.k.re,
            im_k: s.k.im,
            family: traj.family,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub pole_equation: f64,
    pub jost: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub family: i32,
    pub b_star: f64,
    pub k_star: ComplexValue,
    pub residuals: Residuals,
}

impl From<&Singularity> for SingularityReport {
    fn from(s: &Singularity) -> Self {
        Self {
            family: s.family,
            b_star: s.b_star,
            k_star: ComplexValue {
                re: s.k_star.re,
                im: s.k_star.im,
            },
            residuals: Residuals {
                pole_equation: s.pole_residual,
                jost: s.jost_residual,
            },
        }
    }
}

/// Envelope shared by every JSON output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Source>,
    pub config: BTreeMap<String, String>,
    pub data: T,
}

impl<T> Document<T> {
    pub fn new(config: &Config, source: Option<Source>, data: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            source,
            config: config.iter().cloned().collect(),
            data,
        }
    }
}

fn write_header<W: Write>(w: &mut W, config: &Config, notes: &[&str]) -> Result<()> {
    writeln!(w, "# schema_version = {SCHEMA_VERSION}")?;
    for (k, v) in config {
        writeln!(w, "# {k} = {v}")?;
    }
    for n in notes {
        writeln!(w, "# {n}")?;
    }
    Ok(())
}

/// Write `rows` as CSV after `#` lines for `config` and `notes`.
pub fn write_csv<W: Write, T: Serialize>(mut w: W, config: &Config, notes: &[&str], rows: &[T]) -> Result<()> {
    write_header(&mut w, config, notes)?;
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Read CSV rows, skipping `#` lines.
pub fn read_csv<R: Read, T: DeserializeOwned>(r: R) -> Result<Vec<T>> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    rd.deserialize().map(|x| x.map_err(Error::from)).collect()
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, doc: &Document<T>) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, doc)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_json<R: Read, T: DeserializeOwned>(r: R) -> Result<Document<T>> {
    let doc: Document<T> = serde_json::from_reader(r)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::domain(format!("unsupported schema_version {}", doc.schema_version)));
    }
    Ok(doc)
}

pub fn write_poles_csv<W: Write>(w: W, config: &Config, set: &PoleSet) -> Result<()> {
    write_csv(w, config, &[IM_K_NOTE], &pole_records(set))
}

pub fn write_states_csv<W: Write>(w: W, config: &Config, basis: &ResonantBasis) -> Result<()> {
    write_csv(w, config, &[IM_K_NOTE], &state_records(basis))
}
