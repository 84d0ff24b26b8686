//! Bundled empirical replication data and the reports comparing it with the
//! closed-form predictions.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::normal::{standard_normal_quantile, Probability, ZScore};
use crate::replication::{self, DEFAULT_P3};

pub const TABLE1_CSV: &str = include_str!("../assets/table1_cochrane.csv");
pub const TABLE1_SHA256: &str = "4d587febc70edc90e54641880a7357887d8bf8284bf81e9c1551131e78bfbcde";
pub const OSC_CSV: &str = include_str!("../assets/osc_summary.csv");
pub const OSC_SHA256: &str = "37b4e275984e8d1241b740c8c85708c5bc61a03ee217d0fd10559a92c45cc8ea";

/// Half-up rounding to `decimals` places, applied only when reporting.
pub fn round_half_up(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (x * scale + 0.5).floor() / scale
}

fn round3(x: f64) -> f64 {
    round_half_up(x, 3)
}

/// One row of the observed-frequency table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRow {
    pub p_two_sided: f64,
    pub cochrane: f64,
    pub goodman: f64,
}

impl EmpiricalRow {
    pub fn p1(&self) -> Probability {
        Probability::two_sided(self.p_two_sided).expect("validated on load")
    }
}

pub fn verify_checksum(bytes: &[u8], expected: &str) -> Result<()> {
    let found = format!("{:x}", Sha256::digest(bytes));
    if found != expected {
        return Err(Error::Checksum {
            expected: expected.to_string(),
            found,
        });
    }
    Ok(())
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn unit(name: &str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::Dataset(format!("{name} = {v} is not a probability")))
    }
}

/// Parses and validates rows; P values must strictly decrease.
pub fn parse_empirical(text: &str) -> Result<Vec<EmpiricalRow>> {
    let mut rows = Vec::new();
    for rec in reader(text).deserialize::<EmpiricalRow>() {
        let row = rec.map_err(|e| Error::Dataset(e.to_string()))?;
        unit("p_two_sided", row.p_two_sided)?;
        unit("cochrane", row.cochrane)?;
        unit("goodman", row.goodman)?;
        if let Some(prev) = rows.last().map(|r: &EmpiricalRow| r.p_two_sided) {
            if row.p_two_sided >= prev {
                return Err(Error::Dataset(format!(
                    "P values must decrease down the table ({} after {prev})",
                    row.p_two_sided
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Dataset("no rows".into()));
    }
    Ok(rows)
}

/// The bundled table, checksum-verified.
pub fn load_empirical() -> Result<Vec<EmpiricalRow>> {
    verify_checksum(TABLE1_CSV.as_bytes(), TABLE1_SHA256)?;
    parse_empirical(TABLE1_CSV)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub p_two_sided: f64,
    pub cochrane: f64,
    pub goodman: f64,
    pub predicted_eq5: f64,
    pub predicted_rival: f64,
    pub abs_error_eq5: f64,
    pub abs_error_rival: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub max_abs_error: f64,
    pub mean_abs_error: f64,
}

impl ErrorSummary {
    fn of(errors: impl Iterator<Item = f64> + Clone) -> Self {
        let n = errors.clone().count().max(1) as f64;
        ErrorSummary {
            max_abs_error: errors.clone().fold(0.0, f64::max),
            mean_abs_error: errors.sum::<f64>() / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub eq5: ErrorSummary,
    pub rival: ErrorSummary,
}

impl ComparisonReport {
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()
    }
}

/// Same-size and rival predictions for each row, rounded to 3 dp, with
/// absolute errors against the Cochrane frequencies.
pub fn compare(rows: &[EmpiricalRow]) -> Result<ComparisonReport> {
    let p3 = Probability::one_sided(DEFAULT_P3)?;
    let rows = rows
        .iter()
        .map(|r| {
            let eq5 = round3(replication::prob_replication_from_p(r.p1(), p3)?.value());
            let rival = round3(replication::prob_replication_rival(r.p1())?.value());
            Ok(ComparisonRow {
                p_two_sided: r.p_two_sided,
                cochrane: r.cochrane,
                goodman: r.goodman,
                predicted_eq5: eq5,
                predicted_rival: rival,
                abs_error_eq5: round3((eq5 - r.cochrane).abs()),
                abs_error_rival: round3((rival - r.cochrane).abs()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let eq5 = ErrorSummary::of(rows.iter().map(|r| r.abs_error_eq5));
    let rival = ErrorSummary::of(rows.iter().map(|r| r.abs_error_rival));
    Ok(ComparisonReport { rows, eq5, rival })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct OscRecord {
    mean_p_two_sided: f64,
    replicated: u32,
    studies: u32,
    ci_lo: f64,
    ci_hi: f64,
}

/// The large replication project's observed rate next to the prediction from
/// its mean P value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscPrediction {
    pub mean_p_two_sided: f64,
    pub predicted: f64,
    pub replicated: u32,
    pub studies: u32,
    pub observed: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub predicted_in_ci: bool,
}

pub fn osc_prediction() -> Result<OscPrediction> {
    verify_checksum(OSC_CSV.as_bytes(), OSC_SHA256)?;
    let rec: OscRecord = reader(OSC_CSV)
        .deserialize()
        .next()
        .ok_or_else(|| Error::Dataset("empty summary".into()))?
        .map_err(|e| Error::Dataset(e.to_string()))?;
    let p1 = Probability::two_sided(rec.mean_p_two_sided)?;
    let predicted = replication::prob_replication_from_p(p1, Probability::one_sided(DEFAULT_P3)?)?.value();
    Ok(OscPrediction {
        mean_p_two_sided: rec.mean_p_two_sided,
        predicted,
        replicated: rec.replicated,
        studies: rec.studies,
        observed: f64::from(rec.replicated) / f64::from(rec.studies),
        ci_lo: rec.ci_lo,
        ci_hi: rec.ci_hi,
        predicted_in_ci: (rec.ci_lo..=rec.ci_hi).contains(&predicted),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Curve,
    Cochrane,
    Osc,
}

/// A curve sample or an empirical marker, all three predictors evaluated at `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Figure3Row {
    pub kind: RowKind,
    pub z: f64,
    pub eq5: f64,
    pub rival_eq15: f64,
    pub infinite_n2: f64,
    pub empirical: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure3Table {
    pub rows: Vec<Figure3Row>,
}

impl Figure3Table {
    pub fn curve_rows(&self) -> impl Iterator<Item = &Figure3Row> {
        self.rows.iter().filter(|r| r.kind == RowKind::Curve)
    }

    pub fn marker_rows(&self) -> impl Iterator<Item = &Figure3Row> {
        self.rows.iter().filter(|r| r.kind != RowKind::Curve)
    }

    /// Columns `kind,z,eq5,rival_eq15,infinite_n2,empirical`; `empirical` is
    /// empty on curve rows.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()
    }
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Grid `z_lo, z_lo + step, ...` up to `z_hi` (inclusive within rounding).
pub fn z_grid(z_lo: f64, z_hi: f64, step: f64) -> Result<Vec<ZScore>> {
    if !(z_lo.is_finite() && z_hi.is_finite() && step.is_finite()) {
        return Err(Error::NonFinite("grid"));
    }
    if z_lo >= z_hi || step <= 0.0 {
        return Err(Error::OutOfRange {
            name: "grid",
            value: step,
            range: "z_lo < z_hi and step > 0",
        });
    }
    let steps = ((z_hi - z_lo) / step + 1e-9).floor() as usize;
    (0..=steps)
        .map(|i| ZScore::new(((z_lo + i as f64 * step) * 1e12).round() / 1e12))
        .collect()
}

/// Curve samples over the grid followed by one marker per Cochrane row and
/// one for the replication project.
pub fn emit_figure3(z_lo: f64, z_hi: f64, step: f64) -> Result<Figure3Table> {
    let mut points: Vec<(RowKind, ZScore, Option<f64>)> = z_grid(z_lo, z_hi, step)?
        .into_iter()
        .map(|z| (RowKind::Curve, z, None))
        .collect();
    for row in load_empirical()? {
        let z = ZScore::new(-standard_normal_quantile(0.5 * row.p_two_sided))?;
        points.push((RowKind::Cochrane, z, Some(row.cochrane)));
    }
    let osc = osc_prediction()?;
    let z = ZScore::new(-standard_normal_quantile(0.5 * osc.mean_p_two_sided))?;
    points.push((RowKind::Osc, z, Some(osc.observed)));

    let zs: Vec<ZScore> = points.iter().map(|p| p.1).collect();
    let rows = replication::figure3_curves(&zs)
        .into_iter()
        .zip(points)
        .map(|(c, (kind, _, empirical))| Figure3Row {
            kind,
            z: c.z,
            eq5: c.same_size,
            rival_eq15: c.rival,
            infinite_n2: c.infinite_n2,
            empirical,
        })
        .collect();
    Ok(Figure3Table { rows })
}
