use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use replicalc::mc::{self, SimConfig, SimMode};
use replicalc::power::{self, PowerSpec};
use replicalc::replication::{self, ReplicationQuery, ReplicationResult, SampleSize};
use replicalc::report;
use replicalc::{
    convolve, discretize_gaussian, DesignKind, Error, Probability, RangeSpec, Sidedness, StudyDesign, TailDirection,
};

use crate::output::{Cell, Format, Output};
use crate::{
    CurvesArgs, DesignArg, DiscretizeArgs, ModeArg, PowerArgs, PrepArgs, SimulateArgs, StudyArgs, TableArgs, N2,
};

/// Failures, each with a stable exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Unreachable(String),
    Io(String),
    Calibration(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Unreachable(_) => 3,
            CliError::Io(_) => 4,
            CliError::Calibration(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Unreachable(m) | CliError::Io(m) | CliError::Calibration(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Attaches the offending flag(s) to a library error.
fn flag(name: &str) -> impl Fn(Error) -> CliError + '_ {
    move |e| match e {
        Error::UnreachableTarget { .. } | Error::UndetectableEffect => CliError::Unreachable(format!("{name}: {e}")),
        _ => CliError::Usage(format!("{name}: {e}")),
    }
}

pub struct Context {
    pub format: Format,
    pub precision: usize,
}

impl Context {
    fn emit(&self, out: &Output) -> Result<()> {
        self.emit_with(out, self.precision)
    }

    fn emit_with(&self, out: &Output, precision: usize) -> Result<()> {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        out.write(&mut lock, self.format, precision)?;
        lock.flush()?;
        Ok(())
    }
}

fn sidedness(two_sided: bool) -> Sidedness {
    if two_sided {
        Sidedness::TwoSided
    } else {
        Sidedness::OneSided
    }
}

fn sample_size(n2: N2) -> Result<SampleSize> {
    match n2 {
        N2::Infinite => Ok(SampleSize::Infinite),
        N2::Finite(n) => SampleSize::finite(n).map_err(flag("--n2")),
    }
}

enum Study {
    Design { design: StudyDesign, n2: SampleSize },
    PValue { p1: Probability, infinite: bool },
}

impl StudyArgs {
    fn p3(&self) -> Result<Probability> {
        Probability::one_sided(self.p3).map_err(flag("--p3"))
    }

    fn resolve(&self) -> Result<Study> {
        if let Some(b) = self.b {
            let (sd, n1) = (
                self.sd.expect("clap requires --sd"),
                self.n1.expect("clap requires --n1"),
            );
            let design = StudyDesign::crossover(b, sd, n1).map_err(flag("--b/--sd/--n1"))?;
            let n2 = sample_size(self.n2.expect("clap requires --n2"))?;
            return Ok(Study::Design { design, n2 });
        }
        let p1 = self.p1.expect("clap requires --b or --p1");
        let p1 = Probability::new(p1, sidedness(self.two_sided)).map_err(flag("--p1"))?;
        let infinite = match self.n2 {
            None => false,
            Some(N2::Infinite) => true,
            Some(N2::Finite(_)) => {
                return Err(CliError::Usage(
                    "--n2: with --p1 the replication has the original's size; only `inf` may be given".into(),
                ))
            }
        };
        Ok(Study::PValue { p1, infinite })
    }
}

fn result_record(r: ReplicationResult) -> Output {
    let formula = serde_json::to_value(r.formula)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default();
    Output::record(vec![
        ("probability", r.value().into()),
        ("formula", Cell::Text(formula)),
    ])
}

pub fn replicate(ctx: &Context, a: &StudyArgs) -> Result<()> {
    let p3 = a.p3()?;
    let r = match a.resolve()? {
        Study::Design { design, n2 } => {
            let q = ReplicationQuery::new(p3, n2).map_err(flag("--p3"))?;
            replication::prob_replication(&design, &q)
        }
        Study::PValue { p1, infinite: true } => {
            replication::prob_replication_infinite_from_p(p1, p3).map_err(flag("--p1/--p3"))?
        }
        Study::PValue { p1, infinite: false } => {
            replication::prob_replication_from_p(p1, p3).map_err(flag("--p1/--p3"))?
        }
    };
    ctx.emit(&result_record(r))
}

pub fn prep(ctx: &Context, a: &PrepArgs) -> Result<()> {
    let p1 = Probability::new(a.p1, sidedness(a.two_sided)).map_err(flag("--p1"))?;
    let r = replication::p_rep(p1, a.infinite).map_err(flag("--p1"))?;
    ctx.emit(&result_record(r))
}

pub fn power(ctx: &Context, a: &PowerArgs) -> Result<()> {
    let alpha = Probability::two_sided(a.alpha).map_err(flag("--alpha"))?;
    let kind = match a.design {
        DesignArg::Crossover => DesignKind::Crossover,
        DesignArg::Parallel => DesignKind::Parallel,
    };
    let parallel = kind == DesignKind::Parallel;
    if let Some(n) = a.n {
        let m = a.multiplicity.unwrap_or(1);
        let spec = PowerSpec::new(a.b, a.sd, alpha, 0.5, m).map_err(flag("--b/--sd"))?;
        let p = if m == 1 {
            power::likelihood_power(n, &spec)
        } else {
            power::predictive_power(n, &spec)
        }
        .map_err(flag("--n"))?;
        let mut fields = vec![
            ("n", Cell::Int(n)),
            ("multiplicity", u64::from(m).into()),
            ("power", p.into()),
        ];
        if parallel {
            fields.push(("parallel_total", power::total_for(kind, n).into()));
        }
        return ctx.emit(&Output::record(fields));
    }
    let (target, m, name) = match (a.target_power, a.target_predictive) {
        (Some(t), _) => (t, 1, "--target-power"),
        (None, Some(t)) => (t, a.multiplicity.unwrap_or(2), "--target-predictive"),
        (None, None) => unreachable!("clap requires a goal"),
    };
    let spec = PowerSpec::new(a.b, a.sd, alpha, target, m).map_err(flag(name))?;
    let n = power::required_n_predictive(&spec).map_err(flag(name))?;
    if n.exact > u64::MAX as f64 / 8.0 {
        return Err(CliError::Unreachable(format!(
            "{name}: required sample size {} is not representable",
            n.exact
        )));
    }
    let mut fields = vec![
        ("multiplicity", Cell::Int(u64::from(m))),
        ("n_exact", n.exact.into()),
        ("n", n.ceil.into()),
    ];
    if parallel {
        fields.push(("parallel_total", power::total_for(kind, n.ceil).into()));
    }
    ctx.emit(&Output::record(fields))
}

/// Published tables are reproduced at their printed precision.
const TABLE_PRECISION: usize = 3;

pub fn table(ctx: &Context, a: &TableArgs) -> Result<()> {
    let out = match a.which {
        1 => {
            let rows = report::load_empirical().map_err(flag("dataset"))?;
            let rep = report::compare(&rows).map_err(flag("dataset"))?;
            let body = rep
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.p_two_sided.into(),
                        r.cochrane.into(),
                        r.goodman.into(),
                        r.predicted_eq5.into(),
                        r.predicted_rival.into(),
                        r.abs_error_eq5.into(),
                        r.abs_error_rival.into(),
                    ]
                })
                .collect();
            Output::table(
                &[
                    "p_two_sided",
                    "cochrane",
                    "goodman",
                    "predicted_eq5",
                    "predicted_rival",
                    "abs_error_eq5",
                    "abs_error_rival",
                ],
                body,
            )
        }
        _ => {
            let cols = power::table2(1.96, 10.0, 0.05, &power::TABLE2_SIZES).map_err(flag("table"))?;
            let body = cols
                .iter()
                .map(|c| {
                    vec![
                        c.n.into(),
                        c.power.into(),
                        c.first_study.into(),
                        c.replication.into(),
                        c.parallel_total.into(),
                        c.note.as_deref().map_or(Cell::Missing, Cell::from),
                    ]
                })
                .collect();
            Output::table(
                &["n", "power", "first_study", "replication", "parallel_total", "note"],
                body,
            )
        }
    };
    ctx.emit_with(&out, TABLE_PRECISION)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Replication noise is carried out to this many SDs either side of zero.
const NOISE_REACH: f64 = 8.0;

pub fn discretize(ctx: &Context, a: &DiscretizeArgs) -> Result<()> {
    let range = RangeSpec::new(a.lo, a.hi, a.delta).map_err(flag("--lo/--hi/--delta"))?;
    let mut dist = discretize_gaussian(a.mean, a.sd, &range).map_err(flag("--mean/--sd"))?;
    if let Some(s) = a.convolve_sd {
        let noise_range = RangeSpec::centered(NOISE_REACH * s, a.delta).map_err(flag("--convolve-sd"))?;
        let noise = discretize_gaussian(0.0, s, &noise_range).map_err(flag("--convolve-sd"))?;
        dist = convolve(&dist, &noise).map_err(flag("--convolve-sd"))?;
    }
    let mut fields = vec![
        ("bins", Cell::Int(dist.len() as u64)),
        ("origin", dist.origin().into()),
        ("delta", dist.delta().into()),
        ("total_mass", dist.total_mass().into()),
        ("missing_mass", dist.missing_mass().into()),
    ];
    if let Some(t) = a.tail_at {
        let edge = dist.nearest_edge(t);
        let tail = dist
            .tail_mass(edge, TailDirection::AtOrAbove)
            .map_err(flag("--tail-at"))?;
        fields.push(("tail_at", edge.into()));
        fields.push(("tail_mass", tail.into()));
    }
    let summary = Output::record(fields);
    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            dist.write_csv(&mut w)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            finish(w, path)?;
            ctx.emit(&summary)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            dist.write_csv(&mut lock)?;
            lock.flush()?;
            summary.write(io::stderr().lock(), Format::Plain, ctx.precision)?;
            Ok(())
        }
    }
}

/// Sample design behind a bare P value; only its z statistic matters.
const P_VALUE_SD: f64 = 10.0;
const P_VALUE_N: u64 = 100;

pub fn simulate(ctx: &Context, a: &SimulateArgs) -> Result<()> {
    let p3 = a.study.p3()?;
    let (design, n2) = match a.study.resolve()? {
        Study::Design { design, n2 } => (design, n2),
        Study::PValue { p1, infinite } => {
            let design = StudyDesign::from_p_value(p1, P_VALUE_SD, P_VALUE_N).map_err(flag("--p1"))?;
            (
                design,
                if infinite {
                    SampleSize::Infinite
                } else {
                    SampleSize::Finite(P_VALUE_N)
                },
            )
        }
    };
    let query = ReplicationQuery::new(p3, n2).map_err(flag("--p3"))?;
    let cfg = SimConfig {
        trials: a.trials,
        seed: a.seed,
        design,
        query,
        mode: match a.mode {
            ModeArg::SameSign => SimMode::SameSign,
            _ => SimMode::PValueReplication,
        },
    };
    let report = match a.mode {
        ModeArg::Rival => mc::simulate_rival(&cfg).map_err(flag("--n2/--trials"))?,
        _ => mc::simulate(&cfg).map_err(flag("--trials"))?,
    };
    let mode = match a.mode {
        ModeArg::PValue => "p-value",
        ModeArg::SameSign => "same-sign",
        ModeArg::Rival => "rival",
    };
    ctx.emit(&Output::record(vec![
        ("mode", mode.into()),
        ("trials", report.trials.into()),
        ("seed", report.seed.into()),
        ("estimate", report.estimate.into()),
        ("std_error", report.std_error.into()),
        ("closed_form", report.closed_form.into()),
        ("z_discrepancy", report.z_discrepancy.into()),
    ]))?;
    if report.within(4.0) {
        Ok(())
    } else {
        Err(CliError::Calibration(format!(
            "simulation disagrees with the closed form by {:.2} standard errors",
            report.z_discrepancy
        )))
    }
}

pub fn curves(ctx: &Context, a: &CurvesArgs) -> Result<()> {
    let table = report::emit_figure3(a.z_lo, a.z_hi, a.step).map_err(flag("--z-lo/--z-hi/--step"))?;
    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            table
                .write_csv(&mut w)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            finish(w, path)?;
            ctx.emit(&Output::record(vec![
                ("curve_rows", Cell::Int(table.curve_rows().count() as u64)),
                ("marker_rows", Cell::Int(table.marker_rows().count() as u64)),
                ("path", Cell::Text(path.display().to_string())),
            ]))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            match ctx.format {
                Format::Json => {
                    serde_json::to_writer_pretty(&mut lock, &table.rows).map_err(|e| CliError::Io(e.to_string()))?;
                    writeln!(lock)?;
                }
                _ => table.write_csv(&mut lock)?,
            }
            lock.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_stable() {
        assert_eq!(CliError::Usage(String::new()).code(), 2);
        assert_eq!(CliError::Unreachable(String::new()).code(), 3);
        assert_eq!(CliError::Io(String::new()).code(), 4);
        assert_eq!(CliError::Calibration(String::new()).code(), 5);
    }

    #[test]
    fn library_errors_map_to_codes() {
        let target = Error::UnreachableTarget {
            target: 0.01,
            floor: 0.025,
        };
        assert_eq!(flag("--target-power")(target).code(), 3);
        assert_eq!(flag("--n")(Error::UndetectableEffect).code(), 3);
        assert_eq!(flag("--p1")(Error::NonFinite("p1")).code(), 2);
    }
}
