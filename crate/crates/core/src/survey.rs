//! λ sweeps over levels and the a(j,k) / J(j,j+1,l) table printer.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hom::HomGamma;
use crate::jacobi::{lambda, JTable, LambdaReport};
use crate::padic::{default_precision, PrimeCtx};
use crate::sample::{rng_from_seed, GammaSampler};
use crate::verify::trial_seed;

/// How many times a task may raise its precision by 2 after exhaustion.
pub const MAX_ESCALATIONS: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format `{s}` (text, csv, json)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurveyRow {
    pub p: u64,
    /// The index a for `ϑ_a` rows, `"mixed"` for random γ.
    pub a: String,
    pub i: i64,
    pub rho: i64,
    pub v: i64,
    pub lambda: i64,
    /// `λ - (3i+3)` on `ϑ_a` rows, `λ - (3i+13-2p)` on mixed rows.
    pub y: i64,
    pub witness: [i64; 3],
    pub runtime_ms: u64,
}

pub const CSV_HEADER: &str = "p,a,i,rho,v,lambda,y,wj,wk,wl,ms";

impl SurveyRow {
    fn from_report(r: &LambdaReport, a: Option<i64>, ms: u64) -> Self {
        SurveyRow {
            p: r.p,
            a: a.map_or_else(|| "mixed".to_string(), |a| a.to_string()),
            i: r.i,
            rho: r.rho,
            v: r.v,
            lambda: r.lambda,
            y: if a.is_some() { r.y_one_param() } else { r.y_main },
            witness: r.witness,
            runtime_ms: ms,
        }
    }

    pub fn csv(&self) -> String {
        let [wj, wk, wl] = self.witness;
        format!(
            "{},{},{},{},{},{},{},{wj},{wk},{wl},{}",
            self.p, self.a, self.i, self.rho, self.v, self.lambda, self.y, self.runtime_ms
        )
    }

    pub fn text(&self) -> String {
        format!(
            "p={} a={} i={} rho={} v={} lambda={} y={} witness=({},{},{})",
            self.p,
            self.a,
            self.i,
            self.rho,
            self.v,
            self.lambda,
            self.y,
            self.witness[0],
            self.witness[1],
            self.witness[2]
        )
    }
}

/// Runs `task` at `start` precision, retrying at `N+2, N+4, ...` while it
/// reports exhausted precision.
pub fn with_escalation<T>(p: u64, start: u32, mut task: impl FnMut(Arc<PrimeCtx>) -> Result<T>) -> Result<T> {
    let mut n = start;
    let mut last = None;
    for _ in 0..=MAX_ESCALATIONS {
        let ctx = match PrimeCtx::new(p, n) {
            Ok(c) => Arc::new(c),
            Err(e @ Error::PrecisionTooLarge { .. }) => return Err(last.unwrap_or(e)),
            Err(e) => return Err(e),
        };
        match task(ctx) {
            Err(e @ Error::PrecisionExhausted(_)) => last = Some(e),
            other => return other,
        }
        n += 2;
    }
    Err(last.expect("loop ran at least once"))
}

#[derive(Clone, Copy, Debug)]
pub enum SurveyTask {
    Theta { p: u64, a: i64, i: i64 },
    Random { p: u64, i: i64, seed: u64 },
}

fn run_task(task: SurveyTask, precision: Option<u32>) -> Result<SurveyRow> {
    let started = Instant::now();
    let (p, i) = match task {
        SurveyTask::Theta { p, i, .. } | SurveyTask::Random { p, i, .. } => (p, i),
    };
    let start = precision.unwrap_or_else(|| default_precision(p, i));
    let report = with_escalation(p, start, |ctx| {
        let g = match task {
            SurveyTask::Theta { a, .. } => HomGamma::theta_a(ctx, i, a)?,
            SurveyTask::Random { seed, .. } => GammaSampler::new(ctx, i)?.sample(&mut rng_from_seed(seed))?,
        };
        lambda(&g)
    })?;
    let a = match task {
        SurveyTask::Theta { a, .. } => Some(a),
        SurveyTask::Random { .. } => None,
    };
    Ok(SurveyRow::from_report(&report, a, started.elapsed().as_millis() as u64))
}

/// `ϑ_a` rows for each a in `a_set` and each level, a-major.
pub fn theta_tasks(p: u64, a_set: &[i64], levels: impl IntoIterator<Item = i64> + Clone) -> Vec<SurveyTask> {
    a_set.iter().flat_map(|&a| levels.clone().into_iter().map(move |i| SurveyTask::Theta { p, a, i })).collect()
}

/// `trials` random γ per level.
pub fn random_tasks(p: u64, levels: impl IntoIterator<Item = i64>, trials: usize, seed: u64) -> Vec<SurveyTask> {
    levels
        .into_iter()
        .flat_map(|i| (0..trials).map(move |t| (i, t)))
        .enumerate()
        .map(|(n, (i, _))| SurveyTask::Random { p, i, seed: trial_seed(seed, n) })
        .collect()
}

/// Thread pool with `jobs` workers, or one per core when `None`.
pub fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Parse(format!("thread pool: {e}")))
}

/// Evaluates the tasks on a pool of `jobs` threads (all cores when `None`);
/// rows come back in task order.
pub fn survey(tasks: &[SurveyTask], precision: Option<u32>, jobs: Option<usize>) -> Result<Vec<SurveyRow>> {
    pool(jobs)?.install(|| tasks.par_iter().map(|&t| run_task(t, precision)).collect())
}

pub fn format_rows(rows: &[SurveyRow], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = format!("{CSV_HEADER}\n");
            rows.iter().for_each(|r| writeln!(s, "{}", r.csv()).unwrap());
            s
        }
        Format::Text => rows.iter().map(|r| r.text() + "\n").collect(),
        Format::Json => serde_json::to_string_pretty(rows).expect("plain data serializes") + "\n",
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    A,
    J,
}

#[derive(Serialize)]
struct TableJson<'a> {
    kind: &'static str,
    p: u64,
    i: i64,
    rho: i64,
    rows: &'a [Vec<u64>],
}

/// Rows `j = i..i+span`; columns `k` (a-table) or `l` (J-table,
/// entries `J(j, j+1, l)`) over the same range.
pub fn table_rows(g: &HomGamma, kind: TableKind, span: usize) -> Result<(i64, Vec<Vec<u64>>)> {
    let d = g.d() as usize;
    if span == 0 || span > d {
        return Err(Error::IndexOutOfRange { index: span as i64, lo: 1, hi: d as i64 });
    }
    let t = g.coeff_table()?;
    let i = g.level();
    let rows = match kind {
        TableKind::A => (0..span as i64).map(|r| t.row(i + r)[..span].to_vec()).collect(),
        TableKind::J => {
            let jt = JTable::new(&t);
            (0..span as i64).map(|r| jt.display_row(i + r)[..span].to_vec()).collect()
        }
    };
    Ok((t.rho, rows))
}

pub fn emit_table(g: &HomGamma, kind: TableKind, span: usize, format: Format) -> Result<String> {
    let (rho, rows) = table_rows(g, kind, span)?;
    let join = |r: &Vec<u64>, sep: &str| r.iter().map(u64::to_string).collect::<Vec<_>>().join(sep);
    Ok(match format {
        Format::Text => rows.iter().map(|r| join(r, " ") + "\n").collect(),
        Format::Csv => rows.iter().map(|r| join(r, ",") + "\n").collect(),
        Format::Json => {
            let kind = match kind {
                TableKind::A => "atable",
                TableKind::J => "jtable",
            };
            let t = TableJson { kind, p: g.ctx().p(), i: g.level(), rho, rows: &rows };
            serde_json::to_string(&t).expect("plain data serializes") + "\n"
        }
    })
}
