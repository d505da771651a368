//! Seeded sweeps of the full learner over sparsity and accuracy grids.

use std::fmt::Write as _;

use hamlearn_core::learner::{learn_hamiltonian, linf_distance};
use hamlearn_core::{EvolutionMode, EvolutionOracle, LearnerParams, OracleConfig, ResourceLedger, SparseHamiltonian};

use crate::error::CliError;
use crate::harness::{derive_seed, loglog_slope, mean, par_map_ordered, rng_from_seed};

pub const CSV_HEADER: &str = "s,eps,trial,seed,success,linf_error,l1_error,op_error,experiments,total_time,queries,min_resolution,ancilla";

/// Operator-norm errors are only computed up to this many qubits.
pub const OP_ERROR_QUBITS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub n: usize,
    pub s_values: Vec<usize>,
    pub eps_values: Vec<f64>,
    pub trials: usize,
    pub delta: f64,
    pub spam: f64,
    pub seed: u64,
    pub mode: EvolutionMode,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            n: 8,
            s_values: vec![4],
            eps_values: vec![0.2, 0.1, 0.05, 0.025],
            trials: 5,
            delta: 0.1,
            spam: 0.0,
            seed: 0,
            mode: EvolutionMode::Exact,
        }
    }
}

impl BenchSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: &str| Err(CliError::Input(msg.into()));
        if self.n == 0 || self.n > 31 {
            return fail("n must lie in 1..=31");
        }
        if self.s_values.is_empty() || self.eps_values.is_empty() || self.trials == 0 {
            return fail("sweep needs at least one s, one eps and one trial");
        }
        let capacity = (1u64 << (2 * self.n)) - 1;
        if self.s_values.iter().any(|&s| s == 0 || s as u64 > capacity) {
            return fail("every s must lie in 1..4^n");
        }
        if self.eps_values.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return fail("every eps must lie in (0, 1]");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail("delta must lie in (0, 1)");
        }
        if !(0.0..1.0).contains(&self.spam) {
            return fail("spam must lie in [0, 1)");
        }
        Ok(())
    }

    fn cells(&self) -> Vec<(usize, f64, usize, u64)> {
        let mut out = Vec::new();
        for &s in &self.s_values {
            for &eps in &self.eps_values {
                for trial in 0..self.trials {
                    let seed = derive_seed(self.seed, out.len() as u64);
                    out.push((s, eps, trial, seed));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub s: usize,
    pub eps: f64,
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    pub linf_error: f64,
    pub l1_error: f64,
    pub op_error: Option<f64>,
    pub ledger: ResourceLedger,
}

impl BenchRow {
    pub fn to_csv(&self) -> String {
        let l = &self.ledger;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.s,
            self.eps,
            self.trial,
            self.seed,
            u8::from(self.success),
            self.linf_error,
            self.l1_error,
            self.op_error.map(|v| v.to_string()).unwrap_or_default(),
            l.experiments,
            l.total_evolution_time,
            l.queries,
            l.min_resolution().map(|v| v.to_string()).unwrap_or_default(),
            l.ancilla_qubits,
        )
    }
}

/// Learns one random `s`-sparse instance with coefficients in `±[eps, 1]`.
/// The instance and the learner share one random stream seeded by `seed`.
pub fn run_trial(n: usize, s: usize, eps: f64, delta: f64, config: OracleConfig, seed: u64) -> Result<BenchRow, CliError> {
    let mut rng = rng_from_seed(seed);
    let hidden = SparseHamiltonian::random_instance(n, s, 1.0, eps, &mut rng)?;
    let mut oracle = EvolutionOracle::new(hidden.clone(), config)?;
    let result = learn_hamiltonian(&LearnerParams::new(s, eps, delta), &mut oracle, &mut rng)?;
    let diff = hidden.difference(&result.hamiltonian)?;
    let op_error = if n <= OP_ERROR_QUBITS { Some(diff.op_norm()?) } else { None };
    Ok(BenchRow {
        s,
        eps,
        trial: 0,
        seed,
        success: result.flags.output_ok,
        linf_error: linf_distance(&hidden, &result.hamiltonian)?,
        l1_error: diff.l1_norm(),
        op_error,
        ledger: result.ledger,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub rows: usize,
    pub success_rate: f64,
    /// Mean over ε of the slope of mean experiments against `s ln s`.
    pub experiments_slope: Option<f64>,
    /// Mean over s of the slope of mean total evolution time against `1/ε`.
    pub time_slope: Option<f64>,
}

pub fn run(spec: &BenchSpec) -> Result<(Vec<BenchRow>, BenchSummary), CliError> {
    spec.validate()?;
    let config = OracleConfig::default().with_spam(spec.spam).with_mode(spec.mode);
    let results = par_map_ordered(spec.cells(), |(s, eps, trial, seed)| {
        run_trial(spec.n, s, eps, spec.delta, config, seed).map(|row| BenchRow { trial, ..row })
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let summary = summarize(spec, &rows);
    Ok((rows, summary))
}

fn cell_mean(rows: &[BenchRow], s: usize, eps: f64, value: impl Fn(&BenchRow) -> f64) -> f64 {
    let vals: Vec<f64> = rows.iter().filter(|r| r.s == s && r.eps == eps).map(value).collect();
    mean(&vals)
}

fn mean_slope(slopes: Vec<Option<f64>>) -> Option<f64> {
    let slopes: Vec<f64> = slopes.into_iter().flatten().collect();
    (!slopes.is_empty()).then(|| mean(&slopes))
}

pub fn summarize(spec: &BenchSpec, rows: &[BenchRow]) -> BenchSummary {
    let experiments_slope = mean_slope(
        spec.eps_values
            .iter()
            .map(|&eps| {
                let xs: Vec<f64> = spec.s_values.iter().map(|&s| s as f64 * (s as f64).ln()).collect();
                let ys: Vec<f64> = spec.s_values.iter().map(|&s| cell_mean(rows, s, eps, |r| r.ledger.experiments as f64)).collect();
                loglog_slope(&xs, &ys)
            })
            .collect(),
    );
    let time_slope = mean_slope(
        spec.s_values
            .iter()
            .map(|&s| {
                let xs: Vec<f64> = spec.eps_values.iter().map(|e| 1.0 / e).collect();
                let ys: Vec<f64> = spec.eps_values.iter().map(|&eps| cell_mean(rows, s, eps, |r| r.ledger.total_evolution_time)).collect();
                loglog_slope(&xs, &ys)
            })
            .collect(),
    );
    let successes = rows.iter().filter(|r| r.success).count();
    BenchSummary {
        rows: rows.len(),
        success_rate: if rows.is_empty() { 0.0 } else { successes as f64 / rows.len() as f64 },
        experiments_slope,
        time_slope,
    }
}

/// Header, one line per row, then the summary as `#`-prefixed lines.
pub fn to_csv(rows: &[BenchRow], summary: &BenchSummary) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "NA".into());
    let _ = writeln!(out, "# rows,{}", summary.rows);
    let _ = writeln!(out, "# success_rate,{}", summary.success_rate);
    let _ = writeln!(out, "# slope_experiments_vs_s_ln_s,{}", fmt(summary.experiments_slope));
    let _ = writeln!(out, "# slope_total_time_vs_inv_eps,{}", fmt(summary.time_slope));
    out
}
