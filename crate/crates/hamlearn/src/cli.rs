//! Argument parsing and command dispatch for the `hamlearn` binary.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hamlearn_core::distances::{self, DEFAULT_GRID};
use hamlearn_core::isolation::vv_statistics;
use hamlearn_core::learner::{learn_hamiltonian, learn_hamiltonian_opnorm, linf_distance};
use hamlearn_core::{EvolutionMode, EvolutionOracle, LearnerParams, OracleConfig, SparseHamiltonian};

use crate::bench::{self, BenchSpec};
use crate::bounds;
use crate::error::CliError;
use crate::formats::{self, DistanceDoc, HamiltonianDoc, LearnDoc, LedgerDoc, RunDoc};
use crate::harness::{derive_seed, par_map_ordered, rng_from_seed};

#[derive(Debug, Parser)]
#[command(name = "hamlearn", version, about = "Learn sparse Pauli Hamiltonians from simulated time evolution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random sparse Hamiltonian and print it as JSON.
    Gen(GenArgs),
    /// Learn a hidden Hamiltonian through the simulated oracle.
    Learn(LearnArgs),
    /// Time- or temperature-constrained distance between two Hamiltonians.
    Distance(DistanceArgs),
    /// Check the distance bounds on random pairs and write CSV.
    BoundsSweep(BoundsArgs),
    /// Survivor-count statistics of random parity constraints, as CSV.
    VvStats(VvArgs),
    /// Sweep the learner over sparsities and accuracies, as CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Trotter,
}

impl From<ModeArg> for EvolutionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => EvolutionMode::Exact,
            ModeArg::Trotter => EvolutionMode::Trotter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Time,
    Temperature,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub s: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest coefficient magnitude.
    #[arg(long, default_value_t = 1.0)]
    pub coeff_range: f64,
    /// Smallest coefficient magnitude.
    #[arg(long, default_value_t = 0.0)]
    pub floor: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    /// Hidden Hamiltonian as a JSON file.
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub hamiltonian: Option<PathBuf>,
    /// Random hidden Hamiltonian `n,s,seed` with magnitudes in [eps, 1].
    #[arg(long, value_delimiter = ',', value_name = "N,S,SEED")]
    pub random: Option<Vec<u64>>,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub spam: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Sparsity promise; defaults to the number of terms.
    #[arg(long)]
    pub s_bound: Option<usize>,
    /// Learn to operator-norm accuracy eps instead of max-coefficient accuracy.
    #[arg(long)]
    pub opnorm: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a one-row CSV summary of the run.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Time horizon T or inverse-temperature bound B.
    #[arg(long)]
    pub budget: f64,
    #[arg(long)]
    pub h1: PathBuf,
    #[arg(long)]
    pub h2: PathBuf,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Largest qubit count; each pair draws n uniformly from 1..=n.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VvArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub set_size: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub r: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Bit length of the ambient space.
    #[arg(long, default_value_t = 16)]
    pub bits: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub s: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.025")]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub spam: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> String {
    let mut s = formats::to_json_pretty(value);
    s.push('\n');
    s
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Learn(a) => learn(a),
        Command::Distance(a) => distance(a),
        Command::BoundsSweep(a) => bounds_sweep(a),
        Command::VvStats(a) => vv_stats(a),
        Command::Bench(a) => bench_cmd(a),
    }
}

fn gen(a: GenArgs) -> Result<(), CliError> {
    let mut rng = rng_from_seed(a.seed);
    let h = SparseHamiltonian::random_instance(a.n, a.s, a.coeff_range, a.floor, &mut rng)?;
    emit(a.out.as_deref(), &json_line(&HamiltonianDoc::from_hamiltonian(&h)))
}

fn learn(a: LearnArgs) -> Result<(), CliError> {
    let hidden = match (&a.hamiltonian, &a.random) {
        (Some(path), _) => formats::read_hamiltonian(path)?,
        (None, Some(spec)) => {
            if spec.len() != 3 {
                return Err(CliError::Input("--random expects n,s,seed".into()));
            }
            let mut rng = rng_from_seed(spec[2]);
            SparseHamiltonian::random_instance(spec[0] as usize, spec[1] as usize, 1.0, a.eps.min(1.0), &mut rng)?
        }
        (None, None) => return Err(CliError::Input("need --hamiltonian or --random".into())),
    };
    let s_bound = a.s_bound.unwrap_or(hidden.sparsity().max(1));
    let config = OracleConfig::default().with_spam(a.spam).with_mode(a.mode.into());
    let params = LearnerParams::new(s_bound, a.eps, a.delta);
    let mut oracle = EvolutionOracle::new(hidden.clone(), config)?;
    let mut rng = rng_from_seed(a.seed);
    let result = if a.opnorm {
        learn_hamiltonian_opnorm(&params, &mut oracle, &mut rng)?
    } else {
        learn_hamiltonian(&params, &mut oracle, &mut rng)?
    };
    let doc = LearnDoc {
        hamiltonian: HamiltonianDoc::from_hamiltonian(&result.hamiltonian),
        ledger: LedgerDoc::from(&result.ledger),
        run: RunDoc {
            seed: a.seed,
            eps: a.eps,
            delta: a.delta,
            s_bound,
            spam: a.spam,
            mode: match a.mode {
                ModeArg::Exact => "exact".into(),
                ModeArg::Trotter => "trotter".into(),
            },
            candidates: result.candidates.iter().map(|p| p.to_string()).collect(),
            linf_error: linf_distance(&hidden, &result.hamiltonian)?,
            success: result.flags.output_ok,
            support_covered: result.flags.support_covered,
            isolation_ok: result.flags.isolation_ok,
            estimates_ok: result.flags.estimates_ok,
        },
    };
    if let Some(path) = a.csv.as_deref() {
        let op_error = if hidden.num_qubits() <= bench::OP_ERROR_QUBITS {
            Some(hidden.difference(&result.hamiltonian)?.op_norm()?)
        } else {
            None
        };
        emit(Some(path), &formats::learn_csv(&doc, op_error))?;
    }
    emit(a.out.as_deref(), &json_line(&doc))
}

fn distance(a: DistanceArgs) -> Result<(), CliError> {
    let h1 = formats::read_hamiltonian(&a.h1)?;
    let h2 = formats::read_hamiltonian(&a.h2)?;
    let result = match a.kind {
        KindArg::Time => distances::d_t(&h1, &h2, a.budget, a.grid)?,
        KindArg::Temperature => distances::d_b(&h1, &h2, a.budget, a.grid)?,
    };
    emit(a.out.as_deref(), &json_line(&DistanceDoc::from(&result)))
}

fn bounds_sweep(a: BoundsArgs) -> Result<(), CliError> {
    let rows = bounds::sweep(a.trials, a.n, a.seed, a.grid)?;
    emit(a.out.as_deref(), &bounds::to_csv(&rows))
}

fn vv_stats(a: VvArgs) -> Result<(), CliError> {
    let cells: Vec<(usize, usize)> = a.set_size.iter().flat_map(|&k| a.r.iter().map(move |&r| (k, r))).collect();
    let indexed: Vec<(u64, (usize, usize))> = (0..).zip(cells).collect();
    let results = par_map_ordered(indexed, |(i, (k, r))| {
        let mut rng = rng_from_seed(derive_seed(a.seed, i));
        vv_statistics(k, r, a.bits, a.trials, &mut rng).map(|st| (k, r, st))
    });
    let mut out = String::from("set_size,r,mean,variance,p_empty,trials\n");
    for res in results {
        let (k, r, st) = res?;
        out.push_str(&format!("{k},{r},{},{},{},{}\n", st.mean, st.variance, st.p_empty, st.trials));
    }
    emit(a.out.as_deref(), &out)
}

fn bench_cmd(a: BenchArgs) -> Result<(), CliError> {
    let spec = BenchSpec {
        n: a.n,
        s_values: a.s,
        eps_values: a.eps,
        trials: a.trials,
        delta: a.delta,
        spam: a.spam,
        seed: a.seed,
        mode: a.mode.into(),
    };
    let (rows, summary) = bench::run(&spec)?;
    emit(a.out.as_deref(), &bench::to_csv(&rows, &summary))
}
