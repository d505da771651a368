//! Randomized checks of the distance sandwiches on small Hamiltonian pairs.

use std::fmt::Write as _;

use hamlearn_core::distances;
use hamlearn_core::SparseHamiltonian;
use rand::Rng;

use crate::error::CliError;
use crate::harness::{derive_seed, par_map_ordered, rng_from_seed};

pub const CSV_HEADER: &str = "trial,n,check,budget,value,lower,upper,grid_error,margin";

pub const TIME_BUDGETS: [f64; 3] = [0.1, 1.0, 10.0];
pub const TEMPERATURE_BUDGETS: [f64; 2] = [0.5, 2.0];

/// Slack on the closed-form `d_T` upper bound.
pub const UPPER_SLACK: f64 = 1e-9;

/// A random traceless Hamiltonian with `‖H‖_op` uniform in `(0, 1]`: up to six
/// distinct terms with coefficients uniform in `[-1, 1]`, then rescaled.
pub fn random_bounded<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SparseHamiltonian, CliError> {
    let max_terms = ((1usize << (2 * n)) - 1).min(6);
    let s = rng.gen_range(1..=max_terms);
    let h = SparseHamiltonian::random_instance(n, s, 1.0, 0.0, rng)?;
    let op = h.op_norm()?;
    let target: f64 = 1.0 - rng.gen::<f64>();
    Ok(if op > 0.0 { h.scaled(target / op) } else { h })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsRow {
    pub trial: usize,
    pub n: usize,
    /// `d_t`, `d_b` or `gibbs`.
    pub check: &'static str,
    pub budget: f64,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub grid_error: f64,
}

impl BoundsRow {
    /// Distance to the nearer bound; negative when a bound is violated.
    pub fn margin(&self) -> f64 {
        (self.value - self.lower).min(self.upper - self.value)
    }

    pub fn holds(&self) -> bool {
        self.margin() >= 0.0
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.trial, self.n, self.check, self.budget, self.value, self.lower, self.upper, self.grid_error,
            self.margin()
        )
    }
}

/// Every check on one random pair. The `d_T` bounds have grid error folded into the
/// lower side, the `d_B` bound into the upper side; the Gibbs check is at `β = -1`.
pub fn check_pair(trial: usize, h1: &SparseHamiltonian, h2: &SparseHamiltonian, grid: usize) -> Result<Vec<BoundsRow>, CliError> {
    let n = h1.num_qubits();
    let delta = h1.difference(h2)?.op_norm()?;
    let mut rows = Vec::new();
    for &horizon in &TIME_BUDGETS {
        let d = distances::d_t(h1, h2, horizon, grid)?;
        rows.push(BoundsRow {
            trial,
            n,
            check: "d_t",
            budget: horizon,
            value: d.value,
            lower: distances::dt_lower_bound(horizon, delta) - d.grid_error,
            upper: distances::dt_upper_bound(horizon, delta) + UPPER_SLACK,
            grid_error: d.grid_error,
        });
    }
    for &budget in &TEMPERATURE_BUDGETS {
        let d = distances::d_b(h1, h2, budget, grid)?;
        rows.push(BoundsRow {
            trial,
            n,
            check: "d_b",
            budget,
            value: d.value,
            lower: 0.0,
            upper: distances::db_upper_bound(budget, delta) + d.grid_error,
            grid_error: d.grid_error,
        });
    }
    let g = distances::gibbs_trace_bound_check(h1, h2)?;
    rows.push(BoundsRow { trial, n, check: "gibbs", budget: 1.0, value: g.lhs, lower: 0.0, upper: g.rhs_new + UPPER_SLACK, grid_error: 0.0 });
    Ok(rows)
}

/// `trials` pairs with `n` drawn uniformly from `1..=max_n`, each seeded from `seed`.
pub fn sweep(trials: usize, max_n: usize, seed: u64, grid: usize) -> Result<Vec<BoundsRow>, CliError> {
    if trials == 0 || max_n == 0 || max_n > 6 {
        return Err(CliError::Input("bounds-sweep needs trials >= 1 and n in 1..=6".into()));
    }
    if grid < 2 {
        return Err(CliError::Input("grid must have at least 2 points".into()));
    }
    let per_trial = par_map_ordered((0..trials).collect(), |trial| {
        let mut rng = rng_from_seed(derive_seed(seed, trial as u64));
        let n = rng.gen_range(1..=max_n);
        let h1 = random_bounded(n, &mut rng)?;
        let h2 = random_bounded(n, &mut rng)?;
        check_pair(trial, &h1, &h2, grid)
    });
    let mut rows = Vec::new();
    for r in per_trial {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BoundsRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.to_csv());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_pairs_are_bounded() {
        let mut rng = rng_from_seed(5);
        for n in 1..=3 {
            for _ in 0..20 {
                let h = random_bounded(n, &mut rng).unwrap();
                assert!(h.op_norm().unwrap() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn small_sweep_holds() {
        let rows = sweep(4, 2, 3, 256).unwrap();
        assert_eq!(rows.len(), 4 * 6);
        assert!(rows.iter().all(BoundsRow::holds), "{rows:?}");
    }
}
