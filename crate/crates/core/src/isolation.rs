//! Isolating single terms of a sparse Hamiltonian.
//!
//! Restricting `H` to the commutant of `r` random Paulis keeps each term with
//! probability `2^{-r}`, pairwise independently. With `r ≈ log₂ s` a fixed term
//! is the lone survivor with probability `Ω(1/s)`; drawing the Paulis from the
//! commutant of a target term keeps the target and, for large enough `r`,
//! removes everything else with high probability.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;
use crate::pauli::PauliString;

#[derive(Debug, Clone, PartialEq)]
pub struct IsolationDraw {
    pub qs: Vec<PauliString>,
    /// Terms of `h` commuting with every string in `qs`.
    pub survivors: Vec<PauliString>,
}

impl IsolationDraw {
    pub fn r(&self) -> usize {
        self.qs.len()
    }

    pub fn isolates(&self, p0: &PauliString) -> bool {
        self.survivors.len() == 1 && &self.survivors[0] == p0
    }
}

/// `⌈log₂ s⌉ + 2`.
pub fn isolation_rounds(s_bound: usize) -> usize {
    s_bound.max(1).next_power_of_two().trailing_zeros() as usize + 2
}

/// `⌈log₂(2s/δ) + 2⌉`, rounding values within `1e-9` of an integer down to it.
pub fn targeted_rounds(s_bound: usize, delta: f64) -> usize {
    let x = libm::log2(2.0 * s_bound.max(1) as f64 / delta) + 2.0;
    libm::ceil(x - 1e-9).max(0.0) as usize
}

/// `r` independent uniform Paulis.
pub fn uniform_conjugators<R: Rng + ?Sized>(n: usize, r: usize, rng: &mut R) -> Vec<PauliString> {
    (0..r).map(|_| PauliString::random_uniform(n, rng)).collect()
}

/// `r` independent Paulis uniform on the commutant of `p0`.
pub fn commuting_conjugators<R: Rng + ?Sized>(p0: &PauliString, r: usize, rng: &mut R) -> Vec<PauliString> {
    (0..r).map(|_| p0.random_commuting(rng)).collect()
}

fn survivors(h: &SparseHamiltonian, qs: &[PauliString]) -> Vec<PauliString> {
    h.support().filter(|p| qs.iter().all(|q| p.commutes_with(q))).cloned().collect()
}

/// Uniform isolation with `r = ⌈log₂ s_bound⌉ + 2`.
pub fn draw_isolation<R: Rng + ?Sized>(h: &SparseHamiltonian, s_bound: usize, rng: &mut R) -> Result<IsolationDraw> {
    if s_bound == 0 {
        return Err(Error::invalid("s_bound must be positive"));
    }
    let qs = uniform_conjugators(h.num_qubits(), isolation_rounds(s_bound), rng);
    let survivors = survivors(h, &qs);
    Ok(IsolationDraw { qs, survivors })
}

/// Isolation targeted at `p0` with `r = ⌈log₂(2 s_bound/δ) + 2⌉`.
pub fn draw_isolation_for_target<R: Rng + ?Sized>(
    h: &SparseHamiltonian,
    p0: &PauliString,
    s_bound: usize,
    delta: f64,
    rng: &mut R,
) -> Result<IsolationDraw> {
    check_target(h, p0)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta must lie in (0, 1)"));
    }
    let qs = commuting_conjugators(p0, targeted_rounds(s_bound, delta), rng);
    let survivors = survivors(h, &qs);
    Ok(IsolationDraw { qs, survivors })
}

fn check_target(h: &SparseHamiltonian, p0: &PauliString) -> Result<()> {
    if p0.num_qubits() != h.num_qubits() {
        return Err(Error::DimensionMismatch { expected: h.num_qubits(), found: p0.num_qubits() });
    }
    if p0.is_identity() {
        return Err(Error::invalid("cannot isolate the identity"));
    }
    Ok(())
}

/// Fraction of `trials` uniform isolations (with `s_bound` the sparsity of `h`)
/// that leave `p0` as the only survivor.
pub fn isolation_probability_empirical<R: Rng + ?Sized>(
    h: &SparseHamiltonian,
    p0: &PauliString,
    trials: u64,
    rng: &mut R,
) -> Result<f64> {
    check_target(h, p0)?;
    if !h.contains(p0) {
        return Err(Error::invalid(alloc::format!("{p0} is not in the support")));
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let r = isolation_rounds(h.sparsity());
    let others: Vec<&PauliString> = h.support().filter(|q| *q != p0).collect();
    let mut hits = 0u64;
    for _ in 0..trials {
        let qs = uniform_conjugators(h.num_qubits(), r, rng);
        let alone = qs.iter().all(|q| p0.commutes_with(q))
            && others.iter().all(|o| qs.iter().any(|q| !o.commutes_with(q)));
        hits += u64::from(alone);
    }
    Ok(hits as f64 / trials as f64)
}

/// Empirical moments of `|S|` where `S = {x ∈ X : x·y_i = 0 for all i}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VvStats {
    pub mean: f64,
    pub variance: f64,
    pub p_empty: f64,
    /// Sample fourth central moment, for confidence intervals on `variance`.
    pub fourth_moment: f64,
    pub trials: u64,
}

/// `2^{-r} |X|`.
pub fn vv_expected_mean(set_size: usize, r: usize) -> f64 {
    set_size as f64 * libm::pow(2.0, -(r as f64))
}

/// `2^{-r}(1 - 2^{-r}) |X|`.
pub fn vv_expected_variance(set_size: usize, r: usize) -> f64 {
    let p = libm::pow(2.0, -(r as f64));
    set_size as f64 * p * (1.0 - p)
}

/// Monte-Carlo estimate of the survivor-count moments.
///
/// `X` is one uniformly random subset of `{0,1}^bits \ {0}` of size `set_size`,
/// fixed for the call; each trial draws `y_1..y_r` uniformly.
pub fn vv_statistics<R: Rng + ?Sized>(
    set_size: usize,
    r: usize,
    bits: u32,
    trials: u64,
    rng: &mut R,
) -> Result<VvStats> {
    if bits == 0 || bits > 64 {
        return Err(Error::invalid("bit length must lie in 1..=64"));
    }
    let universe = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
    if set_size as u64 > universe {
        return Err(Error::invalid(alloc::format!("set size {set_size} exceeds 2^{bits} - 1")));
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let mask = universe;
    let mut set = BTreeSet::new();
    while set.len() < set_size {
        let x = rng.gen::<u64>() & mask;
        if x != 0 {
            set.insert(x);
        }
    }
    let xs: Vec<u64> = set.into_iter().collect();
    let mut counts = Vec::with_capacity(trials as usize);
    let mut empty = 0u64;
    for _ in 0..trials {
        let ys: Vec<u64> = (0..r).map(|_| rng.gen::<u64>() & mask).collect();
        let k = xs.iter().filter(|&&x| ys.iter().all(|&y| (x & y).count_ones() % 2 == 0)).count();
        empty += u64::from(k == 0);
        counts.push(k as f64);
    }
    let nt = trials as f64;
    let mean = counts.iter().sum::<f64>() / nt;
    let variance = if trials > 1 {
        counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (nt - 1.0)
    } else {
        0.0
    };
    let fourth_moment = counts.iter().map(|c| libm::pow(c - mean, 4.0)).sum::<f64>() / nt;
    Ok(VvStats { mean, variance, p_empty: empty as f64 / nt, fourth_moment, trials })
}
