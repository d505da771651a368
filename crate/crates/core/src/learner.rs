//! Learning algorithms: support learning, isolated coefficient learning and
//! the composed ℓ∞ and operator-norm learners.
//!
//! Learners see the oracle only through experiments. Ground truth is read
//! solely to fill in [`StageFlags`] after the estimate is fixed.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use rand::Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;
use crate::isolation::{commuting_conjugators, isolation_rounds, targeted_rounds, uniform_conjugators};
use crate::oracle::{EvolutionOracle, ResourceLedger};
use crate::pauli::PauliString;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerParams {
    /// Promised upper bound on the number of terms.
    pub s_bound: usize,
    pub eps: f64,
    pub delta: f64,
    /// Taylor remainder constant `C ≥ 1`.
    pub taylor_c: f64,
    /// `c0` in `T = ⌈c0 s ln(s/δ)⌉` support rounds.
    pub support_rounds_c0: f64,
    /// `c1` in the per-estimate shot count `⌈c1 (6400C)² ln(4/δ)/2⌉`.
    pub shots_c1: f64,
}

impl LearnerParams {
    pub fn new(s_bound: usize, eps: f64, delta: f64) -> Self {
        LearnerParams { s_bound, eps, delta, taylor_c: 1.0, support_rounds_c0: 64.0, shots_c1: 1.0 }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.s_bound == 0 {
            return Err(Error::invalid("s_bound must be positive"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::invalid("eps must be positive"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid("delta must lie in (0, 1)"));
        }
        if !(self.taylor_c >= 1.0 && self.support_rounds_c0 >= 1.0 && self.shots_c1 >= 1.0) {
            return Err(Error::invalid("C, c0 and c1 must be at least 1"));
        }
        Ok(())
    }

    /// `T = ⌈c0 s ln(s/δ)⌉`, at least 1.
    pub fn support_rounds(&self) -> u64 {
        let s = self.s_bound as f64;
        libm::ceil(self.support_rounds_c0 * s * libm::log(s / self.delta)).max(1.0) as u64
    }

    /// Shots for one magnitude estimate failing with probability at most `delta / 2`.
    pub fn shots(&self, delta: f64) -> Result<u64> {
        let margin = 6400.0 * self.taylor_c;
        let m = libm::ceil(self.shots_c1 * margin * margin * libm::log(4.0 / delta) / 2.0);
        if !(m.is_finite() && m < 1.0e18) {
            return Err(Error::Budget { requested: m, limit: u64::MAX });
        }
        Ok(m.max(1.0) as u64)
    }

    /// Shots when outcomes are mixed with a uniform floor `λ 4^{-n}`. The square
    /// root turns frequency noise `η` into magnitude noise `√η`, so the floor's
    /// fluctuations must stay below `(1-λ)τ²` with `τ = 1/(6400C)` (Bernstein).
    /// Equals [`Self::shots`] when `λ = 0`.
    pub fn shots_with_spam(&self, delta: f64, lambda: f64, n: usize) -> Result<u64> {
        let base = self.shots(delta)?;
        if lambda <= 0.0 {
            return Ok(base);
        }
        let tau = 1.0 / (6400.0 * self.taylor_c);
        let eta = (1.0 - lambda) * tau * tau;
        let floor = lambda * libm::pow(4.0, -(n as f64));
        let m = libm::ceil(self.shots_c1 * 2.0 * (floor + eta / 3.0) * libm::log(4.0 / delta) / (eta * eta));
        if !(m.is_finite() && m < 1.0e18) {
            return Err(Error::Budget { requested: m, limit: u64::MAX });
        }
        Ok(base.max(m as u64))
    }

    /// Evolution time `1 / (800 C ε)` of the small-coefficient estimator.
    pub fn stage_time(&self, eps: f64) -> f64 {
        1.0 / (800.0 * self.taylor_c * eps)
    }
}

/// `L = ⌈log₁₀(1/ε)⌉`, at least 1. Values within `1e-9` of an integer round down to it.
pub fn stage_count(eps: f64) -> usize {
    (libm::ceil(libm::log10(1.0 / eps) - 1e-9).max(1.0)) as usize
}

/// An oracle seen through a fixed restriction `H_{Q_1..Q_r}` and an accumulated
/// drift on the target Pauli.
#[derive(Debug)]
pub struct RestrictedHandle<'a> {
    oracle: &'a mut EvolutionOracle,
    qs: Vec<PauliString>,
    target: PauliString,
    drift: f64,
}

impl<'a> RestrictedHandle<'a> {
    pub fn new(oracle: &'a mut EvolutionOracle, qs: Vec<PauliString>, target: PauliString) -> Result<Self> {
        if target.num_qubits() != oracle.num_qubits() {
            return Err(Error::DimensionMismatch { expected: oracle.num_qubits(), found: target.num_qubits() });
        }
        Ok(RestrictedHandle { oracle, qs, target, drift: 0.0 })
    }

    pub fn target(&self) -> &PauliString {
        &self.target
    }

    pub fn qs(&self) -> &[PauliString] {
        &self.qs
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// Adds `delta` times the target to the simulated Hamiltonian.
    pub fn shift(&mut self, delta: f64) {
        self.drift += delta;
    }

    /// `|u_P|'` of `e^{-it(H_{qs} + (drift + extra) P)}` from `shots` samples.
    pub fn estimate<R: Rng + ?Sized>(&mut self, extra: f64, t: f64, shots: u64, rng: &mut R) -> Result<f64> {
        let total = self.drift + extra;
        let drift = (total != 0.0).then_some((&self.target, total));
        self.oracle.estimate_magnitude(&self.qs, drift, &self.target, t, shots, rng)
    }

    pub fn spam_lambda(&self) -> f64 {
        self.oracle.config().spam_lambda
    }

    pub fn num_qubits(&self) -> usize {
        self.oracle.num_qubits()
    }

    /// Coefficient of the target in the current drifted restriction. Diagnostics only.
    pub fn true_residual(&self) -> f64 {
        let restricted = self.oracle.ground_truth().coeff(&self.target);
        let survives = self.qs.iter().all(|q| q.commutes_with(&self.target));
        (if survives { restricted } else { 0.0 }) + self.drift
    }

    /// True when no term other than the target survives the restriction. Diagnostics only.
    pub fn is_isolated(&self) -> bool {
        self.oracle
            .ground_truth()
            .support()
            .filter(|p| *p != &self.target)
            .all(|p| self.qs.iter().any(|q| !p.commutes_with(q)))
    }

    pub fn ledger(&self) -> &ResourceLedger {
        self.oracle.ledger()
    }
}

/// Estimates a coefficient promised to satisfy `|h| ≤ 10ε`: magnitude from
/// `|u_P|'/t`, then the sign from whether adding `|h|'` to the Hamiltonian
/// doubles the coefficient or cancels it.
pub fn learn_small_coeff<R: Rng + ?Sized>(
    handle: &mut RestrictedHandle<'_>,
    eps: f64,
    delta: f64,
    params: &LearnerParams,
    rng: &mut R,
) -> Result<f64> {
    if !(eps > 0.0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("need eps > 0 and delta in (0, 1)"));
    }
    let t = params.stage_time(eps);
    let shots = params.shots_with_spam(delta, handle.spam_lambda(), handle.num_qubits())?;
    let magnitude = handle.estimate(0.0, t, shots, rng)? / t;
    let shifted = handle.estimate(magnitude, t, shots, rng)? / t;
    Ok(if shifted >= eps / 2.0 { magnitude } else { -magnitude })
}

/// Result of [`learn_coeff_traced`]: the estimate and each stage's increment.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTrace {
    pub estimate: f64,
    pub increments: Vec<f64>,
}

/// Estimates a coefficient with `|h| ≤ 1` by `L` refinement stages at
/// `ε_l = 10^{-l}`, each removing its estimate from the Hamiltonian as drift.
pub fn learn_coeff<R: Rng + ?Sized>(
    handle: &mut RestrictedHandle<'_>,
    eps: f64,
    delta: f64,
    params: &LearnerParams,
    rng: &mut R,
) -> Result<f64> {
    learn_coeff_traced(handle, eps, delta, params, rng).map(|t| t.estimate)
}

pub fn learn_coeff_traced<R: Rng + ?Sized>(
    handle: &mut RestrictedHandle<'_>,
    eps: f64,
    delta: f64,
    params: &LearnerParams,
    rng: &mut R,
) -> Result<CoeffTrace> {
    let stages = stage_count(eps);
    let delta_l = delta / stages as f64;
    let mut estimate = 0.0;
    let mut increments = Vec::with_capacity(stages);
    for l in 1..=stages {
        let eps_l = libm::pow(10.0, -(l as f64));
        let h_l = learn_small_coeff(handle, eps_l, delta_l, params, rng)?;
        estimate += h_l;
        increments.push(h_l);
        handle.shift(-h_l);
    }
    Ok(CoeffTrace { estimate, increments })
}

fn check_target(oracle: &EvolutionOracle, p0: &PauliString) -> Result<()> {
    if p0.num_qubits() != oracle.num_qubits() {
        return Err(Error::DimensionMismatch { expected: oracle.num_qubits(), found: p0.num_qubits() });
    }
    if p0.is_identity() {
        return Err(Error::invalid("the identity coefficient is fixed to zero"));
    }
    Ok(())
}

/// Estimate plus whether the targeted restriction actually isolated the target.
fn single_coeff<R: Rng + ?Sized>(
    p0: &PauliString,
    params: &LearnerParams,
    oracle: &mut EvolutionOracle,
    rng: &mut R,
) -> Result<(f64, bool)> {
    check_target(oracle, p0)?;
    params.validate()?;
    let r = targeted_rounds(params.s_bound, params.delta);
    let qs = commuting_conjugators(p0, r, rng);
    let mut handle = RestrictedHandle::new(oracle, qs, p0.clone())?;
    let isolated = handle.is_isolated();
    let estimate = learn_coeff(&mut handle, params.eps, params.delta / 2.0, params, rng)?;
    Ok((estimate, isolated))
}

/// Estimates `h_{p0}` of an `s_bound`-sparse Hamiltonian to within `eps`
/// with probability at least `1 - delta`.
pub fn learn_single_coeff_sparse<R: Rng + ?Sized>(
    p0: &PauliString,
    params: &LearnerParams,
    oracle: &mut EvolutionOracle,
    rng: &mut R,
) -> Result<f64> {
    single_coeff(p0, params, oracle, rng).map(|(h, _)| h)
}

/// Pauli sampling of randomly restricted evolutions at random times. The
/// output contains every term with `|h_P| ≥ eps` with probability at least `1 - delta`.
pub fn learn_support<R: Rng + ?Sized>(
    params: &LearnerParams,
    oracle: &mut EvolutionOracle,
    rng: &mut R,
) -> Result<BTreeSet<PauliString>> {
    params.validate()?;
    let n = oracle.num_qubits();
    let r = isolation_rounds(params.s_bound);
    let t_max = 1.0 / params.eps;
    let mut found = BTreeSet::new();
    for _ in 0..params.support_rounds() {
        let qs = uniform_conjugators(n, r, rng);
        let t = if t_max > FRAC_PI_4 { rng.gen_range(FRAC_PI_4..=t_max) } else { FRAC_PI_4 };
        let p = oracle.sample(&qs, None, t, rng)?;
        if !p.is_identity() {
            found.insert(p);
        }
    }
    Ok(found)
}

/// Ground-truth checks of each stage, computed after the estimate is final.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageFlags {
    /// Every term with `|h_P| ≥ ε` was found by support learning.
    pub support_covered: bool,
    /// Every targeted restriction left only its target.
    pub isolation_ok: bool,
    /// Every per-candidate estimate was within its accuracy `ε/2`.
    pub estimates_ok: bool,
    /// `max_P |h_P - h''_P| ≤ ε` and `support(H'') ⊆ support(H)`.
    pub output_ok: bool,
}

#[derive(Debug, Clone)]
pub struct LearnResult {
    pub hamiltonian: SparseHamiltonian,
    /// Cumulative ledger of the oracle at the end of the run.
    pub ledger: ResourceLedger,
    /// Candidate set produced by support learning.
    pub candidates: Vec<PauliString>,
    pub flags: StageFlags,
}

/// `max_P |a_P - b_P|` over all Paulis (only the union of supports can differ).
pub fn linf_distance(a: &SparseHamiltonian, b: &SparseHamiltonian) -> Result<f64> {
    Ok(a.difference(b)?.linf_norm())
}

/// Learns `H''` with `max_P |h_P - h''_P| ≤ eps` and no spurious terms,
/// with probability at least `1 - delta`.
pub fn learn_hamiltonian<R: Rng + ?Sized>(
    params: &LearnerParams,
    oracle: &mut EvolutionOracle,
    rng: &mut R,
) -> Result<LearnResult> {
    params.validate()?;
    let n = oracle.num_qubits();
    let eps = params.eps;
    let support = learn_support(&params.with_delta(params.delta / 2.0), oracle, rng)?;
    let per_element = params.with_eps(eps / 2.0).with_delta(params.delta / (2.0 * support.len().max(1) as f64));

    let mut raw = SparseHamiltonian::zero(n);
    let mut isolation_ok = true;
    let mut estimates_ok = true;
    for p in &support {
        let (estimate, isolated) = single_coeff(p, &per_element, oracle, rng)?;
        isolation_ok &= isolated;
        estimates_ok &= (estimate - oracle.ground_truth().coeff(p)).abs() <= per_element.eps;
        if estimate.abs() > eps / 2.0 {
            raw.add_term(p.clone(), estimate)?;
        }
    }
    let hamiltonian = raw.truncated(params.s_bound);

    let truth = oracle.ground_truth();
    let support_covered = truth.effective_support(eps).iter().all(|p| support.contains(p));
    let no_spurious = hamiltonian.support().all(|p| truth.contains(p));
    let output_ok = no_spurious && linf_distance(truth, &hamiltonian)? <= eps;
    Ok(LearnResult {
        hamiltonian,
        ledger: *oracle.ledger(),
        candidates: support.into_iter().collect(),
        flags: StageFlags { support_covered, isolation_ok, estimates_ok, output_ok },
    })
}

/// [`learn_hamiltonian`] at accuracy `eps / s_bound`, so that
/// `Σ_P |h_P - h''_P| ≤ eps` and hence `‖H - H''‖_op ≤ eps`.
pub fn learn_hamiltonian_opnorm<R: Rng + ?Sized>(
    params: &LearnerParams,
    oracle: &mut EvolutionOracle,
    rng: &mut R,
) -> Result<LearnResult> {
    params.validate()?;
    learn_hamiltonian(&params.with_eps(params.eps / params.s_bound as f64), oracle, rng)
}
