//! Simulated access to an unknown Hamiltonian.
//!
//! An experiment prepares the Choi state of a (possibly restricted, drifted or
//! Trotterized) evolution `e^{-itH}`, measures it in the Bell basis and
//! returns a Pauli string. Every query is charged to a [`ResourceLedger`].

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;
use crate::linalg::{self, CMatrix, HermitianEigen, PauliSpectrum};
use crate::pauli::PauliString;

/// Counters for the cost of a protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceLedger {
    pub experiments: u64,
    /// Sum of the durations of all queries to the true Hamiltonian.
    pub total_evolution_time: f64,
    pub queries: u64,
    /// Shortest nonzero single-query duration; infinite until one is recorded.
    pub min_time_resolution: f64,
    pub ancilla_qubits: u32,
}

impl Default for ResourceLedger {
    fn default() -> Self {
        ResourceLedger {
            experiments: 0,
            total_evolution_time: 0.0,
            queries: 0,
            min_time_resolution: f64::INFINITY,
            ancilla_qubits: 0,
        }
    }
}

impl ResourceLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// `runs` executions of an evolution of duration `t` made of `queries` queries
    /// whose shortest piece lasts `resolution`.
    pub fn charge_evolution(&mut self, runs: u64, queries: u64, t: f64, resolution: f64) {
        self.queries = self.queries.saturating_add(queries.saturating_mul(runs));
        self.total_evolution_time += t * runs as f64;
        if runs > 0 && resolution > 0.0 {
            self.min_time_resolution = self.min_time_resolution.min(resolution);
        }
    }

    pub fn charge_experiments(&mut self, count: u64, ancilla: u32) {
        self.experiments = self.experiments.saturating_add(count);
        self.ancilla_qubits = self.ancilla_qubits.max(ancilla);
    }

    pub fn min_resolution(&self) -> Option<f64> {
        self.min_time_resolution.is_finite().then_some(self.min_time_resolution)
    }

    /// Combines two ledgers: counts add, resolution takes the minimum, ancillas the maximum.
    pub fn merge(&self, other: &ResourceLedger) -> ResourceLedger {
        ResourceLedger {
            experiments: self.experiments.saturating_add(other.experiments),
            total_evolution_time: self.total_evolution_time + other.total_evolution_time,
            queries: self.queries.saturating_add(other.queries),
            min_time_resolution: self.min_time_resolution.min(other.min_time_resolution),
            ancilla_qubits: self.ancilla_qubits.max(other.ancilla_qubits),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvolutionMode {
    /// Exponentiate the restricted Hamiltonian directly; the ledger still
    /// reports the query count and resolution the product formula would need.
    #[default]
    Exact,
    /// Execute the product formula and sample from its output.
    Trotter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub mode: EvolutionMode,
    /// Global depolarizing strength on the sampled outcome distribution.
    pub spam_lambda: f64,
    /// Diamond-norm budget for product formulas.
    pub trotter_epsilon: f64,
    /// Constant in the Trotter step count; trotter mode doubles it until the budget is met.
    pub trotter_kappa: f64,
    pub query_budget: u64,
    pub dense_limit: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            mode: EvolutionMode::Exact,
            spam_lambda: 0.0,
            trotter_epsilon: 0.01,
            trotter_kappa: 1.0,
            query_budget: u64::MAX,
            dense_limit: crate::DEFAULT_DENSE_LIMIT,
        }
    }
}

impl OracleConfig {
    pub fn with_spam(mut self, lambda: f64) -> Self {
        self.spam_lambda = lambda;
        self
    }

    pub fn with_mode(mut self, mode: EvolutionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.spam_lambda) {
            return Err(Error::invalid("spam_lambda must lie in [0, 1)"));
        }
        if !(self.trotter_epsilon > 0.0 && self.trotter_epsilon.is_finite()) {
            return Err(Error::invalid("trotter_epsilon must be positive"));
        }
        if !(self.trotter_kappa > 0.0 && self.trotter_kappa.is_finite()) {
            return Err(Error::invalid("trotter_kappa must be positive"));
        }
        Ok(())
    }
}

/// Step count and cost of a second-order product formula for
/// `e^{-it(H_{Q_1..Q_r} + drift)}` split into `2^r` conjugated copies of `H`
/// (plus one drift factor).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterPlan {
    pub r: usize,
    /// Number of factors `R`.
    pub factors: u64,
    /// Upper bound on the operator norm of each factor's generator.
    pub c: f64,
    pub t: f64,
    pub epsilon: f64,
    pub kappa: f64,
    /// `l`; 1 for an unsplit evolution.
    pub steps: u64,
}

impl TrotterPlan {
    /// A single unsplit query of duration `t`.
    pub fn direct(t: f64) -> Self {
        TrotterPlan { r: 0, factors: 1, c: 0.0, t, epsilon: 0.0, kappa: 0.0, steps: 1 }
    }

    /// `l = ⌈κ √((R c t)³ / ε)⌉` with `R = 2^r (+1 with drift)` and
    /// `c = max(‖h‖_ℓ1 / 2^r, |drift|)`; the ℓ1 norm bounds the operator norm.
    pub fn for_restriction(
        h: &SparseHamiltonian,
        r: usize,
        drift: f64,
        t: f64,
        epsilon: f64,
        kappa: f64,
    ) -> Result<Self> {
        let has_drift = drift != 0.0;
        if r == 0 && !has_drift {
            return Ok(TrotterPlan::direct(t));
        }
        if r >= 63 {
            return Err(Error::Budget { requested: f64::INFINITY, limit: u64::MAX });
        }
        let copies = 1u64 << r;
        let factors = copies + u64::from(has_drift);
        let c = (h.l1_norm() / copies as f64).max(drift.abs());
        let x = factors as f64 * c * t;
        let l = libm::ceil(kappa * libm::sqrt(x * x * x / epsilon)).max(1.0);
        if l.is_nan() || l >= 9.0e18 {
            return Err(Error::Budget { requested: l, limit: u64::MAX });
        }
        Ok(TrotterPlan { r, factors, c, t, epsilon, kappa, steps: l as u64 })
    }

    pub fn is_direct(&self) -> bool {
        self.factors == 1
    }

    /// `2 R l` queries, or one for an unsplit evolution.
    pub fn queries_f64(&self) -> f64 {
        if self.is_direct() {
            1.0
        } else {
            2.0 * self.factors as f64 * self.steps as f64
        }
    }

    pub fn queries(&self, budget: u64) -> Result<u64> {
        let q = self.queries_f64();
        if q > budget as f64 || q >= 1.8e19 {
            return Err(Error::Budget { requested: q, limit: budget });
        }
        Ok(q as u64)
    }

    /// Duration of each conjugated query, `t / (2^{r+1} l)`.
    pub fn resolution(&self) -> f64 {
        if self.is_direct() {
            self.t
        } else {
            self.t / ((1u64 << (self.r + 1)) as f64 * self.steps as f64)
        }
    }
}

/// An evolution operator stored either as its Pauli expansion (commuting
/// generators) or as a dense matrix.
#[derive(Debug, Clone)]
pub(crate) enum Propagator {
    Sparse { n: usize, coeffs: Vec<(PauliString, Complex64)> },
    Dense(CMatrix),
}

/// Commuting terms beyond this count are exponentiated densely.
const SPARSE_TERM_LIMIT: usize = 16;

impl Propagator {
    pub(crate) fn exact(h: &SparseHamiltonian, t: f64, dense_limit: usize) -> Result<Self> {
        let n = h.num_qubits();
        if h.sparsity() <= SPARSE_TERM_LIMIT && h.is_commuting() {
            // e^{-itΣh_j P_j} = Π_j (cos(h_j t) I - i sin(h_j t) P_j) for commuting P_j.
            let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
            acc.insert(PauliString::identity(n), Complex64::new(1.0, 0.0));
            for (p, c) in h.terms() {
                let (cos, sin) = (libm::cos(c * t), libm::sin(c * t));
                let mut next = BTreeMap::new();
                for (q, a) in acc {
                    let (prod, phase) = p.multiply_unchecked(&q);
                    *next.entry(q).or_insert(Complex64::new(0.0, 0.0)) += a * cos;
                    *next.entry(prod).or_insert(Complex64::new(0.0, 0.0)) +=
                        a * Complex64::new(0.0, -sin) * phase.to_complex();
                }
                acc = next;
            }
            let coeffs = acc.into_iter().filter(|(_, a)| a.norm_sqr() > 0.0).collect();
            return Ok(Propagator::Sparse { n, coeffs });
        }
        let m = h.dense_matrix_with_limit(dense_limit)?;
        Ok(Propagator::Dense(HermitianEigen::new(&m).evolution(t)))
    }

    pub(crate) fn num_qubits(&self) -> usize {
        match self {
            Propagator::Sparse { n, .. } => *n,
            Propagator::Dense(u) => u.nrows().trailing_zeros() as usize,
        }
    }

    /// `u_P = Tr[P U] / 2^n`.
    pub(crate) fn coefficient(&self, p: &PauliString) -> Complex64 {
        match self {
            Propagator::Sparse { coeffs, .. } => coeffs
                .iter()
                .find(|(q, _)| q == p)
                .map_or(Complex64::new(0.0, 0.0), |(_, a)| *a),
            Propagator::Dense(u) => dense_coefficient(u, p),
        }
    }

    /// Draws from `(1-λ)|u_P|² + λ/4^n`.
    pub(crate) fn sample<R: Rng + ?Sized>(&self, lambda: f64, rng: &mut R) -> PauliString {
        let n = self.num_qubits();
        if lambda > 0.0 && rng.gen::<f64>() < lambda {
            return PauliString::random_uniform(n, rng);
        }
        match self {
            Propagator::Sparse { coeffs, .. } => {
                let weights: Vec<f64> = coeffs.iter().map(|(_, a)| a.norm_sqr()).collect();
                coeffs[categorical(&weights, rng)].0.clone()
            }
            Propagator::Dense(u) => {
                let spectrum = PauliSpectrum::of(u);
                spectrum.pauli_at(categorical(&spectrum.probabilities(), rng))
            }
        }
    }
}

fn dense_coefficient(u: &CMatrix, p: &PauliString) -> Complex64 {
    let d = u.nrows();
    let (xm, zm) = p.dense_masks();
    let alpha = p.hermitian_phase().to_complex();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..d {
        let k = j ^ xm;
        let sign = if (zm & k).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        acc += u[(k, j)] * sign;
    }
    alpha * acc / d as f64
}

/// Index drawn proportionally to `weights` (which need not be normalized).
fn categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        last = i;
        if u < w {
            return i;
        }
        u -= w;
    }
    last
}

fn uniform_mass(n: usize) -> f64 {
    libm::pow(4.0, -(n as f64))
}

/// Undoes the depolarizing mixture on a single outcome frequency and takes the square root.
pub fn spam_corrected_magnitude(freq: f64, lambda: f64, n: usize) -> f64 {
    libm::sqrt(((freq - lambda * uniform_mass(n)) / (1.0 - lambda)).max(0.0))
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("evolution time must be finite and nonnegative"))
    }
}

/// `Q_S` for the subset encoded by the bits of `mask`, without phase.
fn subset_product(qs: &[PauliString], n: usize, mask: usize) -> PauliString {
    let mut acc = PauliString::identity(n);
    for (i, q) in qs.iter().enumerate() {
        if mask >> i & 1 == 1 {
            acc = acc.multiply_unchecked(q).0;
        }
    }
    acc
}

/// Restricted Hamiltonian plus the known drift term.
fn drifted_restriction(
    h: &SparseHamiltonian,
    qs: &[PauliString],
    drift: Option<(&PauliString, f64)>,
) -> Result<SparseHamiltonian> {
    let mut hr = h.restrict(qs)?;
    if let Some((p, c)) = drift {
        // An identity drift only contributes a global phase.
        if !p.is_identity() {
            hr.add_term(p.clone(), c)?;
        }
    }
    Ok(hr)
}

/// Executes the symmetric product formula
/// `(F_R ⋯ F_1 F_1 ⋯ F_R)^l` with `F_S = Q_S e^{-iτH} Q_S`, `τ = t / (2^{r+1} l)`,
/// and a trailing drift factor `e^{-i t c P / 2l}`.
pub fn trotter_product(
    h: &SparseHamiltonian,
    qs: &[PauliString],
    drift: Option<(&PauliString, f64)>,
    t: f64,
    steps: u64,
    dense_limit: usize,
) -> Result<CMatrix> {
    check_time(t)?;
    if steps == 0 {
        return Err(Error::invalid("product formula needs at least one step"));
    }
    let n = h.num_qubits();
    let r = qs.len();
    if r >= 24 {
        return Err(Error::invalid("too many conjugating strings for an explicit product formula"));
    }
    let eig = h.eigen_with_limit(dense_limit)?;
    let tau = t / ((1u64 << (r + 1)) as f64 * steps as f64);
    let base = eig.evolution(tau);
    let mut factors: Vec<CMatrix> = (0..1usize << r)
        .map(|mask| linalg::conjugate_by_pauli(&base, &subset_product(qs, n, mask)))
        .collect();
    if let Some((p, c)) = drift {
        let theta = c * t / (2.0 * steps as f64);
        let d = 1usize << n;
        let pm = p.dense_with_limit(dense_limit)?;
        factors.push(
            linalg::identity(d) * Complex64::new(libm::cos(theta), 0.0)
                + pm * Complex64::new(0.0, -libm::sin(theta)),
        );
    }
    let d = 1usize << n;
    let mut forward = linalg::identity(d);
    for f in &factors {
        forward = f * forward;
    }
    let mut backward = linalg::identity(d);
    for f in factors.iter().rev() {
        backward = f * backward;
    }
    // backward applies F_R first and F_1 last; forward then runs F_1 .. F_R.
    let step = forward * backward;
    Ok(matrix_power(&step, steps))
}

fn matrix_power(m: &CMatrix, mut k: u64) -> CMatrix {
    let mut result = linalg::identity(m.nrows());
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Product formula whose κ has been doubled until its diamond distance to
/// the exact restricted evolution is within `config.trotter_epsilon`.
pub fn calibrated_trotter(
    h: &SparseHamiltonian,
    qs: &[PauliString],
    drift: Option<(&PauliString, f64)>,
    t: f64,
    config: &OracleConfig,
) -> Result<(CMatrix, TrotterPlan)> {
    let exact = {
        let hr = drifted_restriction(h, qs, drift)?;
        HermitianEigen::new(&hr.dense_matrix_with_limit(config.dense_limit)?).evolution(t)
    };
    let drift_coeff = drift.map_or(0.0, |(_, c)| c);
    let mut kappa = config.trotter_kappa;
    for _ in 0..=16 {
        let plan = TrotterPlan::for_restriction(h, qs.len(), drift_coeff, t, config.trotter_epsilon, kappa)?;
        plan.queries(config.query_budget)?;
        let v = if plan.is_direct() {
            exact.clone()
        } else {
            trotter_product(h, qs, drift, t, plan.steps, config.dense_limit)?
        };
        if 2.0 * crate::distances::half_diamond_unchecked(&v, &exact) <= config.trotter_epsilon {
            return Ok((v, plan));
        }
        kappa *= 2.0;
    }
    Err(Error::invalid("product formula did not reach the diamond-norm budget"))
}

/// Prepares the propagator for one restricted evolution and returns the plan to charge.
fn prepare(
    h: &SparseHamiltonian,
    qs: &[PauliString],
    drift: Option<(&PauliString, f64)>,
    t: f64,
    config: &OracleConfig,
) -> Result<(Propagator, TrotterPlan)> {
    check_time(t)?;
    config.validate()?;
    if let Some(q) = qs.iter().find(|q| q.num_qubits() != h.num_qubits()) {
        return Err(Error::DimensionMismatch { expected: h.num_qubits(), found: q.num_qubits() });
    }
    match config.mode {
        EvolutionMode::Exact => {
            let drift_coeff = drift.map_or(0.0, |(_, c)| c);
            let plan = TrotterPlan::for_restriction(
                h,
                qs.len(),
                drift_coeff,
                t,
                config.trotter_epsilon,
                config.trotter_kappa,
            )?;
            plan.queries(config.query_budget)?;
            let hr = drifted_restriction(h, qs, drift)?;
            Ok((Propagator::exact(&hr, t, config.dense_limit)?, plan))
        }
        EvolutionMode::Trotter => {
            let (v, plan) = calibrated_trotter(h, qs, drift, t, config)?;
            Ok((Propagator::Dense(v), plan))
        }
    }
}

fn charge_plan(ledger: &mut ResourceLedger, plan: &TrotterPlan, runs: u64, budget: u64) -> Result<()> {
    let q = plan.queries(budget)?;
    ledger.charge_evolution(runs, q, plan.t, plan.resolution());
    Ok(())
}

/// `e^{-iHt}` for the true Hamiltonian, charged as a single query.
pub fn evolve(h: &SparseHamiltonian, t: f64, ledger: &mut ResourceLedger) -> Result<CMatrix> {
    check_time(t)?;
    let u = h.eigen()?.evolution(t);
    ledger.charge_evolution(1, 1, t, t);
    Ok(u)
}

/// `e^{-it(H_{Q_1..Q_r} + drift)}` as a dense matrix.
pub fn evolve_restricted(
    h: &SparseHamiltonian,
    qs: &[PauliString],
    t: f64,
    drift: Option<(&PauliString, f64)>,
    config: &OracleConfig,
    ledger: &mut ResourceLedger,
) -> Result<CMatrix> {
    let (prop, plan) = prepare(h, qs, drift, t, config)?;
    let u = match prop {
        Propagator::Dense(u) => u,
        Propagator::Sparse { n, coeffs } => {
            let d = 1usize << n;
            if n > config.dense_limit {
                return Err(Error::Capacity { qubits: n, limit: config.dense_limit });
            }
            let mut u = CMatrix::zeros(d, d);
            for (p, a) in coeffs {
                u += p.dense_with_limit(config.dense_limit)? * a;
            }
            u
        }
    };
    charge_plan(ledger, &plan, 1, config.query_budget)?;
    Ok(u)
}

/// One Bell-basis measurement of the Choi state of `u`.
pub fn pauli_sample<R: Rng + ?Sized>(
    u: &CMatrix,
    config: &OracleConfig,
    ledger: &mut ResourceLedger,
    rng: &mut R,
) -> Result<PauliString> {
    config.validate()?;
    let d = u.nrows();
    if !u.is_square() || !d.is_power_of_two() {
        return Err(Error::invalid("matrix dimension is not a power of two"));
    }
    let n = d.trailing_zeros() as usize;
    if n > config.dense_limit {
        return Err(Error::Capacity { qubits: n, limit: config.dense_limit });
    }
    let deviation = linalg::unitarity_deviation(u);
    if deviation > 1e-10 {
        return Err(Error::NotUnitary { deviation });
    }
    let p = Propagator::Dense(u.clone()).sample(config.spam_lambda, rng);
    ledger.charge_experiments(1, n as u32);
    Ok(p)
}

/// Frequency of `p0` among `shots` outcomes with probability `prob`, SPAM-corrected.
fn magnitude_from_shots<R: Rng + ?Sized>(prob: f64, shots: u64, lambda: f64, n: usize, rng: &mut R) -> Result<f64> {
    let prob = prob.clamp(0.0, 1.0);
    let hits = Binomial::new(shots, prob).map_err(|_| Error::invalid("invalid binomial parameters"))?.sample(rng);
    Ok(spam_corrected_magnitude(hits as f64 / shots as f64, lambda, n))
}

/// Estimates `|u_{p0}|` of the restricted evolution from `shots` Pauli samples.
#[allow(clippy::too_many_arguments)]
pub fn estimate_pauli_coeff_magnitude<R: Rng + ?Sized>(
    h: &SparseHamiltonian,
    qs: &[PauliString],
    drift: Option<(&PauliString, f64)>,
    p0: &PauliString,
    t: f64,
    shots: u64,
    config: &OracleConfig,
    ledger: &mut ResourceLedger,
    rng: &mut R,
) -> Result<f64> {
    if shots == 0 {
        return Err(Error::invalid("need at least one shot"));
    }
    if p0.num_qubits() != h.num_qubits() {
        return Err(Error::DimensionMismatch { expected: h.num_qubits(), found: p0.num_qubits() });
    }
    let (prop, plan) = prepare(h, qs, drift, t, config)?;
    charge_plan(ledger, &plan, shots, config.query_budget)?;
    ledger.charge_experiments(shots, h.num_qubits() as u32);
    let lambda = config.spam_lambda;
    let prob = (1.0 - lambda) * prop.coefficient(p0).norm_sqr() + lambda * uniform_mass(h.num_qubits());
    magnitude_from_shots(prob, shots, lambda, h.num_qubits(), rng)
}

/// The simulated laboratory: a hidden Hamiltonian, its access model and the running cost.
#[derive(Debug, Clone)]
pub struct EvolutionOracle {
    hidden: SparseHamiltonian,
    config: OracleConfig,
    ledger: ResourceLedger,
}

impl EvolutionOracle {
    pub fn new(hidden: SparseHamiltonian, config: OracleConfig) -> Result<Self> {
        config.validate()?;
        Ok(EvolutionOracle { hidden, config, ledger: ResourceLedger::new() })
    }

    pub fn num_qubits(&self) -> usize {
        self.hidden.num_qubits()
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn ledger(&self) -> &ResourceLedger {
        &self.ledger
    }

    pub fn take_ledger(&mut self) -> ResourceLedger {
        core::mem::take(&mut self.ledger)
    }

    /// The hidden Hamiltonian. For diagnostics and verification only; learners never read it.
    pub fn ground_truth(&self) -> &SparseHamiltonian {
        &self.hidden
    }

    /// One experiment: Pauli sampling of `e^{-it(H_{qs} + drift)}`.
    pub fn sample<R: Rng + ?Sized>(
        &mut self,
        qs: &[PauliString],
        drift: Option<(&PauliString, f64)>,
        t: f64,
        rng: &mut R,
    ) -> Result<PauliString> {
        let (prop, plan) = prepare(&self.hidden, qs, drift, t, &self.config)?;
        charge_plan(&mut self.ledger, &plan, 1, self.config.query_budget)?;
        self.ledger.charge_experiments(1, self.num_qubits() as u32);
        Ok(prop.sample(self.config.spam_lambda, rng))
    }

    /// `shots` experiments estimating `|u_{p0}|` of `e^{-it(H_{qs} + drift)}`.
    pub fn estimate_magnitude<R: Rng + ?Sized>(
        &mut self,
        qs: &[PauliString],
        drift: Option<(&PauliString, f64)>,
        p0: &PauliString,
        t: f64,
        shots: u64,
        rng: &mut R,
    ) -> Result<f64> {
        estimate_pauli_coeff_magnitude(&self.hidden, qs, drift, p0, t, shots, &self.config, &mut self.ledger, rng)
    }
}
