//! Physically motivated distances between Hamiltonians and their bounds.
//!
//! * `d_T(H1, H2)`: the largest half diamond distance between `e^{-itH1}` and
//!   `e^{-itH2}` over `t ∈ [0, T]`.
//! * `d_B(H1, H2)`: the largest half trace distance between the Gibbs states
//!   `e^{-βH}/Tr e^{-βH}` over `β ∈ [0, B]`.
//!
//! Both suprema are taken on a uniform grid with golden-section refinement
//! around the best grid point, and carry a certified grid error from a
//! Lipschitz bound.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;
use crate::linalg::{self, CMatrix, HermitianEigen};
use crate::pauli::PauliString;

pub const DEFAULT_GRID: usize = 2048;

const GOLDEN_ITERATIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceKind {
    TimeConstrained,
    TemperatureConstrained,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceResult {
    pub value: f64,
    /// The maximizing `t` or `β`.
    pub argmax: f64,
    /// Bound on how far `value` can sit below the true supremum.
    pub grid_error: f64,
    pub kind: DistanceKind,
}

/// `x mod 2π` in `[0, 2π)`.
pub fn circle_p(x: f64) -> f64 {
    let r = libm::fmod(x, TAU);
    let r = if r < 0.0 { r + TAU } else { r };
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `(x + π) mod 2π - π` in `[-π, π)`.
pub fn circle_q(x: f64) -> f64 {
    circle_p(x + PI) - PI
}

/// `min_x max(|q(a-x)|, |q(b-x)|)` in closed form: `½ min(|q(a)-q(b)|, |p(a)-p(b)|)`.
pub fn minmax_closed(a: f64, b: f64) -> f64 {
    0.5 * (circle_q(a) - circle_q(b)).abs().min((circle_p(a) - circle_p(b)).abs())
}

/// Length of the shortest arc of the unit circle containing all `phases`.
pub fn arc_spread(phases: &[f64]) -> f64 {
    if phases.len() < 2 {
        return 0.0;
    }
    let mut p: Vec<f64> = phases.iter().map(|&x| circle_p(x)).collect();
    p.sort_by(f64::total_cmp);
    let mut largest_gap = p[0] + TAU - p[p.len() - 1];
    for w in p.windows(2) {
        largest_gap = largest_gap.max(w[1] - w[0]);
    }
    (TAU - largest_gap).max(0.0)
}

/// `√(1 - min_ψ |⟨ψ|U|ψ⟩|²)` for a unitary with the given eigenphases: 1 once the
/// phases spread over more than a half circle, else `sin(spread/2)`.
pub fn half_diamond_from_phases(phases: &[f64]) -> f64 {
    let spread = arc_spread(phases);
    if spread >= PI {
        1.0
    } else {
        libm::sin(spread / 2.0)
    }
}

fn phases_of(m: &CMatrix) -> Vec<f64> {
    linalg::normal_eigenvalues(m).iter().map(|z| z.arg()).collect()
}

pub(crate) fn half_diamond_unchecked(v: &CMatrix, w: &CMatrix) -> f64 {
    half_diamond_from_phases(&phases_of(&(v.adjoint() * w)))
}

/// Half the diamond distance between the channels `ρ ↦ VρV†` and `ρ ↦ WρW†`.
pub fn half_diamond_unitary(v: &CMatrix, w: &CMatrix) -> Result<f64> {
    if v.shape() != w.shape() {
        return Err(Error::DimensionMismatch { expected: v.nrows(), found: w.nrows() });
    }
    for m in [v, w] {
        let deviation = linalg::unitarity_deviation(m);
        if deviation > 1e-10 {
            return Err(Error::NotUnitary { deviation });
        }
    }
    Ok(half_diamond_unchecked(v, w))
}

/// Maximizes `f` over `[0, upper]` on `grid` points, then refines around the best one.
fn grid_sup(upper: f64, grid: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let step = upper / (grid - 1) as f64;
    let (mut best_x, mut best) = (0.0, f(0.0));
    for k in 1..grid {
        let x = step * k as f64;
        let v = f(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let (mut a, mut b) = ((best_x - step).max(0.0), (best_x + step).min(upper));
    let g = (libm::sqrt(5.0) - 1.0) / 2.0;
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best {
            best = v;
            best_x = x;
        }
    }
    (best_x, best)
}

fn check_budget(budget: f64, grid: usize) -> Result<()> {
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::invalid("budget must be positive"));
    }
    if grid < 2 {
        return Err(Error::invalid("grid needs at least two points"));
    }
    Ok(())
}

fn check_pair(h1: &SparseHamiltonian, h2: &SparseHamiltonian) -> Result<()> {
    if h1.num_qubits() != h2.num_qubits() {
        return Err(Error::DimensionMismatch { expected: h1.num_qubits(), found: h2.num_qubits() });
    }
    Ok(())
}

fn eigenvectors(e: &HermitianEigen) -> CMatrix {
    e.vectors.clone().unwrap_or_else(|| linalg::identity(e.dim()))
}

/// Half diamond distance between `e^{-itH1}` and `e^{-itH2}` as a function of `t`.
struct EvolutionPair {
    e1: HermitianEigen,
    e2: HermitianEigen,
    /// `V1† V2`, or `None` when both Hamiltonians are diagonal.
    overlap: Option<CMatrix>,
}

impl EvolutionPair {
    fn new(m1: &CMatrix, m2: &CMatrix) -> Self {
        let (e1, e2) = (HermitianEigen::new(m1), HermitianEigen::new(m2));
        let overlap = match (&e1.vectors, &e2.vectors) {
            (None, None) => None,
            _ => Some(eigenvectors(&e1).adjoint() * eigenvectors(&e2)),
        };
        EvolutionPair { e1, e2, overlap }
    }

    fn at(&self, t: f64) -> f64 {
        match &self.overlap {
            None => {
                let phases: Vec<f64> =
                    self.e1.values.iter().zip(&self.e2.values).map(|(a, b)| t * (a - b)).collect();
                half_diamond_from_phases(&phases)
            }
            Some(m) => {
                // V†W = V1 (D1† M D2 M†) V1† with M = V1†V2, D_i = e^{-itΛ_i}.
                let d = m.nrows();
                let core = CMatrix::from_fn(d, d, |i, j| {
                    Complex64::from_polar(1.0, t * self.e1.values[i]) * m[(i, j)]
                        * Complex64::from_polar(1.0, -t * self.e2.values[j])
                }) * m.adjoint();
                half_diamond_from_phases(&phases_of(&core))
            }
        }
    }
}

/// `d_T` between dense Hermitian matrices.
pub fn d_t_dense(m1: &CMatrix, m2: &CMatrix, horizon: f64, grid: usize) -> Result<DistanceResult> {
    check_budget(horizon, grid)?;
    if m1.shape() != m2.shape() {
        return Err(Error::DimensionMismatch { expected: m1.nrows(), found: m2.nrows() });
    }
    let pair = EvolutionPair::new(m1, m2);
    let lipschitz = pair.e1.max_abs() + pair.e2.max_abs();
    let (argmax, value) = grid_sup(horizon, grid, |t| pair.at(t));
    Ok(DistanceResult {
        value: value.clamp(0.0, 1.0),
        argmax,
        grid_error: lipschitz * horizon / grid as f64,
        kind: DistanceKind::TimeConstrained,
    })
}

/// Time-constrained diamond distance `d_T(H1, H2)` with horizon `T`.
pub fn d_t(h1: &SparseHamiltonian, h2: &SparseHamiltonian, horizon: f64, grid: usize) -> Result<DistanceResult> {
    check_pair(h1, h2)?;
    check_budget(horizon, grid)?;
    d_t_dense(&h1.dense_matrix()?, &h2.dense_matrix()?, horizon, grid)
}

/// Gibbs weights `e^{-β(λ - λ_min)}` normalized, in the eigenbasis order.
fn gibbs_weights(values: &[f64], beta: f64) -> Vec<f64> {
    let shift = if beta >= 0.0 {
        values.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    let w: Vec<f64> = values.iter().map(|&l| libm::exp(-beta * (l - shift))).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

fn gibbs_matrix(e: &HermitianEigen, beta: f64) -> CMatrix {
    let w = gibbs_weights(&e.values, beta);
    let d = e.dim();
    match &e.vectors {
        None => CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, w.iter().map(|&x| Complex64::new(x, 0.0)))),
        Some(v) => {
            let mut scaled = v.clone();
            for (j, &x) in w.iter().enumerate() {
                scaled.column_mut(j).iter_mut().for_each(|e| *e *= x);
            }
            scaled * v.adjoint()
        }
    }
}

/// `‖ρ1(β) - ρ2(β)‖_tr` for Gibbs states `e^{-βH}/Tr e^{-βH}` (any sign of `β`).
fn gibbs_trace_norm(e1: &HermitianEigen, e2: &HermitianEigen, beta: f64) -> f64 {
    if e1.vectors.is_none() && e2.vectors.is_none() {
        let (w1, w2) = (gibbs_weights(&e1.values, beta), gibbs_weights(&e2.values, beta));
        return w1.iter().zip(&w2).map(|(a, b)| (a - b).abs()).sum();
    }
    linalg::trace_norm_hermitian(&(gibbs_matrix(e1, beta) - gibbs_matrix(e2, beta)))
}

/// `‖ρ1(β) - ρ2(β)‖_tr` between Gibbs states of dense Hermitian matrices.
pub fn gibbs_trace_distance_dense(m1: &CMatrix, m2: &CMatrix, beta: f64) -> Result<f64> {
    if m1.shape() != m2.shape() {
        return Err(Error::DimensionMismatch { expected: m1.nrows(), found: m2.nrows() });
    }
    Ok(gibbs_trace_norm(&HermitianEigen::new(m1), &HermitianEigen::new(m2), beta))
}

/// `d_B` between dense Hermitian matrices.
pub fn d_b_dense(m1: &CMatrix, m2: &CMatrix, budget: f64, grid: usize) -> Result<DistanceResult> {
    check_budget(budget, grid)?;
    if m1.shape() != m2.shape() {
        return Err(Error::DimensionMismatch { expected: m1.nrows(), found: m2.nrows() });
    }
    let (e1, e2) = (HermitianEigen::new(m1), HermitianEigen::new(m2));
    let spread = |e: &HermitianEigen| {
        let v = e.sorted_values();
        v.last().copied().unwrap_or(0.0) - v.first().copied().unwrap_or(0.0)
    };
    // d/dβ ρ(β) = -(H - ⟨H⟩)ρ has trace norm at most the spectral spread.
    let lipschitz = 0.5 * (spread(&e1) + spread(&e2));
    let (argmax, value) = grid_sup(budget, grid, |beta| 0.5 * gibbs_trace_norm(&e1, &e2, beta));
    Ok(DistanceResult {
        value: value.clamp(0.0, 1.0),
        argmax,
        grid_error: lipschitz * budget / grid as f64,
        kind: DistanceKind::TemperatureConstrained,
    })
}

/// Temperature-constrained trace distance `d_B(H1, H2)` with inverse-temperature budget `B`.
pub fn d_b(h1: &SparseHamiltonian, h2: &SparseHamiltonian, budget: f64, grid: usize) -> Result<DistanceResult> {
    check_pair(h1, h2)?;
    check_budget(budget, grid)?;
    d_b_dense(&h1.dense_matrix()?, &h2.dense_matrix()?, budget, grid)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsBoundCheck {
    /// `‖e^{H1}/Tr e^{H1} - e^{H2}/Tr e^{H2}‖_tr`.
    pub lhs: f64,
    /// `‖H1 - H2‖_op`.
    pub rhs_new: f64,
    /// `2(e^{‖H1 - H2‖_op} - 1)`.
    pub rhs_old: f64,
}

impl GibbsBoundCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs_new + tol && self.rhs_new <= self.rhs_old + tol
    }
}

pub fn gibbs_trace_bound_check_dense(m1: &CMatrix, m2: &CMatrix) -> Result<GibbsBoundCheck> {
    let lhs = gibbs_trace_distance_dense(m1, m2, -1.0)?;
    let rhs_new = linalg::op_norm_hermitian(&(m1 - m2));
    Ok(GibbsBoundCheck { lhs, rhs_new, rhs_old: 2.0 * (libm::exp(rhs_new) - 1.0) })
}

pub fn gibbs_trace_bound_check(h1: &SparseHamiltonian, h2: &SparseHamiltonian) -> Result<GibbsBoundCheck> {
    check_pair(h1, h2)?;
    gibbs_trace_bound_check_dense(&h1.dense_matrix()?, &h2.dense_matrix()?)
}

/// `H1 = |0ⁿ⟩⟨0ⁿ| - |1ⁿ⟩⟨1ⁿ|` and `H2 = -H1`: operator-norm distance 2, yet
/// Gibbs states that are exponentially close in `n` at bounded `β`.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub h1: SparseHamiltonian,
    pub h2: SparseHamiltonian,
    pub dense1: CMatrix,
    pub dense2: CMatrix,
}

/// Builds the pair. Its Pauli form is `H1 = 2^{1-n} Σ_{|S| odd} Z_S`.
pub fn counterexample_family(n: usize) -> Result<Counterexample> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if n > crate::DEFAULT_DENSE_LIMIT {
        return Err(Error::Capacity { qubits: n, limit: crate::DEFAULT_DENSE_LIMIT });
    }
    let d = 1usize << n;
    let coeff = libm::pow(2.0, 1.0 - n as f64);
    let mut h1 = SparseHamiltonian::zero(n);
    for zm in 0..d {
        if zm.count_ones() % 2 == 1 {
            h1.add_term(PauliString::from_dense_masks(n, 0, zm), coeff)?;
        }
    }
    let h2 = h1.scaled(-1.0);
    let mut dense1 = CMatrix::zeros(d, d);
    dense1[(0, 0)] = Complex64::new(1.0, 0.0);
    dense1[(d - 1, d - 1)] = Complex64::new(-1.0, 0.0);
    let dense2 = -dense1.clone();
    Ok(Counterexample { h1, h2, dense1, dense2 })
}

/// `‖ρ1(β) - ρ2(β)‖_tr = 2(e^β - e^{-β}) / (2ⁿ - 2 + e^β + e^{-β})` for the pair above.
pub fn counterexample_trace_distance(n: usize, beta: f64) -> f64 {
    let (ep, em) = (libm::exp(beta), libm::exp(-beta));
    2.0 * (ep - em) / (libm::pow(2.0, n as f64) - 2.0 + ep + em)
}

/// `(1/2π) max_{j,k} min(|p(λ_j) - p(λ_k)|, |q(λ_j) - q(λ_k)|)` over the spectrum.
pub fn eigenphase_lower_bound_from_spectrum(eigenvalues: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for (j, &a) in eigenvalues.iter().enumerate() {
        for &b in &eigenvalues[j + 1..] {
            let v = (circle_p(a) - circle_p(b)).abs().min((circle_q(a) - circle_q(b)).abs());
            best = best.max(v);
        }
    }
    best / TAU
}

pub fn eigenphase_lower_bound(h: &SparseHamiltonian) -> Result<f64> {
    Ok(eigenphase_lower_bound_from_spectrum(&h.spectral_data()?.eigenvalues))
}

/// `sin(min(π/2, TΔ))`, the upper bound on `d_T` for `Δ = ‖H1 - H2‖_op`.
pub fn dt_upper_bound(horizon: f64, delta_op: f64) -> f64 {
    libm::sin((horizon * delta_op).min(PI / 2.0))
}

/// `(1/4π) min(T, 1/4π) Δ`, the lower bound on `d_T` for traceless `‖H_i‖_op ≤ 1`.
pub fn dt_lower_bound(horizon: f64, delta_op: f64) -> f64 {
    horizon.min(1.0 / (4.0 * PI)) * delta_op / (4.0 * PI)
}

/// `(B/2) Δ`, the upper bound on `d_B`.
pub fn db_upper_bound(budget: f64, delta_op: f64) -> f64 {
    0.5 * budget * delta_op
}
