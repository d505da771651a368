//! Sparse Hamiltonians `H = Σ h_P P` in the Pauli basis.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, HermitianEigen};
use crate::pauli::PauliString;
use crate::ZERO_TOLERANCE;

/// A traceless Hamiltonian stored as its nonzero Pauli coefficients.
///
/// The identity is never stored and coefficients with magnitude below
/// [`ZERO_TOLERANCE`] are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHamiltonian {
    n: usize,
    terms: BTreeMap<PauliString, f64>,
}

/// Coefficient norms of `h`, plus the operator norm of the assembled matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub op: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `λ_max - λ_min`.
    pub spread: f64,
}

impl SpectralData {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let spread = match (eigenvalues.first(), eigenvalues.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        };
        SpectralData { eigenvalues, spread }
    }
}

impl SparseHamiltonian {
    pub fn zero(n: usize) -> Self {
        SparseHamiltonian { n, terms: BTreeMap::new() }
    }

    /// Builds a Hamiltonian from `(pauli, coeff)` pairs.
    ///
    /// Rejects identity terms, repeated Paulis, non-finite coefficients and
    /// qubit-count mismatches. Zero coefficients are accepted and dropped.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        let mut h = SparseHamiltonian::zero(n);
        for (p, c) in terms {
            if h.terms.contains_key(&p) {
                return Err(Error::invalid(alloc::format!("duplicate term {p}")));
            }
            h.add_term(p, c)?;
        }
        Ok(h)
    }

    /// Parses `[("XX", 0.5), ("ZI", 0.3)]`-style literals. Qubit count comes from the first string.
    pub fn from_letters(terms: &[(&str, f64)]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|(s, c)| s.parse::<PauliString>().map(|p| (p, *c)))
            .collect::<Result<Vec<_>>>()?;
        let n = parsed.first().map_or(1, |(p, _)| p.num_qubits());
        SparseHamiltonian::from_terms(n, parsed)
    }

    /// Adds `coeff` to the coefficient of `p`, dropping the term if the sum vanishes.
    pub fn add_term(&mut self, p: PauliString, coeff: f64) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.num_qubits() });
        }
        if p.is_identity() {
            return Err(Error::invalid("identity term in a traceless Hamiltonian"));
        }
        if !coeff.is_finite() {
            return Err(Error::invalid("non-finite coefficient"));
        }
        let sum = self.terms.get(&p).copied().unwrap_or(0.0) + coeff;
        if sum.abs() < ZERO_TOLERANCE {
            self.terms.remove(&p);
        } else {
            self.terms.insert(p, sum);
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Number of stored terms.
    pub fn sparsity(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, p: &PauliString) -> f64 {
        self.terms.get(p).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        self.terms.contains_key(p)
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&PauliString, f64)> + '_ {
        self.terms.iter().map(|(p, &c)| (p, c))
    }

    pub fn support(&self) -> impl Iterator<Item = &PauliString> + '_ {
        self.terms.keys()
    }

    /// Terms with `|h_P| >= eps`.
    pub fn effective_support(&self, eps: f64) -> Vec<PauliString> {
        self.terms.iter().filter(|(_, c)| c.abs() >= eps).map(|(p, _)| p.clone()).collect()
    }

    /// True when every coefficient satisfies `|h_P| <= 1`.
    pub fn is_normalized(&self) -> bool {
        self.terms.values().all(|c| c.abs() <= 1.0)
    }

    /// Keeps the terms commuting with every string in `qs`.
    pub fn restrict(&self, qs: &[PauliString]) -> Result<SparseHamiltonian> {
        if let Some(q) = qs.iter().find(|q| q.num_qubits() != self.n) {
            return Err(Error::DimensionMismatch { expected: self.n, found: q.num_qubits() });
        }
        let terms = self
            .terms
            .iter()
            .filter(|(p, _)| qs.iter().all(|q| p.commutes_with(q)))
            .map(|(p, &c)| (p.clone(), c))
            .collect();
        Ok(SparseHamiltonian { n: self.n, terms })
    }

    /// `self - other`, coefficientwise.
    pub fn difference(&self, other: &SparseHamiltonian) -> Result<SparseHamiltonian> {
        let mut out = self.clone();
        for (p, c) in other.terms() {
            out.add_term(p.clone(), -c)?;
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: f64) -> SparseHamiltonian {
        let mut out = SparseHamiltonian::zero(self.n);
        for (p, c) in self.terms() {
            // Cannot fail: same qubit count, no identity, finite unless factor is not.
            let _ = out.add_term(p.clone(), c * factor);
        }
        out
    }

    /// Keeps the `k` largest-magnitude terms (ties broken by Pauli order).
    pub fn truncated(&self, k: usize) -> SparseHamiltonian {
        if self.terms.len() <= k {
            return self.clone();
        }
        let mut all: Vec<_> = self.terms.iter().collect();
        all.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
        let terms = all.into_iter().take(k).map(|(p, &c)| (p.clone(), c)).collect();
        SparseHamiltonian { n: self.n, terms }
    }

    /// True when all terms pairwise commute.
    pub fn is_commuting(&self) -> bool {
        let ps: Vec<_> = self.terms.keys().collect();
        ps.iter().enumerate().all(|(i, p)| ps[i + 1..].iter().all(|q| p.commutes_with(q)))
    }

    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.terms.values().map(|c| c * c).sum())
    }

    pub fn linf_norm(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn dense_matrix_with_limit(&self, limit: usize) -> Result<CMatrix> {
        if self.n > limit || self.n > 30 {
            return Err(Error::Capacity { qubits: self.n, limit });
        }
        let d = 1usize << self.n;
        let mut m = CMatrix::zeros(d, d);
        for (p, &c) in &self.terms {
            let (xm, zm) = p.dense_masks();
            let alpha = p.hermitian_phase().to_complex() * c;
            for col in 0..d {
                let entry = if (zm & col).count_ones() % 2 == 0 { alpha } else { -alpha };
                m[(col ^ xm, col)] += entry;
            }
        }
        Ok(m)
    }

    pub fn dense_matrix(&self) -> Result<CMatrix> {
        self.dense_matrix_with_limit(crate::DEFAULT_DENSE_LIMIT)
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        self.eigen_with_limit(crate::DEFAULT_DENSE_LIMIT)
    }

    pub fn eigen_with_limit(&self, limit: usize) -> Result<HermitianEigen> {
        Ok(HermitianEigen::new(&self.dense_matrix_with_limit(limit)?))
    }

    pub fn op_norm(&self) -> Result<f64> {
        if self.terms.len() == 1 {
            return Ok(self.linf_norm());
        }
        Ok(self.eigen()?.max_abs())
    }

    pub fn norms(&self) -> Result<Norms> {
        Ok(Norms { l1: self.l1_norm(), l2: self.l2_norm(), linf: self.linf_norm(), op: self.op_norm()? })
    }

    pub fn spectral_data(&self) -> Result<SpectralData> {
        Ok(SpectralData::from_eigenvalues(self.eigen()?.values))
    }

    /// `s` distinct non-identity Paulis with coefficients `±U[floor, coeff_range]`.
    pub fn random_instance<R: Rng + ?Sized>(
        n: usize,
        s: usize,
        coeff_range: f64,
        floor: f64,
        rng: &mut R,
    ) -> Result<SparseHamiltonian> {
        if n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        let capacity = if n >= 32 { u64::MAX } else { (1u64 << (2 * n)) - 1 };
        if s == 0 || s as u64 > capacity {
            return Err(Error::invalid(alloc::format!("sparsity {s} out of range for {n} qubits")));
        }
        if !(floor >= 0.0 && floor <= coeff_range && coeff_range.is_finite()) {
            return Err(Error::invalid("need 0 <= floor <= coeff_range"));
        }
        let mut h = SparseHamiltonian::zero(n);
        while h.terms.len() < s {
            let p = PauliString::random_uniform(n, rng);
            if p.is_identity() || h.terms.contains_key(&p) {
                continue;
            }
            let mut mag = if floor < coeff_range { rng.gen_range(floor..=coeff_range) } else { floor };
            if mag < ZERO_TOLERANCE {
                mag = ZERO_TOLERANCE;
            }
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            h.terms.insert(p, sign * mag);
        }
        Ok(h)
    }
}

/// Dense symmetrization `(A + Q A Q) / 2`.
pub fn symmetrize(a: &CMatrix, q: &PauliString) -> CMatrix {
    (a + linalg::conjugate_by_pauli(a, q)) * Complex64::new(0.5, 0.0)
}
