//! Dense complex linear algebra used by the simulator.
//!
//! Eigensolvers come from `nalgebra`; everything here is thin glue plus the
//! fast Pauli-coefficient transform.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::PauliString;

pub type CMatrix = DMatrix<Complex64>;

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Spectral decomposition `H = V diag(values) V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// `None` when the input was already diagonal (eigenvectors are the basis).
    pub vectors: Option<CMatrix>,
}

fn is_diagonal(m: &CMatrix) -> bool {
    let d = m.nrows();
    (0..d).all(|c| (0..d).all(|r| r == c || m[(r, c)] == Complex64::new(0.0, 0.0)))
}

impl HermitianEigen {
    /// Decomposes a Hermitian matrix. Only the lower triangle is trusted.
    pub fn new(h: &CMatrix) -> Self {
        if is_diagonal(h) {
            // Basis order is kept so that `vectors == None` means identity.
            return HermitianEigen { values: h.diagonal().iter().map(|v| v.re).collect(), vectors: None };
        }
        let eig = h.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = eig.eigenvectors.select_columns(order.iter());
        HermitianEigen { values, vectors: Some(vectors) }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `V diag(f(λ)) V†`.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let d = self.dim();
        match &self.vectors {
            None => CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                d,
                self.values.iter().map(|&l| f(l)),
            )),
            Some(v) => {
                let mut scaled = v.clone();
                for (j, &l) in self.values.iter().enumerate() {
                    let fl = f(l);
                    scaled.column_mut(j).iter_mut().for_each(|e| *e *= fl);
                }
                scaled * v.adjoint()
            }
        }
    }

    /// `e^{-iHt}`.
    pub fn evolution(&self, t: f64) -> CMatrix {
        self.apply(|l| Complex64::from_polar(1.0, -l * t))
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(h: &CMatrix) -> Vec<f64> {
    HermitianEigen::new(h).sorted_values()
}

/// Largest singular value.
pub fn op_norm(a: &CMatrix) -> f64 {
    let gram = a.adjoint() * a;
    let top = eigvalsh(&gram).last().copied().unwrap_or(0.0);
    libm::sqrt(top.max(0.0))
}

pub fn op_norm_hermitian(h: &CMatrix) -> f64 {
    HermitianEigen::new(h).max_abs()
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(h: &CMatrix) -> f64 {
    HermitianEigen::new(h).values.iter().map(|v| v.abs()).sum()
}

/// Frobenius norm of `U†U - I`; bounds the operator-norm deviation from above.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let d = u.nrows();
    (u.adjoint() * u - identity(d)).norm()
}

/// Eigenvalues of a normal (e.g. unitary) matrix.
///
/// `M = A + iB` with commuting Hermitian `A`, `B`, so one eigenbasis of
/// `A + αB` diagonalizes `M` whenever the combination is non-degenerate.
/// Near-degenerate clusters are split again along `A + βB` restricted to the
/// cluster. Schur iteration is avoided since it stalls on near-scalar input.
pub fn normal_eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    const ALPHA: f64 = 0.754_877_666_246_692_7;
    const BETA: f64 = -1.324_717_957_244_746;
    let d = m.nrows();
    if is_diagonal(m) {
        return (0..d).map(|i| m[(i, i)]).collect();
    }
    let adj = m.adjoint();
    let a = (m + &adj) * Complex64::new(0.5, 0.0);
    let b = (m - &adj) * Complex64::new(0.0, -0.5);
    let k = &a + &b * Complex64::new(ALPHA, 0.0);
    let eig = k.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut basis = eig.eigenvectors.select_columns(order.iter());
    let scale = vals.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let tol = 1e-7 * scale;
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && vals[end] - vals[end - 1] <= tol {
            end += 1;
        }
        if end - start > 1 {
            let v = basis.columns(start, end - start).into_owned();
            let second = &a + &b * Complex64::new(BETA, 0.0);
            let local = v.adjoint() * second * &v;
            let rot = local.symmetric_eigen().eigenvectors;
            basis.columns_mut(start, end - start).copy_from(&(v * rot));
        }
        start = end;
    }
    (0..d)
        .map(|j| {
            let v = basis.column(j);
            (v.adjoint() * m * v)[(0, 0)]
        })
        .collect()
}

/// `P A P` for a Hermitian Pauli `P`, in `O(d^2)`.
pub fn conjugate_by_pauli(a: &CMatrix, p: &PauliString) -> CMatrix {
    let d = a.nrows();
    let (xm, zm) = p.dense_masks();
    // P|j> = α (-1)^{zm·j} |j ^ xm>; the α² factor cancels against the
    // parity shift (-1)^{zm·xm} between j and j ^ xm.
    let sign = |j: usize| if (zm & j).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    CMatrix::from_fn(d, d, |r, c| {
        let (rs, cs) = (r ^ xm, c ^ xm);
        a[(rs, cs)] * (sign(rs) * sign(cs))
    })
}

/// Pauli coefficients `u_P = Tr[P U] / 2^n` of a `2^n x 2^n` matrix.
///
/// For each X-mask `a` the diagonal-shifted entries `U[m, m ^ a]` are
/// gathered and Walsh–Hadamard transformed over `m`, which yields
/// `Tr[X^a Z^b U]` for every Z-mask `b` at once: `O(n 4^n)` in total.
#[derive(Debug, Clone)]
pub struct PauliSpectrum {
    n: usize,
    /// Indexed by `(x_mask << n) | z_mask` in dense-mask layout.
    coeffs: Vec<Complex64>,
}

impl PauliSpectrum {
    pub fn of(u: &CMatrix) -> Self {
        let d = u.nrows();
        debug_assert!(d.is_power_of_two() && u.is_square());
        let n = d.trailing_zeros() as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d * d];
        let mut buf = vec![Complex64::new(0.0, 0.0); d];
        let scale = 1.0 / d as f64;
        for a in 0..d {
            for (m, slot) in buf.iter_mut().enumerate() {
                *slot = u[(m, m ^ a)];
            }
            walsh_hadamard(&mut buf);
            for b in 0..d {
                let y = (a & b).count_ones() as i64;
                let alpha = crate::pauli::Phase::from_power(y).to_complex();
                coeffs[(a << n) | b] = alpha * buf[b] * scale;
            }
        }
        PauliSpectrum { n, coeffs }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        let (xm, zm) = p.dense_masks();
        self.coeffs[(xm << self.n) | zm]
    }

    pub fn pauli_at(&self, index: usize) -> PauliString {
        let d = 1usize << self.n;
        PauliString::from_dense_masks(self.n, index >> self.n, index & (d - 1))
    }

    /// `|u_P|^2` for every index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PauliString, Complex64)> + '_ {
        self.coeffs.iter().enumerate().map(|(i, &c)| (self.pauli_at(i), c))
    }
}

fn walsh_hadamard(v: &mut [Complex64]) {
    let mut h = 1;
    while h < v.len() {
        for block in (0..v.len()).step_by(2 * h) {
            for j in block..block + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}
