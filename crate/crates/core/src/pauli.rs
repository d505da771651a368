//! Pauli strings over n qubits.
//!
//! A string is stored as two packed bit vectors `(x, z)`. The represented
//! operator is the Hermitian Pauli `i^{|x & z|} X^{x_1}Z^{z_1} ⊗ … ⊗ X^{x_n}Z^{z_n}`,
//! so `Y` is `(1, 1)` and every string squares to the identity.
//!
//! Letter strings put qubit 0 first: `"XZ"` is `X ⊗ Z`. In dense matrices
//! qubit 0 is the most significant bit of the basis index.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

type Words = SmallVec<[u64; 2]>;

/// Power of `i`: the scalar `i^k` for `k` in `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl core::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: Words,
    z: Words,
}

fn word_count(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

fn tail_mask(n: usize, word: usize) -> u64 {
    let used = n.saturating_sub(word * 64);
    if used >= 64 {
        u64::MAX
    } else {
        (1u64 << used) - 1
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = word_count(n);
        PauliString { n, x: smallvec![0; w], z: smallvec![0; w] }
    }

    /// Builds a string from per-qubit bits, qubit `k` at position `k`.
    pub fn from_bits(x: &[bool], z: &[bool]) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: z.len() });
        }
        let mut p = PauliString::identity(x.len());
        for (k, (&a, &b)) in x.iter().zip(z).enumerate() {
            p.set(k, a, b);
        }
        Ok(p)
    }

    /// Single-qubit letter `letter` on qubit `k`, identity elsewhere.
    pub fn single(n: usize, k: usize, letter: char) -> Result<Self> {
        if k >= n {
            return Err(Error::invalid("qubit index out of range"));
        }
        let (a, b) = letter_bits(letter)?;
        let mut p = PauliString::identity(n);
        p.set(k, a, b);
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bit(&self, k: usize) -> bool {
        self.x[k / 64] >> (k % 64) & 1 == 1
    }

    pub fn z_bit(&self, k: usize) -> bool {
        self.z[k / 64] >> (k % 64) & 1 == 1
    }

    fn set(&mut self, k: usize, a: bool, b: bool) {
        let (w, bit) = (k / 64, 1u64 << (k % 64));
        if a {
            self.x[w] |= bit;
        } else {
            self.x[w] &= !bit;
        }
        if b {
            self.z[w] |= bit;
        } else {
            self.z[w] &= !bit;
        }
    }

    pub fn letter(&self, k: usize) -> char {
        match (self.x_bit(k), self.z_bit(k)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(self.z.iter()).all(|&w| w == 0)
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    /// Number of `Y` factors; the Hermitian phase is `i` to this power.
    fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(a, b)| (a & b).count_ones()).sum()
    }

    fn check_same(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            Err(Error::DimensionMismatch { expected: self.n, found: other.n })
        } else {
            Ok(())
        }
    }

    /// `x_p · z_q + z_p · x_q (mod 2)`: 0 when the operators commute, 1 when they anticommute.
    pub fn symplectic_product(&self, other: &PauliString) -> Result<u8> {
        self.check_same(other)?;
        Ok(self.symplectic_unchecked(other))
    }

    fn symplectic_unchecked(&self, other: &PauliString) -> u8 {
        let mut acc = 0u32;
        for i in 0..self.x.len() {
            acc ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones();
        }
        (acc & 1) as u8
    }

    /// Panics if the qubit counts differ.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n, other.n, "commutes_with on different qubit counts");
        self.symplectic_unchecked(other) == 0
    }

    /// Returns `(r, phase)` with `self · other = phase · r`.
    pub fn multiply(&self, other: &PauliString) -> Result<(PauliString, Phase)> {
        self.check_same(other)?;
        Ok(self.multiply_unchecked(other))
    }

    pub(crate) fn multiply_unchecked(&self, other: &PauliString) -> (PauliString, Phase) {
        let mut out = PauliString::identity(self.n);
        let mut cross = 0u32;
        for i in 0..self.x.len() {
            out.x[i] = self.x[i] ^ other.x[i];
            out.z[i] = self.z[i] ^ other.z[i];
            // Z^b X^a = (-1)^{ab} X^a Z^b when moving self's Z past other's X.
            cross += (self.z[i] & other.x[i]).count_ones();
        }
        let k = self.y_count() as i64 + other.y_count() as i64 - out.y_count() as i64
            + 2 * cross as i64;
        (out, Phase::from_power(k))
    }

    /// Bit masks `(x, z)` in dense-index layout (qubit 0 most significant). Requires `n <= 63`.
    pub(crate) fn dense_masks(&self) -> (usize, usize) {
        debug_assert!(self.n <= 63);
        let (mut xm, mut zm) = (0usize, 0usize);
        for k in 0..self.n {
            let pos = self.n - 1 - k;
            if self.x_bit(k) {
                xm |= 1 << pos;
            }
            if self.z_bit(k) {
                zm |= 1 << pos;
            }
        }
        (xm, zm)
    }

    /// Inverse of [`PauliString::dense_masks`].
    pub(crate) fn from_dense_masks(n: usize, xm: usize, zm: usize) -> Self {
        let mut p = PauliString::identity(n);
        for k in 0..n {
            let pos = n - 1 - k;
            p.set(k, xm >> pos & 1 == 1, zm >> pos & 1 == 1);
        }
        p
    }

    /// `i^{|x & z|}`, the Hermitizing phase of this string.
    pub(crate) fn hermitian_phase(&self) -> Phase {
        Phase::from_power(self.y_count() as i64)
    }

    /// Dense `2^n x 2^n` matrix, refusing qubit counts above `limit`.
    pub fn dense_with_limit(&self, limit: usize) -> Result<CMatrix> {
        if self.n > limit || self.n > 30 {
            return Err(Error::Capacity { qubits: self.n, limit });
        }
        let d = 1usize << self.n;
        let (xm, zm) = self.dense_masks();
        let alpha = self.hermitian_phase().to_complex();
        let mut m = CMatrix::zeros(d, d);
        for col in 0..d {
            let sign = if (zm & col).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[(col ^ xm, col)] = alpha * sign;
        }
        Ok(m)
    }

    pub fn dense(&self) -> Result<CMatrix> {
        self.dense_with_limit(crate::DEFAULT_DENSE_LIMIT)
    }

    /// Uniform over all `4^n` strings, identity included.
    pub fn random_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut p = PauliString::identity(n);
        for w in 0..p.x.len() {
            let mask = tail_mask(n, w);
            p.x[w] = rng.gen::<u64>() & mask;
            p.z[w] = rng.gen::<u64>() & mask;
        }
        p
    }

    /// Uniform over the `4^n / 2` strings commuting with `self`.
    ///
    /// A uniform string that anticommutes is mapped to a commuting one by a
    /// fixed anticommuting partner; the map is a bijection between the two
    /// halves, so the result is uniform on the commutant. The identity has
    /// every string in its commutant and falls back to [`PauliString::random_uniform`].
    pub fn random_commuting<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let mut q = PauliString::random_uniform(self.n, rng);
        if let Some(partner) = self.anticommuting_partner() {
            if !self.commutes_with(&q) {
                for w in 0..q.x.len() {
                    q.x[w] ^= partner.x[w];
                    q.z[w] ^= partner.z[w];
                }
            }
        }
        q
    }

    /// A single-qubit string anticommuting with `self`, if `self` is not the identity.
    fn anticommuting_partner(&self) -> Option<PauliString> {
        (0..self.n).find_map(|k| match (self.x_bit(k), self.z_bit(k)) {
            (false, false) => None,
            (true, _) => PauliString::single(self.n, k, 'Z').ok(),
            (false, true) => PauliString::single(self.n, k, 'X').ok(),
        })
    }

    /// Enumerates all `4^n` strings in dense-mask order. Intended for small `n`.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        assert!(n <= 15, "enumeration of 4^n strings is limited to n <= 15");
        let d = 1usize << n;
        (0..d * d).map(move |idx| PauliString::from_dense_masks(n, idx / d, idx % d))
    }

    pub fn to_letters(&self) -> String {
        (0..self.n).map(|k| self.letter(k)).collect()
    }
}

fn letter_bits(c: char) -> Result<(bool, bool)> {
    match c {
        'I' => Ok((false, false)),
        'X' => Ok((true, false)),
        'Z' => Ok((false, true)),
        'Y' => Ok((true, true)),
        other => Err(Error::Parse(alloc::format!("unexpected Pauli letter {other:?}"))),
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<char> = s.trim().chars().collect();
        if letters.is_empty() {
            return Err(Error::Parse("empty Pauli string".into()));
        }
        let mut p = PauliString::identity(letters.len());
        for (k, c) in letters.into_iter().enumerate() {
            let (a, b) = letter_bits(c)?;
            p.set(k, a, b);
        }
        Ok(p)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.n {
            write!(f, "{}", self.letter(k))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;
    use std::string::ToString;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Explicit 2x2 matrices, independent of the bit representation.
    fn letter_matrix(l: char) -> CMatrix {
        let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
        match l {
            'I' => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
            'X' => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
            'Y' => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            'Z' => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
            _ => unreachable!(),
        }
    }

    fn kron_dense(s: &PauliString) -> CMatrix {
        let letters = s.to_letters();
        let mut it = letters.chars();
        let mut m = letter_matrix(it.next().unwrap());
        for l in it {
            m = kron(&m, &letter_matrix(l));
        }
        m
    }

    fn close(a: &CMatrix, b: &CMatrix) -> bool {
        (a - b).iter().all(|v| v.norm() < 1e-12)
    }

    #[test]
    fn symplectic_examples() {
        assert_eq!(p("X").symplectic_product(&p("Z")).unwrap(), 1);
        assert_eq!(p("XX").symplectic_product(&p("ZZ")).unwrap(), 0);
        assert_eq!(p("XYZ").symplectic_product(&p("XYZ")).unwrap(), 0);
        let xx = kron_dense(&p("XX"));
        let zz = kron_dense(&p("ZZ"));
        assert!(close(&(&xx * &zz), &(&zz * &xx)));
        assert!(matches!(
            p("X").symplectic_product(&p("XX")),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn multiply_examples() {
        let (r, ph) = p("X").multiply(&p("Z")).unwrap();
        assert_eq!((r.to_letters().as_str(), ph), ("Y", Phase::MINUS_I));
        let (r, ph) = p("XZY").multiply(&p("III")).unwrap();
        assert_eq!((r, ph), (p("XZY"), Phase::ONE));
        let (r, ph) = p("Y").multiply(&p("Y")).unwrap();
        assert_eq!((r, ph), (p("I"), Phase::ONE));
        assert!(p("X").multiply(&p("XX")).is_err());
    }

    #[test]
    fn dense_single_qubit() {
        assert!(close(&p("Z").dense().unwrap(), &letter_matrix('Z')));
        assert!(close(&p("I").dense().unwrap(), &letter_matrix('I')));
        assert!(close(&p("Y").dense().unwrap(), &letter_matrix('Y')));
        assert!(matches!(
            PauliString::identity(13).dense(),
            Err(Error::Capacity { qubits: 13, limit: 12 })
        ));
    }

    #[test]
    fn dense_matches_kronecker_product_exhaustively() {
        for n in 1..=3 {
            for s in PauliString::all(n) {
                assert!(close(&s.dense().unwrap(), &kron_dense(&s)), "{s}");
            }
        }
    }

    #[test]
    fn letters_round_trip() {
        for s in PauliString::all(2) {
            assert_eq!(p(&s.to_letters()), s);
        }
        assert_eq!(p("XIZY").to_string(), "XIZY");
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
        assert!(PauliString::identity(3).is_identity());
    }

    #[test]
    fn wide_strings_use_multiple_words() {
        let mut letters = alloc::vec!['I'; 130];
        letters[0] = 'X';
        letters[129] = 'Z';
        let a: PauliString = letters.iter().collect::<String>().parse().unwrap();
        letters[129] = 'X';
        let b: PauliString = letters.iter().collect::<String>().parse().unwrap();
        assert_eq!(a.symplectic_product(&b).unwrap(), 1);
        assert_eq!(a.weight(), 2);
        let (prod, _) = a.multiply(&b).unwrap();
        assert_eq!(prod.letter(129), 'Y');
        assert_eq!(prod.letter(0), 'I');
    }

    #[test]
    fn random_uniform_replays_and_is_uniform() {
        let a = PauliString::random_uniform(5, &mut ChaCha8Rng::seed_from_u64(3));
        let b = PauliString::random_uniform(5, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000;
        let xs = (0..draws)
            .filter(|_| PauliString::random_uniform(1, &mut rng).letter(0) == 'X')
            .count();
        let freq = xs as f64 / draws as f64;
        assert!((freq - 0.25).abs() < 0.01, "{freq}");

        let fixed = p("XZY");
        let anti = (0..draws)
            .filter(|_| !fixed.commutes_with(&PauliString::random_uniform(3, &mut rng)))
            .count();
        let freq = anti as f64 / draws as f64;
        assert!((freq - 0.5).abs() < 0.01, "{freq}");
    }

    #[test]
    fn random_commuting_covers_the_commutant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = p("Z");
        let draws = 100_000;
        let mut ids = 0;
        for _ in 0..draws {
            let q = z.random_commuting(&mut rng);
            assert!(z.commutes_with(&q));
            if q.is_identity() {
                ids += 1;
            }
        }
        let freq = ids as f64 / draws as f64;
        assert!((freq - 0.5).abs() < 0.01, "{freq}");

        let zz = p("ZZ");
        let distinct: BTreeSet<_> = (0..draws).map(|_| zz.random_commuting(&mut rng)).collect();
        assert_eq!(distinct.len(), 8);
        assert!(distinct.iter().all(|q| zz.commutes_with(q)));

        let id = PauliString::identity(2);
        let distinct: BTreeSet<_> = (0..10_000).map(|_| id.random_commuting(&mut rng)).collect();
        assert_eq!(distinct.len(), 16);
    }
}
