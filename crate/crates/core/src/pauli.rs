//! Sparse Pauli strings and real-coefficient Pauli sums.
//!
//! A [`PauliString`] keeps only its non-identity factors, sorted by site.
//! Application to a statevector is matrix-free: with `flip` the bitmask of
//! X and Y sites and `sign` the bitmask of Z and Y sites,
//!
//! ```text
//! P |b> = i^{#Y} * (-1)^{popcount(b & sign)} |b XOR flip>
//! ```
//!
//! so applying a string is a single pass over the amplitudes. A [`PauliSum`]
//! is a list of `(coefficient, string)` terms; construction merges duplicate
//! strings and drops terms whose merged coefficient is exactly zero.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{Statevector, MAX_QUBITS};

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Single-qubit Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// Bit-level action of a string: `flip` marks X/Y sites, `sign` marks Z/Y
/// sites, and the overall prefactor is `i^{y_count}`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Masks {
    pub flip: usize,
    pub sign: usize,
    pub y_count: u32,
}

impl Masks {
    /// `i^{y_count}` as an exact complex unit.
    pub fn prefactor(&self) -> Complex64 {
        match self.y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

#[inline]
fn sign_bit(b: usize, mask: usize) -> bool {
    (b & mask).count_ones() & 1 == 1
}

/// Tensor product of single-qubit Paulis on an `n_qubits` register. Factors
/// are stored sparsely with strictly increasing sites; an empty factor list
/// is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    factors: Vec<(usize, Axis)>,
}

impl PauliString {
    /// Builds a string from `(site, axis)` factors in any order. Rejects
    /// out-of-range sites and duplicate sites (single-site products are out
    /// of scope here; every operator in this crate is a plain tensor
    /// product).
    pub fn new(n_qubits: usize, factors: impl IntoIterator<Item = (usize, Axis)>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount { n: n_qubits });
        }
        let mut factors: Vec<(usize, Axis)> = factors.into_iter().collect();
        factors.sort_by_key(|&(site, _)| site);
        for pair in factors.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateSite { site: pair[0].0 });
            }
        }
        if let Some(&(site, _)) = factors.last() {
            if site >= n_qubits {
                return Err(Error::SiteOutOfRange { site, n_qubits });
            }
        }
        Ok(PauliString { n_qubits, factors })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        PauliString::new(n_qubits, [])
    }

    pub fn single(n_qubits: usize, site: usize, axis: Axis) -> Result<Self> {
        PauliString::new(n_qubits, [(site, axis)])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.factors.len()
    }

    /// True when the string is diagonal in the computational basis (Z
    /// factors only).
    pub fn is_diagonal(&self) -> bool {
        self.factors.iter().all(|&(_, a)| a == Axis::Z)
    }

    pub(crate) fn masks(&self) -> Masks {
        let mut flip = 0usize;
        let mut sign = 0usize;
        let mut y_count = 0u32;
        for &(site, axis) in &self.factors {
            match axis {
                Axis::X => flip |= 1 << site,
                Axis::Y => {
                    flip |= 1 << site;
                    sign |= 1 << site;
                    y_count += 1;
                }
                Axis::Z => sign |= 1 << site,
            }
        }
        Masks { flip, sign, y_count }
    }

    /// Accumulates `coeff * P |src>` into `dst`.
    pub(crate) fn accumulate_into(&self, coeff: Complex64, src: &[Complex64], dst: &mut [Complex64]) {
        let m = self.masks();
        let base = coeff * m.prefactor();
        for b in 0..src.len() {
            let v = if sign_bit(b, m.sign) { -base } else { base };
            dst[b ^ m.flip] += v * src[b];
        }
    }

    /// `P |psi>`.
    pub fn apply(&self, psi: &Statevector) -> Result<Statevector> {
        self.check_size(psi)?;
        let mut out = Statevector::zeros(self.n_qubits);
        self.accumulate_into(C_ONE, psi.amplitudes(), out.amplitudes_mut());
        Ok(out)
    }

    /// `<psi| P |psi>`, which is real for any Pauli string.
    pub fn expectation(&self, psi: &Statevector) -> Result<f64> {
        self.check_size(psi)?;
        let m = self.masks();
        let amps = psi.amplitudes();
        let mut acc = C_ZERO;
        for b in 0..amps.len() {
            let v = amps[b ^ m.flip].conj() * amps[b];
            acc += if sign_bit(b, m.sign) { -v } else { v };
        }
        acc *= m.prefactor();
        debug_assert!(acc.im.abs() < 1e-10 * (1.0 + acc.re.abs()));
        Ok(acc.re)
    }

    /// Two strings commute iff the number of shared sites with different
    /// non-identity axes is even.
    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut differing = 0usize;
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            let (sa, aa) = self.factors[i];
            let (sb, ab) = other.factors[j];
            if sa < sb {
                i += 1;
            } else if sb < sa {
                j += 1;
            } else {
                if aa != ab {
                    differing += 1;
                }
                i += 1;
                j += 1;
            }
        }
        Ok(differing % 2 == 0)
    }

    fn check_size(&self, psi: &Statevector) -> Result<()> {
        if self.n_qubits != psi.n_qubits() {
            return Err(Error::SizeMismatch {
                left: self.n_qubits,
                right: psi.n_qubits(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "I");
        }
        for (k, &(site, axis)) in self.factors.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", axis.letter(), site)?;
        }
        Ok(())
    }
}

/// Real-coefficient sum of Pauli strings on a common register. Terms are
/// kept in a deterministic sorted order so repeated evaluation sums in a
/// fixed sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    /// Merges duplicate strings by adding coefficients and drops terms whose
    /// merged coefficient is exactly zero.
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = (f64, PauliString)>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount { n: n_qubits });
        }
        let mut merged: BTreeMap<Vec<(usize, Axis)>, f64> = BTreeMap::new();
        for (c, s) in terms {
            if s.n_qubits != n_qubits {
                return Err(Error::SizeMismatch {
                    left: s.n_qubits,
                    right: n_qubits,
                });
            }
            if !c.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite coefficient {c} on term {s}"
                )));
            }
            *merged.entry(s.factors).or_insert(0.0) += c;
        }
        let terms = merged
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|(factors, c)| (c, PauliString { n_qubits, factors }))
            .collect();
        Ok(PauliSum { n_qubits, terms })
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        PauliSum::new(n_qubits, [])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|(_, s)| s.is_diagonal())
    }

    /// Sum of absolute coefficients; upper bound on the operator norm.
    pub fn coeff_l1(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// `sum_k c_k P_k |psi>`.
    pub fn apply(&self, psi: &Statevector) -> Result<Statevector> {
        self.apply_scaled(C_ONE, psi)
    }

    /// `factor * sum_k c_k P_k |psi>`.
    pub(crate) fn apply_scaled(&self, factor: Complex64, psi: &Statevector) -> Result<Statevector> {
        self.check_size(psi)?;
        let mut out = Statevector::zeros(self.n_qubits);
        for (c, s) in &self.terms {
            s.accumulate_into(factor * c, psi.amplitudes(), out.amplitudes_mut());
        }
        Ok(out)
    }

    pub(crate) fn apply_slice(&self, src: &[Complex64], dst: &mut [Complex64]) {
        dst.fill(C_ZERO);
        for (c, s) in &self.terms {
            s.accumulate_into(Complex64::new(*c, 0.0), src, dst);
        }
    }

    /// `<psi| H |psi>`, summed term by term in a fixed order.
    pub fn expectation(&self, psi: &Statevector) -> Result<f64> {
        self.check_size(psi)?;
        let mut acc = 0.0;
        for (c, s) in &self.terms {
            acc += c * s.expectation(psi)?;
        }
        Ok(acc)
    }

    fn check_size(&self, psi: &Statevector) -> Result<()> {
        if self.n_qubits != psi.n_qubits() {
            return Err(Error::SizeMismatch {
                left: self.n_qubits,
                right: psi.n_qubits(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, s)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*({s})")?;
        }
        Ok(())
    }
}
