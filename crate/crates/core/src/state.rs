//! Dense statevectors and exact exponentials of layer generators.
//!
//! A layer is `exp(-i theta G)` for a generator `G = sum_k c_k P_k` whose
//! terms mutually commute, so the exponential factors exactly into a product
//! of single-string rotations `exp(-i theta c_k P_k)`. Diagonal generators
//! (Z strings only) additionally get a phase-table fast path: the eigenvalue
//! g(b) of `G` on each basis state is precomputed once per layer and the
//! exponential becomes a single pass of unit-phase multiplications.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Largest register the engine accepts; 2^26 amplitudes is 1 GiB.
pub const MAX_QUBITS: usize = 26;

/// Diagonal eigenvalue tables are only built up to this size so that layer
/// construction stays cheap on large registers; beyond it the generic
/// rotation path is used.
const DIAG_TABLE_MAX_QUBITS: usize = 22;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    fn check_n(n_qubits: usize) -> Result<()> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount { n: n_qubits });
        }
        Ok(())
    }

    /// `|+>^n`: every amplitude `2^{-n/2}`, real and positive.
    pub fn plus_state(n_qubits: usize) -> Result<Self> {
        Self::check_n(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = 1.0 / (dim as f64).sqrt();
        Ok(Statevector {
            n_qubits,
            amps: vec![Complex64::new(a, 0.0); dim],
        })
    }

    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        Self::check_n(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![C_ZERO; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n_qubits, amps })
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        Self::check_n(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::InvalidArgument(format!(
                "amplitude vector has length {}, expected {}",
                amps.len(),
                1usize << n_qubits
            )));
        }
        Ok(Statevector { n_qubits, amps })
    }

    /// All-zero vector; internal scratch, not a valid quantum state.
    pub(crate) fn zeros(n_qubits: usize) -> Self {
        Statevector {
            n_qubits,
            amps: vec![C_ZERO; 1 << n_qubits],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>` with the conjugate on `self`, summed in index order.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut acc = C_ZERO;
        for (a, b) in self.amps.iter().zip(&other.amps) {
            acc += a.conj() * b;
        }
        Ok(acc)
    }

    /// `exp(-i theta P) |self>` for a single Pauli string.
    pub fn apply_rotation(&self, p: &PauliString, theta: f64) -> Result<Self> {
        let mut out = self.clone();
        out.rotate_mut(p, theta)?;
        Ok(out)
    }

    /// `exp(-i theta G) |self>` for a layer generator.
    pub fn apply_layer(&self, layer: &LayerSpec, theta: f64) -> Result<Self> {
        let mut out = self.clone();
        out.apply_layer_mut(layer, theta)?;
        Ok(out)
    }

    /// In-place `exp(-i theta P)`: `cos(theta) |psi> - i sin(theta) P |psi>`,
    /// updated pairwise over the index orbits of the flip mask.
    pub(crate) fn rotate_mut(&mut self, p: &PauliString, theta: f64) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                left: p.n_qubits(),
                right: self.n_qubits,
            });
        }
        let m = p.masks();
        let (sin, cos) = theta.sin_cos();
        if m.flip == 0 {
            // Diagonal string: pure phases exp(-i theta s(b)).
            let minus = Complex64::new(cos, -sin);
            let plus = Complex64::new(cos, sin);
            for (b, a) in self.amps.iter_mut().enumerate() {
                *a *= if (b & m.sign).count_ones() & 1 == 1 {
                    plus
                } else {
                    minus
                };
            }
            return Ok(());
        }
        let prefactor = m.prefactor();
        let mis = Complex64::new(0.0, -sin) * prefactor;
        // Pair indices over orbits {b, b ^ flip}; b is the member with the
        // highest flip bit clear.
        let top = (usize::BITS - 1 - m.flip.leading_zeros()) as usize;
        for b in 0..self.amps.len() {
            if (b >> top) & 1 == 1 {
                continue;
            }
            let k = b ^ m.flip;
            let sb = (b & m.sign).count_ones() & 1 == 1;
            let sk = (k & m.sign).count_ones() & 1 == 1;
            let ab = self.amps[b];
            let ak = self.amps[k];
            let tb = if sk { -mis * ak } else { mis * ak };
            let tk = if sb { -mis * ab } else { mis * ab };
            self.amps[b] = cos * ab + tb;
            self.amps[k] = cos * ak + tk;
        }
        Ok(())
    }

    pub(crate) fn apply_layer_mut(&mut self, layer: &LayerSpec, theta: f64) -> Result<()> {
        if layer.generator.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                left: layer.generator.n_qubits(),
                right: self.n_qubits,
            });
        }
        if let Some(table) = &layer.diag {
            let phases: Vec<Complex64> = table
                .values
                .iter()
                .map(|&g| Complex64::from_polar(1.0, -theta * g))
                .collect();
            for (a, &ix) in self.amps.iter_mut().zip(&table.index) {
                *a *= phases[ix as usize];
            }
            return Ok(());
        }
        self.apply_layer_generic(layer, theta)
    }

    /// Term-by-term rotation product; valid because layer terms commute.
    fn apply_layer_generic(&mut self, layer: &LayerSpec, theta: f64) -> Result<()> {
        for (c, p) in layer.generator.terms() {
            self.rotate_mut(p, theta * c)?;
        }
        Ok(())
    }
}

/// Eigenvalues of a diagonal generator, deduplicated: `values[index[b]]` is
/// g(b). The index is u16, so at most 65536 distinct eigenvalues.
#[derive(Clone, Debug)]
struct DiagTable {
    values: Vec<f64>,
    index: Vec<u16>,
}

fn build_diag_table(generator: &PauliSum) -> Option<DiagTable> {
    let n = generator.n_qubits();
    if n > DIAG_TABLE_MAX_QUBITS {
        return None;
    }
    let dim = 1usize << n;
    let masks: Vec<(f64, usize)> = generator
        .terms()
        .iter()
        .map(|(c, s)| (*c, s.masks().sign))
        .collect();
    let mut values: Vec<f64> = Vec::new();
    let mut lookup: std::collections::HashMap<u64, u16> = std::collections::HashMap::new();
    let mut index = vec![0u16; dim];
    for b in 0..dim {
        let mut g = 0.0;
        for &(c, sign) in &masks {
            if (b & sign).count_ones() & 1 == 1 {
                g -= c;
            } else {
                g += c;
            }
        }
        let key = g.to_bits();
        let ix = match lookup.get(&key) {
            Some(&ix) => ix,
            None => {
                if values.len() > u16::MAX as usize {
                    return None;
                }
                let ix = values.len() as u16;
                values.push(g);
                lookup.insert(key, ix);
                ix
            }
        };
        index[b] = ix;
    }
    Some(DiagTable { values, index })
}

/// A reusable circuit layer: a Pauli-sum generator whose terms mutually
/// commute, the symmetry operators the layer is expected to preserve, and a
/// flag marking layers whose job is to break a protected symmetry.
#[derive(Clone, Debug)]
pub struct LayerSpec {
    label: String,
    generator: PauliSum,
    symmetry_tags: Vec<PauliString>,
    symmetry_breaking: bool,
    diag: Option<DiagTable>,
}

impl LayerSpec {
    /// Validates that the generator terms commute pairwise and that every
    /// tagged symmetry commutes with every term. Diagonal generators get
    /// their eigenvalue table built eagerly here.
    pub fn new(
        label: impl Into<String>,
        generator: PauliSum,
        symmetry_tags: Vec<PauliString>,
        symmetry_breaking: bool,
    ) -> Result<Self> {
        let label = label.into();
        let terms = generator.terms();
        for i in 0..terms.len() {
            for j in (i + 1)..terms.len() {
                if !terms[i].1.commutes_with(&terms[j].1)? {
                    return Err(Error::NonCommutingGenerator {
                        label,
                        a: terms[i].1.to_string(),
                        b: terms[j].1.to_string(),
                    });
                }
            }
        }
        for tag in &symmetry_tags {
            for (_, term) in terms {
                if !tag.commutes_with(term)? {
                    return Err(Error::TagViolation {
                        label,
                        term: term.to_string(),
                        tag: tag.to_string(),
                    });
                }
            }
        }
        let diag = if generator.is_diagonal() {
            build_diag_table(&generator)
        } else {
            None
        };
        Ok(LayerSpec {
            label,
            generator,
            symmetry_tags,
            symmetry_breaking,
            diag,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn generator(&self) -> &PauliSum {
        &self.generator
    }

    pub fn symmetry_tags(&self) -> &[PauliString] {
        &self.symmetry_tags
    }

    pub fn is_symmetry_breaking(&self) -> bool {
        self.symmetry_breaking
    }

    pub fn n_qubits(&self) -> usize {
        self.generator.n_qubits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Axis;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: &Statevector, b: &Statevector, eps: f64) {
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert_abs_diff_eq!(x.re, y.re, epsilon = eps);
            assert_abs_diff_eq!(x.im, y.im, epsilon = eps);
        }
    }

    #[test]
    fn plus_state_amplitudes() {
        let psi = Statevector::plus_state(2).unwrap();
        for a in psi.amplitudes() {
            assert_eq!(*a, c(0.5, 0.0));
        }
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_out_of_range_register() {
        assert!(Statevector::plus_state(0).is_err());
        assert!(Statevector::plus_state(MAX_QUBITS + 1).is_err());
        assert!(Statevector::basis_state(2, 4).is_err());
    }

    #[test]
    fn x_rotation_on_basis_state() {
        // exp(-i pi/2 X)|0> = -i|1>
        let x = PauliString::single(1, 0, Axis::X).unwrap();
        let psi = Statevector::basis_state(1, 0).unwrap();
        let out = psi.apply_rotation(&x, std::f64::consts::FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(out.amplitudes()[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitudes()[1].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitudes()[1].im, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn z_rotation_is_pure_phase() {
        let z = PauliString::single(1, 0, Axis::Z).unwrap();
        let theta = 0.3;
        let psi = Statevector::plus_state(1).unwrap();
        let out = psi.apply_rotation(&z, theta).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(out.amplitudes()[0].re, r * theta.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitudes()[0].im, -r * theta.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitudes()[1].im, r * theta.sin(), epsilon = 1e-15);
    }

    #[test]
    fn rotation_preserves_norm_and_inverts() {
        let p = PauliString::new(3, [(0, Axis::Y), (2, Axis::Z)]).unwrap();
        let psi = Statevector::plus_state(3).unwrap();
        let fwd = psi.apply_rotation(&p, 0.7).unwrap();
        assert_abs_diff_eq!(fwd.norm(), 1.0, epsilon = 1e-14);
        let back = fwd.apply_rotation(&p, -0.7).unwrap();
        assert_close(&back, &psi, 1e-14);
    }

    #[test]
    fn rotation_periodicity() {
        // exp(-i pi P) = -1 on any string, so theta and theta + pi agree up
        // to global phase; theta + 2 pi agrees exactly.
        let p = PauliString::new(2, [(0, Axis::X), (1, Axis::X)]).unwrap();
        let psi = Statevector::basis_state(2, 1).unwrap();
        let a = psi.apply_rotation(&p, 0.4).unwrap();
        let b = psi
            .apply_rotation(&p, 0.4 + 2.0 * std::f64::consts::PI)
            .unwrap();
        assert_close(&a, &b, 1e-13);
    }

    fn zz_ring_layer(n: usize) -> LayerSpec {
        let terms: Vec<_> = (0..n)
            .map(|i| {
                (
                    1.0,
                    PauliString::new(n, [(i, Axis::Z), ((i + 1) % n, Axis::Z)]).unwrap(),
                )
            })
            .collect();
        LayerSpec::new("zz", PauliSum::new(n, terms).unwrap(), vec![], false).unwrap()
    }

    #[test]
    fn diagonal_layer_on_all_zeros() {
        // All-up basis state: every ZZ bond is +1, so the layer is a global
        // phase exp(-i n theta).
        let n = 4;
        let layer = zz_ring_layer(n);
        let theta = 0.23;
        let psi = Statevector::basis_state(n, 0).unwrap();
        let out = psi.apply_layer(&layer, theta).unwrap();
        let expect = Complex64::from_polar(1.0, -(n as f64) * theta);
        assert_abs_diff_eq!(out.amplitudes()[0].re, expect.re, epsilon = 1e-14);
        assert_abs_diff_eq!(out.amplitudes()[0].im, expect.im, epsilon = 1e-14);
    }

    #[test]
    fn diag_table_matches_generic_path() {
        let n = 5;
        let layer = zz_ring_layer(n);
        assert!(layer.diag.is_some());
        let theta = -0.37;
        let mut rng_state = Statevector::plus_state(n).unwrap();
        // move off the symmetric state so all index cells matter
        let x2 = PauliString::single(n, 2, Axis::X).unwrap();
        rng_state = rng_state.apply_rotation(&x2, 0.9).unwrap();
        let fast = rng_state.apply_layer(&layer, theta).unwrap();
        let mut slow = rng_state.clone();
        slow.apply_layer_generic(&layer, theta).unwrap();
        assert_close(&fast, &slow, 1e-12);
    }

    #[test]
    fn layer_inverse_roundtrip() {
        let n = 4;
        let layer = zz_ring_layer(n);
        let psi = Statevector::plus_state(n).unwrap();
        let there = psi.apply_layer(&layer, 0.51).unwrap();
        let back = there.apply_layer(&layer, -0.51).unwrap();
        assert_close(&back, &psi, 1e-12);
    }

    #[test]
    fn layer_rejects_noncommuting_generator() {
        let n = 2;
        let bad = PauliSum::new(
            n,
            [
                (1.0, PauliString::single(n, 0, Axis::X).unwrap()),
                (1.0, PauliString::single(n, 0, Axis::Z).unwrap()),
            ],
        )
        .unwrap();
        assert!(LayerSpec::new("bad", bad, vec![], false).is_err());
    }

    #[test]
    fn layer_rejects_tag_violation() {
        let n = 2;
        let gen = PauliSum::new(n, [(1.0, PauliString::single(n, 0, Axis::Z).unwrap())]).unwrap();
        let tag = PauliString::new(n, [(0, Axis::X), (1, Axis::X)]).unwrap();
        assert!(LayerSpec::new("z", gen, vec![tag], false).is_err());
    }

    #[test]
    fn tagged_symmetry_is_conserved_by_layer() {
        let n = 4;
        let layer = zz_ring_layer(n);
        let parity = PauliString::new(n, (0..n).map(|i| (i, Axis::X))).unwrap();
        assert!(layer
            .generator()
            .terms()
            .iter()
            .all(|(_, t)| parity.commutes_with(t).unwrap()));
        let psi = Statevector::plus_state(n).unwrap();
        let before = parity.expectation(&psi).unwrap();
        let after = parity
            .expectation(&psi.apply_layer(&layer, 0.8).unwrap())
            .unwrap();
        assert_abs_diff_eq!(before, after, epsilon = 1e-12);
    }
}
