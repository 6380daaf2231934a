//! Spin-chain Hamiltonians and their protecting parity operators.
//!
//! Three models are supported, all with unit couplings up to the transverse
//! field `h`:
//!
//! * `Tfi`: transverse-field Ising ring,
//!   `H = -sum_i Z_i Z_{i+1} - h sum_i X_i` with periodic wrap.
//! * `Tfc`: transverse-field cluster ring,
//!   `H = -sum_i Z_i X_{i+1} Z_{i+2} - h sum_i X_i` with periodic wrap.
//! * `ClusterOpen`: open-boundary cluster chain,
//!   `H = -sum_{i=0}^{n-3} Z_i X_{i+1} Z_{i+2}` (no field term). Its ground
//!   space is four-fold degenerate.
//!
//! Site labelling is 0-based with site 0 on the least significant bit. The
//! two sublattices of the even-`n` cluster models are referred to by bit
//! parity: sublattice A holds the even bit positions {0, 2, ...} and
//! sublattice B the odd bit positions {1, 3, ...}. The Ising ring is
//! protected by the global spin flip `prod_i X_i`; the cluster models by the
//! pair of sublattice flips, returned in the order `[flip on B, flip on A]`
//! (the convention used throughout for the tracked parity pair `P1, P2`).

use crate::error::{Error, Result};
use crate::pauli::{Axis, PauliString, PauliSum};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Tfi,
    Tfc,
    ClusterOpen,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Tfi => "tfi",
            Model::Tfc => "tfc",
            Model::ClusterOpen => "cluster",
        }
    }
}

/// A fully specified model instance. `h` is ignored by `ClusterOpen`
/// (it must be zero there so a spec is unambiguous).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpec {
    model: Model,
    n_qubits: usize,
    h: f64,
}

impl ModelSpec {
    pub fn new(model: Model, n_qubits: usize, h: f64) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite field {h}")));
        }
        match model {
            Model::Tfi => {
                if n_qubits < 2 {
                    return Err(Error::InvalidArgument(format!(
                        "Ising ring needs at least 2 sites, got {n_qubits}"
                    )));
                }
            }
            Model::Tfc => {
                if n_qubits < 4 || n_qubits % 2 != 0 {
                    return Err(Error::InvalidArgument(format!(
                        "cluster ring needs even size >= 4, got {n_qubits}"
                    )));
                }
            }
            Model::ClusterOpen => {
                if n_qubits < 3 {
                    return Err(Error::InvalidArgument(format!(
                        "open cluster chain needs at least 3 sites, got {n_qubits}"
                    )));
                }
                if h != 0.0 {
                    return Err(Error::InvalidArgument(
                        "open cluster chain has no field term; set h = 0".into(),
                    ));
                }
            }
        }
        Ok(ModelSpec { model, n_qubits, h })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn hamiltonian(&self) -> Result<PauliSum> {
        match self.model {
            Model::Tfi => build_tfi(self.n_qubits, self.h),
            Model::Tfc => build_tfc(self.n_qubits, self.h),
            Model::ClusterOpen => build_cluster_open(self.n_qubits),
        }
    }

    /// Parity operators that commute with the Hamiltonian: `[prod X]` for
    /// the Ising ring, `[flip on B, flip on A]` for the cluster models.
    /// Sublattice flips only square to a symmetry pair on even rings, so odd
    /// sizes are rejected for the cluster models (the spec constructor
    /// already enforces evenness for `Tfc`).
    pub fn parity_ops(&self) -> Result<Vec<PauliString>> {
        match self.model {
            Model::Tfi => Ok(vec![global_flip(self.n_qubits)?]),
            Model::Tfc | Model::ClusterOpen => {
                if self.n_qubits % 2 != 0 {
                    return Err(Error::InvalidArgument(format!(
                        "sublattice parities need an even register, got {}",
                        self.n_qubits
                    )));
                }
                Ok(vec![
                    sublattice_flip(self.n_qubits, Sublattice::B)?,
                    sublattice_flip(self.n_qubits, Sublattice::A)?,
                ])
            }
        }
    }
}

/// `H = -sum_i Z_i Z_{i+1} - h sum_i X_i`, periodic. On two sites the two
/// wrap bonds merge into a single ZZ term with coefficient -2.
pub fn build_tfi(n_qubits: usize, h: f64) -> Result<PauliSum> {
    if n_qubits < 2 {
        return Err(Error::InvalidArgument(format!(
            "Ising ring needs at least 2 sites, got {n_qubits}"
        )));
    }
    let mut terms = Vec::with_capacity(2 * n_qubits);
    for s in zz_ring(n_qubits)? {
        terms.push((-1.0, s));
    }
    for s in x_sites(n_qubits)? {
        terms.push((-h, s));
    }
    PauliSum::new(n_qubits, terms)
}

/// `H = -sum_i Z_i X_{i+1} Z_{i+2} - h sum_i X_i`, periodic, even size.
pub fn build_tfc(n_qubits: usize, h: f64) -> Result<PauliSum> {
    if n_qubits < 4 || n_qubits % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "cluster ring needs even size >= 4, got {n_qubits}"
        )));
    }
    let mut terms = Vec::with_capacity(2 * n_qubits);
    for s in zxz_strings(n_qubits, Boundary::Periodic)? {
        terms.push((-1.0, s));
    }
    for s in x_sites(n_qubits)? {
        terms.push((-h, s));
    }
    PauliSum::new(n_qubits, terms)
}

/// `H = -sum_{i=0}^{n-3} Z_i X_{i+1} Z_{i+2}`, open boundary.
pub fn build_cluster_open(n_qubits: usize) -> Result<PauliSum> {
    if n_qubits < 3 {
        return Err(Error::InvalidArgument(format!(
            "open cluster chain needs at least 3 sites, got {n_qubits}"
        )));
    }
    let terms: Vec<_> = zxz_strings(n_qubits, Boundary::Open)?
        .into_iter()
        .map(|s| (-1.0, s))
        .collect();
    PauliSum::new(n_qubits, terms)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Boundary {
    Periodic,
    Open,
}

/// Bit-parity sublattices: A = even bit positions, B = odd bit positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sublattice {
    A,
    B,
}

pub(crate) fn zz_ring(n: usize) -> Result<Vec<PauliString>> {
    (0..n)
        .map(|i| PauliString::new(n, [(i, Axis::Z), ((i + 1) % n, Axis::Z)]))
        .collect()
}

/// Non-overlapping nearest-neighbour ZZ bonds starting at `start` (0 or 1):
/// bonds `(start + 2m, start + 2m + 1 mod n)`. Needs an even ring.
pub(crate) fn zz_alternating(n: usize, start: usize) -> Result<Vec<PauliString>> {
    debug_assert!(n % 2 == 0 && start < 2);
    (0..n / 2)
        .map(|m| {
            let a = start + 2 * m;
            PauliString::new(n, [(a % n, Axis::Z), ((a + 1) % n, Axis::Z)])
        })
        .collect()
}

pub(crate) fn x_sites(n: usize) -> Result<Vec<PauliString>> {
    (0..n).map(|i| PauliString::single(n, i, Axis::X)).collect()
}

pub(crate) fn z_sites(n: usize) -> Result<Vec<PauliString>> {
    (0..n).map(|i| PauliString::single(n, i, Axis::Z)).collect()
}

pub(crate) fn z_sublattice(n: usize, which: Sublattice) -> Result<Vec<PauliString>> {
    let start = match which {
        Sublattice::A => 0,
        Sublattice::B => 1,
    };
    (start..n)
        .step_by(2)
        .map(|i| PauliString::single(n, i, Axis::Z))
        .collect()
}

pub(crate) fn zxz_strings(n: usize, boundary: Boundary) -> Result<Vec<PauliString>> {
    let count = match boundary {
        Boundary::Periodic => n,
        Boundary::Open => n - 2,
    };
    (0..count)
        .map(|i| {
            PauliString::new(
                n,
                [
                    (i, Axis::Z),
                    ((i + 1) % n, Axis::X),
                    ((i + 2) % n, Axis::Z),
                ],
            )
        })
        .collect()
}

/// `prod_i X_i`, the Ising ring's protecting parity.
pub fn global_flip(n: usize) -> Result<PauliString> {
    PauliString::new(n, (0..n).map(|i| (i, Axis::X)))
}

/// X on every site of one bit-parity sublattice.
pub fn sublattice_flip(n: usize, which: Sublattice) -> Result<PauliString> {
    let start = match which {
        Sublattice::A => 0,
        Sublattice::B => 1,
    };
    PauliString::new(n, (start..n).step_by(2).map(|i| (i, Axis::X)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tfi_term_count_and_coefficients() {
        let h = build_tfi(6, 0.5).unwrap();
        assert_eq!(h.len(), 12);
        for (c, s) in h.terms() {
            match s.weight() {
                1 => assert_eq!(*c, -0.5),
                2 => assert_eq!(*c, -1.0),
                w => panic!("unexpected weight {w}"),
            }
        }
    }

    #[test]
    fn tfi_two_sites_merges_wrap_bond() {
        let h = build_tfi(2, 1.0).unwrap();
        // bonds (0,1) and (1,0) are the same string
        let zz: Vec<_> = h.terms().iter().filter(|(_, s)| s.weight() == 2).collect();
        assert_eq!(zz.len(), 1);
        assert_eq!(zz[0].0, -2.0);
    }

    #[test]
    fn tfi_zero_field_has_no_x_terms() {
        let h = build_tfi(4, 0.0).unwrap();
        assert_eq!(h.len(), 4);
        assert!(h.is_diagonal());
    }

    #[test]
    fn tfc_term_count() {
        let h = build_tfc(8, 0.5).unwrap();
        assert_eq!(h.len(), 16);
        assert!(build_tfc(6, 0.0).unwrap().len() == 6);
        assert!(build_tfc(5, 0.5).is_err());
        assert!(build_tfc(2, 0.5).is_err());
    }

    #[test]
    fn cluster_open_term_count() {
        let h = build_cluster_open(10).unwrap();
        assert_eq!(h.len(), 8);
        assert!(build_cluster_open(2).is_err());
    }

    #[test]
    fn cluster_spec_rejects_field() {
        assert!(ModelSpec::new(Model::ClusterOpen, 8, 0.5).is_err());
        assert!(ModelSpec::new(Model::ClusterOpen, 8, 0.0).is_ok());
    }

    #[test]
    fn parities_commute_with_their_hamiltonian() {
        for (model, n, h) in [
            (Model::Tfi, 5, 0.7),
            (Model::Tfi, 6, 0.0),
            (Model::Tfc, 6, 1.3),
            (Model::ClusterOpen, 6, 0.0),
            (Model::ClusterOpen, 8, 0.0),
        ] {
            let spec = ModelSpec::new(model, n, h).unwrap();
            let ham = spec.hamiltonian().unwrap();
            for p in spec.parity_ops().unwrap() {
                for (_, term) in ham.terms() {
                    assert!(
                        p.commutes_with(term).unwrap(),
                        "{model:?}: {p} vs {term}"
                    );
                }
            }
        }
    }

    #[test]
    fn sublattice_parities_reject_odd_registers() {
        let spec = ModelSpec::new(Model::ClusterOpen, 5, 0.0).unwrap();
        assert!(spec.parity_ops().is_err());
    }

    #[test]
    fn sublattice_flips_cover_disjoint_sites() {
        let p1 = sublattice_flip(8, Sublattice::B).unwrap();
        let p2 = sublattice_flip(8, Sublattice::A).unwrap();
        assert_eq!(p1.weight() + p2.weight(), 8);
        let sites1: Vec<_> = p1.factors().iter().map(|&(s, _)| s).collect();
        assert_eq!(sites1, vec![1, 3, 5, 7]);
    }

    #[test]
    fn alternating_bonds_partition_the_ring() {
        let a = zz_alternating(6, 0).unwrap();
        let b = zz_alternating(6, 1).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(b.len(), 3);
        // start-1 bonds wrap: last one is (5, 0)
        let last = &b[2];
        let sites: Vec<_> = last.factors().iter().map(|&(s, _)| s).collect();
        assert_eq!(sites, vec![0, 5]);
    }
}
