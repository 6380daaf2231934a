//! Layered circuit templates and their parameter handling.
//!
//! An ansatz is a block of layers repeated `depth` times, acting on the
//! uniform superposition `|+>^n`. Every layer instance carries its own
//! angle, so the parameter count is `depth * block_len`. Parameters are laid
//! out block-major in application order: flat index `b * block_len + l`
//! belongs to repetition `b` of block layer `l`, and the circuit applies
//! flat index 0 first. With all angles zero the prepared state is exactly
//! `|+>^n`.
//!
//! The provided templates come in two flavours per model: a symmetric block
//! whose layers all commute with the model's parity operators, and a
//! symmetry-breaking variant that appends diagonal Z layers which
//! anticommute with (some of) them. Where a block contains two diagonal
//! layers on complementary site sets, their relative order inside the block
//! is conventional since diagonal layers commute.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::hamiltonians::{
    global_flip, sublattice_flip, x_sites, z_sites, z_sublattice, zxz_strings, zz_alternating,
    zz_ring, Boundary, Sublattice,
};
use crate::pauli::{PauliString, PauliSum};
use crate::state::{LayerSpec, Statevector};

#[derive(Clone, Debug)]
pub struct AnsatzSpec {
    n_qubits: usize,
    depth: usize,
    block: Vec<LayerSpec>,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, depth: usize, block: Vec<LayerSpec>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        if block.is_empty() {
            return Err(Error::InvalidArgument("block must not be empty".into()));
        }
        for layer in &block {
            if layer.n_qubits() != n_qubits {
                return Err(Error::SizeMismatch {
                    left: layer.n_qubits(),
                    right: n_qubits,
                });
            }
        }
        Ok(AnsatzSpec {
            n_qubits,
            depth,
            block,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn block(&self) -> &[LayerSpec] {
        &self.block
    }

    pub fn block_len(&self) -> usize {
        self.block.len()
    }

    pub fn n_params(&self) -> usize {
        self.depth * self.block.len()
    }

    /// Flat index of block repetition `rep`, layer `layer` within the block.
    pub fn param_index(&self, rep: usize, layer: usize) -> usize {
        debug_assert!(rep < self.depth && layer < self.block.len());
        rep * self.block.len() + layer
    }

    /// Layer applied at flat parameter index `flat`.
    pub fn layer_at(&self, flat: usize) -> &LayerSpec {
        &self.block[flat % self.block.len()]
    }

    /// True for every flat index whose layer is symmetry-breaking.
    pub fn symmetry_breaking_mask(&self) -> Vec<bool> {
        (0..self.n_params())
            .map(|k| self.layer_at(k).is_symmetry_breaking())
            .collect()
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::ParamLength {
                got: params.len(),
                expected: self.n_params(),
            });
        }
        Ok(())
    }

    /// Runs the circuit on `|+>^n`.
    pub fn prepare(&self, params: &[f64]) -> Result<Statevector> {
        self.check_params(params)?;
        let mut psi = Statevector::plus_state(self.n_qubits)?;
        for (k, &theta) in params.iter().enumerate() {
            psi.apply_layer_mut(self.layer_at(k), theta)?;
        }
        Ok(psi)
    }

    /// Same template with one more block repetition.
    fn deepened(&self) -> AnsatzSpec {
        AnsatzSpec {
            n_qubits: self.n_qubits,
            depth: self.depth + 1,
            block: self.block.clone(),
        }
    }
}

/// How initial angles are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitStrategy {
    /// Every angle from N(0, sigma^2).
    NormalZero { sigma: f64 },
    /// N(0, sigma^2) draws plus an offset of 2*pi/depth on every
    /// symmetry-breaking angle, placing those layers away from the
    /// zero-angle stationary point.
    SbOffset { sigma: f64 },
}

impl InitStrategy {
    pub fn sigma(&self) -> f64 {
        match *self {
            InitStrategy::NormalZero { sigma } | InitStrategy::SbOffset { sigma } => sigma,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InitStrategy::NormalZero { .. } => "normal",
            InitStrategy::SbOffset { .. } => "sboffset",
        }
    }
}

/// Draws initial parameters. All Gaussian draws are consumed in flat
/// parameter order before any offset is added, so two strategies with the
/// same seed share their random component.
pub fn init_params(spec: &AnsatzSpec, strategy: InitStrategy, seed: u64) -> Result<Vec<f64>> {
    let sigma = strategy.sigma();
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "init sigma must be positive and finite, got {sigma}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidArgument(format!("bad init distribution: {e}")))?;
    let mut params: Vec<f64> = (0..spec.n_params()).map(|_| normal.sample(&mut rng)).collect();
    if let InitStrategy::SbOffset { .. } = strategy {
        let offset = 2.0 * std::f64::consts::PI / spec.depth() as f64;
        for (k, p) in params.iter_mut().enumerate() {
            if spec.layer_at(k).is_symmetry_breaking() {
                *p += offset;
            }
        }
    }
    Ok(params)
}

/// Inserts one fresh block repetition before repetition `position`
/// (`position == depth` appends). Existing angles keep their values; the new
/// block's angles are drawn from N(0, new_block_sigma^2) (exactly zero when
/// the sigma is zero), then every angle is perturbed by N(0,
/// perturb_sigma^2) (skipped when zero). Draw order: new-block angles first,
/// then perturbations in flat order.
pub fn insert_block_at(
    spec: &AnsatzSpec,
    params: &[f64],
    position: usize,
    new_block_sigma: f64,
    perturb_sigma: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(AnsatzSpec, Vec<f64>)> {
    spec.check_params(params)?;
    if position > spec.depth() {
        return Err(Error::InvalidArgument(format!(
            "insert position {position} exceeds depth {}",
            spec.depth()
        )));
    }
    for (name, s) in [("new_block_sigma", new_block_sigma), ("perturb_sigma", perturb_sigma)] {
        if s < 0.0 || !s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "{name} must be nonnegative and finite, got {s}"
            )));
        }
    }
    let block_len = spec.block_len();
    let cut = position * block_len;
    let mut new_params = Vec::with_capacity(params.len() + block_len);
    new_params.extend_from_slice(&params[..cut]);
    if new_block_sigma > 0.0 {
        let normal = Normal::new(0.0, new_block_sigma).unwrap();
        for _ in 0..block_len {
            new_params.push(normal.sample(rng));
        }
    } else {
        new_params.extend(std::iter::repeat(0.0).take(block_len));
    }
    new_params.extend_from_slice(&params[cut..]);
    if perturb_sigma > 0.0 {
        let normal = Normal::new(0.0, perturb_sigma).unwrap();
        for p in &mut new_params {
            *p += normal.sample(rng);
        }
    }
    Ok((spec.deepened(), new_params))
}

/// Block insertion at the default position, the middle of the circuit
/// (`depth / 2` in application order, rounding down).
pub fn insert_block(
    spec: &AnsatzSpec,
    params: &[f64],
    new_block_sigma: f64,
    perturb_sigma: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(AnsatzSpec, Vec<f64>)> {
    insert_block_at(spec, params, spec.depth() / 2, new_block_sigma, perturb_sigma, rng)
}

fn uniform_sum(n: usize, strings: Vec<PauliString>) -> Result<PauliSum> {
    PauliSum::new(n, strings.into_iter().map(|s| (1.0, s)))
}

/// Alternating-bond Ising block: the two halves of the ring's ZZ bonds as
/// separate diagonal layers, then a transverse X layer. All three layers
/// commute with the global spin flip. Needs an even ring.
pub fn qaoa_tfi(n_qubits: usize, depth: usize) -> Result<AnsatzSpec> {
    if n_qubits < 2 || n_qubits % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "alternating-bond block needs an even ring, got {n_qubits}"
        )));
    }
    let flip = global_flip(n_qubits)?;
    let block = vec![
        LayerSpec::new(
            "zz_even",
            uniform_sum(n_qubits, zz_alternating(n_qubits, 0)?)?,
            vec![flip.clone()],
            false,
        )?,
        LayerSpec::new(
            "zz_odd",
            uniform_sum(n_qubits, zz_alternating(n_qubits, 1)?)?,
            vec![flip.clone()],
            false,
        )?,
        LayerSpec::new(
            "x",
            uniform_sum(n_qubits, x_sites(n_qubits)?)?,
            vec![flip],
            false,
        )?,
    ];
    AnsatzSpec::new(n_qubits, depth, block)
}

/// Ising block with a symmetry-breaking tail: full ZZ ring, transverse X,
/// then a uniform Z layer that anticommutes with the global spin flip.
pub fn sb_tfi(n_qubits: usize, depth: usize) -> Result<AnsatzSpec> {
    if n_qubits < 2 {
        return Err(Error::InvalidArgument(format!(
            "Ising block needs at least 2 sites, got {n_qubits}"
        )));
    }
    let flip = global_flip(n_qubits)?;
    let block = vec![
        LayerSpec::new(
            "zz",
            uniform_sum(n_qubits, zz_ring(n_qubits)?)?,
            vec![flip.clone()],
            false,
        )?,
        LayerSpec::new(
            "x",
            uniform_sum(n_qubits, x_sites(n_qubits)?)?,
            vec![flip],
            false,
        )?,
        LayerSpec::new("z", uniform_sum(n_qubits, z_sites(n_qubits)?)?, vec![], true)?,
    ];
    AnsatzSpec::new(n_qubits, depth, block)
}

fn cluster_block(n_qubits: usize, boundary: Boundary, symmetry_breaking: bool) -> Result<Vec<LayerSpec>> {
    let p_b = sublattice_flip(n_qubits, Sublattice::B)?;
    let p_a = sublattice_flip(n_qubits, Sublattice::A)?;
    let mut block = vec![
        LayerSpec::new(
            "zxz",
            uniform_sum(n_qubits, zxz_strings(n_qubits, boundary)?)?,
            vec![p_b.clone(), p_a.clone()],
            false,
        )?,
        LayerSpec::new(
            "x",
            uniform_sum(n_qubits, x_sites(n_qubits)?)?,
            vec![p_b.clone(), p_a.clone()],
            false,
        )?,
    ];
    if symmetry_breaking {
        // Z on sublattice A anticommutes with the A flip but commutes with
        // the B flip (disjoint sites), and vice versa.
        block.push(LayerSpec::new(
            "z_even",
            uniform_sum(n_qubits, z_sublattice(n_qubits, Sublattice::A)?)?,
            vec![p_b],
            true,
        )?);
        block.push(LayerSpec::new(
            "z_odd",
            uniform_sum(n_qubits, z_sublattice(n_qubits, Sublattice::B)?)?,
            vec![p_a],
            true,
        )?);
    }
    Ok(block)
}

fn check_cluster_size(n_qubits: usize) -> Result<()> {
    if n_qubits < 4 || n_qubits % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "cluster blocks need an even register >= 4, got {n_qubits}"
        )));
    }
    Ok(())
}

/// Symmetric cluster-ring block: periodic ZXZ layer then transverse X.
pub fn tfc_bare(n_qubits: usize, depth: usize) -> Result<AnsatzSpec> {
    check_cluster_size(n_qubits)?;
    AnsatzSpec::new(
        n_qubits,
        depth,
        cluster_block(n_qubits, Boundary::Periodic, false)?,
    )
}

/// Cluster-ring block extended with per-sublattice Z layers, each breaking
/// one of the two sublattice parities.
pub fn sb_tfc(n_qubits: usize, depth: usize) -> Result<AnsatzSpec> {
    check_cluster_size(n_qubits)?;
    AnsatzSpec::new(
        n_qubits,
        depth,
        cluster_block(n_qubits, Boundary::Periodic, true)?,
    )
}

/// Open-boundary variant of [`sb_tfc`]: the ZXZ layer drops the two wrap
/// terms, matching the open cluster chain.
pub fn sb_cluster_open(n_qubits: usize, depth: usize) -> Result<AnsatzSpec> {
    check_cluster_size(n_qubits)?;
    AnsatzSpec::new(
        n_qubits,
        depth,
        cluster_block(n_qubits, Boundary::Open, true)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::build_tfi;
    use approx::assert_abs_diff_eq;

    #[test]
    fn param_layout_is_block_major() {
        let spec = sb_tfi(4, 3).unwrap();
        assert_eq!(spec.n_params(), 9);
        assert_eq!(spec.param_index(0, 2), 2);
        assert_eq!(spec.param_index(2, 0), 6);
        assert_eq!(spec.layer_at(4).label(), "x");
        assert_eq!(spec.layer_at(6).label(), "zz");
    }

    #[test]
    fn zero_params_prepare_plus_state() {
        for spec in [
            qaoa_tfi(4, 2).unwrap(),
            sb_tfi(5, 2).unwrap(),
            tfc_bare(4, 1).unwrap(),
            sb_tfc(6, 2).unwrap(),
            sb_cluster_open(6, 3).unwrap(),
        ] {
            let psi = spec.prepare(&vec![0.0; spec.n_params()]).unwrap();
            let plus = Statevector::plus_state(spec.n_qubits()).unwrap();
            for (a, b) in psi.amplitudes().iter().zip(plus.amplitudes()) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn prepared_states_are_normalized() {
        let spec = sb_tfc(6, 2).unwrap();
        let params = init_params(&spec, InitStrategy::NormalZero { sigma: 0.5 }, 42).unwrap();
        let psi = spec.prepare(&params).unwrap();
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn wrong_param_count_is_rejected() {
        let spec = qaoa_tfi(4, 2).unwrap();
        assert!(spec.prepare(&[0.0; 5]).is_err());
    }

    #[test]
    fn builder_size_preconditions() {
        assert!(qaoa_tfi(5, 2).is_err());
        assert!(sb_tfi(1, 2).is_err());
        assert!(tfc_bare(5, 2).is_err());
        assert!(sb_cluster_open(3, 2).is_err());
        assert!(sb_tfi(2, 0).is_err());
    }

    #[test]
    fn symmetry_breaking_mask_marks_z_layers() {
        let spec = sb_tfc(6, 2).unwrap();
        let mask = spec.symmetry_breaking_mask();
        assert_eq!(mask, vec![false, false, true, true, false, false, true, true]);
        let qaoa = qaoa_tfi(4, 3).unwrap();
        assert!(qaoa.symmetry_breaking_mask().iter().all(|&b| !b));
    }

    #[test]
    fn init_same_seed_shares_gaussian_draws() {
        let spec = sb_tfi(6, 3).unwrap();
        let a = init_params(&spec, InitStrategy::NormalZero { sigma: 0.001 }, 7).unwrap();
        let b = init_params(&spec, InitStrategy::SbOffset { sigma: 0.001 }, 7).unwrap();
        let offset = 2.0 * std::f64::consts::PI / 3.0;
        for (k, (x, y)) in a.iter().zip(&b).enumerate() {
            if spec.layer_at(k).is_symmetry_breaking() {
                assert_abs_diff_eq!(y - x, offset, epsilon = 1e-15);
            } else {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let spec = qaoa_tfi(4, 2).unwrap();
        let a = init_params(&spec, InitStrategy::NormalZero { sigma: 0.001 }, 3).unwrap();
        let b = init_params(&spec, InitStrategy::NormalZero { sigma: 0.001 }, 3).unwrap();
        let c = init_params(&spec, InitStrategy::NormalZero { sigma: 0.001 }, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn init_rejects_bad_sigma() {
        let spec = qaoa_tfi(4, 2).unwrap();
        assert!(init_params(&spec, InitStrategy::NormalZero { sigma: 0.0 }, 0).is_err());
        assert!(init_params(&spec, InitStrategy::NormalZero { sigma: -1.0 }, 0).is_err());
    }

    #[test]
    fn insert_block_keeps_surrounding_angles() {
        let spec = sb_tfi(4, 4).unwrap();
        let params: Vec<f64> = (0..spec.n_params()).map(|k| k as f64).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (deeper, new_params) = insert_block_at(&spec, &params, 2, 0.0, 0.0, &mut rng).unwrap();
        assert_eq!(deeper.depth(), 5);
        assert_eq!(new_params.len(), 15);
        assert_eq!(&new_params[..6], &params[..6]);
        assert_eq!(&new_params[6..9], &[0.0, 0.0, 0.0]);
        assert_eq!(&new_params[9..], &params[6..]);
    }

    #[test]
    fn insert_block_with_zero_noise_preserves_the_state() {
        let spec = sb_tfi(4, 3).unwrap();
        let params = init_params(&spec, InitStrategy::SbOffset { sigma: 0.2 }, 11).unwrap();
        let before = spec.prepare(&params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (deeper, new_params) = insert_block(&spec, &params, 0.0, 0.0, &mut rng).unwrap();
        let after = deeper.prepare(&new_params).unwrap();
        let overlap = before.inner(&after).unwrap().norm();
        assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-12);
        // energy is a fortiori unchanged
        let h = build_tfi(4, 0.5).unwrap();
        assert_abs_diff_eq!(
            h.expectation(&before).unwrap(),
            h.expectation(&after).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn insert_position_bounds() {
        let spec = sb_tfi(4, 3).unwrap();
        let params = vec![0.0; spec.n_params()];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(insert_block_at(&spec, &params, 4, 0.0, 0.0, &mut rng).is_err());
        assert!(insert_block_at(&spec, &params, 3, 0.0, 0.0, &mut rng).is_ok());
    }

    #[test]
    fn qaoa_block_structure() {
        let spec = qaoa_tfi(6, 1).unwrap();
        let labels: Vec<_> = spec.block().iter().map(|l| l.label().to_string()).collect();
        assert_eq!(labels, vec!["zz_even", "zz_odd", "x"]);
        // each ZZ half holds n/2 bonds
        assert_eq!(spec.block()[0].generator().len(), 3);
        assert_eq!(spec.block()[1].generator().len(), 3);
        assert_eq!(spec.block()[2].generator().len(), 6);
    }

    #[test]
    fn open_cluster_block_drops_wrap_terms() {
        let open = sb_cluster_open(8, 1).unwrap();
        let ring = sb_tfc(8, 1).unwrap();
        assert_eq!(open.block()[0].generator().len(), 6);
        assert_eq!(ring.block()[0].generator().len(), 8);
    }
}
