//! Exact circuit derivatives: derivative states, energy gradients, and
//! quantum Fisher information matrices.
//!
//! For a circuit `|psi> = U_P ... U_1 |+>` with `U_k = exp(-i theta_k G_k)`,
//! the derivative with respect to angle `k` is
//!
//! ```text
//! |d_k> = U_P ... U_{k+1} (-i G_k) U_k ... U_1 |+>
//! ```
//!
//! Everything here is built from these states: the energy gradient is
//! `g_k = 2 Re <d_k| H |psi>`, the uncentered Fisher matrix is
//! `Re <d_i|d_j>`, and the centered variant subtracts the rank-one part
//! `Re{ <d_i|psi><psi|d_j> }`.
//!
//! Two evaluation modes trade memory for time. `Stored` keeps all `P`
//! derivative states alive and propagates them forward alongside `|psi>`
//! (memory `P * 2^n`, about `P^2 / 2` layer applications). `Streaming` never
//! holds more than three vectors, rebuilding each row of the Fisher matrix
//! by a fresh forward sweep. Both produce the same numbers up to roundoff.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::ansatz::AnsatzSpec;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::state::Statevector;

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

/// Which Fisher information matrix to assemble.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FisherVariant {
    /// `Re{ <d_i|d_j> - <d_i|psi><psi|d_j> }`; the metric of the projective
    /// state space.
    #[default]
    Centered,
    /// `Re <d_i|d_j>`; differs from the centered variant by a positive
    /// semidefinite rank-one term.
    Uncentered,
}

impl FisherVariant {
    pub fn name(self) -> &'static str {
        match self {
            FisherVariant::Centered => "centered",
            FisherVariant::Uncentered => "uncentered",
        }
    }
}

/// Memory policy for derivative evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DerivativeMode {
    Stored,
    Streaming,
    /// `Stored` unless the derivative states would exceed a 4 GiB budget.
    #[default]
    Auto,
}

const AUTO_MEMORY_LIMIT_BYTES: usize = 4 << 30;

impl DerivativeMode {
    fn stores(self, n_params: usize, dim: usize) -> bool {
        match self {
            DerivativeMode::Stored => true,
            DerivativeMode::Streaming => false,
            DerivativeMode::Auto => {
                let bytes = (n_params + 2)
                    .saturating_mul(dim)
                    .saturating_mul(std::mem::size_of::<Complex64>());
                bytes <= AUTO_MEMORY_LIMIT_BYTES
            }
        }
    }
}

/// Symmetric real Fisher information matrix.
#[derive(Clone, Debug)]
pub struct FisherMatrix {
    variant: FisherVariant,
    mat: DMatrix<f64>,
}

impl FisherMatrix {
    pub fn variant(&self) -> FisherVariant {
        self.variant
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }
}

fn check_observable(observable: &PauliSum, spec: &AnsatzSpec) -> Result<()> {
    if observable.n_qubits() != spec.n_qubits() {
        return Err(Error::SizeMismatch {
            left: observable.n_qubits(),
            right: spec.n_qubits(),
        });
    }
    Ok(())
}

/// Forward sweep producing the prepared state and all derivative states.
fn forward_with_derivatives(
    spec: &AnsatzSpec,
    params: &[f64],
) -> Result<(Statevector, Vec<Statevector>)> {
    let mut psi = Statevector::plus_state(spec.n_qubits())?;
    let mut derivs: Vec<Statevector> = Vec::with_capacity(params.len());
    for (k, &theta) in params.iter().enumerate() {
        let layer = spec.layer_at(k);
        psi.apply_layer_mut(layer, theta)?;
        for d in derivs.iter_mut() {
            d.apply_layer_mut(layer, theta)?;
        }
        derivs.push(layer.generator().apply_scaled(MINUS_I, &psi)?);
    }
    Ok((psi, derivs))
}

/// All `P` derivative states, in flat parameter order.
pub fn derivative_states(spec: &AnsatzSpec, params: &[f64]) -> Result<Vec<Statevector>> {
    if params.len() != spec.n_params() {
        return Err(Error::ParamLength {
            got: params.len(),
            expected: spec.n_params(),
        });
    }
    Ok(forward_with_derivatives(spec, params)?.1)
}

/// Adjoint-style gradient sweep: one backward pass holding two work vectors,
/// unapplying each layer as it goes.
fn adjoint_gradient(
    observable: &PauliSum,
    spec: &AnsatzSpec,
    params: &[f64],
    psi: &Statevector,
) -> Result<Vec<f64>> {
    let mut lam = observable.apply(psi)?;
    let mut omega = psi.clone();
    let mut grad = vec![0.0; params.len()];
    for k in (0..params.len()).rev() {
        let layer = spec.layer_at(k);
        let t = layer.generator().apply_scaled(MINUS_I, &omega)?;
        grad[k] = 2.0 * t.inner(&lam)?.re;
        omega.apply_layer_mut(layer, -params[k])?;
        lam.apply_layer_mut(layer, -params[k])?;
    }
    Ok(grad)
}

/// `g_k = 2 Re <d_k| H |psi>`, the exact gradient of `<psi|H|psi>`.
pub fn energy_gradient(
    observable: &PauliSum,
    spec: &AnsatzSpec,
    params: &[f64],
) -> Result<Vec<f64>> {
    check_observable(observable, spec)?;
    if params.len() != spec.n_params() {
        return Err(Error::ParamLength {
            got: params.len(),
            expected: spec.n_params(),
        });
    }
    let psi = spec.prepare(params)?;
    adjoint_gradient(observable, spec, params, &psi)
}

fn fisher_from_states(
    psi: &Statevector,
    derivs: &[Statevector],
    variant: FisherVariant,
) -> Result<FisherMatrix> {
    let p = derivs.len();
    let mut mat = DMatrix::<f64>::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let v = derivs[i].inner(&derivs[j])?.re;
            mat[(i, j)] = v;
            mat[(j, i)] = v;
        }
    }
    if variant == FisherVariant::Centered {
        let a: Vec<Complex64> = derivs
            .iter()
            .map(|d| d.inner(psi))
            .collect::<Result<_>>()?;
        for i in 0..p {
            for j in 0..p {
                mat[(i, j)] -= (a[i] * a[j].conj()).re;
            }
        }
    }
    Ok(FisherMatrix { variant, mat })
}

fn fisher_streaming(
    spec: &AnsatzSpec,
    params: &[f64],
    variant: FisherVariant,
    psi: &Statevector,
) -> Result<FisherMatrix> {
    let p = params.len();
    let mut mat = DMatrix::<f64>::zeros(p, p);
    let mut a = vec![Complex64::new(0.0, 0.0); p];
    for j in 0..p {
        let mut omega = Statevector::plus_state(spec.n_qubits())?;
        for (m, &theta) in params.iter().enumerate().take(j + 1) {
            omega.apply_layer_mut(spec.layer_at(m), theta)?;
        }
        let mut d = spec.layer_at(j).generator().apply_scaled(MINUS_I, &omega)?;
        for k in j..p {
            if k > j {
                let layer = spec.layer_at(k);
                omega.apply_layer_mut(layer, params[k])?;
                d.apply_layer_mut(layer, params[k])?;
            }
            let t = spec.layer_at(k).generator().apply_scaled(MINUS_I, &omega)?;
            let v = d.inner(&t)?.re;
            mat[(j, k)] = v;
            mat[(k, j)] = v;
        }
        // d has been propagated through every remaining layer by now
        a[j] = d.inner(psi)?;
    }
    if variant == FisherVariant::Centered {
        for i in 0..p {
            for j in 0..p {
                mat[(i, j)] -= (a[i] * a[j].conj()).re;
            }
        }
    }
    Ok(FisherMatrix { variant, mat })
}

/// Fisher information with the default memory policy.
pub fn fisher_matrix(
    spec: &AnsatzSpec,
    params: &[f64],
    variant: FisherVariant,
) -> Result<FisherMatrix> {
    fisher_matrix_with_mode(spec, params, variant, DerivativeMode::Auto)
}

pub fn fisher_matrix_with_mode(
    spec: &AnsatzSpec,
    params: &[f64],
    variant: FisherVariant,
    mode: DerivativeMode,
) -> Result<FisherMatrix> {
    if params.len() != spec.n_params() {
        return Err(Error::ParamLength {
            got: params.len(),
            expected: spec.n_params(),
        });
    }
    if mode.stores(params.len(), 1 << spec.n_qubits()) {
        let (psi, derivs) = forward_with_derivatives(spec, params)?;
        fisher_from_states(&psi, &derivs, variant)
    } else {
        let psi = spec.prepare(params)?;
        fisher_streaming(spec, params, variant, &psi)
    }
}

/// Everything the optimizer needs for one epoch, computed in a single
/// sweep: the prepared state, the objective value, its gradient, and the
/// Fisher matrix.
#[derive(Clone, Debug)]
pub struct StepEvaluation {
    pub state: Statevector,
    pub objective: f64,
    pub gradient: Vec<f64>,
    pub fisher: FisherMatrix,
}

pub fn evaluate_step(
    objective: &PauliSum,
    spec: &AnsatzSpec,
    params: &[f64],
    variant: FisherVariant,
    mode: DerivativeMode,
) -> Result<StepEvaluation> {
    check_observable(objective, spec)?;
    if params.len() != spec.n_params() {
        return Err(Error::ParamLength {
            got: params.len(),
            expected: spec.n_params(),
        });
    }
    if mode.stores(params.len(), 1 << spec.n_qubits()) {
        let (psi, derivs) = forward_with_derivatives(spec, params)?;
        let hpsi = objective.apply(&psi)?;
        let value = psi.inner(&hpsi)?.re;
        let gradient: Vec<f64> = derivs
            .iter()
            .map(|d| Ok(2.0 * d.inner(&hpsi)?.re))
            .collect::<Result<_>>()?;
        let fisher = fisher_from_states(&psi, &derivs, variant)?;
        Ok(StepEvaluation {
            state: psi,
            objective: value,
            gradient,
            fisher,
        })
    } else {
        let psi = spec.prepare(params)?;
        let hpsi = objective.apply(&psi)?;
        let value = psi.inner(&hpsi)?.re;
        let gradient = adjoint_gradient(objective, spec, params, &psi)?;
        let fisher = fisher_streaming(spec, params, variant, &psi)?;
        Ok(StepEvaluation {
            state: psi,
            objective: value,
            gradient,
            fisher,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{sb_tfc, sb_tfi, AnsatzSpec};
    use crate::hamiltonians::build_tfi;
    use crate::pauli::{Axis, PauliString};
    use crate::state::LayerSpec;
    use approx::assert_abs_diff_eq;

    /// One qubit, one diagonal layer: |psi> = exp(-i theta Z)|+> has energy
    /// <X> = cos(2 theta), gradient -2 sin(2 theta), and unit Fisher metric
    /// in both variants at every angle.
    fn single_z_spec() -> (PauliSum, AnsatzSpec) {
        let z = PauliSum::new(1, [(1.0, PauliString::single(1, 0, Axis::Z).unwrap())]).unwrap();
        let layer = LayerSpec::new("z", z, vec![], true).unwrap();
        let spec = AnsatzSpec::new(1, 1, vec![layer]).unwrap();
        let h = PauliSum::new(1, [(1.0, PauliString::single(1, 0, Axis::X).unwrap())]).unwrap();
        (h, spec)
    }

    #[test]
    fn toy_energy_gradient_and_fisher() {
        let (h, spec) = single_z_spec();
        for &theta in &[0.0, std::f64::consts::FRAC_PI_8, 0.9, -1.3] {
            let psi = spec.prepare(&[theta]).unwrap();
            assert_abs_diff_eq!(
                h.expectation(&psi).unwrap(),
                (2.0 * theta).cos(),
                epsilon = 1e-12
            );
            let g = energy_gradient(&h, &spec, &[theta]).unwrap();
            assert_abs_diff_eq!(g[0], -2.0 * (2.0 * theta).sin(), epsilon = 1e-12);
            for variant in [FisherVariant::Centered, FisherVariant::Uncentered] {
                let f = fisher_matrix(&spec, &[theta], variant).unwrap();
                assert_abs_diff_eq!(f.get(0, 0), 1.0, epsilon = 1e-12);
            }
        }
        let g = energy_gradient(&h, &spec, &[std::f64::consts::FRAC_PI_8]).unwrap();
        assert_abs_diff_eq!(g[0], -std::f64::consts::SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let spec = sb_tfi(4, 2).unwrap();
        let h = build_tfi(4, 0.5).unwrap();
        let params: Vec<f64> = (0..spec.n_params())
            .map(|k| 0.1 + 0.07 * k as f64)
            .collect();
        let grad = energy_gradient(&h, &spec, &params).unwrap();
        let eps = 1e-5;
        for k in 0..params.len() {
            let mut up = params.clone();
            up[k] += eps;
            let mut dn = params.clone();
            dn[k] -= eps;
            let fd = (h.expectation(&spec.prepare(&up).unwrap()).unwrap()
                - h.expectation(&spec.prepare(&dn).unwrap()).unwrap())
                / (2.0 * eps);
            assert_abs_diff_eq!(grad[k], fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn stored_and_streaming_agree() {
        let spec = sb_tfc(4, 2).unwrap();
        let h = crate::hamiltonians::build_tfc(4, 0.5).unwrap();
        let params: Vec<f64> = (0..spec.n_params())
            .map(|k| 0.21 - 0.09 * k as f64)
            .collect();
        for variant in [FisherVariant::Centered, FisherVariant::Uncentered] {
            let a = evaluate_step(&h, &spec, &params, variant, DerivativeMode::Stored).unwrap();
            let b = evaluate_step(&h, &spec, &params, variant, DerivativeMode::Streaming).unwrap();
            assert_abs_diff_eq!(a.objective, b.objective, epsilon = 1e-12);
            for (x, y) in a.gradient.iter().zip(&b.gradient) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
            for i in 0..a.fisher.dim() {
                for j in 0..a.fisher.dim() {
                    assert_abs_diff_eq!(a.fisher.get(i, j), b.fisher.get(i, j), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn variants_differ_by_rank_one_term() {
        let spec = sb_tfi(4, 2).unwrap();
        let params: Vec<f64> = (0..spec.n_params())
            .map(|k| 0.3 * ((k + 1) as f64).sin())
            .collect();
        let nc = fisher_matrix(&spec, &params, FisherVariant::Uncentered).unwrap();
        let c = fisher_matrix(&spec, &params, FisherVariant::Centered).unwrap();
        let psi = spec.prepare(&params).unwrap();
        let derivs = derivative_states(&spec, &params).unwrap();
        let beta: Vec<f64> = derivs
            .iter()
            .map(|d| -d.inner(&psi).unwrap().im)
            .collect();
        for i in 0..nc.dim() {
            for j in 0..nc.dim() {
                assert_abs_diff_eq!(
                    nc.get(i, j) - c.get(i, j),
                    beta[i] * beta[j],
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn gradient_is_variant_independent() {
        let spec = sb_tfi(4, 2).unwrap();
        let h = build_tfi(4, 1.0).unwrap();
        let params: Vec<f64> = (0..spec.n_params()).map(|k| 0.05 * k as f64).collect();
        let a = evaluate_step(&h, &spec, &params, FisherVariant::Centered, DerivativeMode::Auto)
            .unwrap();
        let b = evaluate_step(
            &h,
            &spec,
            &params,
            FisherVariant::Uncentered,
            DerivativeMode::Auto,
        )
        .unwrap();
        assert_eq!(a.gradient, b.gradient);
        assert_eq!(a.objective, b.objective);
    }

    #[test]
    fn size_mismatches_are_rejected() {
        let (h, spec) = single_z_spec();
        assert!(energy_gradient(&h, &spec, &[0.0, 0.0]).is_err());
        let h2 = build_tfi(2, 0.5).unwrap();
        assert!(energy_gradient(&h2, &spec, &[0.0]).is_err());
    }
}
