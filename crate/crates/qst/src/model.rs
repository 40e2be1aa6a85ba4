//! The transfer-chain model: interaction Hamiltonian, collapse channels,
//! initial and target states, and the NV dressed-state parameters.
//!
//! Everything is written in the resonant interaction picture, so the total
//! Hamiltonian
//!
//! ```text
//! H = g1 (σ1⁻ a† + σ1⁺ a) + g2 (b σ2⁺ + b† σ2⁻) + J (a b† + a† b)
//! ```
//!
//! has zero diagonal; bare frequencies are assumed matched (resonator a to
//! the qubit, the mechanical mode b to the NV dressed splitting ω_d − ω_m)
//! and dropped. The NV enters as an abstract two-level system {|m⟩, |d⟩};
//! [`nv_dressing`] documents and validates the microwave dressing that
//! produces those levels but does not feed the propagator.

use nalgebra::DMatrix;


use crate::hilbert::{
    embed, fock_annihilation, qubit_lower, Operator, StateVector, SubsystemLayout, C64,
};
use crate::{Error, Result};

/// Decay and dephasing rates, all in units of g2.
///
/// `kappa_a`/`kappa_b` are the resonator photon/phonon decay rates,
/// `gamma_j` the relaxation and `gamma_phi_j` the pure-dephasing rates of the
/// qubit (j = 1) and the NV (j = 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceRates {
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub gamma_1: f64,
    pub gamma_phi_1: f64,
    pub gamma_2: f64,
    pub gamma_phi_2: f64,
}

impl DecoherenceRates {
    /// The single-parameter model used throughout: the four "fast" channels
    /// (both resonator decays, qubit relaxation and dephasing) share one rate
    /// ξ and the two NV channels share a much smaller ζ.
    pub fn uniform_xi_zeta(xi: f64, zeta: f64) -> Self {
        Self {
            kappa_a: xi,
            kappa_b: xi,
            gamma_1: xi,
            gamma_phi_1: xi,
            gamma_2: zeta,
            gamma_phi_2: zeta,
        }
    }

    pub fn none() -> Self {
        Self::uniform_xi_zeta(0.0, 0.0)
    }

    /// Rates in collapse-channel order: (κ_a, κ_b, γ1, Γ1, γ2, Γ2).
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.kappa_a,
            self.kappa_b,
            self.gamma_1,
            self.gamma_phi_1,
            self.gamma_2,
            self.gamma_phi_2,
        ]
    }

    pub fn max_rate(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.as_array().into_iter().any(|r| !(r >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "rates",
                reason: "all decoherence rates must be finite and non-negative".into(),
            });
        }
        Ok(())
    }
}

/// Full parameter set for one evolution, in units of g2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Qubit / transmission-line-resonator coupling.
    pub g1: f64,
    /// NV / mechanical-resonator coupling (the normalization; default 1).
    pub g2: f64,
    /// Inter-resonator hopping.
    pub j: f64,
    /// Initial superposition angle of the qubit state cosθ|1⟩ + sinθ|0⟩.
    pub theta: f64,
    pub rates: DecoherenceRates,
    /// Fock truncation of both resonators (2 suffices for one excitation;
    /// 3 is used for truncation-validation runs).
    pub fock_dim: usize,
}

impl ModelParams {
    pub fn new(
        g1: f64,
        g2: f64,
        j: f64,
        theta: f64,
        rates: DecoherenceRates,
        fock_dim: usize,
    ) -> Result<Self> {
        let params = Self {
            g1,
            g2,
            j,
            theta,
            rates,
            fock_dim,
        };
        params.validate()?;
        Ok(params)
    }

    /// Symmetric-coupling shorthand with g1 = g2 = 1 and θ = π/4.
    pub fn symmetric(j: f64, rates: DecoherenceRates) -> Result<Self> {
        Self::new(1.0, 1.0, j, std::f64::consts::FRAC_PI_4, rates, 2)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("g1", self.g1), ("g2", self.g2), ("j", self.j)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("coupling must be finite and non-negative, got {v}"),
                });
            }
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&self.theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: format!("must lie in [0, π/2], got {}", self.theta),
            });
        }
        if self.fock_dim < 2 {
            return Err(Error::InvalidDimension(self.fock_dim));
        }
        self.rates.validate()
    }

    pub fn layout(&self) -> SubsystemLayout {
        SubsystemLayout::chain(self.fock_dim).expect("fock_dim validated >= 2")
    }
}

/// Dressed-state parameters of the driven NV ground-state triplet.
///
/// The two |±1⟩ levels are driven to |0⟩ with common detuning Δ > 0 and
/// strength Ω. Only the bright combination |b⟩ = (|−1⟩+|1⟩)/√2 couples;
/// the dark state |d⟩ stays an eigenstate at ω_d = Δ, while |0⟩ and |b⟩ mix
/// into |m⟩ and |e⟩ with angle ϑ given by tan 2ϑ = √2 Ω / Δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NvDressing {
    pub delta: f64,
    pub omega: f64,
    /// Mixing angle ϑ.
    pub vartheta: f64,
    /// Eigenvalues (ω_d, ω_m, ω_e).
    pub eigenvalues: (f64, f64, f64),
}

impl NvDressing {
    /// Splitting ω_d − ω_m that the mechanical mode is tuned to.
    pub fn dm_splitting(&self) -> f64 {
        self.eigenvalues.0 - self.eigenvalues.1
    }

    /// The 3×3 dressing Hamiltonian in the {|0⟩, |b⟩, |d⟩} basis.
    pub fn hamiltonian_3(&self) -> Operator {
        let c = |x: f64| C64::new(x, 0.0);
        let coupling = self.omega / 2.0_f64.sqrt();
        Operator::from_matrix(DMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.0),
                c(coupling),
                c(0.0),
                c(coupling),
                c(self.delta),
                c(0.0),
                c(0.0),
                c(0.0),
                c(self.delta),
            ],
        ))
        .expect("square by construction")
    }
}

/// Dressed-state angle and spectrum for detuning Δ > 0 and drive Ω ≥ 0.
pub fn nv_dressing(delta: f64, omega: f64) -> Result<NvDressing> {
    if !(delta > 0.0) {
        return Err(Error::InvalidDetuning(delta));
    }
    if !(omega >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: format!("drive strength must be non-negative, got {omega}"),
        });
    }
    let vartheta = (2.0_f64.sqrt() * omega / delta).atan() / 2.0;
    let root = (delta * delta + 2.0 * omega * omega).sqrt();
    let omega_d = delta;
    let omega_m = (delta - root) / 2.0;
    let omega_e = (delta + root) / 2.0;
    Ok(NvDressing {
        delta,
        omega,
        vartheta,
        eigenvalues: (omega_d, omega_m, omega_e),
    })
}

/// σᶻ of a two-level system in our index convention:
/// |excited⟩⟨excited| − |ground⟩⟨ground| = diag(−1, +1).
pub fn qubit_sigma_z() -> Operator {
    let sm = qubit_lower();
    let sp = sm.adjoint();
    &(&sp * &sm) - &(&sm * &sp)
}

fn check_chain_layout(layout: &SubsystemLayout, fock_dim: usize) -> Result<()> {
    let dims = layout.dims();
    let ok = dims.len() == 4
        && dims[SubsystemLayout::QUBIT] == 2
        && dims[SubsystemLayout::NV] == 2
        && dims[SubsystemLayout::RES_A] == fock_dim
        && dims[SubsystemLayout::RES_B] == fock_dim;
    if !ok {
        return Err(Error::DimensionMismatch {
            context: "chain layout",
            got: layout.total_dim(),
            expected: 4 * fock_dim * fock_dim,
        });
    }
    Ok(())
}

/// The full interaction Hamiltonian on the composite space (zero diagonal;
/// exact resonance assumed).
pub fn hamiltonian_total(params: &ModelParams, layout: &SubsystemLayout) -> Result<Operator> {
    params.validate()?;
    check_chain_layout(layout, params.fock_dim)?;

    let a = embed(
        &fock_annihilation(params.fock_dim)?,
        SubsystemLayout::RES_A,
        layout,
    )?;
    let b = embed(
        &fock_annihilation(params.fock_dim)?,
        SubsystemLayout::RES_B,
        layout,
    )?;
    let s1m = embed(&qubit_lower(), SubsystemLayout::QUBIT, layout)?;
    let s2m = embed(&qubit_lower(), SubsystemLayout::NV, layout)?;
    let (a_dag, b_dag) = (a.adjoint(), b.adjoint());
    let (s1p, s2p) = (s1m.adjoint(), s2m.adjoint());

    let g1 = C64::new(params.g1, 0.0);
    let g2 = C64::new(params.g2, 0.0);
    let j = C64::new(params.j, 0.0);
    let h_a1 = (&(&s1m * &a_dag) + &(&s1p * &a)).scale(g1);
    let h_b2 = (&(&b * &s2p) + &(&b_dag * &s2m)).scale(g2);
    let h_ab = (&(&a * &b_dag) + &(&a_dag * &b)).scale(j);
    Ok(&(&h_a1 + &h_b2) + &h_ab)
}

/// The six collapse channels of the master equation, embedded on the full
/// space and paired with their rates:
/// (κ_a, a), (κ_b, b), (γ1, σ1⁻), (Γ1, σ1ᶻ), (γ2, σ2⁻), (Γ2, σ2ᶻ).
pub fn collapse_operators(
    rates: &DecoherenceRates,
    layout: &SubsystemLayout,
) -> Result<Vec<(f64, Operator)>> {
    rates.validate()?;
    let fock_dim = layout.dims()[SubsystemLayout::RES_A];
    check_chain_layout(layout, fock_dim)?;
    let r = rates.as_array();
    Ok(vec![
        (
            r[0],
            embed(&fock_annihilation(fock_dim)?, SubsystemLayout::RES_A, layout)?,
        ),
        (
            r[1],
            embed(&fock_annihilation(fock_dim)?, SubsystemLayout::RES_B, layout)?,
        ),
        (r[2], embed(&qubit_lower(), SubsystemLayout::QUBIT, layout)?),
        (r[3], embed(&qubit_sigma_z(), SubsystemLayout::QUBIT, layout)?),
        (r[4], embed(&qubit_lower(), SubsystemLayout::NV, layout)?),
        (r[5], embed(&qubit_sigma_z(), SubsystemLayout::NV, layout)?),
    ])
}

/// Initial product state cosθ|1 m 0 0⟩ + sinθ|0 m 0 0⟩.
pub fn initial_state(theta: f64, layout: &SubsystemLayout) -> Result<StateVector> {
    let fock_dim = layout.dims()[SubsystemLayout::RES_A];
    check_chain_layout(layout, fock_dim)?;
    let excited = layout.flatten(&[1, 0, 0, 0]);
    let ground = layout.flatten(&[0, 0, 0, 0]);
    let mut v = nalgebra::DVector::<C64>::zeros(layout.total_dim());
    v[excited] = C64::new(theta.cos(), 0.0);
    v[ground] = C64::new(theta.sin(), 0.0);
    Ok(StateVector::from_vector(v))
}

/// Transfer target on the NV factor alone: cosθ|d⟩ + sinθ|m⟩
/// (|m⟩ is index 0, |d⟩ index 1).
pub fn target_nv_state(theta: f64) -> StateVector {
    let mut v = nalgebra::DVector::<C64>::zeros(2);
    v[0] = C64::new(theta.sin(), 0.0);
    v[1] = C64::new(theta.cos(), 0.0);
    StateVector::from_vector(v)
}

/// Single-excitation reduction of the chain: real symmetric tridiagonal with
/// off-diagonals (g1, J, g2) and zero diagonal, on the site ordering
/// (qubit |φ3⟩, resonator a |φ1⟩, resonator b |φ2⟩, NV |φ4⟩).
pub fn chain_hamiltonian_4(g1: f64, j: f64, g2: f64) -> Operator {
    let mut mat = DMatrix::<C64>::zeros(4, 4);
    for (k, &c) in [g1, j, g2].iter().enumerate() {
        mat[(k, k + 1)] = C64::new(c, 0.0);
        mat[(k + 1, k)] = C64::new(c, 0.0);
    }
    Operator::from_matrix(mat).expect("square by construction")
}

/// Flat indices of the single-excitation basis {|φ1⟩, |φ2⟩, |φ3⟩, |φ4⟩} =
/// {|0m10⟩, |0m01⟩, |1m00⟩, |0d00⟩} in a chain layout.
pub fn phi_basis_indices(layout: &SubsystemLayout) -> [usize; 4] {
    [
        layout.flatten(&[0, 0, 1, 0]),
        layout.flatten(&[0, 0, 0, 1]),
        layout.flatten(&[1, 0, 0, 0]),
        layout.flatten(&[0, 1, 0, 0]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn dressing_without_drive_is_trivial() {
        let d = nv_dressing(2.5, 0.0).unwrap();
        assert_abs_diff_eq!(d.vartheta, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.eigenvalues.0, 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.eigenvalues.1, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.eigenvalues.2, 2.5, epsilon = 1e-15);
    }

    #[test]
    fn dressing_angle_follows_tan_relation() {
        // tan(2ϑ) = √2 Ω / Δ; Ω = 1/√2, Δ = 1 gives ϑ = π/8
        let d = nv_dressing(1.0, 1.0 / 2.0_f64.sqrt()).unwrap();
        assert_abs_diff_eq!(d.vartheta, PI / 8.0, epsilon = 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let delta = rng.gen_range(0.1..5.0);
            let omega = rng.gen_range(0.0..5.0);
            let d = nv_dressing(delta, omega).unwrap();
            assert_abs_diff_eq!(
                (2.0 * d.vartheta).tan(),
                2.0_f64.sqrt() * omega / delta,
                epsilon = 1e-10
            );
            let (wd, wm, we) = d.eigenvalues;
            assert!(wm <= wd + 1e-12 && wd <= we + 1e-12, "ω_d between ω_m and ω_e");
        }
    }

    #[test]
    fn dressing_eigenvalues_match_numerical_eigensolve() {
        // independent oracle: diagonalize the 3x3 dressing Hamiltonian
        let d = nv_dressing(1.0, 1.0).unwrap();
        let (wd, wm, we) = d.eigenvalues;
        assert_abs_diff_eq!(wd, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(wm, (1.0 - 3.0_f64.sqrt()) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(we, (1.0 + 3.0_f64.sqrt()) / 2.0, epsilon = 1e-12);

        let eig = d.hamiltonian_3().matrix().clone().symmetric_eigen();
        let mut evs: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expect = [wm, wd, we];
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in evs.iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn dressing_rejects_bad_detuning() {
        assert!(matches!(nv_dressing(0.0, 1.0), Err(Error::InvalidDetuning(_))));
        assert!(matches!(nv_dressing(-1.0, 1.0), Err(Error::InvalidDetuning(_))));
    }

    #[test]
    fn hamiltonian_zero_couplings_is_zero() {
        let params =
            ModelParams::new(0.0, 0.0, 0.0, FRAC_PI_4, DecoherenceRates::none(), 2).unwrap();
        let h = hamiltonian_total(&params, &params.layout()).unwrap();
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn hamiltonian_is_hermitian_and_conserves_excitation() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let params = ModelParams::new(
                rng.gen_range(0.0..3.0),
                rng.gen_range(0.0..3.0),
                rng.gen_range(0.0..3.0),
                FRAC_PI_4,
                DecoherenceRates::none(),
                3,
            )
            .unwrap();
            let layout = params.layout();
            let h = hamiltonian_total(&params, &layout).unwrap();
            assert!((&h - &h.adjoint()).max_abs() < 1e-12);

            // N = σ1⁺σ1⁻ + σ2⁺σ2⁻ + a†a + b†b commutes with H
            let sm = qubit_lower();
            let num2 = &sm.adjoint() * &sm;
            let a = fock_annihilation(3).unwrap();
            let num_fock = &a.adjoint() * &a;
            let mut n_total = Operator::zeros(layout.total_dim());
            for (op, slot) in [
                (&num2, SubsystemLayout::QUBIT),
                (&num2, SubsystemLayout::NV),
                (&num_fock, SubsystemLayout::RES_A),
                (&num_fock, SubsystemLayout::RES_B),
            ] {
                n_total = &n_total + &embed(op, slot, &layout).unwrap();
            }
            let comm = &(&h * &n_total) - &(&n_total * &h);
            assert!(comm.max_abs() < 1e-12);

            // the global ground state |0m00⟩ is a zero eigenvector
            let gnd = layout.basis_state(&[0, 0, 0, 0]);
            assert!(h.apply(&gnd).norm() < 1e-15);
        }
    }

    #[test]
    fn hamiltonian_projects_onto_tridiagonal_chain() {
        // projection oracle: ⟨φ_i|H|φ_j⟩ on the ordering (φ3, φ1, φ2, φ4)
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..5 {
            let (g1, j, g2) = (
                rng.gen_range(0.0..3.0),
                rng.gen_range(0.0..3.0),
                rng.gen_range(0.0..3.0),
            );
            let params =
                ModelParams::new(g1, g2, j, FRAC_PI_4, DecoherenceRates::none(), 2).unwrap();
            let layout = params.layout();
            let h = hamiltonian_total(&params, &layout).unwrap();
            let phi = phi_basis_indices(&layout);
            let order = [phi[2], phi[0], phi[1], phi[3]];
            let chain = chain_hamiltonian_4(g1, j, g2);
            for (r, &ir) in order.iter().enumerate() {
                for (c, &ic) in order.iter().enumerate() {
                    let got = h.matrix()[(ir, ic)];
                    let want = chain.matrix()[(r, c)];
                    assert!((got - want).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn hamiltonian_example_with_mixed_couplings() {
        let params = ModelParams::new(1.0, 1.0, 1.2, FRAC_PI_4, DecoherenceRates::none(), 2).unwrap();
        let layout = params.layout();
        let h = hamiltonian_total(&params, &layout).unwrap();
        let phi = phi_basis_indices(&layout);
        let order = [phi[2], phi[0], phi[1], phi[3]];
        let expect = [
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 1.2, 0.0],
            [0.0, 1.2, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ];
        for (r, &ir) in order.iter().enumerate() {
            for (c, &ic) in order.iter().enumerate() {
                assert_abs_diff_eq!(h.matrix()[(ir, ic)].re, expect[r][c], epsilon = 1e-15);
                assert_abs_diff_eq!(h.matrix()[(ir, ic)].im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn collapse_channels_have_the_stated_rates() {
        let layout = SubsystemLayout::chain(2).unwrap();
        let ops = collapse_operators(&DecoherenceRates::uniform_xi_zeta(0.03, 0.001), &layout)
            .unwrap();
        let rates: Vec<f64> = ops.iter().map(|(r, _)| *r).collect();
        assert_eq!(rates, vec![0.03, 0.03, 0.03, 0.03, 0.001, 0.001]);

        let zero = collapse_operators(&DecoherenceRates::none(), &layout).unwrap();
        assert_eq!(zero.len(), 6);
        assert!(zero.iter().all(|(r, _)| *r == 0.0));
    }

    #[test]
    fn ground_state_is_dark_to_every_channel() {
        let layout = SubsystemLayout::chain(2).unwrap();
        let gnd = layout.basis_state(&[0, 0, 0, 0]);
        let ops = collapse_operators(&DecoherenceRates::uniform_xi_zeta(0.03, 0.001), &layout)
            .unwrap();
        for (k, (_, op)) in ops.iter().enumerate() {
            let mapped = op.apply(&gnd);
            if k == 3 || k == 5 {
                // σᶻ channels leave the ground state an eigenvector (−1)
                let diff = mapped.amplitudes() + gnd.amplitudes();
                assert!(diff.norm() < 1e-15, "channel {k}");
            } else {
                assert!(mapped.norm() < 1e-15, "channel {k}");
            }
        }
    }

    #[test]
    fn single_excitation_sector_is_invariant_at_fock_2() {
        // span{|0m00⟩, φ1..φ4} maps into itself under H and every channel
        let params = ModelParams::new(1.3, 0.7, 2.1, FRAC_PI_4, DecoherenceRates::none(), 2).unwrap();
        let layout = params.layout();
        let h = hamiltonian_total(&params, &layout).unwrap();
        let ops = collapse_operators(&DecoherenceRates::uniform_xi_zeta(0.03, 0.001), &layout)
            .unwrap();
        let phi = phi_basis_indices(&layout);
        let mut sector = vec![layout.flatten(&[0, 0, 0, 0])];
        sector.extend_from_slice(&phi);

        let mut mats = vec![h.matrix().clone()];
        mats.extend(ops.iter().map(|(_, op)| op.matrix().clone()));
        for m in &mats {
            for &col in &sector {
                for row in 0..layout.total_dim() {
                    if !sector.contains(&row) {
                        assert!(m[(row, col)].norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn initial_and_target_states() {
        let layout = SubsystemLayout::chain(2).unwrap();
        let excited = layout.flatten(&[1, 0, 0, 0]);
        let ground = layout.flatten(&[0, 0, 0, 0]);

        let psi0 = initial_state(0.0, &layout).unwrap();
        assert_abs_diff_eq!(psi0.amplitudes()[excited].re, 1.0, epsilon = 1e-15);

        let psi1 = initial_state(FRAC_PI_2, &layout).unwrap();
        assert_abs_diff_eq!(psi1.amplitudes()[ground].re, 1.0, epsilon = 1e-15);

        let psih = initial_state(FRAC_PI_4, &layout).unwrap();
        assert_abs_diff_eq!(psih.norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(psih.amplitudes()[excited].re, psih.amplitudes()[ground].re, epsilon = 1e-15);

        // target on the NV factor: index 0 = m, index 1 = d
        let t0 = target_nv_state(0.0);
        assert_abs_diff_eq!(t0.amplitudes()[1].re, 1.0, epsilon = 1e-15);
        let t1 = target_nv_state(FRAC_PI_2);
        assert_abs_diff_eq!(t1.amplitudes()[0].re, 1.0, epsilon = 1e-15);
        for theta in [0.0, 0.3, FRAC_PI_4, 1.2, FRAC_PI_2] {
            assert_abs_diff_eq!(target_nv_state(theta).norm(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn chain_spectrum_of_the_equally_spaced_coupling() {
        // (1, 2/√3, 1) has eigenvalues {±√3, ±1/√3}
        let chain = chain_hamiltonian_4(1.0, 2.0 / 3.0_f64.sqrt(), 1.0);
        let eig = chain.matrix().clone().symmetric_eigen();
        let mut evs: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let s3 = 3.0_f64.sqrt();
        let expect = [-s3, -1.0 / s3, 1.0 / s3, s3];
        for (got, want) in evs.iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn params_validation() {
        let rates = DecoherenceRates::none();
        assert!(ModelParams::new(-0.1, 1.0, 1.0, 0.0, rates, 2).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0, -0.1, rates, 2).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0, 2.0, rates, 2).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0, 0.0, rates, 1).is_err());
        let mut bad = DecoherenceRates::none();
        bad.kappa_a = -1.0;
        assert!(ModelParams::new(1.0, 1.0, 1.0, 0.0, bad, 2).is_err());
    }
}
