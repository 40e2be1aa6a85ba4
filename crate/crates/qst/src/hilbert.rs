//! Composite Hilbert-space bookkeeping and dense complex operator algebra.
//!
//! The composite space is an ordered tensor product of subsystems; flat
//! indices are row-major over the subsystem multi-index, so for a layout
//! `[d0, d1, d2, d3]` the basis state `|i0 i1 i2 i3⟩` has flat index
//! `((i0*d1 + i1)*d2 + i2)*d3 + i3`. Everything is dense `Complex64`; at the
//! scales this crate targets (total dimension ≤ 36) dense wins on simplicity
//! and is more than fast enough.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;

/// Ordered list of subsystem dimensions defining the composite space.
///
/// The canonical ordering for the transfer chain is
/// `[qubit (2), NV (2), resonator a (N), resonator b (N)]`; see [`SubsystemLayout::chain`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
}

impl SubsystemLayout {
    /// Slot of the superconducting qubit in the canonical chain layout.
    pub const QUBIT: usize = 0;
    /// Slot of the NV two-level system {|m⟩, |d⟩}.
    pub const NV: usize = 1;
    /// Slot of the transmission-line resonator mode a.
    pub const RES_A: usize = 2;
    /// Slot of the nanomechanical resonator mode b.
    pub const RES_B: usize = 3;

    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(&bad) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(bad));
        }
        Ok(Self { dims })
    }

    /// Canonical `[qubit, NV, resonator a, resonator b]` layout with both
    /// resonators truncated to `fock_dim` Fock states.
    pub fn chain(fock_dim: usize) -> Result<Self> {
        Self::new(vec![2, 2, fock_dim, fock_dim])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major stride of subsystem `slot` in the flat index.
    pub fn stride(&self, slot: usize) -> usize {
        self.dims[slot + 1..].iter().product()
    }

    /// Flat index of a multi-index. Panics if the multi-index is out of range;
    /// this is a programming error, not an input error.
    pub fn flatten(&self, multi: &[usize]) -> usize {
        assert_eq!(multi.len(), self.dims.len(), "multi-index arity mismatch");
        let mut flat = 0;
        for (&idx, &dim) in multi.iter().zip(&self.dims) {
            assert!(idx < dim, "multi-index component out of range");
            flat = flat * dim + idx;
        }
        flat
    }

    /// Inverse of [`flatten`](Self::flatten).
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        assert!(flat < self.total_dim(), "flat index out of range");
        let mut multi = vec![0; self.dims.len()];
        for (slot, &dim) in self.dims.iter().enumerate().rev() {
            multi[slot] = flat % dim;
            flat /= dim;
        }
        multi
    }

    /// Computational basis state |multi⟩ on the composite space.
    pub fn basis_state(&self, multi: &[usize]) -> StateVector {
        let mut v = DVector::<C64>::zeros(self.total_dim());
        v[self.flatten(multi)] = C64::new(1.0, 0.0);
        StateVector { vec: v }
    }
}

/// Dense complex square matrix acting on a (composite) Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        Ok(Self { mat })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            mat: self.mat.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Operator {
            mat: &self.mat * factor,
        }
    }

    pub fn kronecker(&self, other: &Operator) -> Operator {
        Operator {
            mat: self.mat.kronecker(&other.mat),
        }
    }

    /// Apply to a ket: |out⟩ = A|ψ⟩.
    pub fn apply(&self, psi: &StateVector) -> StateVector {
        StateVector {
            vec: &self.mat * &psi.vec,
        }
    }

    /// Largest entry magnitude; handy for "equal to tolerance" checks.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat * &rhs.mat,
        }
    }
}

/// Complex amplitude vector on a (composite) Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    vec: DVector<C64>,
}

impl StateVector {
    pub fn from_vector(vec: DVector<C64>) -> Self {
        Self { vec }
    }

    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.vec
    }

    pub fn norm(&self) -> f64 {
        self.vec.norm()
    }

    /// Errors unless ‖ψ‖ is within `tol` of 1.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let dev = (self.norm() - 1.0).abs();
        if dev > tol {
            return Err(Error::NotNormalized(dev));
        }
        Ok(())
    }

    /// ⟨self|other⟩ (conjugate-linear in `self`).
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.vec.dotc(&other.vec)
    }
}

/// Dense density matrix with validity diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        Ok(Self { mat })
    }

    /// |ψ⟩⟨ψ| for a pure state.
    pub fn from_pure(psi: &StateVector) -> Self {
        let n = psi.dim();
        let mat = DMatrix::from_fn(n, n, |i, j| psi.vec[i] * psi.vec[j].conj());
        Self { mat }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// |tr ρ − 1|.
    pub fn trace_deviation(&self) -> f64 {
        (self.mat.trace() - C64::new(1.0, 0.0)).norm()
    }

    /// max |ρ − ρ†| entrywise.
    pub fn hermiticity_deviation(&self) -> f64 {
        let adj = self.mat.adjoint();
        (&self.mat - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part (ρ + ρ†)/2.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Checks the density-matrix contract: Hermitian to 1e-10 entrywise,
    /// trace within 1e-8 of one, smallest eigenvalue ≥ −1e-8.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_deviation();
        if herm > 1e-10 {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian: max |ρ - ρ†| = {herm:.3e}"
            )));
        }
        let tr = self.trace_deviation();
        if tr > 1e-8 {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace deviates from one by {tr:.3e}"
            )));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -1e-8 {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(())
    }
}

/// Annihilation operator on an `n`-dimensional Fock space:
/// ⟨k−1|a|k⟩ = √k for 1 ≤ k ≤ n−1, all other entries zero.
pub fn fock_annihilation(n: usize) -> Result<Operator> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let mut mat = DMatrix::<C64>::zeros(n, n);
    for k in 1..n {
        mat[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    Ok(Operator { mat })
}

/// Lowering operator of a two-level system: maps basis index 1 (excited,
/// |1⟩ for the qubit or |d⟩ for the NV) to index 0 (ground, |0⟩ or |m⟩).
pub fn qubit_lower() -> Operator {
    let mut mat = DMatrix::<C64>::zeros(2, 2);
    mat[(0, 1)] = C64::new(1.0, 0.0);
    Operator { mat }
}

/// Embed `local` on subsystem `slot`: I ⊗ … ⊗ local ⊗ … ⊗ I in the layout's
/// fixed ordering.
pub fn embed(local: &Operator, slot: usize, layout: &SubsystemLayout) -> Result<Operator> {
    if slot >= layout.num_subsystems() {
        return Err(Error::InvalidSlot {
            slot,
            count: layout.num_subsystems(),
        });
    }
    if local.dim() != layout.dims()[slot] {
        return Err(Error::SlotDimMismatch {
            slot,
            got: local.dim(),
            expected: layout.dims()[slot],
        });
    }
    let mut acc = DMatrix::<C64>::identity(1, 1);
    for (s, &dim) in layout.dims().iter().enumerate() {
        if s == slot {
            acc = acc.kronecker(&local.mat);
        } else {
            acc = acc.kronecker(&DMatrix::identity(dim, dim));
        }
    }
    Ok(Operator { mat: acc })
}

/// Trace out every subsystem except `keep`; the result lives on that
/// subsystem and carries the same trace as the input.
pub fn partial_trace(
    rho: &DensityMatrix,
    keep: usize,
    layout: &SubsystemLayout,
) -> Result<DensityMatrix> {
    if keep >= layout.num_subsystems() {
        return Err(Error::InvalidSlot {
            slot: keep,
            count: layout.num_subsystems(),
        });
    }
    let total = layout.total_dim();
    if rho.dim() != total {
        return Err(Error::DimensionMismatch {
            context: "partial_trace",
            got: rho.dim(),
            expected: total,
        });
    }
    let dk = layout.dims()[keep];
    let stride = layout.stride(keep);
    let mut out = DMatrix::<C64>::zeros(dk, dk);
    // Enumerate flat indices whose `keep` digit is zero; offsetting by
    // a·stride selects the digit.
    for f in 0..total {
        if (f / stride) % dk != 0 {
            continue;
        }
        for a in 0..dk {
            for b in 0..dk {
                out[(a, b)] += rho.mat[(f + a * stride, f + b * stride)];
            }
        }
    }
    Ok(DensityMatrix { mat: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_operator(rng: &mut impl Rng, dim: usize) -> Operator {
        Operator::from_matrix(DMatrix::from_fn(dim, dim, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }))
        .unwrap()
    }

    #[test]
    fn layout_rejects_small_dims() {
        assert!(matches!(
            SubsystemLayout::new(vec![2, 1, 3]),
            Err(Error::InvalidDimension(1))
        ));
        assert!(SubsystemLayout::new(vec![]).is_err());
    }

    #[test]
    fn index_round_trip_is_bijective() {
        let layout = SubsystemLayout::new(vec![2, 2, 3, 3]).unwrap();
        assert_eq!(layout.total_dim(), 36);
        for flat in 0..layout.total_dim() {
            let multi = layout.unflatten(flat);
            assert_eq!(layout.flatten(&multi), flat);
        }
    }

    #[test]
    fn fock_annihilation_matches_ladder_definition() {
        let a2 = fock_annihilation(2).unwrap();
        assert_abs_diff_eq!(a2.matrix()[(0, 1)].re, 1.0, epsilon = 1e-15);
        assert_eq!(a2.matrix()[(1, 0)], C64::new(0.0, 0.0));

        let a3 = fock_annihilation(3).unwrap();
        assert_abs_diff_eq!(a3.matrix()[(0, 1)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a3.matrix()[(1, 2)].re, 2.0_f64.sqrt(), epsilon = 1e-15);
        assert_eq!(
            a3.matrix().iter().filter(|z| z.norm() > 0.0).count(),
            2,
            "only the two ladder entries are nonzero"
        );

        // number operator a†a = diag(0, 1)
        let n = &a2.adjoint() * &a2;
        assert_abs_diff_eq!(n.matrix()[(0, 0)].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n.matrix()[(1, 1)].re, 1.0, epsilon = 1e-15);

        assert!(matches!(fock_annihilation(1), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn qubit_lower_maps_excited_to_ground() {
        let sm = qubit_lower();
        let layout = SubsystemLayout::new(vec![2]).unwrap();
        let excited = layout.basis_state(&[1]);
        let ground = layout.basis_state(&[0]);
        let lowered = sm.apply(&excited);
        assert_abs_diff_eq!((lowered.amplitudes() - ground.amplitudes()).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sm.apply(&ground).norm(), 0.0, epsilon = 1e-15);

        // [σ⁺σ⁻, σ⁻] = −σ⁻
        let sp = sm.adjoint();
        let num = &sp * &sm;
        let comm = &(&num * &sm) - &(&sm * &num);
        let diff = &comm - &sm.scale(C64::new(-1.0, 0.0));
        assert!(diff.max_abs() < 1e-15);
    }

    #[test]
    fn embed_identity_and_commutation() {
        let layout = SubsystemLayout::chain(2).unwrap();
        let id = Operator::identity(2);
        for slot in 0..4 {
            let full = embed(&id, slot, &layout).unwrap();
            let diff = &full - &Operator::identity(layout.total_dim());
            assert!(diff.max_abs() < 1e-15);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_operator(&mut rng, 2);
        let b = random_operator(&mut rng, 2);
        let ea = embed(&a, 0, &layout).unwrap();
        let eb = embed(&b, 1, &layout).unwrap();
        let diff = &(&ea * &eb) - &(&eb * &ea);
        assert!(diff.max_abs() < 1e-12, "disjoint slots commute");

        // trace(embed(A, s)) = trace(A) · (total / dims[s])
        let tr = embed(&a, 2, &layout).unwrap().trace();
        let expect = a.trace() * C64::new((layout.total_dim() / 2) as f64, 0.0);
        assert_abs_diff_eq!((tr - expect).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn embed_is_an_algebra_homomorphism() {
        let layout = SubsystemLayout::new(vec![2, 3, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for slot in 0..3 {
            let dim = layout.dims()[slot];
            let a = random_operator(&mut rng, dim);
            let b = random_operator(&mut rng, dim);
            let lhs = embed(&(&a * &b), slot, &layout).unwrap();
            let rhs = &embed(&a, slot, &layout).unwrap() * &embed(&b, slot, &layout).unwrap();
            assert!((&lhs - &rhs).max_abs() < 1e-12);
        }
    }

    #[test]
    fn embed_rejects_wrong_dimension() {
        let layout = SubsystemLayout::chain(3).unwrap();
        let err = embed(&Operator::identity(2), SubsystemLayout::RES_A, &layout).unwrap_err();
        match err {
            Error::SlotDimMismatch { slot, got, expected } => {
                assert_eq!((slot, got, expected), (2, 2, 3));
            }
            other => panic!("unexpected error: {other}"),
        }
        assert!(embed(&Operator::identity(2), 9, &layout).is_err());
    }

    #[test]
    fn adjoint_product_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_operator(&mut rng, 4);
        let b = random_operator(&mut rng, 4);
        let lhs = (&a * &b).adjoint();
        let rhs = &b.adjoint() * &a.adjoint();
        assert!((&lhs - &rhs).max_abs() < 1e-12);
        // involution
        assert!((&a.adjoint().adjoint() - &a).max_abs() < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let layout = SubsystemLayout::new(vec![2, 2]).unwrap();
        // ρ₁ pure |1⟩⟨1|, ρ₂ mixed diag(0.25, 0.75)
        let rho1 = DMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ]));
        let rho2 = DMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(0.25, 0.0),
            C64::new(0.75, 0.0),
        ]));
        let product = DensityMatrix::from_matrix(rho1.kronecker(&rho2)).unwrap();
        let reduced = partial_trace(&product, 0, &layout).unwrap();
        assert!((reduced.matrix() - rho1).norm() < 1e-14);
        let reduced2 = partial_trace(&product, 1, &layout).unwrap();
        assert!((reduced2.matrix() - rho2).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let layout = SubsystemLayout::new(vec![2, 2]).unwrap();
        let mut v = DVector::<C64>::zeros(4);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        v[layout.flatten(&[0, 0])] = C64::new(r, 0.0);
        v[layout.flatten(&[1, 1])] = C64::new(r, 0.0);
        let bell = DensityMatrix::from_pure(&StateVector::from_vector(v));
        for keep in 0..2 {
            let reduced = partial_trace(&bell, keep, &layout).unwrap();
            let mixed = DensityMatrix::maximally_mixed(2);
            assert!((reduced.matrix() - mixed.matrix()).norm() < 1e-14);
        }
    }

    #[test]
    fn partial_trace_preserves_trace_and_expectations() {
        let layout = SubsystemLayout::new(vec![2, 3, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = layout.total_dim();
        // random PSD matrix with unit trace
        let g = DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let psd = &g * g.adjoint();
        let tr = psd.trace().re;
        let rho = DensityMatrix::from_matrix(psd * C64::new(1.0 / tr, 0.0)).unwrap();

        for keep in 0..3 {
            let reduced = partial_trace(&rho, keep, &layout).unwrap();
            assert_abs_diff_eq!(reduced.trace().re, rho.trace().re, epsilon = 1e-12);

            // trace(embed(A, s) ρ) = trace(A · partial_trace(ρ, s))
            let a = random_operator(&mut rng, layout.dims()[keep]);
            let lhs = (embed(&a, keep, &layout).unwrap().matrix() * rho.matrix()).trace();
            let rhs = (a.matrix() * reduced.matrix()).trace();
            assert!((lhs - rhs).norm() < 1e-10);
        }

        assert!(partial_trace(&rho, 5, &layout).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let psi = SubsystemLayout::new(vec![2]).unwrap().basis_state(&[0]);
        let rho = DensityMatrix::from_pure(&psi);
        rho.validate().unwrap();
        assert!(rho.trace_deviation() < 1e-15);
        assert!(rho.hermiticity_deviation() < 1e-15);
        assert!(rho.min_eigenvalue() > -1e-12);

        let bad = DensityMatrix::from_matrix(DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        ))
        .unwrap();
        assert!(bad.validate().is_err());
    }
}
