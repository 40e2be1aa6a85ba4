//! Master-equation integration and observable extraction.
//!
//! The Lindblad equation is integrated in the form
//!
//! ```text
//! dρ/dt = −i[H, ρ] + Σ_k (r_k/2) (2 A_k ρ A_k† − A_k†A_k ρ − ρ A_k†A_k)
//! ```
//!
//! with a fixed-step classical RK4 on the full density matrix. At the scales
//! this crate targets (16×16 at the default truncation) a superoperator
//! build is unnecessary; the right-hand side is evaluated as
//! `−(Kρ + ρK†) + Σ r_k A_k ρ A_k†` with `K = iH + ½ Σ r_k A_k†A_k`
//! precomputed once per run.
//!
//! Trace, Hermiticity and positivity are monitored, never enforced: the
//! equation is already trace-preserving and completely positive, so drift in
//! those diagnostics measures integrator error rather than physics.
//!
//! A closed-system oracle, [`evolve_closed_chain`], evolves the equivalent
//! 4-site single-excitation chain by exact eigendecomposition (no time
//! stepping) for cross-checks and convergence tests.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::hilbert::{partial_trace, DensityMatrix, Operator, SubsystemLayout, C64};
use crate::model::{
    chain_hamiltonian_4, collapse_operators, hamiltonian_total, initial_state, phi_basis_indices,
    ModelParams,
};
use crate::{Error, Result};

/// Integration method. Fixed-step classical RK4 is the only method in v1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Rk4,
}

/// Fixed-step integrator settings (times in units of 1/g2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_max: f64,
    pub method: Method,
    /// Output sampling stride: observables are recorded every this many
    /// steps (the initial and final states are always recorded).
    pub record_every: usize,
}

impl IntegratorConfig {
    pub const DEFAULT_DT: f64 = 2e-3;
    /// Output grids target roughly this many recorded samples.
    pub const TARGET_SAMPLES: usize = 2000;

    pub fn new(dt: f64, t_max: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be positive and finite, got {dt}"),
            });
        }
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::InvalidParameter {
                name: "t_max",
                reason: format!("must be positive and finite, got {t_max}"),
            });
        }
        let steps = (t_max / dt).ceil() as usize;
        let record_every = (steps / Self::TARGET_SAMPLES).max(1);
        Ok(Self {
            dt,
            t_max,
            method: Method::Rk4,
            record_every,
        })
    }

    pub fn with_record_every(mut self, record_every: usize) -> Result<Self> {
        if record_every == 0 {
            return Err(Error::InvalidParameter {
                name: "record_every",
                reason: "must be positive".into(),
            });
        }
        self.record_every = record_every;
        Ok(self)
    }

    pub fn steps(&self) -> usize {
        ((self.t_max / self.dt).ceil() as usize).max(1)
    }
}

/// Projectors onto the single-excitation basis states |φ1⟩..|φ4⟩ plus the
/// conditional-fidelity functional for a given θ.
pub struct ObservableSet {
    layout: SubsystemLayout,
    theta: f64,
    phi_indices: [usize; 4],
}

impl ObservableSet {
    pub fn new(theta: f64, layout: SubsystemLayout) -> Self {
        let phi_indices = phi_basis_indices(&layout);
        Self {
            layout,
            theta,
            phi_indices,
        }
    }

    /// The four projectors |φn⟩⟨φn| on the full space.
    pub fn projectors(&self) -> [Operator; 4] {
        self.phi_indices.map(|idx| {
            let mut m = DMatrix::<C64>::zeros(self.layout.total_dim(), self.layout.total_dim());
            m[(idx, idx)] = C64::new(1.0, 0.0);
            Operator::from_matrix(m).expect("square by construction")
        })
    }

    fn populations_of(&self, rho: &DMatrix<C64>) -> [f64; 4] {
        self.phi_indices.map(|idx| rho[(idx, idx)].re)
    }
}

/// One recorded trajectory: time grid plus per-time populations P1..P4,
/// conditional fidelity F, trace deviation |tr ρ − 1| and the smallest
/// eigenvalue of ρ.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub populations: Vec<[f64; 4]>,
    pub fidelity: Vec<f64>,
    pub trace_dev: Vec<f64>,
    pub min_eig: Vec<f64>,
    /// max |ρ − ρ†| per recorded sample (integrator health diagnostic).
    pub herm_dev: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_trace_dev(&self) -> f64 {
        self.trace_dev.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_min_eig(&self) -> f64 {
        self.min_eig.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_herm_dev(&self) -> f64 {
        self.herm_dev.iter().cloned().fold(0.0, f64::max)
    }
}

/// Right-hand side of the master equation for one state.
///
/// The output is traceless, and Hermitian whenever `rho` is Hermitian; with
/// `H = 0` and all rates zero it is identically zero.
pub fn lindblad_rhs(
    rho: &DensityMatrix,
    h: &Operator,
    c_ops: &[(f64, Operator)],
) -> Result<DMatrix<C64>> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            context: "lindblad_rhs hamiltonian",
            got: h.dim(),
            expected: rho.dim(),
        });
    }
    for (_, op) in c_ops {
        if op.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                context: "lindblad_rhs collapse operator",
                got: op.dim(),
                expected: rho.dim(),
            });
        }
    }
    let mut engine = LindbladEngine::new(h, c_ops);
    let mut out = DMatrix::zeros(rho.dim(), rho.dim());
    engine.rhs_into(rho.matrix(), &mut out);
    Ok(out)
}

/// Sparse coordinate form of an operator. The chain Hamiltonian and every
/// collapse operator touch only a handful of the composite-space entries,
/// so the integrator's inner loop works on nonzeros instead of dense gemms.
struct SparseMat {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseMat {
    fn from_dense(m: &DMatrix<C64>) -> Self {
        let dim = m.nrows();
        let mut entries = Vec::new();
        for c in 0..dim {
            for r in 0..dim {
                let v = m[(r, c)];
                if v != C64::new(0.0, 0.0) {
                    entries.push((r, c, v));
                }
            }
        }
        Self { dim, entries }
    }

    fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect(),
        }
    }

    /// out += α · self · ρ (column-major slices; column j of ρ feeds column
    /// j of out through each nonzero (r, c): out[r, j] += α v ρ[c, j]).
    fn mul_left_into(&self, alpha: C64, rho: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let n = self.dim;
        let src = rho.as_slice();
        let dst = out.as_mut_slice();
        for &(r, c, v) in &self.entries {
            let av = alpha * v;
            for j in 0..n {
                dst[j * n + r] += av * src[j * n + c];
            }
        }
    }

    /// out += α · ρ · self (nonzero (r, c) sends column r of ρ into column
    /// c of out).
    fn mul_right_into(&self, alpha: C64, rho: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let n = self.dim;
        let src = rho.as_slice();
        let dst = out.as_mut_slice();
        for &(r, c, v) in &self.entries {
            let av = alpha * v;
            let (src_col, dst_col) = (r * n, c * n);
            for i in 0..n {
                dst[dst_col + i] += av * src[src_col + i];
            }
        }
    }
}

struct LindbladEngine {
    /// K = iH + ½ Σ r A†A
    k_op: SparseMat,
    k_adj: SparseMat,
    /// Channels with nonzero rate, as (rate, A, A†).
    channels: Vec<(f64, SparseMat, SparseMat)>,
    scratch: DMatrix<C64>,
}

impl LindbladEngine {
    fn new(h: &Operator, c_ops: &[(f64, Operator)]) -> Self {
        let n = h.dim();
        let i = C64::new(0.0, 1.0);
        let mut k_dense = h.matrix() * i;
        let mut channels = Vec::new();
        for (rate, op) in c_ops {
            if *rate == 0.0 {
                continue;
            }
            let a = op.matrix();
            k_dense += a.adjoint() * a * C64::new(rate / 2.0, 0.0);
            let sparse = SparseMat::from_dense(a);
            let sparse_adj = sparse.adjoint();
            channels.push((*rate, sparse, sparse_adj));
        }
        let k_op = SparseMat::from_dense(&k_dense);
        let k_adj = k_op.adjoint();
        Self {
            k_op,
            k_adj,
            channels,
            scratch: DMatrix::zeros(n, n),
        }
    }

    /// out = −(Kρ + ρK†) + Σ r AρA†
    fn rhs_into(&mut self, rho: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let one = C64::new(1.0, 0.0);
        let m_one = C64::new(-1.0, 0.0);
        out.fill(C64::new(0.0, 0.0));
        self.k_op.mul_left_into(m_one, rho, out);
        self.k_adj.mul_right_into(m_one, rho, out);
        for (rate, a, a_adj) in &self.channels {
            self.scratch.fill(C64::new(0.0, 0.0));
            a.mul_left_into(one, rho, &mut self.scratch);
            a_adj.mul_right_into(C64::new(*rate, 0.0), &self.scratch, out);
        }
    }
}

fn axpy_mat(y: &mut DMatrix<C64>, a: f64, x: &DMatrix<C64>) {
    let a = C64::new(a, 0.0);
    y.zip_apply(x, |yi, xi| *yi += xi * a);
}

/// Integrate the master equation for `params` from `rho0`, recording
/// populations, fidelity and diagnostics on the configured stride.
pub fn evolve_master(
    rho0: &DensityMatrix,
    params: &ModelParams,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    params.validate()?;
    let layout = params.layout();
    if rho0.dim() != layout.total_dim() {
        return Err(Error::DimensionMismatch {
            context: "evolve_master initial state",
            got: rho0.dim(),
            expected: layout.total_dim(),
        });
    }
    rho0.validate()
        .map_err(|e| Error::InvalidDensityMatrix(format!("initial state: {e}")))?;

    let h = hamiltonian_total(params, &layout)?;
    let c_ops = collapse_operators(&params.rates, &layout)?;
    let obs = ObservableSet::new(params.theta, layout.clone());

    let h_norm = h
        .matrix()
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max);
    let stiffness = cfg.dt * h_norm.max(params.rates.max_rate());
    if stiffness > 0.05 {
        eprintln!(
            "warning: dt * max(|H|, rates) = {stiffness:.3} exceeds 0.05; \
             consider a smaller time step"
        );
    }

    let mut engine = LindbladEngine::new(&h, &c_ops);
    let n = rho0.dim();
    let mut rho = rho0.matrix().clone();
    let mut k1 = DMatrix::zeros(n, n);
    let mut k2 = DMatrix::zeros(n, n);
    let mut k3 = DMatrix::zeros(n, n);
    let mut k4 = DMatrix::zeros(n, n);
    let mut stage = DMatrix::zeros(n, n);

    let steps = cfg.steps();
    let dt = cfg.dt;
    let mut traj = Trajectory::default();
    record(&mut traj, 0.0, &rho, &obs, &layout)?;

    for step in 1..=steps {
        engine.rhs_into(&rho, &mut k1);

        stage.copy_from(&rho);
        axpy_mat(&mut stage, dt / 2.0, &k1);
        engine.rhs_into(&stage, &mut k2);

        stage.copy_from(&rho);
        axpy_mat(&mut stage, dt / 2.0, &k2);
        engine.rhs_into(&stage, &mut k3);

        stage.copy_from(&rho);
        axpy_mat(&mut stage, dt, &k3);
        engine.rhs_into(&stage, &mut k4);

        axpy_mat(&mut rho, dt / 6.0, &k1);
        axpy_mat(&mut rho, dt / 3.0, &k2);
        axpy_mat(&mut rho, dt / 3.0, &k3);
        axpy_mat(&mut rho, dt / 6.0, &k4);

        let t = step as f64 * dt;
        if !rho.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::IntegrationDiverged { step, t });
        }
        if step % cfg.record_every == 0 || step == steps {
            record(&mut traj, t, &rho, &obs, &layout)?;
        }
    }
    Ok(traj)
}

fn record(
    traj: &mut Trajectory,
    t: f64,
    rho: &DMatrix<C64>,
    obs: &ObservableSet,
    layout: &SubsystemLayout,
) -> Result<()> {
    let dm = DensityMatrix::from_matrix(rho.clone()).expect("square");
    traj.times.push(t);
    traj.populations.push(obs.populations_of(rho));
    traj.fidelity.push(fidelity(&dm, obs.theta, layout)?);
    traj.trace_dev.push(dm.trace_deviation());
    traj.min_eig.push(dm.min_eigenvalue());
    traj.herm_dev.push(dm.hermiticity_deviation());
    Ok(())
}

/// Convenience: the pure initial density matrix for `params`.
pub fn initial_density(params: &ModelParams) -> Result<DensityMatrix> {
    let layout = params.layout();
    Ok(DensityMatrix::from_pure(&initial_state(
        params.theta,
        &layout,
    )?))
}

/// Exact closed-system evolution of the 4-site single-excitation chain via
/// eigendecomposition of [`chain_hamiltonian_4`]: amplitudes(t) = e^{−iH₄t}·amps0.
///
/// Site ordering is (qubit, resonator a, resonator b, NV), matching the
/// chain Hamiltonian. Norm is conserved exactly (up to roundoff); there is
/// no time stepping.
pub fn evolve_closed_chain(
    g1: f64,
    j: f64,
    g2: f64,
    amps0: &[C64; 4],
    times: &[f64],
) -> Vec<[C64; 4]> {
    let h4 = chain_hamiltonian_4(g1, j, g2);
    // the chain is real symmetric; diagonalize in real arithmetic
    let real = DMatrix::<f64>::from_fn(4, 4, |r, c| h4.matrix()[(r, c)].re);
    let eig = real.symmetric_eigen();
    let (w, v) = (eig.eigenvalues, eig.eigenvectors);

    // modal coefficients c = Vᵀ amps0
    let mut coeff = [C64::new(0.0, 0.0); 4];
    for (k, ck) in coeff.iter_mut().enumerate() {
        for s in 0..4 {
            *ck += C64::new(v[(s, k)], 0.0) * amps0[s];
        }
    }

    times
        .iter()
        .map(|&t| {
            let mut amps = [C64::new(0.0, 0.0); 4];
            for k in 0..4 {
                let phase = Complex64::from_polar(1.0, -w[k] * t) * coeff[k];
                for (s, amp) in amps.iter_mut().enumerate() {
                    *amp += C64::new(v[(s, k)], 0.0) * phase;
                }
            }
            amps
        })
        .collect()
}

/// Conditional transfer fidelity of the NV reduced state against the target
/// cosθ|d⟩ + sinθ|m⟩, evaluated up to the deterministic transfer phase:
///
/// ```text
/// F = cos²θ ρ_dd + sin²θ ρ_mm + 2 sinθ cosθ |ρ_dm|
/// ```
///
/// The resonant chain hands the excitation to the NV with a fixed, known
/// π/2 phase on the |d⟩ amplitude (a local Z rotation at readout); taking
/// |ρ_dm| scores the overlap after that rotation. Cauchy–Schwarz on the
/// reduced state keeps F within [0, 1].
pub fn fidelity(rho: &DensityMatrix, theta: f64, layout: &SubsystemLayout) -> Result<f64> {
    let nv = partial_trace(rho, SubsystemLayout::NV, layout)?;
    let m = nv.matrix();
    // index 0 = |m⟩, index 1 = |d⟩
    let rho_mm = m[(0, 0)].re;
    let rho_dd = m[(1, 1)].re;
    let rho_dm = m[(1, 0)];
    let (s, c) = theta.sin_cos();
    Ok(c * c * rho_dd + s * s * rho_mm + 2.0 * s * c * rho_dm.norm())
}

/// Populations of the four single-excitation basis states.
pub fn populations(rho: &DensityMatrix, layout: &SubsystemLayout) -> Result<[f64; 4]> {
    if rho.dim() != layout.total_dim() {
        return Err(Error::DimensionMismatch {
            context: "populations",
            got: rho.dim(),
            expected: layout.total_dim(),
        });
    }
    let phi = phi_basis_indices(layout);
    Ok(phi.map(|idx| rho.matrix()[(idx, idx)].re))
}

/// First global maximum of the fidelity: the earliest sample within 1e-9 of
/// the grid maximum, refined by a quadratic fit through the three samples
/// around it. Returns (t*, F*).
pub fn max_fidelity(traj: &Trajectory) -> Result<(f64, f64)> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let fmax = traj.fidelity.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let k = traj
        .fidelity
        .iter()
        .position(|&f| f >= fmax - 1e-9)
        .expect("max exists");

    if k == 0 || k + 1 >= traj.len() {
        return Ok((traj.times[k], traj.fidelity[k]));
    }
    // parabola through (t0,f0), (t1,f1), (t2,f2); vertex if concave
    let (t0, t1, t2) = (traj.times[k - 1], traj.times[k], traj.times[k + 1]);
    let (f0, f1, f2) = (
        traj.fidelity[k - 1],
        traj.fidelity[k],
        traj.fidelity[k + 1],
    );
    let d01 = (f1 - f0) / (t1 - t0);
    let d12 = (f2 - f1) / (t2 - t1);
    let curv = (d12 - d01) / (t2 - t0);
    if curv >= 0.0 {
        return Ok((t1, f1));
    }
    let t_star = (0.5 * (t0 + t1) - d01 / (2.0 * curv)).clamp(t0, t2);
    // evaluate the same parabola (Newton form) at the vertex
    let f_star = f0 + d01 * (t_star - t0) + curv * (t_star - t0) * (t_star - t1);
    Ok((t_star, f_star.max(f1)))
}
