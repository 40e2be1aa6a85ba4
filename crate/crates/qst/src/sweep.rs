//! Parameter sweeps, regime classification and analytic transfer-time
//! predictors.
//!
//! A sweep varies one axis (J, g1, θ, or the shared decay rate ξ) over a
//! grid, runs one master-equation evolution per point, and records the
//! location and value of the first fidelity maximum. Points are independent
//! and evaluated on a rayon pool; results are ordered by grid index
//! regardless of completion order.

use rayon::prelude::*;

use crate::dynamics::{
    evolve_master, initial_density, max_fidelity, IntegratorConfig, Trajectory,
};
use crate::model::ModelParams;
use crate::{Error, Result};

/// Analytic completion instant of the small-J regime: T_w = (2k+1)·π/J.
pub fn transfer_time_small(j: f64, k: u32) -> Result<f64> {
    if !(j > 0.0) {
        return Err(Error::InvalidParameter {
            name: "j",
            reason: format!("small-regime transfer time needs J > 0, got {j}"),
        });
    }
    Ok((2.0 * f64::from(k) + 1.0) * std::f64::consts::PI / j)
}

/// Analytic completion instant of the large-J regime: T_s = (k+1/2)·π·J/g².
pub fn transfer_time_large(j: f64, g: f64, k: u32) -> Result<f64> {
    if !(j > 0.0) || !(g > 0.0) {
        return Err(Error::InvalidParameter {
            name: "j,g",
            reason: format!("large-regime transfer time needs J, g > 0, got J={j}, g={g}"),
        });
    }
    Ok((f64::from(k) + 0.5) * std::f64::consts::PI * j / (g * g))
}

/// Inter-resonator coupling that makes the 4-site single-excitation spectrum
/// equally spaced (the perfect-state-transfer condition): J = 2g/√3.
///
/// This is a design predictor for where the fidelity optimum sits; the
/// landscape itself is still mapped numerically.
pub fn pst_optimal_coupling(g: f64) -> f64 {
    2.0 * g / 3.0_f64.sqrt()
}

/// Coupling-regime label relative to the qubit/NV couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Small,
    Intermediate,
    Large,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Small => "small",
            Regime::Intermediate => "intermediate",
            Regime::Large => "large",
        };
        f.write_str(s)
    }
}

/// Classification ratio used by [`regime_label`]. Labels are descriptive
/// only; they never gate any computation.
pub const REGIME_RATIO: f64 = 1.0 / 3.0;

/// small if J < r·min(g1,g2), large if J > max(g1,g2)/r, else intermediate,
/// with r = [`REGIME_RATIO`].
pub fn regime_label(params: &ModelParams) -> Regime {
    let gmin = params.g1.min(params.g2);
    let gmax = params.g1.max(params.g2);
    if params.j < REGIME_RATIO * gmin {
        Regime::Small
    } else if params.j > gmax / REGIME_RATIO {
        Regime::Large
    } else {
        Regime::Intermediate
    }
}

/// Default evolution window for a parameter point: long enough to cover the
/// small-regime instant T_w, the large-regime instant T_s and everything in
/// between, with margin. Falls back to a fixed window when a coupling
/// vanishes.
pub fn default_time_window(params: &ModelParams) -> f64 {
    let mut window: f64 = 0.0;
    if params.j > 0.0 {
        window += std::f64::consts::PI / params.j;
        let gg = params.g1 * params.g2;
        if gg > 0.0 {
            window += std::f64::consts::PI * params.j / (2.0 * gg);
        }
    }
    (2.2 * window).max(10.0)
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Inter-resonator coupling J.
    J,
    /// Qubit-resonator coupling g1.
    G1,
    /// Initial superposition angle θ.
    Theta,
    /// Shared decay rate ξ (sets κ_a, κ_b, γ1, Γ1; the NV rates keep their
    /// base values).
    Xi,
}

impl SweepAxis {
    pub fn apply(self, base: &ModelParams, value: f64) -> ModelParams {
        let mut p = *base;
        match self {
            SweepAxis::J => p.j = value,
            SweepAxis::G1 => p.g1 = value,
            SweepAxis::Theta => p.theta = value,
            SweepAxis::Xi => {
                p.rates.kappa_a = value;
                p.rates.kappa_b = value;
                p.rates.gamma_1 = value;
                p.rates.gamma_phi_1 = value;
            }
        }
        p
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::J => "J",
            SweepAxis::G1 => "g1",
            SweepAxis::Theta => "theta",
            SweepAxis::Xi => "xi",
        }
    }
}

/// A sweep description: axis, grid, base parameters and integrator settings.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub base: ModelParams,
    pub cfg: IntegratorConfig,
    /// Replace `cfg.t_max` by [`default_time_window`] of each grid point.
    pub auto_window: bool,
    /// Retain the full trajectory of every point (off by default to bound
    /// memory).
    pub keep_trajectories: bool,
}

impl SweepSpec {
    pub fn new(axis: SweepAxis, grid: Vec<f64>, base: ModelParams, cfg: IntegratorConfig) -> Self {
        Self {
            axis,
            grid,
            base,
            cfg,
            auto_window: false,
            keep_trajectories: false,
        }
    }

    pub fn with_auto_window(mut self) -> Self {
        self.auto_window = true;
        self
    }

    pub fn with_trajectories(mut self) -> Self {
        self.keep_trajectories = true;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: "sweep grid must be nonempty".into(),
            });
        }
        if self.grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: "sweep grid must be strictly increasing".into(),
            });
        }
        self.base.validate()
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub t_star: f64,
    pub f_star: f64,
    pub regime: Regime,
    pub trajectory: Option<Trajectory>,
}

/// Ordered per-point maxima for one sweep.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Grid point with the largest F* (earliest wins ties within 1e-9).
    pub fn argmax(&self) -> &SweepPoint {
        let best = self
            .points
            .iter()
            .map(|p| p.f_star)
            .fold(f64::NEG_INFINITY, f64::max);
        self.points
            .iter()
            .find(|p| p.f_star >= best - 1e-9)
            .expect("nonempty by construction")
    }
}

/// Evaluate every grid point (in parallel) and assemble results in grid
/// order. Any failure is annotated with the offending grid index and value.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let points: Vec<SweepPoint> = spec
        .grid
        .par_iter()
        .enumerate()
        .map(|(index, &value)| {
            evaluate_point(spec, value).map_err(|e| Error::SweepPoint {
                index,
                value,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        axis: spec.axis,
        points,
    })
}

fn evaluate_point(spec: &SweepSpec, value: f64) -> Result<SweepPoint> {
    let params = spec.axis.apply(&spec.base, value);
    params.validate()?;
    let mut cfg = spec.cfg;
    if spec.auto_window {
        let t_max = default_time_window(&params);
        cfg = IntegratorConfig::new(cfg.dt, t_max)?;
    }
    let rho0 = initial_density(&params)?;
    let traj = evolve_master(&rho0, &params, &cfg)?;
    let (t_star, f_star) = max_fidelity(&traj)?;
    Ok(SweepPoint {
        value,
        t_star,
        f_star,
        regime: regime_label(&params),
        trajectory: spec.keep_trajectories.then_some(traj),
    })
}

/// Evenly spaced inclusive grid, `points ≥ 2` (or the single value `from`
/// when `points == 1`).
pub fn linspace(from: f64, to: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..points)
            .map(|k| from + (to - from) * k as f64 / (points - 1) as f64)
            .collect(),
    }
}
