//! CSV, summary and manifest writers.
//!
//! All numeric CSV fields use fixed-point 6-decimal notation and `\n`
//! newlines; identical inputs produce byte-identical files. Fidelities and
//! populations are clamped to [0, 1] before formatting so integrator noise
//! at the 1e-9 level cannot leak negative zeros or 1.000001 into the data.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::dynamics::Trajectory;
use crate::hilbert::C64;
use crate::model::ModelParams;
use crate::sweep::{Regime, SweepResult};

pub fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

pub fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// `t,t_over_2pi,P1,P2,P3,P4,F,trace_dev`
pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> std::io::Result<()> {
    let mut out = String::from("t,t_over_2pi,P1,P2,P3,P4,F,trace_dev\n");
    for (k, &t) in traj.times.iter().enumerate() {
        let p = traj.populations[k];
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt6(t),
            fmt6(t / TWO_PI),
            fmt6(clamp01(p[0])),
            fmt6(clamp01(p[1])),
            fmt6(clamp01(p[2])),
            fmt6(clamp01(p[3])),
            fmt6(clamp01(traj.fidelity[k])),
            fmt6(traj.trace_dev[k]),
        ));
    }
    fs::write(path, out)
}

/// `t,t_over_2pi,p1,p2,p3,p4` site populations of the closed chain
/// (qubit, resonator a, resonator b, NV).
pub fn write_oracle_csv(path: &Path, times: &[f64], amps: &[[C64; 4]]) -> std::io::Result<()> {
    let mut out = String::from("t,t_over_2pi,p1,p2,p3,p4\n");
    for (t, a) in times.iter().zip(amps) {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt6(*t),
            fmt6(*t / TWO_PI),
            fmt6(clamp01(a[0].norm_sqr())),
            fmt6(clamp01(a[1].norm_sqr())),
            fmt6(clamp01(a[2].norm_sqr())),
            fmt6(clamp01(a[3].norm_sqr())),
        ));
    }
    fs::write(path, out)
}

/// `axis_value,t_star,F_star,regime`
pub fn write_sweep_csv(path: &Path, result: &SweepResult) -> std::io::Result<()> {
    let mut out = String::from("axis_value,t_star,F_star,regime\n");
    for p in &result.points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt6(p.value),
            fmt6(p.t_star),
            fmt6(clamp01(p.f_star)),
            p.regime,
        ));
    }
    fs::write(path, out)
}

/// Resolved parameters and run diagnostics for one evolution.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub params: ModelParams,
    pub dt: f64,
    pub t_max: f64,
    pub record_every: usize,
    pub t_star: f64,
    pub f_star: f64,
    pub regime: Regime,
    pub runtime_ms: u128,
    pub max_trace_dev: f64,
    pub min_eigenvalue: f64,
}

/// Key-value summary. Parameter keys echo the config-file vocabulary at
/// full precision, so the parameter subset of a summary re-parses as a
/// config describing the same run. `runtime_ms` is the single
/// non-reproducible field.
pub fn write_summary(path: &Path, s: &RunSummary) -> std::io::Result<()> {
    let p = &s.params;
    let r = &p.rates;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    kv("g1", format!("{}", p.g1));
    kv("g2", format!("{}", p.g2));
    kv("j", format!("{}", p.j));
    kv("theta", format!("{}", p.theta));
    kv("kappa_a", format!("{}", r.kappa_a));
    kv("kappa_b", format!("{}", r.kappa_b));
    kv("gamma_1", format!("{}", r.gamma_1));
    kv("gamma_phi_1", format!("{}", r.gamma_phi_1));
    kv("gamma_2", format!("{}", r.gamma_2));
    kv("gamma_phi_2", format!("{}", r.gamma_phi_2));
    kv("fock_dim", format!("{}", p.fock_dim));
    kv("dt", format!("{}", s.dt));
    kv("t_max", format!("{}", s.t_max));
    kv("record_every", format!("{}", s.record_every));
    kv("t_star", format!("{}", s.t_star));
    kv("f_star", format!("{}", s.f_star));
    kv("regime", format!("{}", s.regime));
    kv("max_trace_dev", format!("{:e}", s.max_trace_dev));
    kv("min_eigenvalue", format!("{:e}", s.min_eigenvalue));
    kv("runtime_ms", format!("{}", s.runtime_ms));
    fs::write(path, out)
}

/// Flat deterministic manifest for multi-file outputs.
#[derive(Debug, Default)]
pub struct Manifest {
    lines: Vec<(String, String)>,
    files: usize,
}

impl Manifest {
    pub fn new(figure: &str) -> Self {
        let mut m = Self::default();
        m.push("figure", figure);
        m
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    /// Register an output file and return its manifest prefix (`file_N`).
    pub fn add_file(&mut self, name: &str, columns: &str) -> String {
        self.files += 1;
        let prefix = format!("file_{}", self.files);
        self.push(&prefix, name);
        self.push(&format!("{prefix}.columns"), columns);
        prefix
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut f = fs::File::create(path)?;
        writeln!(f, "files = {}", self.files)?;
        for (k, v) in &self.lines {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}
