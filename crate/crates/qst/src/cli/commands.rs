//! Command implementations behind the `qst` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::cli::config::{parse_config, ConfigError, ResolvedRun};
use crate::cli::output::{
    clamp01, fmt6, write_oracle_csv, write_summary, write_sweep_csv, write_trajectory_csv,
    Manifest, RunSummary,
};
use crate::dynamics::{
    evolve_closed_chain, evolve_master, initial_density, max_fidelity, IntegratorConfig,
    Trajectory,
};
use crate::hilbert::C64;
use crate::model::{DecoherenceRates, ModelParams};
use crate::sweep::{linspace, regime_label, run_sweep, SweepAxis, SweepSpec};
use crate::Error;

/// CLI failure with its process exit code: 2 for configuration problems,
/// 3 for numerical failures, 1 for I/O.
#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Numerical(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    fn config_msg(message: impl Into<String>) -> Self {
        CliError::Config(ConfigError {
            line: None,
            message: message.into(),
        })
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numerical(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn load_config(path: &Path) -> Result<ResolvedRun, CliError> {
    let text = fs::read_to_string(path)?;
    Ok(parse_config(&text)?.resolve()?)
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    Ok(())
}

struct EvolveOutput {
    trajectory: Trajectory,
    summary: RunSummary,
}

fn run_evolution(resolved: &ResolvedRun) -> Result<EvolveOutput, CliError> {
    let cfg = resolved.integrator()?;
    let params = resolved.params;
    let started = Instant::now();
    let rho0 = initial_density(&params)?;
    let trajectory = evolve_master(&rho0, &params, &cfg)?;
    let runtime_ms = started.elapsed().as_millis();
    let (t_star, f_star) = max_fidelity(&trajectory)?;
    let summary = RunSummary {
        params,
        dt: cfg.dt,
        t_max: cfg.t_max,
        record_every: cfg.record_every,
        t_star,
        f_star,
        regime: regime_label(&params),
        runtime_ms,
        max_trace_dev: trajectory.max_trace_dev(),
        min_eigenvalue: trajectory.min_min_eig(),
    };
    Ok(EvolveOutput {
        trajectory,
        summary,
    })
}

/// `qst evolve`: one master-equation run; writes the trajectory CSV and a
/// key-value summary.
pub fn cmd_evolve(config: &Path, out_dir: &Path) -> Result<(), CliError> {
    let resolved = load_config(config)?;
    ensure_dir(out_dir)?;
    let result = run_evolution(&resolved)?;

    let csv_name = resolved
        .output_path
        .clone()
        .unwrap_or_else(|| "trajectory.csv".to_string());
    let csv_path = out_dir.join(&csv_name);
    write_trajectory_csv(&csv_path, &result.trajectory)?;
    let summary_path = out_dir.join("summary.txt");
    write_summary(&summary_path, &result.summary)?;

    println!(
        "evolve: F* = {} at t* = {} ({}); wrote {} and {}",
        fmt6(clamp01(result.summary.f_star)),
        fmt6(result.summary.t_star),
        result.summary.regime,
        csv_path.display(),
        summary_path.display(),
    );
    Ok(())
}

fn parse_axis(axis: &str) -> Result<SweepAxis, CliError> {
    match axis {
        "J" => Ok(SweepAxis::J),
        "g1" => Ok(SweepAxis::G1),
        "theta" => Ok(SweepAxis::Theta),
        "xi" => Ok(SweepAxis::Xi),
        other => Err(CliError::config_msg(format!(
            "unknown sweep axis `{other}` (expected J, g1, theta or xi)"
        ))),
    }
}

/// `qst sweep`: per-point maxima along one axis; writes `sweep.csv`.
pub fn cmd_sweep(
    config: &Path,
    axis: &str,
    from: f64,
    to: f64,
    points: usize,
    out_dir: &Path,
) -> Result<(), CliError> {
    let axis = parse_axis(axis)?;
    let resolved = load_config(config)?;
    if points == 0 {
        return Err(CliError::config_msg("sweep grid is empty (points = 0)"));
    }
    if points > 1 && !(from < to) {
        return Err(CliError::config_msg(format!(
            "sweep bounds must satisfy from < to, got {from} .. {to}"
        )));
    }
    let grid = linspace(from, to, points);

    let cfg = resolved.integrator()?;
    let mut spec = SweepSpec::new(axis, grid, resolved.params, cfg);
    if resolved.t_max.is_none() {
        spec = spec.with_auto_window();
    }
    let result = run_sweep(&spec)?;

    ensure_dir(out_dir)?;
    let csv_path = out_dir.join("sweep.csv");
    write_sweep_csv(&csv_path, &result)?;

    let best = result.argmax();
    println!(
        "sweep {}: best F* = {} at {} = {} (t* = {}); wrote {}",
        axis.name(),
        fmt6(clamp01(best.f_star)),
        axis.name(),
        fmt6(best.value),
        fmt6(best.t_star),
        csv_path.display(),
    );
    Ok(())
}

/// `qst oracle`: closed-chain populations from the eigendecomposition
/// oracle; writes `oracle.csv`.
pub fn cmd_oracle(
    g1: f64,
    j: f64,
    g2: f64,
    t_max: f64,
    points: usize,
    out_dir: &Path,
) -> Result<(), CliError> {
    if !(g1 >= 0.0) || !(j >= 0.0) || !(g2 >= 0.0) {
        return Err(CliError::config_msg(
            "oracle couplings must be non-negative".to_string(),
        ));
    }
    if !(t_max > 0.0) {
        return Err(CliError::config_msg(format!(
            "tmax must be positive, got {t_max}"
        )));
    }
    if points < 2 {
        return Err(CliError::config_msg("oracle needs at least 2 samples".to_string()));
    }
    let times = linspace(0.0, t_max, points);
    let amps0 = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    ];
    let amps = evolve_closed_chain(g1, j, g2, &amps0, &times);

    ensure_dir(out_dir)?;
    let csv_path = out_dir.join("oracle.csv");
    write_oracle_csv(&csv_path, &times, &amps)?;
    println!("oracle: wrote {}", csv_path.display());
    Ok(())
}

/// Figure-reproduction presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig1,
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::Fig1,
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig3c,
        FigureId::Fig3d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig3c => "fig3c",
            FigureId::Fig3d => "fig3d",
        }
    }

    pub fn parse(s: &str) -> Option<FigureId> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

const XI_CURVES: [f64; 3] = [0.03, 0.01, 0.003];
const G1_CURVES: [f64; 3] = [0.8, 1.0, 1.2];
const ZETA: f64 = 0.001;
const XI: f64 = 0.03;
const SWEEP_POINTS: usize = 60;

fn preset_params(g1: f64, j: f64, xi: f64) -> ModelParams {
    ModelParams::new(
        g1,
        1.0,
        j,
        std::f64::consts::FRAC_PI_4,
        DecoherenceRates::uniform_xi_zeta(xi, ZETA),
        2,
    )
    .expect("preset parameters are valid")
}

fn preset_resolved(params: ModelParams) -> ResolvedRun {
    ResolvedRun {
        params,
        dt: IntegratorConfig::DEFAULT_DT,
        t_max: None,
        record_every: None,
        output_path: None,
    }
}

fn manifest_params(manifest: &mut Manifest, prefix: &str, params: &ModelParams, dt: f64) {
    manifest.push(&format!("{prefix}.g1"), params.g1);
    manifest.push(&format!("{prefix}.g2"), params.g2);
    manifest.push(&format!("{prefix}.j"), params.j);
    manifest.push(&format!("{prefix}.theta"), params.theta);
    manifest.push(&format!("{prefix}.xi"), params.rates.kappa_a);
    manifest.push(&format!("{prefix}.zeta"), params.rates.gamma_2);
    manifest.push(&format!("{prefix}.fock_dim"), params.fock_dim);
    manifest.push(&format!("{prefix}.dt"), dt);
}

/// `qst reproduce`: emit the data files needed to re-plot one of the
/// built-in figures, plus a manifest of the parameters behind each file.
pub fn cmd_reproduce(figure: FigureId, out_dir: &Path) -> Result<(), CliError> {
    ensure_dir(out_dir)?;
    let mut manifest = Manifest::new(figure.name());

    match figure {
        // fidelity vs time in the small (J = 0.1) and large (J = 10)
        // regimes, one curve per decay rate
        FigureId::Fig1 | FigureId::Fig2a => {
            let j = if figure == FigureId::Fig1 { 0.1 } else { 10.0 };
            for xi in XI_CURVES {
                let params = preset_params(1.0, j, xi);
                let resolved = preset_resolved(params);
                let result = run_evolution(&resolved)?;
                let name = format!("{}_xi_{}.csv", figure.name(), fmt6(xi));
                write_trajectory_csv(&out_dir.join(&name), &result.trajectory)?;
                let prefix = manifest.add_file(&name, "t,t_over_2pi,P1,P2,P3,P4,F,trace_dev");
                manifest_params(&mut manifest, &prefix, &params, resolved.dt);
                manifest.push(&format!("{prefix}.t_star"), fmt6(result.summary.t_star));
                manifest.push(&format!("{prefix}.f_star"), fmt6(result.summary.f_star));
            }
        }
        // large regime with asymmetric qubit coupling, one curve per g1
        FigureId::Fig2b => {
            for g1 in G1_CURVES {
                let params = preset_params(g1, 10.0, XI);
                let resolved = preset_resolved(params);
                let result = run_evolution(&resolved)?;
                let name = format!("fig2b_g1_{}.csv", fmt6(g1));
                write_trajectory_csv(&out_dir.join(&name), &result.trajectory)?;
                let prefix = manifest.add_file(&name, "t,t_over_2pi,P1,P2,P3,P4,F,trace_dev");
                manifest_params(&mut manifest, &prefix, &params, resolved.dt);
                manifest.push(&format!("{prefix}.t_star"), fmt6(result.summary.t_star));
                manifest.push(&format!("{prefix}.f_star"), fmt6(result.summary.f_star));
            }
        }
        // fidelity landscape over J (heat map) plus the per-J maxima
        FigureId::Fig3a => {
            let base = preset_params(1.0, 1.2, XI);
            let cfg = IntegratorConfig::new(IntegratorConfig::DEFAULT_DT, 10.0)
                .map_err(Error::from)?;
            let spec = SweepSpec::new(SweepAxis::J, linspace(0.01, 3.0, SWEEP_POINTS), base, cfg)
                .with_auto_window()
                .with_trajectories();
            let result = run_sweep(&spec)?;

            let heat = "fig3a_heatmap.csv";
            let mut out = String::from("J,t,t_over_2pi,F\n");
            for p in &result.points {
                let traj = p.trajectory.as_ref().expect("trajectories retained");
                for (k, &t) in traj.times.iter().enumerate() {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        fmt6(p.value),
                        fmt6(t),
                        fmt6(t / std::f64::consts::TAU),
                        fmt6(clamp01(traj.fidelity[k])),
                    ));
                }
            }
            fs::write(out_dir.join(heat), out)?;
            let prefix = manifest.add_file(heat, "J,t,t_over_2pi,F");
            manifest_params(&mut manifest, &prefix, &base, cfg.dt);

            let maxima = "fig3a_maxima.csv";
            write_sweep_csv(&out_dir.join(maxima), &result)?;
            manifest.add_file(maxima, "axis_value,t_star,F_star,regime");
        }
        // populations at the optimum-neighborhood point J = 1.2
        FigureId::Fig3b => {
            let params = preset_params(1.0, 1.2, XI);
            let resolved = preset_resolved(params);
            let result = run_evolution(&resolved)?;
            let name = "fig3b_populations.csv";
            write_trajectory_csv(&out_dir.join(name), &result.trajectory)?;
            let prefix = manifest.add_file(name, "t,t_over_2pi,P1,P2,P3,P4,F,trace_dev");
            manifest_params(&mut manifest, &prefix, &params, resolved.dt);
        }
        // target-population landscape over g1 plus per-g1 maxima
        FigureId::Fig3c => {
            let base = preset_params(1.0, 1.2, XI);
            let cfg = IntegratorConfig::new(IntegratorConfig::DEFAULT_DT, 10.0)
                .map_err(Error::from)?;
            let spec = SweepSpec::new(SweepAxis::G1, linspace(0.01, 3.0, SWEEP_POINTS), base, cfg)
                .with_auto_window()
                .with_trajectories();
            let result = run_sweep(&spec)?;

            let heat = "fig3c_heatmap.csv";
            let mut out = String::from("g1,t,t_over_2pi,P4\n");
            for p in &result.points {
                let traj = p.trajectory.as_ref().expect("trajectories retained");
                for (k, &t) in traj.times.iter().enumerate() {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        fmt6(p.value),
                        fmt6(t),
                        fmt6(t / std::f64::consts::TAU),
                        fmt6(clamp01(traj.populations[k][3])),
                    ));
                }
            }
            fs::write(out_dir.join(heat), out)?;
            let prefix = manifest.add_file(heat, "g1,t,t_over_2pi,P4");
            manifest_params(&mut manifest, &prefix, &base, cfg.dt);

            let maxima = "fig3c_maxima.csv";
            write_sweep_csv(&out_dir.join(maxima), &result)?;
            manifest.add_file(maxima, "axis_value,t_star,F_star,regime");
        }
        // maximum fidelity vs initial angle at the optimum J = 1.16
        FigureId::Fig3d => {
            let base = preset_params(1.0, 1.16, XI);
            let cfg = IntegratorConfig::new(IntegratorConfig::DEFAULT_DT, 10.0)
                .map_err(Error::from)?;
            let grid = linspace(0.0, std::f64::consts::FRAC_PI_2, 25);
            let spec = SweepSpec::new(SweepAxis::Theta, grid, base, cfg);
            let result = run_sweep(&spec)?;
            let name = "fig3d_maxima.csv";
            write_sweep_csv(&out_dir.join(name), &result)?;
            let prefix = manifest.add_file(name, "axis_value,t_star,F_star,regime");
            manifest_params(&mut manifest, &prefix, &base, cfg.dt);
        }
    }

    let manifest_path = out_dir.join("manifest.txt");
    manifest.write(&manifest_path)?;
    println!(
        "reproduce {}: wrote {}",
        figure.name(),
        manifest_path.display()
    );
    Ok(())
}

/// Absolute output directory helper shared by the subcommands.
pub fn out_dir_or_default(out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| PathBuf::from("."))
}
