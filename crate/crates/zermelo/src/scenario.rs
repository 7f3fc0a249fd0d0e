//! Declarative scenario runner: a JSON config names a preset (or a custom
//! problem), the runner solves it, propagates the trajectory, checks the
//! invariant suite, and emits plot-ready CSV plus a JSON report.
//!
//! All core quantities are in natural units (`hbar = 1`); presets that
//! declare physical units additionally report the control time in seconds.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    adiabaticity_report, finsler_delta_t, propagate_analytic, TimeGrid, TrajectorySample,
    XOperator,
};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, HermitianOperator, StateVector};
use crate::models::{
    bell_swap_problem, cu_acetate_preset, oscillator_problem, quantized_k, DimerParams,
    QuantizationTable,
};
use crate::protocol::{solve, SolverSettings, ZermeloProblem, ZermeloSolution};
use num_complex::Complex64 as C64;

/// Resource bound: either a number or the quantized rule `"quantized(n)"`,
/// which requires a preset that defines a target energy.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ResourceSpec {
    Value(f64),
    Rule(String),
}

impl ResourceSpec {
    fn quantized_level(&self) -> Result<Option<u32>> {
        match self {
            ResourceSpec::Value(_) => Ok(None),
            ResourceSpec::Rule(s) => {
                let inner = s
                    .strip_prefix("quantized(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| {
                        Error::InvalidConfig(format!(
                            "k must be a number or \"quantized(n)\", got \"{s}\""
                        ))
                    })?;
                let n: u32 = inner.trim().parse().map_err(|_| {
                    Error::InvalidConfig(format!(
                        "quantized level must be a non-negative integer, got \"{inner}\""
                    ))
                })?;
                Ok(Some(n))
            }
        }
    }
}

/// Custom problem block: row-major complex matrix and complex vectors, each
/// complex number written as a `[re, im]` pair.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct CustomProblem {
    pub h0: Vec<Vec<[f64; 2]>>,
    pub psi_i: Vec<[f64; 2]>,
    pub psi_f: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_steps: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n_steps: 1000 }
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub bracket_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputKind {
    Trajectory,
    Invariants,
    QuantizationTable,
    Adiabaticity,
    FinslerCheck,
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Trajectory, OutputKind::Invariants]
}

/// The scenario document. Exactly one problem source: a named preset, or
/// `"preset": "custom"` together with the `custom` block.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub preset: String,
    /// Oscillator frequency; only meaningful for the oscillator preset.
    #[serde(default)]
    pub omega: Option<f64>,
    /// Dimer couplings `[j_x, j_y, j_z]`; bell-swap and spin-flip presets.
    #[serde(default)]
    pub couplings: Option<[f64; 3]>,
    #[serde(default)]
    pub k: Option<ResourceSpec>,
    #[serde(default)]
    pub custom: Option<CustomProblem>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverOverrides,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config: ScenarioConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        match self.preset.as_str() {
            "oscillator" | "bell-swap" | "spin-flip" | "cu-acetate" => {
                if self.custom.is_some() {
                    return Err(Error::InvalidConfig(format!(
                        "preset \"{}\" and a custom block are mutually exclusive",
                        self.preset
                    )));
                }
            }
            "custom" => {
                if self.custom.is_none() {
                    return Err(Error::InvalidConfig(
                        "preset \"custom\" requires a custom block".into(),
                    ));
                }
                if self.k.is_none() {
                    return Err(Error::InvalidConfig(
                        "custom problems must specify k explicitly".into(),
                    ));
                }
            }
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown preset \"{other}\"; expected oscillator, bell-swap, \
                     spin-flip, cu-acetate, or custom"
                )));
            }
        }
        if self.grid.n_steps < 2 {
            return Err(Error::InvalidConfig(format!(
                "grid.n_steps must be at least 2, got {}",
                self.grid.n_steps
            )));
        }
        Ok(())
    }

    fn solver_settings(&self) -> SolverSettings {
        let mut s = SolverSettings::default();
        if let Some(tol) = self.solver.tol {
            s.tol = tol;
        }
        if let Some(max_iter) = self.solver.max_iter {
            s.max_iter = max_iter;
        }
        if let Some(bracket_max) = self.solver.bracket_max {
            s.bracket_max = bracket_max;
        }
        s
    }
}

fn parse_complex_vector(raw: &[[f64; 2]], what: &str) -> Result<StateVector> {
    let v = CVector::from_iterator(raw.len(), raw.iter().map(|&[re, im]| C64::new(re, im)));
    StateVector::new(v).map_err(|e| Error::InvalidConfig(format!("{what}: {e}")))
}

fn parse_custom(custom: &CustomProblem, k: f64) -> Result<ZermeloProblem> {
    let dim = custom.h0.len();
    for (i, row) in custom.h0.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::InvalidConfig(format!(
                "h0 row {i} has {} entries, expected {dim}",
                row.len()
            )));
        }
    }
    let m = CMatrix::from_fn(dim, dim, |i, j| {
        let [re, im] = custom.h0[i][j];
        C64::new(re, im)
    });
    let h0 = HermitianOperator::new(m)
        .map_err(|e| Error::InvalidConfig(format!("custom h0: {e}")))?;
    let psi_i = parse_complex_vector(&custom.psi_i, "custom psi_i")?;
    let psi_f = parse_complex_vector(&custom.psi_f, "custom psi_f")?;
    ZermeloProblem::new(h0, psi_i, psi_f, k)
        .map_err(|e| Error::InvalidConfig(format!("custom problem: {e}")))
}

/// A fully resolved scenario: the problem plus the preset metadata needed
/// for quantization tables and unit conversion.
#[derive(Debug)]
pub struct BuiltScenario {
    pub problem: ZermeloProblem,
    pub k: f64,
    /// Target energy, when the preset defines one (drives `quantized(n)`).
    pub eps_f: Option<f64>,
    /// Conversion from natural time to seconds, for presets with physical
    /// units (cu-acetate works in cm^-1).
    pub natural_time_to_seconds: Option<f64>,
}

pub fn build_scenario(config: &ScenarioConfig) -> Result<BuiltScenario> {
    let default_couplings = [1.0, 0.5, 2.0];

    let eps_f: Option<f64> = match config.preset.as_str() {
        "oscillator" => Some(1.5 * config.omega.unwrap_or(1.0)),
        "bell-swap" | "spin-flip" => {
            let [j_x, j_y, j_z] = config.couplings.unwrap_or(default_couplings);
            Some(DimerParams { j_x, j_y, j_z }.eps_f())
        }
        "cu-acetate" => Some(cu_acetate_preset().params.eps_f()),
        _ => None,
    };

    let k = match &config.k {
        None => match config.preset.as_str() {
            // Each preset's natural default: the maximum quantized bound.
            "oscillator" | "bell-swap" | "spin-flip" | "cu-acetate" => {
                let e = eps_f.expect("presets above define eps_f");
                quantized_k(e, 0)?
            }
            _ => unreachable!("validated: custom requires k"),
        },
        Some(spec) => match spec.quantized_level()? {
            None => match spec {
                ResourceSpec::Value(v) => *v,
                ResourceSpec::Rule(_) => unreachable!(),
            },
            Some(n) => {
                let e = eps_f.ok_or_else(|| {
                    Error::InvalidConfig(
                        "\"quantized(n)\" needs a preset with a target energy; \
                         custom problems must give k numerically"
                            .into(),
                    )
                })?;
                quantized_k(e, n)?
            }
        },
    };

    let problem = match config.preset.as_str() {
        "oscillator" => oscillator_problem(config.omega.unwrap_or(1.0), k)?,
        "bell-swap" | "spin-flip" => {
            let [j_x, j_y, j_z] = config.couplings.unwrap_or(default_couplings);
            bell_swap_problem(&DimerParams { j_x, j_y, j_z }, k)?
        }
        "cu-acetate" => {
            let preset = cu_acetate_preset();
            bell_swap_problem(&preset.params, k)?
        }
        _ => parse_custom(config.custom.as_ref().expect("validated"), k)?,
    };

    let natural_time_to_seconds = if config.preset == "cu-acetate" {
        Some(cu_acetate_preset().units.natural_time_to_seconds(1.0))
    } else {
        None
    };

    Ok(BuiltScenario { problem, k, eps_f, natural_time_to_seconds })
}

/// One invariant check of the run report.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub max_deviation: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl InvariantCheck {
    fn new(name: &str, max_deviation: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            max_deviation,
            threshold,
            pass: max_deviation <= threshold,
        }
    }
}

/// Machine-readable summary of one scenario run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub name: Option<String>,
    pub preset: String,
    pub k: f64,
    pub delta_t: f64,
    pub phi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_t_seconds: Option<f64>,
    pub degenerate: bool,
    pub invariants: Vec<InvariantCheck>,
    pub emitted_files: Vec<String>,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.invariants.iter().all(|c| c.pass)
    }
}

fn format_float(x: f64) -> String {
    // Shortest decimal that round-trips to the same bits.
    format!("{x}")
}

/// Writes the trajectory CSV: header
/// `t,fidelity,norm,trace_hc_sq,variance_hc,re_psi_0,im_psi_0,...` with the
/// amplitude columns expanded per dimension. Floats use the shortest
/// round-trip representation, so re-parsing is bit-identical.
pub fn emit_trajectory_csv(samples: &[TrajectorySample], path: &Path) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::InvalidConfig("no trajectory samples to write".into()));
    }
    let dim = samples[0].psi.dim();
    let mut out = String::from("t,fidelity,norm,trace_hc_sq,variance_hc");
    for i in 0..dim {
        out.push_str(&format!(",re_psi_{i},im_psi_{i}"));
    }
    out.push('\n');
    for s in samples {
        out.push_str(&format_float(s.t));
        out.push(',');
        out.push_str(&format_float(s.fidelity_to_target));
        out.push(',');
        out.push_str(&format_float(s.psi.norm()));
        out.push(',');
        out.push_str(&format_float(s.trace_hc_sq));
        out.push(',');
        out.push_str(&format_float(s.variance_hc));
        for i in 0..dim {
            let z = s.psi.amplitudes()[i];
            out.push(',');
            out.push_str(&format_float(z.re));
            out.push(',');
            out.push_str(&format_float(z.im));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes the quantization table CSV with columns `n,k,delta_t`, ascending
/// in `n`.
pub fn emit_quantization_table(table: &QuantizationTable, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::InvalidConfig("empty quantization table".into()));
    }
    let mut out = String::from("n,k,delta_t\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{}\n",
            row.n,
            format_float(row.k),
            format_float(row.delta_t)
        ));
    }
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn invariant_suite(
    built: &BuiltScenario,
    sol: &ZermeloSolution,
    samples: &[TrajectorySample],
    finsler: bool,
) -> Vec<InvariantCheck> {
    let p = &built.problem;
    let k = built.k;
    let mut checks = Vec::new();

    let final_fid = samples.last().map(|s| s.fidelity_to_target).unwrap_or(0.0);
    checks.push(InvariantCheck::new("arrival_fidelity", 1.0 - final_fid, 1e-10));

    let mut norm_dev: f64 = 0.0;
    let mut trace_sq_dev: f64 = 0.0;
    let mut variance_dev: f64 = 0.0;
    for s in samples {
        norm_dev = norm_dev.max((s.psi.norm() - 1.0).abs());
        trace_sq_dev = trace_sq_dev.max((s.trace_hc_sq - k).abs());
        variance_dev = variance_dev.max((s.variance_hc - k / 2.0).abs());
    }
    checks.push(InvariantCheck::new("state_norm", norm_dev, 1e-10));
    checks.push(InvariantCheck::new("resource_bound", trace_sq_dev, 1e-8));
    checks.push(InvariantCheck::new("energy_variance", variance_dev, 1e-8));
    checks.push(InvariantCheck::new(
        "control_traceless",
        sol.hc_initial.trace().abs(),
        1e-10,
    ));

    if finsler {
        let denom_gap = (k - p.h0().trace_squared()).abs();
        if denom_gap > 1e-6 {
            let mut worst: f64 = 0.0;
            for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let x = XOperator::from_trajectory(
                    p.h0(),
                    &sol.hc_initial,
                    sol.delta_t,
                    frac * sol.delta_t,
                );
                match finsler_delta_t(&x, p.h0(), k) {
                    Ok(dt) => worst = worst.max((dt - sol.delta_t).abs()),
                    Err(_) => worst = f64::INFINITY,
                }
            }
            checks.push(InvariantCheck::new("finsler_closure", worst, 1e-8));
        }
    }
    checks
}

/// Execution knobs the CLI forwards into a run.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    pub steps_override: Option<usize>,
    pub quiet: bool,
}

/// Loads, solves, propagates, checks, and emits one scenario.
pub fn run_scenario(config_path: &Path, opts: &RunOptions) -> Result<RunReport> {
    let config = ScenarioConfig::from_path(config_path)?;
    let out_dir = opts
        .output_dir
        .clone()
        .unwrap_or_else(|| config_path.parent().unwrap_or(Path::new(".")).to_path_buf());
    fs::create_dir_all(&out_dir).map_err(|source| Error::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let stem = config
        .name
        .clone()
        .unwrap_or_else(|| {
            config_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into())
        });

    let built = build_scenario(&config)?;
    let settings = config.solver_settings();
    let sol = solve(&built.problem, &settings)?;

    let n_steps = opts.steps_override.unwrap_or(config.grid.n_steps);
    let mut emitted_files = Vec::new();
    let mut invariants = Vec::new();

    if sol.is_degenerate() {
        // Nothing to steer: report delta_t = 0 and succeed.
        invariants.push(InvariantCheck::new("arrival_fidelity", 0.0, 1e-10));
    } else {
        let grid = TimeGrid::new(0.0, sol.delta_t, n_steps)?;
        let samples = propagate_analytic(&built.problem, &sol, &grid);

        if config.outputs.contains(&OutputKind::Trajectory) {
            let name = format!("{stem}_trajectory.csv");
            emit_trajectory_csv(&samples, &out_dir.join(&name))?;
            emitted_files.push(name);
        }
        if config.outputs.contains(&OutputKind::Invariants)
            || config.outputs.contains(&OutputKind::FinslerCheck)
        {
            invariants = invariant_suite(
                &built,
                &sol,
                &samples,
                config.outputs.contains(&OutputKind::FinslerCheck),
            );
        }
        if config.outputs.contains(&OutputKind::QuantizationTable) {
            let eps_f = built.eps_f.ok_or_else(|| {
                Error::InvalidConfig(
                    "quantization-table output needs a preset with a target energy".into(),
                )
            })?;
            let table = QuantizationTable::new(eps_f, 4)?;
            let name = format!("{stem}_quantization.csv");
            emit_quantization_table(&table, &out_dir.join(&name))?;
            emitted_files.push(name);
        }
        if config.outputs.contains(&OutputKind::Adiabaticity) {
            let report = adiabaticity_report(&built.problem, &sol, &grid);
            let name = format!("{stem}_adiabaticity.csv");
            let path = out_dir.join(&name);
            let mut out = String::from("t");
            for b in 0..report.populations.len() {
                out.push_str(&format!(",population_{b}"));
            }
            out.push('\n');
            for (i, t) in report.times.iter().enumerate() {
                out.push_str(&format_float(*t));
                for series in &report.populations {
                    out.push(',');
                    out.push_str(&format_float(series[i]));
                }
                out.push('\n');
            }
            fs::write(&path, out).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            emitted_files.push(name);
        }
    }

    let report = RunReport {
        name: config.name.clone(),
        preset: config.preset.clone(),
        k: built.k,
        delta_t: sol.delta_t,
        phi: sol.phi,
        delta_t_seconds: built.natural_time_to_seconds.map(|f| f * sol.delta_t),
        degenerate: sol.is_degenerate(),
        invariants,
        emitted_files,
    };

    let report_path = out_dir.join(format!("{stem}_report.json"));
    let json = serde_json::to_string_pretty(&report)
        .expect("report serialization cannot fail");
    fs::write(&report_path, json + "\n").map_err(|source| Error::Io {
        path: report_path.display().to_string(),
        source,
    })?;

    Ok(report)
}
