//! Command-line front end: declarative experiment configs, the verification
//! suites, and the resource-table emitter. Artifacts are CSV plus a JSON
//! summary; floats are written with 17 significant digits; outputs are
//! deterministic for a fixed config and seed up to the single timestamp
//! field.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::amplification::{run_adiabatic, run_longtime, Diagnostics};
use crate::bounds::{resources, BoundReport, EstimatorRegime, ResourceParams};
use crate::error::{FqsError, FqsResult};
use crate::hamiltonian::{DecayProfile, FourierHamiltonian};
use crate::linalg::{vec_norm, CMat, CVec, C64};
use crate::presets::{self, HubbardParams, PresetModel};
use crate::propagator::SystemState;
use crate::verify::run_suite;

/// Exit codes: 0 success, 1 bound violation, 2 validation error,
/// 3 numerical failure.
pub const EXIT_OK: i32 = 0;
pub const EXIT_BOUND_VIOLATION: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum PresetChoice {
    DrivenQubit,
    Hubbard2,
    AdiabaticPrep,
    GaussianPacket,
    Custom,
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum RegimeChoice {
    Adiabatic,
    Longtime,
}

/// Decay profile in configs.
#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSpec {
    Finite { m_max: usize },
    ExponentialDecay { h: f64, zeta: f64 },
}

/// Preset-specific parameters; unknown combinations are rejected up front.
#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PresetParams {
    // driven qubit / adiabatic prep
    pub delta: Option<f64>,
    pub v: Option<f64>,
    pub omega: Option<f64>,
    // hubbard / gaussian packet
    pub eps_k: Option<[f64; 2]>,
    pub u: Option<f64>,
    pub v_x: Option<[f64; 2]>,
    pub big_omega: Option<f64>,
    pub p_waves: Option<u32>,
    pub omega_tau: Option<f64>,
    pub m_cut: Option<usize>,
    // custom: matrices as row-major interleaved (re, im) float64 arrays
    pub dim: Option<usize>,
    pub components: Option<BTreeMap<String, Vec<f64>>>,
    pub profile: Option<ProfileSpec>,
    /// Initial state, interleaved (re, im); defaults to the ground state
    /// of H(0).
    pub initial_state: Option<Vec<f64>>,
}

/// One experiment: preset, parameters, time, accuracy, regime, seed.
#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: PresetChoice,
    #[serde(default)]
    pub params: PresetParams,
    pub t: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub regime: Option<RegimeChoice>,
    #[serde(default)]
    pub seed: u64,
    /// Artifact selectors; empty means all of {state, summary}.
    #[serde(default)]
    pub outputs: Vec<String>,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> FqsResult<Self> {
        let text = fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Fail-fast validation before any computation starts.
    pub fn validate(&self) -> FqsResult<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(FqsError::InvalidEpsilon(self.epsilon));
        }
        if self.t <= 0.0 || !self.t.is_finite() {
            return Err(FqsError::Validation(format!(
                "t must be > 0, got {}",
                self.t
            )));
        }
        for out in &self.outputs {
            if !matches!(out.as_str(), "state" | "summary") {
                return Err(FqsError::Validation(format!(
                    "unknown output selector '{out}'"
                )));
            }
        }
        if self.preset == PresetChoice::Custom {
            let p = &self.params;
            let dim = p
                .dim
                .ok_or_else(|| FqsError::Validation("custom preset needs 'dim'".into()))?;
            let comps = p
                .components
                .as_ref()
                .ok_or_else(|| FqsError::Validation("custom preset needs 'components'".into()))?;
            for (m, data) in comps {
                m.parse::<i32>().map_err(|_| {
                    FqsError::Validation(format!("component key '{m}' is not an integer"))
                })?;
                if data.len() != 2 * dim * dim {
                    return Err(FqsError::Validation(format!(
                        "component {m}: expected {} floats (row-major interleaved), got {}",
                        2 * dim * dim,
                        data.len()
                    )));
                }
            }
            if p.omega.is_none() {
                return Err(FqsError::Validation("custom preset needs 'omega'".into()));
            }
        }
        Ok(())
    }

    fn hubbard_params(&self) -> HubbardParams {
        let mut hp = HubbardParams::default();
        if let Some(e) = self.params.eps_k {
            hp.eps_k = e;
        }
        if let Some(u) = self.params.u {
            hp.u = u;
        }
        if let Some(v) = self.params.v_x {
            hp.v_x = v;
        }
        if let Some(w) = self.params.big_omega {
            hp.big_omega = w;
        }
        hp
    }

    /// Build the model this config describes.
    pub fn build_model(&self) -> FqsResult<PresetModel> {
        match self.preset {
            PresetChoice::DrivenQubit => presets::driven_qubit(
                self.params.delta.unwrap_or(1.0),
                self.params.v.unwrap_or(1.0),
                self.params.omega.unwrap_or(1.0),
            ),
            PresetChoice::Hubbard2 => presets::hubbard2(&self.hubbard_params()),
            PresetChoice::AdiabaticPrep => {
                presets::adiabatic_prep_default(self.params.omega.unwrap_or(8.0))
            }
            PresetChoice::GaussianPacket => presets::gaussian_packet(
                &self.hubbard_params(),
                self.params.p_waves.unwrap_or(2),
                self.params.omega_tau.unwrap_or(1.0),
                self.params.m_cut.unwrap_or(8),
            ),
            PresetChoice::Custom => {
                let p = &self.params;
                let dim = p.dim.unwrap();
                let mut comps = BTreeMap::new();
                for (m, data) in p.components.as_ref().unwrap() {
                    comps.insert(m.parse::<i32>().unwrap(), decode_matrix(data, dim)?);
                }
                let profile = match &p.profile {
                    Some(ProfileSpec::Finite { m_max }) => DecayProfile::Finite { m_max: *m_max },
                    Some(ProfileSpec::ExponentialDecay { h, zeta }) => {
                        DecayProfile::ExponentialDecay { h: *h, zeta: *zeta }
                    }
                    None => {
                        let m_max = comps
                            .keys()
                            .map(|m| m.unsigned_abs() as usize)
                            .max()
                            .unwrap_or(0);
                        DecayProfile::Finite { m_max }
                    }
                };
                let h = FourierHamiltonian::from_components(p.omega.unwrap(), comps, profile)?;
                // generic Pauli LCUs when the dimension allows, else no LCUs
                let mut lcus = BTreeMap::new();
                if dim.is_power_of_two() {
                    for m in h.modes().collect::<Vec<_>>() {
                        lcus.insert(
                            m,
                            crate::hamiltonian::LCUDecomposition::from_pauli_basis(
                                h.component(m).unwrap(),
                            )?,
                        );
                    }
                }
                let mut alphas = BTreeMap::new();
                for (&m, l) in &lcus {
                    alphas.insert(m, l.alpha());
                }
                Ok(PresetModel {
                    name: "custom".into(),
                    hamiltonian: h,
                    lcus,
                    alphas,
                })
            }
        }
    }

    pub fn initial_state(&self, model: &PresetModel) -> FqsResult<CVec> {
        match &self.params.initial_state {
            Some(data) => {
                let dim = model.dim();
                if data.len() != 2 * dim {
                    return Err(FqsError::Validation(format!(
                        "initial_state: expected {} floats, got {}",
                        2 * dim,
                        data.len()
                    )));
                }
                let mut v = CVec::zeros(dim);
                for i in 0..dim {
                    v[i] = C64::new(data[2 * i], data[2 * i + 1]);
                }
                let n = vec_norm(&v);
                if (n - 1.0).abs() > 1e-6 {
                    return Err(FqsError::Validation(format!(
                        "initial_state norm {n} is not 1"
                    )));
                }
                Ok(v.mapv(|z| z / n))
            }
            None => Ok(model.ground_state_at_zero()),
        }
    }
}

fn decode_matrix(data: &[f64], dim: usize) -> FqsResult<CMat> {
    let mut m = CMat::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            let k = 2 * (i * dim + j);
            m[[i, j]] = C64::new(data[k], data[k + 1]);
        }
    }
    Ok(m)
}

/// Encode a matrix in the row-major interleaved float64 format.
pub fn encode_matrix(m: &CMat) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[[i, j]].re);
            out.push(m[[i, j]].im);
        }
    }
    out
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Results of `simulate`, written as state.csv + summary.json + summary.csv.
#[derive(Debug, Serialize)]
pub struct SimulationArtifacts {
    pub config: ExperimentConfig,
    pub diagnostics: Diagnostics,
    pub generated_at: String,
    #[serde(skip)]
    pub state: SystemState,
}

/// Run the pipeline an experiment asks for.
pub fn cmd_simulate(config: &ExperimentConfig) -> FqsResult<SimulationArtifacts> {
    config.validate()?;
    let model = config.build_model()?;
    let psi0 = config.initial_state(&model)?;
    let h = &model.hamiltonian;
    let regime = match &config.regime {
        Some(r) => r.clone(),
        None => {
            if config.t <= h.period() {
                RegimeChoice::Adiabatic
            } else {
                RegimeChoice::Longtime
            }
        }
    };
    let (state, diagnostics) = match regime {
        RegimeChoice::Adiabatic => run_adiabatic(h, &psi0, config.t, config.epsilon)?,
        RegimeChoice::Longtime => run_longtime(h, &psi0, config.t, config.epsilon)?,
    };
    Ok(SimulationArtifacts {
        config: config.clone(),
        diagnostics,
        generated_at: chrono::Utc::now().to_rfc3339(),
        state,
    })
}

/// Write simulation artifacts under `out_dir`.
pub fn write_simulation(
    artifacts: &SimulationArtifacts,
    out_dir: &Path,
) -> FqsResult<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let wants = |name: &str| {
        artifacts.config.outputs.is_empty() || artifacts.config.outputs.iter().any(|o| o == name)
    };
    if wants("state") {
        let mut csv = String::from("index,re,im\n");
        for (i, z) in artifacts.state.vector.iter().enumerate() {
            csv.push_str(&format!("{i},{},{}\n", fmt17(z.re), fmt17(z.im)));
        }
        let path = out_dir.join("state.csv");
        fs::write(&path, csv)?;
        written.push(path);
    }
    if wants("summary") {
        let path = out_dir.join("summary.json");
        fs::write(&path, serde_json::to_string_pretty(artifacts)?)?;
        written.push(path);
        let d = &artifacts.diagnostics;
        let mut csv = String::from(
            "regime,l_max,t,epsilon,success_probability,deviation,fidelity,oracle_tol,wall_time_s\n",
        );
        csv.push_str(&format!(
            "{:?},{},{},{},{},{},{},{},{}\n",
            d.regime,
            d.l_max,
            fmt17(d.t),
            fmt17(d.epsilon),
            fmt17(d.success_probability),
            fmt17(d.deviation),
            fmt17(d.fidelity),
            fmt17(d.oracle_tol),
            fmt17(d.wall_time_s),
        ));
        let path = out_dir.join("summary.csv");
        fs::write(&path, csv)?;
        written.push(path);
    }
    Ok(written)
}

/// Run a verification suite; returns the reports and the exit code
/// (0 when every slack is >= -1e-10, else 1).
///
/// A config, when supplied, is validated up front (fail fast) and its model
/// replaces the default driven qubit in the Hamiltonian-dependent bound
/// sweeps; the encoding and amplification suites are tied to their canonical
/// constructions and ignore it.
pub fn cmd_verify(
    suite: &str,
    config: Option<&ExperimentConfig>,
) -> FqsResult<(Vec<BoundReport>, i32)> {
    let model = match config {
        Some(cfg) => {
            cfg.validate()?;
            Some(cfg.build_model()?)
        }
        None => None,
    };
    let rows = match (suite, &model) {
        ("bounds", Some(m)) => {
            let mut rows = Vec::new();
            match m.hamiltonian.profile() {
                DecayProfile::Finite { .. } => {
                    let scales = crate::hamiltonian::energy_scales(&m.hamiltonian, None, 256)?;
                    if scales.gamma_upper == 0.0 {
                        return Err(FqsError::Validation(
                            "bound sweeps need a driven Hamiltonian (gamma > 0)".into(),
                        ));
                    }
                    rows.extend(crate::verify::sweep_lr_finite(
                        m,
                        12,
                        &[0.25, 0.5, 1.0, 2.0],
                    )?);
                    rows.extend(crate::verify::sweep_truncation(m)?);
                    rows.extend(crate::verify::sweep_symmetry(m, &[0.5, 1.0])?);
                }
                DecayProfile::ExponentialDecay { .. } => {
                    rows.extend(crate::verify::sweep_lr_exp(m, 13, &[0.05, 0.15, 0.3])?);
                    rows.extend(crate::verify::sweep_truncation_exp(m, &[0.1, 0.3])?);
                }
            }
            rows.extend(crate::verify::sweep_prop1());
            rows
        }
        _ => run_suite(suite)?,
    };
    let violations = rows.iter().filter(|r| r.violated()).count();
    let code = if violations == 0 {
        EXIT_OK
    } else {
        EXIT_BOUND_VIOLATION
    };
    Ok((rows, code))
}

/// Write verification reports as CSV.
pub fn write_reports(rows: &[BoundReport], out_dir: &Path) -> FqsResult<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let mut csv = String::from("suite,quantity,context,bound,measured,slack,premise_ok\n");
    for r in rows {
        csv.push_str(&format!(
            "{},{},\"{}\",{},{},{},{}\n",
            r.suite,
            r.quantity,
            r.context,
            fmt17(r.bound),
            fmt17(r.measured),
            fmt17(r.slack),
            r.premise_ok
        ));
    }
    let path = out_dir.join("bounds.csv");
    fs::write(&path, csv)?;
    Ok(path)
}

/// Parameters of the resource table.
#[derive(Debug, Clone)]
pub struct ResourceTableRequest {
    pub alpha: f64,
    pub gamma: f64,
    pub omega: f64,
    pub t: f64,
    pub epsilons: Vec<f64>,
    pub omegas: Vec<f64>,
    pub n_a: u64,
    pub trotter_order: u32,
}

/// Evaluate the comparison table over the requested epsilon and omega grids.
pub fn cmd_resources(req: &ResourceTableRequest) -> FqsResult<String> {
    let regimes = [
        EstimatorRegime::Trotter {
            order: req.trotter_order,
        },
        EstimatorRegime::Qubitization,
        EstimatorRegime::Adiabatic,
        EstimatorRegime::LongTime,
        EstimatorRegime::TruncatedDyson,
    ];
    let mut csv = String::from(
        "regime,alpha,gamma,omega,t,epsilon,ancilla_qubits,query_complexity,gates_per_query,ancilla_formula,scaling_only,crossover_t,high_frequency\n",
    );
    for &omega in &req.omegas {
        for &eps in &req.epsilons {
            for regime in regimes {
                let est = resources(
                    regime,
                    ResourceParams {
                        alpha: req.alpha,
                        gamma: req.gamma,
                        omega,
                        t: req.t,
                        epsilon: eps,
                        n_a: req.n_a,
                        c_oracle: 1.0,
                    },
                )?;
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},\"{}\",\"{}\",{},{},{}\n",
                    est.regime.label(),
                    fmt17(req.alpha),
                    fmt17(req.gamma),
                    fmt17(omega),
                    fmt17(req.t),
                    fmt17(eps),
                    est.ancilla_qubits,
                    fmt17(est.query_complexity),
                    est.gates_per_query,
                    est.ancilla_formula,
                    est.scaling_only,
                    est.crossover_t.map(fmt17).unwrap_or_default(),
                    est.high_frequency
                ));
            }
        }
    }
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit_config() -> ExperimentConfig {
        ExperimentConfig {
            preset: PresetChoice::DrivenQubit,
            params: PresetParams::default(),
            t: 1.0,
            epsilon: 1e-3,
            regime: Some(RegimeChoice::Adiabatic),
            seed: 7,
            outputs: vec![],
        }
    }

    #[test]
    fn config_validation_rejects_bad_epsilon() {
        let mut cfg = qubit_config();
        cfg.epsilon = 2.0;
        assert!(matches!(cfg.validate(), Err(FqsError::InvalidEpsilon(_))));
    }

    #[test]
    fn config_roundtrip_json() {
        let cfg = qubit_config();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn custom_matrix_roundtrip() {
        let m = crate::hamiltonian::pauli_y();
        let data = encode_matrix(&m);
        let back = decode_matrix(&data, 2).unwrap();
        assert!(crate::linalg::max_abs_diff(&m, &back) < 1e-15);
    }

    #[test]
    fn custom_preset_rejects_non_hermitian() {
        // i X stored symmetrically is not a Hermitian pair
        let ix = crate::hamiltonian::pauli_x().mapv(|z| z * C64::new(0.0, 1.0));
        let mut comps = BTreeMap::new();
        comps.insert("1".to_string(), encode_matrix(&ix));
        comps.insert("-1".to_string(), encode_matrix(&ix));
        let cfg = ExperimentConfig {
            preset: PresetChoice::Custom,
            params: PresetParams {
                dim: Some(2),
                omega: Some(1.0),
                components: Some(comps),
                ..Default::default()
            },
            t: 1.0,
            epsilon: 1e-3,
            regime: None,
            seed: 0,
            outputs: vec![],
        };
        cfg.validate().unwrap(); // shape-valid
        let err = cfg.build_model().unwrap_err();
        assert!(matches!(err, FqsError::NonHermitianPair { .. }));
        assert_eq!(err.exit_code(), EXIT_VALIDATION);
    }

    #[test]
    fn initial_state_override_and_validation() {
        let mut cfg = qubit_config();
        cfg.params.initial_state = Some(vec![0.0, 0.0, 1.0, 0.0]); // |1>
        let model = cfg.build_model().unwrap();
        let psi0 = cfg.initial_state(&model).unwrap();
        assert!((psi0[1].re - 1.0).abs() < 1e-15);
        cfg.params.initial_state = Some(vec![0.3, 0.0, 0.0, 0.0]); // unnormalized
        assert!(cfg.initial_state(&model).is_err());
        cfg.params.initial_state = Some(vec![1.0, 0.0]); // wrong length
        assert!(cfg.initial_state(&model).is_err());
    }

    #[test]
    fn gaussian_packet_preset_builds_from_config() {
        let make = |m_cut: usize| ExperimentConfig {
            preset: PresetChoice::GaussianPacket,
            params: PresetParams {
                p_waves: Some(2),
                omega_tau: Some(1.0),
                m_cut: Some(m_cut),
                ..Default::default()
            },
            t: 0.1,
            epsilon: 1e-2,
            regime: Some(RegimeChoice::Adiabatic),
            seed: 0,
            outputs: vec![],
        };
        let model = make(8).build_model().unwrap();
        assert_eq!(model.dim(), 16);
        assert!(matches!(
            model.hamiltonian.profile(),
            crate::hamiltonian::DecayProfile::ExponentialDecay { .. }
        ));
        // a cutoff that under-resolves the packet fails fast
        assert!(matches!(
            make(5).build_model(),
            Err(FqsError::QuadratureResidual { .. })
        ));
    }

    #[test]
    fn simulate_driven_qubit_writes_artifacts() {
        let cfg = qubit_config();
        let artifacts = cmd_simulate(&cfg).unwrap();
        assert!(artifacts.diagnostics.fidelity >= 1.0 - 1e-3);
        let dir = tempfile::tempdir().unwrap();
        let files = write_simulation(&artifacts, dir.path()).unwrap();
        assert_eq!(files.len(), 3);
        let state_csv = fs::read_to_string(dir.path().join("state.csv")).unwrap();
        assert!(state_csv.starts_with("index,re,im"));
        assert_eq!(state_csv.lines().count(), 3); // header + 2 amplitudes
    }

    #[test]
    fn deterministic_json_modulo_timestamp() {
        let cfg = qubit_config();
        let a = cmd_simulate(&cfg).unwrap();
        let b = cmd_simulate(&cfg).unwrap();
        let mut ja = serde_json::to_value(&a).unwrap();
        let mut jb = serde_json::to_value(&b).unwrap();
        // wall time and timestamp are the only nondeterministic fields
        ja["generated_at"] = serde_json::Value::Null;
        jb["generated_at"] = serde_json::Value::Null;
        ja["diagnostics"]["wall_time_s"] = serde_json::Value::Null;
        jb["diagnostics"]["wall_time_s"] = serde_json::Value::Null;
        assert_eq!(ja, jb);
    }

    #[test]
    fn resources_table_has_five_regimes() {
        let req = ResourceTableRequest {
            alpha: 100.0,
            gamma: 50.0,
            omega: 1.0,
            t: 100.0,
            epsilons: vec![1e-3],
            omegas: vec![1.0],
            n_a: 3,
            trotter_order: 2,
        };
        let csv = cmd_resources(&req).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 6); // header + 5 regimes
        for label in [
            "trotter_p2",
            "qubitization",
            "adiabatic",
            "longtime",
            "truncated_dyson",
        ] {
            assert!(
                lines.iter().any(|l| l.starts_with(label)),
                "missing {label}"
            );
        }
    }
}
