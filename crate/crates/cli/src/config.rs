//! Scenario configuration documents.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sqzc_core::effective::CircuitParams;
use sqzc_core::fock::{GridSpec, HamiltonianVariant, HilbertConfig, SteadyMethod, SteadyOptions};
use sqzc_core::gaussian::{DetuningMode, GaussianOptions};

use crate::error::CliError;

/// Parameters that can be swept. `delta12_effective` holds the Gaussian
/// tier at a fixed effective detuning instead of the bare one.
pub const SWEEP_VARIABLES: [&str; 8] = ["kappa1", "kappa2", "eps1_mag", "eps1_phase", "g", "delta_q", "delta12", "delta12_effective"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        (0..self.points).map(|k| self.start + (self.stop - self.start) * k as f64 / (self.points - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    #[default]
    Gaussian,
    Fock,
    Both,
}

impl Tier {
    pub fn gaussian(self) -> bool {
        matches!(self, Tier::Gaussian | Tier::Both)
    }

    pub fn fock(self) -> bool {
        matches!(self, Tier::Fock | Tier::Both)
    }
}

/// Per-point detuning optimization. The Gaussian optimum over `window` is
/// always computed; with `refine_fock` the full model is re-optimized
/// within `fock_half_width` of it, otherwise it is evaluated there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningSearch {
    pub window: (f64, f64),
    #[serde(default)]
    pub refine_fock: bool,
    #[serde(default = "default_half_width")]
    pub fock_half_width: f64,
    #[serde(default = "default_fock_scan")]
    pub fock_scan_points: usize,
    #[serde(default = "default_fock_tolerance")]
    pub fock_tolerance: f64,
}

fn default_half_width() -> f64 {
    0.5
}

fn default_fock_scan() -> usize {
    5
}

fn default_fock_tolerance() -> f64 {
    2e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tier: Tier,
    pub method: SteadyMethod,
    pub variant: HamiltonianVariant,
    pub residual_tolerance: f64,
    pub gaussian_tolerance: f64,
    pub damping: f64,
    pub max_iter: usize,
    pub optimize_detuning: Option<DetuningSearch>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let g = GaussianOptions::default();
        Self {
            tier: Tier::Gaussian,
            method: SteadyMethod::Auto,
            variant: HamiltonianVariant::Full,
            residual_tolerance: SteadyOptions::default().residual_tolerance,
            gaussian_tolerance: g.tolerance,
            damping: g.damping,
            max_iter: g.max_iter,
            optimize_detuning: None,
        }
    }
}

impl SolverConfig {
    pub fn gaussian_options(&self, fixed_effective: Option<f64>) -> GaussianOptions {
        GaussianOptions {
            damping: self.damping,
            tolerance: self.gaussian_tolerance,
            max_iter: self.max_iter,
            detuning: fixed_effective.map_or(DetuningMode::SelfConsistent, DetuningMode::FixedEffective),
        }
    }

    pub fn steady_options(&self) -> SteadyOptions {
        SteadyOptions { method: self.method, residual_tolerance: self.residual_tolerance, ..SteadyOptions::default() }
    }
}

/// Extra Fock-tier outputs per point.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub wigner: Option<GridSpec>,
    pub number_distribution: bool,
    pub truncation_report: bool,
}

/// A named modification of the base circuit, run as its own series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantConfig {
    pub label: String,
    #[serde(default)]
    pub g: Option<f64>,
    #[serde(default)]
    pub delta_q: Option<f64>,
    #[serde(default)]
    pub eps1_mag: Option<f64>,
    #[serde(default)]
    pub delta12: Option<f64>,
    #[serde(default)]
    pub truncation: Option<HilbertConfig>,
    #[serde(default)]
    pub hamiltonian: Option<HamiltonianVariant>,
    /// Overrides `DetuningSearch::refine_fock` for this variant.
    #[serde(default)]
    pub refine_fock: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_path")]
    pub path: PathBuf,
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
    /// Quantity drawn in sweep plots.
    #[serde(default)]
    pub plot: PlotQuantity,
    /// Horizontal dashed line drawn in 1-D sweep plots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_line: Option<f64>,
}

fn default_out_path() -> PathBuf {
    PathBuf::from("out")
}

fn default_name() -> String {
    "scenario".into()
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { path: default_out_path(), name: default_name(), formats: default_formats(), plot: PlotQuantity::default(), reference_line: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotQuantity {
    #[default]
    VarMin,
    VarP,
    SqueezingDb,
    NBar,
    MomentError,
}

impl PlotQuantity {
    pub fn label(self) -> &'static str {
        match self {
            PlotQuantity::VarMin => "var_min",
            PlotQuantity::VarP => "var_p",
            PlotQuantity::SqueezingDb => "squeezing_db",
            PlotQuantity::NBar => "n_bar",
            PlotQuantity::MomentError => "moment_error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub circuit: CircuitParams,
    /// When set, every frequency in `circuit` is read in MHz and divided by
    /// this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa2_mhz: Option<f64>,
    #[serde(default)]
    pub truncation: HilbertConfig,
    #[serde(default)]
    pub sweep: Vec<SweepAxis>,
    #[serde(default)]
    pub variants: Vec<VariantConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Circuit in normalized units.
    pub fn normalized_circuit(&self) -> CircuitParams {
        let mut c = self.circuit;
        if let Some(k) = self.kappa2_mhz {
            for v in [&mut c.kappa1, &mut c.kappa2, &mut c.eps1_mag, &mut c.g, &mut c.delta_q, &mut c.delta12] {
                *v /= k;
            }
        }
        c
    }

    /// Sweep values in normalized units.
    pub fn sweep_values(&self, axis: &SweepAxis) -> Vec<f64> {
        let scale = match (self.kappa2_mhz, axis.variable.as_str()) {
            (Some(k), v) if v != "eps1_phase" => 1.0 / k,
            _ => 1.0,
        };
        axis.values().into_iter().map(|x| x * scale).collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(k) = self.kappa2_mhz {
            if !(k.is_finite() && k > 0.0) {
                return Err(invalid(format!("kappa2_mhz must be positive, got {k}")));
            }
        }
        self.normalized_circuit().validate().map_err(|e| invalid(e.to_string()))?;
        self.truncation.validate().map_err(|e| invalid(e.to_string()))?;
        if self.sweep.len() > 2 {
            return Err(invalid(format!("at most 2 sweep variables are supported, got {}", self.sweep.len())));
        }
        for (k, axis) in self.sweep.iter().enumerate() {
            if !SWEEP_VARIABLES.contains(&axis.variable.as_str()) {
                return Err(invalid(format!("unknown sweep variable '{}' (expected one of {SWEEP_VARIABLES:?})", axis.variable)));
            }
            if self.sweep[..k].iter().any(|a| a.variable == axis.variable) {
                return Err(invalid(format!("sweep variable '{}' appears twice", axis.variable)));
            }
            if axis.points < 1 {
                return Err(invalid(format!("sweep over '{}' needs at least one point", axis.variable)));
            }
            if !(axis.start.is_finite() && axis.stop.is_finite()) {
                return Err(invalid(format!("sweep over '{}' has a non-finite range", axis.variable)));
            }
            if axis.variable == "delta12_effective" && self.solver.tier.fock() {
                return Err(invalid("delta12_effective sweeps are only defined for the Gaussian tier"));
            }
            if axis.variable == "delta12_effective" && self.solver.optimize_detuning.is_some() {
                return Err(invalid("delta12_effective cannot be swept while optimizing the detuning"));
            }
        }
        if let Some(s) = &self.solver.optimize_detuning {
            let (lo, hi) = s.window;
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(invalid(format!("detuning window [{lo}, {hi}] is empty or not finite")));
            }
            if self.sweep.iter().any(|a| a.variable == "delta12") {
                return Err(invalid("delta12 cannot be swept while optimizing it"));
            }
            if !(s.fock_half_width > 0.0) || s.fock_scan_points < 3 || !(s.fock_tolerance > 0.0) {
                return Err(invalid("fock detuning refinement needs a positive half width and tolerance and >= 3 scan points"));
            }
        }
        if !(self.solver.damping > 0.0 && self.solver.damping <= 1.0) {
            return Err(invalid(format!("damping must lie in (0, 1], got {}", self.solver.damping)));
        }
        if !(self.solver.residual_tolerance > 0.0) || !(self.solver.gaussian_tolerance > 0.0) || self.solver.max_iter == 0 {
            return Err(invalid("solver tolerances and max_iter must be positive"));
        }
        let mut labels = std::collections::HashSet::new();
        for v in &self.variants {
            if v.label.is_empty() || !v.label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(invalid(format!("variant label '{}' must be non-empty and use [A-Za-z0-9_-]", v.label)));
            }
            if !labels.insert(v.label.as_str()) {
                return Err(invalid(format!("duplicate variant label '{}'", v.label)));
            }
            let (circuit, truncation, ham) = self.variant_setup(Some(v));
            circuit.validate().map_err(|e| invalid(format!("variant '{}': {e}", v.label)))?;
            truncation.validate().map_err(|e| invalid(format!("variant '{}': {e}", v.label)))?;
            if ham == HamiltonianVariant::Dispersive && truncation.include_qubit && self.solver.tier.fock() {
                return Err(invalid(format!("variant '{}': the dispersive Hamiltonian needs include_qubit = false", v.label)));
            }
        }
        if self.variants.is_empty() && self.solver.variant == HamiltonianVariant::Dispersive && self.truncation.include_qubit && self.solver.tier.fock() {
            return Err(invalid("the dispersive Hamiltonian needs include_qubit = false"));
        }
        if let Some(g) = &self.analysis.wigner {
            g.validate().map_err(|e| invalid(e.to_string()))?;
        }
        if self.output.name.is_empty() || self.output.name.contains(['/', '\\']) {
            return Err(invalid(format!("output name '{}' must be a plain file stem", self.output.name)));
        }
        Ok(())
    }

    /// Circuit (normalized), truncation and Hamiltonian of one variant.
    pub fn variant_setup(&self, v: Option<&VariantConfig>) -> (CircuitParams, HilbertConfig, HamiltonianVariant) {
        let mut c = self.normalized_circuit();
        let mut t = self.truncation;
        let mut h = self.solver.variant;
        if let Some(v) = v {
            let scale = self.kappa2_mhz.map_or(1.0, |k| 1.0 / k);
            if let Some(g) = v.g {
                c.g = g * scale;
            }
            if let Some(d) = v.delta_q {
                c.delta_q = d * scale;
            }
            if let Some(e) = v.eps1_mag {
                c.eps1_mag = e * scale;
            }
            if let Some(d) = v.delta12 {
                c.delta12 = d * scale;
            }
            if let Some(tr) = v.truncation {
                t = tr;
            }
            if let Some(hv) = v.hamiltonian {
                h = hv;
            }
        }
        (c, t, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"circuit": {"kappa1": 50, "eps1_mag": 0}}"#;

    #[test]
    fn minimal_config_defaults() {
        let c = ScenarioConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.truncation, HilbertConfig::default());
        assert_eq!(c.solver.tier, Tier::Gaussian);
        assert!(c.sweep.is_empty());
        assert_eq!(c.circuit.kappa2, 1.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ScenarioConfig::from_json(r#"{"circuit": {"kappa1": 50, "eps1_mag": 0, "kapa2": 1}}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"circuit": {"kappa1": 50, "eps1_mag": 0}, "extra": 1}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"circuit": {"kappa1": 50, "eps1_mag": 0}, "solver": {"tier": "quantum"}}"#).is_err());
    }

    #[test]
    fn sweep_validation() {
        let bad = [
            r#"{"circuit": {"kappa1": 50, "eps1_mag": 0}, "sweep": [{"variable": "omega", "start": 0, "stop": 1, "points": 2}]}"#,
            r#"{"circuit": {"kappa1": 50, "eps1_mag": 0}, "sweep": [{"variable": "g", "start": 0, "stop": 1, "points": 0}]}"#,
            r#"{"circuit": {"kappa1": 50, "eps1_mag": 0}, "sweep": [{"variable": "g", "start": 0, "stop": 1, "points": 2},
                {"variable": "eps1_mag", "start": 0, "stop": 1, "points": 2}, {"variable": "delta12", "start": 0, "stop": 1, "points": 2}]}"#,
            r#"{"circuit": {"kappa1": 50, "eps1_mag": 0}, "solver": {"tier": "fock"},
                "sweep": [{"variable": "delta12_effective", "start": 0, "stop": 1, "points": 2}]}"#,
        ];
        for b in bad {
            assert!(matches!(ScenarioConfig::from_json(b), Err(CliError::Config(_))), "{b}");
        }
        let axis = SweepAxis { variable: "g".into(), start: 1.0, stop: 2.0, points: 3 };
        assert_eq!(axis.values(), vec![1.0, 1.5, 2.0]);
        assert_eq!(SweepAxis { points: 1, ..axis }.values(), vec![1.0]);
    }

    #[test]
    fn mhz_inputs_are_normalized() {
        let c = ScenarioConfig::from_json(
            r#"{"circuit": {"kappa1": 100, "kappa2": 2, "eps1_mag": 20, "g": 112, "delta_q": 1200}, "kappa2_mhz": 2,
                "sweep": [{"variable": "eps1_mag", "start": 2, "stop": 4, "points": 2}]}"#,
        )
        .unwrap();
        let n = c.normalized_circuit();
        assert_eq!((n.kappa1, n.kappa2, n.eps1_mag, n.g, n.delta_q), (50.0, 1.0, 10.0, 56.0, 600.0));
        assert_eq!(c.sweep_values(&c.sweep[0]), vec![1.0, 2.0]);
    }

    #[test]
    fn round_trip() {
        let c = ScenarioConfig::from_json(
            r#"{"circuit": {"kappa1": 50, "eps1_mag": 3, "g": 56, "delta_q": 600}, "kappa2_mhz": 1,
                "variants": [{"label": "dq1200", "delta_q": 1200}], "solver": {"tier": "both", "optimize_detuning": {"window": [-1, 8]}},
                "analysis": {"number_distribution": true}, "output": {"name": "x", "formats": ["csv", "svg"]}}"#,
        )
        .unwrap();
        assert_eq!(ScenarioConfig::from_json(&c.to_json()).unwrap(), c);
    }
}
