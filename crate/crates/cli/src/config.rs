//! Per-subcommand configuration files.
//!
//! Configs are flat TOML key/value files with one schema per subcommand.
//! Unknown keys are hard errors. Every stochastic command requires a
//! seed, either in the file or via `--seed`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use bemsim_core::{CalibrationSignal, EfficiencyCurve, TimeFs, TimingGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
}

/// Seed resolution: the command-line flag wins over the config file.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64> {
    flag.or(config).ok_or_else(|| {
        anyhow::anyhow!("a seed is required: pass --seed or set `seed` in the config")
    })
}

fn default_step_ps() -> f64 {
    12.5
}
fn default_n_steps() -> u32 {
    64
}
fn default_fwhm_ps() -> f64 {
    bemsim_core::curve::DEFAULT_FWHM_PS
}
fn default_peak() -> f64 {
    bemsim_core::curve::DEFAULT_PEAK_EFFICIENCY
}
fn default_dark() -> f64 {
    bemsim_core::curve::DEFAULT_DARK_COUNT_RATE
}
fn default_t0_ps() -> f64 {
    bemsim_core::calibration::DEFAULT_T0_PS
}
fn default_t1_ps() -> f64 {
    bemsim_core::calibration::DEFAULT_T1_PS
}
fn default_mu() -> f64 {
    bemsim_core::calibration::DEFAULT_MEAN_PHOTON_NUMBER
}
fn default_pulses_per_step() -> u64 {
    bemsim_core::calibration::DEFAULT_PULSES_PER_STEP
}
fn default_qber_cap() -> f64 {
    bemsim_core::fsa::DEFAULT_QBER_CAP
}
fn default_e_b_points() -> u32 {
    50
}
fn default_kappa() -> f64 {
    0.13
}
fn default_self_test_pulses() -> u64 {
    10_000
}
fn default_self_test_mu() -> f64 {
    1.0
}
fn default_ratio_bound() -> f64 {
    0.5
}
fn default_efficiency_floor() -> f64 {
    0.01
}
fn default_spread_threshold_ps() -> f64 {
    50.0
}

/// Shared grid/detector block used by the stochastic commands.
pub trait DetectorSetup {
    fn step_ps(&self) -> f64;
    fn n_steps(&self) -> u32;
    fn fwhm_ps(&self) -> f64;
    fn peak_efficiency(&self) -> f64;
    fn dark_count_rate(&self) -> f64;

    fn grid(&self) -> Result<TimingGrid> {
        Ok(TimingGrid::new(
            TimeFs::from_ps(self.step_ps()),
            self.n_steps(),
        )?)
    }

    fn curve(&self, grid: &TimingGrid) -> Result<EfficiencyCurve> {
        Ok(EfficiencyCurve::new(
            TimeFs::ZERO,
            TimeFs::from_ps(self.fwhm_ps()),
            self.peak_efficiency(),
            self.dark_count_rate(),
            grid.cycle_period(),
        )?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateConfig {
    /// Number of attacked calibrations to run.
    pub trials: u64,
    pub seed: Option<u64>,
    #[serde(default = "default_step_ps")]
    pub step_ps: f64,
    #[serde(default = "default_n_steps")]
    pub n_steps: u32,
    #[serde(default = "default_fwhm_ps")]
    pub fwhm_ps: f64,
    #[serde(default = "default_peak")]
    pub peak_efficiency: f64,
    #[serde(default = "default_dark")]
    pub dark_count_rate: f64,
    /// Arrival offsets of Eve's pulse pair.
    #[serde(default = "default_t0_ps")]
    pub t0_ps: f64,
    #[serde(default = "default_t1_ps")]
    pub t1_ps: f64,
    #[serde(default = "default_mu")]
    pub mean_photon_number: f64,
    #[serde(default = "default_pulses_per_step")]
    pub pulses_per_step: u64,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl CalibrateConfig {
    pub fn signal(&self) -> Result<CalibrationSignal> {
        Ok(CalibrationSignal::faked(
            TimeFs::from_ps(self.t0_ps),
            TimeFs::from_ps(self.t1_ps),
            self.mean_photon_number,
            self.pulses_per_step,
        )?)
    }
}

impl DetectorSetup for CalibrateConfig {
    fn step_ps(&self) -> f64 {
        self.step_ps
    }
    fn n_steps(&self) -> u32 {
        self.n_steps
    }
    fn fwhm_ps(&self) -> f64 {
        self.fwhm_ps
    }
    fn peak_efficiency(&self) -> f64 {
        self.peak_efficiency
    }
    fn dark_count_rate(&self) -> f64 {
        self.dark_count_rate
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FsaSweepConfig {
    /// Mismatch-ratio grid, each value in (0, 1].
    pub eta: Vec<f64>,
    /// Observed-QBER grid for the key-rate columns.
    #[serde(default)]
    pub e_b: Vec<f64>,
    /// Attacked-fraction grid for the partial-attack columns.
    #[serde(default)]
    pub r: Vec<f64>,
    #[serde(default = "default_qber_cap")]
    pub qber_cap: f64,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyrateConfig {
    /// Mismatch-ratio grid, each value in (0, 1].
    pub eta: Vec<f64>,
    /// Explicit QBER grid; when empty, `e_b_points` equally spaced points
    /// over each eta's feasible range are used.
    #[serde(default)]
    pub e_b: Vec<f64>,
    #[serde(default = "default_e_b_points")]
    pub e_b_points: u32,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackName {
    None,
    Fsa,
    PartialFsa,
    TsaProbe,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionCmdConfig {
    pub n_pulses: u64,
    pub attack: AttackName,
    /// Attacked fraction; required for `partial-fsa`.
    pub attack_fraction: Option<f64>,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Mismatch ratio of the induced BEM.
    pub eta: f64,
    #[serde(default)]
    pub include_dark_counts: bool,
    #[serde(default = "default_dark")]
    pub dark_count_rate: f64,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl SessionCmdConfig {
    pub fn attack_kind(&self) -> Result<bemsim_core::AttackKind> {
        Ok(match self.attack {
            AttackName::None => bemsim_core::AttackKind::None,
            AttackName::Fsa => bemsim_core::AttackKind::Fsa,
            AttackName::TsaProbe => bemsim_core::AttackKind::TsaProbe,
            AttackName::PartialFsa => {
                let Some(fraction) = self.attack_fraction else {
                    bail!("attack = \"partial-fsa\" requires attack_fraction");
                };
                bemsim_core::AttackKind::PartialFsa { fraction }
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelfTestCmdConfig {
    /// Calibrated activation timings per detector.
    #[serde(default = "default_t0_ps")]
    pub t_h_ps: f64,
    #[serde(default = "default_t0_ps")]
    pub t_v_ps: f64,
    #[serde(default = "default_t1_ps")]
    pub t_p_ps: f64,
    #[serde(default = "default_t1_ps")]
    pub t_m_ps: f64,
    /// Probe timings; defaults to the distinct detector timings.
    #[serde(default)]
    pub probe_timings_ps: Vec<f64>,
    #[serde(default = "default_self_test_pulses")]
    pub pulses_per_timing: u64,
    #[serde(default = "default_self_test_mu")]
    pub mean_photon_number: f64,
    #[serde(default = "default_ratio_bound")]
    pub ratio_bound: f64,
    #[serde(default = "default_efficiency_floor")]
    pub efficiency_floor: f64,
    /// Timing-spread alarm threshold.
    #[serde(default = "default_spread_threshold_ps")]
    pub spread_threshold_ps: f64,
    #[serde(default = "default_step_ps")]
    pub step_ps: f64,
    #[serde(default = "default_n_steps")]
    pub n_steps: u32,
    #[serde(default = "default_fwhm_ps")]
    pub fwhm_ps: f64,
    #[serde(default = "default_peak")]
    pub peak_efficiency: f64,
    #[serde(default = "default_dark")]
    pub dark_count_rate: f64,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl SelfTestCmdConfig {
    pub fn timings(&self) -> [TimeFs; 4] {
        [
            TimeFs::from_ps(self.t_h_ps),
            TimeFs::from_ps(self.t_v_ps),
            TimeFs::from_ps(self.t_p_ps),
            TimeFs::from_ps(self.t_m_ps),
        ]
    }

    pub fn probe_timings(&self) -> Vec<TimeFs> {
        if self.probe_timings_ps.is_empty() {
            let mut distinct: Vec<TimeFs> = Vec::new();
            for t in self.timings() {
                if !distinct.contains(&t) {
                    distinct.push(t);
                }
            }
            distinct
        } else {
            self.probe_timings_ps
                .iter()
                .map(|&p| TimeFs::from_ps(p))
                .collect()
        }
    }
}

impl DetectorSetup for SelfTestCmdConfig {
    fn step_ps(&self) -> f64 {
        self.step_ps
    }
    fn n_steps(&self) -> u32 {
        self.n_steps
    }
    fn fwhm_ps(&self) -> f64 {
        self.fwhm_ps
    }
    fn peak_efficiency(&self) -> f64 {
        self.peak_efficiency
    }
    fn dark_count_rate(&self) -> f64 {
        self.dark_count_rate
    }
}
