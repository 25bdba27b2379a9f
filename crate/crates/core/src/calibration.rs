//! Activation-timing calibration, the two-pulse spoofing attack against
//! it, outcome classification and the software countermeasures.
//!
//! During line-length measurement each gated detector scans its activation
//! delay across one cycle and locks onto the delay with the highest count.
//! A legitimate calibration signal carries one pulse per cycle, so every
//! detector locks onto the same arrival. Eve substitutes a signal with two
//! pulses per cycle; each detector then sees two near-identical count
//! peaks and locks onto one of them at random, which with probability 1/8
//! separates the two bases in time.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{Basis, DetectorLabel};
use crate::curve::EfficiencyCurve;
use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::solve::bisect;
use crate::time::{cyclic_distance, TimeFs, TimingGrid};

/// Mean photon number of the faked calibration signal, tuned so the
/// observed count rates match an unattacked calibration.
pub const DEFAULT_MEAN_PHOTON_NUMBER: f64 = 0.7;

/// Pulses sent per scan step: a 5 MHz faked source dwelling one
/// millisecond per delay. Small enough that the two-peak argmax stays
/// genuinely random.
pub const DEFAULT_PULSES_PER_STEP: u64 = 5_000;

/// Default arrival offsets of Eve's pulse pair: 320 ps apart, centered in
/// the 800 ps cycle.
pub const DEFAULT_T0_PS: f64 = 240.0;
pub const DEFAULT_T1_PS: f64 = 560.0;

/// A calibration signal: one pulse per cycle when legitimate, two when
/// faked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSignal {
    pulse_offsets: Vec<TimeFs>,
    /// Relative intensity of each pulse: pulse `i` carries
    /// `mean_photon_number * weights[i]` photons per cycle.
    weights: Vec<f64>,
    mean_photon_number: f64,
    pulses_per_step: u64,
}

impl CalibrationSignal {
    pub fn new(
        pulse_offsets: Vec<TimeFs>,
        weights: Vec<f64>,
        mean_photon_number: f64,
        pulses_per_step: u64,
    ) -> Result<Self> {
        if pulse_offsets.is_empty() || pulse_offsets.len() > 2 {
            return Err(Error::invalid(format!(
                "a calibration signal carries 1 or 2 pulses per cycle, got {}",
                pulse_offsets.len()
            )));
        }
        if pulse_offsets.len() == 2 && pulse_offsets[0] == pulse_offsets[1] {
            return Err(Error::invalid("pulse offsets must be distinct"));
        }
        if weights.len() != pulse_offsets.len() {
            return Err(Error::invalid("one weight per pulse offset required"));
        }
        if weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
            return Err(Error::invalid("pulse weights must be positive and finite"));
        }
        if !mean_photon_number.is_finite() || mean_photon_number < 0.0 {
            return Err(Error::OutOfDomain {
                name: "mean_photon_number",
                value: mean_photon_number,
                domain: "[0, inf)",
            });
        }
        if pulses_per_step == 0 {
            return Err(Error::invalid("pulses_per_step must be at least 1"));
        }
        Ok(CalibrationSignal {
            pulse_offsets,
            weights,
            mean_photon_number,
            pulses_per_step,
        })
    }

    /// A single-pulse signal, as Alice sends it.
    pub fn legitimate(
        offset: TimeFs,
        mean_photon_number: f64,
        pulses_per_step: u64,
    ) -> Result<Self> {
        CalibrationSignal::new(vec![offset], vec![1.0], mean_photon_number, pulses_per_step)
    }

    /// Eve's two-pulse signal with equal pulse intensities.
    pub fn faked(
        t0: TimeFs,
        t1: TimeFs,
        mean_photon_number: f64,
        pulses_per_step: u64,
    ) -> Result<Self> {
        CalibrationSignal::new(
            vec![t0, t1],
            vec![1.0, 1.0],
            mean_photon_number,
            pulses_per_step,
        )
    }

    /// The attack defaults: pulses at 240 ps and 560 ps (320 ps apart),
    /// total mean photon number 0.7, 5000 pulses per scan step.
    pub fn faked_default() -> Self {
        CalibrationSignal::faked(
            TimeFs::from_ps(DEFAULT_T0_PS),
            TimeFs::from_ps(DEFAULT_T1_PS),
            DEFAULT_MEAN_PHOTON_NUMBER,
            DEFAULT_PULSES_PER_STEP,
        )
        .expect("default faked signal is valid")
    }

    pub fn pulse_offsets(&self) -> &[TimeFs] {
        &self.pulse_offsets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.mean_photon_number
    }

    pub fn pulses_per_step(&self) -> u64 {
        self.pulses_per_step
    }

    /// Mean photon number carried by each pulse.
    fn per_pulse_photon_numbers(&self) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| self.mean_photon_number * w)
            .collect()
    }
}

/// One gated detector: its gate profile and calibrated activation timing.
/// The profile's center always equals the activation timing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detector {
    label: DetectorLabel,
    curve: EfficiencyCurve,
    activation_timing: TimeFs,
}

impl Detector {
    pub fn new(label: DetectorLabel, curve: EfficiencyCurve, activation_timing: TimeFs) -> Self {
        Detector {
            label,
            curve: curve.with_center(activation_timing),
            activation_timing,
        }
    }

    pub fn label(&self) -> DetectorLabel {
        self.label
    }

    pub fn curve(&self) -> &EfficiencyCurve {
        &self.curve
    }

    pub fn activation_timing(&self) -> TimeFs {
        self.activation_timing
    }

    /// Detection efficiency for a pulse arriving at `offset`.
    pub fn efficiency_at(&self, offset: TimeFs) -> f64 {
        self.curve.efficiency_at(offset)
    }

    /// The same detector moved to a new activation timing.
    pub fn retimed(&self, timing: TimeFs) -> Detector {
        Detector::new(self.label, self.curve, timing)
    }
}

/// The four polarization detectors with their calibrated timings.
/// Basis Z groups H and V, basis X groups + and -.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorBank {
    detectors: [Detector; 4],
}

impl DetectorBank {
    pub fn new(detectors: [Detector; 4]) -> Result<Self> {
        for (i, label) in DetectorLabel::ALL.iter().enumerate() {
            if detectors[i].label != *label {
                return Err(Error::invalid(format!(
                    "detector {i} must be labeled {label}, got {}",
                    detectors[i].label
                )));
            }
        }
        Ok(DetectorBank { detectors })
    }

    /// Four identical detectors sharing one gate shape and timing.
    pub fn uniform(curve: &EfficiencyCurve, timing: TimeFs) -> Self {
        let make = |label| Detector::new(label, *curve, timing);
        DetectorBank {
            detectors: [
                make(DetectorLabel::H),
                make(DetectorLabel::V),
                make(DetectorLabel::P),
                make(DetectorLabel::M),
            ],
        }
    }

    /// Four identical detectors with per-detector timings, H/V/+/- order.
    pub fn with_timings(curve: &EfficiencyCurve, timings: [TimeFs; 4]) -> Self {
        let mut bank = DetectorBank::uniform(curve, timings[0]);
        for (det, t) in bank.detectors.iter_mut().zip(timings) {
            *det = det.retimed(t);
        }
        bank
    }

    pub fn detector(&self, label: DetectorLabel) -> &Detector {
        &self.detectors[label.index()]
    }

    pub fn detectors(&self) -> &[Detector; 4] {
        &self.detectors
    }

    pub fn timing(&self, label: DetectorLabel) -> TimeFs {
        self.detectors[label.index()].activation_timing
    }

    /// Timings in H/V/+/- order.
    pub fn timings(&self) -> [TimeFs; 4] {
        [
            self.detectors[0].activation_timing,
            self.detectors[1].activation_timing,
            self.detectors[2].activation_timing,
            self.detectors[3].activation_timing,
        ]
    }

    /// Largest pairwise activation-timing difference.
    pub fn max_timing_spread(&self) -> TimeFs {
        let ts = self.timings();
        let min = ts.iter().min().copied().unwrap_or(TimeFs::ZERO);
        let max = ts.iter().max().copied().unwrap_or(TimeFs::ZERO);
        max - min
    }
}

/// Which kind of efficiency mismatch a calibration run produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MismatchOutcome {
    /// All four detectors locked onto the same slot.
    NoMismatch,
    /// The two detectors of one basis disagree; the other basis agrees.
    PartialDem(Basis),
    /// Both bases disagree internally.
    DualDem,
    /// Each basis agrees internally but the bases differ: the attack goal.
    Bem(BemVariant),
}

/// Orientation of a basis-dependent mismatch: which basis took the
/// earlier slot `t0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BemVariant {
    ZEarly,
    XEarly,
}

impl MismatchOutcome {
    /// Theoretical probabilities under fair per-detector slot choices:
    /// (no mismatch, partial, dual, BEM) = (1/8, 1/2, 1/4, 1/8).
    pub fn theoretical_probability(&self) -> f64 {
        match self {
            MismatchOutcome::NoMismatch => 0.125,
            MismatchOutcome::PartialDem(_) => 0.25, // per basis; 1/2 combined
            MismatchOutcome::DualDem => 0.25,
            MismatchOutcome::Bem(_) => 0.0625, // per variant; 1/8 combined
        }
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            MismatchOutcome::NoMismatch => "no_mismatch",
            MismatchOutcome::PartialDem(_) => "partial_dem",
            MismatchOutcome::DualDem => "dual_dem",
            MismatchOutcome::Bem(_) => "bem",
        }
    }
}

/// Simulates one activation-timing scan and returns the winning delay.
///
/// For each grid candidate the detector counts clicks over
/// `pulses_per_step` cycles; per cycle the click probability is
/// `1 - exp(-sum_i mu_i eta_i) + dark`, with `eta_i` the gate response at
/// pulse offset `i` when the gate sits at the candidate delay. Counts are
/// drawn binomially; the candidate with the highest count wins and exact
/// ties break uniformly at random.
pub fn scan_detector(
    curve: &EfficiencyCurve,
    signal: &CalibrationSignal,
    grid: &TimingGrid,
    rng: &mut RandomSource,
) -> Result<TimeFs> {
    if curve.gate_period() != grid.cycle_period() {
        return Err(Error::invalid(format!(
            "curve gate period {} does not match the grid cycle {}",
            curve.gate_period(),
            grid.cycle_period()
        )));
    }
    let cycle = grid.cycle_period();
    for &offset in signal.pulse_offsets() {
        if offset.as_fs() < 0 || offset.as_fs() >= cycle.as_fs() {
            return Err(Error::invalid(format!(
                "pulse offset {offset} lies outside the cycle [0, {cycle})"
            )));
        }
    }

    let mus = signal.per_pulse_photon_numbers();
    let mut best_count = 0u64;
    let mut best: Vec<TimeFs> = Vec::new();
    for candidate in grid.candidates() {
        let gate = curve.with_center(candidate);
        let exposure: f64 = signal
            .pulse_offsets()
            .iter()
            .zip(&mus)
            .map(|(&offset, &mu)| mu * gate.efficiency_at(offset))
            .sum();
        let p_click = (1.0 - (-exposure).exp() + curve.dark_count_rate()).clamp(0.0, 1.0);
        let count = Binomial::new(signal.pulses_per_step(), p_click)
            .expect("click probability is in [0, 1]")
            .sample(rng);
        if count > best_count || best.is_empty() {
            best_count = count;
            best.clear();
            best.push(candidate);
        } else if count == best_count {
            best.push(candidate);
        }
    }
    let pick = if best.len() == 1 {
        0
    } else {
        rng.random_range(0..best.len())
    };
    Ok(best[pick])
}

/// Calibrates all four detectors against `signal`, each with an
/// independent scan, and returns the recalibrated bank. The input bank is
/// left untouched.
pub fn run_calibration(
    bank: &DetectorBank,
    signal: &CalibrationSignal,
    grid: &TimingGrid,
    rng: &mut RandomSource,
) -> Result<DetectorBank> {
    let mut detectors = *bank.detectors();
    for det in detectors.iter_mut() {
        let timing = scan_detector(det.curve(), signal, grid, rng)?;
        *det = det.retimed(timing);
    }
    Ok(DetectorBank { detectors })
}

/// Replaces each detector's timing by the nearer of the two injected
/// arrivals, reversing the grid quantization of the scan.
pub fn snap_to_peaks(bank: &DetectorBank, t0: TimeFs, t1: TimeFs) -> DetectorBank {
    let mut detectors = *bank.detectors();
    for det in detectors.iter_mut() {
        let cycle = det.curve().gate_period();
        let d0 = cyclic_distance(det.activation_timing(), t0, cycle);
        let d1 = cyclic_distance(det.activation_timing(), t1, cycle);
        *det = det.retimed(if d0 <= d1 { t0 } else { t1 });
    }
    DetectorBank { detectors }
}

/// Classifies a post-calibration bank whose timings all equal `t0` or
/// `t1`. `t0` is taken as the earlier slot for naming the BEM variant.
pub fn classify_outcome(bank: &DetectorBank, t0: TimeFs, t1: TimeFs) -> Result<MismatchOutcome> {
    if t0 == t1 {
        return Err(Error::invalid("the two slots must be distinct"));
    }
    for det in bank.detectors() {
        let t = det.activation_timing();
        if t != t0 && t != t1 {
            return Err(Error::invalid(format!(
                "detector {} sits at {} which is neither {} nor {}",
                det.label(),
                t,
                t0,
                t1
            )));
        }
    }
    let [h, v, p, m] = bank.timings();
    let z_equal = h == v;
    let x_equal = p == m;
    Ok(match (z_equal, x_equal) {
        (true, true) if h == p => MismatchOutcome::NoMismatch,
        (true, true) => MismatchOutcome::Bem(if h == t0 {
            BemVariant::ZEarly
        } else {
            BemVariant::XEarly
        }),
        (false, false) => MismatchOutcome::DualDem,
        (false, true) => MismatchOutcome::PartialDem(Basis::Z),
        (true, false) => MismatchOutcome::PartialDem(Basis::X),
    })
}

/// True when the largest pairwise activation-timing difference exceeds
/// `threshold`: the cheap software alarm against calibration spoofing.
pub fn monitor_timing_spread(bank: &DetectorBank, threshold: TimeFs) -> bool {
    debug_assert!(threshold.is_positive());
    bank.max_timing_spread() > threshold
}

/// One calibration trial of an attack campaign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationTrial {
    pub index: u64,
    /// Raw scan results in H/V/+/- order (grid points).
    pub timings: [TimeFs; 4],
    pub outcome: MismatchOutcome,
}

/// Runs `trials` independent attacked calibrations, each on its own
/// random stream, and classifies every outcome against the signal's two
/// pulse offsets. Trials execute in parallel; results are ordered by
/// trial index, so the output is independent of thread scheduling.
pub fn run_campaign(
    bank: &DetectorBank,
    signal: &CalibrationSignal,
    grid: &TimingGrid,
    seed: u64,
    trials: u64,
) -> Result<Vec<CalibrationTrial>> {
    let offsets = signal.pulse_offsets();
    if offsets.len() != 2 {
        return Err(Error::invalid(
            "an attack campaign needs a two-pulse faked signal",
        ));
    }
    let (t0, t1) = (offsets[0].min(offsets[1]), offsets[0].max(offsets[1]));
    (0..trials)
        .into_par_iter()
        .map(|index| {
            let mut rng = RandomSource::stream(seed, index);
            let scanned = run_calibration(bank, signal, grid, &mut rng)?;
            let snapped = snap_to_peaks(&scanned, t0, t1);
            let outcome = classify_outcome(&snapped, t0, t1)?;
            Ok(CalibrationTrial {
                index,
                timings: scanned.timings(),
                outcome,
            })
        })
        .collect()
}

/// Aggregated outcome counts of a calibration campaign.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OutcomeTally {
    pub trials: u64,
    pub no_mismatch: u64,
    pub partial_dem_z: u64,
    pub partial_dem_x: u64,
    pub dual_dem: u64,
    pub bem_z_early: u64,
    pub bem_x_early: u64,
}

impl OutcomeTally {
    pub fn from_trials(trials: &[CalibrationTrial]) -> Self {
        let mut tally = OutcomeTally::default();
        for trial in trials {
            tally.record(trial.outcome);
        }
        tally
    }

    pub fn record(&mut self, outcome: MismatchOutcome) {
        self.trials += 1;
        match outcome {
            MismatchOutcome::NoMismatch => self.no_mismatch += 1,
            MismatchOutcome::PartialDem(Basis::Z) => self.partial_dem_z += 1,
            MismatchOutcome::PartialDem(Basis::X) => self.partial_dem_x += 1,
            MismatchOutcome::DualDem => self.dual_dem += 1,
            MismatchOutcome::Bem(BemVariant::ZEarly) => self.bem_z_early += 1,
            MismatchOutcome::Bem(BemVariant::XEarly) => self.bem_x_early += 1,
        }
    }

    pub fn partial_dem(&self) -> u64 {
        self.partial_dem_z + self.partial_dem_x
    }

    pub fn bem(&self) -> u64 {
        self.bem_z_early + self.bem_x_early
    }

    /// Observed counts over the four classes next to their fair-coin
    /// expectations (1/8, 1/2, 1/4, 1/8).
    pub fn class_counts(&self) -> [(&'static str, u64, f64); 4] {
        [
            ("no_mismatch", self.no_mismatch, 0.125),
            ("partial_dem", self.partial_dem(), 0.5),
            ("dual_dem", self.dual_dem, 0.25),
            ("bem", self.bem(), 0.125),
        ]
    }

    /// Pearson chi-square statistic of the four-class counts against the
    /// theoretical probabilities (3 degrees of freedom).
    pub fn chi_square_statistic(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.class_counts()
            .iter()
            .map(|&(_, observed, p)| {
                let expected = self.trials as f64 * p;
                let d = observed as f64 - expected;
                d * d / expected
            })
            .sum()
    }
}

/// Self-test tuning knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfTestConfig {
    /// Test pulses fired at each probe timing.
    pub pulses_per_timing: u64,
    /// Mean photon number of the attenuated test laser.
    pub mean_photon_number: f64,
    /// Mismatch alarm fires when a min/max efficiency ratio drops below
    /// this bound.
    pub ratio_bound: f64,
    /// Efficiency estimates below this floor are treated as dark noise
    /// and excluded from ratio checks.
    pub efficiency_floor: f64,
}

impl Default for SelfTestConfig {
    fn default() -> Self {
        SelfTestConfig {
            pulses_per_timing: 10_000,
            mean_photon_number: 1.0,
            ratio_bound: 0.5,
            efficiency_floor: 0.01,
        }
    }
}

/// Efficiency estimates recovered at one probe timing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeEstimate {
    pub timing: TimeFs,
    /// Per-detector estimates in H/V/+/- order.
    pub eta: [f64; 4],
    pub eta_z: f64,
    pub eta_x: f64,
}

/// Outcome of the post-calibration self-test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub probes: Vec<ProbeEstimate>,
    /// Cross-basis efficiency imbalance detected.
    pub bem_flag: bool,
    /// Within-basis imbalance detected.
    pub dem_flag: bool,
}

impl SelfTestReport {
    pub fn clean(&self) -> bool {
        !self.bem_flag && !self.dem_flag
    }
}

/// Fires attenuated test pulses at each probe timing through the passive
/// receiver (each detector sees a quarter of the light) and estimates
/// every detector's efficiency from its click rate. Flags BEM when the
/// two bases disagree at some probe timing, DEM when the two detectors of
/// one basis disagree.
pub fn self_test(
    bank: &DetectorBank,
    probe_timings: &[TimeFs],
    config: &SelfTestConfig,
    rng: &mut RandomSource,
) -> Result<SelfTestReport> {
    if probe_timings.is_empty() {
        return Err(Error::invalid("at least one probe timing required"));
    }
    if config.pulses_per_timing == 0 {
        return Err(Error::invalid("pulses_per_timing must be at least 1"));
    }

    let mu_per_detector = config.mean_photon_number / 4.0;
    let mut probes = Vec::with_capacity(probe_timings.len());
    let mut bem_flag = false;
    let mut dem_flag = false;

    for &timing in probe_timings {
        let mut eta = [0.0f64; 4];
        for det in bank.detectors() {
            let dark = det.curve().dark_count_rate();
            let p_click =
                (1.0 - (-mu_per_detector * det.efficiency_at(timing)).exp() + dark).clamp(0.0, 1.0);
            let clicks = Binomial::new(config.pulses_per_timing, p_click)
                .expect("click probability is in [0, 1]")
                .sample(rng);
            let rate = clicks as f64 / config.pulses_per_timing as f64;
            let net = (rate - dark).clamp(0.0, 1.0 - f64::EPSILON);
            eta[det.label().index()] = -(-net).ln_1p() / mu_per_detector;
        }
        let eta_z = 0.5 * (eta[0] + eta[1]);
        let eta_x = 0.5 * (eta[2] + eta[3]);
        bem_flag |= ratio_below(eta_z, eta_x, config);
        dem_flag |= ratio_below(eta[0], eta[1], config) || ratio_below(eta[2], eta[3], config);
        probes.push(ProbeEstimate {
            timing,
            eta,
            eta_z,
            eta_x,
        });
    }

    Ok(SelfTestReport {
        probes,
        bem_flag,
        dem_flag,
    })
}

fn ratio_below(a: f64, b: f64, config: &SelfTestConfig) -> bool {
    let max = a.max(b);
    if max < config.efficiency_floor {
        // both channels dark: no evidence either way
        return false;
    }
    a.min(b) / max < config.ratio_bound
}

/// Mean photon number Eve must send so the spoofed scan's peak count rate
/// matches `target_rate`, given the summed gate efficiency at a peak.
/// Solves `1 - exp(-mu * eta) = target_rate` by bisection.
pub fn compensated_mean_photon_number(target_rate: f64, peak_efficiency_sum: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&target_rate) {
        return Err(Error::OutOfDomain {
            name: "target_rate",
            value: target_rate,
            domain: "[0, 1)",
        });
    }
    if peak_efficiency_sum <= 0.0 {
        return Err(Error::invalid("peak efficiency sum must be positive"));
    }
    if target_rate == 0.0 {
        return Ok(0.0);
    }
    let hi = 2.0 * (-(1.0 - target_rate).ln()) / peak_efficiency_sum + 1.0;
    bisect(
        |mu| 1.0 - (-mu * peak_efficiency_sum).exp() - target_rate,
        0.0,
        hi,
        1e-12,
        "photon-number compensation",
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard_bank(timing_ps: f64) -> DetectorBank {
        let curve = EfficiencyCurve::standard(TimeFs::from_ps(timing_ps));
        DetectorBank::uniform(&curve, TimeFs::from_ps(timing_ps))
    }

    fn bem_bank() -> DetectorBank {
        let curve = EfficiencyCurve::standard(TimeFs::ZERO);
        DetectorBank::with_timings(
            &curve,
            [
                TimeFs::from_ps(240.0),
                TimeFs::from_ps(240.0),
                TimeFs::from_ps(560.0),
                TimeFs::from_ps(560.0),
            ],
        )
    }

    fn dual_dem_bank() -> DetectorBank {
        let curve = EfficiencyCurve::standard(TimeFs::ZERO);
        DetectorBank::with_timings(
            &curve,
            [
                TimeFs::from_ps(240.0),
                TimeFs::from_ps(560.0),
                TimeFs::from_ps(240.0),
                TimeFs::from_ps(560.0),
            ],
        )
    }

    #[test]
    fn signal_validation() {
        assert!(CalibrationSignal::legitimate(TimeFs::from_ps(400.0), 0.7, 100).is_ok());
        assert!(CalibrationSignal::new(vec![], vec![], 0.7, 100).is_err());
        let t = TimeFs::from_ps(100.0);
        assert!(CalibrationSignal::new(vec![t, t], vec![1.0, 1.0], 0.7, 100).is_err());
        assert!(CalibrationSignal::faked(t, TimeFs::from_ps(420.0), -0.1, 100).is_err());
        assert!(CalibrationSignal::faked(t, TimeFs::from_ps(420.0), 0.7, 0).is_err());
    }

    #[test]
    fn scan_locks_onto_a_single_pulse() {
        let grid = TimingGrid::default();
        let curve = EfficiencyCurve::standard(TimeFs::ZERO);
        // effectively noiseless: a million pulses per step
        let signal = CalibrationSignal::legitimate(TimeFs::from_ps(400.0), 0.7, 1_000_000).unwrap();
        let mut rng = RandomSource::new(11);
        for _ in 0..20 {
            let t = scan_detector(&curve, &signal, &grid, &mut rng).unwrap();
            assert_eq!(t, TimeFs::from_ps(400.0));
        }
    }

    #[test]
    fn scan_result_is_on_the_grid_and_near_the_pulse() {
        let grid = TimingGrid::default();
        let curve = EfficiencyCurve::standard(TimeFs::ZERO);
        let signal = CalibrationSignal::legitimate(TimeFs::from_ps(400.0), 0.7, 100_000).unwrap();
        let mut near = 0;
        let n = 200;
        for i in 0..n {
            let mut rng = RandomSource::stream(5, i);
            let t = scan_detector(&curve, &signal, &grid, &mut rng).unwrap();
            assert!(grid.contains(t));
            if t.abs_diff(TimeFs::from_ps(400.0)) <= grid.step() {
                near += 1;
            }
        }
        assert!(
            near * 100 >= n * 99,
            "only {near}/{n} scans landed near the pulse"
        );
    }

    #[test]
    fn two_pulse_scan_picks_either_peak_evenly() {
        let grid = TimingGrid::default();
        let curve = EfficiencyCurve::standard(TimeFs::ZERO);
        let signal = CalibrationSignal::faked_default();
        let t0 = TimeFs::from_ps(DEFAULT_T0_PS);
        let t1 = TimeFs::from_ps(DEFAULT_T1_PS);
        let cycle = grid.cycle_period();

        let mut first = 0u32;
        let n = 1000;
        for i in 0..n {
            let mut rng = RandomSource::stream(21, i as u64);
            let t = scan_detector(&curve, &signal, &grid, &mut rng).unwrap();
            if cyclic_distance(t, t0, cycle) < cyclic_distance(t, t1, cycle) {
                first += 1;
            }
        }
        let freq = first as f64 / n as f64;
        assert!(
            (freq - 0.5).abs() <= 0.05,
            "peak frequency {freq} is not fair"
        );
    }

    #[test]
    fn two_pulse_scan_favors_the_stronger_pulse() {
        let grid = TimingGrid::default();
        let curve = EfficiencyCurve::standard(TimeFs::ZERO);
        let t0 = TimeFs::from_ps(DEFAULT_T0_PS);
        let t1 = TimeFs::from_ps(DEFAULT_T1_PS);
        // first pulse carries twice the second's photon number
        let signal = CalibrationSignal::new(
            vec![t0, t1],
            vec![1.0, 0.5],
            DEFAULT_MEAN_PHOTON_NUMBER,
            DEFAULT_PULSES_PER_STEP,
        )
        .unwrap();
        let cycle = grid.cycle_period();

        let mut strong = 0u32;
        let n = 10_000;
        for i in 0..n {
            let mut rng = RandomSource::stream(33, i as u64);
            let t = scan_detector(&curve, &signal, &grid, &mut rng).unwrap();
            if cyclic_distance(t, t0, cycle) < cyclic_distance(t, t1, cycle) {
                strong += 1;
            }
        }
        let freq = strong as f64 / n as f64;
        assert!(freq > 0.9, "stronger pulse chosen only {freq} of the time");
    }

    #[test]
    fn legitimate_calibration_aligns_all_detectors() {
        let grid = TimingGrid::default();
        let bank = standard_bank(0.0);
        let signal = CalibrationSignal::legitimate(TimeFs::from_ps(400.0), 0.7, 1_000_000).unwrap();
        let mut rng = RandomSource::new(3);
        let calibrated = run_calibration(&bank, &signal, &grid, &mut rng).unwrap();
        for t in calibrated.timings() {
            assert_eq!(t, TimeFs::from_ps(400.0));
        }
        // input untouched
        assert_eq!(bank.timing(DetectorLabel::H), TimeFs::ZERO);
    }

    #[test]
    fn classify_all_sixteen_assignments() {
        let t0 = TimeFs::from_ps(240.0);
        let t1 = TimeFs::from_ps(560.0);
        let curve = EfficiencyCurve::standard(TimeFs::ZERO);
        let mut class_counts = std::collections::HashMap::new();
        for mask in 0u8..16 {
            let pick = |b: u8| if mask & (1 << b) == 0 { t0 } else { t1 };
            let bank = DetectorBank::with_timings(&curve, [pick(0), pick(1), pick(2), pick(3)]);
            let outcome = classify_outcome(&bank, t0, t1).unwrap();
            *class_counts.entry(outcome.class_name()).or_insert(0u32) += 1;
        }
        assert_eq!(class_counts["no_mismatch"], 2);
        assert_eq!(class_counts["partial_dem"], 8);
        assert_eq!(class_counts["dual_dem"], 4);
        assert_eq!(class_counts["bem"], 2);
    }

    #[test]
    fn classify_examples() {
        let t0 = TimeFs::from_ps(240.0);
        let t1 = TimeFs::from_ps(560.0);
        let curve = EfficiencyCurve::standard(TimeFs::ZERO);

        let bem = DetectorBank::with_timings(&curve, [t0, t0, t1, t1]);
        assert_eq!(
            classify_outcome(&bem, t0, t1).unwrap(),
            MismatchOutcome::Bem(BemVariant::ZEarly)
        );

        let none = DetectorBank::with_timings(&curve, [t0, t0, t0, t0]);
        assert_eq!(
            classify_outcome(&none, t0, t1).unwrap(),
            MismatchOutcome::NoMismatch
        );

        let dual = DetectorBank::with_timings(&curve, [t0, t1, t0, t1]);
        assert_eq!(
            classify_outcome(&dual, t0, t1).unwrap(),
            MismatchOutcome::DualDem
        );

        let stray = DetectorBank::with_timings(&curve, [t0, t0, t0, TimeFs::from_ps(100.0)]);
        assert!(classify_outcome(&stray, t0, t1).is_err());
    }

    #[test]
    fn monitor_examples() {
        let threshold = TimeFs::from_ps(50.0);
        assert!(!monitor_timing_spread(&standard_bank(400.0), threshold));
        assert!(monitor_timing_spread(&bem_bank(), threshold));

        let curve = EfficiencyCurve::standard(TimeFs::ZERO);
        let narrow = DetectorBank::with_timings(
            &curve,
            [
                TimeFs::from_ps(400.0),
                TimeFs::from_ps(440.0),
                TimeFs::from_ps(400.0),
                TimeFs::from_ps(400.0),
            ],
        );
        assert!(!monitor_timing_spread(&narrow, threshold));
    }

    #[test]
    fn campaign_of_320_trials_hits_the_binomial_band() {
        let grid = TimingGrid::default();
        let bank = standard_bank(0.0);
        let signal = CalibrationSignal::faked_default();
        let trials = run_campaign(&bank, &signal, &grid, 2024, 320).unwrap();
        let tally = OutcomeTally::from_trials(&trials);
        assert_eq!(tally.trials, 320);
        // central 99% band of Binomial(320, 1/16) around the ideal 20
        assert!(
            (9..=33).contains(&tally.bem_z_early),
            "Bem(ZEarly) count {} outside [9, 33]",
            tally.bem_z_early
        );
    }

    #[test]
    fn self_test_clean_on_unattacked_bank() {
        let bank = standard_bank(400.0);
        let mut rng = RandomSource::new(17);
        let report = self_test(
            &bank,
            &[TimeFs::from_ps(400.0)],
            &SelfTestConfig::default(),
            &mut rng,
        )
        .unwrap();
        assert!(report.clean());
        let probe = &report.probes[0];
        let ratio = probe.eta_z / probe.eta_x;
        assert!(
            (ratio - 1.0).abs() < 0.3,
            "basis ratio {ratio} too far from 1"
        );
    }

    #[test]
    fn self_test_flags_bem() {
        let bank = bem_bank();
        let mut rng = RandomSource::new(18);
        let report = self_test(
            &bank,
            &[TimeFs::from_ps(240.0), TimeFs::from_ps(560.0)],
            &SelfTestConfig::default(),
            &mut rng,
        )
        .unwrap();
        assert!(report.bem_flag);
        // at t0 the X basis is dark
        let at_t0 = &report.probes[0];
        assert!(at_t0.eta_x / at_t0.eta_z < 0.01);
    }

    #[test]
    fn self_test_flags_dem() {
        let bank = dual_dem_bank();
        let mut rng = RandomSource::new(19);
        let report = self_test(
            &bank,
            &[TimeFs::from_ps(240.0), TimeFs::from_ps(560.0)],
            &SelfTestConfig::default(),
            &mut rng,
        )
        .unwrap();
        assert!(report.dem_flag);
        assert!(!report.bem_flag, "dual DEM keeps the basis sums balanced");
    }

    #[test]
    fn photon_number_compensation_matches_closed_form() {
        let target = 0.06;
        let eta_sum = 0.13;
        let mu = compensated_mean_photon_number(target, eta_sum).unwrap();
        let closed = -(1.0f64 - target).ln() / eta_sum;
        assert!((mu - closed).abs() < 1e-9);
        assert!((1.0 - (-mu * eta_sum).exp() - target).abs() < 1e-12);
        assert_eq!(compensated_mean_photon_number(0.0, 0.13).unwrap(), 0.0);
        assert!(compensated_mean_photon_number(1.0, 0.13).is_err());
    }
}
