//! Desk-scale models of a man-in-the-middle attack on the
//! detector-calibration step of passive-basis-choice BB84.
//!
//! A spoofed two-pulse calibration signal makes each gated detector lock
//! onto one of two timing slots at random. When the two bases end up in
//! different slots the receiver suffers a basis-dependent efficiency
//! mismatch, which an intercept-resend attacker can exploit by timing her
//! faked states. This crate simulates the calibration scan and the attack
//! campaign ([`calibration`]), the key-distribution sessions and timing
//! probe ([`session`]), and carries the analytic count/error/key-rate
//! formulas ([`fsa`], [`security`]) with the shared numeric foundations
//! ([`entropy`], [`curve`], [`time`], [`rng`]).
//!
//! ```
//! use bemsim_core::{fsa_qber, run_session, AttackKind, FsaParameters, SessionConfig};
//!
//! // at eta = 0.282 the full attack sits on the 11% QBER bound
//! let params = FsaParameters::symmetric(0.13, 0.282)?;
//! assert!((fsa_qber(0.282)? - 0.110).abs() < 1e-3);
//!
//! let config = SessionConfig::new(200_000, AttackKind::Fsa, params, 42)?;
//! let stats = run_session(&config)?;
//! let qber = stats.qber.unwrap();
//! assert!((qber.value - 0.110).abs() < 4.0 * qber.std_error);
//! # Ok::<(), bemsim_core::Error>(())
//! ```

pub mod basis;
pub mod calibration;
pub mod curve;
pub mod entropy;
pub mod error;
pub mod fsa;
pub mod rng;
pub mod security;
pub mod session;
pub mod solve;
pub mod time;

pub use basis::{Arrival, Basis, DetectorLabel, Timing};
pub use calibration::{
    classify_outcome, monitor_timing_spread, run_calibration, run_campaign, scan_detector,
    self_test, snap_to_peaks, BemVariant, CalibrationSignal, CalibrationTrial, Detector,
    DetectorBank, MismatchOutcome, OutcomeTally, SelfTestConfig, SelfTestReport,
};
pub use curve::EfficiencyCurve;
pub use entropy::binary_entropy;
pub use error::{Error, Result};
pub use fsa::{
    build_fsa_table, fsa_count_rate, fsa_error_rate, fsa_qber, max_attack_fraction,
    partial_fsa_key_rate, partial_fsa_qber, FsaParameters, FsaTable,
};
pub use rng::RandomSource;
pub use security::{
    bem_secure_key_rate, gllp_key_rate, max_feasible_qber, qber_threshold, split_equivalent_model,
    EquivalentModelSplit, KeyRatePoint,
};
pub use session::{
    estimate_detection_rate_drop, expected_detection_rate, expected_qber, run_session, tsa_probe,
    tsa_probe_with, AttackKind, SessionConfig, SessionStats, TimingInference, TimingVerdict,
    TsaProbeOptions,
};
pub use time::{cyclic_distance, TimeFs, TimingGrid};
