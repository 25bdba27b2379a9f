//! Shared fixtures for the criterion benchmarks.

use bemsim_core::{
    AttackKind, CalibrationSignal, DetectorBank, EfficiencyCurve, FsaParameters, SessionConfig,
    TimeFs,
};

pub fn standard_bank() -> DetectorBank {
    let curve = EfficiencyCurve::standard(TimeFs::ZERO);
    DetectorBank::uniform(&curve, TimeFs::ZERO)
}

pub fn faked_signal() -> CalibrationSignal {
    CalibrationSignal::faked_default()
}

pub fn full_attack_session(n_pulses: u64) -> SessionConfig {
    let params = FsaParameters::symmetric(0.13, 0.282).unwrap();
    SessionConfig::new(n_pulses, AttackKind::Fsa, params, 7).unwrap()
}
