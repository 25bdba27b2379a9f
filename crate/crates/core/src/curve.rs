//! Gate-efficiency profile of a gated-mode single-photon detector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::{cyclic_distance, TimeFs};

/// Default peak detection efficiency of the InGaAs detectors.
pub const DEFAULT_PEAK_EFFICIENCY: f64 = 0.13;
/// Default dark-count probability per gate.
pub const DEFAULT_DARK_COUNT_RATE: f64 = 4e-6;
/// Default full width at half maximum of the gate response.
pub const DEFAULT_FWHM_PS: f64 = 50.0;

/// Detection efficiency as a function of arrival offset within one gating
/// cycle.
///
/// The profile is a Gaussian centered on the activation timing: unimodal,
/// symmetric, equal to `peak_efficiency / 2` at `center ± fwhm / 2`, and
/// wrapping modulo the gate period. Dark counts are carried alongside but
/// never folded into the curve value; callers add them to click
/// probabilities where appropriate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyCurve {
    center: TimeFs,
    fwhm: TimeFs,
    peak_efficiency: f64,
    dark_count_rate: f64,
    gate_period: TimeFs,
}

impl EfficiencyCurve {
    pub fn new(
        center: TimeFs,
        fwhm: TimeFs,
        peak_efficiency: f64,
        dark_count_rate: f64,
        gate_period: TimeFs,
    ) -> Result<Self> {
        if !gate_period.is_positive() {
            return Err(Error::invalid(format!(
                "gate period must be positive, got {gate_period}"
            )));
        }
        if !fwhm.is_positive() {
            return Err(Error::invalid(format!("FWHM must be positive, got {fwhm}")));
        }
        if !(0.0..=1.0).contains(&peak_efficiency) {
            return Err(Error::OutOfDomain {
                name: "peak_efficiency",
                value: peak_efficiency,
                domain: "[0, 1]",
            });
        }
        if !(0.0..=1.0).contains(&dark_count_rate) {
            return Err(Error::OutOfDomain {
                name: "dark_count_rate",
                value: dark_count_rate,
                domain: "[0, 1]",
            });
        }
        let center = TimeFs::from_fs(center.as_fs().rem_euclid(gate_period.as_fs()));
        Ok(EfficiencyCurve {
            center,
            fwhm,
            peak_efficiency,
            dark_count_rate,
            gate_period,
        })
    }

    /// The experiment's detector: 13% peak, 4e-6 dark rate, 50 ps FWHM,
    /// 800 ps gate period.
    pub fn standard(center: TimeFs) -> Self {
        EfficiencyCurve::new(
            center,
            TimeFs::from_ps(DEFAULT_FWHM_PS),
            DEFAULT_PEAK_EFFICIENCY,
            DEFAULT_DARK_COUNT_RATE,
            TimeFs::from_ps(800.0),
        )
        .expect("standard curve parameters are valid")
    }

    /// Efficiency seen by a pulse arriving at `offset` within the cycle.
    pub fn efficiency_at(&self, offset: TimeFs) -> f64 {
        let d = cyclic_distance(offset, self.center, self.gate_period).as_ps();
        let w = self.fwhm.as_ps();
        self.peak_efficiency * (-4.0 * std::f64::consts::LN_2 * (d / w) * (d / w)).exp()
    }

    /// The same gate shape moved to a new activation timing.
    pub fn with_center(&self, center: TimeFs) -> Self {
        EfficiencyCurve {
            center: TimeFs::from_fs(center.as_fs().rem_euclid(self.gate_period.as_fs())),
            ..*self
        }
    }

    pub fn center(&self) -> TimeFs {
        self.center
    }

    pub fn fwhm(&self) -> TimeFs {
        self.fwhm
    }

    pub fn peak_efficiency(&self) -> f64 {
        self.peak_efficiency
    }

    pub fn dark_count_rate(&self) -> f64 {
        self.dark_count_rate
    }

    pub fn gate_period(&self) -> TimeFs {
        self.gate_period
    }
}
