//! Secure-key-rate analysis for receivers with basis-dependent efficiency
//! mismatch.
//!
//! A mismatched receiver is decomposed into three parts behind a virtual
//! splitter: Part I with complete mismatch (Z always detected, X never),
//! Part II with none (both bases at unit efficiency) and Part III
//! measuring vacuum. Keeping the observable count rates fixed pins the
//! branch probabilities, and the individual-attack key rate follows by
//! granting Eve every Part-I click. The same number falls out of the
//! tagged-fraction key formula with `delta = (1 - eta) / (1 + eta)`, which
//! this module exposes as a cross-check.

use serde::{Deserialize, Serialize};

use crate::entropy::binary_entropy;
use crate::error::{Error, Result};
use crate::solve::bisect;

/// Branch probabilities of the three-part equivalent receiver at one
/// arrival slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalentModelSplit {
    /// Probability of entering the complete-mismatch part.
    pub c1: f64,
    /// Probability of entering the no-mismatch part.
    pub c2: f64,
    /// Probability of entering the vacuum part.
    pub c3: f64,
    /// Probability that a click landed in Part I: `(1 - eta) / (1 + eta)`.
    pub part1_click_probability: f64,
}

impl EquivalentModelSplit {
    /// Fixed part efficiencies: Part I detects Z only, Part II both.
    pub const ETA_Z_PART_I: f64 = 1.0;
    pub const ETA_X_PART_I: f64 = 0.0;
    pub const ETA_Z_PART_II: f64 = 1.0;
    pub const ETA_X_PART_II: f64 = 1.0;
}

/// A sampled point of the key-rate surface, as written by the sweep
/// commands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRatePoint {
    pub eta: f64,
    pub e_b: f64,
    pub rate: f64,
}

/// Splits the slot-`t0` receiver (`eta_Z(t0) >= eta_X(t0)`, Z favored;
/// relabel bases first for the mirrored orientation) into the three
/// equivalent parts.
///
/// Matching count rates gives `c1 = eta_Z(t0) - eta_X(t0)` and
/// `c2 = eta_X(t0)`; among clicks, Part I receives
/// `c1 / (c1 + 2 c2) = (1 - eta) / (1 + eta)`.
pub fn split_equivalent_model(eta_z_t0: f64, eta_x_t0: f64) -> Result<EquivalentModelSplit> {
    for (name, value) in [("eta_z_t0", eta_z_t0), ("eta_x_t0", eta_x_t0)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfDomain {
                name,
                value,
                domain: "[0, 1]",
            });
        }
    }
    if eta_x_t0 > eta_z_t0 {
        return Err(Error::invalid(format!(
            "eta_X(t0) = {eta_x_t0} exceeds eta_Z(t0) = {eta_z_t0}; relabel bases first"
        )));
    }
    if eta_z_t0 + eta_x_t0 == 0.0 {
        return Err(Error::invalid(
            "both efficiencies vanish; the click split is undefined",
        ));
    }
    let c1 = eta_z_t0 - eta_x_t0;
    let c2 = eta_x_t0;
    let eta = eta_x_t0 / eta_z_t0;
    Ok(EquivalentModelSplit {
        c1,
        c2,
        c3: 1.0 - c1 - c2,
        part1_click_probability: (1.0 - eta) / (1.0 + eta),
    })
}

/// Largest QBER for which the key-rate formula is defined:
/// `2 eta / (1 + eta)`.
pub fn max_feasible_qber(eta: f64) -> f64 {
    2.0 * eta / (1.0 + eta)
}

/// Individual-attack secure key rate of a receiver with mismatch ratio
/// `eta` observing QBER `e_b`:
///
/// `R = (2 eta / (1 + eta)) [1 - h(e_b (1 + eta) / (2 eta))] - h(e_b)`
///
/// Negative rates are returned as-is so threshold solvers stay
/// well-defined; clamp when reporting.
pub fn bem_secure_key_rate(eta: f64, e_b: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::OutOfDomain {
            name: "eta",
            value: eta,
            domain: "(0, 1]",
        });
    }
    if e_b < 0.0 {
        return Err(Error::OutOfDomain {
            name: "e_b",
            value: e_b,
            domain: "[0, 2 eta / (1 + eta)]",
        });
    }
    let scale = 2.0 * eta / (1.0 + eta);
    let inner = e_b / scale;
    if inner > 1.0 {
        return Err(Error::OutOfDomain {
            name: "e_b (1 + eta) / (2 eta)",
            value: inner,
            domain: "[0, 1]",
        });
    }
    Ok(scale * (1.0 - binary_entropy(inner)?) - binary_entropy(e_b)?)
}

/// Tagged-fraction key rate with a fraction `delta` of detections whose
/// basis Eve controls:
///
/// `R = 1 - delta - h(e_b) - (1 - delta) h(e_b / (1 - delta))`
pub fn gllp_key_rate(delta: f64, e_b: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::OutOfDomain {
            name: "delta",
            value: delta,
            domain: "[0, 1)",
        });
    }
    if e_b < 0.0 {
        return Err(Error::OutOfDomain {
            name: "e_b",
            value: e_b,
            domain: "[0, 1 - delta]",
        });
    }
    let inner = e_b / (1.0 - delta);
    if inner > 1.0 {
        return Err(Error::OutOfDomain {
            name: "e_b / (1 - delta)",
            value: inner,
            domain: "[0, 1]",
        });
    }
    Ok(1.0 - delta - binary_entropy(e_b)? - (1.0 - delta) * binary_entropy(inner)?)
}

/// QBER at which the key rate crosses zero for the given mismatch ratio.
///
/// The rate starts at `2 eta / (1 + eta) > 0` at `e_b = 0` and is strictly
/// decreasing up to half the feasible range, so the root is bracketed and
/// unique there; it is found by bisection to 1e-9. Returns 0 if no
/// positive-rate region exists.
pub fn qber_threshold(eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::OutOfDomain {
            name: "eta",
            value: eta,
            domain: "(0, 1]",
        });
    }
    let hi = 0.5 * max_feasible_qber(eta);
    let f = |e: f64| bem_secure_key_rate(eta, e).expect("bracket stays feasible");
    if f(hi) >= 0.0 {
        // rate never crosses zero on the decreasing branch
        return Ok(0.0);
    }
    bisect(f, 0.0, hi, 1e-9, "QBER threshold")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_with_no_mismatch() {
        let s = split_equivalent_model(0.13, 0.13).unwrap();
        assert_eq!(s.c1, 0.0);
        assert_eq!(s.part1_click_probability, 0.0);
        assert!((s.c1 + s.c2 + s.c3 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn split_with_complete_mismatch() {
        let s = split_equivalent_model(0.13, 0.0).unwrap();
        assert_eq!(s.part1_click_probability, 1.0);
        assert!((s.c1 - 0.13).abs() < 1e-15);
        assert_eq!(s.c2, 0.0);
    }

    #[test]
    fn split_at_the_attack_threshold() {
        let s = split_equivalent_model(0.13, 0.0366).unwrap();
        assert!((s.part1_click_probability - 0.5600).abs() < 1e-3);
        assert!((s.c1 + s.c2 + s.c3 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn split_rejects_bad_orientation_and_zero() {
        assert!(split_equivalent_model(0.05, 0.13).is_err());
        assert!(split_equivalent_model(0.0, 0.0).is_err());
    }

    #[test]
    fn key_rate_at_matched_efficiencies() {
        // eta = 1 collapses to 1 - 2h(e_b)
        let r = bem_secure_key_rate(1.0, 0.05).unwrap();
        assert!((r - 0.4272).abs() < 1e-4);
        assert!((r - 0.427_206_085_768_088).abs() < 1e-12);
    }

    #[test]
    fn key_rate_at_zero_error() {
        let r = bem_secure_key_rate(0.5, 0.0).unwrap();
        assert!((r - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn key_rate_matches_tagged_fraction_form() {
        let eta: f64 = 0.2;
        let delta = (1.0 - eta) / (1.0 + eta);
        let a = bem_secure_key_rate(eta, 0.05).unwrap();
        let b = gllp_key_rate(delta, 0.05).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn key_rate_rejects_infeasible_qber() {
        // feasible range at eta = 0.1 is [0, 2/11]
        assert!(bem_secure_key_rate(0.1, 0.2).is_err());
        assert!(bem_secure_key_rate(0.0, 0.05).is_err());
    }

    #[test]
    fn gllp_degenerate_cases() {
        let e = 0.07;
        let r = gllp_key_rate(0.0, e).unwrap();
        let expected = 1.0 - 2.0 * binary_entropy(e).unwrap();
        assert!((r - expected).abs() < 1e-15);
        assert!(gllp_key_rate(1.0, 0.0).is_err());
    }

    #[test]
    fn threshold_values() {
        let t1 = qber_threshold(1.0).unwrap();
        assert!((t1 - 0.1100).abs() < 0.0005);
        let t05 = qber_threshold(0.5).unwrap();
        assert!(t05 < t1);
        assert!((t05 - 0.066_758_938_092).abs() < 1e-6);
        // rate is negative at the threshold's right, positive at its left
        assert!(bem_secure_key_rate(0.5, t05 - 1e-4).unwrap() > 0.0);
        assert!(bem_secure_key_rate(0.5, t05 + 1e-4).unwrap() < 0.0);
    }

    #[test]
    fn threshold_vanishes_with_the_mismatch() {
        let t = qber_threshold(1e-6).unwrap();
        assert!(t < 1e-6);
    }
}
