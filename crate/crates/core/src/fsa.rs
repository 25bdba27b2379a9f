//! Analytics for the faked-states attack enabled by basis-dependent
//! efficiency mismatch.
//!
//! The attack: Eve measures each pulse near Alice in a random basis and
//! resends her result toward Bob, timed so that detectors of her own basis
//! see full efficiency (`t0` for Z, `t1` for X) while the other basis is
//! suppressed by the mismatch ratio `eta`. This module carries the
//! resulting detection-probability table, Bob's count and error rates, the
//! post-attack QBER, the partial-attack generalization and the
//! attack-feasibility boundary.

use serde::{Deserialize, Serialize};

use crate::basis::{Basis, Timing};
use crate::entropy::binary_entropy;
use crate::error::{Error, Result};
use crate::solve::bisect;

/// Tolerance on the cross-basis symmetry of the four efficiencies.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// QBER bound Alice and Bob apply before trusting a session.
pub const DEFAULT_QBER_CAP: f64 = 0.11;

/// Resend slot for a state prepared in `basis`, in the analyzed mismatch
/// orientation (Z efficient at `t0`, X at `t1`).
pub fn resend_timing(basis: Basis) -> Timing {
    match basis {
        Basis::Z => Timing::T0,
        Basis::X => Timing::T1,
    }
}

/// The four equivalent transmission-and-detection efficiencies
/// `eta_m(t_n)` plus the matched peak efficiency `kappa` used for
/// undisturbed pulses.
///
/// Validity requires the cross-basis symmetry
/// `eta_Z(t1)/eta_X(t1) == eta_X(t0)/eta_Z(t0)`; the common value is the
/// mismatch ratio `eta` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsaParameters {
    eta_z_t0: f64,
    eta_z_t1: f64,
    eta_x_t0: f64,
    eta_x_t1: f64,
    kappa: f64,
}

impl FsaParameters {
    pub fn new(
        eta_z_t0: f64,
        eta_z_t1: f64,
        eta_x_t0: f64,
        eta_x_t1: f64,
        kappa: f64,
    ) -> Result<Self> {
        for (name, value) in [
            ("eta_z_t0", eta_z_t0),
            ("eta_z_t1", eta_z_t1),
            ("eta_x_t0", eta_x_t0),
            ("eta_x_t1", eta_x_t1),
            ("kappa", kappa),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfDomain {
                    name,
                    value,
                    domain: "[0, 1]",
                });
            }
        }
        if eta_z_t0 <= 0.0 {
            return Err(Error::invalid("eta_z_t0 must be positive"));
        }
        if eta_x_t1 <= 0.0 {
            return Err(Error::invalid("eta_x_t1 must be positive"));
        }
        let r0 = eta_x_t0 / eta_z_t0;
        let r1 = eta_z_t1 / eta_x_t1;
        if (r0 - r1).abs() > SYMMETRY_TOLERANCE {
            return Err(Error::invalid(format!(
                "asymmetric mismatch: eta_X(t0)/eta_Z(t0) = {r0} but eta_Z(t1)/eta_X(t1) = {r1}"
            )));
        }
        if r0 > 1.0 + SYMMETRY_TOLERANCE {
            return Err(Error::OutOfDomain {
                name: "mismatch ratio",
                value: r0,
                domain: "[0, 1]",
            });
        }
        Ok(FsaParameters {
            eta_z_t0,
            eta_z_t1,
            eta_x_t0,
            eta_x_t1,
            kappa,
        })
    }

    /// Fully symmetric parameters: matched efficiency `kappa` on the
    /// favored basis of each slot, `eta * kappa` on the other.
    pub fn symmetric(kappa: f64, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&kappa) || kappa == 0.0 {
            return Err(Error::OutOfDomain {
                name: "kappa",
                value: kappa,
                domain: "(0, 1]",
            });
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::OutOfDomain {
                name: "eta",
                value: eta,
                domain: "[0, 1]",
            });
        }
        FsaParameters::new(kappa, eta * kappa, eta * kappa, kappa, kappa)
    }

    /// The mismatch ratio `eta` shared by both slots.
    pub fn mismatch_ratio(&self) -> f64 {
        let r = 0.5 * (self.eta_x_t0 / self.eta_z_t0 + self.eta_z_t1 / self.eta_x_t1);
        r.min(1.0)
    }

    /// Efficiency of Bob's `basis` for a pulse arriving in `timing`.
    pub fn efficiency(&self, basis: Basis, timing: Timing) -> f64 {
        match (basis, timing) {
            (Basis::Z, Timing::T0) => self.eta_z_t0,
            (Basis::Z, Timing::T1) => self.eta_z_t1,
            (Basis::X, Timing::T0) => self.eta_x_t0,
            (Basis::X, Timing::T1) => self.eta_x_t1,
        }
    }

    pub fn eta_z_t0(&self) -> f64 {
        self.eta_z_t0
    }

    pub fn eta_z_t1(&self) -> f64 {
        self.eta_z_t1
    }

    pub fn eta_x_t0(&self) -> f64 {
        self.eta_x_t0
    }

    pub fn eta_x_t1(&self) -> f64 {
        self.eta_x_t1
    }

    /// Matched peak efficiency seen by undisturbed pulses at `t2`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

/// One detection-probability row: Alice's state, Eve's measurement, the
/// faked state she resends (same basis and bit, slot fixed by the basis)
/// and Bob's sifted outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FsaTableRow {
    pub alice_basis: Basis,
    pub alice_bit: u8,
    pub eve_basis: Basis,
    pub eve_bit: u8,
    pub resend_timing: Timing,
    pub bob_bit: u8,
    /// Probability that Bob, measuring in Alice's basis, registers
    /// `bob_bit`, conditioned on this branch.
    pub probability: f64,
}

impl FsaTableRow {
    /// Joint weight of the branch: Alice's state (1/4) times Eve's
    /// measurement branch (1/2 for the matched basis, 1/4 for each
    /// random outcome in the mismatched basis).
    pub fn branch_weight(&self) -> f64 {
        if self.eve_basis == self.alice_basis {
            0.25 * 0.5
        } else {
            0.25 * 0.25
        }
    }

    pub fn is_error(&self) -> bool {
        self.bob_bit != self.alice_bit
    }
}

/// The full 24-row detection-probability table of the attack.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FsaTable {
    rows: Vec<FsaTableRow>,
}

impl FsaTable {
    pub fn rows(&self) -> &[FsaTableRow] {
        &self.rows
    }

    /// Bob's count rate by brute-force branch enumeration.
    pub fn count_rate(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.branch_weight() * r.probability)
            .sum()
    }

    /// Bob's wrong-bit rate by brute-force branch enumeration.
    pub fn error_rate(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.is_error())
            .map(|r| r.branch_weight() * r.probability)
            .sum()
    }
}

/// Builds the 24-row table for the given efficiencies.
///
/// When Eve's basis matches Alice's, the resent state drives Bob's correct
/// detector at the full matched-slot efficiency and never the wrong one.
/// When it does not, Bob's two outcomes are equally likely, each at half
/// the efficiency of his basis at Eve's resend slot.
pub fn build_fsa_table(params: &FsaParameters) -> FsaTable {
    let mut rows = Vec::with_capacity(24);
    for alice_basis in [Basis::Z, Basis::X] {
        for alice_bit in [0u8, 1u8] {
            // Matched Eve basis: her result is Alice's bit.
            let timing = resend_timing(alice_basis);
            let eff = params.efficiency(alice_basis, timing);
            for bob_bit in [0u8, 1u8] {
                rows.push(FsaTableRow {
                    alice_basis,
                    alice_bit,
                    eve_basis: alice_basis,
                    eve_bit: alice_bit,
                    resend_timing: timing,
                    bob_bit,
                    probability: if bob_bit == alice_bit { eff } else { 0.0 },
                });
            }
            // Mismatched Eve basis: either result with probability 1/2.
            let eve_basis = alice_basis.other();
            let timing = resend_timing(eve_basis);
            let eff = params.efficiency(alice_basis, timing);
            for eve_bit in [0u8, 1u8] {
                for bob_bit in [0u8, 1u8] {
                    rows.push(FsaTableRow {
                        alice_basis,
                        alice_bit,
                        eve_basis,
                        eve_bit,
                        resend_timing: timing,
                        bob_bit,
                        probability: 0.5 * eff,
                    });
                }
            }
        }
    }
    debug_assert_eq!(rows.len(), 24);
    FsaTable { rows }
}

/// Bob's count rate under the full attack:
/// `[eta_Z(t1) + eta_Z(t0) + eta_X(t1) + eta_X(t0)] / 4`.
pub fn fsa_count_rate(params: &FsaParameters) -> f64 {
    0.25 * (params.eta_z_t1 + params.eta_z_t0 + params.eta_x_t1 + params.eta_x_t0)
}

/// Bob's error rate under the full attack:
/// `[eta_Z(t1) + eta_X(t0)] / 8`.
pub fn fsa_error_rate(params: &FsaParameters) -> f64 {
    0.125 * (params.eta_z_t1 + params.eta_x_t0)
}

/// QBER of the full attack as a function of the mismatch ratio:
/// `eta / (2 (1 + eta))`.
pub fn fsa_qber(eta: f64) -> Result<f64> {
    check_ratio(eta)?;
    Ok(eta / (2.0 * (1.0 + eta)))
}

/// QBER when only a fraction `r` of pulses is attacked and the rest
/// arrive undisturbed at the matched slot:
/// `r eta / (4 - 2r + 2r eta)`.
pub fn partial_fsa_qber(eta: f64, r: f64) -> Result<f64> {
    check_ratio(eta)?;
    check_fraction(r)?;
    Ok(r * eta / (4.0 - 2.0 * r + 2.0 * r * eta))
}

/// Individual-attack secret key rate under a partial attack:
/// `I(A:B) - I(A:E) = [1 - h(e_b)] - r [1 - h(q)]` with
/// `q = eta / (2 (1 + eta))`.
pub fn partial_fsa_key_rate(eta: f64, r: f64) -> Result<f64> {
    let e_b = partial_fsa_qber(eta, r)?;
    let q = fsa_qber(eta)?;
    Ok((1.0 - binary_entropy(e_b)?) - r * (1.0 - binary_entropy(q)?))
}

/// Largest attackable fraction keeping the QBER at or below `qber_cap`.
///
/// Solved numerically by bisection of the partial-attack QBER to 1e-9 and
/// clamped to `[0, 1]`; below the full-attack threshold (`eta` such that
/// the full attack already satisfies the cap) this is 1.
pub fn max_attack_fraction(eta: f64, qber_cap: f64) -> Result<f64> {
    check_ratio(eta)?;
    if eta <= 0.0 {
        return Err(Error::OutOfDomain {
            name: "eta",
            value: eta,
            domain: "(0, 1]",
        });
    }
    if !(0.0..1.0).contains(&qber_cap) || qber_cap <= 0.0 {
        return Err(Error::OutOfDomain {
            name: "qber_cap",
            value: qber_cap,
            domain: "(0, 1)",
        });
    }
    if partial_fsa_qber(eta, 1.0)? <= qber_cap {
        return Ok(1.0);
    }
    let f = |r: f64| partial_fsa_qber(eta, r).expect("r stays in [0, 1]") - qber_cap;
    let root = bisect(f, 0.0, 1.0, 1e-9, "partial-attack boundary")?;
    Ok(root.clamp(0.0, 1.0))
}

fn check_ratio(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::OutOfDomain {
            name: "eta",
            value: eta,
            domain: "[0, 1]",
        });
    }
    Ok(())
}

fn check_fraction(r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::OutOfDomain {
            name: "r",
            value: r,
            domain: "[0, 1]",
        });
    }
    Ok(())
}
