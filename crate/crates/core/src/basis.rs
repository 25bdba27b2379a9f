//! Measurement bases, detector labels and pulse-timing slots.

use std::fmt;

use serde::{Deserialize, Serialize};

/// The two conjugate BB84 bases: Z holds the H/V detectors, X the +/-
/// detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn other(self) -> Basis {
        match self {
            Basis::Z => Basis::X,
            Basis::X => Basis::Z,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Z => write!(f, "Z"),
            Basis::X => write!(f, "X"),
        }
    }
}

/// The four polarization detectors. `P` and `M` are the +45/-45 diagonal
/// detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DetectorLabel {
    H,
    V,
    P,
    M,
}

impl DetectorLabel {
    pub const ALL: [DetectorLabel; 4] = [
        DetectorLabel::H,
        DetectorLabel::V,
        DetectorLabel::P,
        DetectorLabel::M,
    ];

    pub fn basis(self) -> Basis {
        match self {
            DetectorLabel::H | DetectorLabel::V => Basis::Z,
            DetectorLabel::P | DetectorLabel::M => Basis::X,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            DetectorLabel::H | DetectorLabel::P => 0,
            DetectorLabel::V | DetectorLabel::M => 1,
        }
    }

    pub fn from_basis_bit(basis: Basis, bit: u8) -> DetectorLabel {
        match (basis, bit) {
            (Basis::Z, 0) => DetectorLabel::H,
            (Basis::Z, _) => DetectorLabel::V,
            (Basis::X, 0) => DetectorLabel::P,
            (Basis::X, _) => DetectorLabel::M,
        }
    }

    pub const fn index(self) -> usize {
        match self {
            DetectorLabel::H => 0,
            DetectorLabel::V => 1,
            DetectorLabel::P => 2,
            DetectorLabel::M => 3,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            DetectorLabel::H => "H",
            DetectorLabel::V => "V",
            DetectorLabel::P => "+",
            DetectorLabel::M => "-",
        }
    }
}

impl fmt::Display for DetectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One of the two arrival slots injected by the faked calibration signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Timing {
    T0,
    T1,
}

impl Timing {
    pub fn other(self) -> Timing {
        match self {
            Timing::T0 => Timing::T1,
            Timing::T1 => Timing::T0,
        }
    }
}

impl fmt::Display for Timing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Timing::T0 => write!(f, "t0"),
            Timing::T1 => write!(f, "t1"),
        }
    }
}

/// Arrival slot of a key-distribution pulse at Bob: one of the two faked
/// slots, or the undisturbed matched slot `T2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Arrival {
    T0,
    T1,
    T2,
}

impl Arrival {
    pub const ALL: [Arrival; 3] = [Arrival::T0, Arrival::T1, Arrival::T2];

    pub const fn index(self) -> usize {
        match self {
            Arrival::T0 => 0,
            Arrival::T1 => 1,
            Arrival::T2 => 2,
        }
    }
}

impl From<Timing> for Arrival {
    fn from(t: Timing) -> Arrival {
        match t {
            Timing::T0 => Arrival::T0,
            Timing::T1 => Arrival::T1,
        }
    }
}

impl fmt::Display for Arrival {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arrival::T0 => write!(f, "t0"),
            Arrival::T1 => write!(f, "t1"),
            Arrival::T2 => write!(f, "t2"),
        }
    }
}
