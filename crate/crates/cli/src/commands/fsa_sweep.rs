//! `bemsim fsa-sweep`: the attack-side sweep. Per mismatch ratio it
//! reports the full-attack QBER and the largest safely attackable
//! fraction; optional QBER and fraction grids add the key-rate and
//! partial-attack columns.

use anyhow::Result;

use bemsim_core::fsa::{fsa_qber, max_attack_fraction, partial_fsa_key_rate, partial_fsa_qber};
use bemsim_core::security::{bem_secure_key_rate, max_feasible_qber};

use crate::config::FsaSweepConfig;
use crate::table::{Cell, DataTable, Report};

pub fn run(config: &FsaSweepConfig) -> Result<Report> {
    let mut table = DataTable::new(
        "fsa_sweep",
        &[
            "eta",
            "fsa_qber",
            "r_max",
            "e_b",
            "key_rate",
            "r",
            "partial_qber",
            "partial_key_rate",
        ],
    );

    for &eta in &config.eta {
        let qber = fsa_qber(eta)?;
        let r_max = max_attack_fraction(eta, config.qber_cap)?;
        let base = vec![Cell::Float(eta), Cell::Float(qber), Cell::Float(r_max)];

        if config.e_b.is_empty() && config.r.is_empty() {
            let mut row = base.clone();
            row.extend([
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
            ]);
            table.push(row);
            continue;
        }
        for &e_b in &config.e_b {
            let key_rate = if e_b <= max_feasible_qber(eta) {
                Cell::Float(bem_secure_key_rate(eta, e_b)?)
            } else {
                Cell::Empty
            };
            let mut row = base.clone();
            row.extend([
                Cell::Float(e_b),
                key_rate,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
            ]);
            table.push(row);
        }
        for &r in &config.r {
            let mut row = base.clone();
            row.extend([
                Cell::Empty,
                Cell::Empty,
                Cell::Float(r),
                Cell::Float(partial_fsa_qber(eta, r)?),
                Cell::Float(partial_fsa_key_rate(eta, r)?),
            ]);
            table.push(row);
        }
    }

    let mut report = Report::default();
    report.push(table);
    Ok(report)
}
