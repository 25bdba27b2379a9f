//! `bemsim keyrate`: the receiver-side key-rate sweep with the
//! tagged-fraction cross-check and per-eta QBER threshold.

use anyhow::Result;

use bemsim_core::security::{
    bem_secure_key_rate, gllp_key_rate, max_feasible_qber, qber_threshold,
};

use crate::config::KeyrateConfig;
use crate::table::{Cell, DataTable, Report};

pub fn run(config: &KeyrateConfig) -> Result<Report> {
    let mut table = DataTable::new(
        "keyrate",
        &[
            "eta",
            "e_b",
            "key_rate",
            "gllp_delta",
            "gllp_key_rate",
            "rate_gap",
            "qber_threshold",
        ],
    );

    for &eta in &config.eta {
        let threshold = qber_threshold(eta)?;
        let delta = (1.0 - eta) / (1.0 + eta);
        let cap = max_feasible_qber(eta);

        let grid: Vec<f64> = if config.e_b.is_empty() {
            let n = config.e_b_points.max(2);
            (0..n).map(|i| cap * i as f64 / n as f64).collect()
        } else {
            config.e_b.clone()
        };

        for &e_b in &grid {
            if e_b > cap {
                table.push(vec![
                    Cell::Float(eta),
                    Cell::Float(e_b),
                    Cell::Empty,
                    Cell::Float(delta),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Float(threshold),
                ]);
                continue;
            }
            let bem = bem_secure_key_rate(eta, e_b)?;
            let gllp = gllp_key_rate(delta, e_b)?;
            table.push(vec![
                Cell::Float(eta),
                Cell::Float(e_b),
                Cell::Float(bem),
                Cell::Float(delta),
                Cell::Float(gllp),
                Cell::Float((bem - gllp).abs()),
                Cell::Float(threshold),
            ]);
        }
    }

    let mut report = Report::default();
    report.push(table);
    Ok(report)
}
