//! `bemsim calibrate`: run an attacked-calibration campaign and report
//! per-trial outcomes, aggregate frequencies and a chi-square check
//! against the fair-coin distribution.

use anyhow::Result;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use bemsim_core::calibration::{run_campaign, BemVariant, MismatchOutcome, OutcomeTally};
use bemsim_core::{Basis, DetectorBank, TimeFs};

use crate::config::{CalibrateConfig, DetectorSetup};
use crate::table::{Cell, DataTable, Report};

pub fn run(config: &CalibrateConfig, seed: u64) -> Result<Report> {
    let grid = config.grid()?;
    let curve = config.curve(&grid)?;
    let bank = DetectorBank::uniform(&curve, TimeFs::ZERO);
    let signal = config.signal()?;

    let trials = run_campaign(&bank, &signal, &grid, seed, config.trials)?;
    let tally = OutcomeTally::from_trials(&trials);

    let mut per_trial = DataTable::new(
        "trials",
        &[
            "trial", "t_h_ps", "t_v_ps", "t_p_ps", "t_m_ps", "outcome", "detail",
        ],
    );
    for trial in &trials {
        let [h, v, p, m] = trial.timings;
        let (outcome, detail): (&str, Cell) = match trial.outcome {
            MismatchOutcome::NoMismatch => ("no_mismatch", Cell::Empty),
            MismatchOutcome::PartialDem(Basis::Z) => ("partial_dem", Cell::from("Z")),
            MismatchOutcome::PartialDem(Basis::X) => ("partial_dem", Cell::from("X")),
            MismatchOutcome::DualDem => ("dual_dem", Cell::Empty),
            MismatchOutcome::Bem(BemVariant::ZEarly) => ("bem", Cell::from("z_early")),
            MismatchOutcome::Bem(BemVariant::XEarly) => ("bem", Cell::from("x_early")),
        };
        per_trial.push(vec![
            Cell::from(trial.index),
            Cell::Float(h.as_ps()),
            Cell::Float(v.as_ps()),
            Cell::Float(p.as_ps()),
            Cell::Float(m.as_ps()),
            Cell::from(outcome),
            detail,
        ]);
    }

    let mut summary = DataTable::new("summary", &["outcome", "count", "frequency", "theoretical"]);
    let n = tally.trials;
    let mut summary_row = |name: &str, count: u64, theoretical: f64| {
        let frequency = if n > 0 {
            Cell::Float(count as f64 / n as f64)
        } else {
            Cell::Empty
        };
        summary.push(vec![
            Cell::from(name),
            Cell::from(count),
            frequency,
            Cell::Float(theoretical),
        ]);
    };
    summary_row("no_mismatch", tally.no_mismatch, 0.125);
    summary_row("partial_dem", tally.partial_dem(), 0.5);
    summary_row("dual_dem", tally.dual_dem, 0.25);
    summary_row("bem", tally.bem(), 0.125);
    summary_row("bem_z_early", tally.bem_z_early, 0.0625);
    summary_row("bem_x_early", tally.bem_x_early, 0.0625);

    let mut fit = DataTable::new("chi_square", &["statistic", "dof", "p_value"]);
    if n > 0 {
        let statistic = tally.chi_square_statistic();
        let p_value = 1.0 - ChiSquared::new(3.0).unwrap().cdf(statistic);
        fit.push(vec![
            Cell::Float(statistic),
            Cell::Int(3),
            Cell::Float(p_value),
        ]);
    } else {
        fit.push(vec![Cell::Empty, Cell::Int(3), Cell::Empty]);
    }

    let mut report = Report::default();
    report.push(per_trial);
    report.push(summary);
    report.push(fit);
    Ok(report)
}
