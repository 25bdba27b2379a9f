//! `bemsim session`: run one Monte-Carlo key-distribution session and
//! report its tallies next to the analytic predictions with z-scores.

use anyhow::Result;

use bemsim_core::session::{expected_detection_rate, expected_qber, run_session, SessionConfig};
use bemsim_core::FsaParameters;

use crate::config::SessionCmdConfig;
use crate::table::{Cell, DataTable, Report};

pub fn run(config: &SessionCmdConfig, seed: u64) -> Result<Report> {
    let params = FsaParameters::symmetric(config.kappa, config.eta)?;
    let session = SessionConfig {
        n_pulses: config.n_pulses,
        attack: config.attack_kind()?,
        params,
        include_dark_counts: config.include_dark_counts,
        dark_count_rate: config.dark_count_rate,
        seed,
    };
    session.validate()?;
    let stats = run_session(&session)?;

    let mut totals = DataTable::new(
        "stats",
        &[
            "emitted",
            "detected",
            "sifted",
            "errors",
            "qber",
            "qber_std_error",
        ],
    );
    let (qber, qber_se) = match stats.qber {
        Some(q) => (Cell::Float(q.value), Cell::Float(q.std_error)),
        None => (Cell::Empty, Cell::Empty),
    };
    totals.push(vec![
        Cell::from(stats.emitted),
        Cell::from(stats.detected),
        Cell::from(stats.sifted),
        Cell::from(stats.errors),
        qber,
        qber_se,
    ]);

    let mut predictions = DataTable::new(
        "predictions",
        &[
            "expected_qber",
            "qber_z_score",
            "expected_detection_rate",
            "detection_rate_z_score",
        ],
    );
    let expected_q = expected_qber(&session)?;
    let qber_z = match stats.qber {
        Some(q) if q.std_error > 0.0 => Cell::Float((q.value - expected_q) / q.std_error),
        // zero standard error: only an exact match scores
        Some(q) if q.value == expected_q => Cell::Float(0.0),
        _ => Cell::Empty,
    };
    let expected_rate = expected_detection_rate(&session);
    let rate = stats.detected as f64 / stats.emitted as f64;
    let rate_se = (expected_rate * (1.0 - expected_rate) / stats.emitted as f64).sqrt();
    let rate_z = if rate_se > 0.0 {
        Cell::Float((rate - expected_rate) / rate_se)
    } else {
        Cell::Empty
    };
    predictions.push(vec![
        Cell::Float(expected_q),
        qber_z,
        Cell::Float(expected_rate),
        rate_z,
    ]);

    let mut clicks = DataTable::new("clicks", &["detector", "arrival", "count"]);
    for (label, arrival, count) in stats.click_rows() {
        clicks.push(vec![
            Cell::from(label.symbol()),
            Cell::Text(arrival.to_string()),
            Cell::from(count),
        ]);
    }

    let mut tally = DataTable::new(
        "equivalent_parts",
        &[
            "part1_clicks",
            "part1_errors",
            "part2_clicks",
            "part2_errors",
        ],
    );
    tally.push(vec![
        Cell::from(stats.parts.part1_clicks),
        Cell::from(stats.parts.part1_errors),
        Cell::from(stats.parts.part2_clicks),
        Cell::from(stats.parts.part2_errors),
    ]);

    let mut report = Report::default();
    report.push(totals);
    report.push(predictions);
    report.push(clicks);
    report.push(tally);
    Ok(report)
}
