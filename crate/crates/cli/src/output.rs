//! CSV results and number formatting.
//!
//! `run` writes a header, one row per trial and a final summary row:
//!
//! ```text
//! trial_id,seed,cum_loss,lstar,regret,ci95,bound_value
//! 0,<seed>,<L̂_n>,<L*_n>,<regret>,,
//! ...
//! summary,<master_seed>,<mean L̂_n>,<mean L*_n>,<mean regret>,<ci95>,<bound or empty>
//! ```
//!
//! Floats use Rust's shortest round-trip formatting, so a row re-parsed as
//! `f64` is the exact value computed.

use std::io::{self, Write};

use fpf::RegretReport;

pub const RUN_HEADER: &str = "trial_id,seed,cum_loss,lstar,regret,ci95,bound_value";

pub fn write_run_csv<W: Write>(
    out: &mut W,
    report: &RegretReport<f64>,
    master_seed: u64,
) -> io::Result<()> {
    writeln!(out, "{RUN_HEADER}")?;
    let mut lstar_sum = 0.0;
    for r in &report.records {
        writeln!(
            out,
            "{},{},{},{},{},,",
            r.trial, r.seed, r.cum_loss, r.lstar, r.regret
        )?;
        lstar_sum += r.lstar;
    }
    let bound = report
        .bound_value
        .map(|b| b.to_string())
        .unwrap_or_default();
    writeln!(
        out,
        "summary,{master_seed},{},{},{},{},{bound}",
        report.mean_cum_loss,
        lstar_sum / report.trials as f64,
        report.mean_regret,
        report.ci95_halfwidth,
    )
}

/// `x` with 12 significant digits, in positional notation when that stays
/// readable and in scientific notation otherwise.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    // The exponent of the rounded mantissa, so 9.9999999999999 counts as 1e1.
    let sci = format!("{x:.11e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fpf::TrialRecord;

    #[test]
    fn sig12_examples() {
        assert_eq!(sig12(60.0), "60.0000000000");
        assert_eq!(sig12(2.0), "2.00000000000");
        assert_eq!(sig12(9.210340371976184), "9.21034037198");
        assert_eq!(sig12(0.0884), "0.0884000000000");
        assert_eq!(sig12(1.5e20), "1.50000000000e20");
        assert_eq!(sig12(9.9999999999999), "10.0000000000");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_layout() {
        let records = vec![
            TrialRecord {
                trial: 0,
                seed: 11,
                cum_loss: 3.0,
                lstar: 1.0,
                regret: 2.0,
            },
            TrialRecord {
                trial: 1,
                seed: 12,
                cum_loss: 2.5,
                lstar: 1.0,
                regret: 1.5,
            },
        ];
        let report = RegretReport {
            trials: 2,
            horizon: 4,
            mean_cum_loss: 2.75,
            mean_regret: 1.75,
            ci95_halfwidth: 0.5,
            max_regret: 2.0,
            bound_value: None,
            per_t_mean_regret_curve: None,
            records,
        };
        let mut buf = Vec::new();
        write_run_csv(&mut buf, &report, 9).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "trial_id,seed,cum_loss,lstar,regret,ci95,bound_value\n\
             0,11,3,1,2,,\n\
             1,12,2.5,1,1.5,,\n\
             summary,9,2.75,1,1.75,0.5,\n"
        );
    }
}
