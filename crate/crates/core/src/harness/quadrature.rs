//! Deterministic expected regret of FPF on tiny instances by midpoint-rule
//! integration over the dither hypercube `[0, 1]^m`.
//!
//! This is an oracle for the Monte Carlo harness and deliberately shares no
//! code with the forecaster: the argmin region is evaluated directly from
//! the loss table and the counts.

use crate::error::{Error, Result};
use crate::loss::LossSpec;
use crate::predict::{DitherMode, PredictorConfig};
use crate::seq::StateSequence;

pub const MIN_GRID_POINTS: usize = 400;
pub const MAX_ALPHABET: usize = 3;
pub const MAX_HORIZON: usize = 8;

/// Probability that FPF plays each row given history counts `N` and
/// amplitude `h`, integrated on a `grid^m` midpoint lattice.
pub fn quadrature_pick_probabilities(
    rows: &[Vec<f64>],
    counts: &[u64],
    h: f64,
    grid: usize,
) -> Vec<f64> {
    let m = counts.len();
    let nb = rows.len();
    let mut hits = vec![0u64; nb];
    let mut idx = vec![0usize; m];
    let mut u = vec![0.0; m];
    let step = 1.0 / grid as f64;
    loop {
        for x in 0..m {
            u[x] = (idx[x] as f64 + 0.5) * step;
        }
        let mut best = 0;
        let mut best_val = f64::INFINITY;
        for (b, row) in rows.iter().enumerate() {
            let v: f64 = (0..m).map(|x| row[x] * (counts[x] as f64 + h * u[x])).sum();
            if v < best_val {
                best = b;
                best_val = v;
            }
        }
        hits[best] += 1;

        let mut d = 0;
        loop {
            if d == m {
                let total = (grid as f64).powi(m as i32);
                return hits.iter().map(|&c| c as f64 / total).collect();
            }
            idx[d] += 1;
            if idx[d] < grid {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// `E[L̂_n] - L*_n` for FPF with i.i.d. dither on a fixed sequence.
///
/// Requires a finite strategy space, `m <= 3`, `n <= 8` and at least 400
/// grid points per dimension.
pub fn quadrature_expected_regret(
    pred: &PredictorConfig<f64>,
    seq: &StateSequence,
    loss: &LossSpec<f64>,
    grid_points_per_dim: usize,
) -> Result<f64> {
    let schedule = match pred {
        PredictorConfig::Fpf {
            schedule,
            dither: DitherMode::Iid,
        } => schedule,
        _ => {
            return Err(Error::Unsupported(
                "quadrature oracle covers FPF with i.i.d. dither only".into(),
            ))
        }
    };
    let rows = loss.to_matrix().ok_or_else(|| {
        Error::Unsupported(format!(
            "quadrature oracle needs a finite strategy loss, got {}",
            loss.name()
        ))
    })?;
    let m = loss.alphabet_size();
    if m > MAX_ALPHABET || seq.len() > MAX_HORIZON {
        return Err(Error::Unsupported(format!(
            "quadrature oracle limited to m <= {MAX_ALPHABET}, n <= {MAX_HORIZON} (got m = {m}, n = {})",
            seq.len()
        )));
    }
    if seq.alphabet().size() != m {
        return Err(Error::Dimension {
            what: "sequence alphabet",
            expected: m,
            actual: seq.alphabet().size(),
        });
    }
    if grid_points_per_dim < MIN_GRID_POINTS {
        return Err(Error::Unsupported(format!(
            "quadrature needs >= {MIN_GRID_POINTS} grid points per dimension"
        )));
    }

    let mut counts = vec![0u64; m];
    let mut expected_loss = 0.0;
    for (i, &x) in seq.states().iter().enumerate() {
        let h = schedule.eval(i + 1);
        let probs = quadrature_pick_probabilities(&rows, &counts, h, grid_points_per_dim);
        expected_loss += probs
            .iter()
            .zip(&rows)
            .map(|(p, row)| p * row[x])
            .sum::<f64>();
        counts[x] += 1;
    }
    let lstar = rows
        .iter()
        .map(|row| seq.states().iter().map(|&x| row[x]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok(expected_loss - lstar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::DitherSchedule;
    use crate::seq::Alphabet;

    fn zero_one_rows() -> Vec<Vec<f64>> {
        vec![vec![0.0, 1.0], vec![1.0, 0.0]]
    }

    #[test]
    fn first_step_is_symmetric() {
        // Diagonal grid points are ties resolved to row 0, a 1/(2 grid) bias.
        let p = quadrature_pick_probabilities(&zero_one_rows(), &[0, 0], 1.0, 400);
        assert!((p[0] - 0.5).abs() <= 1.0 / 800.0 + 1e-12);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
        let cfg = PredictorConfig::fpf(DitherSchedule::constant(1.0).unwrap());
        let s = StateSequence::new(vec![0], Alphabet::binary()).unwrap();
        let r = quadrature_expected_regret(&cfg, &s, &LossSpec::zero_one(2).unwrap(), 400).unwrap();
        assert!((r - 0.5).abs() <= 1.0 / 800.0 + 1e-12);
    }

    #[test]
    fn dominated_region_is_empty() {
        // N = (2, 0), h <= 1: h u1 < 2 + h u0 everywhere.
        let p = quadrature_pick_probabilities(&zero_one_rows(), &[2, 0], 1.0, 400);
        assert_eq!(p, vec![1.0, 0.0]);
    }

    #[test]
    fn matches_triangular_closed_form() {
        // Oracle: P(pick 0) = P(u1 - u0 <= d / h) for N = (d, 0), triangular law.
        for (d, h) in [(1u64, 2.0), (1, 4.0), (2, 3.0)] {
            let a: f64 = d as f64 / h;
            let exact = if a >= 1.0 {
                1.0
            } else {
                1.0 - (1.0 - a).powi(2) / 2.0
            };
            let p = quadrature_pick_probabilities(&zero_one_rows(), &[d, 0], h, 1000);
            assert!(
                (p[0] - exact).abs() < 2e-3,
                "d={d} h={h}: {} vs {exact}",
                p[0]
            );
        }
    }

    #[test]
    fn rejects_large_or_unsupported_instances() {
        let cfg = PredictorConfig::fpf(DitherSchedule::constant(1.0).unwrap());
        let z = LossSpec::zero_one(2).unwrap();
        let long = StateSequence::new(vec![0; 9], Alphabet::binary()).unwrap();
        assert!(quadrature_expected_regret(&cfg, &long, &z, 400).is_err());
        let short = StateSequence::new(vec![0; 2], Alphabet::binary()).unwrap();
        assert!(quadrature_expected_regret(&cfg, &short, &z, 100).is_err());
        assert!(quadrature_expected_regret(&cfg, &short, &LossSpec::log(2).unwrap(), 400).is_err());
        assert!(
            quadrature_expected_regret(&PredictorConfig::FollowLeader, &short, &z, 400).is_err()
        );
        let z4 = LossSpec::zero_one(4).unwrap();
        let s4 = StateSequence::new(vec![0; 2], Alphabet::new(4).unwrap()).unwrap();
        assert!(quadrature_expected_regret(&cfg, &s4, &z4, 400).is_err());
    }
}
