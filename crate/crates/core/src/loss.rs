//! Loss functions `l(b, x)` and their best responses.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A loss function over a finite state alphabet.
#[derive(Debug, Clone, PartialEq)]
pub enum LossSpec<T> {
    /// `|B| x m` table, `rows[b][x] = l(b, x)`.
    Matrix { rows: Vec<Vec<T>> },
    /// `l(b, x) = 1(b != x)` with `B = X`.
    ZeroOne { m: usize },
    /// `l(q, x) = ln(1 / q(x))`, strategies are distributions.
    Log { m: usize },
    /// `l(b, x) = ||b - points[x]||^2`, strategies are points of `R^d`.
    SquaredL2 { points: Vec<Vec<T>> },
}

/// A strategy `b` compatible with one of the loss variants.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy<T> {
    Index(usize),
    Distribution(Vec<T>),
    Point(Vec<T>),
}

impl<T: Copy> Strategy<T> {
    pub fn index(&self) -> Option<usize> {
        match self {
            Strategy::Index(b) => Some(*b),
            _ => None,
        }
    }

    pub fn values(&self) -> Option<&[T]> {
        match self {
            Strategy::Index(_) => None,
            Strategy::Distribution(v) | Strategy::Point(v) => Some(v),
        }
    }
}

/// Uniform bound `R` on `|l(b, x)|` over the strategies a forecaster can play.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossBound<T> {
    Finite(T),
    Unbounded,
}

impl<T: Copy> LossBound<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            LossBound::Finite(r) => Some(r),
            LossBound::Unbounded => None,
        }
    }
}

#[derive(Deserialize)]
struct MatrixFile {
    rows: Vec<Vec<f64>>,
}

impl<T: Scalar> LossSpec<T> {
    pub fn matrix(rows: Vec<Vec<T>>) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if rows.is_empty() {
            return Err(Error::InvalidLoss("matrix has no rows".into()));
        }
        if m < 2 {
            return Err(Error::AlphabetTooSmall(m));
        }
        for (b, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Dimension {
                    what: "matrix row",
                    expected: m,
                    actual: row.len(),
                });
            }
            if let Some(x) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidLoss(format!(
                    "entry [{b}][{x}] is not finite"
                )));
            }
        }
        Ok(LossSpec::Matrix { rows })
    }

    /// Reads `{"rows": [[...], ...]}`.
    pub fn matrix_from_json(text: &str) -> Result<Self> {
        let file: MatrixFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        LossSpec::matrix(
            file.rows
                .into_iter()
                .map(|r| r.into_iter().map(T::from_f64).collect())
                .collect(),
        )
    }

    pub fn zero_one(m: usize) -> Result<Self> {
        crate::seq::Alphabet::new(m)?;
        Ok(LossSpec::ZeroOne { m })
    }

    pub fn log(m: usize) -> Result<Self> {
        crate::seq::Alphabet::new(m)?;
        Ok(LossSpec::Log { m })
    }

    pub fn squared_l2(points: Vec<Vec<T>>) -> Result<Self> {
        crate::seq::Alphabet::new(points.len())?;
        let d = points[0].len();
        if d == 0 {
            return Err(Error::InvalidLoss("points must have dimension >= 1".into()));
        }
        for p in &points {
            if p.len() != d {
                return Err(Error::Dimension {
                    what: "point",
                    expected: d,
                    actual: p.len(),
                });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidLoss(
                    "point coordinates must be finite".into(),
                ));
            }
        }
        Ok(LossSpec::SquaredL2 { points })
    }

    /// `|X|`.
    pub fn alphabet_size(&self) -> usize {
        match self {
            LossSpec::Matrix { rows } => rows[0].len(),
            LossSpec::ZeroOne { m } | LossSpec::Log { m } => *m,
            LossSpec::SquaredL2 { points } => points.len(),
        }
    }

    /// `|B|` for finite strategy spaces.
    pub fn num_strategies(&self) -> Option<usize> {
        match self {
            LossSpec::Matrix { rows } => Some(rows.len()),
            LossSpec::ZeroOne { m } => Some(*m),
            _ => None,
        }
    }

    pub fn is_finite_strategy(&self) -> bool {
        self.num_strategies().is_some()
    }

    pub fn name(&self) -> &'static str {
        match self {
            LossSpec::Matrix { .. } => "matrix",
            LossSpec::ZeroOne { .. } => "zero_one",
            LossSpec::Log { .. } => "log",
            LossSpec::SquaredL2 { .. } => "squared_l2",
        }
    }

    pub fn bound(&self) -> LossBound<T> {
        match self {
            LossSpec::Matrix { rows } => LossBound::Finite(
                rows.iter()
                    .flatten()
                    .fold(T::zero(), |acc, v| acc.max(v.abs())),
            ),
            LossSpec::ZeroOne { .. } => LossBound::Finite(T::one()),
            LossSpec::Log { .. } => LossBound::Unbounded,
            LossSpec::SquaredL2 { points } => {
                let mut diam = T::zero();
                for (i, a) in points.iter().enumerate() {
                    for b in &points[i + 1..] {
                        diam = diam.max(squared_distance(a, b));
                    }
                }
                LossBound::Finite(diam)
            }
        }
    }

    /// `l(b, x)` for finite strategy spaces; panics on other variants.
    #[inline]
    pub fn entry(&self, b: usize, x: usize) -> T {
        match self {
            LossSpec::Matrix { rows } => rows[b][x],
            LossSpec::ZeroOne { .. } => {
                if b == x {
                    T::zero()
                } else {
                    T::one()
                }
            }
            _ => panic!("entry() called on a {} loss", self.name()),
        }
    }

    /// The matrix encoding of a finite-strategy loss.
    pub fn to_matrix(&self) -> Option<Vec<Vec<T>>> {
        let nb = self.num_strategies()?;
        let m = self.alphabet_size();
        Some(
            (0..nb)
                .map(|b| (0..m).map(|x| self.entry(b, x)).collect())
                .collect(),
        )
    }

    fn check_state(&self, x: usize) -> Result<()> {
        let m = self.alphabet_size();
        if x >= m {
            return Err(crate::error::range_err("state", x, format!("0..{m}")));
        }
        Ok(())
    }

    fn check_strategy(&self, b: &Strategy<T>) -> Result<()> {
        match (self, b) {
            (LossSpec::Matrix { .. } | LossSpec::ZeroOne { .. }, Strategy::Index(i)) => {
                let nb = self.num_strategies().unwrap_or(0);
                if *i >= nb {
                    return Err(crate::error::range_err(
                        "strategy index",
                        i,
                        format!("0..{nb}"),
                    ));
                }
            }
            (LossSpec::Log { m }, Strategy::Distribution(q)) => {
                if q.len() != *m {
                    return Err(Error::Dimension {
                        what: "distribution",
                        expected: *m,
                        actual: q.len(),
                    });
                }
            }
            (LossSpec::SquaredL2 { points }, Strategy::Point(p)) => {
                if p.len() != points[0].len() {
                    return Err(Error::Dimension {
                        what: "point strategy",
                        expected: points[0].len(),
                        actual: p.len(),
                    });
                }
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "strategy {b:?} is incompatible with a {} loss",
                    self.name()
                )))
            }
        }
        Ok(())
    }

    /// `l(b, x)`. Log loss of a zero-probability state is `+inf`.
    pub fn eval(&self, b: &Strategy<T>, x: usize) -> Result<T> {
        self.check_state(x)?;
        self.check_strategy(b)?;
        Ok(self.eval_unchecked(b, x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, b: &Strategy<T>, x: usize) -> T {
        match (self, b) {
            (_, Strategy::Index(i)) => self.entry(*i, x),
            (LossSpec::Log { .. }, Strategy::Distribution(q)) => -q[x].ln(),
            (LossSpec::SquaredL2 { points }, Strategy::Point(p)) => squared_distance(p, &points[x]),
            _ => unreachable!("strategy checked against loss"),
        }
    }

    /// `E_{X ~ p}[l(b, X)]`.
    pub fn expected_loss(&self, b: &Strategy<T>, p: &[T]) -> Result<T> {
        self.check_strategy(b)?;
        if p.len() != self.alphabet_size() {
            return Err(Error::Dimension {
                what: "distribution",
                expected: self.alphabet_size(),
                actual: p.len(),
            });
        }
        let mut acc = T::zero();
        for (x, &px) in p.iter().enumerate() {
            if px == T::zero() {
                continue;
            }
            acc += px * self.eval_unchecked(b, x);
        }
        Ok(acc)
    }

    /// `sum_x w(x) l(b, x)` for finite strategy spaces.
    #[inline]
    pub fn weighted_loss(&self, b: usize, weights: &[T]) -> T {
        let mut acc = T::zero();
        for (x, &w) in weights.iter().enumerate() {
            acc += w * self.entry(b, x);
        }
        acc
    }

    /// Row index minimizing `sum_x w(x) l(b, x)`, ties to the lowest index.
    #[inline]
    pub fn best_index(&self, weights: &[T]) -> usize {
        let nb = self.num_strategies().expect("finite strategy space");
        let mut best = 0;
        let mut best_val = self.weighted_loss(0, weights);
        for b in 1..nb {
            let v = self.weighted_loss(b, weights);
            if v < best_val {
                best = b;
                best_val = v;
            }
        }
        best
    }

    /// Minimizer of `sum_x w(x) l(b, x)` over all strategies for nonnegative
    /// weights. Positive rescaling of `w` never changes the answer for the
    /// closed-form variants; all-zero weights give the tie-break strategy
    /// (index 0, the uniform distribution, or the centroid).
    pub fn best_response(&self, weights: &[T]) -> Strategy<T> {
        debug_assert_eq!(weights.len(), self.alphabet_size());
        match self {
            LossSpec::Matrix { .. } | LossSpec::ZeroOne { .. } => {
                Strategy::Index(self.best_index(weights))
            }
            LossSpec::Log { m } => {
                let total: T = weights.iter().copied().sum();
                if total > T::zero() {
                    Strategy::Distribution(weights.iter().map(|&w| w / total).collect())
                } else {
                    Strategy::Distribution(vec![T::one() / T::from_usize(*m); *m])
                }
            }
            LossSpec::SquaredL2 { points } => {
                let total: T = weights.iter().copied().sum();
                if total > T::zero() {
                    Strategy::Point(weighted_mean(points, weights, total))
                } else {
                    let uniform = vec![T::one(); points.len()];
                    Strategy::Point(weighted_mean(points, &uniform, T::from_usize(points.len())))
                }
            }
        }
    }

    /// `p`-weighted mean of the points; the minimizer of expected squared loss.
    pub fn mean_point(&self, p: &[T]) -> Result<Vec<T>> {
        match self {
            LossSpec::SquaredL2 { points } => Ok(weighted_mean(points, p, T::one())),
            _ => Err(Error::Unsupported(format!(
                "mean_point on a {} loss",
                self.name()
            ))),
        }
    }
}

fn weighted_mean<T: Scalar>(points: &[Vec<T>], w: &[T], total: T) -> Vec<T> {
    let d = points[0].len();
    let mut out = vec![T::zero(); d];
    for (p, &wx) in points.iter().zip(w) {
        for (o, &c) in out.iter_mut().zip(p) {
            *o += wx * c;
        }
    }
    for o in &mut out {
        *o = *o / total;
    }
    out
}

pub(crate) fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .fold(T::zero(), |acc, v| acc + v)
}
