//! Alphabets, state sequences and occurrence counts.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{range_err, Error, Result};

/// A finite state space `{0, .., size-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::AlphabetTooSmall(size));
        }
        Ok(Alphabet(size))
    }

    pub fn binary() -> Self {
        Alphabet(2)
    }

    pub fn size(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for Alphabet {
    type Error = Error;
    fn try_from(size: usize) -> Result<Self> {
        Alphabet::new(size)
    }
}

impl From<Alphabet> for usize {
    fn from(a: Alphabet) -> usize {
        a.0
    }
}

/// `x_1^n`: a sequence of dense state indices over an alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSequence {
    states: Vec<usize>,
    alphabet: Alphabet,
}

impl StateSequence {
    pub fn new(states: Vec<usize>, alphabet: Alphabet) -> Result<Self> {
        if let Some((position, &state)) = states
            .iter()
            .enumerate()
            .find(|(_, &s)| s >= alphabet.size())
        {
            return Err(Error::StateOutOfRange {
                position,
                state,
                size: alphabet.size(),
            });
        }
        Ok(StateSequence { states, alphabet })
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `x_t` with 1-based `t`.
    pub fn at(&self, t: usize) -> usize {
        self.states[t - 1]
    }

    /// Counts over the first `t` states, `N_t`.
    pub fn ingest(&self, t: usize) -> Result<CountVector> {
        if t > self.len() {
            return Err(range_err("prefix length", t, format!("0..={}", self.len())));
        }
        let mut counts = CountVector::zeros(self.alphabet);
        for &s in &self.states[..t] {
            counts.push(s);
        }
        Ok(counts)
    }

    /// Newline-delimited integers, one state per line.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 2);
        for s in &self.states {
            writeln!(out, "{s}").expect("writing to a String cannot fail");
        }
        out
    }

    /// Parses newline-delimited integers. Blank lines are ignored.
    pub fn from_text(text: &str, alphabet: Alphabet) -> Result<Self> {
        let mut states = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let state = line
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("line {}: {e}: {line:?}", lineno + 1)))?;
            states.push(state);
        }
        StateSequence::new(states, alphabet)
    }
}

/// Per-state occurrence counts `N_t(x)` with their total `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CountVector {
    counts: Vec<u64>,
    total: u64,
}

impl CountVector {
    pub fn zeros(alphabet: Alphabet) -> Self {
        CountVector {
            counts: vec![0; alphabet.size()],
            total: 0,
        }
    }

    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        Alphabet::new(counts.len())?;
        let total = counts.iter().sum();
        Ok(CountVector { counts, total })
    }

    pub fn push(&mut self, state: usize) {
        self.counts[state] += 1;
        self.total += 1;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, state: usize) -> u64 {
        self.counts[state]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn size(&self) -> usize {
        self.counts.len()
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet(self.counts.len())
    }

    pub(crate) fn expect_total(&self, expected: u64) -> Result<()> {
        if self.total != expected {
            return Err(range_err(
                "count total",
                self.total,
                format!("== {expected}"),
            ));
        }
        Ok(())
    }
}
