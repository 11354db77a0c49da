//! Row-sparse linear maps with exact rational coefficients.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{from_usize, Rat};
use crate::sequence::{FiniteSequence, SortedProfile};

/// A linear map `R^{n_in} → R^{n_out}` stored by rows.
///
/// Each row lists `(input index, coefficient)` pairs, 0-based, sorted by input
/// index, with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseOperator {
    n_in: usize,
    n_out: usize,
    rows: Vec<Vec<(usize, Rat)>>,
}

impl SparseOperator {
    /// Builds an operator, merging duplicate entries and dropping zeros.
    pub fn new(n_in: usize, n_out: usize, rows: Vec<Vec<(usize, Rat)>>) -> Result<Self> {
        if rows.len() != n_out {
            return Err(Error::DimensionMismatch {
                expected: n_out,
                found: rows.len(),
            });
        }
        let mut clean = Vec::with_capacity(n_out);
        for mut row in rows {
            if let Some(&(i, _)) = row.iter().find(|(i, _)| *i >= n_in) {
                return Err(Error::DimensionMismatch {
                    expected: n_in,
                    found: i + 1,
                });
            }
            row.sort_by_key(|(i, _)| *i);
            let mut merged: Vec<(usize, Rat)> = Vec::with_capacity(row.len());
            for (i, c) in row {
                match merged.last_mut() {
                    Some((j, acc)) if *j == i => *acc += c,
                    _ => merged.push((i, c)),
                }
            }
            merged.retain(|(_, c)| !c.is_zero());
            clean.push(merged);
        }
        Ok(Self {
            n_in,
            n_out,
            rows: clean,
        })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| vec![(i, Rat::one())]).collect();
        Self {
            n_in: n,
            n_out: n,
            rows,
        }
    }

    pub fn zero(n_in: usize, n_out: usize) -> Self {
        Self {
            n_in,
            n_out,
            rows: vec![Vec::new(); n_out],
        }
    }

    pub fn diagonal(values: &[Rat]) -> Self {
        let rows = values
            .iter()
            .enumerate()
            .map(|(i, v)| if v.is_zero() { vec![] } else { vec![(i, v.clone())] })
            .collect();
        Self {
            n_in: values.len(),
            n_out: values.len(),
            rows,
        }
    }

    /// `σ_m` restricted to sequences of length `n`.
    pub fn dilation_up(n: usize, m: usize) -> Self {
        assert!(m >= 1, "dilation factor must be positive");
        let rows = (0..n * m).map(|r| vec![(r / m, Rat::one())]).collect();
        Self {
            n_in: n,
            n_out: n * m,
            rows,
        }
    }

    /// `σ_{1/m}` restricted to sequences of length `n`.
    pub fn dilation_down(n: usize, m: usize) -> Self {
        assert!(m >= 1, "dilation factor must be positive");
        let weight = Rat::one() / from_usize(m);
        let rows = (0..n.div_ceil(m))
            .map(|r| (r * m..((r + 1) * m).min(n)).map(|i| (i, weight.clone())).collect())
            .collect();
        Self {
            n_in: n,
            n_out: n.div_ceil(m),
            rows,
        }
    }

    /// Maps a sequence onto its profile slots: `x ↦ x*`.
    pub fn sorting(profile: &SortedProfile) -> Self {
        let rows = profile
            .recover()
            .iter()
            .map(|s| vec![(s.index, if s.negative { -Rat::one() } else { Rat::one() })])
            .collect();
        Self {
            n_in: profile.source_len(),
            n_out: profile.len(),
            rows,
        }
    }

    /// Maps profile slots back onto the source positions: `x* ↦ x`.
    pub fn unsorting(profile: &SortedProfile) -> Self {
        let mut rows = vec![Vec::new(); profile.source_len()];
        for (slot, s) in profile.recover().iter().enumerate() {
            let sign = if s.negative { -Rat::one() } else { Rat::one() };
            rows[s.index].push((slot, sign));
        }
        Self {
            n_in: profile.len(),
            n_out: profile.source_len(),
            rows,
        }
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn rows(&self) -> &[Vec<(usize, Rat)>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Coefficient at (row, column), zero if not stored.
    pub fn coefficient(&self, row: usize, col: usize) -> Rat {
        self.rows
            .get(row)
            .and_then(|r| r.iter().find(|(i, _)| *i == col))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }

    /// Exact sparse product `T·x`.
    pub fn apply(&self, x: &FiniteSequence) -> Result<FiniteSequence> {
        if x.len() > self.n_in {
            return Err(Error::DimensionMismatch {
                expected: self.n_in,
                found: x.len(),
            });
        }
        let out = self
            .rows
            .iter()
            .map(|row| row.iter().map(|(i, c)| c * x.get(*i)).sum())
            .collect();
        Ok(FiniteSequence::new(out))
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &SparseOperator) -> Result<SparseOperator> {
        if inner.n_out != self.n_in {
            return Err(Error::DimensionMismatch {
                expected: self.n_in,
                found: inner.n_out,
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .flat_map(|(mid, c)| inner.rows[*mid].iter().map(move |(i, d)| (*i, c * d)))
                    .collect()
            })
            .collect();
        SparseOperator::new(inner.n_in, self.n_out, rows)
    }

    /// Per-column `(Σ |coefficient|, nonzero count)`.
    pub fn column_stats(&self) -> Vec<(Rat, usize)> {
        let mut stats = vec![(Rat::zero(), 0usize); self.n_in];
        for row in &self.rows {
            for (i, c) in row {
                stats[*i].0 += c.abs();
                stats[*i].1 += 1;
            }
        }
        stats
    }

    /// `‖T‖_{l₁→l₁}`: the largest column abs-sum, attained at a unit vector.
    pub fn l1_operator_norm(&self) -> Rat {
        self.column_stats()
            .into_iter()
            .map(|(s, _)| s)
            .max()
            .unwrap_or_else(Rat::zero)
    }

    /// Largest column nonzero count; certifies `‖Tx‖₀ ≤ bound·‖x‖₀`.
    pub fn l0_expansion_bound(&self) -> usize {
        self.column_stats()
            .into_iter()
            .map(|(_, n)| n)
            .max()
            .unwrap_or(0)
    }

    /// Replaces one stored coefficient; used for fault injection.
    pub fn with_coefficient(&self, row: usize, col: usize, value: Rat) -> Result<Self> {
        if row >= self.n_out || col >= self.n_in {
            return Err(Error::DimensionMismatch {
                expected: self.n_out.max(self.n_in),
                found: row.max(col) + 1,
            });
        }
        let mut rows = self.rows.clone();
        rows[row].retain(|(i, _)| *i != col);
        rows[row].push((col, value));
        SparseOperator::new(self.n_in, self.n_out, rows)
    }
}
