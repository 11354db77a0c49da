//! Finitely supported sequences, nonincreasing rearrangement, tail sums and
//! dilation operators.
//!
//! Indices in the public API follow the mathematical convention where noted
//! (`tail_sum(k)` with `k >= 1`); storage is 0-based.

use std::fmt;
use std::ops::{Add, Neg};

use num_traits::{Signed, Zero};

use crate::rational::{from_usize, Rat};

/// A finitely supported sequence of exact rationals. Entries past `len()` are zero.
///
/// Trailing zeros are dropped on construction, so two sequences that differ
/// only in explicit trailing zeros compare equal.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FiniteSequence {
    values: Vec<Rat>,
}

impl FiniteSequence {
    pub fn new(mut values: Vec<Rat>) -> Self {
        while values.last().is_some_and(Zero::is_zero) {
            values.pop();
        }
        Self { values }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| crate::rational::int(v)).collect())
    }

    /// Unit vector `e_k` (1-based `k`).
    pub fn unit(k: usize) -> Self {
        assert!(k >= 1, "unit vectors are indexed from 1");
        let mut values = vec![Rat::zero(); k];
        values[k - 1] = crate::rational::int(1);
        Self { values }
    }

    /// Position of the last nonzero entry (0 for the zero sequence).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Same as [`Self::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 0-based access; zero past the stored range.
    pub fn get(&self, index: usize) -> Rat {
        self.values.get(index).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rat> {
        self.values
    }

    /// `card supp x`.
    pub fn l0_norm(&self) -> usize {
        self.values.iter().filter(|v| !v.is_zero()).count()
    }

    /// `Σ |x_k|`.
    pub fn l1_norm(&self) -> Rat {
        self.values.iter().map(Signed::abs).sum()
    }

    pub fn scale(&self, factor: &Rat) -> Self {
        Self::new(self.values.iter().map(|v| v * factor).collect())
    }

    /// Nonincreasing rearrangement of `(|x_k|)`; shorthand for
    /// `SortedProfile::of(self)`.
    pub fn rearrange(&self) -> SortedProfile {
        SortedProfile::of(self)
    }

    /// `σ_m`: repeats each entry `m` times.
    pub fn dilate_up(&self, m: usize) -> Self {
        assert!(m >= 1, "dilation factor must be positive");
        let values = self
            .values
            .iter()
            .flat_map(|v| std::iter::repeat_n(v.clone(), m))
            .collect();
        Self::new(values)
    }

    /// `σ_{1/m}`: averages consecutive blocks of `m` entries, the last block
    /// padded with zeros.
    pub fn dilate_down(&self, m: usize) -> Self {
        assert!(m >= 1, "dilation factor must be positive");
        let width = from_usize(m);
        let values = self
            .values
            .chunks(m)
            .map(|block| block.iter().sum::<Rat>() / &width)
            .collect();
        Self::new(values)
    }
}

impl fmt::Debug for FiniteSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl From<Vec<Rat>> for FiniteSequence {
    fn from(values: Vec<Rat>) -> Self {
        Self::new(values)
    }
}

impl Add for &FiniteSequence {
    type Output = FiniteSequence;

    fn add(self, rhs: &FiniteSequence) -> FiniteSequence {
        let n = self.len().max(rhs.len());
        FiniteSequence::new((0..n).map(|i| self.get(i) + rhs.get(i)).collect())
    }
}

impl Neg for &FiniteSequence {
    type Output = FiniteSequence;

    fn neg(self) -> FiniteSequence {
        FiniteSequence::new(self.values.iter().map(|v| -v).collect())
    }
}

/// Where a profile slot came from: 0-based source index and sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedIndex {
    pub index: usize,
    pub negative: bool,
}

/// Nonincreasing rearrangement `x*` of a sequence together with the signed
/// permutation that recovers the sequence from it.
///
/// `profile` holds only the nonzero magnitudes; slot `s` came from
/// `recover[s]`. Ties are broken by ascending source index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedProfile {
    profile: Vec<Rat>,
    recover: Vec<SignedIndex>,
    source_len: usize,
}

impl SortedProfile {
    pub fn of(x: &FiniteSequence) -> Self {
        let mut slots: Vec<SignedIndex> = x
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(index, v)| SignedIndex {
                index,
                negative: v.is_negative(),
            })
            .collect();
        // stable: equal magnitudes keep ascending source order
        slots.sort_by(|p, q| x.values()[q.index].abs().cmp(&x.values()[p.index].abs()));
        let profile = slots.iter().map(|s| x.values()[s.index].abs()).collect();
        Self {
            profile,
            recover: slots,
            source_len: x.len(),
        }
    }

    /// Wraps values that are already a nonincreasing nonnegative profile.
    /// Returns `None` if the values are not sorted or contain negatives.
    pub fn from_sorted(values: Vec<Rat>) -> Option<Self> {
        let x = FiniteSequence::new(values);
        let sorted = x
            .values()
            .windows(2)
            .all(|w| w[0] >= w[1] && !w[1].is_negative());
        if !sorted || x.values().iter().any(|v| v.is_zero() || v.is_negative()) {
            return None;
        }
        Some(Self::of(&x))
    }

    pub fn profile(&self) -> &[Rat] {
        &self.profile
    }

    pub fn recover(&self) -> &[SignedIndex] {
        &self.recover
    }

    /// Length of the sequence this profile was taken from.
    pub fn source_len(&self) -> usize {
        self.source_len
    }

    /// Number of nonzero slots, i.e. `‖x‖₀`.
    pub fn len(&self) -> usize {
        self.profile.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profile.is_empty()
    }

    /// `x*_k` for 1-based `k`; zero past the support.
    pub fn at(&self, k: usize) -> Rat {
        assert!(k >= 1, "profile positions are 1-based");
        self.profile.get(k - 1).cloned().unwrap_or_else(Rat::zero)
    }

    /// `Σ_{i≥k} x*_i` for 1-based `k`.
    pub fn tail_sum(&self, k: usize) -> Rat {
        assert!(k >= 1, "tail sums start at k = 1");
        self.profile.iter().skip(k - 1).sum()
    }

    /// All tail sums at once.
    pub fn tails(&self) -> TailSums {
        TailSums::of(&self.profile)
    }

    /// The profile as a sequence in its own right.
    pub fn to_sequence(&self) -> FiniteSequence {
        FiniteSequence::new(self.profile.clone())
    }

    /// Applies the signed permutation to `profile`, reproducing the source.
    pub fn restore(&self) -> FiniteSequence {
        self.restore_from(&self.profile)
    }

    /// Applies the signed permutation to arbitrary slot values.
    pub fn restore_from(&self, slots: &[Rat]) -> FiniteSequence {
        let mut out = vec![Rat::zero(); self.source_len];
        for (slot, value) in self.recover.iter().zip(slots) {
            out[slot.index] = if slot.negative { -value } else { value.clone() };
        }
        FiniteSequence::new(out)
    }
}

/// Suffix sums `T_k = Σ_{i≥k} x_i` of a slice, indexed from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailSums {
    // suffix[k - 1] = T_k; one trailing zero so that T_{n+1} = 0
    suffix: Vec<Rat>,
}

impl TailSums {
    pub fn of(values: &[Rat]) -> Self {
        let mut suffix = vec![Rat::zero(); values.len() + 1];
        for i in (0..values.len()).rev() {
            suffix[i] = &suffix[i + 1] + &values[i];
        }
        Self { suffix }
    }

    /// `T_k`; zero for `k` past the end.
    pub fn at(&self, k: usize) -> &Rat {
        assert!(k >= 1, "tail sums start at k = 1");
        self.suffix.get(k - 1).unwrap_or(&self.suffix[self.suffix.len() - 1])
    }

    /// Number of stored entries (the `n` in `T_1 .. T_{n+1}`).
    pub fn len(&self) -> usize {
        self.suffix.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total(&self) -> &Rat {
        &self.suffix[0]
    }
}
