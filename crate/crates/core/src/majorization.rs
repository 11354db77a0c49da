//! Membership criteria for orbits of the pair (l₀, l₁).
//!
//! All criteria compare tail sums `A_k = Σ_{i≥k} a*_i` against tail sums of `b*`.
//! The orbit criterion with constant `C` reads
//! `A_k ≤ C·B_{max(1, ⌊k/C⌋)}` for every `k ≥ 1`; the start index is clamped to 1
//! because `⌊k/C⌋` vanishes once `C > k`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::{k_functional, PiecewiseLinearConcave};
use crate::rational::{clamped_start, floor_usize, from_usize, int, serde_rat, Rat};
use crate::sequence::{FiniteSequence, TailSums};

/// Outcome of a criterion check. `witness_k` is the first failing tail index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitVerdict {
    pub holds: bool,
    pub witness_k: Option<usize>,
    #[serde(with = "serde_rat")]
    pub constant: Rat,
}

impl OrbitVerdict {
    fn from_witness(witness_k: Option<usize>, constant: Rat) -> Self {
        Self {
            holds: witness_k.is_none(),
            witness_k,
            constant,
        }
    }
}

/// `Σ_{i≥k} a*_i ≤ Σ_{i≥k} b*_i` for all `k ≥ 1`.
pub fn check_tail_domination(a: &FiniteSequence, b: &FiniteSequence) -> OrbitVerdict {
    let ta = a.rearrange().tails();
    let tb = b.rearrange().tails();
    let witness = (1..=ta.len()).find(|&k| ta.at(k) > tb.at(k));
    OrbitVerdict::from_witness(witness, Rat::one())
}

/// The orbit criterion `A_k ≤ C·B_{max(1,⌊k/C⌋)}` for all `k ≥ 1`.
pub fn check_orbit_criterion(a: &FiniteSequence, b: &FiniteSequence, c: &Rat) -> OrbitVerdict {
    assert!(c.is_positive(), "orbit constant must be positive");
    let ta = a.rearrange().tails();
    let tb = b.rearrange().tails();
    criterion_on_tails(&ta, &tb, c)
}

pub(crate) fn criterion_on_tails(ta: &TailSums, tb: &TailSums, c: &Rat) -> OrbitVerdict {
    let witness = (1..=ta.len()).find(|&k| ta.at(k) > &(c * tb.at(clamped_start(k, c))));
    OrbitVerdict::from_witness(witness, c.clone())
}

/// Bracket `[lo, hi]` around the least constant for which the orbit criterion holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantInterval {
    #[serde(with = "serde_rat")]
    pub lo: Rat,
    #[serde(with = "serde_rat")]
    pub hi: Rat,
}

/// Locates the least orbit constant by bisection.
///
/// The criterion is monotone in `C`: a larger `C` raises the factor and lowers
/// the clamped start index. On return the criterion holds at `hi`, fails at
/// `lo` (unless `a = 0`, where it holds for every `C > 0` and `lo = 0`), and
/// `hi − lo ≤ precision`.
pub fn orbit_constant(
    a: &FiniteSequence,
    b: &FiniteSequence,
    precision: &Rat,
) -> Result<ConstantInterval> {
    if !precision.is_positive() {
        return Err(Error::InvalidParameter("precision must be positive".into()));
    }
    if a.is_zero() {
        return Ok(ConstantInterval {
            lo: Rat::zero(),
            hi: precision.clone(),
        });
    }
    if b.is_zero() {
        return Err(Error::NoFiniteConstant);
    }
    let ta = a.rearrange().tails();
    let tb = b.rearrange().tails();
    let holds = |c: &Rat| criterion_on_tails(&ta, &tb, c).holds;

    // holds once C ≥ max(‖a‖₀, ‖a‖₁/‖b‖₁); the cap only guards termination
    let min_tail = (1..=tb.len()).map(|k| tb.at(k)).min().cloned().unwrap_or_else(Rat::one);
    let cap = int(2) * ta.total() * from_usize(1 + ta.len()) / min_tail;
    let two = int(2);

    let (mut lo, mut hi) = if holds(&Rat::one()) {
        let mut hi = Rat::one();
        let mut lo = &hi / &two;
        while holds(&lo) {
            hi = lo.clone();
            lo = &lo / &two;
        }
        (lo, hi)
    } else {
        let mut lo = Rat::one();
        let mut hi = &lo * &two;
        while !holds(&hi) {
            if hi > cap {
                return Err(Error::NoFiniteConstant);
            }
            lo = hi.clone();
            hi = &hi * &two;
        }
        (lo, hi)
    };
    while &hi - &lo > *precision {
        let mid = (&lo + &hi) / &two;
        if holds(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ConstantInterval { lo, hi })
}

/// `sup_{t>0} K(t, a)/K(t, b)`, computed exactly.
///
/// Between consecutive breakpoints of either envelope both functionals are
/// affine, so the ratio is monotone there; the supremum is attained at a
/// breakpoint or in one of the limits `t → 0⁺` (`‖a‖₁/‖b‖₁`) and `t → ∞`
/// (`‖a‖₀/‖b‖₀`).
pub fn k_orbit_constant(a: &FiniteSequence, b: &FiniteSequence) -> Result<Rat> {
    if a.is_zero() {
        return Ok(Rat::zero());
    }
    if b.is_zero() {
        return Err(Error::Unbounded);
    }
    let ka = k_functional(a);
    let kb = k_functional(b);
    Ok(k_ratio_sup(&ka, &kb, a, b))
}

fn k_ratio_sup(
    ka: &PiecewiseLinearConcave,
    kb: &PiecewiseLinearConcave,
    a: &FiniteSequence,
    b: &FiniteSequence,
) -> Rat {
    let mut best = a.l1_norm() / b.l1_norm();
    let at_infinity = from_usize(a.l0_norm()) / from_usize(b.l0_norm());
    best = best.max(at_infinity);
    for t in ka.breakpoints().iter().chain(kb.breakpoints()) {
        let ratio = ka.eval(t) / kb.eval(t);
        if ratio > best {
            best = ratio;
        }
    }
    best
}

/// `E(t, a) ≤ C·E(t/C, b)` for all `t > 0`.
///
/// Both sides are right-continuous step functions: the left jumps at integers,
/// the right at multiples of `C`. Past `t = ‖a‖₀` the left side is zero. The
/// check evaluates one point inside every cell of the merged jump grid.
pub fn e_orbit_check(a: &FiniteSequence, b: &FiniteSequence, c: &Rat) -> OrbitVerdict {
    assert!(c.is_positive(), "orbit constant must be positive");
    let ta = a.rearrange().tails();
    let tb = b.rearrange().tails();
    let witness = scaled_e_chain(&ta, &Rat::one(), &tb, c, c);
    OrbitVerdict::from_witness(witness, c.clone())
}

/// Checks `E(λ·t, a) ≤ μ·E(t/ν, b)` for all `t > 0`, returning the tail index
/// `⌊λ·t⌋ + 1` of the first failing cell.
pub(crate) fn scaled_e_chain(
    ta: &TailSums,
    lambda: &Rat,
    tb: &TailSums,
    mu: &Rat,
    nu: &Rat,
) -> Option<usize> {
    let n = ta.len();
    if n == 0 {
        return None;
    }
    // left side jumps at t = j/λ, right side at t = ν·j
    let horizon = from_usize(n) / lambda;
    let mut grid: Vec<Rat> = (0..=n).map(|j| from_usize(j) / lambda).collect();
    let mut j = 1usize;
    loop {
        let p = from_usize(j) * nu;
        if p >= horizon {
            break;
        }
        grid.push(p);
        j += 1;
    }
    grid.sort();
    grid.dedup();
    let two = int(2);
    grid.windows(2).find_map(|w| {
        let t = (&w[0] + &w[1]) / &two;
        let k = floor_usize(&(lambda * &t)) + 1;
        let rhs_index = floor_usize(&(&t / nu)) + 1;
        (ta.at(k) > &(mu * tb.at(rhs_index))).then_some(k)
    })
}
