//! Marcinkiewicz-type groups `M_α = {x : sup_k α_k x*_k < ∞}`.
//!
//! For an increasing weight with `α_{2k} ≤ R₁α_k` and
//! `β_k = Σ_{i≥k} α_i⁻¹ ≤ R₂·k/α_k`, the quasi-norm `‖x‖_α = sup_k α_k x*_k` is
//! equivalent to `sup_k β_k⁻¹ Σ_{i≥k} x*_i`:
//!
//! ```text
//! R₁⁻² R₂⁻¹ ‖x‖_α ≤ sup_k β_k⁻¹ Σ_{i≥k} x*_i ≤ ‖x‖_α
//! ```
//!
//! and the right-hand functional is an E-functional norm, which makes `M_α`
//! interpolation for (l₀, l₁).

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{from_usize, int, parse_rat, serde_rat, Rat};
use crate::sequence::FiniteSequence;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightKind {
    /// `α_k = k^q` with integer `q = 1/p ≥ 2`.
    Power { exponent: u32 },
    /// `α_k = k(k+1)`, `β_k = 1/k` exactly.
    TelescopingQuadratic,
    /// User table with exact `β`; valid up to its length.
    Table { alpha: Vec<Rat>, beta: Vec<Rat> },
}

/// A weight `α`, two-sided bounds on its tail sums `β`, and regularity constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFamily {
    pub kind: WeightKind,
    /// Doubling constant: `α_{2k} ≤ R₁ α_k`.
    pub r1: Rat,
    /// Tail constant: `β_k ≤ R₂ k / α_k`.
    pub r2: Rat,
}

impl WeightFamily {
    pub fn telescoping_quadratic() -> Self {
        Self {
            kind: WeightKind::TelescopingQuadratic,
            r1: int(4),
            r2: int(2),
        }
    }

    /// Tabulated weight. Missing constants are taken as the smallest values
    /// valid on the table.
    pub fn table(alpha: Vec<Rat>, beta: Vec<Rat>, r1: Option<Rat>, r2: Option<Rat>) -> Result<Self> {
        if alpha.is_empty() || alpha.len() != beta.len() {
            return Err(Error::InvalidInput(
                "weight table needs equally long, nonempty alpha and beta".into(),
            ));
        }
        if alpha.iter().chain(&beta).any(|v| !v.is_positive()) {
            return Err(Error::InvalidInput("weights must be positive".into()));
        }
        if alpha.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("alpha must be nondecreasing".into()));
        }
        if beta.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("beta must be nonincreasing".into()));
        }
        let n = alpha.len();
        let r1 = r1.unwrap_or_else(|| {
            (1..=n / 2)
                .map(|k| &alpha[2 * k - 1] / &alpha[k - 1])
                .max()
                .unwrap_or_else(Rat::one)
        });
        let r2 = r2.unwrap_or_else(|| {
            (1..=n)
                .map(|k| &beta[k - 1] * &alpha[k - 1] / from_usize(k))
                .max()
                .unwrap_or_else(Rat::one)
        });
        Ok(Self {
            kind: WeightKind::Table { alpha, beta },
            r1,
            r2,
        })
    }

    /// Largest `k` for which `α_k` is available (`None` = unbounded).
    pub fn horizon(&self) -> Option<usize> {
        match &self.kind {
            WeightKind::Table { alpha, .. } => Some(alpha.len()),
            _ => None,
        }
    }

    /// Whether `β` is known exactly.
    pub fn beta_is_exact(&self) -> bool {
        !matches!(self.kind, WeightKind::Power { .. })
    }

    fn check_index(&self, k: usize) -> Result<()> {
        assert!(k >= 1, "weights are indexed from 1");
        match self.horizon() {
            Some(h) if k > h => Err(Error::WeightHorizon {
                needed: k,
                available: h,
            }),
            _ => Ok(()),
        }
    }

    /// `α_k`, 1-based.
    pub fn alpha(&self, k: usize) -> Result<Rat> {
        self.check_index(k)?;
        Ok(match &self.kind {
            WeightKind::Power { exponent } => num_traits::pow(from_usize(k), *exponent as usize),
            WeightKind::TelescopingQuadratic => from_usize(k) * from_usize(k + 1),
            WeightKind::Table { alpha, .. } => alpha[k - 1].clone(),
        })
    }

    /// `(β_lower, β_upper)` bracketing `β_k = Σ_{i≥k} α_i⁻¹`.
    ///
    /// For `α_k = k^q` the integral comparison gives
    /// `k^{1−q}/(q−1) ≤ β_k ≤ q·k^{1−q}/(q−1)`.
    pub fn beta_bounds(&self, k: usize) -> Result<(Rat, Rat)> {
        self.check_index(k)?;
        Ok(match &self.kind {
            WeightKind::Power { exponent } => {
                let q = *exponent as usize;
                let base = Rat::one()
                    / (num_traits::pow(from_usize(k), q - 1) * from_usize(q - 1));
                let upper = &base * from_usize(q);
                (base, upper)
            }
            WeightKind::TelescopingQuadratic => {
                let b = Rat::one() / from_usize(k);
                (b.clone(), b)
            }
            WeightKind::Table { beta, .. } => (beta[k - 1].clone(), beta[k - 1].clone()),
        })
    }
}

/// `α_k = k^{1/p}` for `p ∈ (0, 1)` with `1/p` an integer.
pub fn power_weight(p: &Rat) -> Result<WeightFamily> {
    if !p.is_positive() || p >= &Rat::one() {
        return Err(Error::InvalidParameter(format!("p = {p} must lie in (0, 1)")));
    }
    let q = p.recip();
    if !q.is_integer() {
        return Err(Error::InvalidParameter(format!(
            "1/p = {q} must be an integer for exact weights"
        )));
    }
    let exponent: u32 = q
        .to_integer()
        .try_into()
        .map_err(|_| Error::InvalidParameter(format!("1/p = {q} is too large")))?;
    Ok(WeightFamily {
        kind: WeightKind::Power { exponent },
        r1: num_traits::pow(int(2), exponent as usize),
        r2: Rat::one() / (Rat::one() - p),
    })
}

/// `‖x‖_α = max_k α_k x*_k`.
pub fn norm_alpha(x: &FiniteSequence, w: &WeightFamily) -> Result<Rat> {
    let p = x.rearrange();
    let mut best = Rat::zero();
    for (k, v) in p.profile().iter().enumerate() {
        let value = w.alpha(k + 1)? * v;
        if value > best {
            best = value;
        }
    }
    Ok(best)
}

/// Enclosure `[lo, hi]` of a quantity known only through bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormInterval {
    #[serde(with = "serde_rat")]
    pub lo: Rat,
    #[serde(with = "serde_rat")]
    pub hi: Rat,
}

/// `sup_k β_k⁻¹ Σ_{i≥k} x*_i`, enclosed using the `β` bounds. A point when `β` is exact.
pub fn equiv_norm(x: &FiniteSequence, w: &WeightFamily) -> Result<NormInterval> {
    let tails = x.rearrange().tails();
    let mut lo = Rat::zero();
    let mut hi = Rat::zero();
    for k in 1..=tails.len() {
        let (beta_lo, beta_hi) = w.beta_bounds(k)?;
        lo = lo.max(tails.at(k) / beta_hi);
        hi = hi.max(tails.at(k) / beta_lo);
    }
    Ok(NormInterval { lo, hi })
}

/// Result of checking a weight regularity condition over `k = 1..=checked`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub holds: bool,
    pub failing_k: Option<usize>,
    /// Last index actually checked.
    pub checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn table_note(w: &WeightFamily, requested: usize, checked: usize) -> Option<String> {
    w.horizon().map(|h| {
        if checked < requested {
            format!("weight table of length {h}: certified for k <= {checked} only (requested {requested})")
        } else {
            format!("weight table of length {h}: certified on the table only")
        }
    })
}

/// `α_{2k} ≤ R₁ α_k` for `k = 1..=horizon` (truncated to the table for tabulated weights).
pub fn check_doubling(w: &WeightFamily, horizon: usize) -> Result<ConditionVerdict> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    let checked = w.horizon().map_or(horizon, |h| horizon.min(h / 2));
    let mut failing = None;
    for k in 1..=checked {
        if w.alpha(2 * k)? > &w.r1 * w.alpha(k)? {
            failing = Some(k);
            break;
        }
    }
    Ok(ConditionVerdict {
        holds: failing.is_none(),
        failing_k: failing,
        checked,
        note: table_note(w, horizon, checked),
    })
}

/// `β_k ≤ R₂ k/α_k` for `k = 1..=horizon`, using the upper bound on `β`.
pub fn check_tail_condition(w: &WeightFamily, horizon: usize) -> Result<ConditionVerdict> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    let checked = w.horizon().map_or(horizon, |h| horizon.min(h));
    let mut failing = None;
    for k in 1..=checked {
        let (_, beta_hi) = w.beta_bounds(k)?;
        if beta_hi > &w.r2 * from_usize(k) / w.alpha(k)? {
            failing = Some(k);
            break;
        }
    }
    Ok(ConditionVerdict {
        holds: failing.is_none(),
        failing_k: failing,
        checked,
        note: table_note(w, horizon, checked),
    })
}

/// Both sides of the norm equivalence for one `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SandwichVerdict {
    pub holds: bool,
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// `R₁⁻² R₂⁻¹ ‖x‖_α`.
    #[serde(with = "serde_rat")]
    pub scaled_alpha_norm: Rat,
    pub equiv_norm: NormInterval,
    #[serde(with = "serde_rat")]
    pub alpha_norm: Rat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Checks `R₁⁻²R₂⁻¹‖x‖_α ≤ equiv.lo` and `sup_k β_k⁻¹ tail_k ≤ ‖x‖_α`.
///
/// The upper side uses, for each `k`, the larger of the stored lower bound on
/// `β_k` and the partial sum `Σ_{i=k}^{n} α_i⁻¹` over the support, both of which
/// are exact lower bounds on `β_k`. For exact `β` this is the plain
/// `equiv.hi ≤ ‖x‖_α`.
pub fn sandwich_check(x: &FiniteSequence, w: &WeightFamily) -> Result<SandwichVerdict> {
    let alpha_norm = norm_alpha(x, w)?;
    let equiv = equiv_norm(x, w)?;
    let scaled = &alpha_norm / (&w.r1 * &w.r1 * &w.r2);
    let lower_holds = scaled <= equiv.lo;

    let tails = x.rearrange().tails();
    let n = tails.len();
    let mut partial = Rat::zero();
    let mut upper_holds = true;
    for k in (1..=n).rev() {
        partial += w.alpha(k)?.recip();
        let (beta_lo, _) = w.beta_bounds(k)?;
        let beta_certified = beta_lo.max(partial.clone());
        if tails.at(k) > &(&alpha_norm * &beta_certified) {
            upper_holds = false;
        }
    }
    let note = w
        .horizon()
        .map(|h| format!("weight table of length {h}: inequality certified on the table only"));
    Ok(SandwichVerdict {
        holds: lower_holds && upper_holds,
        lower_holds,
        upper_holds,
        scaled_alpha_norm: scaled,
        equiv_norm: equiv,
        alpha_norm,
        note,
    })
}

/// Weight description as read from JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightSpec {
    Power {
        p: String,
    },
    Pairwise {
        alpha: Vec<String>,
        beta: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r1: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r2: Option<String>,
    },
    TelescopingQuadratic,
}

impl WeightSpec {
    pub fn build(&self) -> Result<WeightFamily> {
        match self {
            WeightSpec::Power { p } => power_weight(&parse_rat(p)?),
            WeightSpec::TelescopingQuadratic => Ok(WeightFamily::telescoping_quadratic()),
            WeightSpec::Pairwise { alpha, beta, r1, r2 } => {
                let parse_all =
                    |v: &[String]| v.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>();
                let r1 = r1.as_deref().map(parse_rat).transpose()?;
                let r2 = r2.as_deref().map(parse_rat).transpose()?;
                WeightFamily::table(parse_all(alpha)?, parse_all(beta)?, r1, r2)
            }
        }
    }
}
