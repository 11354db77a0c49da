//! E-, K- and E*-functionals of the pair (l₀, l₁).
//!
//! For a finitely supported `x` with rearrangement `x*`:
//!
//! * `E(t, x) = Σ_{i > ⌊t⌋} x*_i`, the best l₁ error from at most `t` nonzeros;
//! * `K(t, x) = min_{0≤k≤‖x‖₀} (k + t·Σ_{i>k} x*_i)`, the lower envelope of
//!   `‖x‖₀ + 1` lines, since an optimal split copies `x` on its `k` largest
//!   entries;
//! * `E*(t, x) = sup_{s>0} (K(s, x) − t)/s`, the greatest convex minorant of E.

use num_traits::{Signed, Zero};

use crate::rational::{floor_usize, from_usize, Rat};
use crate::sequence::FiniteSequence;

/// `E(t, x; l₀, l₁)` for `t ≥ 0`.
pub fn e_functional(x: &FiniteSequence, t: &Rat) -> Rat {
    assert!(!t.is_negative(), "E-functional needs t >= 0");
    let k = floor_usize(t).saturating_add(1);
    x.rearrange().tail_sum(k)
}

/// One affine piece `slope·t + intercept` of a [`PiecewiseLinearConcave`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub slope: Rat,
    pub intercept: Rat,
}

impl Segment {
    pub fn eval(&self, t: &Rat) -> Rat {
        &self.slope * t + &self.intercept
    }
}

/// Concave piecewise linear function on `[0, ∞)` given as a lower envelope of lines.
///
/// `segments[i]` is active on `[breakpoints[i-1], breakpoints[i]]` with
/// `breakpoints[-1] = 0` and `breakpoints[len] = ∞`. Slopes strictly decrease.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinearConcave {
    segments: Vec<Segment>,
    breakpoints: Vec<Rat>,
}

impl PiecewiseLinearConcave {
    /// Lower envelope of lines given in order of strictly decreasing slope.
    ///
    /// Lines that only touch the envelope at a single point are dropped.
    pub fn lower_envelope(lines: impl IntoIterator<Item = Segment>) -> Self {
        let mut segments: Vec<Segment> = Vec::new();
        let mut breakpoints: Vec<Rat> = Vec::new();
        for line in lines {
            if let Some(last) = segments.last() {
                assert!(line.slope < last.slope, "slopes must strictly decrease");
            }
            while let Some(last) = segments.last() {
                let cross = crossing(last, &line);
                // the new line is below everywhere on [0, ∞)
                if !cross.is_positive() {
                    segments.pop();
                    breakpoints.pop();
                    continue;
                }
                match breakpoints.last() {
                    Some(prev) if &cross <= prev => {
                        segments.pop();
                        breakpoints.pop();
                    }
                    _ => {
                        breakpoints.push(cross);
                        break;
                    }
                }
            }
            segments.push(line);
        }
        Self {
            segments,
            breakpoints,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Interior breakpoints, strictly increasing.
    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    /// Value at `t ≥ 0`.
    pub fn eval(&self, t: &Rat) -> Rat {
        let i = self.breakpoints.partition_point(|b| b < t);
        self.segments[i].eval(t)
    }

    /// Limit as `t → ∞` when the last segment is flat.
    pub fn flat_limit(&self) -> Option<&Rat> {
        let last = self.segments.last()?;
        last.slope.is_zero().then_some(&last.intercept)
    }

    /// Slope at `0⁺`.
    pub fn initial_slope(&self) -> &Rat {
        &self.segments[0].slope
    }
}

// `t` where two lines meet; the first line has the larger slope.
fn crossing(steep: &Segment, flat: &Segment) -> Rat {
    (&flat.intercept - &steep.intercept) / (&steep.slope - &flat.slope)
}

/// The K-functional `t ↦ K(t, x; l₀, l₁)` as a concave envelope.
pub fn k_functional(x: &FiniteSequence) -> PiecewiseLinearConcave {
    let tails = x.rearrange().tails();
    let lines = (0..=tails.len()).map(|k| Segment {
        slope: tails.at(k + 1).clone(),
        intercept: from_usize(k),
    });
    PiecewiseLinearConcave::lower_envelope(lines)
}

/// `K(t, x; l₀, l₁)` for `t > 0`.
pub fn k_eval(x: &FiniteSequence, t: &Rat) -> Rat {
    assert!(t.is_positive(), "K-functional needs t > 0");
    k_functional(x).eval(t)
}

/// `E*(t, x) = sup_{s>0} (K(s, x) − t)/s` for `t ≥ 0`.
///
/// On each segment `(c + m·s − t)/s = m + (c − t)/s` is monotone, so the
/// supremum is the largest of the breakpoint values, the `s → ∞` limit (0),
/// and, for `t = 0`, the `s → 0⁺` limit (the initial slope `‖x‖₁`).
pub fn e_star(x: &FiniteSequence, t: &Rat) -> Rat {
    assert!(!t.is_negative(), "E* needs t >= 0");
    let k = k_functional(x);
    e_star_of(&k, t)
}

pub(crate) fn e_star_of(k: &PiecewiseLinearConcave, t: &Rat) -> Rat {
    let mut best = Rat::zero();
    if t.is_zero() {
        best = best.max(k.initial_slope().clone());
    }
    for s in k.breakpoints() {
        let value = (k.eval(s) - t) / s;
        if value > best {
            best = value;
        }
    }
    best
}
