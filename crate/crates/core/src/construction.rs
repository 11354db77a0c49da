//! Explicit operators `T` with `Tb = a` for pairs in the (l₀, l₁) orbit.
//!
//! [`build_prop2_operator`] handles nonincreasing profiles with dominated tails
//! (`Σ_{i≥k} a*_i ≤ Σ_{i≥k} b*_i`) and yields `‖T‖_{l₁→l₁} ≤ 2` with at most
//! three nonzeros per column. [`build_orbit_operator`] reduces the general
//! orbit criterion to that case with a dilation and conjugates by the sorting
//! permutations.
//!
//! # The allocation
//!
//! Positions split into `J = {a_i > 2b_i}`, `I = {a_i < b_i}` and
//! `K = {b_i ≤ a_i ≤ 2b_i}`. Every `j_k ∈ J` has a deficit
//! `δ_k = a_{j_k} − b_{j_k}` that is paid for by surpluses `η_i = b_i − a_i` of
//! later `I` positions, consumed greedily left to right: a run of positions
//! taken whole, then one carrier position `i_k` taken partially (`η'`). The
//! remainder `η'' = η_{i_k} − η'` is forwarded to block `k + 1` only when
//! `i_k > j_{k+1}`; otherwise it is left in place.
//!
//! Row `j_k` of `T` collects the consumed surpluses as `η/b` coefficients on
//! top of its own diagonal 1. Every row outside `J` is the diagonal `a_i/b_i`,
//! which leaves exactly `a_i` after the transfers out of column `i`. Each
//! column therefore sums to at most 1 outside `K` and to `a_i/b_i ≤ 2` on `K`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorization::check_orbit_criterion;
use crate::operator::SparseOperator;
use crate::rational::{floor_usize, int, serde_rat, Rat};
use crate::sequence::{FiniteSequence, SignedIndex, SortedProfile, TailSums};

/// Three-way split of profile positions (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Partition {
    /// `a_i > 2b_i`, ascending.
    pub j: Vec<usize>,
    /// `a_i < b_i`, ascending.
    pub i: Vec<usize>,
    /// `b_i ≤ a_i ≤ 2b_i`, ascending.
    pub k: Vec<usize>,
}

/// One deficit block of the greedy allocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllocationBlock {
    /// Position `j_k ∈ J`.
    pub j: usize,
    /// `δ_k = a_{j_k} − b_{j_k}`.
    pub delta: Rat,
    /// `I_k`: positions whose whole surplus goes to this block.
    pub consumed: Vec<usize>,
    /// `i_k`: the partially consumed position.
    pub carrier: usize,
    /// `η'_{i_k}`, the part of `η_{i_k}` taken by this block.
    pub eta_prime: Rat,
    /// `η''_{i_k} = η_{i_k} − η'_{i_k}`.
    pub spill: Rat,
    /// Whether this block also took the previous block's spill.
    pub inherits_spill: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AllocationPlan {
    pub blocks: Vec<AllocationBlock>,
    /// `I'`: surplus positions not touched by any block.
    pub unused: Vec<usize>,
}

/// `(a_i, b_i)` for `i < n`, padding the shorter profile with zeros.
fn padded(a_star: &SortedProfile, b_star: &SortedProfile) -> (Vec<Rat>, Vec<Rat>) {
    let n = a_star.len().max(b_star.len());
    let pad = |p: &SortedProfile| {
        let mut v = p.profile().to_vec();
        v.resize(n, Rat::zero());
        v
    };
    (pad(a_star), pad(b_star))
}

pub fn partition_indices(a_star: &SortedProfile, b_star: &SortedProfile) -> Partition {
    let (a, b) = padded(a_star, b_star);
    partition_values(&a, &b)
}

fn partition_values(a: &[Rat], b: &[Rat]) -> Partition {
    let two = int(2);
    let mut part = Partition::default();
    for (pos, (ai, bi)) in a.iter().zip(b).enumerate() {
        if ai > &(&two * bi) {
            part.j.push(pos);
        } else if ai < bi {
            part.i.push(pos);
        } else {
            part.k.push(pos);
        }
    }
    part
}

/// Greedy left-to-right allocation of surpluses to deficits.
///
/// Requires dominated tails; otherwise the candidates run out and the result
/// is [`Error::Infeasible`] naming the 1-based block.
pub fn allocate_greedy(
    a_star: &SortedProfile,
    b_star: &SortedProfile,
    partition: &Partition,
) -> Result<AllocationPlan> {
    let (a, b) = padded(a_star, b_star);
    allocate_values(&a, &b, partition)
}

fn allocate_values(a: &[Rat], b: &[Rat], partition: &Partition) -> Result<AllocationPlan> {
    let surplus = |i: usize| &b[i] - &a[i];
    let mut blocks: Vec<AllocationBlock> = Vec::with_capacity(partition.j.len());
    let mut front = 0usize;
    let mut touched = vec![false; partition.i.len()];

    for (k, &j) in partition.j.iter().enumerate() {
        let infeasible = Error::Infeasible { block: k + 1 };
        if b[j].is_zero() {
            return Err(infeasible);
        }
        let delta = &a[j] - &b[j];
        let inherited = blocks
            .last()
            .filter(|prev| prev.carrier > j)
            .map(|prev| prev.spill.clone());
        let need = match &inherited {
            Some(spill) => &delta - spill,
            None => delta.clone(),
        };
        if !need.is_positive() {
            return Err(infeasible);
        }
        while front < partition.i.len() && partition.i[front] < j {
            front += 1;
        }
        let mut taken = Rat::zero();
        let mut consumed = Vec::new();
        let (carrier, eta_prime, spill) = loop {
            let Some(&pos) = partition.i.get(front) else {
                return Err(infeasible);
            };
            touched[front] = true;
            front += 1;
            let eta = surplus(pos);
            let total = &taken + &eta;
            if total < need {
                taken = total;
                consumed.push(pos);
            } else {
                let eta_prime = &need - &taken;
                let spill = eta - &eta_prime;
                break (pos, eta_prime, spill);
            }
        };
        blocks.push(AllocationBlock {
            j,
            delta,
            consumed,
            carrier,
            eta_prime,
            spill,
            inherits_spill: inherited.is_some(),
        });
    }
    let unused = partition
        .i
        .iter()
        .zip(&touched)
        .filter(|(_, t)| !**t)
        .map(|(p, _)| *p)
        .collect();
    Ok(AllocationPlan { blocks, unused })
}

/// Assembles the operator of the allocation: `b` (length `n_in`) to `a`
/// (length `n_out`), both profiles padded to a common length.
fn assemble(
    a: &[Rat],
    b: &[Rat],
    partition: &Partition,
    plan: &AllocationPlan,
    n_in: usize,
    n_out: usize,
) -> Result<SparseOperator> {
    let n = a.len();
    let mut rows: Vec<Vec<(usize, Rat)>> = vec![Vec::new(); n];
    let mut in_j = vec![false; n];
    for &j in &partition.j {
        in_j[j] = true;
    }
    for pos in (0..n).filter(|&p| !in_j[p]) {
        if !b[pos].is_zero() && !a[pos].is_zero() {
            rows[pos].push((pos, &a[pos] / &b[pos]));
        }
    }
    let mut prev: Option<&AllocationBlock> = None;
    for block in &plan.blocks {
        let row = &mut rows[block.j];
        row.push((block.j, Rat::one()));
        for &i in &block.consumed {
            row.push((i, (&b[i] - &a[i]) / &b[i]));
        }
        row.push((block.carrier, &block.eta_prime / &b[block.carrier]));
        if block.inherits_spill {
            let prev = prev.expect("first block cannot inherit a spill");
            if !prev.spill.is_zero() {
                row.push((prev.carrier, &prev.spill / &b[prev.carrier]));
            }
        }
        prev = Some(block);
    }
    if rows[n_out..].iter().any(|r| !r.is_empty()) {
        return Err(Error::InvalidInput(
            "operator has nonzero rows past the support of a".into(),
        ));
    }
    rows.truncate(n_out);
    SparseOperator::new(n_in, n_out, rows)
}

/// Output of [`prop2_on_profiles`]: the operator and the bookkeeping that produced it.
struct Prop2Parts {
    operator: SparseOperator,
    partition: Partition,
    plan: AllocationPlan,
}

fn prop2_on_profiles(a_star: &SortedProfile, b_star: &SortedProfile) -> Result<Prop2Parts> {
    let ta = a_star.tails();
    let tb = b_star.tails();
    if let Some(k) = (1..=ta.len()).find(|&k| ta.at(k) > tb.at(k)) {
        return Err(Error::DominationFails { witness_k: k });
    }
    let (a, b) = padded(a_star, b_star);
    let partition = partition_values(&a, &b);
    let plan = allocate_values(&a, &b, &partition)?;
    let operator = assemble(&a, &b, &partition, &plan, b_star.len(), a_star.len())?;
    Ok(Prop2Parts {
        operator,
        partition,
        plan,
    })
}

/// An operator together with bounds recomputed from its entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorCertificate {
    pub operator: SparseOperator,
    /// Largest column abs-sum (`‖T‖_{l₁→l₁}`).
    pub l1_bound: Rat,
    /// Largest column nonzero count (bounds `‖T‖_{l₀→l₀}`).
    pub l0_expansion: usize,
    pub pipeline: Provenance,
}

impl OperatorCertificate {
    pub fn new(operator: SparseOperator, pipeline: Provenance) -> Self {
        let l1_bound = operator.l1_operator_norm();
        let l0_expansion = operator.l0_expansion_bound();
        Self {
            operator,
            l1_bound,
            l0_expansion,
            pipeline,
        }
    }

    /// `max(l1_bound, l0_expansion)`, a bound on `‖T‖_{(l₀,l₁)}`.
    pub fn orbit_norm_bound(&self) -> Rat {
        self.l1_bound.clone().max(Rat::from_integer(self.l0_expansion.into()))
    }
}

/// How a certificate was produced. Indices are 1-based; recovery maps are
/// signed (`-3` means position 3 with a minus sign).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: PipelineKind,
    #[serde(with = "serde_rat::option", default)]
    pub constant: Option<Rat>,
    #[serde(default)]
    pub dilation: Option<Dilation>,
    #[serde(default)]
    pub partition: PartitionRecord,
    #[serde(default)]
    pub blocks: Vec<BlockRecord>,
    #[serde(default)]
    pub unused: Vec<usize>,
    #[serde(default)]
    pub a_recover: Vec<i64>,
    #[serde(default)]
    pub b_recover: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineKind {
    /// Dominated profiles, no dilation or permutation.
    Prop2,
    /// General pair under the orbit criterion with a given constant.
    Orbit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dilation {
    pub direction: DilationDirection,
    pub factor: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DilationDirection {
    Up,
    Down,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PartitionRecord {
    pub j: Vec<usize>,
    pub i: Vec<usize>,
    pub k: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub j: usize,
    #[serde(with = "serde_rat")]
    pub delta: Rat,
    pub consumed: Vec<usize>,
    pub carrier: usize,
    #[serde(with = "serde_rat")]
    pub eta_prime: Rat,
    #[serde(with = "serde_rat")]
    pub spill: Rat,
    pub inherits_spill: bool,
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn signed_record(slots: &[SignedIndex]) -> Vec<i64> {
    slots
        .iter()
        .map(|s| {
            let pos = s.index as i64 + 1;
            if s.negative {
                -pos
            } else {
                pos
            }
        })
        .collect()
}

impl Provenance {
    fn record(kind: PipelineKind, partition: &Partition, plan: &AllocationPlan) -> Self {
        Self {
            kind,
            constant: None,
            dilation: None,
            partition: PartitionRecord {
                j: one_based(&partition.j),
                i: one_based(&partition.i),
                k: one_based(&partition.k),
            },
            blocks: plan
                .blocks
                .iter()
                .map(|b| BlockRecord {
                    j: b.j + 1,
                    delta: b.delta.clone(),
                    consumed: one_based(&b.consumed),
                    carrier: b.carrier + 1,
                    eta_prime: b.eta_prime.clone(),
                    spill: b.spill.clone(),
                    inherits_spill: b.inherits_spill,
                })
                .collect(),
            unused: one_based(&plan.unused),
            a_recover: Vec::new(),
            b_recover: Vec::new(),
        }
    }

    /// Guaranteed ceilings `(l1, l0 expansion)` for certificates of this kind.
    ///
    /// Dominated profiles: `(2, 3)`. Orbit criterion with `C > 1`:
    /// `(6([C]+1), 9([C]+1))`. With `C ≤ 1` and `m = [1/C]`: `(2/m, 3)`.
    pub fn ceilings(&self) -> (Rat, usize) {
        match (self.kind, &self.constant) {
            (PipelineKind::Prop2, _) | (PipelineKind::Orbit, None) => (int(2), 3),
            (PipelineKind::Orbit, Some(c)) => orbit_ceilings(c),
        }
    }
}

/// Theoretical `(l1, l0 expansion)` ceilings for the orbit pipeline at constant `c`.
pub fn orbit_ceilings(c: &Rat) -> (Rat, usize) {
    if c > &Rat::one() {
        let m = floor_usize(c) + 1;
        (int(6) * Rat::from_integer(m.into()), 9 * m)
    } else {
        let m = floor_usize(&c.recip());
        (int(2) / Rat::from_integer(m.into()), 3)
    }
}

/// Operator for nonincreasing profiles with dominated tails: `T·b* = a*`,
/// column abs-sums at most 2, at most 3 nonzeros per column.
pub fn build_prop2_operator(
    a_star: &SortedProfile,
    b_star: &SortedProfile,
) -> Result<OperatorCertificate> {
    let parts = prop2_on_profiles(a_star, b_star)?;
    let pipeline = Provenance::record(PipelineKind::Prop2, &parts.partition, &parts.plan);
    Ok(OperatorCertificate::new(parts.operator, pipeline))
}

/// Dilation used to reduce the orbit criterion at constant `c` to dominated tails.
pub fn orbit_dilation(c: &Rat) -> Dilation {
    if c > &Rat::one() {
        Dilation {
            direction: DilationDirection::Up,
            factor: 3 * (floor_usize(c) + 1),
        }
    } else {
        Dilation {
            direction: DilationDirection::Down,
            factor: floor_usize(&c.recip()),
        }
    }
}

/// Applies a dilation to a profile (the result is again nonincreasing).
pub fn dilate_profile(b_star: &SortedProfile, dilation: Dilation) -> FiniteSequence {
    let seq = b_star.to_sequence();
    match dilation.direction {
        DilationDirection::Up => seq.dilate_up(dilation.factor),
        DilationDirection::Down => seq.dilate_down(dilation.factor),
    }
}

/// Operator `T` with `Tb = a` under the orbit criterion at constant `c`.
///
/// `T = P_a ∘ Q' ∘ σ ∘ P_b`, where `P_b` sorts `b`, `σ` is `σ_{3([C]+1)}` for
/// `C > 1` and `σ_{1/[1/C]}` otherwise, `Q'` is the dominated-profile operator
/// for `(a*, σb*)`, and `P_a` unsorts onto `a`.
pub fn build_orbit_operator(
    a: &FiniteSequence,
    b: &FiniteSequence,
    c: &Rat,
) -> Result<OperatorCertificate> {
    if !c.is_positive() {
        return Err(Error::InvalidParameter("orbit constant must be positive".into()));
    }
    let verdict = check_orbit_criterion(a, b, c);
    if let Some(k) = verdict.witness_k {
        return Err(Error::CriterionFails { witness_k: k });
    }
    let pa = a.rearrange();
    let pb = b.rearrange();
    let dilation = orbit_dilation(c);
    let target = dilate_profile(&pb, dilation);
    let target_profile = target.rearrange();

    let ta = pa.tails();
    let tt = TailSums::of(target.values());
    if let Some(k) = (1..=ta.len()).find(|&k| ta.at(k) > tt.at(k)) {
        return Err(Error::IntermediateMajorizationFails { k });
    }
    let parts = prop2_on_profiles(&pa, &target_profile)?;

    let sigma = match dilation.direction {
        DilationDirection::Up => SparseOperator::dilation_up(pb.len(), dilation.factor),
        DilationDirection::Down => SparseOperator::dilation_down(pb.len(), dilation.factor),
    };
    let operator = SparseOperator::unsorting(&pa)
        .compose(&parts.operator)?
        .compose(&sigma)?
        .compose(&SparseOperator::sorting(&pb))?;

    let mut pipeline = Provenance::record(PipelineKind::Orbit, &parts.partition, &parts.plan);
    pipeline.constant = Some(c.clone());
    pipeline.dilation = Some(dilation);
    pipeline.a_recover = signed_record(pa.recover());
    pipeline.b_recover = signed_record(pb.recover());
    Ok(OperatorCertificate::new(operator, pipeline))
}
