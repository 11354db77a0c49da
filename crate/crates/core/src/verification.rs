//! Independent oracles, seeded instance generators and certificate checks.
//!
//! The subset oracles enumerate every support subset and never look at the
//! rearrangement, so they are independent of the closed forms in
//! [`crate::functional`].

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::construction::{
    build_orbit_operator, orbit_ceilings, OperatorCertificate, PipelineKind, Provenance,
};
use crate::error::{Error, Result};
use crate::majorization::{check_orbit_criterion, criterion_on_tails, k_orbit_constant, scaled_e_chain, OrbitVerdict};
use crate::operator::SparseOperator;
use crate::rational::{floor_usize, format_rat, from_usize, int, rat, Rat};
use crate::sequence::{FiniteSequence, SortedProfile};

/// Largest support the subset oracles accept.
pub const ORACLE_LIMIT: usize = 16;

/// Best kept mass for every support size, found by enumerating all subsets.
///
/// `kept[c] = max{Σ_{i∈S} |x_i| : |S| = c}` over subsets of the support.
#[derive(Clone, Debug)]
pub struct SubsetOracle {
    total: Rat,
    kept: Vec<Rat>,
}

impl SubsetOracle {
    pub fn new(x: &FiniteSequence) -> Result<Self> {
        let support: Vec<Rat> = x
            .values()
            .iter()
            .filter(|v| !v.is_zero())
            .map(Signed::abs)
            .collect();
        let n = support.len();
        if n > ORACLE_LIMIT {
            return Err(Error::OracleSizeLimit {
                size: n,
                limit: ORACLE_LIMIT,
            });
        }
        let mut sums = vec![Rat::zero(); 1 << n];
        let mut kept = vec![Rat::zero(); n + 1];
        for mask in 1usize..(1 << n) {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = &sums[mask & (mask - 1)] + &support[low];
            let c = mask.count_ones() as usize;
            if sums[mask] > kept[c] {
                kept[c] = sums[mask].clone();
            }
        }
        let total = support.iter().sum();
        Ok(Self { total, kept })
    }

    /// `inf{|S| + t·Σ_{i∉S} |x_i|}`.
    pub fn k_value(&self, t: &Rat) -> Rat {
        self.kept
            .iter()
            .enumerate()
            .map(|(c, kept)| from_usize(c) + t * (&self.total - kept))
            .min()
            .expect("at least the empty subset")
    }

    /// `min{‖x − x₀‖₁ : |supp x₀| ≤ t}`.
    pub fn e_value(&self, t: &Rat) -> Rat {
        let cap = floor_usize(t).min(self.kept.len() - 1);
        self.kept[..=cap]
            .iter()
            .map(|kept| &self.total - kept)
            .min()
            .expect("at least the empty subset")
    }
}

/// K-functional by exhaustive subset enumeration (`‖x‖₀ ≤ 16`).
pub fn brute_k_functional(x: &FiniteSequence, t: &Rat) -> Result<Rat> {
    if !t.is_positive() {
        return Err(Error::InvalidParameter("t must be positive".into()));
    }
    Ok(SubsetOracle::new(x)?.k_value(t))
}

/// E-functional by exhaustive subset enumeration (`‖x‖₀ ≤ 16`).
pub fn brute_e_functional(x: &FiniteSequence, t: &Rat) -> Result<Rat> {
    if t.is_negative() {
        return Err(Error::InvalidParameter("t must be nonnegative".into()));
    }
    Ok(SubsetOracle::new(x)?.e_value(t))
}

/// Seeded source of pairs `(a, b)` with `Σ_{i≥k} a*_i ≤ Σ_{i≥k} b*_i`.
///
/// `b` is a random nonincreasing profile with entries on the grid `1/24`,
/// numerators up to `24·magnitude`. `a` starts at `b` and undergoes random
/// mass-decreasing moves, each followed by re-sorting: shifting mass to an
/// earlier position, or deleting mass. Both moves and sorting can only lower
/// tail sums.
#[derive(Clone, Debug)]
pub struct DominatedPairGenerator {
    pub seed: u64,
    pub n: usize,
    pub magnitude: u64,
    /// Number of moves; `None` picks a random count in `0..=2n`.
    pub perturbations: Option<usize>,
}

const GRID: i64 = 24;

impl DominatedPairGenerator {
    pub fn new(seed: u64, n: usize, magnitude: u64) -> Self {
        Self {
            seed,
            n,
            magnitude,
            perturbations: None,
        }
    }
}

pub fn random_dominated_pair(g: &DominatedPairGenerator) -> (FiniteSequence, FiniteSequence) {
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let top = (GRID as u64 * g.magnitude.max(1)) as i64;
    let mut b: Vec<i64> = (0..g.n).map(|_| rng.random_range(1..=top)).collect();
    b.sort_unstable_by(|x, y| y.cmp(x));
    let mut a = b.clone();
    let moves = g
        .perturbations
        .unwrap_or_else(|| rng.random_range(0..=2 * g.n));
    for _ in 0..moves {
        if g.n < 2 {
            break;
        }
        let from = rng.random_range(1..g.n);
        if a[from] == 0 {
            continue;
        }
        if rng.random_bool(0.75) {
            // early targets build large deficits and long spill chains
            let to = if rng.random_bool(0.5) {
                rng.random_range(0..from.min(3))
            } else {
                rng.random_range(0..from)
            };
            let amount = rng.random_range(1..=a[from]);
            a[from] -= amount;
            a[to] += amount;
        } else {
            a[from] = rng.random_range(0..a[from]);
        }
        a.sort_unstable_by(|x, y| y.cmp(x));
    }
    let to_seq = |v: &[i64]| FiniteSequence::new(v.iter().map(|&x| rat(x, GRID)).collect());
    (to_seq(&a), to_seq(&b))
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub check: String,
    pub pass: bool,
    pub details: String,
}

impl Check {
    fn new(check: &str, pass: bool, details: String) -> Self {
        Self {
            check: check.to_string(),
            pass,
            details,
        }
    }
}

/// An ordered list of checks; serialized as a JSON array.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Recomputes everything a certificate claims: `Tb = a`, both column bounds,
/// and the ceilings that its construction guarantees.
pub fn verify_certificate(
    cert: &OperatorCertificate,
    a: &FiniteSequence,
    b: &FiniteSequence,
) -> Report {
    let mut report = Report::default();
    let op = &cert.operator;
    let fits = b.len() <= op.n_in() && a.len() <= op.n_out();
    report.push(Check::new(
        "dimensions",
        fits,
        format!(
            "operator {}x{} (out x in), |a| = {}, |b| = {}",
            op.n_out(),
            op.n_in(),
            a.len(),
            b.len()
        ),
    ));
    match op.apply(b) {
        Ok(image) => {
            let n = image.len().max(a.len());
            let mismatch = (0..n).find(|&i| image.get(i) != a.get(i));
            let details = match mismatch {
                None => "Tb = a exactly".to_string(),
                Some(i) => format!(
                    "first mismatch at index {}: (Tb) = {}, a = {}",
                    i + 1,
                    format_rat(&image.get(i)),
                    format_rat(&a.get(i))
                ),
            };
            report.push(Check::new("reproduces", mismatch.is_none(), details));
        }
        Err(e) => report.push(Check::new("reproduces", false, e.to_string())),
    }

    let l1 = op.l1_operator_norm();
    let l0 = op.l0_expansion_bound();
    report.push(Check::new(
        "l1_bound",
        l1 <= cert.l1_bound,
        format!("max column abs-sum {} vs claimed {}", format_rat(&l1), format_rat(&cert.l1_bound)),
    ));
    report.push(Check::new(
        "l0_expansion",
        l0 <= cert.l0_expansion,
        format!("max column nonzeros {l0} vs claimed {}", cert.l0_expansion),
    ));
    let (l1_cap, l0_cap) = cert.pipeline.ceilings();
    report.push(Check::new(
        "l1_ceiling",
        l1 <= l1_cap,
        format!("max column abs-sum {} vs guaranteed {}", format_rat(&l1), format_rat(&l1_cap)),
    ));
    report.push(Check::new(
        "l0_ceiling",
        l0 <= l0_cap,
        format!("max column nonzeros {l0} vs guaranteed {l0_cap}"),
    ));
    report
}

/// Necessity check: with `M = max(‖T‖₁ column bound, expansion bound)` and
/// `a = Tb`, the orbit criterion must hold at constant `M`.
pub fn prop1_check(t: &SparseOperator, b: &FiniteSequence) -> Result<OrbitVerdict> {
    let a = t.apply(b)?;
    let m = t
        .l1_operator_norm()
        .max(from_usize(t.l0_expansion_bound()));
    if m.is_zero() {
        return Ok(OrbitVerdict {
            holds: a.is_zero(),
            witness_k: (!a.is_zero()).then_some(1),
            constant: m,
        });
    }
    Ok(check_orbit_criterion(&a, b, &m))
}

/// Outcome of the K-orbit → certificate chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrip {
    #[serde(with = "crate::rational::serde_rat")]
    pub k_orbit_constant: Rat,
    pub report: Report,
}

impl RoundTrip {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// K-orbit constant `C_K`, then `E(2t, a) ≤ 2C_K·E(t/C_K, b)`, then the orbit
/// criterion at `2C_K`, then a certificate at `2C_K` within its ceilings.
pub fn corollary1_roundtrip(a: &FiniteSequence, b: &FiniteSequence) -> Result<RoundTrip> {
    let ck = k_orbit_constant(a, b)?;
    let mut report = Report::default();
    if a.is_zero() {
        let cert = zero_certificate(b);
        report.push(Check::new("k_orbit_constant", true, "a = 0, C_K = 0".into()));
        report.checks.extend(verify_certificate(&cert, a, b).checks);
        return Ok(RoundTrip {
            k_orbit_constant: ck,
            report,
        });
    }
    report.push(Check::new(
        "k_orbit_constant",
        ck.is_positive(),
        format!("C_K = {}", format_rat(&ck)),
    ));
    let two_ck = int(2) * &ck;
    let ta = a.rearrange().tails();
    let tb = b.rearrange().tails();
    let chain = scaled_e_chain(&ta, &int(2), &tb, &two_ck, &ck);
    report.push(Check::new(
        "e_chain",
        chain.is_none(),
        match chain {
            None => "E(2t, a) <= 2C_K E(t/C_K, b) on every grid cell".into(),
            Some(k) => format!("fails where E(2t, a) = tail at k = {k}"),
        },
    ));
    let verdict = criterion_on_tails(&ta, &tb, &two_ck);
    report.push(Check::new(
        "orbit_criterion",
        verdict.holds,
        match verdict.witness_k {
            None => format!("holds at C = {}", format_rat(&two_ck)),
            Some(k) => format!("fails at k = {k} with C = {}", format_rat(&two_ck)),
        },
    ));
    match build_orbit_operator(a, b, &two_ck) {
        Ok(cert) => {
            let (l1_cap, l0_cap) = orbit_ceilings(&two_ck);
            report.checks.extend(verify_certificate(&cert, a, b).checks);
            report.push(Check::new(
                "orbit_norm_ceiling",
                cert.orbit_norm_bound() <= from_usize(l0_cap).max(l1_cap.clone()),
                format!(
                    "max(l1, l0) = {} vs {}",
                    format_rat(&cert.orbit_norm_bound()),
                    format_rat(&from_usize(l0_cap).max(l1_cap))
                ),
            ));
        }
        Err(e) => report.push(Check::new("certificate", false, e.to_string())),
    }
    Ok(RoundTrip {
        k_orbit_constant: ck,
        report,
    })
}

/// The zero map from `b`'s length to the empty sequence.
pub fn zero_certificate(b: &FiniteSequence) -> OperatorCertificate {
    let pipeline = Provenance {
        kind: PipelineKind::Orbit,
        constant: None,
        dilation: None,
        partition: Default::default(),
        blocks: Vec::new(),
        unused: Vec::new(),
        a_recover: Vec::new(),
        b_recover: Vec::new(),
    };
    OperatorCertificate::new(SparseOperator::zero(b.len(), 0), pipeline)
}

/// Seeded random sparse operator with small rational entries.
pub fn random_sparse_operator(rng: &mut impl Rng, n_in: usize, n_out: usize, density: f64) -> SparseOperator {
    let mut rows = vec![Vec::new(); n_out];
    for row in rows.iter_mut() {
        for i in 0..n_in {
            if rng.random_bool(density) {
                let num = rng.random_range(-12..=12);
                let den = rng.random_range(1..=6);
                row.push((i, rat(num, den)));
            }
        }
    }
    SparseOperator::new(n_in, n_out, rows).expect("indices are in range")
}

/// Seeded random sequence with entries `p/q`, `|p| ≤ 20`, `q ≤ 8`, about a
/// quarter of them zero.
pub fn random_sequence(rng: &mut impl Rng, n: usize) -> FiniteSequence {
    let values = (0..n)
        .map(|_| {
            if rng.random_bool(0.25) {
                Rat::zero()
            } else {
                rat(rng.random_range(-20..=20), rng.random_range(1..=8))
            }
        })
        .collect();
    FiniteSequence::new(values)
}

/// Sanity wrapper: the generator's promise.
pub fn is_dominated(a: &FiniteSequence, b: &FiniteSequence) -> bool {
    crate::majorization::check_tail_domination(a, b).holds
}

/// Profiles of a dominated pair, in the form [`crate::construction::build_prop2_operator`] takes.
pub fn profiles(a: &FiniteSequence, b: &FiniteSequence) -> (SortedProfile, SortedProfile) {
    (a.rearrange(), b.rearrange())
}

/// A full self-test sweep: oracle agreement, certificates for dominated
/// pairs, necessity on random operators, and the K-orbit round trip.
pub fn selftest(seed: u64, trials: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::default();

    let mut oracle_fail = None;
    'oracle: for trial in 0..trials {
        let n = rng.random_range(0..=10);
        let x = random_sequence(&mut rng, n);
        let oracle = SubsetOracle::new(&x).expect("n <= 10");
        for _ in 0..10 {
            let t = rat(rng.random_range(1..=200), rng.random_range(1..=20));
            let k_ok = crate::functional::k_eval(&x, &t) == oracle.k_value(&t);
            let e_ok = crate::functional::e_functional(&x, &t) == oracle.e_value(&t);
            if !(k_ok && e_ok) {
                oracle_fail = Some(format!("trial {trial}: x = {x:?}, t = {t}"));
                break 'oracle;
            }
        }
    }
    report.push(Check::new(
        "oracle_agreement",
        oracle_fail.is_none(),
        oracle_fail.unwrap_or_else(|| format!("{trials} sequences x 10 values of t")),
    ));

    let mut cert_fail = None;
    for trial in 0..trials {
        let g = DominatedPairGenerator::new(rng.random(), rng.random_range(1..=60), 10);
        let (a, b) = random_dominated_pair(&g);
        let (pa, pb) = profiles(&a, &b);
        let ok = crate::construction::build_prop2_operator(&pa, &pb)
            .map(|cert| verify_certificate(&cert, &pa.to_sequence(), &pb.to_sequence()).passed())
            .unwrap_or(false);
        if !ok {
            cert_fail = Some(format!("trial {trial}: generator seed {}", g.seed));
            break;
        }
    }
    report.push(Check::new(
        "dominated_certificates",
        cert_fail.is_none(),
        cert_fail.unwrap_or_else(|| format!("{trials} dominated pairs")),
    ));

    let mut nec_fail = None;
    for trial in 0..trials {
        let n_in = rng.random_range(1..=12);
        let n_out = rng.random_range(1..=12);
        let t = random_sparse_operator(&mut rng, n_in, n_out, 0.3);
        let b = random_sequence(&mut rng, n_in);
        let ok = prop1_check(&t, &b).map(|v| v.holds).unwrap_or(false);
        if !ok {
            nec_fail = Some(format!("trial {trial}"));
            break;
        }
    }
    report.push(Check::new(
        "necessity",
        nec_fail.is_none(),
        nec_fail.unwrap_or_else(|| format!("{trials} random operators")),
    ));

    let mut rt_fail = None;
    for trial in 0..trials {
        let nb = rng.random_range(1..=12);
        let b = random_sequence(&mut rng, nb);
        let na = rng.random_range(0..=12);
        let a = random_sequence(&mut rng, na);
        if b.is_zero() {
            continue;
        }
        let ok = corollary1_roundtrip(&a, &b).map(|r| r.passed()).unwrap_or(false);
        if !ok {
            rt_fail = Some(format!("trial {trial}: a = {a:?}, b = {b:?}"));
            break;
        }
    }
    report.push(Check::new(
        "k_orbit_round_trip",
        rt_fail.is_none(),
        rt_fail.unwrap_or_else(|| format!("{trials} random pairs")),
    ));
    report
}
