//! Orbit membership and operator certificates for the quasi-normed pair (l₀, l₁).
//!
//! A finitely supported `a` lies in the orbit of `b` exactly when, for some
//! `C > 0`, the tail sums satisfy `Σ_{i≥k} a*_i ≤ C·Σ_{i≥⌊k/C⌋} b*_i`. When they
//! do, [`build_orbit_operator`] returns an explicit sparse `T` with `Tb = a`
//! and column bounds that control `‖T‖_{l₀→l₀}` and `‖T‖_{l₁→l₁}`.
//!
//! Everything is computed in exact rational arithmetic.
//!
//! ```
//! use orbitcert::{build_orbit_operator, check_orbit_criterion, FiniteSequence, int};
//!
//! let b = FiniteSequence::from_ints(&[2, 1]);
//! let a = FiniteSequence::from_ints(&[2, 2, 1, 1]);
//! assert!(check_orbit_criterion(&a, &b, &int(2)).holds);
//! let cert = build_orbit_operator(&a, &b, &int(2)).unwrap();
//! assert_eq!(cert.operator.apply(&b).unwrap(), a);
//! ```

pub mod construction;
pub mod error;
pub mod functional;
pub mod majorization;
pub mod marcinkiewicz;
pub mod operator;
pub mod rational;
pub mod sequence;
pub mod verification;
pub mod wire;

pub use construction::{
    allocate_greedy, build_orbit_operator, build_prop2_operator, orbit_ceilings,
    partition_indices, AllocationBlock, AllocationPlan, OperatorCertificate, Partition,
    Provenance,
};
pub use error::{Error, Result};
pub use functional::{e_functional, e_star, k_eval, k_functional, PiecewiseLinearConcave};
pub use majorization::{
    check_orbit_criterion, check_tail_domination, e_orbit_check, k_orbit_constant,
    orbit_constant, ConstantInterval, OrbitVerdict,
};
pub use marcinkiewicz::{
    check_doubling, check_tail_condition, equiv_norm, norm_alpha, power_weight,
    sandwich_check, WeightFamily,
};
pub use operator::SparseOperator;
pub use rational::{format_rat, int, parse_rat, rat, Rat};
pub use sequence::{FiniteSequence, SortedProfile};
pub use verification::{
    brute_e_functional, brute_k_functional, corollary1_roundtrip, prop1_check,
    random_dominated_pair, verify_certificate, DominatedPairGenerator, Report,
};
