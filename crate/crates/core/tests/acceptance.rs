//! Acceptance sweep: nine exact checks, one line each. Runs with its own
//! harness so the lines show up in `cargo test` output.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;
use orbitcert::construction::orbit_ceilings;
use orbitcert::rational::{floor_usize, from_usize, Rat};
use orbitcert::verification::{random_sequence, random_sparse_operator, SubsetOracle};
use orbitcert::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    details: String,
}

fn outcome(pass: bool, details: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        details: details.into(),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst_l1 = Rat::zero();
    let mut worst_l0 = 0;
    for seed in 0..1000u64 {
        let n = 1 + (seed as usize * 7919) % 200;
        let (a, b) = random_dominated_pair(&DominatedPairGenerator::new(seed, n, 10));
        if !check_tail_domination(&a, &b).holds {
            return outcome(false, format!("seed {seed}: generator produced an undominated pair"));
        }
        let (pa, pb) = (a.rearrange(), b.rearrange());
        let cert = match build_prop2_operator(&pa, &pb) {
            Ok(cert) => cert,
            Err(e) => return outcome(false, format!("seed {seed}: {e}")),
        };
        if cert.operator.apply(&pb.to_sequence()).ok() != Some(pa.to_sequence()) {
            return outcome(false, format!("seed {seed}: Tb != a"));
        }
        if cert.l1_bound > int(2) || cert.l0_expansion > 3 {
            return outcome(
                false,
                format!("seed {seed}: bounds ({}, {})", cert.l1_bound, cert.l0_expansion),
            );
        }
        worst_l1 = worst_l1.max(cert.l1_bound);
        worst_l0 = worst_l0.max(cert.l0_expansion);
    }
    let elapsed = start.elapsed();
    outcome(
        elapsed < Duration::from_secs(60),
        format!(
            "1000 dominated pairs, n <= 200, max l1 {worst_l1}, max l0 {worst_l0}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

/// Candidate `a` for constant `c`, built from a dominated pair; `None` if no
/// candidate satisfies the orbit criterion.
fn orbit_triple(r: &mut ChaCha8Rng, c: &Rat) -> Option<(FiniteSequence, FiniteSequence)> {
    let n = r.random_range(1..=40);
    let (a0, b) = random_dominated_pair(&DominatedPairGenerator::new(r.random(), n, 10));
    let mut candidates = Vec::new();
    if c > &int(1) {
        let j = r.random_range(1..=floor_usize(c));
        candidates.push(a0.dilate_up(j));
        candidates.push(a0.scale(c));
    } else {
        let m = floor_usize(&c.recip());
        candidates.push(a0.dilate_down(m).scale(c));
        candidates.push(a0.scale(c));
        candidates.push(a0.dilate_down(m));
    }
    candidates.push(a0);
    candidates
        .into_iter()
        .find(|a| check_orbit_criterion(a, &b, c).holds)
        .map(|a| (a, b))
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let (mut above, mut below, mut draws) = (0, 0, 0);
    let (mut sharp_ok, mut sharp_total) = (0, 0);
    while above + below < 200 {
        draws += 1;
        let c = if (above + below) % 2 == 0 {
            rat(r.random_range(13..=72), 12)
        } else {
            rat(r.random_range(2..=12), 12)
        };
        let Some((a, b)) = orbit_triple(&mut r, &c) else {
            continue;
        };
        let cert = match build_orbit_operator(&a, &b, &c) {
            Ok(cert) => cert,
            Err(e) => return outcome(false, format!("C = {c}: {e}")),
        };
        if !verify_certificate(&cert, &a, &b).passed() {
            return outcome(false, format!("C = {c}: certificate rejected"));
        }
        let (l1_cap, l0_cap) = orbit_ceilings(&c);
        if cert.l1_bound > l1_cap || cert.l0_expansion > l0_cap {
            return outcome(false, format!("C = {c}: bounds exceed ceilings"));
        }
        if c > int(1) {
            above += 1;
        } else {
            below += 1;
            sharp_total += 1;
            // the sharper l0 claim 3/[1/C], measured only
            let m = floor_usize(&c.recip());
            if cert.l0_expansion * m <= 3 {
                sharp_ok += 1;
            }
        }
    }
    outcome(
        true,
        format!(
            "{above} triples with C > 1, {below} with C <= 1 ({draws} draws); \
             l0 <= 3/[1/C] met by {sharp_ok}/{sharp_total} (informational)"
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let mut count = 0;
    for trial in 0..300 {
        let n = trial % 13;
        let x = random_sequence(&mut r, n);
        let oracle = SubsetOracle::new(&x).expect("n <= 12");
        for _ in 0..50 {
            let t = rat(r.random_range(1..=400), r.random_range(1..=30));
            if k_eval(&x, &t) != oracle.k_value(&t) || e_functional(&x, &t) != oracle.e_value(&t) {
                return outcome(false, format!("x = {x:?}, t = {t}"));
            }
            count += 1;
        }
    }
    outcome(true, format!("{count} (x, t) evaluations, n <= 12"))
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    for trial in 0..1000 {
        let n_in = r.random_range(1..=20);
        let n_out = r.random_range(1..=20);
        let density = r.random_range(0.05..0.6);
        let t = random_sparse_operator(&mut r, n_in, n_out, density);
        let b = random_sequence(&mut r, n_in);
        match prop1_check(&t, &b) {
            Ok(v) if v.holds => {}
            Ok(v) => return outcome(false, format!("trial {trial}: fails at k = {:?}", v.witness_k)),
            Err(e) => return outcome(false, format!("trial {trial}: {e}")),
        }
    }
    outcome(true, "1000 random operators, zero violations")
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let mut done = 0;
    let mut max_ck = Rat::zero();
    while done < 200 {
        let nb = r.random_range(1..=12);
        let b = random_sequence(&mut r, nb);
        let na = r.random_range(0..=12);
        let a = random_sequence(&mut r, na);
        if b.is_zero() {
            continue;
        }
        match corollary1_roundtrip(&a, &b) {
            Ok(rt) if rt.passed() => max_ck = max_ck.max(rt.k_orbit_constant),
            Ok(rt) => {
                let first = rt.report.failures().next().map(|c| c.check.clone());
                return outcome(false, format!("pair {done}: {first:?}"));
            }
            Err(e) => return outcome(false, format!("pair {done}: {e}")),
        }
        done += 1;
    }
    outcome(true, format!("200 pairs, largest C_K {max_ck}"))
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    for trial in 0..1000 {
        let (nx, ny) = (r.random_range(0..=30), r.random_range(0..=30));
        let x = random_sequence(&mut r, nx);
        let y = random_sequence(&mut r, ny);
        let t = rat(r.random_range(1..=600), r.random_range(1..=20));
        let g = rat(r.random_range(1..=99), 100);
        let lhs = e_functional(&(&x + &y), &t);
        let rhs = e_functional(&x, &(&g * &t)) + e_functional(&y, &((int(1) - &g) * &t));
        if lhs > rhs {
            return outcome(false, format!("sub-additivity, trial {trial}"));
        }
    }
    for trial in 0..1000 {
        let (nx, ny) = (r.random_range(0..=30), r.random_range(0..=30));
        let x = random_sequence(&mut r, nx);
        let y = random_sequence(&mut r, ny);
        let s = (&x + &y).rearrange();
        let (px, py) = (x.rearrange(), y.rearrange());
        if (2..=s.len()).any(|i| s.at(i) > px.at(i / 2) + py.at(i / 2)) {
            return outcome(false, format!("rearrangement, trial {trial}"));
        }
    }
    for trial in 0..1000 {
        let n = r.random_range(0..=30);
        let x = random_sequence(&mut r, n);
        let t = rat(r.random_range(1..=600), r.random_range(1..=20));
        let e = e_functional(&x, &t);
        if e_star(&x, &t) > e || e > int(2) * e_star(&x, &(&t / int(2))) {
            return outcome(false, format!("E* sandwich, trial {trial}"));
        }
    }
    outcome(true, "3 x 1000 instances: sub-additivity, rearrangement, E* sandwich")
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let w = WeightFamily::telescoping_quadratic();
    let factor = (&w.r1 * &w.r1 * &w.r2).recip();
    if factor != rat(1, 32) {
        return outcome(false, format!("scaling factor {factor}"));
    }
    for trial in 0..500 {
        let n = r.random_range(1..=1000);
        let x = random_sequence(&mut r, n);
        let v = match sandwich_check(&x, &w) {
            Ok(v) => v,
            Err(e) => return outcome(false, format!("trial {trial}: {e}")),
        };
        let exact = v.equiv_norm.lo == v.equiv_norm.hi;
        let lower = &factor * &v.alpha_norm <= v.equiv_norm.lo;
        let upper = v.equiv_norm.hi <= v.alpha_norm;
        if !(v.holds && exact && lower && upper) {
            return outcome(false, format!("trial {trial}, n = {n}"));
        }
    }
    outcome(true, "500 sequences, n <= 1000, alpha_k = k(k+1)")
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut count = 0;
    for m in 1..=10usize {
        for _ in 0..100 {
            let n = r.random_range(0..=40);
            let x = random_sequence(&mut r, n);
            let up = SparseOperator::dilation_up(x.len(), m).apply(&x).expect("fits");
            let down = SparseOperator::dilation_down(x.len(), m).apply(&x).expect("fits");
            let mf = from_usize(m);
            if up.l1_norm() != &mf * x.l1_norm()
                || up.l0_norm() != m * x.l0_norm()
                || down.l1_norm() > x.l1_norm() / &mf
            {
                return outcome(false, format!("m = {m}, x = {x:?}"));
            }
            count += 1;
        }
    }
    outcome(true, format!("{count} sequences, m = 1..10"))
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let mut rejected = 0;
    for trial in 0..100 {
        let (cert, a, b) = if trial % 2 == 0 {
            let n = r.random_range(1..=40);
            let (a, b) = random_dominated_pair(&DominatedPairGenerator::new(r.random(), n, 10));
            let (pa, pb) = (a.rearrange(), b.rearrange());
            let cert = build_prop2_operator(&pa, &pb).expect("dominated");
            (cert, pa.to_sequence(), pb.to_sequence())
        } else {
            let c = rat(r.random_range(2..=60), 12);
            let (a, b) = loop {
                if let Some(pair) = orbit_triple(&mut r, &c) {
                    break pair;
                }
            };
            let cert = build_orbit_operator(&a, &b, &c).expect("criterion holds");
            (cert, a, b)
        };
        if !verify_certificate(&cert, &a, &b).passed() {
            return outcome(false, format!("trial {trial}: valid certificate rejected"));
        }
        let op = &cert.operator;
        // corrupt a stored entry, or write into an empty cell of a live column
        let stored: Vec<(usize, usize, Rat)> = op
            .rows()
            .iter()
            .enumerate()
            .flat_map(|(row, entries)| entries.iter().map(move |(col, v)| (row, *col, v.clone())))
            .collect();
        let live: Vec<usize> = (0..op.n_in()).filter(|&i| !b.get(i).is_zero()).collect();
        let (row, col, old) = if trial % 4 < 2 || live.is_empty() || op.n_out() == 0 {
            stored[r.random_range(0..stored.len())].clone()
        } else {
            let row = r.random_range(0..op.n_out());
            let col = live[r.random_range(0..live.len())];
            (row, col, op.coefficient(row, col))
        };
        let mut delta = rat(r.random_range(1..=9), r.random_range(1..=6));
        if r.random_bool(0.5) {
            delta = -delta;
        }
        let bad = op.with_coefficient(row, col, &old + &delta).expect("in range");
        let corrupted = OperatorCertificate {
            operator: bad,
            ..cert.clone()
        };
        if !verify_certificate(&corrupted, &a, &b).passed() {
            rejected += 1;
        }
    }
    outcome(rejected == 100, format!("{rejected}/100 corruptions rejected"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("dominated-pair certificates", criterion_1),
        ("orbit pipeline ceilings", criterion_2),
        ("functionals vs subset oracles", criterion_3),
        ("necessity on random operators", criterion_4),
        ("K-orbit round trip", criterion_5),
        ("functional inequalities", criterion_6),
        ("Marcinkiewicz sandwich", criterion_7),
        ("dilation norms", criterion_8),
        ("fault detection", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        println!(
            "criterion {} [{}] {}: {} ({:.2} s)",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            o.details,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
