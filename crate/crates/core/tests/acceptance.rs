//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero on any
//! failure not listed in `DOCUMENTED_FAILURES`. Set `AFFINE_CAPS_EXTENDED=1`
//! to include the p = 23 sweep.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use affine_caps::capset::{bound_table, build_cap, eg_constant, size_estimate, verify_cap, CapCheck, PointSet, ENUMERATION_LIMIT};
use affine_caps::cone::{admissible, cone_for, cone_trivial, integer_oracle, verify_certificate, ConeCertificate};
use affine_caps::linalg::{from_integers, rank, rref, same_row_space};
use affine_caps::progressions::{build_constraint_system, enumerate_progressions, ConstraintSystem, WeightedProgression};
use affine_caps::reducibility::{digit_reduce, digit_reducible, matrix_reduce_pair, matrix_reducible, Verdict};
use affine_caps::render::truncated;
use affine_caps::search::{check_pair, max_admissible_size, verify_bundle, Maximality, SearchConfig, SearchReport};
use affine_caps::zp::{affine_image, equation_classes, is_prime, DigitSetPair, LineEquation, Prime};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

const P11_D: &[u32] = &[0, 1, 3, 4, 5];
const P11_FIXED: &[u32] = &[0, 1, 3];
const P11_AP: &[[u32; 3]] = &[[1, 3, 5], [3, 4, 5], [5, 3, 1], [5, 4, 3]];
const P11_B8: &[[u32; 3]] = &[[1, 0, 5], [1, 3, 4], [1, 4, 0], [3, 0, 4], [3, 1, 0], [4, 1, 5], [4, 5, 0], [5, 0, 3]];

const P17_D: &[u32] = &[0, 1, 2, 4, 8, 9, 13];
const P17_FIXED: &[u32] = &[0, 1, 2, 4, 8];
#[rustfmt::skip]
const P17_AP: &[[u32; 3]] = &[
    [0, 1, 2], [0, 2, 4], [0, 4, 8], [0, 9, 1], [0, 13, 9], [1, 9, 0], [1, 13, 8], [2, 1, 0],
    [4, 0, 13], [4, 2, 0], [8, 0, 9], [8, 2, 13], [8, 4, 0], [8, 13, 1], [9, 0, 8], [9, 13, 0],
    [13, 0, 4], [13, 2, 8],
];
#[rustfmt::skip]
const P17_C2: &[[u32; 3]] = &[
    [1, 0, 8], [1, 9, 13], [1, 13, 2], [2, 1, 9], [2, 9, 4], [4, 1, 8], [4, 2, 1], [4, 13, 9],
    [8, 0, 13], [8, 4, 2], [8, 9, 1], [9, 0, 4], [13, 0, 2], [13, 4, 8],
];
#[rustfmt::skip]
const P17_C3: &[[u32; 3]] = &[
    [1, 2, 8], [1, 13, 0], [2, 9, 0], [4, 1, 0], [8, 2, 0], [8, 13, 9], [9, 1, 4], [9, 4, 8],
    [9, 8, 2], [13, 2, 4], [13, 4, 1], [13, 9, 2],
];

const P23_D: &[u32] = &[0, 1, 3, 4, 8, 9, 10, 12, 17];
const P23_FIXED7: &[u32] = &[0, 1, 3, 4, 8, 10, 17];
#[rustfmt::skip]
const P23_AP: &[[u32; 3]] = &[
    [0, 4, 8], [0, 12, 1], [1, 9, 17], [1, 12, 0], [1, 17, 10], [3, 10, 17], [3, 17, 8], [4, 8, 12],
    [8, 1, 17], [8, 4, 0], [8, 9, 10], [8, 10, 12], [8, 17, 3], [10, 9, 8], [10, 17, 1], [12, 3, 17],
    [12, 8, 4], [12, 10, 8], [17, 1, 8], [17, 3, 12], [17, 9, 1], [17, 10, 3],
];

#[rustfmt::skip]
const P23_A: [[i64; 22]; 18] = [
    [1,1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0],
    [0,0,1,1,1,0,0,0,-1,0,0,0,0,0,0,0,0,0,-1,0,0,0],
    [0,0,0,0,0,1,1,0,0,0,0,0,0,0,0,-1,0,0,0,-1,0,0],
    [-1,0,0,0,0,0,0,1,0,-1,0,0,0,0,0,0,0,0,0,0,0,0],
    [0,0,0,0,0,0,0,-1,1,1,1,1,1,0,0,0,-1,0,0,0,0,0],
    [0,0,-1,0,0,0,0,0,0,0,-1,0,0,-1,0,0,0,0,0,0,-1,0],
    [0,0,0,0,0,-1,0,0,0,0,0,-1,0,1,1,0,0,-1,0,0,0,-1],
    [0,-1,0,-1,0,0,0,0,0,0,0,0,0,0,0,1,1,1,0,0,0,0],
    [0,0,0,0,-1,0,-1,0,0,0,0,0,-1,0,-1,0,0,0,1,1,1,1],
    [1,1,0,-1,0,0,0,0,0,-1,0,0,0,0,0,0,0,0,0,0,0,0],
    [0,-1,1,1,1,0,0,0,0,0,0,0,0,0,-1,0,0,0,0,0,-1,0],
    [0,0,0,0,0,1,1,0,0,0,0,0,-1,0,0,0,0,0,0,0,0,-1],
    [0,0,0,0,0,0,0,1,0,0,0,0,0,0,0,0,-1,0,0,0,0,0],
    [-1,0,0,0,0,0,-1,0,1,1,1,1,1,-1,0,0,0,-1,-1,0,0,0],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0],
    [0,0,0,0,-1,0,0,0,0,0,-1,0,0,1,1,0,0,0,0,0,0,0],
    [0,0,0,0,0,0,0,-1,0,0,0,-1,0,0,0,1,1,1,0,-1,0,0],
    [0,0,-1,0,0,-1,0,0,-1,0,0,0,0,0,0,-1,0,0,1,1,1,1],
];

// As printed; entries are not cleared above every pivot, so only the row
// space is compared.
#[rustfmt::skip]
const P23_A_R: [[i64; 22]; 18] = [
    [1,0,0,0,0,0,0,0,0,0,0,0,0,0,-1,0,17,1,1,0,0,1],
    [0,1,0,0,0,0,0,0,0,0,0,0,0,0,1,0,6,-1,-1,0,0,-1],
    [0,0,1,0,0,0,0,0,0,0,0,0,0,1,1,0,17,-1,-1,0,0,-1],
    [0,0,0,1,0,0,0,0,0,0,0,0,0,0,-1,0,18,1,1,0,0,1],
    [0,0,0,0,1,0,0,0,0,0,0,0,0,-1,0,0,17,-1,-1,0,-1,-1],
    [0,0,0,0,0,1,0,0,0,0,0,0,0,-1,-1,0,21,1,0,-1,0,1],
    [0,0,0,0,0,0,1,0,0,0,0,0,0,1,1,0,4,0,0,0,0,-1],
    [0,0,0,0,0,0,0,1,0,0,0,0,0,0,0,0,22,0,0,0,0,0],
    [0,0,0,0,0,0,0,0,1,0,0,0,0,0,0,0,6,-1,0,0,-1,-1],
    [0,0,0,0,0,0,0,0,0,1,0,0,0,0,1,0,5,-1,-1,0,0,-1],
    [0,0,0,0,0,0,0,0,0,0,1,0,0,0,-1,0,6,1,1,0,1,1],
    [0,0,0,0,0,0,0,0,0,0,0,1,0,0,0,0,2,0,0,1,0,0],
    [0,0,0,0,0,0,0,0,0,0,0,0,1,0,0,0,2,1,0,-1,0,1],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1,2,1,0,0,0,0],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1,0,0,0,0,0],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0],
    [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0],
];

const P29_D: &[u32] = &[0, 1, 2, 3, 4, 6, 14, 16, 22, 26];
const P29_FIXED: &[u32] = &[1, 2, 3, 4, 6, 16, 22, 26];
const P41_D: &[u32] = &[1, 2, 4, 5, 6, 9, 15, 16, 27, 32, 33, 35];
const P41_FIXED: &[u32] = &[1, 2, 4, 5, 6, 9, 15, 27, 32, 33];

/// Printed equivalence classes as sets of `k` in `x + kz = (k+1)y`.
const CLASSES_23: &[&[u32]] = &[&[1, 11, 21], &[2, 7, 10, 12, 15, 20], &[3, 5, 8, 14, 17, 19], &[4, 6, 9, 13, 16, 18]];
const CLASSES_29: &[&[u32]] =
    &[&[1, 14, 27], &[2, 9, 13, 15, 19, 26], &[3, 7, 10, 18, 21, 25], &[4, 5, 6, 22, 23, 24], &[8, 11, 12, 16, 17, 20]];
const CLASSES_41: &[&[u32]] = &[
    &[1, 20, 39],
    &[2, 13, 19, 21, 27, 38],
    &[3, 10, 14, 26, 30, 37],
    &[4, 8, 9, 31, 32, 36],
    &[5, 6, 7, 33, 34, 35],
    &[11, 15, 17, 23, 25, 29],
    &[12, 16, 18, 22, 24, 28],
];

type TableRow = (u32, &'static str, &'static str, usize, Option<&'static str>, &'static str);

/// p, p^{2/3}, (p⁴+p²−1)^{1/6}, new bound, improvement %, μ, all as printed.
const TABLE: &[TableRow] = &[
    (5, "2.92401", "2.94243", 3, Some("1.9562"), "0.68260"),
    (7, "3.65930", "3.67139", 3, None, "0.56457"),
    (11, "4.94608", "4.95282", 5, Some("0.9526"), "0.67118"),
    (13, "5.52877", "5.53418", 4, None, "0.54047"),
    (17, "6.61148", "6.61528", 7, Some("5.8156"), "0.68682"),
    (19, "7.12036", "7.12364", 6, None, "0.60852"),
    (23, "8.08757", "8.09012", 9, Some("11.2468"), "0.70075"),
    (29, "9.43913", "9.44099", 10, Some("5.9210"), "0.68380"),
    (31, "9.86827", "9.86998", 8, None, "0.60554"),
    (37, "11.10370", "11.10505", 10, None, "0.63767"),
    (41, "11.89020", "11.89138", 12, Some("0.9134"), "0.66914"),
];

const EG_TARGET: f64 = 0.8414;
const EG_TOLERANCE: f64 = 0.02;
const RATIO_TOLERANCE: f64 = 0.05;
const FUZZ_INSTANCES: usize = 1000;
const ORACLE_BOUND: u32 = 3;
const IMPLICATION_PAIRS: usize = 500;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took <= limit, || format!("{what} took {took:.2?}, limit {limit:?}"))
}

fn prime(p: u32) -> Prime {
    Prime::new(p).expect("prime")
}

fn pair(p: u32, d: &[u32], fixed: &[u32]) -> DigitSetPair {
    DigitSetPair::new(prime(p), d, fixed).expect("valid pair")
}

fn eq_k(p: u32, k: u32) -> LineEquation {
    LineEquation::new(prime(p), p - 1 - k).expect("valid equation")
}

fn rows(list: &[[u32; 3]]) -> Vec<WeightedProgression> {
    list.iter().map(|&t| WeightedProgression(t)).collect()
}

fn golden_lists() -> Outcome {
    let start = Instant::now();
    let p11 = pair(11, P11_D, P11_FIXED);
    let p17 = pair(17, P17_D, P17_FIXED);
    let p23 = pair(23, P23_D, P23_D);
    let cases = [
        ("p=11 x+z=2y", &p11, eq_k(11, 1), P11_AP),
        ("p=11 x+2z=3y", &p11, eq_k(11, 2), P11_B8),
        ("p=17 x+z=2y", &p17, eq_k(17, 1), P17_AP),
        ("p=17 x+2z=3y", &p17, eq_k(17, 2), P17_C2),
        ("p=17 x+3z=4y", &p17, eq_k(17, 3), P17_C3),
        ("p=23 x+z=2y", &p23, eq_k(23, 1), P23_AP),
    ];
    for (name, pr, eq, expected) in cases {
        let table = enumerate_progressions(pr, eq);
        let got = serde_json::to_string(&table.rows).map_err(|e| e.to_string())?;
        let want = serde_json::to_string(&rows(expected)).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("{name}: got {got}"))?;
    }
    within(start, Duration::from_secs(1), "enumeration")?;
    Ok("6 lists byte-exact (4, 8, 18, 14, 12, 22 triples)".into())
}

fn golden_matrix() -> Outcome {
    let start = Instant::now();
    let sys = build_constraint_system(&enumerate_progressions(&pair(23, P23_D, P23_D), eq_k(23, 1)));
    ensure((sys.rows(), sys.cols()) == (18, 22), || format!("shape {}x{}", sys.rows(), sys.cols()))?;
    for (i, row) in P23_A.iter().enumerate() {
        ensure(sys.matrix[i] == row.to_vec(), || format!("row {} differs", i + 1))?;
    }
    let a = from_integers(&sys.matrix);
    let mut reduced = a.clone();
    let pivots = rref(&mut reduced);
    let printed = from_integers(&P23_A_R.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    ensure(pivots.len() == 15, || format!("rank {}", pivots.len()))?;
    ensure(rank(&printed) == 15, || "printed A_r rank differs from 15".into())?;
    ensure(same_row_space(&reduced, &printed), || "row spaces differ".into())?;
    within(start, Duration::from_secs(1), "matrix")?;
    Ok("18x22 entry-exact, rank 15, RREF row space equals printed A_r".into())
}

fn verdicts() -> Outcome {
    let start = Instant::now();
    for (p, d, f) in [(11, P11_D, P11_FIXED), (17, P17_D, P17_FIXED), (29, P29_D, P29_FIXED), (41, P41_D, P41_FIXED)] {
        ensure(digit_reducible(&pair(p, d, f)).reducible, || format!("p={p} not digit-reducible"))?;
    }
    ensure(matrix_reducible(&pair(23, P23_D, P23_D)).reducible, || "p=23 D'=D not matrix-reducible".into())?;
    ensure(!matrix_reducible(&pair(17, P17_D, P17_FIXED)).reducible, || "p=17 pair unexpectedly matrix-reducible".into())?;

    let p23 = pair(23, P23_D, P23_FIXED7);
    ensure(!digit_reducible(&p23).reducible, || "p=23 |D'|=7 digit-reducible".into())?;
    ensure(!matrix_reducible(&p23).reducible, || "p=23 |D'|=7 matrix-reducible".into())?;
    let adm = admissible(&p23);
    ensure(adm.certificates.len() == 4, || format!("{} representatives", adm.certificates.len()))?;
    for c in &adm.certificates {
        let sys = cone_for(&p23, c.equation);
        let ok = c.certificate.is_trivial() && verify_certificate(&sys, &c.certificate).map_err(|e| e.to_string())?;
        ensure(ok, || format!("{}: cone not certified trivial", c.equation))?;
    }
    within(start, Duration::from_secs(10), "verdicts")?;
    Ok("digit 11/17/29/41, matrix 23 (D'=D) yes and 17 no, p=23 |D'|=7 cone-certified on 4 representatives".into())
}

fn classes() -> Outcome {
    let start = Instant::now();
    for (p, printed) in [(23u32, CLASSES_23), (29, CLASSES_29), (41, CLASSES_41)] {
        let part = equation_classes(prime(p));
        let mut got: Vec<Vec<u32>> = part
            .classes
            .iter()
            .map(|c| {
                let mut ks: Vec<u32> = c.members.iter().map(|&b| p - 1 - b).collect();
                ks.sort_unstable();
                ks
            })
            .collect();
        got.sort();
        let mut want: Vec<Vec<u32>> = printed.iter().map(|c| c.to_vec()).collect();
        want.sort();
        ensure(got == want, || format!("p={p}: {got:?}"))?;
    }
    for p in (5..=41).filter(|&p| is_prime(p) && p % 6 == 5) {
        let n = equation_classes(prime(p)).classes.len() as u32;
        ensure(n == (p + 1) / 6, || format!("p={p}: {n} classes"))?;
    }
    within(start, Duration::from_secs(1), "classes")?;
    Ok("printed lists for 23/29/41 exact; (p+1)/6 classes for p = 5, 11, 17, 23, 29, 41".into())
}

fn collinear(p: u32, a: &[u32], b: &[u32], c: &[u32]) -> bool {
    if a == b || b == c || a == c {
        return false;
    }
    let u: Vec<u32> = a.iter().zip(b).map(|(x, y)| (y + p - x) % p).collect();
    let v: Vec<u32> = a.iter().zip(c).map(|(x, y)| (y + p - x) % p).collect();
    (1..p).any(|k| u.iter().zip(&v).all(|(s, t)| (s * k) % p == *t))
}

fn caps() -> Outcome {
    let start = Instant::now();
    let p11 = pair(11, P11_D, P11_FIXED);
    let cap = build_cap(&p11, 5, ENUMERATION_LIMIT).map_err(|e| e.to_string())?;
    ensure(cap.points.len() == 240, || format!("{} points", cap.points.len()))?;
    ensure(verify_cap(&cap.points).is_ok(), || "p=11 n=5 has a collinear triple".into())?;
    within(start, Duration::from_secs(1), "p=11 n=5")?;

    let start = Instant::now();
    let big = build_cap(&p11, 10, ENUMERATION_LIMIT).map_err(|e| e.to_string())?;
    let formula = size_estimate(&p11, 10).map_err(|e| e.to_string())?.exact_count;
    ensure(big.points.len() == 302_400, || format!("{} points at n=10", big.points.len()))?;
    ensure(formula == 302_400u32.into(), || format!("formula gives {formula}"))?;
    within(start, Duration::from_secs(30), "p=11 n=10")?;

    let start = Instant::now();
    let p17 = pair(17, P17_D, P17_FIXED);
    let cap17 = build_cap(&p17, 7, ENUMERATION_LIMIT).map_err(|e| e.to_string())?;
    ensure(cap17.points.len() == 10_080, || format!("{} points at p=17", cap17.points.len()))?;
    ensure(verify_cap(&cap17.points).is_ok(), || "p=17 n=7 has a collinear triple".into())?;
    within(start, Duration::from_secs(180), "p=17 n=7")?;

    // Replace one point by the third point on the line through two others.
    let mut pts: Vec<Vec<u32>> = cap.points.points().map(<[u32]>::to_vec).collect();
    let third: Vec<u32> = pts[0].iter().zip(&pts[1]).map(|(x, y)| (2 * y + 11 - x) % 11).collect();
    pts[2] = third;
    let corrupted = PointSet::from_points(11, 5, &pts).map_err(|e| e.to_string())?;
    match verify_cap(&corrupted) {
        CapCheck::Violation { points: [a, b, c] } => {
            ensure(collinear(11, &a, &b, &c), || "reported triple is not collinear".into())?;
        }
        CapCheck::Ok => return Err("corrupted set passed".into()),
    }
    Ok("240 points ok, 302400 enumerated = formula, 10080 points ok, corrupted set caught with collinear witness".into())
}

fn table() -> Outcome {
    for &(p, bose, edel, new, imp, mu) in TABLE {
        let row = bound_table(p, new);
        ensure(truncated(row.bose, 5) == bose, || format!("p={p} p^(2/3) {}", row.bose))?;
        ensure(truncated(row.edel, 5) == edel, || format!("p={p} edel {}", row.edel))?;
        ensure(truncated(row.mu, 5) == mu, || format!("p={p} mu {}", row.mu))?;
        let got = row.improvement_percent.map(|v| format!("{v:.4}"));
        ensure(got.as_deref() == imp, || format!("p={p} improvement {got:?}"))?;
    }
    Ok(format!("{} primes, both bound columns, improvements and mu to 5 decimals", TABLE.len()))
}

fn sweep(p: u32, expected: usize, limit: Duration, reports: &mut Vec<SearchReport>) -> Result<String, String> {
    let start = Instant::now();
    let config = SearchConfig { dedup: true, ..SearchConfig::default() };
    let report = max_admissible_size(prime(p), &config).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(report.max_size == expected, || format!("p={p}: max {}", report.max_size))?;
    let Maximality::Proven { size, refutations } = &report.maximality else {
        return Err(format!("p={p}: maximality not proven"));
    };
    ensure(*size == expected + 1, || format!("p={p}: refuted level {size}"))?;
    for r in refutations {
        ensure(r.verify(prime(p)).map_err(|e| e.to_string())?, || format!("p={p}: refutation of {:?} fails", r.digits))?;
    }
    ensure(took <= limit, || format!("p={p} took {took:.2?}"))?;
    let line = format!("p={p} max {expected} ({} refuted, {took:.1?})", refutations.len());
    reports.push(report);
    Ok(line)
}

fn sweeps(reports: &mut Vec<SearchReport>) -> Outcome {
    let mut parts = vec![
        sweep(7, 3, Duration::from_secs(60), reports)?,
        sweep(11, 5, Duration::from_secs(300), reports)?,
        sweep(13, 4, Duration::from_secs(900), reports)?,
        sweep(17, 7, Duration::from_secs(7200), reports)?,
    ];
    if std::env::var_os("AFFINE_CAPS_EXTENDED").is_some() {
        parts.push(sweep(23, 9, Duration::from_secs(4 * 3600), reports)?);
    } else {
        parts.push("p=23 skipped (set AFFINE_CAPS_EXTENDED=1)".into());
    }
    Ok(parts.join("; "))
}

fn random_system(rng: &mut StdRng) -> ConstraintSystem {
    let eq = eq_k(5, 1);
    let cols = rng.gen_range(1..=8);
    let m = rng.gen_range(1..=5);
    let matrix = (0..m).map(|_| (0..cols).map(|_| rng.gen_range(-1..=1)).collect()).collect();
    ConstraintSystem::from_rows(eq, matrix)
}

fn random_pair_system(rng: &mut StdRng) -> ConstraintSystem {
    loop {
        let p = *[5u32, 7, 11, 13].choose(rng).expect("nonempty");
        let size = rng.gen_range(3..=5.min(p as usize - 1));
        let mut all: Vec<u32> = (0..p).collect();
        all.shuffle(rng);
        let d = &all[..size];
        let fixed: Vec<u32> = d.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        let b = rng.gen_range(1..=p - 2);
        let sys = cone_for(&pair(p, d, &fixed), LineEquation::new(prime(p), b).expect("b in range"));
        if sys.cols() <= 10 {
            return sys;
        }
    }
}

fn soundness(reports: &[SearchReport]) -> Outcome {
    let mut bundles = vec![
        check_pair(&pair(11, P11_D, P11_FIXED), false),
        check_pair(&pair(17, P17_D, P17_FIXED), false),
        check_pair(&pair(23, P23_D, P23_D), false),
        check_pair(&pair(23, P23_D, P23_FIXED7), false),
        check_pair(&pair(29, P29_D, P29_FIXED), false),
        check_pair(&pair(41, P41_D, P41_FIXED), false),
    ];
    bundles.extend(reports.iter().flat_map(|r| r.levels.iter().filter_map(|l| l.admissible.as_ref().map(|e| e.bundle.clone()))));
    let mut refutations = 0;
    for r in reports {
        if let Maximality::Proven { refutations: list, .. } = &r.maximality {
            for f in list {
                ensure(f.verify(r.p).map_err(|e| e.to_string())?, || format!("refutation {:?} fails", f.digits))?;
                refutations += 1;
            }
        }
    }
    for b in &bundles {
        ensure(verify_bundle(b).map_err(|e| e.to_string())?, || format!("bundle for {} fails", b.pair))?;
    }

    let mut rng = StdRng::seed_from_u64(0x00ca_95e7);
    let (mut trivial, mut found) = (0, 0);
    let mut beyond_box = Vec::new();
    let mut pair_disagreements = 0;
    for i in 0..FUZZ_INSTANCES {
        let from_pair = i % 2 == 1;
        let sys = if from_pair { random_pair_system(&mut rng) } else { random_system(&mut rng) };
        let cert = cone_trivial(&sys);
        ensure(verify_certificate(&sys, &cert).map_err(|e| e.to_string())?, || format!("instance {i}: certificate rejected"))?;
        let oracle = integer_oracle(&sys, ORACLE_BOUND).map_err(|e| e.to_string())?;
        match (&cert, oracle) {
            (ConeCertificate::Trivial { .. }, None) => trivial += 1,
            (ConeCertificate::Nontrivial { .. }, Some(_)) => found += 1,
            (ConeCertificate::Trivial { .. }, Some(w)) => return Err(format!("instance {i}: trivial but oracle found {w:?}")),
            (ConeCertificate::Nontrivial { witness }, None) => {
                // The box holds no cone point; widening it to the certified
                // witness must find one.
                let max = witness.iter().max().cloned().unwrap_or_default();
                let wide = u32::try_from(&max).map_err(|e| e.to_string())?;
                ensure(integer_oracle(&sys, wide).map_err(|e| e.to_string())?.is_some(), || {
                    format!("instance {i}: oracle B={wide} finds nothing")
                })?;
                if from_pair {
                    pair_disagreements += 1;
                }
                beyond_box.push(wide);
            }
        }
    }
    let summary = format!(
        "{} bundles and {refutations} refutations verified; fuzz {FUZZ_INSTANCES}: {trivial} trivial, {found} nontrivial in the box",
        bundles.len()
    );
    ensure(beyond_box.is_empty(), || {
        format!(
            "{summary}, {} nontrivial with no cone point inside {{0..{ORACLE_BOUND}}}^n (certified witness max {:?}, {pair_disagreements} from digit sets); the bounded oracle is incomplete there",
            beyond_box.len(),
            beyond_box
        )
    })?;
    Ok(format!("{summary}, all agree with oracle B={ORACLE_BOUND}"))
}

fn random_pair(rng: &mut StdRng) -> DigitSetPair {
    let p = *[5u32, 7, 11, 13, 17].choose(rng).expect("nonempty");
    let size = rng.gen_range(2..=6.min(p as usize - 1));
    let mut all: Vec<u32> = (0..p).collect();
    all.shuffle(rng);
    let d = &all[..size];
    let fixed: Vec<u32> = d.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    pair(p, d, &fixed)
}

fn implications() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x0bad_5eed);
    let (mut reduced, mut admissible_count) = (0, 0);
    for i in 0..IMPLICATION_PAIRS {
        let pr = random_pair(&mut rng);
        let p = pr.p();
        let adm = admissible(&pr);
        for c in &adm.certificates {
            let digit = digit_reduce(&pr, c.equation).verdict == Verdict::ReducedToEmpty;
            let matrix = matrix_reduce_pair(&pr, c.equation).verdict == Verdict::ReducedToEmpty;
            if digit || matrix {
                reduced += 1;
                ensure(c.certificate.is_trivial(), || format!("pair {i} {pr}: reduction succeeded but cone nontrivial"))?;
            }
        }
        if !adm.admissible {
            continue;
        }
        admissible_count += 1;
        let mut bigger: Vec<u32> = pr.fixed().to_vec();
        for &d in pr.digits() {
            if !bigger.contains(&d) && rng.gen_bool(0.5) {
                bigger.push(d);
            }
        }
        let enlarged = pr.with_fixed(&bigger).map_err(|e| e.to_string())?;
        ensure(admissible(&enlarged).admissible, || format!("pair {i} {pr}: enlarging D' broke admissibility"))?;
        let a = rng.gen_range(1..p.get());
        let b = rng.gen_range(0..p.get());
        let image =
            DigitSetPair::new(p, &affine_image(p, pr.digits(), a, b), &affine_image(p, pr.fixed(), a, b)).map_err(|e| e.to_string())?;
        ensure(admissible(&image).admissible, || format!("pair {i} {pr}: image under {a}x+{b} not admissible"))?;
    }
    Ok(format!(
        "{IMPLICATION_PAIRS} pairs: {reduced} reduced representatives all cone-trivial, {admissible_count} admissible pairs monotone and affine-stable"
    ))
}

fn constants() -> Outcome {
    let primes: Vec<u32> = (5..=101).filter(|&p| is_prime(p)).collect();
    let values: Vec<f64> = primes.iter().map(|&p| eg_constant(p)).collect();
    let j101 = *values.last().expect("nonempty");
    ensure((j101 - EG_TARGET).abs() <= EG_TOLERANCE, || format!("J(101) = {j101}"))?;
    for (w, p) in values.windows(2).zip(primes.windows(2)) {
        ensure(w[1] < w[0], || format!("J({}) = {} >= J({}) = {}", p[1], w[1], p[0], w[0]))?;
    }
    let est = size_estimate(&pair(11, P11_D, P11_FIXED), 40 * P11_D.len()).map_err(|e| e.to_string())?;
    let ratio = est.asymptotic_ratio();
    let rel = (ratio / est.c_const - 1.0).abs();
    ensure(rel <= RATIO_TOLERANCE, || format!("ratio {ratio} vs c {}", est.c_const))?;
    Ok(format!(
        "J(101) = {j101:.4}, decreasing over {} primes; ratio {ratio:.4} vs c = {:.4} at n = 200 ({:.2}%)",
        primes.len(),
        est.c_const,
        100.0 * rel
    ))
}

/// Criteria that cannot hold as stated. Each still prints FAIL; see the
/// detail line for the measured counterexamples.
const DOCUMENTED_FAILURES: &[usize] = &[8];

fn main() -> ExitCode {
    let mut reports = Vec::new();
    let mut failed = Vec::new();
    let mut report = |n: usize, name: &str, outcome: Outcome, seconds: f64| match outcome {
        Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail} [{seconds:.2}s]"),
        Err(why) => {
            failed.push(n);
            println!("criterion {n:>2} FAIL  {name}: {why} [{seconds:.2}s]");
        }
    };
    let mut run = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        report(n, name, outcome, start.elapsed().as_secs_f64());
    };
    run(1, "golden progression lists", &mut golden_lists);
    run(2, "golden constraint matrix", &mut golden_matrix);
    run(3, "reducibility verdicts", &mut verdicts);
    run(4, "equation classes", &mut classes);
    run(5, "cap verification", &mut caps);
    run(6, "bound table", &mut table);
    run(7, "maximality sweeps", &mut || sweeps(&mut reports));
    run(8, "certificate soundness", &mut || soundness(&reports));
    run(9, "implication suite", &mut implications);
    run(10, "analysis constants", &mut constants);
    let unexpected: Vec<usize> = failed.iter().copied().filter(|n| !DOCUMENTED_FAILURES.contains(n)).collect();
    if failed.is_empty() {
        println!("all criteria passed");
    } else {
        println!("failed: {failed:?}; undocumented: {unexpected:?}");
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
