//! Acceptance criteria, one line each. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use siegel_core::bigcomplex::{agree_relative, log2_rel_diff};
use siegel_core::cmdata::{gram_matrix, CmContext};
use siegel_core::cyclofield::{CycloElem, CycloIdeal};
use siegel_core::rayclass::{
    all_characters, compute_invariants, enumerate_ray_classes, equivalent_representatives, independence_check,
    r_vector, stickelberger_sum, InvariantTable, RayClassTable,
};
use siegel_core::verify::{random_char, random_point, theta_suite, VerifyConfig};
use siegel_core::{big_theta, siegel_function, BigComplex, BigReal, PivotOrder, SiegelPoint};

/// Expected rows `(re, im)` for conductor `5 O_K`, labels `C_1..C_5`.
const EXPECTED_5: [(&str, &str); 5] = [
    ("-2.13359e-69", "4.17297e-70"),
    ("4.16089e-50", "-1.58401e-50"),
    ("4.16089e-50", "1.58401e-50"),
    ("-2.13359e-69", "-4.17297e-70"),
    ("4.85930e-254", "0"),
];

/// Expected rows for conductor `6 O_K`, labels `C_1..C_10`.
const EXPECTED_6: [(&str, &str); 10] = [
    ("-1.68219e-66", "-1.88870e-66"),
    ("9.08964e-135", "7.01165e-135"),
    ("-3.16257e-65", "1.88358e-65"),
    ("2.29176e-93", "1.51419e-93"),
    ("8.33316e-136", "0"),
    ("2.29176e-93", "-1.51419e-93"),
    ("-3.16257e-65", "-1.88358e-65"),
    ("9.08964e-135", "-7.01165e-135"),
    ("-1.68219e-66", "1.88870e-66"),
    ("3.26284e-348", "0"),
];

/// Five significant digits: relative modulus error below `1e-4`, argument
/// error below `1e-4 · max(|arg|, 1)` radians.
const REL_TOL: f64 = 1e-4;

type Check<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn expected(re: &str, im: &str) -> BigComplex {
    let p = 128;
    BigComplex::new(BigReal::parse_decimal(re, p).unwrap(), BigReal::parse_decimal(im, p).unwrap())
}

/// `(relative modulus error, argument error)`.
fn polar_errors(got: &BigComplex, want: &BigComplex) -> (f64, f64) {
    let p = 128;
    let got = got.with_prec(p);
    let (mg, mw) = (got.abs(), want.abs());
    let rel = ((&mg - &mw) / mw).to_f64().abs();
    let (ag, aw) = (got.arg().to_f64(), want.arg().to_f64());
    let mut d = (ag - aw).abs();
    if d > std::f64::consts::PI {
        d = 2.0 * std::f64::consts::PI - d;
    }
    (rel, d / aw.abs().max(1.0))
}

fn compare_rows(inv: &InvariantTable, want: &[(&str, &str)], labels: std::ops::RangeInclusive<usize>) -> Outcome {
    if inv.rows.len() != want.len() {
        return outcome(false, format!("{} rows, expected {}", inv.rows.len(), want.len()));
    }
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for label in labels {
        let got = inv.value(label).unwrap();
        let (re, im) = want[label - 1];
        let (m, a) = polar_errors(got, &expected(re, im));
        worst = worst.max(m).max(a);
        if m > REL_TOL || a > REL_TOL {
            bad.push(format!("C_{label} = {} vs {re} + {im} i", got.to_sci(6)));
        }
    }
    if bad.is_empty() {
        outcome(true, format!("worst relative error {worst:.1e}"))
    } else {
        outcome(false, bad.join("; "))
    }
}

fn criterion_3(t5: &RayClassTable, t6: &RayClassTable) -> Outcome {
    let gen = CycloElem::parse(5, "2 + z^1").unwrap();
    let gen_label = t5.class_of(&gen).unwrap();
    // A class generates Z/5 iff it is not the identity.
    let ok5 = t5.cyclic_orders() == [5] && t5.order() == 5 && gen_label != t5.identity_label();
    let ok6 = t6.cyclic_orders() == [10] && t6.order() == 10;
    outcome(
        ok5 && ok6,
        format!("Cl(5) {:?} with 2+z in C_{gen_label}, Cl(6) {:?}", t5.cyclic_orders(), t6.cyclic_orders()),
    )
}

fn criterion_4(ctx: &CmContext, tables: &[&RayClassTable]) -> Outcome {
    let mut checked = 0;
    for t in tables {
        for cls in t.classes() {
            let spec = ctx.polarization(t.level(), &CycloIdeal::new(cls.representative.clone()).unwrap());
            let basis = ctx.lattice_basis(t.level(), &cls.representative).unwrap();
            let gram = gram_matrix(&spec, &basis).unwrap();
            if !gram.is_standard {
                return outcome(false, format!("N = {}, {}:\n{}", t.level(), cls.name(), gram.matrix));
            }
            checked += 1;
        }
    }
    outcome(true, format!("{checked} representatives, Gram = J exactly"))
}

fn criterion_5(ctx: &CmContext, t5: &RayClassTable) -> Outcome {
    let r = r_vector(ctx, t5, 1).unwrap();
    outcome(r == [1, 2, 0, 3], format!("C_1 r-vector {r:?}"))
}

fn criterion_6() -> Outcome {
    let cfg = VerifyConfig { seed: 2024, prec: 256, cases: 100, ..VerifyConfig::default() };
    let report = theta_suite(&cfg);
    let names = ["theta parity", "odd vanishing", "level shift invariance", "Sp invariance"];
    let mut parts = Vec::new();
    let mut pass = true;
    for name in names {
        let c = report.check(name).unwrap();
        pass &= c.passed() && c.cases == 100;
        let max = if c.max_log2.is_finite() { format!("max 2^{:.0}", c.max_log2) } else { "bit-identical".into() };
        parts.push(format!("{name} {} cases {max}", c.cases));
    }
    if !pass {
        parts.push(report.to_string());
    }
    outcome(pass, parts.join(", "))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let prec = 256;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..25 {
        let tau = random_point(1, prec + 32, &mut rng).entry(0, 0).clone();
        let n = rand::Rng::gen_range(&mut rng, 2..9);
        let v = random_char(1, n, &mut rng);
        let big = big_theta(&v, n, &SiegelPoint::from_tau(tau.clone()).unwrap(), prec).unwrap();
        let g = siegel_function(&v, &tau, prec + 64).unwrap().pow_u64(12 * n as u64);
        worst = worst.max(log2_rel_diff(&big, &g));
    }
    outcome(worst < -64.0, format!("25 cases, worst relative error 2^{worst:.0}"))
}

fn criterion_8(ctx: &CmContext, t5: &RayClassTable) -> Outcome {
    let prec = 512;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut jobs = Vec::new();
    for cls in t5.classes() {
        for alt in equivalent_representatives(t5, cls.label, 5, &mut rng).unwrap() {
            for order in [PivotOrder::Forward, PivotOrder::Reversed] {
                jobs.push((cls.label, alt.clone(), order));
            }
        }
    }
    let results: Vec<(usize, String, f64, bool)> = jobs
        .par_iter()
        .map(|(label, alt, order)| match independence_check(ctx, t5, *label, alt, *order, prec) {
            Ok(o) => {
                let d = if o.base == o.alternate { f64::NEG_INFINITY } else { log2_rel_diff(&o.base, &o.alternate) };
                (*label, alt.to_string(), d, agree_relative(&o.base, &o.alternate, 30))
            }
            Err(e) => (*label, format!("{alt}: {e}"), f64::INFINITY, false),
        })
        .collect();
    let worst = results.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let bad: Vec<String> = results.iter().filter(|r| !r.3).map(|r| format!("C_{} via {}", r.0, r.1)).collect();
    let detail = format!("{} recomputations, worst relative difference 2^{worst:.0}", results.len());
    if bad.is_empty() {
        outcome(true, detail)
    } else {
        outcome(false, format!("{detail}; disagree: {}", bad.join(", ")))
    }
}

fn criterion_9(tables: &[(&RayClassTable, &InvariantTable)]) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (t, inv) in tables {
        let n = t.order();
        for k in 1..=n {
            let partner = if k == n { n } else { n - k };
            let a = inv.value(k).unwrap();
            let b = inv.value(partner).unwrap().conj();
            if !agree_relative(a, &b, 5) {
                pass = false;
                parts.push(format!("N = {}: C_{k} vs conj C_{partner}", t.level()));
            }
            for j in k + 1..=n {
                if agree_relative(a, inv.value(j).unwrap(), 5) {
                    pass = false;
                    parts.push(format!("N = {}: C_{k} = C_{j}", t.level()));
                }
            }
        }
        parts.push(format!("N = {}: {n} classes checked", t.level()));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_10(t5: &RayClassTable, inv5: &InvariantTable) -> Outcome {
    let values = inv5.values();
    let mut smallest = f64::INFINITY;
    for chi in all_characters(t5).iter().filter(|c| !c.is_trivial()) {
        let s = stickelberger_sum(t5, &values, chi, 256).unwrap();
        smallest = smallest.min(s.abs().to_f64());
    }
    outcome(smallest > 1.0, format!("min |S_f(chi)| over nontrivial chi = {smallest:.3}"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let ctx = CmContext::new(5).unwrap();
    let t5 = enumerate_ray_classes(5, 5).unwrap();
    let t6 = enumerate_ray_classes(5, 6).unwrap();
    let inv5 = compute_invariants(&ctx, &t5, 512).unwrap();
    let inv6 = compute_invariants(&ctx, &t6, 768).unwrap();

    let criteria: Vec<Check<'_>> = vec![
        ("1  conductor 5 table", Box::new(|| compare_rows(&inv5, &EXPECTED_5, 1..=5))),
        ("2a conductor 6 table C_1..C_9", Box::new(|| compare_rows(&inv6, &EXPECTED_6, 1..=9))),
        ("2b conductor 6 table C_10", Box::new(|| compare_rows(&inv6, &EXPECTED_6, 10..=10))),
        ("3  group structure", Box::new(|| criterion_3(&t5, &t6))),
        ("4  exact polarization", Box::new(|| criterion_4(&ctx, &[&t5, &t6]))),
        ("5  r-vector of C_1", Box::new(|| criterion_5(&ctx, &t5))),
        ("6  theta identities", Box::new(criterion_6)),
        ("7  genus-1 degeneration", Box::new(criterion_7)),
        ("8  independence", Box::new(|| criterion_8(&ctx, &t5))),
        ("9  conjugation and distinctness", Box::new(|| criterion_9(&[(&t5, &inv5), (&t6, &inv6)]))),
        ("10 Stickelberger nonvanishing", Box::new(|| criterion_10(&t5, &inv5))),
    ];

    let mut failed = 0;
    for (name, check) in &criteria {
        let t = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {name:<34} {status}  {} ({:.1}s)", o.detail, t.elapsed().as_secs_f64());
    }
    println!("{} of {} checks passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
