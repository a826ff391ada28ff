//! Seeded property suites behind `siegel verify`.
//!
//! Every check records `log2` residuals; a check passes when no case failed
//! outright and the worst residual is below its bound.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;

use crate::bigcomplex::{log2_rel_diff, BigComplex};
use crate::cmat::CMatrix;
use crate::cmdata::{gram_matrix, riemann_pairing, CmContext, RiemannFormSpec};
use crate::cyclofield::{CycloElem, CycloIdeal};
use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::rayclass::{
    compute_invariants, conjugate_symmetry_defect, enumerate_ray_classes, equivalent_representatives,
    independence_check, SUPPORTED_ELLS,
};
use crate::symplectic::{
    act_on_h, char_permute, is_symplectic, random_symplectic, sp_generators, symplectic_reduce, transpose_act,
    PivotOrder, SiegelPoint,
};
use crate::theta::{big_theta, build_char_sets, siegel_function, theta_eval, ThetaChar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Theta,
    Symplectic,
    Cmdata,
    Rayclass,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(Suite::Theta),
            "symplectic" => Ok(Suite::Symplectic),
            "cmdata" => Ok(Suite::Cmdata),
            "rayclass" => Ok(Suite::Rayclass),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!("unknown suite '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub ell: u32,
    pub level: i64,
    /// Precision of the theta-level and symplectic checks.
    pub prec: u32,
    /// Precision of invariant tables in the ray-class suite.
    pub table_prec: u32,
    pub cases: usize,
    /// Alternate representatives per class in the independence check.
    pub alternates: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 0, ell: 5, level: 5, prec: 256, table_prec: 512, cases: 20, alternates: 1 }
    }
}

/// Outcome of one property over many cases.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub cases: usize,
    pub bound_log2: f64,
    pub max_log2: f64,
    pub histogram: BTreeMap<i64, usize>,
    pub failures: Vec<String>,
}

impl CheckReport {
    fn new(name: &str, bound_log2: f64) -> Self {
        CheckReport {
            name: name.to_string(),
            cases: 0,
            bound_log2,
            max_log2: f64::NEG_INFINITY,
            histogram: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    /// Records one residual, given as `log2` of its size (`-inf` when exact).
    fn record(&mut self, residual_log2: f64) {
        self.cases += 1;
        self.max_log2 = self.max_log2.max(residual_log2);
        let bucket = if residual_log2.is_finite() { (residual_log2 / 32.0).floor() as i64 * 32 } else { i64::MIN };
        *self.histogram.entry(bucket).or_default() += 1;
    }

    fn exact(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.record(if ok { f64::NEG_INFINITY } else { 0.0 });
        if !ok {
            self.failures.push(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.cases += 1;
        self.failures.push(what);
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0 && self.max_log2 <= self.bound_log2
    }
}

fn fmt_log2(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "0".to_string()
    } else {
        format!("2^{x:.1}")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {:<28} cases {:>4}  max residual {:>10}  bound {}",
            self.name,
            self.cases,
            fmt_log2(self.max_log2),
            fmt_log2(self.bound_log2)
        )?;
        let hist: Vec<String> = self
            .histogram
            .iter()
            .map(|(&b, c)| if b == i64::MIN { format!("exact:{c}") } else { format!("[2^{b},2^{}):{c}", b + 32) })
            .collect();
        write!(f, "\n     histogram {}", hist.join(" "))?;
        for msg in self.failures.iter().take(5) {
            write!(f, "\n     {msg}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}: {}", self.suite, if self.passed() { "PASS" } else { "FAIL" })?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    Ok(match suite {
        Suite::Theta => vec![theta_suite(cfg)],
        Suite::Symplectic => vec![symplectic_suite(cfg)],
        Suite::Cmdata => vec![cmdata_suite(cfg)?],
        Suite::Rayclass => vec![rayclass_suite(cfg)?],
        Suite::All => vec![theta_suite(cfg), symplectic_suite(cfg), cmdata_suite(cfg)?, rayclass_suite(cfg)?],
    })
}

/// A point with `Re` entries in `[-1/2, 1/2)` and a diagonally dominant
/// imaginary part.
pub fn random_point<R: Rng + ?Sized>(g: usize, prec: u32, rng: &mut R) -> SiegelPoint {
    loop {
        let mut rows = vec![vec![BigComplex::zero(prec); g]; g];
        for i in 0..g {
            for j in i..g {
                let re = rng.gen_range(-0.5..0.5);
                let im = if i == j { rng.gen_range(0.8..1.5) } else { rng.gen_range(-0.3..0.3) };
                rows[i][j] = BigComplex::from_f64(re, im, prec);
                rows[j][i] = rows[i][j].clone();
            }
        }
        if let Ok(p) = SiegelPoint::new(CMatrix::from_rows(rows)) {
            return p;
        }
    }
}

/// Characteristic with numerators in `[0, n)` that is not integral.
pub fn random_char<R: Rng + ?Sized>(g: usize, n: i64, rng: &mut R) -> ThetaChar {
    loop {
        let k: Vec<i64> = (0..2 * g).map(|_| rng.gen_range(0..n)).collect();
        let v = ThetaChar::from_numerators(&k, n).expect("n > 0");
        if !v.is_integral() {
            return v;
        }
    }
}

fn rel_log2(a: &BigComplex, b: &BigComplex) -> f64 {
    if a == b {
        f64::NEG_INFINITY
    } else {
        log2_rel_diff(a, b)
    }
}

pub fn theta_suite(cfg: &VerifyConfig) -> SuiteReport {
    let prec = cfg.prec;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut parity = CheckReport::new("theta parity", -100.0);
    let mut vanishing = CheckReport::new("odd vanishing", -100.0);
    let mut shift = CheckReport::new("level shift invariance", -64.0);
    let mut modular = CheckReport::new("Sp invariance", -64.0);
    let mut genus_one = CheckReport::new("genus-1 Siegel function", -64.0);

    for case in 0..cfg.cases {
        let g = 1 + case % 2;
        let z = random_point(g, prec + 32, &mut rng);
        let v = random_char(g, rng.gen_range(2..9), &mut rng);
        match (theta_eval(&v, &z, prec), theta_eval(&v.negated(), &z, prec)) {
            (Ok(a), Ok(b)) => parity.record((&a - &b).log2_abs()),
            (Err(e), _) | (_, Err(e)) => parity.fail(format!("{v}: {e}")),
        }

        let s_minus = build_char_sets(g).s_minus;
        let a = &s_minus[rng.gen_range(0..s_minus.len())];
        let shifted = a.shifted(&(0..2 * g).map(|_| rng.gen_range(-2..=2)).collect::<Vec<_>>());
        match theta_eval(&shifted, &z, prec) {
            Ok(t) => vanishing.record(t.log2_abs()),
            Err(e) => vanishing.fail(format!("{shifted}: {e}")),
        }

        let n = rng.gen_range(2..6);
        let v = random_char(g, n, &mut rng);
        let m: Vec<i64> = (0..2 * g).map(|_| rng.gen_range(-3..=3)).collect();
        match (big_theta(&v, n, &z, prec), big_theta(&v.shifted(&m), n, &z, prec)) {
            (Ok(a), Ok(b)) => shift.record(rel_log2(&a, &b)),
            (Err(Error::PoleOfTheta(_)), Err(Error::PoleOfTheta(_))) => shift.record(f64::NEG_INFINITY),
            (Err(e), _) | (_, Err(e)) => shift.fail(format!("{v} shifted by {m:?}: {e}")),
        }

        // Resample γ until the action is well conditioned and both sides are finite.
        let mut done = false;
        for _ in 0..8 {
            let gamma = random_symplectic(g, 3, &mut rng);
            let Ok(gz) = act_on_h(&gamma, &z) else { continue };
            let lhs = big_theta(&v, n, &gz, prec);
            let rhs = big_theta(&transpose_act(&gamma, &v), n, &z, prec);
            match (lhs, rhs) {
                (Ok(a), Ok(b)) => modular.record(rel_log2(&a, &b)),
                (Err(Error::PoleOfTheta(_)), _) | (_, Err(Error::PoleOfTheta(_))) => continue,
                (Err(e), _) | (_, Err(e)) => modular.fail(format!("{v}: {e}")),
            }
            done = true;
            break;
        }
        if !done {
            modular.fail(format!("{v}: no usable transformation in 8 draws"));
        }

        let tau = random_point(1, prec + 32, &mut rng).entry(0, 0).clone();
        let n = rng.gen_range(2..8);
        let v = random_char(1, n, &mut rng);
        let lhs = SiegelPoint::from_tau(tau.clone()).and_then(|z1| big_theta(&v, n, &z1, prec));
        let rhs = siegel_function(&v, &tau, prec + 64).map(|g| g.pow_u64(12 * n as u64));
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => genus_one.record(rel_log2(&a, &b)),
            (Err(e), _) | (_, Err(e)) => genus_one.fail(format!("{v}: {e}")),
        }
    }
    SuiteReport { suite: "theta", checks: vec![parity, vanishing, shift, modular, genus_one] }
}

fn random_alternating<R: Rng + ?Sized>(n: usize, rng: &mut R) -> QMatrix {
    loop {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let x = rng.gen_range(-6i64..=6);
                m[(i, j)] = Rational::from(x);
                m[(j, i)] = Rational::from(-x);
            }
        }
        if m.det() != 0 {
            return m;
        }
    }
}

pub fn symplectic_suite(cfg: &VerifyConfig) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5e);
    let mut round_trip = CheckReport::new("reduction round trip", f64::NEG_INFINITY);
    let mut generators = CheckReport::new("generators symplectic", f64::NEG_INFINITY);
    let mut action = CheckReport::new("action composition", -(f64::from(cfg.prec) / 2.0));
    let mut permutation = CheckReport::new("characteristic permutation", f64::NEG_INFINITY);

    for g in 1..=3 {
        for m in sp_generators(g) {
            generators.exact(is_symplectic(&m), || format!("generator of Sp({g}) not symplectic"));
        }
    }

    for case in 0..cfg.cases {
        let g = 1 + case % 3;
        let form = random_alternating(2 * g, &mut rng);
        for order in [PivotOrder::Forward, PivotOrder::Reversed] {
            match symplectic_reduce(&form, order) {
                Ok(red) => {
                    let t = &red.transform;
                    let back = &(t * &form) * &t.transpose();
                    let unimodular = t.is_integral() && t.det().abs() == 1;
                    let divides = red.divisors.windows(2).all(|w| Rational::from(&w[1] / &w[0]).is_integer());
                    round_trip.exact(back == red.canonical_form() && unimodular && divides, || {
                        format!("{order:?} reduction of\n{form}")
                    });
                }
                Err(e) => round_trip.fail(format!("{order:?}: {e}")),
            }
        }

        let gg = 1 + case % 2;
        let z = random_point(gg, cfg.prec + 32, &mut rng);
        let m1 = random_symplectic(gg, 3, &mut rng);
        let m2 = random_symplectic(gg, 3, &mut rng);
        let lhs = act_on_h(&m1.mul(&m2), &z);
        let rhs = act_on_h(&m2, &z).and_then(|w| act_on_h(&m1, &w));
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => {
                let scale = a.matrix().log2_max_abs().max(0.0);
                action.record(a.matrix().sub(b.matrix()).log2_max_abs() - scale);
            }
            (Err(Error::UnstableAction), _) | (_, Err(Error::UnstableAction)) => {}
            (Err(e), _) | (_, Err(e)) => action.fail(e.to_string()),
        }

        let sets = build_char_sets(gg);
        let a = &sets.s_minus[rng.gen_range(0..sets.s_minus.len())];
        let composed = char_permute(&m1, a).and_then(|x| char_permute(&m2, &x));
        let direct = char_permute(&m1.mul(&m2), a);
        match (composed, direct) {
            (Ok(x), Ok(y)) => permutation.exact(x == y && sets.s_minus.contains(&y), || format!("{a}: {x} vs {y}")),
            (Err(e), _) | (_, Err(e)) => permutation.fail(format!("{a}: {e}")),
        }
    }
    SuiteReport { suite: "symplectic", checks: vec![round_trip, generators, action, permutation] }
}

pub fn cmdata_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xc3);
    let ell = cfg.ell;
    let ctx = CmContext::new(ell)?;
    let mut positivity = CheckReport::new("xi positivity", f64::NEG_INFINITY);
    let mut different = CheckReport::new("xi inverse different", f64::NEG_INFINITY);
    let mut alternating = CheckReport::new("pairing alternating", f64::NEG_INFINITY);
    let mut norm = CheckReport::new("type norm multiplicative", f64::NEG_INFINITY);
    let mut gram = CheckReport::new("Gram = J", f64::NEG_INFINITY);

    for l in SUPPORTED_ELLS {
        positivity.exact(CmContext::new(l)?.xi_is_positive(cfg.prec), || format!("ell = {l}"));
    }

    let unit_spec = RiemannFormSpec::new(ctx.xi().clone(), Rational::from(1))?;
    let powers: Vec<CycloElem> = (1..ell as i64).map(|k| CycloElem::zeta_pow(ell, k)).collect();
    let g = gram_matrix(&unit_spec, &powers)?.matrix;
    different.exact(g.is_integral() && g.det().abs() == 1, || format!("Gram of powers of zeta:\n{g}"));

    let random_elem = |rng: &mut ChaCha8Rng| {
        let c: Vec<i64> = (0..ell as usize - 1).map(|_| rng.gen_range(-4..=4)).collect();
        CycloElem::from_int_coords(ell, &c).expect("length ell - 1")
    };
    for _ in 0..cfg.cases {
        let a = random_elem(&mut rng);
        let b = random_elem(&mut rng);
        let ab = riemann_pairing(&unit_spec, &a, &b);
        let ba = riemann_pairing(&unit_spec, &b, &a);
        alternating.exact(riemann_pairing(&unit_spec, &a, &a) == 0 && ab == -ba, || format!("{a}, {b}"));
        norm.exact(ctx.type_norm(&(&a * &b)) == &ctx.type_norm(&a) * &ctx.type_norm(&b), || format!("{a}, {b}"));

        if a.is_zero() {
            continue;
        }
        let level = rng.gen_range(2..8);
        let ideal = CycloIdeal::new(a.clone())?;
        let spec = ctx.polarization(level, &ideal);
        let basis = ctx.lattice_basis(level, &a)?;
        gram.exact(gram_matrix(&spec, &basis)?.is_standard, || format!("lambda = {a}, N = {level}"));
    }
    Ok(SuiteReport { suite: "cmdata", checks: vec![positivity, different, alternating, norm, gram] })
}

pub fn rayclass_suite(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7a);
    let ctx = CmContext::new(cfg.ell)?;
    let table = enumerate_ray_classes(cfg.ell, cfg.level)?;
    let mut group = CheckReport::new("group law", f64::NEG_INFINITY);
    let mut gram = CheckReport::new("Gram = J", f64::NEG_INFINITY);
    let mut conj = CheckReport::new("conjugate symmetry", -(f64::from(cfg.table_prec) / 2.0));
    let mut distinct = CheckReport::new("pairwise distinct", f64::NEG_INFINITY);
    let mut independence = CheckReport::new("independence", -(f64::from(cfg.table_prec) / 2.0));

    for a in table.classes() {
        for b in table.classes() {
            let prod = &a.representative * &b.representative;
            let want = table.mul_labels(a.label, b.label)?;
            group.exact(table.class_of(&prod)? == want, || format!("{} * {}", a.name(), b.name()));
        }
        let spec = ctx.polarization(cfg.level, &CycloIdeal::new(a.representative.clone())?);
        let basis = ctx.lattice_basis(cfg.level, &a.representative)?;
        gram.exact(gram_matrix(&spec, &basis)?.is_standard, || a.name());
    }

    let inv = compute_invariants(&ctx, &table, cfg.table_prec)?;
    let values = inv.values();
    let defect = conjugate_symmetry_defect(&table, &values)?;
    conj.record(if defect.is_nan() { f64::NEG_INFINITY } else { defect });
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let d = rel_log2(&values[i], &values[j]);
            distinct.exact(d > -10.0, || format!("C_{} and C_{} coincide", i + 1, j + 1));
        }
    }
    if values.len() < 2 {
        distinct.exact(true, String::new);
    }

    for cls in table.classes() {
        for alt in equivalent_representatives(&table, cls.label, cfg.alternates, &mut rng)? {
            for order in [PivotOrder::Forward, PivotOrder::Reversed] {
                match independence_check(&ctx, &table, cls.label, &alt, order, cfg.table_prec) {
                    Ok(out) => {
                        independence.record(rel_log2(&out.base, &out.alternate));
                        if !out.agree {
                            independence.failures.push(format!("{} via {alt} ({order:?})", cls.name()));
                        }
                    }
                    Err(e) => independence.fail(format!("{} via {alt}: {e}", cls.name())),
                }
            }
        }
    }
    Ok(SuiteReport { suite: "rayclass", checks: vec![group, gram, conj, distinct, independence] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyConfig {
        VerifyConfig { seed: 7, cases: 4, prec: 160, ..VerifyConfig::default() }
    }

    #[test]
    fn theta_suite_passes() {
        let r = theta_suite(&quick());
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn symplectic_suite_passes() {
        let r = symplectic_suite(&quick());
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn cmdata_suite_passes() {
        for ell in [3, 5, 7] {
            let r = cmdata_suite(&VerifyConfig { ell, ..quick() }).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("rayclass".parse::<Suite>().unwrap(), Suite::Rayclass);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn empty_check_does_not_pass() {
        let c = CheckReport::new("x", 0.0);
        assert!(!c.passed());
    }
}
