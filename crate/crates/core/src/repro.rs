//! Reconstructions of worked examples as checked reports.
//!
//! Every expectation carries a [`Basis`] recording where the expected value
//! comes from; a [`Check`] cannot be built without one. Verdicts are recomputed
//! from the stored numbers on demand.

use crate::error::{invalid, Result};
use crate::gen::{random_matrix, rng, MassProfile};
use crate::kt::kt_mask_bruteforce_with;
use crate::measure::{MeasureSpace, WeightedMatrix};
use crate::norms::{conjugate, mixed_lorentz_norm, mixed_lorentz_norm_t, CoupleSpec};
use crate::rectnorm::{quad_norm_with, triple_norm_with, Limits};
use crate::splitting::split_with;

/// What a computed quantity is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expect {
    /// `|computed - value| <= rtol |value|`.
    Approx { value: f64, rtol: f64 },
    /// `computed <= bound (1 + rtol)`.
    AtMost { bound: f64, rtol: f64 },
    /// `computed >= bound (1 - rtol)`.
    AtLeast { bound: f64, rtol: f64 },
    /// `computed > bound`.
    Above { bound: f64 },
    /// `computed < bound`.
    Below { bound: f64 },
}

impl Expect {
    pub fn holds(&self, x: f64) -> bool {
        match *self {
            Expect::Approx { value, rtol } => (x - value).abs() <= rtol * value.abs(),
            Expect::AtMost { bound, rtol } => x <= bound + rtol * bound.abs(),
            Expect::AtLeast { bound, rtol } => x >= bound - rtol * bound.abs(),
            Expect::Above { bound } => x > bound,
            Expect::Below { bound } => x < bound,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Expect::Approx { value, rtol } => format!("= {value} (rtol {rtol:e})"),
            Expect::AtMost { bound, rtol } => format!("<= {bound} (rtol {rtol:e})"),
            Expect::AtLeast { bound, rtol } => format!(">= {bound} (rtol {rtol:e})"),
            Expect::Above { bound } => format!("> {bound}"),
            Expect::Below { bound } => format!("< {bound}"),
        }
    }
}

/// Provenance of an expected value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// A closed-form value or an inequality proved for this family.
    Analytic,
    /// Another independent computation in this crate.
    Oracle,
    /// Immediate from the definitions.
    Elementary,
}

impl Basis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Basis::Analytic => "analytic",
            Basis::Oracle => "oracle",
            Basis::Elementary => "elementary",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub computed: f64,
    pub expect: Expect,
    pub basis: Basis,
}

impl Check {
    pub fn new(name: impl Into<String>, computed: f64, expect: Expect, basis: Basis) -> Self {
        Self {
            name: name.into(),
            computed,
            expect,
            basis,
        }
    }

    pub fn passed(&self) -> bool {
        self.expect.holds(self.computed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproReport {
    pub case_id: String,
    pub params: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub computed: Vec<(String, f64)>,
    pub checks: Vec<Check>,
}

impl ReproReport {
    fn new(case_id: &str, params: Vec<(&str, String)>) -> Self {
        Self {
            case_id: case_id.to_string(),
            params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            seed: None,
            computed: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn record(&mut self, name: impl Into<String>, value: f64) {
        self.computed.push((name.into(), value));
    }

    fn check(&mut self, name: impl Into<String>, computed: f64, expect: Expect, basis: Basis) {
        self.checks.push(Check::new(name, computed, expect, basis));
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.computed.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }
}

/// Case identifiers understood by [`run_case`].
pub const CASES: [&str; 4] = ["single-row", "lorentz-row", "uniform-square", "unit-mass"];

/// One row of `n` unit atoms, `a = 1`, `t = 1`, couple `(p, 1)`.
///
/// Closed forms: `||||a|||| = 1` (only one column fits the constraint),
/// `|||a||| = n^{1/p}` (the whole row), and the best mask cost
/// `min_k k + (n-k)^{1/p}`.
pub fn repro_single_row(n: usize, p: f64, limits: &Limits) -> Result<ReproReport> {
    if n == 0 {
        return Err(invalid("single-row case needs n >= 1"));
    }
    let spec = CoupleSpec::new(p, 1.0, 1.0)?;
    let a = WeightedMatrix::counting(&[vec![1.0; n]])?;
    let mut report = ReproReport::new("single-row", vec![("n", n.to_string()), ("p", fmt_exp(p))]);

    let triple = triple_norm_with(&a, &spec, limits)?.value;
    let quad = quad_norm_with(&a, &spec, limits)?.value;
    let split = split_with(&a, &spec, limits)?;
    let nf = n as f64;
    let inv_p = 1.0 / p;
    let n_pow = nf.powf(inv_p);
    let mask_closed_form = (0..=n)
        .map(|k| k as f64 + ((n - k) as f64).powf(inv_p))
        .fold(f64::INFINITY, f64::min);

    report.record("quad", quad);
    report.record("triple", triple);
    report.record("split_upper", split.upper());
    report.record("n_pow_1_over_p", n_pow);
    report.check(
        "quad",
        quad,
        Expect::Approx {
            value: 1.0,
            rtol: 1e-12,
        },
        Basis::Analytic,
    );
    report.check(
        "triple",
        triple,
        Expect::Approx {
            value: n_pow,
            rtol: 1e-12,
        },
        Basis::Analytic,
    );
    report.check(
        "split_upper <= 2 triple",
        split.upper(),
        Expect::AtMost {
            bound: 2.0 * triple,
            rtol: 1e-9,
        },
        Basis::Analytic,
    );
    report.check(
        "split_upper >= c_pq triple",
        split.upper(),
        Expect::AtLeast {
            bound: spec.c_pq() * triple,
            rtol: 1e-9,
        },
        Basis::Analytic,
    );
    match kt_mask_bruteforce_with(&a, &spec, limits) {
        Ok(mask) => {
            report.record("mask", mask.value);
            report.check(
                "mask",
                mask.value,
                Expect::Approx {
                    value: mask_closed_form,
                    rtol: 1e-9,
                },
                Basis::Analytic,
            );
            report.check(
                "split_upper >= mask",
                split.upper(),
                Expect::AtLeast {
                    bound: mask.value,
                    rtol: 1e-9,
                },
                Basis::Oracle,
            );
            report.check(
                "mask >= c_pq triple",
                mask.value,
                Expect::AtLeast {
                    bound: spec.c_pq() * triple,
                    rtol: 1e-9,
                },
                Basis::Oracle,
            );
        }
        Err(crate::error::Error::CapacityExceeded { .. }) => {}
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// Upper bound for `K_1(a)` in the couple `(l^{p,q}_M(l^1_N), l^{p,q}_N(l^1_M))`
/// from the threshold family `b = (a - s)_+`, `c = min(a, s)`, `s` ranging over
/// `0` and the entries of `|a|`.
pub fn threshold_scan(a: &WeightedMatrix, p: f64, q: f64, t: f64) -> Result<f64> {
    let abs = a.abs();
    let mut levels: Vec<f64> = abs.entries().to_vec();
    levels.push(0.0);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut best = f64::INFINITY;
    for s in levels {
        let b = abs.map(|x| (x - s).max(0.0));
        let c = abs.map(|x| x.min(s));
        let cost = mixed_lorentz_norm(&b, p, q, 1.0)? + t * mixed_lorentz_norm_t(&c, p, q, 1.0)?;
        best = best.min(cost);
    }
    Ok(best)
}

/// `n x n` unit atoms with first row `j^{-1/p}` and zeros elsewhere, `t = 1`.
pub fn lorentz_row_matrix(n: usize, p: f64) -> Result<WeightedMatrix> {
    let mut rows = vec![vec![0.0; n]; n];
    for (j, x) in rows[0].iter_mut().enumerate() {
        *x = ((j + 1) as f64).powf(-1.0 / p);
    }
    WeightedMatrix::counting(&rows)
}

/// For each `n`: `|||a|||_{p,1} <= p*`, the threshold bound dominates the
/// rectangle norm, and the threshold bound grows strictly with `n`.
pub fn repro_lorentz_row(ns: &[usize], p: f64, q: f64, limits: &Limits) -> Result<ReproReport> {
    if ns.iter().any(|&n| n < 2) {
        return Err(invalid("lorentz-row case needs n >= 2"));
    }
    if !(q >= 1.0 && q < p) {
        return Err(invalid(format!("lorentz-row case needs 1 <= q < p, got q = {q}")));
    }
    let spec = CoupleSpec::new(p, 1.0, 1.0)?;
    let p_star = conjugate(p);
    let list = ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",");
    let mut report = ReproReport::new("lorentz-row", vec![("n", list), ("p", fmt_exp(p)), ("q", fmt_exp(q))]);
    let mut previous: Option<f64> = None;
    for &n in ns {
        let a = lorentz_row_matrix(n, p)?;
        let triple = triple_norm_with(&a, &spec, limits)?.value;
        let k_hat = threshold_scan(&a, p, q, 1.0)?;
        report.record(format!("triple[n={n}]"), triple);
        report.record(format!("k_hat[n={n}]"), k_hat);
        report.record(format!("ratio[n={n}]"), k_hat / triple);
        report.check(
            format!("triple[n={n}] <= p*"),
            triple,
            Expect::AtMost {
                bound: p_star,
                rtol: 1e-12,
            },
            Basis::Analytic,
        );
        report.check(
            format!("k_hat[n={n}] >= triple"),
            k_hat,
            Expect::AtLeast {
                bound: triple,
                rtol: 1e-12,
            },
            Basis::Elementary,
        );
        if let Some(prev) = previous {
            report.check(
                format!("k_hat[n={n}] increasing"),
                k_hat,
                Expect::Above { bound: prev },
                Basis::Analytic,
            );
        }
        previous = Some(k_hat);
    }
    Ok(report)
}

/// `a = 1` on `n x n` atoms of mass `1/n`: `|||a||| -> t`,
/// `||||a|||| -> t^{p/(p-q)}` and their ratio `-> t^{-q/(p-q)}`, each within `rtol`.
pub fn repro_uniform_square(n: usize, p: f64, q: f64, t: f64, rtol: f64, limits: &Limits) -> Result<ReproReport> {
    if n < 4 {
        return Err(invalid("uniform-square case needs n >= 4"));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(invalid(format!("uniform-square case needs 0 < t <= 1, got {t}")));
    }
    let spec = CoupleSpec::new(p, q, t)?;
    let side = MeasureSpace::uniform(n, 1.0 / n as f64)?;
    let a = WeightedMatrix::new(side.clone(), side, vec![1.0; n * n])?;
    let mut report = ReproReport::new(
        "uniform-square",
        vec![
            ("n", n.to_string()),
            ("p", fmt_exp(p)),
            ("q", fmt_exp(q)),
            ("t", t.to_string()),
        ],
    );
    let triple = triple_norm_with(&a, &spec, limits)?.value;
    let quad = quad_norm_with(&a, &spec, limits)?.value;
    let ratio = triple / quad;
    // exponents in the p = inf limit: p/(p-q) -> 1, q/(p-q) -> 0
    let (quad_exp, ratio_exp) = if p.is_infinite() {
        (1.0, 0.0)
    } else {
        (p / (p - q), q / (p - q))
    };
    report.record("triple", triple);
    report.record("quad", quad);
    report.record("ratio", ratio);
    report.check("triple", triple, Expect::Approx { value: t, rtol }, Basis::Analytic);
    report.check(
        "quad",
        quad,
        Expect::Approx {
            value: t.powf(quad_exp),
            rtol,
        },
        Basis::Analytic,
    );
    report.check(
        "ratio",
        ratio,
        Expect::Approx {
            value: t.powf(-ratio_exp),
            rtol,
        },
        Basis::Analytic,
    );
    report.check(
        "quad <= triple",
        quad,
        Expect::AtMost {
            bound: triple,
            rtol: 1e-12,
        },
        Basis::Elementary,
    );
    Ok(report)
}

/// Unit masses, square matrices, `t >= 1`: the split cost is at most
/// `(1 + t/floor(t)) ||||a||||_t`, which is below `3 ||||a||||_t`.
pub fn repro_unit_mass(m: usize, t: f64, trials: usize, seed: u64, limits: &Limits) -> Result<ReproReport> {
    let mut r = rng(seed);
    let instances: Vec<WeightedMatrix> = (0..trials)
        .map(|_| random_matrix(&mut r, m, m, MassProfile::Unit, 0.0))
        .collect();
    let mut report = repro_unit_mass_instances(&instances, t, limits)?;
    report.params.insert(0, ("m".into(), m.to_string()));
    report.params.push(("trials".into(), trials.to_string()));
    report.seed = Some(seed);
    Ok(report)
}

/// [`repro_unit_mass`] on given instances.
pub fn repro_unit_mass_instances(instances: &[WeightedMatrix], t: f64, limits: &Limits) -> Result<ReproReport> {
    if !(t >= 1.0 && t.is_finite()) {
        return Err(invalid(format!("unit-mass case needs finite t >= 1, got {t}")));
    }
    let spec = CoupleSpec::infinity_one(t)?;
    let factor = 1.0 + t / t.floor();
    let mut report = ReproReport::new("unit-mass", vec![("t", t.to_string())]);
    let mut worst = 0.0f64;
    let mut violations = 0usize;
    for a in instances {
        let unit = a
            .row_space()
            .masses()
            .iter()
            .chain(a.col_space().masses())
            .all(|&w| w == 1.0);
        if !unit || a.nrows() != a.ncols() {
            return Err(invalid("unit-mass case needs square matrices with unit masses"));
        }
        let quad = quad_norm_with(a, &spec, limits)?.value;
        let upper = split_with(a, &spec, limits)?.upper();
        let ratio = if upper == 0.0 { 0.0 } else { upper / quad };
        if !(Expect::AtMost {
            bound: factor * quad,
            rtol: 1e-9,
        })
        .holds(upper)
        {
            violations += 1;
        }
        worst = worst.max(ratio);
    }
    report.record("instances", instances.len() as f64);
    report.record("factor", factor);
    report.record("worst_ratio", worst);
    report.record("violations", violations as f64);
    report.check(
        "violations",
        violations as f64,
        Expect::AtMost { bound: 0.0, rtol: 0.0 },
        Basis::Analytic,
    );
    report.check(
        "worst_ratio",
        worst,
        Expect::AtMost {
            bound: factor,
            rtol: 1e-9,
        },
        Basis::Analytic,
    );
    report.check("factor < 3", factor, Expect::Below { bound: 3.0 }, Basis::Elementary);
    Ok(report)
}

/// Parameters for [`run_case`]; unset fields take each case's defaults.
#[derive(Debug, Clone, Default)]
pub struct CaseParams {
    pub n: Option<Vec<usize>>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub t: Option<f64>,
    pub trials: Option<usize>,
    pub seed: u64,
}

/// Runs a case by identifier.
pub fn run_case(case: &str, params: &CaseParams, limits: &Limits) -> Result<ReproReport> {
    let first_n = |default: usize| params.n.as_ref().and_then(|v| v.first().copied()).unwrap_or(default);
    match case {
        "single-row" => repro_single_row(first_n(16), params.p.unwrap_or(2.0), limits),
        "lorentz-row" => {
            let ns = params.n.clone().unwrap_or_else(|| vec![4, 16, 64, 256]);
            repro_lorentz_row(&ns, params.p.unwrap_or(2.0), params.q.unwrap_or(1.0), limits)
        }
        "uniform-square" => repro_uniform_square(
            first_n(64),
            params.p.unwrap_or(2.0),
            params.q.unwrap_or(1.0),
            params.t.unwrap_or(0.25),
            0.05,
            limits,
        ),
        "unit-mass" => repro_unit_mass(
            first_n(4),
            params.t.unwrap_or(1.0),
            params.trials.unwrap_or(100),
            params.seed,
            limits,
        ),
        other => Err(invalid(format!(
            "unknown case '{other}'; known cases: {}",
            CASES.join(", ")
        ))),
    }
}

fn fmt_exp(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        x.to_string()
    }
}
