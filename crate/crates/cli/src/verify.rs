//! Randomized cross-checks of the library's inequalities and identities.
//!
//! Trials run in parallel; each draws its instance from its own seeded stream and
//! tallies are merged in trial order, so the report depends only on the seed.

use mixkt::gen::{random_instance, rng, MassProfile};
use mixkt::interp::{bracket_u_p_with, theta_inf_norm_with};
use mixkt::kt::{kt_exact_lp_with, kt_mask_bruteforce_with};
use mixkt::rectnorm::{quad_norm_with, triple_norm_p1_direct, triple_norm_with};
use mixkt::splitting::split_with;
use mixkt::{
    mixed_weak_norm, triple_norm_p1_degenerate, CoupleSpec, Error, InterpSpec, Limits, OperatorKernel, SplitResult,
    WeightedMatrix,
};
use rand::Rng;
use rayon::prelude::*;

const RTOL: f64 = 1e-9;
const MASK_CELLS: usize = 12;
const KERNEL_SIDE: usize = 4;

pub const PROPERTIES: [&str; 8] = [
    "sandwich-inf-1",
    "split-certified",
    "mask-lower-bound",
    "mask-above-lp",
    "quad-below-triple",
    "q-convexification",
    "theta-identity",
    "p1-identity",
];

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub trials: usize,
    pub max_size: usize,
    pub couples: Vec<(f64, f64)>,
    pub ts: Vec<f64>,
    pub seed: u64,
    pub limits: Limits,
    /// Inflates every split bound threefold, so the harness must report failures.
    pub corrupt_split: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tally {
    pub name: &'static str,
    pub checked: usize,
    pub passed: usize,
    pub first_failure: Option<String>,
}

impl Tally {
    pub fn ok(&self) -> bool {
        self.passed == self.checked
    }
}

type Outcomes = Vec<(usize, Result<(), String>)>;

fn le(x: f64, y: f64) -> bool {
    x <= y + RTOL * x.abs().max(y.abs())
}

fn close(x: f64, y: f64) -> bool {
    x == y || (x - y).abs() <= RTOL * x.abs().max(y.abs())
}

fn expect(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add((trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

struct Trial<'a> {
    config: &'a VerifyConfig,
    index: usize,
    a: WeightedMatrix,
    out: Outcomes,
}

impl Trial<'_> {
    fn record(&mut self, property: usize, result: Result<(), String>) {
        let result = result.map_err(|m| format!("trial {}: {m}", self.index));
        self.out.push((property, result));
    }

    fn split(&self, spec: &CoupleSpec) -> Result<Option<SplitResult>, Error> {
        match split_with(&self.a, spec, &self.config.limits) {
            Ok(mut s) => {
                if self.config.corrupt_split {
                    s.bound_a *= 3.0;
                    s.bound_b *= 3.0;
                }
                Ok(Some(s))
            }
            Err(Error::CertificationFailed { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn run(&mut self, r: &mut impl Rng) -> Result<(), Error> {
        let limits = self.config.limits;
        let ts = self.config.ts.clone();
        let small = self.a.nrows() * self.a.ncols() <= MASK_CELLS;

        for &t in &ts {
            let spec = CoupleSpec::infinity_one(t)?;
            let triple = triple_norm_with(&self.a, &spec, &limits)?.value;
            let lp = kt_exact_lp_with(&self.a, t, &limits)?.value;
            let result = match self.split(&spec)? {
                Some(s) => {
                    let upper = s.upper();
                    expect(le(triple, lp) && le(lp, upper) && le(upper, 2.0 * triple), || {
                        format!("t={t}: triple={triple} lp={lp} split={upper}")
                    })
                }
                None => Err(format!("t={t}: split certification failed")),
            };
            self.record(0, result);
            if small {
                let mask = kt_mask_bruteforce_with(&self.a, &spec, &limits)?.value;
                self.record(3, expect(le(lp, mask), || format!("t={t}: mask={mask} < lp={lp}")));
            }
        }

        for &(p, q) in &self.config.couples.clone() {
            for &t in &ts {
                let spec = CoupleSpec::new(p, q, t)?;
                let triple = triple_norm_with(&self.a, &spec, &limits)?.value;
                let split = self.split(&spec)?;
                let result = match &split {
                    Some(s) => expect(le(s.bound_a, triple) && le(s.bound_b, triple / t), || {
                        format!("({p},{q},{t}): bounds {} {} vs scale {triple}", s.bound_a, s.bound_b)
                    }),
                    None => Err(format!("({p},{q},{t}): split certification failed")),
                };
                self.record(1, result);
                if small {
                    let mask = kt_mask_bruteforce_with(&self.a, &spec, &limits)?.value;
                    let lower = spec.c_pq() * triple;
                    let upper = split.as_ref().map_or(f64::INFINITY, SplitResult::upper);
                    self.record(
                        2,
                        expect(le(lower, mask) && le(mask, upper), || {
                            format!("({p},{q},{t}): C*triple={lower} mask={mask} split={upper}")
                        }),
                    );
                }
                let quad = quad_norm_with(&self.a, &spec, &limits)?.value;
                self.record(
                    4,
                    expect(le(quad, triple), || {
                        format!("({p},{q},{t}): quad={quad} > triple={triple}")
                    }),
                );
                if q > 1.0 {
                    let powered = self.a.abs_pow(q);
                    let lhs = triple.powf(q);
                    let rhs = triple_norm_with(&powered, &spec.convexified(), &limits)?.value;
                    let weak_lhs = mixed_weak_norm(&self.a, p, q)?.powf(q);
                    let weak_rhs = mixed_weak_norm(&powered, p / q, 1.0)?;
                    self.record(
                        5,
                        expect(close(lhs, rhs) && close(weak_lhs, weak_rhs), || {
                            format!("({p},{q},{t}): triple^q={lhs} vs {rhs}, weak^q={weak_lhs} vs {weak_rhs}")
                        }),
                    );
                }
            }
        }

        let rows: Vec<usize> = (0..self.a.nrows().min(KERNEL_SIDE)).collect();
        let cols: Vec<usize> = (0..self.a.ncols().min(KERNEL_SIDE)).collect();
        let u = OperatorKernel::new(self.a.submatrix(&rows, &cols)?);
        let theta = r.gen_range(0.05..0.95);
        let ispec = InterpSpec::new(theta, f64::INFINITY)?;
        let sup = theta_inf_norm_with(&u, &ispec, &limits)?.value;
        let bracket = bracket_u_p_with(&u, &ispec, &limits)?.value;
        self.record(
            6,
            expect(close(sup, bracket), || {
                format!("theta={theta}: sup={sup} bracket={bracket}")
            }),
        );

        let t = r.gen_range(0.01..10.0);
        let closed = triple_norm_p1_degenerate(&self.a, t)?;
        let direct = triple_norm_p1_direct(&self.a, t, &limits)?.value;
        self.record(
            7,
            expect(
                (closed - direct).abs() <= 1e-12 * closed.abs().max(direct.abs()),
                || format!("t={t}: closed={closed} direct={direct}"),
            ),
        );
        Ok(())
    }
}

fn run_trial(config: &VerifyConfig, index: usize) -> Result<Outcomes, Error> {
    let mut r = rng(trial_seed(config.seed, index));
    let profile = if index.is_multiple_of(2) {
        MassProfile::Unit
    } else {
        MassProfile::wide()
    };
    let a = random_instance(&mut r, config.max_size, config.max_size, profile);
    let mut trial = Trial {
        config,
        index,
        a,
        out: Vec::new(),
    };
    trial.run(&mut r)?;
    Ok(trial.out)
}

/// Runs all trials and returns one tally per entry of [`PROPERTIES`].
pub fn run(config: &VerifyConfig) -> Result<Vec<Tally>, Error> {
    for &(p, q) in &config.couples {
        CoupleSpec::new(p, q, 1.0)?;
    }
    for &t in &config.ts {
        CoupleSpec::infinity_one(t)?;
    }
    let outcomes: Vec<Outcomes> = (0..config.trials)
        .into_par_iter()
        .map(|k| run_trial(config, k))
        .collect::<Result<_, _>>()?;
    let mut tallies: Vec<Tally> = PROPERTIES
        .iter()
        .map(|&name| Tally {
            name,
            checked: 0,
            passed: 0,
            first_failure: None,
        })
        .collect();
    for (property, result) in outcomes.into_iter().flatten() {
        let tally = &mut tallies[property];
        tally.checked += 1;
        match result {
            Ok(()) => tally.passed += 1,
            Err(msg) => {
                tally.first_failure.get_or_insert(msg);
            }
        }
    }
    Ok(tallies)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(corrupt_split: bool) -> VerifyConfig {
        VerifyConfig {
            trials: 12,
            max_size: 3,
            couples: vec![(2.0, 1.0), (f64::INFINITY, 2.0)],
            ts: vec![0.5, 2.0],
            seed: 5,
            limits: Limits::default(),
            corrupt_split,
        }
    }

    #[test]
    fn clean_run_passes_and_is_deterministic() {
        let first = run(&config(false)).unwrap();
        assert!(first.iter().all(Tally::ok), "{first:?}");
        assert!(first.iter().all(|t| t.checked > 0), "{first:?}");
        assert_eq!(first, run(&config(false)).unwrap());
    }

    #[test]
    fn corrupted_split_is_detected() {
        let tallies = run(&config(true)).unwrap();
        let sandwich = &tallies[0];
        assert!(sandwich.passed < sandwich.checked, "{sandwich:?}");
        assert!(sandwich.first_failure.is_some());
    }
}
