//! Kernel operators between weighted discrete spaces and real interpolation
//! norms built from `K_t`.
//!
//! A kernel `k` on `M x N` acts by `(u f)(i) = sum_j k(i,j) f(j) nu_j`, and
//! functions on `M` are paired by `<g, h> = sum_i g(i) h(i) mu_i`, so
//! `<|u| 1_F, 1_E>` is the `l^1` mass of `k` on `E x F`.

use crate::error::{invalid, Error, Result};
use crate::kt::{kt_bracket_with, kt_exact_lp_with};
use crate::measure::{MeasureSpace, WeightedMatrix};
use crate::norms::{mixed_weak_norm, mixed_weak_norm_t, weak_lp_norm, Couple, CoupleSpec};
use crate::rectnorm::{rect_sup, triple_norm_with, Limits, Objective, RectNormResult};

/// A kernel operator from functions on `(N, nu)` to functions on `(M, mu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorKernel {
    kernel: WeightedMatrix,
}

impl OperatorKernel {
    pub fn new(kernel: WeightedMatrix) -> Self {
        Self { kernel }
    }

    pub fn kernel(&self) -> &WeightedMatrix {
        &self.kernel
    }

    pub fn domain(&self) -> &MeasureSpace {
        self.kernel.col_space()
    }

    pub fn codomain(&self) -> &MeasureSpace {
        self.kernel.row_space()
    }

    /// `(u f)(i) = sum_j k(i,j) f(j) nu_j`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        let nu = self.kernel.col_space().masses();
        if f.len() != nu.len() {
            return Err(Error::DimensionMismatch {
                expected: nu.len(),
                got: f.len(),
            });
        }
        Ok((0..self.kernel.nrows())
            .map(|i| {
                self.kernel
                    .row(i)
                    .iter()
                    .zip(f)
                    .zip(nu)
                    .map(|((k, x), w)| k * x * w)
                    .sum()
            })
            .collect())
    }

    /// `|u|`, the operator with kernel `|k|`.
    pub fn modulus(&self) -> Self {
        Self::new(self.kernel.abs())
    }

    /// The adjoint kernel `k(j,i)` from `(M, mu)` to `(N, nu)`.
    pub fn transpose(&self) -> Self {
        Self::new(self.kernel.transpose())
    }

    /// `<g, h> = sum_i g(i) h(i) mu_i` on the codomain.
    pub fn pairing(&self, g: &[f64], h: &[f64]) -> Result<f64> {
        let mu = self.kernel.row_space().masses();
        for v in [g, h] {
            if v.len() != mu.len() {
                return Err(Error::DimensionMismatch {
                    expected: mu.len(),
                    got: v.len(),
                });
            }
        }
        Ok(g.iter().zip(h).zip(mu).map(|((x, y), w)| x * y * w).sum())
    }
}

/// `(theta, q)` with `0 < theta < 1`, `1 <= q <= inf`, and `p = 1/theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpSpec {
    theta: f64,
    q: f64,
}

impl InterpSpec {
    pub fn new(theta: f64, q: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(invalid(format!("theta must lie in (0,1), got {theta}")));
        }
        if !(q >= 1.0) {
            return Err(invalid(format!("q must be >= 1, got {q}")));
        }
        Ok(Self { theta, q })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> f64 {
        1.0 / self.theta
    }
}

/// `|||u|||_t = sup (mu(E) v t^{-1} nu(F))^{-1} <|u| 1_F, 1_E>`.
pub fn op_triple_norm(u: &OperatorKernel, t: f64) -> Result<RectNormResult> {
    op_triple_norm_with(u, t, &Limits::default())
}

pub fn op_triple_norm_with(u: &OperatorKernel, t: f64, limits: &Limits) -> Result<RectNormResult> {
    triple_norm_with(&u.kernel, &CoupleSpec::infinity_one(t)?, limits)
}

/// `[u]_p = sup nu(F)^{-theta} mu(E)^{theta-1} <|u| 1_F, 1_E>`.
pub fn bracket_u_p(u: &OperatorKernel, spec: &InterpSpec) -> Result<RectNormResult> {
    bracket_u_p_with(u, spec, &Limits::default())
}

pub fn bracket_u_p_with(u: &OperatorKernel, spec: &InterpSpec, limits: &Limits) -> Result<RectNormResult> {
    rect_sup(&u.kernel, &Objective::product(spec.theta), limits)
}

/// Value of `sup_t t^{-theta} |||u|||_t` and the `t` attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSup {
    pub value: f64,
    pub t: f64,
}

/// `sup_{t > 0} t^{-theta} |||u|||_t`, scanned over the candidates
/// `t = nu(F)/mu(E)`, where each rectangle's score peaks.
pub fn theta_inf_norm(u: &OperatorKernel, spec: &InterpSpec) -> Result<ThetaSup> {
    theta_inf_norm_with(u, spec, &Limits::default())
}

pub fn theta_inf_norm_with(u: &OperatorKernel, spec: &InterpSpec, limits: &Limits) -> Result<ThetaSup> {
    let row_sums = subset_sums(u.kernel.row_space(), limits)?;
    let col_sums = subset_sums(u.kernel.col_space(), limits)?;
    let mut candidates: Vec<f64> = col_sums
        .iter()
        .flat_map(|&c| row_sums.iter().map(move |&r| c / r))
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let mut best = ThetaSup {
        value: 0.0,
        t: candidates[0],
    };
    for t in candidates {
        let value = t.powf(-spec.theta) * op_triple_norm_with(u, t, limits)?.value;
        if value > best.value {
            best = ThetaSup { value, t };
        }
    }
    Ok(best)
}

/// Distinct masses of nonempty subsets.
fn subset_sums(space: &MeasureSpace, limits: &Limits) -> Result<Vec<f64>> {
    let n = space.len();
    let required = if n >= 127 { u128::MAX } else { (1u128 << n) - 1 };
    if required > limits.rect_evaluations {
        return Err(Error::CapacityExceeded {
            what: "subset enumeration",
            required,
            limit: limits.rect_evaluations,
        });
    }
    let mut sums = vec![0.0f64];
    for &w in space.masses() {
        let extended: Vec<f64> = sums.iter().map(|s| s + w).collect();
        sums.extend(extended);
        sums.sort_by(f64::total_cmp);
        sums.dedup();
    }
    sums.remove(0);
    Ok(sums)
}

/// How `K_t` is bracketed at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KtSource {
    /// `C(p,q) |||a|||_t <= K_t <= ` split cost.
    Bracket,
    /// The exact LP value on both sides; needs the `(inf, 1)` couple.
    ExactLp,
}

/// Geometric grid `t0 r^k` for `t` in `[t0 / span, t0 * span]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    pub ratio: f64,
    pub span: f64,
    /// Overrides the default centre `||a|| / ||a||^T`.
    pub center: Option<f64>,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            ratio: 1.1,
            span: 1e4,
            center: None,
        }
    }
}

/// A closed interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64, rtol: f64) -> bool {
        let slack = rtol * x.abs();
        self.lower - slack <= x && x <= self.upper + slack
    }
}

/// Encloses `||a||_{theta,q} = (int_0^inf (t^{-theta} K_t(a))^q dt/t)^{1/q}` for the
/// couple built on `couple` (supremum when `q = inf`).
///
/// `K_t` is bracketed on a geometric grid. Between grid points
/// `t_k < t < t_{k+1}`, monotonicity of `K_t` and of `K_t / t` give
/// `max(L_k, L_{k+1} t/t_{k+1}) <= K_t <= min(U_{k+1}, U_k t/t_k)`, and each piece
/// is integrated exactly. Outside the grid `K_t >= L_0 t/t_0` and
/// `K_t <= t ||a||^T` below it, and `L_last <= K_t <= ||a||` above it.
pub fn theta_q_norm(
    a: &WeightedMatrix,
    spec: &InterpSpec,
    couple: &Couple,
    source: KtSource,
    grid: &GridOptions,
    limits: &Limits,
) -> Result<Interval> {
    if !(grid.ratio > 1.0 && grid.ratio.is_finite()) {
        return Err(invalid(format!("grid ratio must exceed 1, got {}", grid.ratio)));
    }
    if !(grid.span > 1.0 && grid.span.is_finite()) {
        return Err(invalid(format!("grid span must exceed 1, got {}", grid.span)));
    }
    if source == KtSource::ExactLp && !couple.is_infinity_one() {
        return Err(invalid("the exact LP source needs the (inf, 1) couple"));
    }
    let norm = mixed_weak_norm(a, couple.p(), couple.q())?;
    let norm_t = mixed_weak_norm_t(a, couple.p(), couple.q())?;
    if norm == 0.0 {
        return Ok(Interval { lower: 0.0, upper: 0.0 });
    }
    let t0 = match grid.center {
        Some(c) if c > 0.0 && c.is_finite() => c,
        Some(c) => return Err(invalid(format!("grid centre must be positive, got {c}"))),
        None => norm / norm_t,
    };
    let half = (grid.span.ln() / grid.ratio.ln()).ceil() as i32;
    let ts: Vec<f64> = (-half..=half).map(|k| t0 * grid.ratio.powi(k)).collect();
    let mut lows = Vec::with_capacity(ts.len());
    let mut ups = Vec::with_capacity(ts.len());
    for &t in &ts {
        let (l, u) = match source {
            KtSource::Bracket => {
                let b = kt_bracket_with(a, &couple.at(t)?, limits)?;
                (b.lower, b.upper)
            }
            KtSource::ExactLp => {
                let v = kt_exact_lp_with(a, t, limits)?.value;
                (v, v)
            }
        };
        lows.push(l);
        ups.push(u.min(norm).min(t * norm_t));
    }

    let theta = spec.theta;
    let first = ts[0];
    let last = *ts.last().expect("grid is nonempty");
    if spec.q.is_infinite() {
        let lower = ts
            .iter()
            .zip(&lows)
            .map(|(t, l)| t.powf(-theta) * l)
            .fold(0.0, f64::max);
        let mut upper = (first.powf(1.0 - theta) * norm_t).max(last.powf(-theta) * norm);
        for k in 0..ts.len() - 1 {
            let (tk, tk1) = (ts[k], ts[k + 1]);
            let td = if ups[k] > 0.0 {
                (ups[k + 1] * tk / ups[k]).clamp(tk, tk1)
            } else {
                tk1
            };
            let at_kink = td.powf(-theta) * ups[k + 1].min(ups[k] * td / tk);
            upper = upper.max(at_kink);
        }
        return Ok(Interval { lower, upper });
    }

    let q = spec.q;
    // int_lo^hi (c t^gamma)^q t^{-theta q} dt/t
    let piece = |c: f64, gamma: f64, lo: f64, hi: f64| -> f64 {
        if c == 0.0 || hi <= lo {
            return 0.0;
        }
        let e = (gamma - theta) * q;
        c.powf(q) * (hi.powf(e) - lo.powf(e)) / e
    };
    let mut lower = piece(lows[0] / first, 1.0, 0.0, first) + piece(lows[ts.len() - 1], 0.0, last, f64::INFINITY);
    let mut upper = piece(norm_t, 1.0, 0.0, first) + piece(norm, 0.0, last, f64::INFINITY);
    for k in 0..ts.len() - 1 {
        let (tk, tk1) = (ts[k], ts[k + 1]);
        let tc = if lows[k + 1] > 0.0 {
            (lows[k] * tk1 / lows[k + 1]).clamp(tk, tk1)
        } else {
            tk1
        };
        lower += piece(lows[k], 0.0, tk, tc) + piece(lows[k + 1] / tk1, 1.0, tc, tk1);
        let td = if ups[k] > 0.0 {
            (ups[k + 1] * tk / ups[k]).clamp(tk, tk1)
        } else {
            tk1
        };
        upper += piece(ups[k] / tk, 1.0, tk, td) + piece(ups[k + 1], 0.0, td, tk1);
    }
    Ok(Interval {
        lower: lower.powf(1.0 / q),
        upper: upper.powf(1.0 / q),
    })
}

/// `sup_F nu(F)^{-1/p} ||u 1_F||_{l^{p,inf}(mu)}` with `|u|` in place of `u`.
///
/// With `theta = 1/p` it satisfies `w <= [u]_p <= p* w`.
pub fn weak_type_check(u: &OperatorKernel, p: f64) -> Result<f64> {
    weak_type_check_with(u, p, &Limits::default())
}

pub fn weak_type_check_with(u: &OperatorKernel, p: f64, limits: &Limits) -> Result<f64> {
    if !(p > 1.0) {
        return Err(invalid(format!("weak type check needs p > 1, got {p}")));
    }
    let n = u.kernel.ncols();
    let required = if n >= 127 { u128::MAX } else { (1u128 << n) - 1 };
    if required > limits.rect_evaluations || n >= 64 {
        return Err(Error::CapacityExceeded {
            what: "column subset enumeration",
            required,
            limit: limits.rect_evaluations,
        });
    }
    let modulus = u.modulus();
    let nu = u.kernel.col_space().masses();
    let mut best = 0.0f64;
    let mut indicator = vec![0.0; n];
    for bits in 1u64..(1u64 << n) {
        let mut mass = 0.0;
        for j in 0..n {
            let inside = bits >> j & 1 == 1;
            indicator[j] = if inside { 1.0 } else { 0.0 };
            if inside {
                mass += nu[j];
            }
        }
        let image = modulus.apply(&indicator)?;
        let value = mass.powf(-1.0 / p) * weak_lp_norm(&image, u.kernel.row_space(), p)?;
        best = best.max(value);
    }
    Ok(best)
}
