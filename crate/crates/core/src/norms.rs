//! Scalar and mixed norms: weighted `l^q`, the `l^inf(l^1)` pair, weak `l^{p,inf}`,
//! Lorentz `l^{p,q}` and the mixed `l^{p,inf}(l^q)` quasi-norms.
//!
//! Weak and Lorentz quantities are the rearrangement quasi-norms
//! `sup_s s^{1/p} f*(s)` and `(int (s^{1/p} f*(s))^q ds/s)^{1/q}`; no equivalent
//! renorming is applied. Lorentz integrals are evaluated in closed form over the
//! steps of `f*`.
//!
//! Exponents are plain `f64`; `f64::INFINITY` stands for `p = inf`.

use crate::error::{invalid, Error, Result};
use crate::measure::{pow_q, rearrange_pairs, root_q, MeasureSpace, WeightedMatrix};

/// Conjugate exponent `p*` with `1/p + 1/p* = 1`; `inf* = 1` and `1* = inf`.
pub fn conjugate(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// The exponent pair `(p, q)` of the couple
/// `l^{p,inf}_M(l^q_N), l^{p,inf}_N(l^q_M)`, with `1 <= q < p <= inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couple {
    p: f64,
    q: f64,
}

impl Couple {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(q.is_finite() && q >= 1.0) {
            return Err(invalid(format!("inner exponent q must be finite and >= 1, got {q}")));
        }
        if p.is_nan() || p <= q {
            return Err(invalid(format!("outer exponent p must exceed q = {q}, got {p}")));
        }
        Ok(Self { p, q })
    }

    /// The `(inf, 1)` couple `l^inf(l^1), l^inf(l^1)^T`.
    pub fn infinity_one() -> Self {
        Self {
            p: f64::INFINITY,
            q: 1.0,
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p_star(&self) -> f64 {
        conjugate(self.p)
    }

    /// `alpha = 1/q - 1/p`.
    pub fn alpha(&self) -> f64 {
        1.0 / self.q - 1.0 / self.p
    }

    /// Lower sandwich constant `(1 - q/p)^{1/q}`; equals 1 when `p = inf`.
    pub fn c_pq(&self) -> f64 {
        (1.0 - self.q / self.p).powf(1.0 / self.q)
    }

    pub fn is_infinity_one(&self) -> bool {
        self.p.is_infinite() && self.q == 1.0
    }

    /// The `q`-convexified couple `(p/q, 1)`.
    pub fn convexified(&self) -> Self {
        Self {
            p: self.p / self.q,
            q: 1.0,
        }
    }

    pub fn at(&self, t: f64) -> Result<CoupleSpec> {
        CoupleSpec::from_couple(*self, t)
    }
}

/// A couple together with the K-functional parameter `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupleSpec {
    couple: Couple,
    t: f64,
}

impl CoupleSpec {
    pub fn new(p: f64, q: f64, t: f64) -> Result<Self> {
        Self::from_couple(Couple::new(p, q)?, t)
    }

    pub fn from_couple(couple: Couple, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(invalid(format!("t must be positive and finite, got {t}")));
        }
        Ok(Self { couple, t })
    }

    pub fn infinity_one(t: f64) -> Result<Self> {
        Self::from_couple(Couple::infinity_one(), t)
    }

    pub fn couple(&self) -> Couple {
        self.couple
    }

    pub fn p(&self) -> f64 {
        self.couple.p
    }

    pub fn q(&self) -> f64 {
        self.couple.q
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn p_star(&self) -> f64 {
        self.couple.p_star()
    }

    pub fn alpha(&self) -> f64 {
        self.couple.alpha()
    }

    pub fn c_pq(&self) -> f64 {
        self.couple.c_pq()
    }

    /// `(p/q, 1, t^q)`: the couple and parameter that `|a|^q` is measured against.
    pub fn convexified(&self) -> Self {
        Self {
            couple: self.couple.convexified(),
            t: self.t.powf(self.couple.q),
        }
    }

    pub fn with_t(&self, t: f64) -> Result<Self> {
        Self::from_couple(self.couple, t)
    }
}

fn check_len(f: &[f64], space: &MeasureSpace) -> Result<()> {
    if f.len() != space.len() {
        Err(Error::DimensionMismatch {
            expected: space.len(),
            got: f.len(),
        })
    } else {
        Ok(())
    }
}

/// Weighted `l^q` norm `(sum |f_i|^q mass_i)^{1/q}`; `q = inf` gives `max |f_i|`.
pub fn lq_norm(f: &[f64], space: &MeasureSpace, q: f64) -> Result<f64> {
    check_len(f, space)?;
    if q.is_infinite() && q > 0.0 {
        return Ok(f.iter().fold(0.0, |acc, x| acc.max(x.abs())));
    }
    if !(q >= 1.0) {
        return Err(invalid(format!("l^q norm needs q >= 1, got {q}")));
    }
    let sum: f64 = f.iter().zip(space.masses()).map(|(x, m)| pow_q(x.abs(), q) * m).sum();
    Ok(root_q(sum, q))
}

/// `max_i sum_j |a(i,j)| nu_j`, the `l^inf_M(l^1_N)` norm.
pub fn mixed_inf_one(a: &WeightedMatrix) -> f64 {
    let nu = a.col_space().masses();
    (0..a.nrows())
        .map(|i| a.row(i).iter().zip(nu).map(|(x, w)| x.abs() * w).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `max_j sum_i |a(i,j)| mu_i`, the transposed norm.
pub fn mixed_inf_one_t(a: &WeightedMatrix) -> f64 {
    mixed_inf_one(&a.transpose())
}

/// Weak `l^{p,inf}` quasi-norm `sup_s s^{1/p} f*(s)` for `p` in `(0, inf]`.
///
/// For finite `p` the supremum over a decreasing step function is attained at
/// a right endpoint of a step, so it is a maximum over the steps.
pub fn weak_lp_norm(f: &[f64], space: &MeasureSpace, p: f64) -> Result<f64> {
    check_len(f, space)?;
    if !(p > 0.0) {
        return Err(invalid(format!("weak l^p needs p > 0, got {p}")));
    }
    let mut pairs: Vec<(f64, f64)> = f.iter().zip(space.masses()).map(|(&v, &m)| (v.abs(), m)).collect();
    Ok(weak_from_pairs(&mut pairs, p))
}

/// Weak norm of `(|value|, mass)` pairs; reorders `pairs`.
pub(crate) fn weak_from_pairs(pairs: &mut [(f64, f64)], p: f64) -> f64 {
    if p.is_infinite() {
        return pairs.iter().fold(0.0, |acc, &(v, _)| acc.max(v));
    }
    let inv_p = 1.0 / p;
    rearrange_pairs(pairs)
        .iter()
        .map(|s| s.value * s.right_end.powf(inv_p))
        .fold(0.0, f64::max)
}

/// Lorentz `l^{p,q}` quasi-norm for `p` in `(0, inf)`, `q` in `[1, inf)`:
/// `(sum_k v_k^q (p/q) (T_k^{q/p} - T_{k-1}^{q/p}))^{1/q}` over the steps of `f*`.
pub fn lorentz_norm(f: &[f64], space: &MeasureSpace, p: f64, q: f64) -> Result<f64> {
    check_len(f, space)?;
    check_lorentz(p, q)?;
    let mut pairs: Vec<(f64, f64)> = f.iter().zip(space.masses()).map(|(&v, &m)| (v.abs(), m)).collect();
    Ok(lorentz_from_pairs(&mut pairs, p, q))
}

fn check_lorentz(p: f64, q: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid(format!("Lorentz norm needs finite p > 0, got {p}")));
    }
    if !(q >= 1.0 && q.is_finite()) {
        return Err(invalid(format!("Lorentz norm needs finite q >= 1, got {q}")));
    }
    Ok(())
}

fn lorentz_from_pairs(pairs: &mut [(f64, f64)], p: f64, q: f64) -> f64 {
    let ratio = q / p;
    let mut previous = 0.0;
    let mut sum = 0.0;
    for step in rearrange_pairs(pairs) {
        let upper = step.right_end.powf(ratio);
        sum += pow_q(step.value, q) * (p / q) * (upper - previous);
        previous = upper;
    }
    root_q(sum, q)
}

/// Weighted `l^q` norms of the rows, each taken over the column space.
pub fn row_norms(a: &WeightedMatrix, q: f64) -> Vec<f64> {
    let nu = a.col_space().masses();
    (0..a.nrows())
        .map(|i| {
            let s: f64 = a.row(i).iter().zip(nu).map(|(x, w)| pow_q(x.abs(), q) * w).sum();
            root_q(s, q)
        })
        .collect()
}

fn check_mixed(p: f64, q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(invalid(format!("inner exponent must be finite and >= 1, got {q}")));
    }
    if !(p > 0.0) {
        return Err(invalid(format!("outer exponent must be positive, got {p}")));
    }
    Ok(())
}

/// `||a||_{l^{p,inf}_M(l^q_N)}`: row `l^q` norms, then the weak `l^p` quasi-norm
/// over the row space. `p = inf` gives the largest row norm.
pub fn mixed_weak_norm(a: &WeightedMatrix, p: f64, q: f64) -> Result<f64> {
    check_mixed(p, q)?;
    let mut pairs: Vec<(f64, f64)> = row_norms(a, q)
        .into_iter()
        .zip(a.row_space().masses().iter().copied())
        .collect();
    Ok(weak_from_pairs(&mut pairs, p))
}

/// The transposed mixed weak norm `||a^T||_{l^{p,inf}_N(l^q_M)}`.
pub fn mixed_weak_norm_t(a: &WeightedMatrix, p: f64, q: f64) -> Result<f64> {
    mixed_weak_norm(&a.transpose(), p, q)
}

/// `||a||_{l^{p,r}_M(l^q_N)}`: row `l^q` norms measured in Lorentz `l^{p,r}`.
pub fn mixed_lorentz_norm(a: &WeightedMatrix, p: f64, r: f64, q: f64) -> Result<f64> {
    check_lorentz(p, r)?;
    check_mixed(p, q)?;
    let mut pairs: Vec<(f64, f64)> = row_norms(a, q)
        .into_iter()
        .zip(a.row_space().masses().iter().copied())
        .collect();
    Ok(lorentz_from_pairs(&mut pairs, p, r))
}

pub fn mixed_lorentz_norm_t(a: &WeightedMatrix, p: f64, r: f64, q: f64) -> Result<f64> {
    mixed_lorentz_norm(&a.transpose(), p, r, q)
}

/// Cost `||b||_{A0} + t ||c||_{A1}` of a decomposition in the couple `spec`.
pub fn decomposition_cost(b: &WeightedMatrix, c: &WeightedMatrix, spec: &CoupleSpec) -> Result<f64> {
    Ok(mixed_weak_norm(b, spec.p(), spec.q())? + spec.t() * mixed_weak_norm_t(c, spec.p(), spec.q())?)
}
