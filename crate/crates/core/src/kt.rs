//! Brackets and oracles for `K_t(a)` in the couple
//! `(l^{p,inf}_M(l^q_N), l^{p,inf}_N(l^q_M))`.
//!
//! * [`kt_bracket`]: `C(p,q) |||a||| <= K_t(a) <= ` the split decomposition cost.
//! * [`kt_exact_lp`]: the exact value for `(inf, 1)`, by linear programming over
//!   fractional masks `b = x . a`, `c = (1 - x) . a`.
//! * [`kt_mask_bruteforce`]: the best cost over all 0/1 masks, an upper bound.

use crate::error::{invalid, Error, Result};
use crate::measure::WeightedMatrix;
use crate::norms::{decomposition_cost, weak_from_pairs, CoupleSpec};
use crate::rectnorm::Limits;
use crate::simplex::{solve, Constraint, LinearProgram, Sense};
use crate::splitting::split_with;

/// Where a bound came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSource {
    /// `C(p,q)` times the rectangle norm.
    RectNorm,
    /// Cost of the certified split.
    Split,
    /// Best 0/1 mask.
    MaskEnum,
    /// Linear-programming optimum.
    LpExact,
}

impl BoundSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundSource::RectNorm => "rect-norm",
            BoundSource::Split => "split",
            BoundSource::MaskEnum => "mask-enum",
            BoundSource::LpExact => "lp-exact",
        }
    }
}

/// An enclosure `lower <= K_t(a) <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct KtBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_source: BoundSource,
    pub upper_source: BoundSource,
    /// `|||a|||_{p,q,t}`.
    pub scale: f64,
    /// `(b, c)` with `b + c = a` costing `upper`.
    pub decomposition: Option<(WeightedMatrix, WeightedMatrix)>,
}

/// Rectangle lower bound and split upper bound.
pub fn kt_bracket(a: &WeightedMatrix, spec: &CoupleSpec) -> Result<KtBracket> {
    kt_bracket_with(a, spec, &Limits::default())
}

pub fn kt_bracket_with(a: &WeightedMatrix, spec: &CoupleSpec, limits: &Limits) -> Result<KtBracket> {
    let split = split_with(a, spec, limits)?;
    let scale = split.scale;
    Ok(KtBracket {
        lower: spec.c_pq() * scale,
        upper: split.upper(),
        lower_source: BoundSource::RectNorm,
        upper_source: BoundSource::Split,
        scale,
        decomposition: Some(split.decomposition(a)),
    })
}

/// [`kt_bracket_with`], tightened by whichever oracles fit the guards: the mask
/// optimum for the upper bound, and for `(inf, 1)` the exact LP value on both
/// sides.
pub fn kt_bracket_refined(a: &WeightedMatrix, spec: &CoupleSpec, limits: &Limits) -> Result<KtBracket> {
    let mut bracket = kt_bracket_with(a, spec, limits)?;
    match kt_mask_bruteforce_with(a, spec, limits) {
        Ok(opt) if opt.value < bracket.upper => {
            bracket.upper = opt.value;
            bracket.upper_source = BoundSource::MaskEnum;
            bracket.decomposition = Some(opt.decomposition(a));
        }
        Ok(_) | Err(Error::CapacityExceeded { .. }) => {}
        Err(e) => return Err(e),
    }
    if spec.couple().is_infinity_one() {
        match kt_exact_lp_with(a, spec.t(), limits) {
            Ok(exact) => {
                if exact.value <= bracket.upper {
                    bracket.upper = exact.value;
                    bracket.upper_source = BoundSource::LpExact;
                    bracket.decomposition = Some((exact.b, exact.c));
                }
                if exact.value >= bracket.lower {
                    bracket.lower = exact.value.min(bracket.upper);
                    bracket.lower_source = BoundSource::LpExact;
                }
            }
            Err(Error::CapacityExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(bracket)
}

/// Optimal decomposition found by the linear program.
#[derive(Debug, Clone, PartialEq)]
pub struct KtExact {
    /// `||b||_{l^inf(l^1)} + t ||c^T||_{l^inf(l^1)}`.
    pub value: f64,
    /// Row-major fractions `x(i,j)` in `[0,1]` kept in `b`.
    pub fractions: Vec<f64>,
    pub b: WeightedMatrix,
    pub c: WeightedMatrix,
}

/// `K_t(a)` for the `(inf, 1)` couple.
pub fn kt_exact_lp(a: &WeightedMatrix, t: f64) -> Result<KtExact> {
    kt_exact_lp_with(a, t, &Limits::default())
}

pub fn kt_exact_lp_with(a: &WeightedMatrix, t: f64, limits: &Limits) -> Result<KtExact> {
    let spec = CoupleSpec::infinity_one(t)?;
    let (m, n) = (a.nrows(), a.ncols());
    let side = m.max(n);
    if side > limits.lp_side {
        return Err(Error::CapacityExceeded {
            what: "linear program matrix side",
            required: side as u128,
            limit: limits.lp_side as u128,
        });
    }
    let mu = a.row_space().masses();
    let nu = a.col_space().masses();
    // cells with a zero entry do not influence either norm
    let cells: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| a.get(i, j) != 0.0)
        .collect();
    let mut fractions = vec![1.0; m * n];
    let mut lp_objective = None;
    if !cells.is_empty() {
        let k = cells.len();
        let (u, v) = (k, k + 1);
        let mut cost = vec![0.0; k + 2];
        cost[u] = 1.0;
        cost[v] = t;
        let mut constraints = Vec::with_capacity(m + n + k);
        for i in 0..m {
            let mut coeffs: Vec<(usize, f64)> = cells
                .iter()
                .enumerate()
                .filter(|(_, c)| c.0 == i)
                .map(|(idx, &(_, j))| (idx, a.get(i, j).abs() * nu[j]))
                .collect();
            if coeffs.is_empty() {
                continue;
            }
            coeffs.push((u, -1.0));
            constraints.push(Constraint {
                coeffs,
                sense: Sense::Le,
                rhs: 0.0,
            });
        }
        for j in 0..n {
            let col: Vec<(usize, f64)> = cells
                .iter()
                .enumerate()
                .filter(|(_, c)| c.1 == j)
                .map(|(idx, &(i, _))| (idx, a.get(i, j).abs() * mu[i]))
                .collect();
            if col.is_empty() {
                continue;
            }
            let total: f64 = col.iter().map(|c| c.1).sum();
            let mut coeffs: Vec<(usize, f64)> = col.into_iter().map(|(idx, w)| (idx, -w)).collect();
            coeffs.push((v, -1.0));
            constraints.push(Constraint {
                coeffs,
                sense: Sense::Le,
                rhs: -total,
            });
        }
        for idx in 0..k {
            constraints.push(Constraint {
                coeffs: vec![(idx, 1.0)],
                sense: Sense::Le,
                rhs: 1.0,
            });
        }
        let solution = solve(&LinearProgram {
            num_vars: k + 2,
            cost,
            constraints,
        })?;
        for (idx, &(i, j)) in cells.iter().enumerate() {
            fractions[i * n + j] = solution.x[idx].clamp(0.0, 1.0);
        }
        lp_objective = Some(solution.objective);
    }
    let b = WeightedMatrix::new(
        a.row_space().clone(),
        a.col_space().clone(),
        a.entries().iter().zip(&fractions).map(|(x, f)| x * f).collect(),
    )?;
    let c = WeightedMatrix::new(
        a.row_space().clone(),
        a.col_space().clone(),
        a.entries().iter().zip(&fractions).map(|(x, f)| x * (1.0 - f)).collect(),
    )?;
    let value = decomposition_cost(&b, &c, &spec)?;
    // the realized cost can only undercut the LP's u + t v
    debug_assert!(lp_objective.is_none_or(|o: f64| value <= o + 1e-7 * (1.0 + o.abs())));
    Ok(KtExact { value, fractions, b, c })
}

/// Best 0/1 mask decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskOptimum {
    pub value: f64,
    /// Row-major; `true` keeps the cell in `b`.
    pub mask: Vec<bool>,
}

impl MaskOptimum {
    pub fn decomposition(&self, a: &WeightedMatrix) -> (WeightedMatrix, WeightedMatrix) {
        let rest: Vec<bool> = self.mask.iter().map(|x| !x).collect();
        (a.masked(&self.mask), a.masked(&rest))
    }
}

/// `min_A ||1_A . a|| + t ||1_{A^c} . a||^T` over all masks `A`.
///
/// Only nonzero cells are enumerated (zero cells are put in `A`); among optimal
/// masks the one whose bit pattern over the nonzero cells, read in row-major
/// order as a binary number with the first cell as the lowest bit, is smallest
/// is returned.
pub fn kt_mask_bruteforce(a: &WeightedMatrix, spec: &CoupleSpec) -> Result<MaskOptimum> {
    kt_mask_bruteforce_with(a, spec, &Limits::default())
}

pub fn kt_mask_bruteforce_with(a: &WeightedMatrix, spec: &CoupleSpec, limits: &Limits) -> Result<MaskOptimum> {
    let (m, n) = (a.nrows(), a.ncols());
    let cells: Vec<usize> = (0..m * n).filter(|&c| a.entries()[c] != 0.0).collect();
    if cells.len() > limits.mask_cells.min(63) {
        return Err(Error::CapacityExceeded {
            what: "mask enumeration over nonzero cells",
            required: cells.len() as u128,
            limit: limits.mask_cells as u128,
        });
    }
    let (p, q, t) = (spec.p(), spec.q(), spec.t());
    if !(q >= 1.0 && q.is_finite()) {
        return Err(invalid(format!("inner exponent must be finite, got {q}")));
    }
    let mu = a.row_space().masses();
    let nu = a.col_space().masses();
    // contributions |a|^q nu_j to row sums and |a|^q mu_i to column sums
    let row_part: Vec<f64> = cells
        .iter()
        .map(|&c| a.entries()[c].abs().powf(q) * nu[c % n])
        .collect();
    let col_part: Vec<f64> = cells
        .iter()
        .map(|&c| a.entries()[c].abs().powf(q) * mu[c / n])
        .collect();

    let mut row_sum = vec![0.0; m];
    let mut col_sum = vec![0.0; n];
    let mut pairs_m = Vec::with_capacity(m);
    let mut pairs_n = Vec::with_capacity(n);
    let mut best: Option<(f64, u64)> = None;
    for bits in 0..(1u64 << cells.len()) {
        row_sum.iter_mut().for_each(|x| *x = 0.0);
        col_sum.iter_mut().for_each(|x| *x = 0.0);
        for (k, &c) in cells.iter().enumerate() {
            if bits >> k & 1 == 1 {
                row_sum[c / n] += row_part[k];
            } else {
                col_sum[c % n] += col_part[k];
            }
        }
        pairs_m.clear();
        pairs_m.extend(row_sum.iter().zip(mu).map(|(&s, &w)| (s.powf(1.0 / q), w)));
        pairs_n.clear();
        pairs_n.extend(col_sum.iter().zip(nu).map(|(&s, &w)| (s.powf(1.0 / q), w)));
        let value = weak_from_pairs(&mut pairs_m, p) + t * weak_from_pairs(&mut pairs_n, p);
        if best.is_none_or(|(v, _)| value < v) {
            best = Some((value, bits));
        }
    }
    let (value, bits) = best.expect("at least one mask");
    let mut mask = vec![true; m * n];
    for (k, &c) in cells.iter().enumerate() {
        mask[c] = bits >> k & 1 == 1;
    }
    Ok(MaskOptimum { value, mask })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasureSpace;

    fn close(x: f64, y: f64) -> bool {
        (x - y).abs() <= 1e-9 * (1.0 + y.abs())
    }

    #[test]
    fn zero_matrix() {
        let a = WeightedMatrix::counting(&vec![vec![0.0; 2]; 2]).unwrap();
        let spec = CoupleSpec::new(3.0, 1.0, 2.0).unwrap();
        let b = kt_bracket(&a, &spec).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        assert_eq!(kt_mask_bruteforce(&a, &spec).unwrap().value, 0.0);
        assert_eq!(kt_exact_lp(&a, 2.0).unwrap().value, 0.0);
    }

    #[test]
    fn diagonal_example() {
        let a = WeightedMatrix::counting(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let spec = CoupleSpec::infinity_one(1.0).unwrap();
        let b = kt_bracket(&a, &spec).unwrap();
        assert_eq!(b.lower, 2.0);
        assert!(b.upper <= 4.0);
        assert!(close(kt_exact_lp(&a, 1.0).unwrap().value, 2.0));
        assert!(close(kt_mask_bruteforce(&a, &spec).unwrap().value, 2.0));
        let r = kt_bracket_refined(&a, &spec, &Limits::default()).unwrap();
        assert!(close(r.lower, 2.0) && close(r.upper, 2.0));
    }

    #[test]
    fn ones_two_by_two() {
        let a = WeightedMatrix::counting(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(close(kt_exact_lp(&a, 1.0).unwrap().value, 2.0));
    }

    #[test]
    fn one_by_one_is_c_min_one_t() {
        for (c, t) in [(3.0f64, 0.5f64), (-2.0, 4.0), (0.7, 1.0), (5.0, 1e-3), (5.0, 1e3)] {
            let a = WeightedMatrix::counting(&[vec![c]]).unwrap();
            let expected = c.abs() * t.min(1.0);
            let spec = CoupleSpec::infinity_one(t).unwrap();
            let b = kt_bracket(&a, &spec).unwrap();
            assert!(close(b.lower, expected) && close(b.upper, expected), "{c} {t}: {b:?}");
            assert!(close(kt_exact_lp(&a, t).unwrap().value, expected));
        }
    }

    #[test]
    fn lp_decomposition_sums_to_a() {
        let a = WeightedMatrix::from_rows(
            MeasureSpace::new(vec![0.5, 2.0]).unwrap(),
            MeasureSpace::new(vec![1.0, 3.0, 0.2]).unwrap(),
            &[vec![0.3, -0.8, 0.0], vec![-1.0, 0.4, 0.9]],
        )
        .unwrap();
        let exact = kt_exact_lp(&a, 0.6).unwrap();
        let sum = exact.b.add(&exact.c).unwrap();
        for (x, y) in sum.entries().iter().zip(a.entries()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(exact.fractions.iter().all(|f| (0.0..=1.0).contains(f)));
    }

    #[test]
    fn mask_guard() {
        let a = WeightedMatrix::counting(&vec![vec![1.0; 5]; 5]).unwrap();
        let err = kt_mask_bruteforce(&a, &CoupleSpec::infinity_one(1.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded { .. }));
    }
}
