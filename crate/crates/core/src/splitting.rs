//! Splitting `M x N = A u B` so that `1_A . a` is small in the row-side norm and
//! `1_B . a` is small in the transposed norm.
//!
//! The procedure peels off one row per stage. With `R` the active rows and `C`
//! the active columns:
//!
//! 1. `sigma_j = sum_{i in R} |a(i,j)| mu_i`; sort `C` by decreasing `sigma`.
//! 2. `k` is the longest prefix of `C` with `nu(prefix) <= mu(R) t^{p*}`.
//! 3. `tau_i = sum_{j in prefix} |a(i,j)| nu_j`; the row with the least `tau`
//!    gives its prefix cells to `A` and its other active cells to `B`.
//! 4. The row leaves `R` and `C` shrinks to the prefix.
//!
//! Cells never given to `A` are in `B`. Ties: columns with equal `sigma` keep
//! ascending index order, and among rows with equal `tau` the largest index is
//! taken. The construction is homogeneous, so it runs on `a` directly rather
//! than on `a / |||a|||`.
//!
//! For `q > 1` the partition is computed for `|a|^q` with exponent `p/q` and
//! parameter `t^q`. Since `|||a|||_{p,q,t}^q = ||| |a|^q |||_{p/q,1,t^q}` and the
//! mixed weak norms convexify the same way, the bounds carry over. Every result
//! is certified by recomputing both norms on the produced partition.

use crate::error::{invalid, Error, Result};
use crate::measure::WeightedMatrix;
use crate::norms::{conjugate, mixed_weak_norm, mixed_weak_norm_t, CoupleSpec};
use crate::rectnorm::{triple_norm_with, Limits};

const THRESHOLD_SLACK: f64 = 1e-12;
/// Relative slack allowed when certifying the output bounds.
pub const CERTIFY_RTOL: f64 = 1e-9;

/// One stage of the peeling procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitStage {
    pub active_rows: Vec<usize>,
    /// Active columns sorted by decreasing `sigma`.
    pub column_order: Vec<usize>,
    /// `sigma_j`, aligned with `column_order`.
    pub sigma: Vec<f64>,
    pub k: usize,
    /// `(row, tau_row)` for each active row.
    pub row_sums: Vec<(usize, f64)>,
    pub chosen_row: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SplitTrace {
    pub stages: Vec<SplitStage>,
}

/// A certified partition of the cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    /// Row-major; `true` marks a cell of `A`.
    pub mask: Vec<bool>,
    pub nrows: usize,
    pub ncols: usize,
    /// `||1_A . a||` in `l^{p,inf}_M(l^q_N)`.
    pub bound_a: f64,
    /// `||1_B . a||` in `l^{p,inf}_N(l^q_M)`.
    pub bound_b: f64,
    /// `|||a|||_{p,q,t}`.
    pub scale: f64,
    pub spec: CoupleSpec,
    pub trace: SplitTrace,
}

impl SplitResult {
    pub fn in_a(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.ncols + j]
    }

    pub fn a_cells(&self) -> Vec<(usize, usize)> {
        self.cells(true)
    }

    pub fn b_cells(&self) -> Vec<(usize, usize)> {
        self.cells(false)
    }

    fn cells(&self, side: bool) -> Vec<(usize, usize)> {
        (0..self.nrows)
            .flat_map(|i| (0..self.ncols).map(move |j| (i, j)))
            .filter(|&(i, j)| self.in_a(i, j) == side)
            .collect()
    }

    /// `(1_A . a, 1_B . a)`.
    pub fn decomposition(&self, a: &WeightedMatrix) -> (WeightedMatrix, WeightedMatrix) {
        let b_mask: Vec<bool> = self.mask.iter().map(|x| !x).collect();
        (a.masked(&self.mask), a.masked(&b_mask))
    }

    /// The decomposition cost `bound_a + t bound_b`, an upper bound for `K_t(a)`.
    pub fn upper(&self) -> f64 {
        self.bound_a + self.spec.t() * self.bound_b
    }
}

/// Runs the peeling procedure on `|a|` with stage threshold
/// `nu(prefix) <= mu(R) * budget`, returning the `A`-mask and the trace.
pub fn partition(a: &WeightedMatrix, budget: f64) -> (Vec<bool>, SplitTrace) {
    let (m, n) = (a.nrows(), a.ncols());
    let mu = a.row_space().masses();
    let nu = a.col_space().masses();
    let abs: Vec<f64> = a.entries().iter().map(|x| x.abs()).collect();
    let mut mask = vec![false; m * n];
    let mut rows: Vec<usize> = (0..m).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut trace = SplitTrace::default();

    while !rows.is_empty() {
        let sigma_of = |j: usize| rows.iter().map(|&i| abs[i * n + j] * mu[i]).sum::<f64>();
        let mut scored: Vec<(usize, f64)> = cols.iter().map(|&j| (j, sigma_of(j))).collect();
        scored.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        let order: Vec<usize> = scored.iter().map(|s| s.0).collect();

        let row_mass: f64 = rows.iter().map(|&i| mu[i]).sum();
        let limit = row_mass * budget * (1.0 + THRESHOLD_SLACK);
        let mut k = 0;
        let mut prefix_mass = 0.0;
        while k < order.len() && prefix_mass + nu[order[k]] <= limit {
            prefix_mass += nu[order[k]];
            k += 1;
        }

        let row_sums: Vec<(usize, f64)> = rows
            .iter()
            .map(|&i| (i, order[..k].iter().map(|&j| abs[i * n + j] * nu[j]).sum()))
            .collect();
        let chosen = row_sums
            .iter()
            .copied()
            .reduce(|best, cand| if cand.1 <= best.1 { cand } else { best })
            .map(|(i, _)| i)
            .expect("active rows are nonempty");

        for &j in &order[..k] {
            mask[chosen * n + j] = true;
        }
        trace.stages.push(SplitStage {
            active_rows: rows.clone(),
            column_order: order.clone(),
            sigma: scored.iter().map(|s| s.1).collect(),
            k,
            row_sums,
            chosen_row: chosen,
        });
        rows.retain(|&i| i != chosen);
        let mut kept = order[..k].to_vec();
        kept.sort_unstable();
        cols = kept;
    }
    (mask, trace)
}

/// Splits for the `(inf, 1)` couple.
pub fn split_infty_one(a: &WeightedMatrix, t: f64) -> Result<SplitResult> {
    split_p_q(a, &CoupleSpec::infinity_one(t)?)
}

/// Splits for `l^{p,inf}(l^1)`.
pub fn split_p_one(a: &WeightedMatrix, t: f64, p: f64) -> Result<SplitResult> {
    if !(p > 1.0) {
        return Err(invalid(format!("splitting needs p > 1, got {p}")));
    }
    split_p_q(a, &CoupleSpec::new(p, 1.0, t)?)
}

/// Splits for `l^{p,inf}(l^q)` through the `q`-convexified matrix.
pub fn split_p_q(a: &WeightedMatrix, spec: &CoupleSpec) -> Result<SplitResult> {
    split_with(a, spec, &Limits::default())
}

pub fn split_with(a: &WeightedMatrix, spec: &CoupleSpec, limits: &Limits) -> Result<SplitResult> {
    let scale = triple_norm_with(a, spec, limits)?.value;
    let (m, n) = (a.nrows(), a.ncols());
    let (mask, trace) = if scale == 0.0 {
        (vec![true; m * n], SplitTrace::default())
    } else {
        let convex = spec.convexified();
        let budget = convex.t().powf(conjugate(convex.p()));
        let powered = if spec.q() == 1.0 { a.abs() } else { a.abs_pow(spec.q()) };
        partition(&powered, budget)
    };
    let result = certify(a, spec, mask, trace, scale)?;
    Ok(result)
}

fn certify(
    a: &WeightedMatrix,
    spec: &CoupleSpec,
    mask: Vec<bool>,
    trace: SplitTrace,
    scale: f64,
) -> Result<SplitResult> {
    let b_mask: Vec<bool> = mask.iter().map(|x| !x).collect();
    let bound_a = mixed_weak_norm(&a.masked(&mask), spec.p(), spec.q())?;
    let bound_b = mixed_weak_norm_t(&a.masked(&b_mask), spec.p(), spec.q())?;
    let limit_a = scale * (1.0 + CERTIFY_RTOL);
    let limit_b = scale / spec.t() * (1.0 + CERTIFY_RTOL);
    if bound_a > limit_a {
        return Err(Error::CertificationFailed {
            side: "A",
            bound: bound_a,
            limit: limit_a,
        });
    }
    if bound_b > limit_b {
        return Err(Error::CertificationFailed {
            side: "B",
            bound: bound_b,
            limit: limit_b,
        });
    }
    Ok(SplitResult {
        mask,
        nrows: a.nrows(),
        ncols: a.ncols(),
        bound_a,
        bound_b,
        scale,
        spec: *spec,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasureSpace;

    #[test]
    fn diagonal_example_matches_hand_execution() {
        let a = WeightedMatrix::counting(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let s = split_infty_one(&a, 1.0).unwrap();
        assert_eq!(s.scale, 2.0);
        assert_eq!(s.trace.stages.len(), 2);
        let first = &s.trace.stages[0];
        assert_eq!(first.sigma, vec![2.0, 2.0]);
        assert_eq!(first.k, 2);
        assert_eq!(first.chosen_row, 1);
        let second = &s.trace.stages[1];
        assert_eq!(second.column_order, vec![0, 1]);
        assert_eq!(second.sigma, vec![2.0, 0.0]);
        assert_eq!(second.k, 1);
        assert_eq!(s.a_cells(), vec![(0, 0), (1, 0), (1, 1)]);
        assert_eq!(s.b_cells(), vec![(0, 1)]);
        assert_eq!((s.bound_a, s.bound_b), (2.0, 0.0));
    }

    #[test]
    fn zero_matrix_goes_to_a() {
        let a = WeightedMatrix::counting(&vec![vec![0.0; 3]; 2]).unwrap();
        for s in [
            split_infty_one(&a, 0.3).unwrap(),
            split_p_one(&a, 2.0, 3.0).unwrap(),
            split_p_q(&a, &CoupleSpec::new(4.0, 2.0, 1.5).unwrap()).unwrap(),
        ] {
            assert!(s.mask.iter().all(|&x| x));
            assert_eq!((s.bound_a, s.bound_b), (0.0, 0.0));
        }
    }

    #[test]
    fn single_row_unit_entries() {
        let a = WeightedMatrix::counting(&[vec![1.0; 5]]).unwrap();
        let s = split_infty_one(&a, 1.0).unwrap();
        assert_eq!(s.trace.stages[0].k, 1);
        assert_eq!(s.a_cells(), vec![(0, 0)]);
        assert_eq!((s.bound_a, s.bound_b), (1.0, 1.0));
    }

    #[test]
    fn single_row_p_two() {
        let a = WeightedMatrix::counting(&[vec![1.0; 3]]).unwrap();
        let s = split_p_one(&a, 1.0, 2.0).unwrap();
        assert_eq!(s.trace.stages[0].k, 1);
        assert_eq!(s.a_cells(), vec![(0, 0)]);
        assert_eq!(s.bound_a, 1.0);
        assert!(s.bound_b <= s.scale / 1.0 * (1.0 + 1e-12));
    }

    #[test]
    fn k_zero_sends_the_row_to_b() {
        // one heavy column that no row can afford
        let a = WeightedMatrix::from_rows(
            MeasureSpace::new(vec![1.0]).unwrap(),
            MeasureSpace::new(vec![5.0]).unwrap(),
            &[vec![1.0]],
        )
        .unwrap();
        let s = split_infty_one(&a, 1.0).unwrap();
        assert_eq!(s.trace.stages[0].k, 0);
        assert_eq!(s.b_cells(), vec![(0, 0)]);
    }

    #[test]
    fn p_infinity_reduces_to_infty_one() {
        let a = WeightedMatrix::counting(&[vec![0.3, -1.0, 0.2], vec![0.9, 0.1, -0.5]]).unwrap();
        let x = split_infty_one(&a, 0.7).unwrap();
        let y = split_p_one(&a, 0.7, f64::INFINITY).unwrap();
        assert_eq!(x.mask, y.mask);
    }

    #[test]
    fn rejects_bad_parameters() {
        let a = WeightedMatrix::counting(&[vec![1.0]]).unwrap();
        assert!(split_p_one(&a, 1.0, 1.0).is_err());
        assert!(split_infty_one(&a, 0.0).is_err());
    }
}
