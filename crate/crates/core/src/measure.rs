//! Finite weighted measure spaces, matrices over their products, rectangles and
//! decreasing rearrangements.
//!
//! Everything here is immutable after construction. Index sets are kept as
//! sorted, deduplicated lists so iteration and reporting are deterministic.

use crate::error::{Error, Result};

/// A finite measure space: atoms `0..len` with strictly positive masses.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpace {
    masses: Vec<f64>,
    total: f64,
}

impl MeasureSpace {
    /// Builds a space from its atom masses. Zero-mass atoms are rejected, not dropped.
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (index, &mass) in masses.iter().enumerate() {
            if !(mass.is_finite() && mass > 0.0) {
                return Err(Error::InvalidMass { index, mass });
            }
        }
        let total = masses.iter().sum();
        Ok(Self { masses, total })
    }

    /// `len` atoms of unit mass.
    pub fn counting(len: usize) -> Result<Self> {
        Self::new(vec![1.0; len])
    }

    /// `len` atoms of mass `mass` each.
    pub fn uniform(len: usize, mass: f64) -> Result<Self> {
        Self::new(vec![mass; len])
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.masses[i]
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Measure of a set of atoms given by index. Indices are assumed valid.
    pub fn measure_of(&self, atoms: &[usize]) -> f64 {
        atoms.iter().map(|&i| self.masses[i]).sum()
    }

    /// True when every atom carries exactly the same mass.
    pub fn is_uniform(&self) -> bool {
        self.masses.iter().all(|&m| m == self.masses[0])
    }

    /// The subspace made of the listed atoms, in the listed order.
    pub fn restrict(&self, atoms: &[usize]) -> Result<Self> {
        Self::new(atoms.iter().map(|&i| self.masses[i]).collect())
    }
}

/// A real function `a(i, j)` on `M x N` together with both measure spaces.
///
/// Entries are stored row-major. Rows are indexed by the atoms of
/// `row_space` (`M`, `mu`) and columns by those of `col_space` (`N`, `nu`).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMatrix {
    row_space: MeasureSpace,
    col_space: MeasureSpace,
    entries: Vec<f64>,
}

impl WeightedMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(row_space: MeasureSpace, col_space: MeasureSpace, entries: Vec<f64>) -> Result<Self> {
        let expected = row_space.len() * col_space.len();
        if entries.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: entries.len(),
            });
        }
        if let Some(index) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            row_space,
            col_space,
            entries,
        })
    }

    /// Builds a matrix from a list of rows.
    pub fn from_rows(row_space: MeasureSpace, col_space: MeasureSpace, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != row_space.len() {
            return Err(Error::DimensionMismatch {
                expected: row_space.len(),
                got: rows.len(),
            });
        }
        let n = col_space.len();
        let mut entries = Vec::with_capacity(rows.len() * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(row_space, col_space, entries)
    }

    /// Unit masses on both sides.
    pub fn counting(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        Self::from_rows(MeasureSpace::counting(m)?, MeasureSpace::counting(n)?, rows)
    }

    pub fn zeros(row_space: MeasureSpace, col_space: MeasureSpace) -> Self {
        let len = row_space.len() * col_space.len();
        Self {
            row_space,
            col_space,
            entries: vec![0.0; len],
        }
    }

    pub fn nrows(&self) -> usize {
        self.row_space.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_space.len()
    }

    pub fn row_space(&self) -> &MeasureSpace {
        &self.row_space
    }

    pub fn col_space(&self) -> &MeasureSpace {
        &self.col_space
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.ncols() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.ncols();
        &self.entries[i * n..(i + 1) * n]
    }

    /// Rows as owned vectors, convenient for printing and serialization.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.nrows()).map(|i| self.row(i).to_vec()).collect()
    }

    /// `a^T`: swaps the measure spaces and transposes the entries.
    pub fn transpose(&self) -> Self {
        let (m, n) = (self.nrows(), self.ncols());
        let mut entries = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                entries[j * m + i] = self.get(i, j);
            }
        }
        Self {
            row_space: self.col_space.clone(),
            col_space: self.row_space.clone(),
            entries,
        }
    }

    /// Applies `f` entrywise, keeping both measure spaces.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            row_space: self.row_space.clone(),
            col_space: self.col_space.clone(),
            entries: self.entries.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    /// `|a|^q` entrywise.
    pub fn abs_pow(&self, q: f64) -> Self {
        if q == 1.0 {
            self.abs()
        } else {
            self.map(|x| x.abs().powf(q))
        }
    }

    pub fn scale(&self, lambda: f64) -> Self {
        self.map(|x| lambda * x)
    }

    /// `1_A . a` where `A` is given as a row-major cell mask.
    pub fn masked(&self, mask: &[bool]) -> Self {
        debug_assert_eq!(mask.len(), self.entries.len());
        Self {
            row_space: self.row_space.clone(),
            col_space: self.col_space.clone(),
            entries: self
                .entries
                .iter()
                .zip(mask)
                .map(|(&x, &keep)| if keep { x } else { 0.0 })
                .collect(),
        }
    }

    /// Pointwise product `a . b`; both matrices must share shape.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        if self.entries.len() != other.entries.len() {
            return Err(Error::DimensionMismatch {
                expected: self.entries.len(),
                got: other.entries.len(),
            });
        }
        Ok(Self {
            row_space: self.row_space.clone(),
            col_space: self.col_space.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(x, y)| x * y).collect(),
        })
    }

    /// Entrywise sum; both matrices must share shape.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.entries.len() != other.entries.len() {
            return Err(Error::DimensionMismatch {
                expected: self.entries.len(),
                got: other.entries.len(),
            });
        }
        Ok(Self {
            row_space: self.row_space.clone(),
            col_space: self.col_space.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0.0)
    }

    /// The submatrix on the listed rows and columns, masses carried along.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        for &i in rows {
            check_index(i, self.nrows())?;
        }
        for &j in cols {
            check_index(j, self.ncols())?;
        }
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                entries.push(self.get(i, j));
            }
        }
        Self::new(self.row_space.restrict(rows)?, self.col_space.restrict(cols)?, entries)
    }

    /// Permutes rows and columns: the new row `k` is the old row `row_perm[k]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Self> {
        self.submatrix(row_perm, col_perm)
    }
}

fn check_index(index: usize, len: usize) -> Result<()> {
    if index >= len {
        Err(Error::IndexOutOfRange { index, len })
    } else {
        Ok(())
    }
}

/// A product set `E x F`, stored as sorted index lists.
///
/// The empty rectangle is representable (it is the witness of an infeasible
/// constrained supremum) but never takes part in a supremum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rectangle {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Rectangle {
    pub fn new(mut rows: Vec<usize>, mut cols: Vec<usize>) -> Self {
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        Self { rows, cols }
    }

    pub fn empty() -> Self {
        Self {
            rows: Vec::new(),
            cols: Vec::new(),
        }
    }

    /// `M x N` for an `m x n` matrix.
    pub fn full(m: usize, n: usize) -> Self {
        Self {
            rows: (0..m).collect(),
            cols: (0..n).collect(),
        }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() || self.cols.is_empty()
    }

    /// Checks that every index is valid for `a`.
    pub fn validate(&self, a: &WeightedMatrix) -> Result<()> {
        for &i in &self.rows {
            check_index(i, a.nrows())?;
        }
        for &j in &self.cols {
            check_index(j, a.ncols())?;
        }
        Ok(())
    }

    /// `mu(E)` for the row set of this rectangle.
    pub fn row_measure(&self, a: &WeightedMatrix) -> f64 {
        a.row_space().measure_of(&self.rows)
    }

    /// `nu(F)` for the column set of this rectangle.
    pub fn col_measure(&self, a: &WeightedMatrix) -> f64 {
        a.col_space().measure_of(&self.cols)
    }
}

/// One level of a decreasing rearrangement: `f*` equals `value` on
/// `[previous right_end, right_end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub value: f64,
    pub right_end: f64,
}

/// The nonincreasing equimeasurable rearrangement `f*` of `|f|`, a right
/// continuous step function on `(0, total]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearrangement {
    steps: Vec<Step>,
}

impl Rearrangement {
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Total mass carried by the steps (the measure of the whole space).
    pub fn total(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.right_end)
    }

    /// `f*(s)`; zero beyond the total measure.
    pub fn value_at(&self, s: f64) -> f64 {
        self.steps
            .iter()
            .find(|step| s < step.right_end)
            .map_or(0.0, |step| step.value)
    }

    /// Lebesgue measure of `{s : f*(s) > level}`.
    pub fn distribution(&self, level: f64) -> f64 {
        self.steps
            .iter()
            .take_while(|step| step.value > level)
            .last()
            .map_or(0.0, |step| step.right_end)
    }
}

/// Decreasing rearrangement of `|f|` over `space`.
///
/// Values equal after taking absolute values merge into a single step.
pub fn rearrange(f: &[f64], space: &MeasureSpace) -> Result<Rearrangement> {
    if f.len() != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            got: f.len(),
        });
    }
    let mut pairs: Vec<(f64, f64)> = f.iter().zip(space.masses()).map(|(&v, &m)| (v.abs(), m)).collect();
    Ok(Rearrangement {
        steps: rearrange_pairs(&mut pairs),
    })
}

/// Sorts `(|value|, mass)` pairs and merges equal values into steps.
pub(crate) fn rearrange_pairs(pairs: &mut [(f64, f64)]) -> Vec<Step> {
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut steps: Vec<Step> = Vec::new();
    let mut cumulative = 0.0;
    for &(value, mass) in pairs.iter() {
        cumulative += mass;
        match steps.last_mut() {
            Some(last) if last.value == value => last.right_end = cumulative,
            _ => steps.push(Step {
                value,
                right_end: cumulative,
            }),
        }
    }
    steps
}

/// `(sum over E x F of |a(i,j)|^q mu_i nu_j)^(1/q)`, the `l^q` mass of
/// `1_{E x F} . a`.
pub fn rect_mass_sum(a: &WeightedMatrix, r: &Rectangle, q: f64) -> Result<f64> {
    if !(q.is_finite() && q >= 1.0) {
        return Err(crate::error::invalid(format!(
            "rectangle mass needs a finite q >= 1, got {q}"
        )));
    }
    r.validate(a)?;
    let mu = a.row_space().masses();
    let nu = a.col_space().masses();
    let mut sum = 0.0;
    for &i in r.rows() {
        let row = a.row(i);
        let mut row_sum = 0.0;
        for &j in r.cols() {
            row_sum += pow_q(row[j].abs(), q) * nu[j];
        }
        sum += row_sum * mu[i];
    }
    Ok(root_q(sum, q))
}

#[inline]
pub(crate) fn pow_q(x: f64, q: f64) -> f64 {
    if q == 1.0 {
        x
    } else if q == 2.0 {
        x * x
    } else {
        x.powf(q)
    }
}

#[inline]
pub(crate) fn root_q(x: f64, q: f64) -> f64 {
    if q == 1.0 {
        x
    } else if q == 2.0 {
        x.sqrt()
    } else {
        x.powf(1.0 / q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(m: &[f64]) -> MeasureSpace {
        MeasureSpace::new(m.to_vec()).unwrap()
    }

    #[test]
    fn rejects_zero_and_negative_masses() {
        assert_eq!(
            MeasureSpace::new(vec![1.0, 0.0]),
            Err(Error::InvalidMass { index: 1, mass: 0.0 })
        );
        assert!(MeasureSpace::new(vec![-1.0]).is_err());
        assert!(MeasureSpace::new(vec![f64::NAN]).is_err());
        assert_eq!(MeasureSpace::new(vec![]), Err(Error::EmptySpace));
    }

    #[test]
    fn rearrange_two_distinct_values() {
        let r = rearrange(&[3.0, 1.0], &space(&[1.0, 1.0])).unwrap();
        assert_eq!(
            r.steps(),
            &[
                Step {
                    value: 3.0,
                    right_end: 1.0
                },
                Step {
                    value: 1.0,
                    right_end: 2.0
                }
            ]
        );
    }

    #[test]
    fn rearrange_zero_function_is_one_step() {
        let r = rearrange(&[0.0, 0.0], &space(&[2.0, 5.0])).unwrap();
        assert_eq!(
            r.steps(),
            &[Step {
                value: 0.0,
                right_end: 7.0
            }]
        );
    }

    #[test]
    fn rearrange_merges_equal_values_with_mass() {
        let r = rearrange(&[1.0, 2.0, -1.0], &space(&[1.0, 1.0, 2.0])).unwrap();
        assert_eq!(
            r.steps(),
            &[
                Step {
                    value: 2.0,
                    right_end: 1.0
                },
                Step {
                    value: 1.0,
                    right_end: 4.0
                }
            ]
        );
        // level-set counts: {|f| > 1.5} has mass 1, {|f| > 0.5} has mass 4
        assert_eq!(r.distribution(1.5), 1.0);
        assert_eq!(r.distribution(0.5), 4.0);
        assert_eq!(r.distribution(2.0), 0.0);
    }

    #[test]
    fn rearrange_dimension_mismatch() {
        assert!(matches!(
            rearrange(&[1.0], &space(&[1.0, 1.0])),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn rect_mass_sum_examples() {
        let ones = WeightedMatrix::counting(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let full = Rectangle::full(2, 2);
        assert_eq!(rect_mass_sum(&ones, &full, 1.0).unwrap(), 4.0);
        assert_eq!(rect_mass_sum(&ones, &full, 2.0).unwrap(), 2.0);

        let diag = WeightedMatrix::counting(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let corner = Rectangle::new(vec![0], vec![0]);
        assert_eq!(rect_mass_sum(&diag, &corner, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn rect_mass_sum_rejects_bad_index() {
        let ones = WeightedMatrix::counting(&[vec![1.0]]).unwrap();
        let r = Rectangle::new(vec![0], vec![3]);
        assert_eq!(
            rect_mass_sum(&ones, &r, 1.0),
            Err(Error::IndexOutOfRange { index: 3, len: 1 })
        );
    }

    #[test]
    fn transpose_swaps_spaces() {
        let a = WeightedMatrix::from_rows(space(&[1.0, 2.0]), space(&[3.0]), &[vec![5.0], vec![7.0]]).unwrap();
        let t = a.transpose();
        assert_eq!(t.row_space().masses(), &[3.0]);
        assert_eq!(t.col_space().masses(), &[1.0, 2.0]);
        assert_eq!(t.row(0), &[5.0, 7.0]);
        assert_eq!(t.transpose(), a);
    }
}
