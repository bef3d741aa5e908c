//! Rectangle-supremum norms.
//!
//! All of them have the shape `sup_{E,F} score(mu(E), nu(F), S(E,F))` where
//! `S(E,F) = sum_{E x F} |a|^q mu_i nu_j`. The supremum is computed exactly by
//! enumeration, with three reductions that do not change the value:
//!
//! * rows and columns that are identically zero are skipped when the score
//!   cannot benefit from them (the constrained norm keeps zero rows, since they
//!   can make a rectangle feasible);
//! * atoms that are identical (same mass, same entries) are grouped, and only
//!   the number taken from each group is enumerated, lowest indices first;
//! * when the surviving columns all carry the same mass, the best `F` of a given
//!   size is a prefix of the columns sorted by restricted weight, so only
//!   prefixes are scored.
//!
//! Witness ties are broken towards the lexicographically smallest `(rows, cols)`
//! after rounding scores to 12 significant digits.

use crate::error::{invalid, Error, Result};
use crate::measure::{pow_q, rect_mass_sum, root_q, Rectangle, WeightedMatrix};
use crate::norms::CoupleSpec;

/// Default cap on rectangle evaluations in one supremum.
pub const DEFAULT_RECT_LIMIT: u128 = 1 << 24;
/// Default cap on the number of nonzero cells in a mask enumeration.
pub const DEFAULT_MASK_CELLS: usize = 20;
/// Default cap on each side of an exact linear program.
pub const DEFAULT_LP_SIDE: usize = 32;

/// Size guards for the exponential enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub rect_evaluations: u128,
    pub mask_cells: usize,
    pub lp_side: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            rect_evaluations: DEFAULT_RECT_LIMIT,
            mask_cells: DEFAULT_MASK_CELLS,
            lp_side: DEFAULT_LP_SIDE,
        }
    }
}

impl Limits {
    /// No guard at all; the caller accepts arbitrarily long runs.
    pub fn unlimited() -> Self {
        Self {
            rect_evaluations: u128::MAX,
            mask_cells: 63,
            lp_side: usize::MAX,
        }
    }
}

/// Which branch of the score was active at the witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `mu(E)^alpha >= t^{-1} nu(F)^alpha`: the row measure dominates.
    RowMeasure,
    /// `t^{-1} nu(F)^alpha > mu(E)^alpha`: the column measure dominates.
    ColumnMeasure,
    /// A feasible rectangle of the constrained norm.
    Constrained,
    /// The product score `nu(F)^{-theta} mu(E)^{theta-1}`.
    Product,
    /// No rectangle is feasible; the value is 0 by convention.
    Infeasible,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::RowMeasure => "row-measure",
            Regime::ColumnMeasure => "column-measure",
            Regime::Constrained => "constrained",
            Regime::Product => "product",
            Regime::Infeasible => "infeasible",
        }
    }
}

/// Value of a rectangle supremum with the rectangle attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct RectNormResult {
    pub value: f64,
    pub witness: Rectangle,
    pub regime: Regime,
}

const FEASIBILITY_SLACK: f64 = 1e-12;

/// The score maximized over rectangles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// `(mu(E)^alpha v t^{-1} nu(F)^alpha)^{-1} S^{1/q}`.
    Balanced { q: f64, alpha: f64, inv_t: f64 },
    /// `mu(E)^{-alpha} S^{1/q}` over rectangles with `t^{-1} nu(F)^alpha <= mu(E)^alpha`.
    Constrained { q: f64, alpha: f64, inv_t: f64 },
    /// `mu(E)^{-row_exp} nu(F)^{-col_exp} S`.
    Product { row_exp: f64, col_exp: f64 },
}

impl Objective {
    /// The score of `|||a|||_{p,q,t}`.
    pub fn triple(spec: &CoupleSpec) -> Self {
        Objective::Balanced {
            q: spec.q(),
            alpha: spec.alpha(),
            inv_t: 1.0 / spec.t(),
        }
    }

    /// The score of the constrained `||||a||||_{p,q,t}`.
    pub fn quad(spec: &CoupleSpec) -> Self {
        Objective::Constrained {
            q: spec.q(),
            alpha: spec.alpha(),
            inv_t: 1.0 / spec.t(),
        }
    }

    /// `nu(F)^{-theta} mu(E)^{theta-1} <|a| 1_F, 1_E>`.
    pub fn product(theta: f64) -> Self {
        Objective::Product {
            row_exp: 1.0 - theta,
            col_exp: theta,
        }
    }

    fn q(&self) -> f64 {
        match *self {
            Objective::Balanced { q, .. } | Objective::Constrained { q, .. } => q,
            Objective::Product { .. } => 1.0,
        }
    }

    fn keeps_zero_rows(&self) -> bool {
        matches!(self, Objective::Constrained { .. })
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Objective::Balanced { q, alpha, inv_t } | Objective::Constrained { q, alpha, inv_t } => {
                q.is_finite() && q >= 1.0 && alpha >= 0.0 && alpha.is_finite() && inv_t > 0.0 && inv_t.is_finite()
            }
            Objective::Product { row_exp, col_exp } => row_exp.is_finite() && col_exp.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("malformed rectangle objective {self:?}")))
        }
    }

    /// Score from the two measures and the powered mass sum `S`.
    #[inline]
    pub fn score(&self, row_mass: f64, col_mass: f64, powered_sum: f64) -> Option<(f64, Regime)> {
        match *self {
            Objective::Balanced { q, alpha, inv_t } => {
                let num = root_q(powered_sum, q);
                let r = row_mass.powf(alpha);
                let c = inv_t * col_mass.powf(alpha);
                if r >= c {
                    Some((num / r, Regime::RowMeasure))
                } else {
                    Some((num / c, Regime::ColumnMeasure))
                }
            }
            Objective::Constrained { q, alpha, inv_t } => {
                let r = row_mass.powf(alpha);
                let c = inv_t * col_mass.powf(alpha);
                if c > r * (1.0 + FEASIBILITY_SLACK) {
                    None
                } else {
                    Some((root_q(powered_sum, q) / r, Regime::Constrained))
                }
            }
            Objective::Product { row_exp, col_exp } => Some((
                powered_sum / (row_mass.powf(row_exp) * col_mass.powf(col_exp)),
                Regime::Product,
            )),
        }
    }

    /// Score of a single nonempty rectangle, `None` when it is infeasible.
    pub fn evaluate(&self, a: &WeightedMatrix, r: &Rectangle) -> Result<Option<f64>> {
        if r.is_empty() {
            return Err(invalid("rectangle scores need nonempty rows and columns"));
        }
        let q = self.q();
        let mass = rect_mass_sum(a, r, q)?;
        Ok(self
            .score(r.row_measure(a), r.col_measure(a), pow_q(mass, q))
            .map(|(v, _)| v))
    }
}

/// Rounds to 12 significant digits for tie detection.
fn tie_key(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exp = x.abs().log10().floor();
    let scale = 10f64.powf(11.0 - exp);
    (x * scale).round() / scale
}

/// Atoms with identical mass and entries, lowest index first.
struct Groups {
    members: Vec<Vec<usize>>,
}

impl Groups {
    fn build(atoms: &[usize], key: impl Fn(usize) -> Vec<u64>) -> Self {
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut keys: Vec<Vec<u64>> = Vec::new();
        for &atom in atoms {
            let k = key(atom);
            match keys.iter().position(|existing| *existing == k) {
                Some(g) => members[g].push(atom),
                None => {
                    keys.push(k);
                    members.push(vec![atom]);
                }
            }
        }
        Self { members }
    }

    /// Number of distinct nonempty selections.
    fn configurations(&self) -> u128 {
        self.members
            .iter()
            .fold(1u128, |acc, g| acc.saturating_mul(g.len() as u128 + 1))
            - 1
    }
}

/// Odometer over per-group counts, skipping the all-zero selection.
struct Selections<'a> {
    groups: &'a Groups,
    counts: Vec<usize>,
    done: bool,
}

impl<'a> Selections<'a> {
    fn new(groups: &'a Groups) -> Self {
        Self {
            groups,
            counts: vec![0; groups.members.len()],
            done: groups.members.is_empty(),
        }
    }

    /// Advances and writes the selected atoms (sorted) into `out`.
    fn next_into(&mut self, out: &mut Vec<usize>) -> bool {
        if self.done {
            return false;
        }
        let mut k = 0;
        loop {
            if k == self.counts.len() {
                self.done = true;
                return false;
            }
            if self.counts[k] < self.groups.members[k].len() {
                self.counts[k] += 1;
                break;
            }
            self.counts[k] = 0;
            k += 1;
        }
        out.clear();
        for (g, &c) in self.counts.iter().enumerate() {
            out.extend_from_slice(&self.groups.members[g][..c]);
        }
        out.sort_unstable();
        true
    }
}

struct Best {
    value: f64,
    key: f64,
    rows: Vec<usize>,
    cols: Vec<usize>,
    regime: Regime,
}

fn offer(best: &mut Option<Best>, value: f64, regime: Regime, rows: &[usize], cols: impl FnOnce() -> Vec<usize>) {
    let key = tie_key(value);
    let replace_with = match best {
        None => Some(cols()),
        Some(b) if key > b.key => Some(cols()),
        Some(b) if key == b.key => {
            let cols = cols();
            let ordering = rows.cmp(&b.rows[..]).then_with(|| cols.cmp(&b.cols));
            (ordering == std::cmp::Ordering::Less).then_some(cols)
        }
        Some(_) => None,
    };
    if let Some(cols) = replace_with {
        *best = Some(Best {
            value,
            key,
            rows: rows.to_vec(),
            cols,
            regime,
        });
    }
}

/// Exact supremum of `objective` over nonempty rectangles of `a`.
pub fn rect_sup(a: &WeightedMatrix, objective: &Objective, limits: &Limits) -> Result<RectNormResult> {
    objective.validate()?;
    let (m, n) = (a.nrows(), a.ncols());
    let q = objective.q();
    let mu = a.row_space().masses();
    let nu = a.col_space().masses();
    let powered: Vec<f64> = a.entries().iter().map(|x| pow_q(x.abs(), q)).collect();

    let support_cols: Vec<usize> = (0..n).filter(|&j| (0..m).any(|i| powered[i * n + j] != 0.0)).collect();
    if support_cols.is_empty() {
        return Ok(zero_result(a, objective));
    }
    let rows: Vec<usize> = if objective.keeps_zero_rows() {
        (0..m).collect()
    } else {
        (0..m).filter(|&i| (0..n).any(|j| powered[i * n + j] != 0.0)).collect()
    };

    let row_groups = Groups::build(&rows, |i| {
        std::iter::once(mu[i].to_bits())
            .chain(support_cols.iter().map(|&j| powered[i * n + j].to_bits()))
            .collect()
    });
    let uniform_cols = support_cols.iter().all(|&j| nu[j] == nu[support_cols[0]]);
    let col_groups = (!uniform_cols).then(|| {
        Groups::build(&support_cols, |j| {
            std::iter::once(nu[j].to_bits())
                .chain(rows.iter().map(|&i| powered[i * n + j].to_bits()))
                .collect()
        })
    });

    let col_configs = match &col_groups {
        None => support_cols.len() as u128,
        Some(g) => g.configurations(),
    };
    let required = row_groups.configurations().saturating_mul(col_configs);
    if required > limits.rect_evaluations {
        return Err(Error::CapacityExceeded {
            what: "rectangle supremum",
            required,
            limit: limits.rect_evaluations,
        });
    }

    let mut best: Option<Best> = None;
    let mut row_sel = Selections::new(&row_groups);
    let mut e: Vec<usize> = Vec::with_capacity(rows.len());
    let mut f: Vec<usize> = Vec::with_capacity(support_cols.len());
    // weight[j] = sum_{i in E} |a_ij|^q mu_i nu_j, indexed by column
    let mut weight = vec![0.0; n];
    let mut order: Vec<usize> = support_cols.clone();

    while row_sel.next_into(&mut e) {
        let row_mass: f64 = e.iter().map(|&i| mu[i]).sum();
        for &j in &support_cols {
            let s: f64 = e.iter().map(|&i| powered[i * n + j] * mu[i]).sum();
            weight[j] = s * nu[j];
        }
        match &col_groups {
            None => {
                order.sort_by(|&x, &y| weight[y].total_cmp(&weight[x]).then(x.cmp(&y)));
                let mut sum = 0.0;
                let mut col_mass = 0.0;
                for k in 0..order.len() {
                    sum += weight[order[k]];
                    col_mass += nu[order[k]];
                    if let Some((value, regime)) = objective.score(row_mass, col_mass, sum) {
                        offer(&mut best, value, regime, &e, || {
                            let mut cols = order[..=k].to_vec();
                            cols.sort_unstable();
                            cols
                        });
                    }
                }
            }
            Some(groups) => {
                let mut col_sel = Selections::new(groups);
                while col_sel.next_into(&mut f) {
                    let sum: f64 = f.iter().map(|&j| weight[j]).sum();
                    let col_mass: f64 = f.iter().map(|&j| nu[j]).sum();
                    if let Some((value, regime)) = objective.score(row_mass, col_mass, sum) {
                        offer(&mut best, value, regime, &e, || f.clone());
                    }
                }
            }
        }
    }

    Ok(match best {
        Some(b) => RectNormResult {
            value: b.value,
            witness: Rectangle::new(b.rows, b.cols),
            regime: b.regime,
        },
        // only the constrained score can reject every rectangle
        None => zero_result(a, objective),
    })
}

/// The all-zero matrix: value 0. The witness is `({0},{0})`, except for the
/// constrained norm, where it is the most feasible rectangle `(M, {lightest
/// column})` or empty when even that is infeasible.
fn zero_result(a: &WeightedMatrix, objective: &Objective) -> RectNormResult {
    match objective {
        Objective::Constrained { .. } => {
            let nu = a.col_space().masses();
            let lightest = (0..a.ncols())
                .min_by(|&x, &y| nu[x].total_cmp(&nu[y]).then(x.cmp(&y)))
                .unwrap_or(0);
            match objective.score(a.row_space().total(), nu[lightest], 0.0) {
                Some((_, regime)) => RectNormResult {
                    value: 0.0,
                    witness: Rectangle::new((0..a.nrows()).collect(), vec![lightest]),
                    regime,
                },
                None => RectNormResult {
                    value: 0.0,
                    witness: Rectangle::empty(),
                    regime: Regime::Infeasible,
                },
            }
        }
        _ => {
            let regime = objective
                .score(a.row_space().mass(0), a.col_space().mass(0), 0.0)
                .map_or(Regime::RowMeasure, |(_, r)| r);
            RectNormResult {
                value: 0.0,
                witness: Rectangle::new(vec![0], vec![0]),
                regime,
            }
        }
    }
}

/// `|||a|||_{p,q,t} = sup (mu(E)^alpha v t^{-1} nu(F)^alpha)^{-1} ||1_{ExF} . a||_{l^q}`.
///
/// For `(p, q) = (inf, 1)` this is `|||a|||_t`.
pub fn triple_norm(a: &WeightedMatrix, spec: &CoupleSpec) -> Result<RectNormResult> {
    triple_norm_with(a, spec, &Limits::default())
}

pub fn triple_norm_with(a: &WeightedMatrix, spec: &CoupleSpec, limits: &Limits) -> Result<RectNormResult> {
    rect_sup(a, &Objective::triple(spec), limits)
}

/// The constrained norm `||||a||||_{p,q,t}`: `sup mu(E)^{-alpha} ||1_{ExF} . a||_{l^q}`
/// over rectangles with `t^{-1} nu(F)^alpha <= mu(E)^alpha`, and 0 when none qualifies.
pub fn quad_norm(a: &WeightedMatrix, spec: &CoupleSpec) -> Result<RectNormResult> {
    quad_norm_with(a, spec, &Limits::default())
}

pub fn quad_norm_with(a: &WeightedMatrix, spec: &CoupleSpec, limits: &Limits) -> Result<RectNormResult> {
    rect_sup(a, &Objective::quad(spec), limits)
}

/// `|||a|||_{1,t}`, which collapses to `min(1, t) ||a||_{l^1(M x N)}` because the
/// score denominator no longer depends on the rectangle.
pub fn triple_norm_p1_degenerate(a: &WeightedMatrix, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("t must be positive and finite, got {t}")));
    }
    let full = rect_mass_sum(a, &Rectangle::full(a.nrows(), a.ncols()), 1.0)?;
    Ok(t.min(1.0) * full)
}

/// Direct supremum evaluation of `|||a|||_{1,t}` (score exponent `alpha = 0`),
/// used to cross-check [`triple_norm_p1_degenerate`].
pub fn triple_norm_p1_direct(a: &WeightedMatrix, t: f64, limits: &Limits) -> Result<RectNormResult> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("t must be positive and finite, got {t}")));
    }
    rect_sup(
        a,
        &Objective::Balanced {
            q: 1.0,
            alpha: 0.0,
            inv_t: 1.0 / t,
        },
        limits,
    )
}
