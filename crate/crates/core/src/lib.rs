//! `K_t`-functionals and rectangle norms for the mixed-norm couples
//! `l^{p,inf}_M(l^q_N), l^{p,inf}_N(l^q_M)` on finite weighted measure spaces.
//!
//! * [`measure`]: measure spaces, weighted matrices, rectangles, rearrangements.
//! * [`norms`]: weak, Lorentz and mixed norms, and the exponent bookkeeping.
//! * [`rectnorm`]: exact rectangle suprema with witnesses.
//! * [`splitting`]: the certified `A u B` partition.
//! * [`kt`]: brackets and exact oracles for `K_t`.
//! * [`interp`]: kernel operators and interpolation norms.
//! * [`repro`]: worked examples as checked reports.
//! * [`gen`]: seeded random instances.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gen;
pub mod interp;
pub mod kt;
pub mod measure;
pub mod norms;
pub mod rectnorm;
pub mod repro;
mod simplex;
pub mod splitting;

pub use error::{Error, Result};
pub use interp::{
    bracket_u_p, op_triple_norm, theta_inf_norm, theta_q_norm, weak_type_check, GridOptions, InterpSpec, Interval,
    KtSource, OperatorKernel,
};
pub use kt::{kt_bracket, kt_exact_lp, kt_mask_bruteforce, BoundSource, KtBracket};
pub use measure::{rearrange, rect_mass_sum, MeasureSpace, Rearrangement, Rectangle, Step, WeightedMatrix};
pub use norms::{
    conjugate, decomposition_cost, lorentz_norm, lq_norm, mixed_inf_one, mixed_inf_one_t, mixed_lorentz_norm,
    mixed_lorentz_norm_t, mixed_weak_norm, mixed_weak_norm_t, weak_lp_norm, Couple, CoupleSpec,
};
pub use rectnorm::{quad_norm, triple_norm, triple_norm_p1_degenerate, Limits, Objective, RectNormResult, Regime};
pub use splitting::{split_infty_one, split_p_one, split_p_q, SplitResult, SplitTrace};
