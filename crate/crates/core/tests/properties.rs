use mixkt::interp::{theta_q_norm, GridOptions, KtSource};
use mixkt::kt::{kt_exact_lp, kt_mask_bruteforce};
use mixkt::rectnorm::{triple_norm_p1_direct, Limits, Objective};
use mixkt::*;
use proptest::prelude::*;

fn entry() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(0.0), 5 => -1.0f64..1.0]
}

fn masses(len: usize, unit: bool) -> BoxedStrategy<Vec<f64>> {
    if unit {
        Just(vec![1.0; len]).boxed()
    } else {
        prop::collection::vec(0.1f64..10.0, len).boxed()
    }
}

fn matrix(max_m: usize, max_n: usize) -> impl Strategy<Value = WeightedMatrix> {
    (1..=max_m, 1..=max_n, any::<bool>()).prop_flat_map(|(m, n, unit)| {
        (masses(m, unit), masses(n, unit), prop::collection::vec(entry(), m * n)).prop_map(move |(mu, nu, e)| {
            WeightedMatrix::new(MeasureSpace::new(mu).unwrap(), MeasureSpace::new(nu).unwrap(), e).unwrap()
        })
    })
}

fn pair(max_m: usize, max_n: usize) -> impl Strategy<Value = (WeightedMatrix, WeightedMatrix)> {
    matrix(max_m, max_n).prop_flat_map(|a| {
        let len = a.nrows() * a.ncols();
        (Just(a), prop::collection::vec(entry(), len)).prop_map(|(a, e)| {
            let b = WeightedMatrix::new(a.row_space().clone(), a.col_space().clone(), e).unwrap();
            (a, b)
        })
    })
}

fn couple() -> impl Strategy<Value = Couple> {
    prop::sample::select(vec![
        (f64::INFINITY, 1.0),
        (2.0, 1.0),
        (3.0, 1.0),
        (4.0, 2.0),
        (f64::INFINITY, 2.0),
        (3.0, 1.5),
    ])
    .prop_map(|(p, q)| Couple::new(p, q).unwrap())
}

fn t_value() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), 0.05f64..20.0]
}

fn close(x: f64, y: f64, rtol: f64) -> bool {
    (x - y).abs() <= rtol * x.abs().max(y.abs()).max(1e-300) || x == y
}

fn le(x: f64, y: f64, rtol: f64) -> bool {
    x <= y + rtol * y.abs().max(x.abs()) + 1e-15
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rearrangement_is_permutation_invariant(v in prop::collection::vec((entry(), 0.1f64..10.0), 1..8), seed in any::<u64>()) {
        let (f, w): (Vec<f64>, Vec<f64>) = v.iter().copied().unzip();
        let mut order: Vec<usize> = (0..f.len()).collect();
        let mut s = seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let pf: Vec<f64> = order.iter().map(|&i| f[i]).collect();
        let pw: Vec<f64> = order.iter().map(|&i| w[i]).collect();
        let x = rearrange(&f, &MeasureSpace::new(w).unwrap()).unwrap();
        let y = rearrange(&pf, &MeasureSpace::new(pw).unwrap()).unwrap();
        prop_assert_eq!(x.steps().len(), y.steps().len());
        for (a, b) in x.steps().iter().zip(y.steps()) {
            prop_assert_eq!(a.value, b.value);
            prop_assert!(close(a.right_end, b.right_end, 1e-12));
        }
    }

    #[test]
    fn rect_mass_sum_properties(a in matrix(4, 4), q in prop_oneof![Just(1.0), 1.0f64..4.0], bits in any::<u64>()) {
        let (m, n) = (a.nrows(), a.ncols());
        let rows: Vec<usize> = (0..m).filter(|i| bits >> i & 1 == 1).collect();
        let cols: Vec<usize> = (0..n).filter(|j| bits >> (8 + j) & 1 == 1).collect();
        let small = Rectangle::new(rows, cols);
        let full = Rectangle::full(m, n);
        prop_assert_eq!(rect_mass_sum(&a, &full, q).unwrap(), rect_mass_sum(&a.abs(), &full, q).unwrap());
        prop_assert!(rect_mass_sum(&a, &small, q).unwrap() <= rect_mass_sum(&a, &full, q).unwrap() * (1.0 + 1e-12));
        let l1: f64 = (0..m).flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).abs() * a.row_space().mass(i) * a.col_space().mass(j)).sum();
        prop_assert!(close(rect_mass_sum(&a, &full, 1.0).unwrap(), l1, 1e-12));
    }

    #[test]
    fn weak_norm_convexifies(v in prop::collection::vec((entry(), 0.1f64..10.0), 1..8), c in couple()) {
        let (f, w): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
        let space = MeasureSpace::new(w).unwrap();
        let powered: Vec<f64> = f.iter().map(|x| x.abs().powf(c.q())).collect();
        let lhs = weak_lp_norm(&powered, &space, c.p() / c.q()).unwrap();
        let rhs = weak_lp_norm(&f, &space, c.p()).unwrap().powf(c.q());
        prop_assert!(close(lhs, rhs, 1e-12), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn mixed_weak_norm_convexifies(a in matrix(4, 4), c in couple()) {
        let lhs = mixed_weak_norm(&a.abs_pow(c.q()), c.p() / c.q(), 1.0).unwrap();
        let rhs = mixed_weak_norm(&a, c.p(), c.q()).unwrap().powf(c.q());
        prop_assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn holder_bound_on_rectangles(a in matrix(4, 4), p in prop_oneof![Just(f64::INFINITY), 1.1f64..6.0], bits in any::<u64>()) {
        let (m, n) = (a.nrows(), a.ncols());
        let rows: Vec<usize> = (0..m).filter(|i| bits >> i & 1 == 1).collect();
        let cols: Vec<usize> = (0..n).filter(|j| bits >> (8 + j) & 1 == 1).collect();
        prop_assume!(!rows.is_empty() && !cols.is_empty());
        let r = Rectangle::new(rows, cols);
        let ps = conjugate(p);
        let bound = ps * (r.row_measure(&a).powf(1.0 / ps) * mixed_weak_norm(&a, p, 1.0).unwrap())
            .min(r.col_measure(&a).powf(1.0 / ps) * mixed_weak_norm_t(&a, p, 1.0).unwrap());
        prop_assert!(le(rect_mass_sum(&a, &r, 1.0).unwrap(), bound, 1e-12));
    }

    #[test]
    fn norms_are_monotone((a, b) in pair(4, 4), c in couple(), t in t_value()) {
        // |lo| <= |hi| entrywise
        let lo = WeightedMatrix::new(a.row_space().clone(), a.col_space().clone(),
            a.entries().iter().zip(b.entries()).map(|(x, y)| x.abs().min(y.abs())).collect()).unwrap();
        let hi = WeightedMatrix::new(a.row_space().clone(), a.col_space().clone(),
            a.entries().iter().zip(b.entries()).map(|(x, y)| -(x.abs().max(y.abs()))).collect()).unwrap();
        prop_assert!(le(mixed_weak_norm(&lo, c.p(), c.q()).unwrap(), mixed_weak_norm(&hi, c.p(), c.q()).unwrap(), 1e-12));
        prop_assert!(le(mixed_weak_norm_t(&lo, c.p(), c.q()).unwrap(), mixed_weak_norm_t(&hi, c.p(), c.q()).unwrap(), 1e-12));
        prop_assert!(le(mixed_inf_one(&lo), mixed_inf_one(&hi), 1e-12));
        if c.p().is_finite() {
            prop_assert!(le(mixed_lorentz_norm(&lo, c.p(), 1.0, c.q()).unwrap(), mixed_lorentz_norm(&hi, c.p(), 1.0, c.q()).unwrap(), 1e-12));
        }
        let spec = c.at(t).unwrap();
        prop_assert!(le(triple_norm(&lo, &spec).unwrap().value, triple_norm(&hi, &spec).unwrap().value, 1e-12));
    }

    #[test]
    fn quad_is_below_triple(a in matrix(4, 4), c in couple(), t in t_value()) {
        let spec = c.at(t).unwrap();
        let quad = quad_norm(&a, &spec).unwrap();
        let triple = triple_norm(&a, &spec).unwrap();
        prop_assert!(le(quad.value, triple.value, 1e-12));
    }

    #[test]
    fn witnesses_reproduce_their_value(a in matrix(4, 4), c in couple(), t in t_value()) {
        let spec = c.at(t).unwrap();
        for (objective, result) in [
            (Objective::triple(&spec), triple_norm(&a, &spec).unwrap()),
            (Objective::quad(&spec), quad_norm(&a, &spec).unwrap()),
        ] {
            if result.witness.is_empty() {
                prop_assert_eq!(result.value, 0.0);
                continue;
            }
            let again = objective.evaluate(&a, &result.witness).unwrap().expect("witness is feasible");
            prop_assert!(close(again, result.value, 1e-12), "{} vs {}", again, result.value);
            prop_assert_eq!(&triple_norm(&a, &spec).unwrap().witness, &triple_norm(&a, &spec).unwrap().witness);
        }
    }

    #[test]
    fn rect_sup_matches_full_enumeration(a in matrix(4, 4), c in couple(), t in t_value(), theta in 0.05f64..0.95) {
        let spec = c.at(t).unwrap();
        let (m, n) = (a.nrows(), a.ncols());
        for objective in [Objective::triple(&spec), Objective::quad(&spec), Objective::product(theta)] {
            let mut best: Option<f64> = None;
            for rb in 1u32..(1 << m) {
                for cb in 1u32..(1 << n) {
                    let r = Rectangle::new((0..m).filter(|i| rb >> i & 1 == 1).collect(), (0..n).filter(|j| cb >> j & 1 == 1).collect());
                    if let Some(v) = objective.evaluate(&a, &r).unwrap() {
                        best = Some(best.map_or(v, |b: f64| b.max(v)));
                    }
                }
            }
            let fast = mixkt::rectnorm::rect_sup(&a, &objective, &Limits::default()).unwrap().value;
            prop_assert!(close(fast, best.unwrap_or(0.0), 1e-12), "{:?}: {} vs {:?}", objective, fast, best);
        }
    }

    #[test]
    fn triple_is_a_norm((a, b) in pair(4, 4), c in couple(), t in t_value(), lambda in -5.0f64..5.0) {
        let spec = c.at(t).unwrap();
        let na = triple_norm(&a, &spec).unwrap().value;
        let nb = triple_norm(&b, &spec).unwrap().value;
        let sum = triple_norm(&a.add(&b).unwrap(), &spec).unwrap().value;
        prop_assert!(le(sum, na + nb, 1e-9));
        let scaled = triple_norm(&a.scale(lambda), &spec).unwrap().value;
        prop_assert!(close(scaled, lambda.abs() * na, 1e-12));
    }

    #[test]
    fn triple_convexifies(a in matrix(4, 4), c in couple(), t in t_value()) {
        let spec = c.at(t).unwrap();
        let lhs = triple_norm(&a, &spec).unwrap().value.powf(c.q());
        let rhs = triple_norm(&a.abs_pow(c.q()), &spec.convexified()).unwrap().value;
        prop_assert!(close(lhs, rhs, 1e-9));
    }

    #[test]
    fn triple_is_monotone_under_restriction(a in matrix(4, 4), c in couple(), t in t_value(), bits in any::<u64>()) {
        let (m, n) = (a.nrows(), a.ncols());
        let mut rows: Vec<usize> = (0..m).filter(|i| bits >> i & 1 == 1).collect();
        let mut cols: Vec<usize> = (0..n).filter(|j| bits >> (8 + j) & 1 == 1).collect();
        if rows.is_empty() { rows.push(0); }
        if cols.is_empty() { cols.push(0); }
        let spec = c.at(t).unwrap();
        let sub = a.submatrix(&rows, &cols).unwrap();
        prop_assert!(le(triple_norm(&sub, &spec).unwrap().value, triple_norm(&a, &spec).unwrap().value, 1e-12));
    }

    #[test]
    fn degenerate_p1_identity(a in matrix(4, 4), t in t_value()) {
        let direct = triple_norm_p1_direct(&a, t, &Limits::default()).unwrap().value;
        prop_assert!(close(direct, triple_norm_p1_degenerate(&a, t).unwrap(), 1e-12));
    }

    #[test]
    fn split_is_certified_partition(a in matrix(5, 5), c in couple(), t in t_value()) {
        let spec = c.at(t).unwrap();
        let s = split_p_q(&a, &spec).unwrap();
        let (m, n) = (a.nrows(), a.ncols());
        prop_assert_eq!(s.a_cells().len() + s.b_cells().len(), m * n);
        prop_assert!(le(s.bound_a, s.scale, 1e-9));
        prop_assert!(le(s.bound_b, s.scale / t, 1e-9));
        prop_assert!(le(s.upper(), 2.0 * s.scale, 1e-9));
        let (b, cpart) = s.decomposition(&a);
        let back = b.add(&cpart).unwrap();
        prop_assert_eq!(back.entries(), a.entries());
        for stage in &s.trace.stages {
            let min = stage.row_sums.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
            let chosen = stage.row_sums.iter().find(|r| r.0 == stage.chosen_row).unwrap().1;
            prop_assert_eq!(chosen, min);
            let largest_tied = stage.row_sums.iter().filter(|r| r.1 == min).map(|r| r.0).max().unwrap();
            prop_assert_eq!(stage.chosen_row, largest_tied);
        }
    }

    #[test]
    fn split_is_scale_equivariant(a in matrix(5, 5), c in couple(), t in t_value(), k in -10i32..10) {
        let spec = c.at(t).unwrap();
        let x = split_p_q(&a, &spec).unwrap();
        let y = split_p_q(&a.scale(2f64.powi(k)), &spec).unwrap();
        prop_assert_eq!(x.mask, y.mask);
    }

    #[test]
    fn permutation_invariance(a in matrix(4, 4), t in t_value(), seed in any::<u64>()) {
        let (m, n) = (a.nrows(), a.ncols());
        let mut rp: Vec<usize> = (0..m).collect();
        let mut cp: Vec<usize> = (0..n).collect();
        rp.rotate_left((seed % m as u64) as usize);
        cp.reverse();
        let b = a.permuted(&rp, &cp).unwrap();
        let spec = CoupleSpec::infinity_one(t).unwrap();
        prop_assert!(close(triple_norm(&a, &spec).unwrap().value, triple_norm(&b, &spec).unwrap().value, 1e-12));
        prop_assert!(close(kt_exact_lp(&a, t).unwrap().value, kt_exact_lp(&b, t).unwrap().value, 1e-7));
        let s = split_p_q(&b, &spec).unwrap();
        prop_assert!(le(s.bound_a, s.scale, 1e-9) && le(s.bound_b, s.scale / t, 1e-9));
    }

    #[test]
    fn kt_sandwich_chain(a in matrix(3, 4), t in t_value()) {
        let spec = CoupleSpec::infinity_one(t).unwrap();
        let bracket = kt_bracket(&a, &spec).unwrap();
        let lp = kt_exact_lp(&a, t).unwrap().value;
        let mask = kt_mask_bruteforce(&a, &spec).unwrap().value;
        prop_assert!(le(bracket.lower, lp, 1e-9));
        prop_assert!(le(lp, mask, 1e-9));
        prop_assert!(le(mask, bracket.upper, 1e-9));
        prop_assert!(le(bracket.upper, 2.0 * bracket.scale, 1e-9));
        let (b, c) = bracket.decomposition.unwrap();
        prop_assert!(close(decomposition_cost(&b, &c, &spec).unwrap(), bracket.upper, 1e-9));
    }

    #[test]
    fn kt_is_concave_nondecreasing(a in matrix(3, 3), t0 in 0.1f64..5.0) {
        let ts = [t0, 1.5 * t0, 2.0 * t0];
        let k: Vec<f64> = ts.iter().map(|&t| kt_exact_lp(&a, t).unwrap().value).collect();
        prop_assert!(le(k[0], k[1], 1e-9) && le(k[1], k[2], 1e-9));
        // k[1] >= the chord through k[0] and k[2]
        prop_assert!(le(0.5 * (k[0] + k[2]), k[1], 1e-9));
    }

    #[test]
    fn theta_inf_equals_bracket(a in matrix(3, 3), theta in 0.05f64..0.95) {
        let u = OperatorKernel::new(a);
        let spec = InterpSpec::new(theta, f64::INFINITY).unwrap();
        let sup = theta_inf_norm(&u, &spec).unwrap().value;
        let bracket = bracket_u_p(&u, &spec).unwrap().value;
        prop_assert!(close(sup, bracket, 1e-9), "{} vs {}", sup, bracket);
    }

    #[test]
    fn op_triple_monotone_and_dual(a in matrix(4, 4), t in t_value()) {
        let u = OperatorKernel::new(a);
        let x = op_triple_norm(&u, t).unwrap().value;
        prop_assert!(le(x, op_triple_norm(&u, 1.3 * t).unwrap().value, 1e-12));
        let dual = t * op_triple_norm(&u.transpose(), 1.0 / t).unwrap().value;
        prop_assert!(close(x, dual, 1e-12));
    }

    #[test]
    fn op_triple_sandwich(a in matrix(3, 3), t in t_value()) {
        let u = OperatorKernel::new(a);
        let x = op_triple_norm(&u, t).unwrap().value;
        let k = kt_exact_lp(u.kernel(), t).unwrap().value;
        prop_assert!(le(0.5 * k, x, 1e-9) && le(x, k, 1e-9));
    }

    #[test]
    fn weak_type_brackets(a in matrix(3, 4), theta in 0.1f64..0.9) {
        let u = OperatorKernel::new(a);
        let p = 1.0 / theta;
        let w = weak_type_check(&u, p).unwrap();
        let b = bracket_u_p(&u, &InterpSpec::new(theta, f64::INFINITY).unwrap()).unwrap().value;
        prop_assert!(le(w, b, 1e-9));
        prop_assert!(le(b, conjugate(p) * w, 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn theta_q_interval_contains_candidate_sup(a in matrix(3, 3), theta in 0.2f64..0.8) {
        let spec = InterpSpec::new(theta, f64::INFINITY).unwrap();
        let sup = theta_inf_norm(&OperatorKernel::new(a.clone()), &spec).unwrap().value;
        let grid = GridOptions { ratio: 1.2, span: 1e3, center: None };
        let interval = theta_q_norm(&a, &spec, &Couple::infinity_one(), KtSource::Bracket, &grid, &Limits::default()).unwrap();
        prop_assert!(interval.contains(sup, 1e-9), "{:?} vs {}", interval, sup);
    }
}
