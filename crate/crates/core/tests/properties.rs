use bintomo::baselines::otsu_threshold;
use bintomo::dual::{
    asym_penalty, asym_soft_threshold, eval_smoothed_objective, grad_smoothed_objective, kkt_residual, recover_primal,
    solve_dual_primal_dual, soft_threshold, DualProblem,
};
use bintomo::enumerate::{count_summary, enumerate_all};
use bintomo::metrics::jaccard;
use bintomo::projector::{build_lattice_operator, build_parallel_operator};
use bintomo::range::{RangeOptions, RangeProjector};
use bintomo::{BinaryImage, GreyLevels, GridSpec, Kernel, LatticeDirection, LatticeGeometry, ParallelGeometry, SolverConfig, SparseOperator};
use proptest::prelude::*;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn dense(rows: usize, cols: usize) -> impl Strategy<Value = SparseOperator> {
    prop::collection::vec(0.0..1.0f64, rows * cols).prop_map(move |d| SparseOperator::from_dense(rows, cols, &d).unwrap())
}

fn levels() -> impl Strategy<Value = GreyLevels> {
    prop_oneof![Just(GreyLevels::SYMMETRIC), Just(GreyLevels::UNIT), Just(GreyLevels { u0: -0.5, u1: 2.0 })]
}

fn hv() -> LatticeGeometry {
    LatticeGeometry::new(vec![LatticeDirection::Horizontal, LatticeDirection::Vertical]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parallel_adjoint_identity(
        n in 3usize..10,
        views in 1usize..6,
        strip in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let kernel = if strip { Kernel::Strip } else { Kernel::Joseph };
        let angles = ParallelGeometry::equispaced_angles(views, std::f64::consts::PI);
        let geom = ParallelGeometry::new(angles, n, 1.0, kernel).unwrap();
        let a = build_parallel_operator(&GridSpec::new(n).unwrap(), &geom).unwrap();
        let mut state = seed | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let x: Vec<f64> = (0..a.cols()).map(|_| next()).collect();
        let r: Vec<f64> = (0..a.rows()).map(|_| next()).collect();
        let lhs = dot(&a.apply_forward(&x).unwrap(), &r);
        let rhs = dot(&x, &a.apply_adjoint(&r).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn soft_threshold_minimizes_on_grid(t in -3.0..3.0f64, tau in 0.0..2.0f64) {
        let f = |x: f64| 0.5 * (x - t) * (x - t) + tau * x.abs();
        let best = (-6000..=6000).map(|k| k as f64 * 1e-3).fold(f64::INFINITY, |m, x| m.min(f(x)));
        prop_assert!(f(soft_threshold(t, tau)) <= best + 1e-12);
    }

    #[test]
    fn asymmetric_threshold_minimizes_on_grid(t in -3.0..3.0f64, lo in 0.0..2.0f64, hi in 0.0..2.0f64) {
        let f = |x: f64| 0.5 * (x - t) * (x - t) + lo * (-x).max(0.0) + hi * x.max(0.0);
        let best = (-6000..=6000).map(|k| k as f64 * 1e-3).fold(f64::INFINITY, |m, x| m.min(f(x)));
        prop_assert!(f(asym_soft_threshold(t, lo, hi)) <= best + 1e-12);
        prop_assert_eq!(soft_threshold(t, lo), asym_soft_threshold(t, lo, lo));
    }

    #[test]
    fn penalty_is_positively_homogeneous(nu in prop::collection::vec(-5.0..5.0f64, 1..20), c in 0.0..10.0f64) {
        let scaled: Vec<f64> = nu.iter().map(|v| c * v).collect();
        let (p, q) = (asym_penalty(&scaled, 0.7, 1.3), c * asym_penalty(&nu, 0.7, 1.3));
        prop_assert!((p - q).abs() <= 1e-12 * (1.0 + q.abs()));
    }

    #[test]
    fn smoothed_gradient_matches_differences(
        a in dense(4, 6),
        y in prop::collection::vec(-2.0..2.0f64, 4),
        mu in prop::collection::vec(-1.0..1.0f64, 4),
        w in prop::collection::vec(0.1..10.0f64, 4),
        weighted in any::<bool>(),
        lv in levels(),
    ) {
        let eps = 0.1;
        let w = weighted.then_some(w.as_slice());
        let g = grad_smoothed_objective(&a, &y, &mu, eps, lv, w).unwrap();
        let h = 1e-6;
        for i in 0..mu.len() {
            let (mut up, mut down) = (mu.clone(), mu.clone());
            up[i] += h;
            down[i] -= h;
            let fd = (eval_smoothed_objective(&a, &y, &up, eps, lv, w).unwrap()
                - eval_smoothed_objective(&a, &y, &down, eps, lv, w).unwrap())
                / (2.0 * h);
            prop_assert!((fd - g[i]).abs() < 1e-6, "coordinate {}: {} vs {}", i, fd, g[i]);
        }
    }

    #[test]
    fn weight_scale_does_not_change_the_problem(
        a in dense(3, 5),
        y in prop::collection::vec(-2.0..2.0f64, 3),
        w in prop::collection::vec(0.1..10.0f64, 3),
        c in 1e-3..1e6f64,
    ) {
        let cfg = SolverConfig::default();
        let scaled: Vec<f64> = w.iter().map(|v| c * v).collect();
        let p = DualProblem::new(&a, &y, GreyLevels::SYMMETRIC, Some(&w), &cfg).unwrap();
        let q = DualProblem::new(&a, &y, GreyLevels::SYMMETRIC, Some(&scaled), &cfg).unwrap();
        for (u, v) in p.b.iter().zip(&q.b) {
            prop_assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn range_projection_is_orthogonal(
        a in dense(6, 3),
        r in prop::collection::vec(-3.0..3.0f64, 6),
    ) {
        let proj = RangeProjector::new(&a, RangeOptions::default());
        let p = proj.project(&r).unwrap();
        let again = proj.project(&p).unwrap();
        for (u, v) in p.iter().zip(&again) {
            prop_assert!((u - v).abs() < 1e-10);
        }
        let resid: Vec<f64> = r.iter().zip(&p).map(|(u, v)| u - v).collect();
        for v in a.apply_adjoint(&resid).unwrap() {
            prop_assert!(v.abs() < 1e-10);
        }
    }

    #[test]
    fn jaccard_is_symmetric(masks in (0u32..512, 0u32..512)) {
        let a = BinaryImage::from_mask(3, GreyLevels::UNIT, masks.0);
        let b = BinaryImage::from_mask(3, GreyLevels::UNIT, masks.1);
        let ab = jaccard(&a, &b).unwrap();
        let ba = jaccard(&b, &a).unwrap();
        prop_assert_eq!(ab.ji, ba.ji);
        prop_assert_eq!((ab.missing, ab.over), (ba.over, ba.missing));
        prop_assert_eq!(jaccard(&a, &a).unwrap().ji, 1.0);
        prop_assert!((0.0..=1.0).contains(&ab.ji));
    }

    #[test]
    fn otsu_ignores_power_of_two_scaling(x in prop::collection::vec(-10.0..10.0f64, 16), k in -8i32..8) {
        let s = 2f64.powi(k);
        let scaled: Vec<f64> = x.iter().map(|v| v * s).collect();
        let a = otsu_threshold(&x, GreyLevels::UNIT).unwrap();
        let b = otsu_threshold(&scaled, GreyLevels::UNIT).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solver_certificate_recomputes(
        a in dense(5, 8),
        y in prop::collection::vec(-2.0..2.0f64, 5),
        lv in levels(),
    ) {
        let cfg = SolverConfig::default();
        let sol = solve_dual_primal_dual(&a, &y, lv, None, &cfg).unwrap();
        let p = DualProblem::new(&a, &y, lv, None, &cfg).unwrap();
        let r = kkt_residual(&p.k, &p.b, &sol.mu, &sol.x, lv).unwrap();
        prop_assert!((r - sol.kkt_residual).abs() <= 1e-12);
        prop_assert!(sol.converged && r <= cfg.tol_kkt, "kkt {}", r);
    }

    #[test]
    fn flipping_the_data_flips_the_multipliers(
        a in dense(4, 6),
        y in prop::collection::vec(-2.0..2.0f64, 4),
    ) {
        let cfg = SolverConfig::default();
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let p = solve_dual_primal_dual(&a, &y, GreyLevels::SYMMETRIC, None, &cfg).unwrap();
        let q = solve_dual_primal_dual(&a, &neg, GreyLevels::SYMMETRIC, None, &cfg).unwrap();
        for (u, v) in p.mu.iter().zip(&q.mu) {
            prop_assert!((u + v).abs() < 1e-5, "{} vs {}", u, v);
        }
    }

    #[test]
    fn transposing_the_image_transposes_the_decision(mask in 0u32..512) {
        let n = 3;
        let a = build_lattice_operator(&GridSpec::new(n).unwrap(), &hv()).unwrap();
        let cfg = SolverConfig::default();
        let x = BinaryImage::from_mask(n, GreyLevels::SYMMETRIC, mask);
        let flags: Vec<bool> = (0..n * n).map(|i| x.is_upper(i % n, i / n)).collect();
        let xt = BinaryImage::from_flags(n, GreyLevels::SYMMETRIC, flags).unwrap();
        let decide = |img: &BinaryImage| {
            let y = a.apply_forward(&img.values()).unwrap();
            let sol = solve_dual_primal_dual(&a, &y, GreyLevels::SYMMETRIC, None, &cfg).unwrap();
            recover_primal(&sol.nu, GreyLevels::SYMMETRIC, cfg.zero_threshold).unwrap().ternary
        };
        let (t, tt) = (decide(&x), decide(&xt));
        for r in 0..n {
            for c in 0..n {
                prop_assert_eq!(t.pixels()[r * n + c], tt.pixels()[c * n + r]);
            }
        }
    }
}

#[test]
fn enumeration_partitions_every_image() {
    for n in 1..=3 {
        for geom in [hv(), LatticeGeometry::first(3).unwrap(), LatticeGeometry::first(4).unwrap()] {
            let classes = enumerate_all(n, &geom).unwrap();
            let s = count_summary(n, &geom, &classes);
            assert_eq!(s.total, 1 << (n * n));
            assert_eq!(s.unique_count + s.multiple_count, s.total);
            let mut seen = vec![false; 1 << (n * n)];
            for class in classes.values() {
                assert_eq!(class.unique, class.solutions.len() == 1);
                for img in &class.solutions {
                    let idx = img.flags().iter().enumerate().fold(0usize, |m, (i, &f)| m | (usize::from(f) << i));
                    assert!(!seen[idx]);
                    seen[idx] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }
}
