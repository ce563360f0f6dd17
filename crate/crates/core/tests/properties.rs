use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;
use singular_yamabe::asymptotics::{exponent_deviation, fit_exponent};
use singular_yamabe::certifier::{
    log_radii, morrey_check, sobolev_audit, sobolev_constants, verify_truncation_inequalities, MorreyCenter,
    ProbeConfig, SobolevEstimate, TruncationParams,
};
use singular_yamabe::geometry::{cylinder_quotient, cylinder_transform, window_quotient, ConeSpace, LinkSpec, Tip};
use singular_yamabe::grid::{GridSpec, RadialGrid};
use singular_yamabe::par::{self, Execution};
use singular_yamabe::quadrature::geomspace;
use singular_yamabe::solver::{assemble, Assembled};

fn spindle(cells: usize) -> Assembled {
    let s = ConeSpace::round_spindle(4, 0.6, PI).unwrap();
    let g = RadialGrid::graded(&s, &GridSpec::new(cells, 1.1, 100.0)).unwrap();
    assemble(&s, &g).unwrap()
}

fn smooth_profile(a: &Assembled, c: &[f64]) -> Vec<f64> {
    a.grid
        .nodes
        .iter()
        .map(|x| {
            let t = x / a.grid.length;
            1.1 + c.iter().enumerate().map(|(k, ck)| ck * ((k + 1) as f64 * PI * t).cos()).sum::<f64>()
        })
        .collect()
}

fn sobolev_fixture() -> &'static (Assembled, SobolevEstimate) {
    static CELL: OnceLock<(Assembled, SobolevEstimate)> = OnceLock::new();
    CELL.get_or_init(|| {
        let a = spindle(300);
        let cfg = ProbeConfig {
            probes: 80,
            audit_probes: 200,
            ..ProbeConfig::default()
        };
        let est = sobolev_constants(&a, &cfg).unwrap();
        (a, est)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quotient_is_scale_invariant(
        c in prop::collection::vec(-0.3..0.3f64, 4),
        lambda in 1e-3..1e3f64,
        s in 4.05..8.0f64,
    ) {
        let a = spindle(200);
        let u = smooth_profile(&a, &c);
        let scaled: Vec<f64> = u.iter().map(|v| lambda * v).collect();
        let (q1, q2) = (a.quotient(&u, s), a.quotient(&scaled, s));
        prop_assert!((q1 - q2).abs() <= 1e-12 * q1.abs(), "{q1} vs {q2}");
    }

    #[test]
    fn window_and_cylinder_quotients_agree(
        f in 2usize..5,
        rho in 0.4..1.4f64,
        beta in -1.0..0.8f64,
        amp in -0.3..0.3f64,
        k in 0.5..3.0f64,
    ) {
        let link = LinkSpec::round_sphere(f, 1.0, 3).unwrap();
        let space = ConeSpace::exact_cone(link, rho, 2.0).unwrap();
        let x = geomspace(0.05, 1.5, 1601);
        let u: Vec<f64> = x.iter().map(|t| t.powf(beta) * (1.0 + amp * (k * t.ln()).sin())).collect();
        let q1 = window_quotient(&space, &x, &u).unwrap();
        let q2 = cylinder_quotient(&cylinder_transform(&space, &x, &u).unwrap()).unwrap();
        prop_assert!((q1 - q2).abs() <= 1e-6 * q2.abs(), "{q1} vs {q2}");
    }

    #[test]
    fn truncation_inequalities_hold(alpha in 1.0001..3.0f64, l in 1.0..100.0f64, xs in prop::collection::vec(0.0..1.0f64, 32)) {
        let params = TruncationParams::new(alpha, l).unwrap();
        let samples: Vec<f64> = xs.iter().map(|t| t * 10.0 * l).chain([0.0, l, params.breakpoint]).collect();
        let check = verify_truncation_inequalities(&params, &samples).unwrap();
        prop_assert!(check.passed, "{:?}", check.witness);
    }

    #[test]
    fn fit_recovers_planted_power(gamma in 0.1..3.0f64, c0 in 0.1..10.0f64) {
        let a = spindle(1500);
        for tip in [Tip::Start, Tip::End] {
            let u: Vec<f64> = a.grid.nodes.iter().map(|&x| c0 * tip.distance(x, a.grid.length).powf(gamma)).collect();
            let fit = fit_exponent(&u, &a.grid, tip, None).unwrap();
            prop_assert!((fit.gamma_hat - gamma).abs() < 1e-6 * gamma, "{} vs {gamma}", fit.gamma_hat);
            prop_assert!((fit.c0_hat - c0).abs() < 1e-5 * c0);
        }
    }

    #[test]
    fn exponent_deviation_is_symmetric(a in -5.0..5.0f64, b in -5.0..5.0f64) {
        prop_assert_eq!(exponent_deviation(a, b), exponent_deviation(b, a));
        prop_assert!(exponent_deviation(a, b) >= 0.0);
        prop_assert_eq!(exponent_deviation(a, a), 0.0);
    }

    #[test]
    fn parallel_and_sequential_maps_agree(xs in prop::collection::vec(-1e3..1e3f64, 0..200)) {
        let f = |x: &f64| (x.sin() * x.exp().ln_1p()).to_bits();
        prop_assert_eq!(par::map(Execution::Parallel, &xs, f), par::map(Execution::Sequential, &xs, f));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn morrey_constant_is_monotone_in_alpha(s in 0.0..1.9f64, q in 1.1..3.0f64, lo in 0.0..0.9f64, gap in 0.05..0.5f64) {
        let link = LinkSpec::round_sphere(3, 1.0, 3).unwrap();
        let space = ConeSpace::exact_cone(link, 1.0, 1.0).unwrap();
        let grid = RadialGrid::graded(&space, &GridSpec::new(800, 1.05, 1e4)).unwrap();
        let v: Vec<f64> = grid.nodes.iter().map(|x| x.powf(-s)).collect();
        let radii = log_radii(1e-3, 1e-1, 8);
        let centers = [MorreyCenter::Tip(Tip::Start), MorreyCenter::Interior(0.5)];
        let hi = (lo + gap).min(1.99);
        let a = morrey_check(&space, &grid, &v, q, lo, &centers, &radii).unwrap();
        let b = morrey_check(&space, &grid, &v, q, hi, &centers, &radii).unwrap();
        // every radius is below 1, so a larger alpha can only shrink r^{αq-n}
        prop_assert!(b.sup_constant <= a.sup_constant * (1.0 + 1e-12));
    }

    #[test]
    fn sobolev_pair_survives_fresh_audit(seed in any::<u64>()) {
        let (a, est) = sobolev_fixture();
        let (usable, violations, worst) = sobolev_audit(a, est, seed, 150, Execution::Parallel);
        prop_assert!(usable > 100);
        prop_assert_eq!(violations, 0, "worst ratio {}", worst);
    }
}
