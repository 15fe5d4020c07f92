use proptest::prelude::*;
use qalg::cli_report::{GridSpec, ToolkitConfig};
use qalg::evalrep::{gauss_decompose, pi1_l, pi1_l_bare, reassemble, LOperatorRep};
use qalg::freefield::{self as ff, ExchangeRelation, PairTag};
use qalg::mat::{diff_max, rel_diff, CMat};
use qalg::rmatrix::{check_unitarity, ice_rule_holds, r_full, rbar_entries, AlgebraParams, Sign, DEFAULT_TRUNC};
use qalg::specfun::{gamma, hankel_log_integral, log_gamma, HankelContour};
use qalg::strip_riemann::kappa_kernel_complex;
use qalg::{QalgError, C64};
use std::f64::consts::PI;

fn params() -> AlgebraParams {
    AlgebraParams::new(0.3, 0.7, 0.0).unwrap()
}

fn level_one() -> AlgebraParams {
    AlgebraParams::new(0.3, 0.7, 1.0).unwrap()
}

fn cmat2(v: &[f64]) -> CMat {
    CMat::from_fn(2, 2, |i, j| C64::new(v[4 * i + 2 * j], v[4 * i + 2 * j + 1]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_gamma_recursion(re in -6.0f64..9.0, im in 0.05f64..6.0, flip in any::<bool>()) {
        let z = C64::new(re, if flip { -im } else { im });
        let d = (log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap()).exp() / z;
        prop_assert!((d - 1.0).norm() < 1e-12);
    }

    #[test]
    fn gamma_reflection(re in -3.0f64..3.0, im in 0.1f64..2.0) {
        let z = C64::new(re, im);
        let lhs = gamma(z).unwrap() * gamma(1.0 - z).unwrap();
        let rhs = PI / (PI * z).sin();
        prop_assert!((lhs - rhs).norm() / rhs.norm() < 1e-11);
    }

    #[test]
    fn hankel_radius_invariance(x in 0.4f64..3.0, eta in 0.4f64..1.2) {
        let k = HankelContour::for_periods(&[1.0 / eta]).unwrap().with_truncation(40.0 / x);
        let k2 = HankelContour::new(0.5 * k.radius, 0.25 * k.radius, k.truncation, k.nodes_per_unit).unwrap();
        let ker = |l: C64| 1.0 / (1.0 - (-l / eta).exp());
        let a = hankel_log_integral(&ker, C64::new(x, 0.0), &k).unwrap();
        let b = hankel_log_integral(&ker, C64::new(x, 0.0), &k2).unwrap();
        prop_assert!((a.value - b.value).norm() < 1e-9 + 10.0 * (a.est_error + b.est_error));
    }

    #[test]
    fn r_matrix_ice_rule_and_bc_identity(re in -2.0f64..2.0, im in -0.25f64..0.25) {
        let p = params();
        let u = C64::new(re, im);
        let r = r_full(u, Sign::Plus, &p, DEFAULT_TRUNC).unwrap();
        prop_assert!(ice_rule_holds(&r.entries));
        let (b, c) = rbar_entries(u, &p).unwrap();
        let sh = |x: C64| x.sinh();
        let rhs = sh(PI * p.eta * (u + C64::new(0.0, p.hbar))) / sh(PI * p.eta * (u - C64::new(0.0, p.hbar)));
        prop_assert!((b * b - c * c - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn unitarity_random(u in -3.0f64..3.0) {
        prop_assert!(check_unitarity(C64::new(u, 0.0), Sign::Bare, &params(), DEFAULT_TRUNC).unwrap() < 1e-7);
    }

    #[test]
    fn gauss_roundtrip(v in prop::collection::vec(-1.0f64..1.0, 32)) {
        let mut blocks = [[cmat2(&v[0..8]), cmat2(&v[8..16])], [cmat2(&v[16..24]), cmat2(&v[24..32])]];
        blocks[1][1] += CMat::identity(2, 2) * C64::new(3.0, 0.0);
        let l = LOperatorRep { blocks, u: C64::new(0.1, 0.0), sign: Sign::Plus, z: C64::new(0.0, 0.0) };
        let g = gauss_decompose(&l, &params()).unwrap();
        let back = reassemble(&g, l.u, l.sign, l.z);
        prop_assert!(diff_max(&back.to_full(), &l.to_full()) < 1e-12);
    }

    #[test]
    fn gauss_coordinates_ignore_scalar_prefactor(re in -1.5f64..1.5) {
        let p = params();
        let (z, u) = (C64::new(0.1, 0.0), C64::new(re, -0.35));
        let full = gauss_decompose(&pi1_l(z, u, Sign::Plus, &p, DEFAULT_TRUNC).unwrap(), &p).unwrap();
        let bare = gauss_decompose(&pi1_l_bare(z, u, &p).unwrap(), &p).unwrap();
        prop_assert!(rel_diff(&full.e_coord, &bare.e_coord) < 1e-12);
        prop_assert!(rel_diff(&full.f_coord, &bare.f_coord) < 1e-12);
        prop_assert!(rel_diff(&full.h_coord, &bare.h_coord) < 1e-12);
    }

    #[test]
    fn kappa_odd_and_real(tau in 0.2f64..3.0) {
        let p = level_one();
        let a = kappa_kernel_complex(tau, &p).unwrap();
        let b = kappa_kernel_complex(-tau, &p).unwrap();
        prop_assert!((a + b).norm() < 1e-10);
        prop_assert!(a.im.abs() < 1e-10);
    }

    #[test]
    fn grid_spec_parses(lo in -5.0f64..0.0, hi in 0.0f64..5.0, n in 1usize..40) {
        let g: GridSpec = format!("{lo}:{hi}:{n}").parse().unwrap();
        prop_assert_eq!(g.points().len(), n);
        prop_assert_eq!((g.lo, g.hi), (lo, hi));
    }

    #[test]
    fn nonpositive_tolerance_rejected(t in -1.0f64..=0.0) {
        let mut cfg = ToolkitConfig::default();
        cfg.set_tol(&format!("unitarity={t}")).unwrap();
        prop_assert!(matches!(cfg.validate(), Err(QalgError::Config(_))));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exchange_ratios_hold(x in 0.1f64..2.5, flip in any::<bool>()) {
        let p = level_one();
        let w = C64::new(if flip { -x } else { x }, 0.0);
        for rel in ExchangeRelation::ALL {
            let r = ff::exchange_ratio_residual(rel, w, &p).unwrap();
            prop_assert!(r < 1e-6 * rel.printed_ratio(w, &p).norm().max(1.0), "{} at {}: {}", rel.name(), w, r);
        }
    }

    #[test]
    fn closed_forms_match_quadrature(x in -1.0f64..1.0, depth in 0.15f64..0.6) {
        let p = level_one();
        for pair in PairTag::TABLE {
            let s = C64::new(x, pair.strip_bound(&p) + depth);
            prop_assert!(ff::closed_form_vs_quadrature(pair, s, &p).unwrap() < 1e-6);
        }
    }

    #[test]
    fn quadrature_refuses_points_below_strip(x in -1.0f64..1.0, below in 0.05f64..0.5) {
        let p = level_one();
        for pair in PairTag::TABLE {
            let (a, b) = pair.tags();
            let s = pair.strip_bound(&p) - below;
            let ea = ff::VertexExponent { tag: a, position: C64::new(x, s) };
            let eb = ff::VertexExponent { tag: b, position: C64::new(0.0, 0.0) };
            let r = ff::contraction_quadrature(&ea, &eb, &ff::default_contour(&p).unwrap(), &p);
            prop_assert!(matches!(r, Err(QalgError::StripViolation(_))));
        }
    }
}
