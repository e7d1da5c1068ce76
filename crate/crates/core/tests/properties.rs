use proptest::prelude::*;
use sgn_core::assembly::{assemble_b, QuadratureFields};
use sgn_core::diagnostics::convergence_rate;
use sgn_core::fem::{l2_project, Family, FunctionSpace, Mesh, Trace};
use sgn_core::{AssemblyContext, Bathymetry, ContextOptions, SgnState};

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::P1), Just(Family::P2), Just(Family::S3)]
}

fn context(family: Family, n: usize, bath: Bathymetry) -> AssemblyContext {
    let mesh = Mesh::uniform(-4.0, 4.0, n).unwrap();
    let sh = FunctionSpace::new(mesh.clone(), family, Trace::Free).unwrap();
    let su = FunctionSpace::new(mesh, family, Trace::ZeroAtEnds).unwrap();
    AssemblyContext::new(sh, su, bath, ContextOptions::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lake_at_rest_on_sinusoidal_bottoms(
        fam in family(),
        n in 8usize..40,
        depth in 0.3f64..2.0,
        amp in 0.0f64..0.25,
        k in 0.2f64..2.0,
    ) {
        let ctx = context(fam, n, Bathymetry::sinusoidal(-depth, amp * depth, k));
        let state = SgnState::still_water(&ctx);
        let mut f = QuadratureFields::default();
        ctx.fields(state.h.values(), state.u.values(), &mut f);
        let curv = ctx.curvature_values(&f).unwrap();
        let worst = ctx
            .continuity_load(&f)
            .iter()
            .chain(&ctx.momentum_load(&f, &curv))
            .fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(worst < 1e-12, "max load {worst:e}");
    }

    #[test]
    fn b_is_spd_for_positive_depth(
        fam in family(),
        n in 8usize..40,
        depth in 0.2f64..2.0,
        ratio in 0.0f64..0.9,
        k in 0.3f64..3.0,
    ) {
        let ctx = context(fam, n, Bathymetry::sinusoidal(-depth, 0.1 * depth, 0.7));
        let h = l2_project(|x| depth * (1.0 + ratio * (k * x).sin()), ctx.space_h(), ctx.rule()).unwrap();
        let b = assemble_b(&ctx, &h).unwrap();
        let mut v = vec![0.0; b.order()];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = ((i * 7 + 3) % 11) as f64 - 5.0;
        }
        let bv = b.mul_vec(&v);
        let quad: f64 = v.iter().zip(&bv).map(|(a, c)| a * c).sum();
        prop_assert!(quad > 0.0);
        for i in 0..b.order() {
            for j in 0..b.order() {
                prop_assert_eq!(b.get(i, j), b.get(j, i));
            }
        }
    }

    #[test]
    fn still_water_energy_vanishes_and_waves_carry_energy(
        fam in family(),
        n in 8usize..30,
        depth in 0.5f64..2.0,
        a in 0.01f64..0.3,
    ) {
        let ctx = context(fam, n, Bathymetry::flat(depth));
        let rest = SgnState::still_water(&ctx);
        prop_assert!(ctx.energy(&rest).abs() < 1e-12);
        let h = l2_project(|x| depth + a * (-x * x).exp(), ctx.space_h(), ctx.rule()).unwrap();
        let wave = SgnState::new(h, rest.u.clone(), 0.0);
        prop_assert!(ctx.energy(&wave) > 0.0);
    }

    #[test]
    fn projection_reproduces_the_family_polynomials(
        fam in family(),
        n in 4usize..20,
        c in proptest::array::uniform4(-2.0f64..2.0),
    ) {
        let mesh = Mesh::uniform(0.0, 1.0, n).unwrap();
        let space = FunctionSpace::new(mesh, fam, Trace::Free).unwrap();
        let rule = sgn_core::fem::QuadratureRule::gauss_legendre(fam.default_quadrature_nodes()).unwrap();
        let deg = fam.degree();
        let p = |x: f64| (0..=deg).map(|k| c[k] * x.powi(k as i32)).sum::<f64>();
        let v = l2_project(p, &space, &rule).unwrap();
        for i in 0..=10 {
            let x = i as f64 / 10.0;
            prop_assert!((v.eval(x, 0).unwrap() - p(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn rate_of_power_law_errors(p in 0.5f64..5.0, c in 1e-6f64..10.0, dx in 1e-3f64..0.1) {
        let r = convergence_rate(c * (2.0 * dx).powf(p), c * dx.powf(p), 2.0 * dx, dx).unwrap();
        prop_assert!((r - p).abs() < 1e-9);
    }
}
