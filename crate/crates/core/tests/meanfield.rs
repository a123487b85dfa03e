use num_complex::Complex64;
use proptest::prelude::*;
use theta_reset::bifurcation::{
    analyze_family, find_equilibrium, jacobian_fd, ContinuationParam, ContinuationSettings,
    MeanFieldFamily,
};
use theta_reset::meanfield::{
    firing_rate, rhs_finite, rhs_infinite, rhs_polar, MeanFieldState2, MeanFieldState4, PolarState,
};
use theta_reset::ode::{integrate, settle, Rk4};
use theta_reset::{MeanFieldSystem, ModelParams, Reduction, ResetRate};

/// Complex-form oracle: ż = −i(z−1)²/2 + (z+1)²(iB − Δ)/2 with the
/// pulse average computed from ⟨cos θ⟩ = Re z, ⟨cos 2θ⟩ = Re z².
fn oracle_infinite(z: Complex64, p: &ModelParams) -> Complex64 {
    let i = Complex64::i();
    let mean_pulse = (2.0 / 3.0) * (1.5 - 2.0 * z.re + 0.5 * (z * z).re);
    let pinned = (2.0 / 3.0) * 4.0;
    let b = p.eta0 + p.coupling_k * (p.gamma * pinned + (1.0 - p.gamma) * mean_pulse);
    -i * (z - 1.0).powi(2) / 2.0 + (z + 1.0).powi(2) * (i * b - p.delta) / 2.0
}

fn oracle_jacobian(z: Complex64, p: &ModelParams) -> [[f64; 2]; 2] {
    let i = Complex64::i();
    let mean_pulse = (2.0 / 3.0) * (1.5 - 2.0 * z.re + 0.5 * (z * z).re);
    let b = p.eta0 + p.coupling_k * (p.gamma * 8.0 / 3.0 + (1.0 - p.gamma) * mean_pulse);
    let w = i * b - p.delta;
    let db_dx = p.coupling_k * (1.0 - p.gamma) * (2.0 / 3.0) * (z.re - 2.0);
    let db_dy = -p.coupling_k * (1.0 - p.gamma) * (2.0 / 3.0) * z.im;
    let h = (z + 1.0).powi(2) / 2.0;
    let fx = -i * (z - 1.0) + (z + 1.0) * w + h * i * db_dx;
    let fy = (z - 1.0) + i * (z + 1.0) * w + h * i * db_dy;
    [[fx.re, fy.re], [fx.im, fy.im]]
}

fn interior_point() -> impl Strategy<Value = Complex64> {
    (0.0..0.999f64, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

fn params() -> impl Strategy<Value = ModelParams> {
    (-10.0..10.0f64, -10.0..10.0f64, 0.0..=1.0f64, 0.01..1.0f64)
        .prop_map(|(e, k, g, d)| ModelParams::new(e, k, g).with_delta(d))
}

proptest! {
    #[test]
    fn infinite_field_matches_complex_oracle(z in interior_point(), p in params()) {
        let d = rhs_infinite(&MeanFieldState2 { x_nr: z.re, y_nr: z.im }, &p);
        let o = oracle_infinite(z, &p);
        prop_assert!((d.x_nr - o.re).abs() < 1e-10 && (d.y_nr - o.im).abs() < 1e-10);
    }

    #[test]
    fn polar_matches_cartesian_by_chain_rule(
        r in 1e-6..0.999f64,
        psi in 0.0..std::f64::consts::TAU,
        p in params(),
    ) {
        let z = Complex64::from_polar(r, psi);
        let c = rhs_infinite(&MeanFieldState2 { x_nr: z.re, y_nr: z.im }, &p);
        let pol = rhs_polar(&PolarState { r_nr: r, psi_nr: psi }, &p).unwrap();
        // ẋ = ṙ cos ψ − r ψ̇ sin ψ, ẏ = ṙ sin ψ + r ψ̇ cos ψ
        let (s, co) = psi.sin_cos();
        let xdot = pol.r_nr * co - r * pol.psi_nr * s;
        let ydot = pol.r_nr * s + r * pol.psi_nr * co;
        let scale = 1.0 + c.x_nr.abs().max(c.y_nr.abs());
        prop_assert!((xdot - c.x_nr).abs() < 1e-10 * scale, "{} vs {}", xdot, c.x_nr);
        prop_assert!((ydot - c.y_nr).abs() < 1e-10 * scale, "{} vs {}", ydot, c.y_nr);
    }

    #[test]
    fn finite_blocks_follow_oracle(
        zr in interior_point(),
        zn in interior_point(),
        p in params(),
        lambda in 0.0..100.0f64,
    ) {
        let p = p.with_lambda(ResetRate::Finite(lambda));
        let s = MeanFieldState4 { x_r: zr.re, y_r: zr.im, x_nr: zn.re, y_nr: zn.im };
        let d = rhs_finite(&s, &p).unwrap();
        // shared drive: replace the pinned term by the reset block's pulse average
        let h = |z: Complex64| (2.0 / 3.0) * (1.5 - 2.0 * z.re + 0.5 * (z * z).re);
        let b = p.eta0 + p.coupling_k * (p.gamma * h(zr) + (1.0 - p.gamma) * h(zn));
        let i = Complex64::i();
        let block = |z: Complex64| -i * (z - 1.0).powi(2) / 2.0 + (z + 1.0).powi(2) * (i * b - p.delta) / 2.0;
        let or = block(zr) - lambda * (zr + 1.0);
        let on = block(zn);
        let tol = 1e-10 * (1.0 + lambda);
        prop_assert!((d.x_r - or.re).abs() < tol && (d.y_r - or.im).abs() < tol);
        prop_assert!((d.x_nr - on.re).abs() < 1e-10 && (d.y_nr - on.im).abs() < 1e-10);
    }

    #[test]
    fn fd_jacobian_matches_analytic(z in interior_point(), p in params()) {
        let sys = MeanFieldSystem::new(Reduction::Infinite, p).unwrap();
        let j = jacobian_fd(&sys.field(), &[z.re, z.im], 1e-6);
        let a = oracle_jacobian(z, &p);
        for r in 0..2 {
            for c in 0..2 {
                prop_assert!((j[(r, c)] - a[r][c]).abs() < 1e-6 * (1.0 + a[r][c].abs()),
                    "J[{}][{}] = {} vs {}", r, c, j[(r, c)], a[r][c]);
            }
        }
    }

    #[test]
    fn firing_rate_non_negative_on_disk(z in interior_point()) {
        prop_assert!(firing_rate(z).unwrap() >= 0.0);
    }

    #[test]
    fn polar_rim_is_not_outward(psi in 0.0..std::f64::consts::TAU, p in params()) {
        let d = rhs_polar(&PolarState { r_nr: 1.0, psi_nr: psi }, &p).unwrap();
        prop_assert!(d.r_nr <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn trajectories_stay_in_unit_disk(
        zr in interior_point(),
        zn in interior_point(),
        p in params(),
        lambda in 0.0..20.0f64,
        finite in any::<bool>(),
    ) {
        let (sys, mut state) = if finite {
            let p = p.with_lambda(ResetRate::Finite(lambda));
            (MeanFieldSystem::new(Reduction::Finite, p).unwrap(), vec![zr.re, zr.im, zn.re, zn.im])
        } else {
            (MeanFieldSystem::new(Reduction::Infinite, p).unwrap(), vec![zn.re, zn.im])
        };
        let mut rk = Rk4::new(state.len());
        let rhs = sys.field();
        for _ in 0..10_000 {
            rk.step(&rhs, &mut state, 0.01).unwrap();
            for c in state.chunks(2) {
                prop_assert!(c[0].hypot(c[1]) <= 1.0 + 1e-6, "|z| = {}", c[0].hypot(c[1]));
            }
        }
    }
}

#[test]
fn zero_rate_keeps_blocks_equal() {
    for (eta0, k, g, z0) in [
        (-2.0, 2.0, 0.5, Complex64::new(0.3, -0.2)),
        (1.0, -5.0, 0.2, Complex64::new(-0.6, 0.1)),
        (0.5, 10.0, 0.8, Complex64::new(0.0, 0.0)),
    ] {
        let p = ModelParams::new(eta0, k, g).with_lambda(ResetRate::Finite(0.0));
        let sys = MeanFieldSystem::new(Reduction::Finite, p).unwrap();
        let traj = integrate(&sys.field(), &[z0.re, z0.im, z0.re, z0.im], 100.0, 0.01, 1).unwrap();
        for s in &traj.states {
            assert!((s[0] - s[2]).abs() <= 1e-12 && (s[1] - s[3]).abs() <= 1e-12);
        }
    }
}

#[test]
fn pinned_field_is_never_an_equilibrium() {
    let p = ModelParams::new(0.3, -2.0, 0.4);
    let d = rhs_infinite(
        &MeanFieldState2 {
            x_nr: -1.0,
            y_nr: 0.0,
        },
        &p,
    );
    assert_eq!(d.x_nr, 0.0);
    assert_eq!(d.y_nr, -2.0);
}

#[test]
fn fold_equilibrium_has_reference_rate() {
    // at the lower fold (K=−2, γ=0) the rest equilibrium fires at 0.0133
    let sys =
        MeanFieldSystem::new(Reduction::Infinite, ModelParams::new(0.4464, -2.0, 0.0)).unwrap();
    let (s, _) = settle(&sys.field(), &[0.0, 0.0], 0.01, 1e-9, 5000.0);
    assert!((sys.f_nr(&s) - 0.0133).abs() < 1e-3, "f = {}", sys.f_nr(&s));
}

#[test]
fn large_rate_equilibria_approach_infinite_system() {
    let base = ModelParams::new(-1.0, 2.0, 0.5);
    let inf = MeanFieldSystem::new(Reduction::Infinite, base).unwrap();
    let fin =
        MeanFieldSystem::new(Reduction::Finite, base.with_lambda(ResetRate::Finite(1e6))).unwrap();
    for z0 in [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.4)] {
        let (a, _) = settle(&inf.field(), &[z0.re, z0.im], 0.01, 1e-10, 2000.0);
        let a = find_equilibrium(&inf.field(), &a, 1e-12).unwrap();
        // λ = 10⁶ amplifies rounding in the reset block residual
        let b = find_equilibrium(&fin.field(), &[-1.0, 0.0, a[0], a[1]], 1e-8).unwrap();
        assert!(
            (a[0] - b[2]).abs() < 1e-3 && (a[1] - b[3]).abs() < 1e-3,
            "{a:?} vs {b:?}"
        );
        assert!((b[0] + 1.0).abs() < 1e-3 && b[1].abs() < 1e-3);
    }
}

#[test]
fn lower_fold_moves_monotonically_with_rate() {
    let s = ContinuationSettings::default();
    let fold_lo = |lambda: ResetRate| {
        let p = ModelParams::new(0.0, 2.0, 0.5).with_lambda(lambda);
        let red = if lambda.is_infinite() {
            Reduction::Infinite
        } else {
            Reduction::Finite
        };
        let fam = MeanFieldFamily::new(red, p, ContinuationParam::Eta0).unwrap();
        let a = analyze_family(&fam, (-10.0, 10.0), &s).unwrap();
        // the fold bounding the rest branch from above (SN_l) has the lower rate
        a.folds
            .iter()
            .min_by(|x, y| x.f_nr.total_cmp(&y.f_nr))
            .map(|f| f.param("eta0").unwrap())
            .unwrap()
    };
    let bare = fold_lo(ResetRate::Finite(0.0));
    let seq: Vec<f64> = [0.01, 0.1, 1.0, 10.0, 1000.0]
        .into_iter()
        .map(|l| fold_lo(ResetRate::Finite(l)))
        .collect();
    let limit = fold_lo(ResetRate::Infinite);
    assert!((bare - -0.5730).abs() < 2e-3, "bare fold {bare}");
    assert!((limit - -2.9746).abs() < 2e-3, "limit fold {limit}");
    let mut prev = bare;
    for (v, l) in seq.iter().zip([0.01, 0.1, 1.0, 10.0, 1000.0]) {
        assert!(
            *v <= prev + 1e-9 && *v >= limit - 1e-3,
            "lambda {l}: {v} after {prev}"
        );
        prev = *v;
    }
}
