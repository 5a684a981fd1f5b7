use std::f64::consts::PI;

use proptest::prelude::*;
use thurston_willmore::experiments::{sweep, write_sweep_csv, SweepSpec};
use thurston_willmore::functional::{h_squared_identity_check, mean_curvature, nu_on_profile};
use thurston_willmore::profile::{first_integral, ModulatedSphere};
use thurston_willmore::{
    canonical_coefficients, energy, generate_cmc_sphere, integrate, perturbed_sphere, Execution,
    GeometryParams, PerturbationSpec, ProfileState, StopCondition,
};

const FOUR_PI: f64 = 4.0 * PI;

/// `(k, τ, H)` with `H² ≥ −k/4 + 0.05`.
fn admissible() -> impl Strategy<Value = (f64, f64, f64)> {
    (-1.5..1.5f64, -0.8..0.8f64, 0.0..1.0f64).prop_map(|(k, tau, x)| {
        let floor = (0.25 * (-k).max(0.0) + 0.05).sqrt();
        (k, tau, floor + x * (1.3 - floor).max(0.2))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn first_integral_is_conserved(k in -1.0..1.0f64, tau in -0.6..0.6f64, h in 0.3..1.2f64,
                                   u0 in 0.2..0.6f64, sigma0 in -1.0..2.5f64) {
        let g = GeometryParams::new(k, tau).unwrap();
        let start = ProfileState::new(0.0, u0, 0.0, sigma0);
        let stop = StopCondition::ArcLength(1.5);
        // Trajectories that run into the axis are discarded and redrawn.
        let result = integrate(&g, h, start, stop);
        prop_assume!(result.is_ok());
        let p = result.unwrap();
        prop_assert!(p.samples().len() > 10);
        let j0 = first_integral(&g, h, &p.samples()[0]);
        for s in p.samples() {
            prop_assert!((first_integral(&g, h, s) - j0).abs() < 1e-8);
        }
    }

    #[test]
    fn cmc_spheres_close_with_energy_four_pi((k, tau, h) in admissible()) {
        let g = GeometryParams::new(k, tau).unwrap();
        let p = generate_cmc_sphere(&g, h).unwrap();
        prop_assert!(p.is_closed());
        let first = p.samples()[0];
        let last = *p.samples().last().unwrap();
        prop_assert!(first.u.abs() < 1e-12 && last.u.abs() < 1e-5);
        prop_assert!((last.sigma - PI).abs() < 1e-7);
        prop_assert!((p.max_u() - 1.0 / h).abs() < 1e-9 / h);
        for s in p.samples() {
            prop_assert!((s.sigma.sin() - h * s.u).abs() < 1e-8);
        }
        let r = energy(&p, canonical_coefficients(&g)).unwrap();
        prop_assert!((r.e - FOUR_PI).abs() < 1e-6 * FOUR_PI);
        prop_assert!(r.first_summand.abs() < 1e-8);
    }

    #[test]
    fn mean_curvature_squared_identity(k in -1.0..1.0f64, tau in -0.8..0.8f64,
                                      x in 0.05..0.95f64, sigma in -PI..PI, sigma_dot in -3.0..3.0f64) {
        let g = GeometryParams::new(k, tau).unwrap();
        let u = x * g.domain_radius().as_f64().min(3.0);
        prop_assert!(h_squared_identity_check(&g, u, sigma, sigma_dot).unwrap() < 1e-12);
        prop_assert!(nu_on_profile(&g, u, sigma).abs() <= 1.0);
        let h = mean_curvature(&g, u, sigma, sigma_dot).unwrap();
        let flipped = mean_curvature(&g, u, -sigma, -sigma_dot).unwrap();
        prop_assert!((h + flipped).abs() < 1e-12 * (1.0 + h.abs()));
    }

    #[test]
    fn perturbations_keep_the_topological_part(eps in 0.02..0.3f64, mode in 1u32..3,
                                               (k, tau, h) in admissible()) {
        let g = GeometryParams::new(k, tau).unwrap();
        let c = canonical_coefficients(&g);
        let plus = energy(&perturbed_sphere(&g, h, PerturbationSpec::new(eps, mode).unwrap()).unwrap(), c).unwrap();
        let minus = energy(&perturbed_sphere(&g, h, PerturbationSpec::new(-eps, mode).unwrap()).unwrap(), c).unwrap();
        prop_assert!((plus.second_summand - FOUR_PI).abs() < 1e-6);
        prop_assert!(plus.e > FOUR_PI + 1e-7);
        prop_assert!((plus.e - minus.e).abs() < 1e-6);
    }

    #[test]
    fn modulated_family_keeps_the_apex_radius(h in 0.5..1.5f64, c1 in -0.3..0.3f64, c2 in -0.3..0.3f64) {
        let m = ModulatedSphere::new(GeometryParams::nil(), h, vec![(1, c1), (2, c2)]).unwrap();
        prop_assert!((m.u(PI / 2.0) - 1.0 / h).abs() < 1e-14);
        prop_assert!(m.u(PI).abs() < 1e-14);
        prop_assert!(m.ds_dsigma(0.7) > 0.0);
    }
}

#[test]
fn canonical_coefficients_of_the_named_geometries() {
    let table = [
        ((0.0, 0.5), (0.25, -1.0 / 16.0)),
        ((-1.0, -0.5), (0.25, -5.0 / 16.0)),
        ((1.0, 0.0), (0.25, 0.25)),
    ];
    for ((k, tau), (alpha, beta)) in table {
        let c = canonical_coefficients(&GeometryParams::new(k, tau).unwrap());
        assert_eq!((c.alpha, c.beta), (alpha, beta));
    }
}

#[test]
fn sweep_output_is_reproducible() {
    let spec = SweepSpec {
        k_values: vec![-1.0, 0.25],
        tau_values: vec![-0.5, 0.3],
        h_values: vec![0.4, 0.8],
        perturbation_grid: vec![PerturbationSpec::new(0.05, 2).unwrap()],
    };
    let render = |exec| {
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &sweep(&spec, exec)).unwrap();
        buf
    };
    let a = render(Execution::Parallel);
    assert_eq!(a, render(Execution::Parallel));
    assert_eq!(a, render(Execution::Sequential));
}
