use proptest::prelude::*;

use tunclock_core::barrier::BarrierProfile;
use tunclock_core::clock::{phase_budget, reference_budget, PerturbationSet};
use tunclock_core::design::{differential_phase, runs_to_resolve};
use tunclock_core::units::{from_dimensionless, to_dimensionless, ShapeKind, HBAR};
use tunclock_core::{clock, presets, rect, transfer, DimensionlessPoint};

fn point() -> impl Strategy<Value = DimensionlessPoint> {
    (1e-3..20.0f64, 1e-2..15.0f64).prop_map(|(e, v)| DimensionlessPoint::new(e, v).unwrap())
}

proptest! {
    #[test]
    fn closed_form_is_unitary(p in point()) {
        let s = rect::amplitude(p);
        prop_assert!(s.unitarity_defect() < 1e-12);
        prop_assert!((s.transmission - rect::mean_transmission(p)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&s.transmission));
    }

    #[test]
    fn delay_is_positive_and_mass_coefficient_negative(p in point()) {
        let tau = rect::scaled_tunneling_time(p);
        prop_assert!(tau > 0.0 && tau.is_finite());
        prop_assert_eq!(rect::phi_m(p), -tau);
        prop_assert!(rect::phi_p(p).is_finite());
    }

    #[test]
    fn scaled_coordinates_round_trip(p in point(), v0_exp in -33.0..-28.0f64) {
        let rb = presets::rb87();
        let v0 = 10f64.powf(v0_exp);
        for shape in [ShapeKind::Rectangular, ShapeKind::Gaussian] {
            let (mom, len) = from_dimensionless(p, v0, &rb, shape).unwrap();
            let barrier = match shape {
                ShapeKind::Rectangular => BarrierProfile::rectangular(v0, len).unwrap(),
                ShapeKind::Gaussian => BarrierProfile::gaussian(v0, len).unwrap(),
            };
            let back = to_dimensionless(mom, &barrier, &rb).unwrap();
            prop_assert!((back.e_bar() / p.e_bar() - 1.0).abs() < 1e-12);
            prop_assert!((back.v_bar() / p.v_bar() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn single_slab_matches_closed_form(p in point()) {
        let rb = presets::rb87();
        let v0 = presets::rb_gaussian_height();
        let (mom, a) = from_dimensionless(p, v0, &rb, ShapeKind::Rectangular).unwrap();
        let d = transfer::decompose(&BarrierProfile::rectangular(v0, a).unwrap(), 1).unwrap();
        let m = rb.mean_mass();
        let tm = transfer::amplitude(&d, mom * mom / (2.0 * m), m).unwrap();
        let cf = rect::amplitude(p);
        prop_assert!((tm.t.norm() / cf.t.norm() - 1.0).abs() < 1e-11);
        prop_assert!((tm.t * cf.t.conj()).arg().abs() < 1e-11);
    }

    #[test]
    fn differential_phase_keeps_only_barrier_terms(
        p in point(),
        dm in -5e-4..5e-4f64,
        dp in -5e-4..5e-4f64,
        dv in -5e-4..5e-4f64,
        t in 0.0..2.0f64,
    ) {
        let yb = presets::yb174();
        let mom = presets::yb_momentum();
        let per = PerturbationSet::new(dm, dp, dv).unwrap();
        let larmor = dv * clock::barrier_height(p, mom, &yb) / HBAR;
        let tunnel = phase_budget(p, mom, t, &yb, &per, larmor).unwrap();
        let reference = reference_budget(-mom, t, &yb, &per).unwrap();
        let d = differential_phase(&tunnel, &reference).unwrap();
        let barrier_only = tunnel.tunnel + tunnel.larmor + (tunnel.doppler - reference.doppler);
        prop_assert!((d - barrier_only).abs() <= 1e-15 * barrier_only.abs().max(1e-300) * 4.0);
    }

    #[test]
    fn run_count_decreases(phase in 1e-8..1.0f64, atoms in 1.0..1e6f64) {
        let a = runs_to_resolve(phase, atoms).unwrap().runs_required;
        prop_assert!(a >= 1);
        prop_assert!(runs_to_resolve(phase * 2.0, atoms).unwrap().runs_required <= a);
        prop_assert!(runs_to_resolve(phase, atoms * 2.0).unwrap().runs_required <= a);
    }

    #[test]
    fn unwrap_lands_within_half_turn(prev in -50.0..50.0f64, raw in -3.1..3.1f64) {
        let u = rect::unwrap_phase(prev, raw);
        prop_assert!((u - prev).abs() <= std::f64::consts::PI + 1e-12);
        let turns = (u - raw) / std::f64::consts::TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reciprocal_on_random_profiles(
        heights in prop::collection::vec(0.0..1.0f64, 3..8),
        e in 0.1..3.0f64,
    ) {
        let v0 = presets::rb_gaussian_height();
        let n = heights.len();
        let mut samples = vec![(0.0, 0.0)];
        samples.extend(heights.iter().enumerate().map(|(i, h)| ((i + 1) as f64 * 0.3e-6, (0.05 + h) * v0)));
        samples.push(((n + 1) as f64 * 0.3e-6, 0.0));
        let profile = BarrierProfile::tabulated(samples).unwrap();
        let m = presets::rb87().mean_mass();
        let d = transfer::decompose(&profile, 256).unwrap();
        let energy = e * profile.peak_height();
        let left = transfer::amplitude(&d, energy, m).unwrap();
        let right = transfer::amplitude(&d.mirrored(), energy, m).unwrap();
        prop_assert!((left.transmission - right.transmission).abs() < 1e-10);
        prop_assert!(left.unitarity_defect() < 1e-10);
    }
}
