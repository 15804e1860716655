//! Known constants and worked examples checked against independent formulas.

mod common;

use kestenlab::amenability::{
    build_kesten_walk, cogrowth_series, folner_sequence, self_adjoint_check, spectral_radius_estimate,
    AmenabilityError, FolnerBudget, FolnerSet, KestenWalk, SpectralMethod,
};
use kestenlab::extension::{amenability_verdict, check_symmetry, ReturnMethod, VerdictKind};
use kestenlab::group::{ball, free_sphere_size, FiniteGroup, GroupElement, Homomorphism};
use kestenlab::potential::{normalize, partition_function, pressure_estimate, GibbsMeasure};
use kestenlab::{GroupSpec, Potential, Shift};

use common::*;

#[test]
fn srw_on_z_spectral_sequence() {
    let walk = KestenWalk::simple(GroupSpec::lattice(1)).unwrap();
    let est = spectral_radius_estimate(&walk, 60, SpectralMethod::Ball { radius: 61, cap: 1000 }).unwrap();
    for k in 1..=60u64 {
        let p = central_binomial(k) as f64 / 2f64.powi(2 * k as i32);
        let rel = (est.p_2k[k as usize - 1] - p).abs() / p;
        assert!(rel < 1e-12, "k={k} rel={rel:e}");
    }
    // amenable backend: rho_hat close to one
    assert!(1.0 - est.rho_hat[59] <= 0.12, "{}", est.rho_hat[59]);
}

#[test]
fn srw_on_free_group_stays_below_point_nine() {
    let walk = KestenWalk::simple(GroupSpec::free(2)).unwrap();
    let radial = spectral_radius_estimate(&walk, 60, SpectralMethod::Radial).unwrap();
    assert!(radial.rho_hat.iter().all(|&r| r <= 0.90));
    assert!(radial.rho_hat.windows(2).all(|w| w[1] >= w[0]));
    // the truncated convolution agrees while the ball holds the support
    let ball_est = spectral_radius_estimate(
        &walk,
        5,
        SpectralMethod::Ball {
            radius: 6,
            cap: 100_000,
        },
    )
    .unwrap();
    for k in 0..5 {
        assert!((ball_est.p_2k[k] - radial.p_2k[k]).abs() < 1e-15);
    }
    // p_2 = 1/4, p_4 = 7/64 by counting closed paths
    assert_eq!(radial.p_2k[0], 0.25);
    assert!((radial.p_2k[1] - 7.0 / 64.0).abs() < 1e-16);
}

#[test]
fn golden_mean_pressure_and_measure() {
    let g = Shift::golden_mean();
    let p = Potential::constant(&g, 0.0).unwrap();
    let est = pressure_estimate(&p, 0, 8..=16).unwrap();
    assert!((est.eigenvalue_pressure - 0.481_211_825_059_603_4).abs() < 1e-9);
    // Z_0^n is a Fibonacci number
    let (mut a, mut b) = (1u64, 1u64);
    for n in 1..=16 {
        let (na, nb) = (b, a + b);
        a = na;
        b = nb;
        assert!((partition_function(&p, 0, n) - (a as f64).ln()).abs() < 1e-12, "n={n}");
    }
    let mu = GibbsMeasure::new(&normalize(&p).unwrap()).unwrap();
    let expect = (5.0 + 5f64.sqrt()) / 10.0;
    assert!((mu.cylinder(&[0]).unwrap() - expect).abs() < 1e-12);
}

#[test]
fn f2_return_series_against_sphere_counts() {
    // r_n = p_n for the uniform walk; p_2 = 1/4 from 4 backtracks out of 16
    let f = f2_extension();
    let s = f.return_weight_series(6, ReturnMethod::Radial).unwrap();
    assert_eq!(s.sample(2).unwrap().r, 0.25);
    assert_eq!(free_sphere_size(2, 1), 4);
    let v = amenability_verdict(
        &f.return_weight_series(60, ReturnMethod::Radial).unwrap(),
        (20, 60),
        0.02,
        0.1,
    )
    .unwrap();
    assert_eq!(v.kind, VerdictKind::PressureDrop);
    assert!((v.rate - (3f64.sqrt() / 2.0).ln()).abs() <= 0.01);
}

#[test]
fn lamplighter_walk_self_adjoint_on_radius_four() {
    let ext = lamplighter_extension();
    let walk = build_kesten_walk(&ext, &[], 3, None).unwrap();
    assert_eq!(self_adjoint_check(&walk, 4, 1_000_000).unwrap(), 0.0);
    assert_eq!(walk.symmetry_defect(), 0.0);
}

#[test]
fn symmetric_configs_pass_symmetry_checks() {
    for ext in [z_extension(), z2_extension(), f2_extension(), lamplighter_extension()] {
        let dagger = ext.involution().unwrap().images().to_vec();
        let rep = check_symmetry(ext.shift(), &dagger, ext.group(), ext.cocycle().images());
        assert!(rep.all_pass(), "{:?}", rep.failures);
    }
}

#[test]
fn cogrowth_examples() {
    let trivial = Homomorphism::trivial(1, GroupSpec::lattice(0));
    let s = cogrowth_series(&trivial, 10, 100).unwrap();
    assert!(s.counts.iter().all(|&c| c == 2));
    let ab = cogrowth_series(&Homomorphism::abelianization(2), 4, 1000).unwrap();
    assert_eq!(ab.counts[1], 0);
    assert_eq!(ab.counts[3], 8);
    // 108 reduced words of length 4 in F_2
    assert_eq!(free_sphere_size(2, 4), 108);
    // finite quotient: growth exponent approaches log 3
    let d = GroupSpec::finite(FiniteGroup::cyclic(3));
    let hom = Homomorphism::new(2, d, vec![GroupElement::Finite(1), GroupElement::Finite(1)]).unwrap();
    let s = cogrowth_series(&hom, 30, 100).unwrap();
    assert!((s.exponent(30).unwrap() - 3f64.ln()).abs() < 0.05);
}

#[test]
fn folner_sequences() {
    let z = GroupSpec::lattice(1);
    let gens = z.standard_generators();
    let certs = folner_sequence(&z, &vec![gens.clone(); 3], &[0.5; 3], FolnerBudget::default()).unwrap();
    let sides: Vec<i64> = certs
        .iter()
        .map(|c| match c.set {
            FolnerSet::Box { side, .. } => side,
            FolnerSet::Explicit(_) => panic!("expected an interval"),
        })
        .collect();
    assert!(sides.windows(2).all(|w| w[0] < w[1]), "{sides:?}");
    for c in &certs {
        // an interval of length L moved by h loses min(|h|, L) points on each side
        let FolnerSet::Box { side, .. } = c.set else {
            unreachable!()
        };
        let closed: f64 =
            c.k.iter()
                .map(|h| match h {
                    GroupElement::Lattice(v) => 2.0 * v[0].abs().min(side) as f64 / side as f64,
                    _ => unreachable!(),
                })
                .sum();
        assert!((c.defect - closed).abs() < 1e-12);
        assert!(c.defect <= 0.5);
    }

    let z2 = GroupSpec::lattice(2);
    let gens = z2.standard_generators();
    let certs = folner_sequence(&z2, &vec![gens; 2], &[0.5; 2], FolnerBudget::default()).unwrap();
    assert!(certs.iter().all(|c| matches!(c.set, FolnerSet::Box { .. })));

    let f2 = GroupSpec::free(2);
    let err = folner_sequence(&f2, &[f2.standard_generators()], &[0.5], FolnerBudget::default()).unwrap_err();
    assert!(
        matches!(err, AmenabilityError::FolnerNotFound { stage: 1, .. }),
        "{err:?}"
    );
}

#[test]
fn ball_sizes_match_growth_formulas() {
    let f2 = GroupSpec::free(2);
    let b = ball(&f2, 5, &f2.standard_generators(), 10_000).unwrap();
    let expected: Vec<usize> = (0..=5).map(|n| free_sphere_size(2, n) as usize).collect();
    assert_eq!(b.sphere_sizes(), expected);
    let z2 = GroupSpec::lattice(2);
    let b = ball(&z2, 6, &z2.standard_generators(), 10_000).unwrap();
    // |B_r| = 2r^2 + 2r + 1 in the l^1 metric
    assert_eq!(b.len(), 2 * 36 + 12 + 1);
}
