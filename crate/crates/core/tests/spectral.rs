mod common;

use common::*;
use isingtop::spectral::{a_squared, spectral_factors_scan, DEFAULT_NUM_K};
use isingtop::{
    eigensystem, eigenvector_factor_diagnostic, ground_energy_density, pair_energy_sum,
    spectral_factors, Error,
};
use std::f64::consts::{PI, SQRT_2, TAU};

#[test]
fn factor_examples() {
    let f = spectral_factors(&real(0.0, 0.0), 1.3);
    assert!(f.a.norm() < 1e-15);
    assert!((f.eps_plus.re - 2.0).abs() < 1e-15 && (f.eps_minus.re - 2.0).abs() < 1e-15);

    let f = spectral_factors(&real(1.0, 1.0), PI);
    assert!(f.a.norm() < 1e-7);
    assert!((f.eps_plus.re - 2.0 * SQRT_2).abs() < 1e-7);
    assert!((f.eps_minus.re - 2.0 * SQRT_2).abs() < 1e-7);

    let f = spectral_factors(&real(1.0, 1.0), 0.0);
    assert!((f.a.re - 4.0).abs() < 1e-15);
    assert!((f.eps_plus.re - 4.0).abs() < 1e-15);
    assert!(f.eps_minus.norm() < 1e-15);
}

#[test]
fn a_squared_branch() {
    let mut rng = rng(21);
    for i in 0..200 {
        let cfg = if i % 2 == 0 {
            random_real(&mut rng)
        } else {
            random_complex(&mut rng)
        };
        let k = random_k(&mut rng);
        let f = spectral_factors(&cfg, k);
        let a2 = a_squared(&cfg, k);
        assert!((f.a * f.a - a2).norm() < 1e-10 * (1.0 + a2.norm()), "{cfg} {k}");
    }
}

#[test]
fn real_factors_are_real_and_non_negative() {
    let mut rng = rng(22);
    for _ in 0..200 {
        let cfg = random_real(&mut rng);
        let f = spectral_factors(&cfg, random_k(&mut rng));
        for z in [f.a, f.eps_plus, f.eps_minus] {
            assert!(z.im.abs() < 1e-12 && z.re >= 0.0);
        }
    }
}

#[test]
fn closed_form_matches_dense_solver() {
    let mut rng = rng(23);
    for i in 0..50 {
        let cfg = if i < 25 {
            random_real(&mut rng)
        } else {
            random_complex(&mut rng)
        };
        for m in 0..64 {
            let k = TAU * m as f64 / 64.0;
            let d = closed_form_vs_dense(&cfg, k);
            assert!(d < 1e-9, "{cfg} k={k}: {d}");
        }
    }
}

#[test]
fn complex_with_zero_xi_equals_real_pair() {
    for eta in [-1.7, -0.3, 0.4, 0.9, 1.5, 2.0] {
        for m in 0..32 {
            let k = TAU * m as f64 / 32.0;
            let a = spectral_factors(&complex(eta, 0.0), k).values();
            let b = spectral_factors(&real(eta, eta), k).values();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn pair_sum_examples() {
    assert!((pair_energy_sum(&real(0.0, 0.0), 0.8).re + 4.0).abs() < 1e-14);
    assert!((pair_energy_sum(&real(1.0, 1.0), PI).re + 4.0 * SQRT_2).abs() < 1e-7);
    assert!((pair_energy_sum(&complex(0.0, 0.0), 2.1) - pair_energy_sum(&real(0.0, 0.0), 2.1)).norm() < 1e-14);
}

#[test]
fn pair_sum_matches_printed_real_formula() {
    let mut rng = rng(24);
    for _ in 0..500 {
        let cfg = random_real(&mut rng);
        let (g1, g2) = cfg.params();
        let k = random_k(&mut rng);
        let root = ((g1 * g2 - k.cos()).powi(2) + k.sin().powi(2)).sqrt();
        let printed = -2.0 * (g1 * g1 + g2 * g2 + 2.0 + 2.0 * root).sqrt();
        let s = pair_energy_sum(&cfg, k);
        assert!((s.re - printed).abs() < 1e-10 && s.im.abs() < 1e-12);
    }
}

#[test]
fn energy_density_zero_field() {
    let e = ground_energy_density(&real(0.0, 0.0), DEFAULT_NUM_K).unwrap();
    assert!((e + 1.0).abs() < 1e-14);
}

/// Uniform transverse-field Ising chain, −(1/2π)∫√(1 + g² − 2g cos q) dq, by a fine
/// midpoint rule on its own single-band formula.
fn uniform_tfim(g: f64) -> f64 {
    let n = 200_000;
    let h = TAU / n as f64;
    -(0..n)
        .map(|i| {
            let q = (i as f64 + 0.5) * h;
            (1.0 + g * g - 2.0 * g * q.cos()).sqrt()
        })
        .sum::<f64>()
        * h
        / TAU
}

#[test]
fn energy_density_recovers_uniform_chain() {
    for g in [0.3, 0.8, 1.0, 2.0] {
        let e = ground_energy_density(&real(g, g), DEFAULT_NUM_K).unwrap();
        let tol = if g == 1.0 { 1e-6 } else { 1e-9 };
        assert!((e - uniform_tfim(g)).abs() < tol, "g={g}: {e} vs {}", uniform_tfim(g));
    }
}

#[test]
fn energy_density_guards() {
    assert!(matches!(
        ground_energy_density(&real(1.0, 1.0), 8),
        Err(Error::InvalidGrid(_))
    ));
    match ground_energy_density(&complex(0.0, 1.5), 256) {
        Err(Error::ComplexEnergy { imag, sample, .. }) => {
            assert!(imag.abs() > 1e-8);
            assert_eq!(sample, None);
        }
        other => panic!("expected ComplexEnergy, got {other:?}"),
    }
}

#[test]
fn energy_density_in_deep_complex_regime_is_real() {
    // recorded behaviour: Complex{2,2} keeps a real pair energy over the zone
    let e = ground_energy_density(&complex(2.0, 2.0), DEFAULT_NUM_K).unwrap();
    assert!(e.is_finite() && e < 0.0);
}

#[test]
fn eigensystem_zero_field_is_degenerate() {
    match eigensystem(&real(0.0, 0.0), 0.0) {
        Err(Error::DegenerateMode { values, .. }) => {
            let mut re: Vec<f64> = values.iter().map(|v| v.0).collect();
            re.sort_by(f64::total_cmp);
            for (x, y) in re.iter().zip([-2.0, -2.0, 2.0, 2.0]) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        other => panic!("expected DegenerateMode, got {other:?}"),
    }
    assert!(matches!(
        eigensystem(&real(1.0, 1.0), 0.0),
        Err(Error::DegenerateMode { .. })
    ));
}

#[test]
fn eigensystem_biorthonormal_for_complex_field() {
    let es = eigensystem(&complex(0.5, 0.3), 1.0).unwrap();
    assert!(es.biorthonormality_defect() < 1e-9);
    assert!(es.completeness_defect() < 1e-8);
    let f = spectral_factors(&complex(0.5, 0.3), 1.0);
    for m in &es.modes {
        assert!((m.value - f.value(m.rho, m.sigma)).norm() < 1e-9);
    }
}

#[test]
fn eigensystem_properties_random() {
    let mut rng = rng(25);
    let mut checked = 0;
    while checked < 40 {
        let cfg = if checked % 2 == 0 {
            random_real(&mut rng)
        } else {
            random_complex(&mut rng)
        };
        let k = random_k(&mut rng);
        let Ok(es) = eigensystem(&cfg, k) else { continue };
        assert!(es.biorthonormality_defect() < 1e-9, "{cfg} {k}");
        assert!(es.completeness_defect() < 1e-8, "{cfg} {k}");
        if cfg.is_hermitian() {
            for m in &es.modes {
                for (l, r) in m.left.iter().zip(&m.right) {
                    assert!((l - r.conj()).norm() < 1e-9);
                }
                assert!(m.value.im.abs() < 1e-10);
            }
        }
        checked += 1;
    }
}

#[test]
fn factor_diagnostic_is_report_only() {
    let d = eigenvector_factor_diagnostic(&real(0.0, 0.0), PI / 2.0, 1, 1).unwrap();
    assert!((0.0..=1.0 + 1e-12).contains(&d.agreement));
    let d = eigenvector_factor_diagnostic(&real(1.0, 2.0), 1.0, 1, -1).unwrap();
    assert!((0.0..=1.0 + 1e-12).contains(&d.agreement));
    assert!(matches!(
        eigenvector_factor_diagnostic(&real(1.0, 1.0), 0.0, 1, -1),
        Err(Error::DegenerateMode { .. })
    ));
}

#[test]
fn branch_scan_is_continuous() {
    let ks: Vec<f64> = (0..400).map(|i| TAU * i as f64 / 400.0).collect();
    let scan = spectral_factors_scan(&complex(0.5, 0.3), &ks);
    for w in scan.factors.windows(2) {
        assert!((w[1].eps_plus - w[0].eps_plus).norm() < 0.2);
        assert!((w[1].eps_minus - w[0].eps_minus).norm() < 0.2);
    }
}
