mod common;

use common::*;
use isingtop::topology::{
    angle_track, berry_connection, berry_connection_closed_form, berry_curvature,
    berry_curvature_plaquette, is_boundary, theta_derivative, InnerProduct,
};
use isingtop::{
    chern_analytic, chern_curvature, loop_trace, theta, two_level, ChernMethod, Error,
    FieldConfig, Quantized,
};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

fn real_table() -> Vec<(FieldConfig, Quantized)> {
    vec![
        (real(0.5, 1.0), Quantized::One),
        (real(-0.5, 1.0), Quantized::One),
        (real(2.0, 1.0), Quantized::Zero),
        (real(-2.0, 1.0), Quantized::Zero),
        (real(1.0, 1.0), Quantized::Half),
    ]
}

fn complex_table() -> Vec<(FieldConfig, Quantized)> {
    vec![
        (complex(0.5, 0.3), Quantized::One),
        (complex(0.5, 0.5), Quantized::One),
        (complex(1.0, 1.0), Quantized::Zero),
        (complex(0.6, 0.8), Quantized::Half),
    ]
}

#[test]
fn theta_values() {
    assert!((theta(&real(0.0, 3.0), FRAC_PI_2).unwrap() - FRAC_PI_2).abs() < 1e-15);
    assert_eq!(theta(&real(0.5, 1.0), 0.0).unwrap(), 0.0);
    assert!(matches!(theta(&real(1.0, 1.0), 0.0), Err(Error::OriginHit { .. })));
}

#[test]
fn chern_tables_both_methods() {
    for (cfg, want) in real_table().into_iter().chain(complex_table()) {
        let a = chern_analytic(&cfg, 512).unwrap();
        let c = chern_curvature(&cfg, 512, 256).unwrap();
        assert_eq!(a.method, ChernMethod::AnalyticWinding);
        assert_eq!(c.method, ChernMethod::CurvatureGrid);
        for r in [a, c] {
            assert_eq!(r.snapped, want, "{cfg}: {r:?}");
            assert!(r.residual < 1e-3, "{cfg}: {r:?}");
            assert_eq!(r.boundary, want == Quantized::Half);
        }
    }
}

#[test]
fn winding_equals_chern() {
    for (cfg, want) in real_table().into_iter().chain(complex_table()) {
        let t = loop_trace(&cfg, 512).unwrap();
        assert_eq!(t.snapped(), want, "{cfg}");
        assert_eq!(t.boundary, want == Quantized::Half);
        assert_eq!(t.encloses_origin, want == Quantized::One);
        if !t.boundary {
            assert!((t.winding - t.winding.round()).abs() < 1e-3);
            assert!(t.closure_gap() < 1e-9);
        }
    }
}

#[test]
fn boundary_loop_still_emits_trace() {
    let t = loop_trace(&complex(0.6, 0.8), 512).unwrap();
    assert_eq!(t.winding, 0.5);
    assert_eq!(t.samples.len(), 511);
}

#[test]
fn curvature_grid_is_stable_under_refinement() {
    let mut rng = rng(41);
    for kind in [false, true] {
        for _ in 0..3 {
            let cfg = random_gapped(&mut rng, kind, 0.05);
            let coarse = chern_curvature(&cfg, 512, 256).unwrap().raw;
            let fine = chern_curvature(&cfg, 1024, 512).unwrap().raw;
            assert!((coarse - fine).abs() < 1e-4, "{cfg}: {coarse} vs {fine}");
        }
    }
}

#[test]
fn analytic_and_curvature_agree_on_random_configs() {
    let mut rng = rng(42);
    for kind in [false, true] {
        for _ in 0..10 {
            let cfg = random_gapped(&mut rng, kind, 0.02);
            let a = chern_analytic(&cfg, 512).unwrap();
            let c = chern_curvature(&cfg, 512, 256).unwrap();
            assert_eq!(a.snapped, c.snapped, "{cfg}");
            let want = if cfg.product().abs() < 1.0 { Quantized::One } else { Quantized::Zero };
            assert_eq!(a.snapped, want, "{cfg}");
        }
    }
}

#[test]
fn dirac_and_biorthonormal_agree_at_zero_xi() {
    for eta in [0.3, 0.9, 1.5] {
        let a = chern_curvature(&complex(eta, 0.0), 512, 256).unwrap().raw;
        let b = chern_curvature(&real(eta, eta), 512, 256).unwrap().raw;
        assert!((a - b).abs() < 1e-6);
        let a = chern_analytic(&complex(eta, 0.0), 512).unwrap().raw;
        let b = chern_analytic(&real(eta, eta), 512).unwrap().raw;
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn angle_track_has_small_steps() {
    let mut rng = rng(43);
    for _ in 0..20 {
        let cfg = random_real(&mut rng);
        if is_boundary(&cfg) {
            continue;
        }
        let t = angle_track(&cfg, 256).unwrap();
        for w in t.theta.windows(2) {
            assert!((w[1] - w[0]).abs() < FRAC_PI_2);
        }
        assert!((t.total_change / TAU - (t.total_change / TAU).round()).abs() < 1e-9);
    }
}

#[test]
fn two_level_spectrum() {
    let cfg = real(0.5, 1.0);
    for &(k, phi) in &[(0.3, 0.2), (2.0, FRAC_PI_2), (5.0, 3.0)] {
        let sys = two_level(&cfg, k, phi).unwrap();
        let pair = isingtop::pair_energy_sum(&cfg, k).re;
        assert!((sys.b_norm - 2.0 * pair.abs()).abs() < 1e-12);
        let e = (phi.cos().powi(2) + sys.b_norm.powi(2) * phi.sin().powi(2)).sqrt();
        assert!((sys.eps[0] + e).abs() < 1e-12 && (sys.eps[1] - e).abs() < 1e-12);
        let m = sys.matrix;
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!(tr.norm() < 1e-14);
        assert!((det.re + e * e).abs() < 1e-10 && det.im.abs() < 1e-12);
    }
    // |B_k| = 8 for vanishing field: ε₊₊ + ε₊₋ = −4
    let sys = two_level(&real(0.0, 0.0), 1.0, FRAC_PI_2).unwrap();
    assert!((sys.b_norm - 8.0).abs() < 1e-14);
    assert!((sys.eps[1] - 8.0).abs() < 1e-14);
}

#[test]
fn lower_state_normalization() {
    let sys = two_level(&complex(0.5, 0.3), 1.2, 0.7).unwrap();
    for product in [InnerProduct::Dirac, InnerProduct::Biorthonormal] {
        let s = sys.lower_state(product).unwrap();
        let d = s.left[0] * s.right[0] + s.left[1] * s.right[1];
        assert!((d.re - 1.0).abs() < 1e-12 && d.im.abs() < 1e-12);
        assert!(s.right[0].im.abs() < 1e-15 && s.right[0].re >= 0.0);
    }
}

fn interior_grid(n: usize) -> impl Iterator<Item = (f64, f64)> {
    (0..n).flat_map(move |i| {
        (0..n).map(move |j| {
            (
                TAU * (i as f64 + 0.5) / n as f64,
                PI * (j as f64 + 0.5) / n as f64,
            )
        })
    })
}

#[test]
fn connection_closed_form_matches_numeric() {
    let mut rng = rng(44);
    for kind in [false, true] {
        let cfg = random_gapped(&mut rng, kind, 0.1);
        for (k, phi) in interior_grid(8) {
            let n = berry_connection(&cfg, k, phi).unwrap();
            let c = berry_connection_closed_form(&cfg, k, phi).unwrap();
            assert!((n.a_k - c.a_k).norm() < 1e-6 * (1.0 + c.a_k.norm()), "{cfg} {k} {phi}");
            assert!(n.a_phi.norm() < 1e-8, "{cfg} {k} {phi}: {}", n.a_phi);
        }
    }
}

#[test]
fn curvature_closed_form_matches_plaquette() {
    let mut rng = rng(45);
    for kind in [false, true] {
        let cfg = random_gapped(&mut rng, kind, 0.1);
        for (k, phi) in interior_grid(8) {
            let a = berry_curvature(&cfg, k, phi).unwrap();
            let b = berry_curvature_plaquette(&cfg, k, phi).unwrap();
            assert!((a - b).abs() <= 1e-5 * a.abs(), "{cfg} {k} {phi}: {a} vs {b}");
        }
    }
}

#[test]
fn curvature_integrates_to_theta_derivative() {
    // ∫₀^π Ω dφ = −θ'(k)
    let cfg = real(0.4, 1.1);
    for k in [0.3, 1.7, 4.0] {
        let n = 20_000;
        let h = PI / n as f64;
        let integral: f64 = (0..n)
            .map(|j| berry_curvature(&cfg, k, (j as f64 + 0.5) * h).unwrap())
            .sum::<f64>()
            * h;
        assert!((integral + theta_derivative(&cfg, k).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn broken_regime_is_rejected() {
    let cfg = complex(0.0, 1.5);
    assert!(matches!(chern_curvature(&cfg, 512, 256), Err(Error::ComplexSpectrum { .. })));
    assert!(matches!(loop_trace(&cfg, 512), Err(Error::ComplexSpectrum { .. })));
}

#[test]
fn grid_preconditions() {
    let cfg = real(0.5, 1.0);
    assert!(matches!(chern_analytic(&cfg, 255), Err(Error::InvalidGrid(_))));
    assert!(matches!(chern_curvature(&cfg, 256, 127), Err(Error::InvalidGrid(_))));
    assert!(matches!(loop_trace(&cfg, 100), Err(Error::InvalidGrid(_))));
}

#[test]
fn curvature_is_thread_count_independent() {
    let cfg = complex(0.5, 0.3);
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| chern_curvature(&cfg, 512, 256).unwrap());
    let parallel = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| chern_curvature(&cfg, 512, 256).unwrap());
    assert_eq!(serial.raw.to_bits(), parallel.raw.to_bits());
}
