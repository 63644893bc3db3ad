mod common;

use common::*;
use isingtop::oracle::{dense_eigenvalues, multiset_distance};
use isingtop::{bloch_matrix, realspace_matrix, Complex64, Error, FieldConfig, FieldKind};
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn config_construction() {
    let r = FieldConfig::new(FieldKind::Real, 1.0, 1.0).unwrap();
    assert_eq!(r, real(1.0, 1.0));
    assert_eq!(r.product(), 1.0);
    let z = FieldConfig::new(FieldKind::Complex, 0.6, 0.8).unwrap();
    assert!((z.product() - 1.0).abs() < 1e-15);
    let (g1, g2) = z.fields();
    assert_eq!((g1, g2), (c(0.6, -0.8), c(0.6, 0.8)));
    assert!(matches!(
        FieldConfig::new(FieldKind::Real, f64::INFINITY, 0.0),
        Err(Error::NonFiniteParameter { .. })
    ));
    assert!(matches!(
        FieldConfig::complex(0.0, f64::NAN),
        Err(Error::NonFiniteParameter { .. })
    ));
}

#[test]
fn bloch_zero_field_at_origin() {
    let h = bloch_matrix(&real(0.0, 0.0), 0.0).entries;
    for (i, row) in h.iter().enumerate() {
        assert_eq!(row[i], c(0.0, 0.0));
    }
    assert_eq!(h[0][1], c(-2.0, 0.0));
    assert_eq!(h[1][0], c(-2.0, 0.0));
    for (i, j) in [(0, 3), (1, 2), (2, 1), (3, 0)] {
        assert_eq!(h[i][j], c(0.0, 0.0));
    }
}

#[test]
fn bloch_entries_at_zone_edge() {
    let h = bloch_matrix(&real(1.0, 2.0), PI).entries;
    let diag: Vec<f64> = (0..4).map(|i| h[i][i].re).collect();
    assert_eq!(diag, vec![4.0, 2.0, -4.0, -2.0]);
    assert!(h[0][1].norm() < 1e-15 && h[2][3].norm() < 1e-15);
    assert!((h[0][3] - c(0.0, -2.0)).norm() < 1e-15);
    assert!((h[3][0] - c(0.0, 2.0)).norm() < 1e-15);
}

#[test]
fn real_field_is_hermitian() {
    let mut rng = rng(11);
    for _ in 0..100 {
        let cfg = random_real(&mut rng);
        let b = bloch_matrix(&cfg, random_k(&mut rng));
        assert!(b.max_diff(&b.adjoint()) < 1e-12);
    }
}

#[test]
fn complex_adjoint_flips_xi() {
    let mut rng = rng(12);
    for _ in 0..100 {
        let cfg = random_complex(&mut rng);
        let k = random_k(&mut rng);
        let (eta, xi) = cfg.params();
        let lhs = bloch_matrix(&cfg, k).adjoint();
        let rhs = bloch_matrix(&complex(eta, -xi), k);
        assert!(lhs.max_diff(&rhs) < 1e-12);
    }
    let k = 0.37;
    let lhs = bloch_matrix(&complex(1.0, 1.0), k).adjoint();
    assert!(lhs.max_diff(&bloch_matrix(&complex(1.0, -1.0), k)) < 1e-12);
}

#[test]
fn momentum_is_reduced() {
    let cfg = real(0.3, -1.2);
    let a = bloch_matrix(&cfg, 0.5);
    let b = bloch_matrix(&cfg, 0.5 + 4.0 * PI);
    assert!(a.max_diff(&b) < 1e-12);
}

#[test]
fn realspace_guards_size() {
    assert!(matches!(
        realspace_matrix(&real(1.0, 1.0), 1),
        Err(Error::SizeTooSmall { .. })
    ));
    let m = realspace_matrix(&real(1.0, 1.0), 3).unwrap();
    assert_eq!(m.dim(), 12);
    assert_eq!(m.num_sites(), 6);
}

#[test]
fn realspace_zero_field_matches_two_momenta() {
    let cfg = real(0.0, 0.0);
    let rs = dense_eigenvalues(&realspace_matrix(&cfg, 2).unwrap().matrix).unwrap();
    let mut union = dense_eigenvalues(&bloch_matrix(&cfg, 0.0).to_dense()).unwrap();
    union.extend(dense_eigenvalues(&bloch_matrix(&cfg, PI).to_dense()).unwrap());
    assert!(multiset_distance(&rs, &union) < 1e-9);
}

#[test]
fn realspace_spectrum_is_particle_hole_symmetric() {
    let mut rng = rng(13);
    let mut configs = vec![real(1.0, 1.0), complex(0.5, 0.3)];
    configs.extend((0..4).map(|_| random_real(&mut rng)));
    configs.extend((0..4).map(|_| random_complex(&mut rng)));
    for cfg in configs {
        let ev = dense_eigenvalues(&realspace_matrix(&cfg, 4).unwrap().matrix).unwrap();
        let neg: Vec<Complex64> = ev.iter().map(|z| -z).collect();
        assert!(multiset_distance(&ev, &neg) < 1e-10, "{cfg}");
    }
}

#[test]
fn bloch_spectrum_closed_under_negation() {
    let mut rng = rng(14);
    for i in 0..40 {
        let cfg = if i % 2 == 0 {
            random_real(&mut rng)
        } else {
            random_complex(&mut rng)
        };
        let ev = dense_eigenvalues(&bloch_matrix(&cfg, random_k(&mut rng)).to_dense()).unwrap();
        let neg: Vec<Complex64> = ev.iter().map(|z| -z).collect();
        assert!(multiset_distance(&ev, &neg) < 1e-10, "{cfg}");
    }
}

#[test]
fn lerp_rejects_mixed_kinds() {
    let a = real(0.0, 1.0);
    assert_eq!(a.lerp(&complex(1.0, 1.0), 0.5), Err(Error::MixedFieldKinds));
    assert_eq!(a.lerp(&real(2.0, 3.0), 0.5).unwrap(), real(1.0, 2.0));
}

#[test]
fn config_serde_round_trip() {
    for cfg in [real(-0.5, 2.0), complex(0.6, 0.8)] {
        let s = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<FieldConfig>(&s).unwrap(), cfg);
    }
}
