#![allow(dead_code)]

use isingtop::oracle::{dense_eigenvalues, multiset_distance, sort_eigenvalues};
use isingtop::{bloch_matrix, spectral_factors, Complex64, FieldConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn real(g1: f64, g2: f64) -> FieldConfig {
    FieldConfig::real(g1, g2).unwrap()
}

pub fn complex(eta: f64, xi: f64) -> FieldConfig {
    FieldConfig::complex(eta, xi).unwrap()
}

/// g₁, g₂ uniform in [−3, 3].
pub fn random_real(rng: &mut ChaCha8Rng) -> FieldConfig {
    real(rng.gen_range(-3.0..=3.0), rng.gen_range(-3.0..=3.0))
}

/// η, ξ uniform in [−2, 2].
pub fn random_complex(rng: &mut ChaCha8Rng) -> FieldConfig {
    complex(rng.gen_range(-2.0..=2.0), rng.gen_range(-2.0..=2.0))
}

pub fn random_k(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.0..TAU)
}

/// Gapped configuration away from the boundary by at least `margin` in |p|, with a
/// real pair energy over the whole zone.
pub fn random_gapped(rng: &mut ChaCha8Rng, complex_kind: bool, margin: f64) -> FieldConfig {
    loop {
        let cfg = if complex_kind {
            random_complex(rng)
        } else {
            random_real(rng)
        };
        let p = cfg.product().abs();
        let real_pairs = isingtop::topology::check_real_pair_spectrum(&cfg, 512).is_ok();
        if (p - 1.0).abs() > margin && real_pairs {
            return cfg;
        }
    }
}

/// Largest distance between the closed-form eigenvalues and a dense eigensolve of h_k.
pub fn closed_form_vs_dense(cfg: &FieldConfig, k: f64) -> f64 {
    let mut closed: Vec<Complex64> = spectral_factors(cfg, k).values().to_vec();
    sort_eigenvalues(&mut closed);
    let dense = dense_eigenvalues(&bloch_matrix(cfg, k).to_dense()).unwrap();
    multiset_distance(&closed, &dense)
}
