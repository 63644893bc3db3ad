//! Closed-form quasiparticle spectrum of `h_k`, numerical biorthonormal eigensystems and
//! the ground-state energy density.
//!
//! With `A = [(g₁²−g₂²)² + 4g₁² + 8g₁g₂cos k + 4g₂²]^{1/2}` and
//! `ε_σ = √2·√(g₁²+g₂²+σA+2)`, the four eigenvalues of `h_k` are `ε_ρσ = −ρ·ε_σ`.
//! For the complex field the same expressions are evaluated at `g₁ = η−iξ`, `g₂ = η+iξ`
//! using principal square roots.
//!
//! Pair-energy convention: the ground state fills both `ρ = +` modes, so each momentum
//! block contributes `ε₊₊ + ε₊₋ = −(ε₊ + ε₋)`. For the complex field this is the direct
//! substitution of the complex fields into the real-field result, i.e. the term
//! `2(η²−ξ²)+2` under the outer root (not `η²−ξ²+1`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{SQRT_2, TAU};

use crate::linalg::{fix_phase, inner, norm};
use crate::model::{bloch_matrix, FieldConfig};
use crate::{Error, Result};

/// Default number of momentum points for energy quadratures.
pub const DEFAULT_NUM_K: usize = 2001;
/// Eigenvalues closer than this are treated as coincident.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Largest imaginary part of the pair energy accepted as real.
pub const IMAG_TOL: f64 = 1e-8;

const NULL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralFactors {
    pub a: Complex64,
    pub eps_plus: Complex64,
    pub eps_minus: Complex64,
}

impl SpectralFactors {
    pub fn eps(&self, sigma: i8) -> Complex64 {
        if sigma > 0 {
            self.eps_plus
        } else {
            self.eps_minus
        }
    }

    /// Eigenvalue `−ρ·ε_σ`.
    pub fn value(&self, rho: i8, sigma: i8) -> Complex64 {
        -f64::from(rho.signum()) * self.eps(sigma)
    }

    /// The four eigenvalues in mode order (+,+), (+,−), (−,+), (−,−).
    pub fn values(&self) -> [Complex64; 4] {
        MODES.map(|(rho, sigma)| self.value(rho, sigma))
    }
}

/// Mode labels `(ρ, σ)` in storage order.
pub const MODES: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// `A²` without taking the root.
pub fn a_squared(config: &FieldConfig, k: f64) -> Complex64 {
    let (g1, g2) = config.fields();
    let d = g1 * g1 - g2 * g2;
    d * d + 4.0 * g1 * g1 + 8.0 * g1 * g2 * k.cos() + 4.0 * g2 * g2
}

pub fn spectral_factors(config: &FieldConfig, k: f64) -> SpectralFactors {
    match *config {
        FieldConfig::Real { g1, g2 } => {
            let a2 = a_squared(config, k).re;
            let a = a2.max(0.0).sqrt();
            let base = g1 * g1 + g2 * g2 + 2.0;
            let ep = SQRT_2 * (base + a).max(0.0).sqrt();
            let em = SQRT_2 * (base - a).max(0.0).sqrt();
            SpectralFactors {
                a: Complex64::new(a, 0.0),
                eps_plus: Complex64::new(ep, 0.0),
                eps_minus: Complex64::new(em, 0.0),
            }
        }
        FieldConfig::Complex { .. } => {
            let (g1, g2) = config.fields();
            let a = a_squared(config, k).sqrt();
            let base = g1 * g1 + g2 * g2 + 2.0;
            SpectralFactors {
                a,
                eps_plus: SQRT_2 * (base + a).sqrt(),
                eps_minus: SQRT_2 * (base - a).sqrt(),
            }
        }
    }
}

/// Factors along a momentum scan with branch continuation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchScan {
    pub k: Vec<f64>,
    pub factors: Vec<SpectralFactors>,
    /// Indices where two candidate branches were equally close (branch collision).
    pub collisions: Vec<usize>,
}

/// Evaluates [`spectral_factors`] along `ks`, flipping the sign of `A` and of each `ε_σ`
/// whenever the flipped value is the nearer continuation of the previous sample.
pub fn spectral_factors_scan(config: &FieldConfig, ks: &[f64]) -> BranchScan {
    let mut factors: Vec<SpectralFactors> = Vec::with_capacity(ks.len());
    let mut collisions = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let mut f = spectral_factors(config, k);
        if let Some(prev) = factors.last() {
            let mut collided = false;
            let mut pick = |cur: Complex64, prev: Complex64| {
                let keep = (cur - prev).norm();
                let flip = (-cur - prev).norm();
                if cur.norm() > 1e-12 && (keep - flip).abs() <= 1e-12 * (1.0 + prev.norm()) {
                    collided = true;
                }
                if flip < keep {
                    -cur
                } else {
                    cur
                }
            };
            let a = pick(f.a, prev.a);
            if a != f.a {
                // A → −A exchanges the two σ branches
                std::mem::swap(&mut f.eps_plus, &mut f.eps_minus);
                f.a = a;
            }
            f.eps_plus = pick(f.eps_plus, prev.eps_plus);
            f.eps_minus = pick(f.eps_minus, prev.eps_minus);
            if collided {
                collisions.push(i);
            }
        }
        factors.push(f);
    }
    BranchScan {
        k: ks.to_vec(),
        factors,
        collisions,
    }
}

/// `ε₊₊ + ε₊₋ = −(ε₊ + ε₋)` at momentum `k`.
pub fn pair_energy_sum(config: &FieldConfig, k: f64) -> Complex64 {
    let f = spectral_factors(config, k);
    -(f.eps_plus + f.eps_minus)
}

/// Ground-state energy per site,
/// `E_g/2N = (1/2N) Σ_{k≥0} (ε₊₊+ε₊₋) → (1/8π) ∫₀^{2π} (ε₊₊+ε₊₋) dk`,
/// by the periodic trapezoid rule on `num_k` points of `[0, 2π)`.
///
/// The `k ≥ 0` half of the zone counts each `(k, −k)` pair once; the result agrees with
/// spin-chain exact diagonalization (−1 per site for vanishing field).
pub fn ground_energy_density(config: &FieldConfig, num_k: usize) -> Result<f64> {
    if num_k < 16 {
        return Err(Error::InvalidGrid(format!("num_k = {num_k} < 16")));
    }
    config.validate()?;
    let mut total = 0.0;
    for m in 0..num_k {
        let k = TAU * m as f64 / num_k as f64;
        let s = pair_energy_sum(config, k);
        if s.im.abs() > IMAG_TOL {
            return Err(Error::ComplexEnergy {
                k,
                imag: s.im,
                sample: None,
            });
        }
        total += s.re;
    }
    Ok(total / (4.0 * num_k as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenMode {
    pub rho: i8,
    pub sigma: i8,
    pub value: Complex64,
    pub right: [Complex64; 4],
    /// Row vector with `left_i · right_j = δ_ij` (plain bilinear product).
    pub left: [Complex64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    pub k: f64,
    pub modes: [EigenMode; 4],
}

impl EigenSystem {
    pub fn mode(&self, rho: i8, sigma: i8) -> &EigenMode {
        self.modes
            .iter()
            .find(|m| m.rho == rho && m.sigma == sigma)
            .expect("all four (ρ, σ) labels are present")
    }

    /// `max_ij |left_i · right_j − δ_ij|`
    pub fn biorthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, mi) in self.modes.iter().enumerate() {
            for (j, mj) in self.modes.iter().enumerate() {
                let d: Complex64 = mi.left.iter().zip(&mj.right).map(|(l, r)| l * r).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - target).norm());
            }
        }
        worst
    }

    /// `max |Σ_i right_i ⊗ left_i − I|`
    pub fn completeness_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                let s: Complex64 = self.modes.iter().map(|m| m.right[a] * m.left[b]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

fn degenerate(k: f64, values: &[Complex64]) -> Error {
    let mut v: Vec<(f64, f64)> = values.iter().map(|z| (z.re, z.im)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Error::DegenerateMode { k, values: v }
}

/// Biorthonormal eigensystem of `h_k` built on the closed-form eigenvalues.
///
/// Right vectors span `ker(h_k − ε)`, left vectors `ker(h_k† − ε*)` with `h_k†` built as
/// the ξ-flipped configuration. Each right vector has unit norm and its largest component
/// real positive; left rows are scaled so that `left_i · right_i = 1`. For Hermitian
/// configurations the left rows are the conjugated right vectors.
pub fn eigensystem(config: &FieldConfig, k: f64) -> Result<EigenSystem> {
    config.validate()?;
    let bloch = bloch_matrix(config, k);
    let h = bloch.to_dense();
    let h_adj = bloch_matrix(&config.adjoint(), k).to_dense();
    let f = spectral_factors(config, k);
    let values = f.values();
    for i in 0..4 {
        for j in i + 1..4 {
            if (values[i] - values[j]).norm() < DEGENERACY_TOL {
                return Err(degenerate(bloch.k, &values));
            }
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut modes = [EigenMode {
        rho: 0,
        sigma: 0,
        value: zero,
        right: [zero; 4],
        left: [zero; 4],
    }; 4];
    for (slot, (&(rho, sigma), &value)) in modes.iter_mut().zip(MODES.iter().zip(&values)) {
        let right_ker = h.shifted(value).null_space(NULL_TOL);
        let left_ker = h_adj.shifted(value.conj()).null_space(NULL_TOL);
        if right_ker.len() != 1 || left_ker.len() != 1 {
            return Err(degenerate(bloch.k, &values));
        }
        let mut right = right_ker[0].clone();
        fix_phase(&mut right);
        let ell = &left_ker[0];
        // ⟨ℓ|r⟩ vanishes at an exceptional point
        let overlap = inner(ell, &right);
        if overlap.norm() < DEGENERACY_TOL * norm(ell) * norm(&right) {
            return Err(degenerate(bloch.k, &values));
        }
        let left: Vec<Complex64> = ell.iter().map(|z| z.conj() / overlap).collect();
        *slot = EigenMode {
            rho,
            sigma,
            value,
            right: right.try_into().expect("4-vector"),
            left: left.try_into().expect("4-vector"),
        };
    }
    Ok(EigenSystem { k: bloch.k, modes })
}

/// The printed component factors of a mode, evaluated verbatim, and how well the
/// resulting vector `(η, ξ, −2g₁ sin k, Λ)` matches the numerical eigenspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvectorFactorDiagnostic {
    pub lambda: Complex64,
    pub eta_c: Complex64,
    pub xi_c: Complex64,
    /// `η² + ξ² + 4g₁²sin²k + Λ²` (squares without conjugation, as printed).
    pub omega: Complex64,
    /// Squared norm of the projection of the normalized printed vector onto the numeric
    /// eigenspace; 0 when the printed vector vanishes.
    pub agreement: f64,
}

pub fn eigenvector_factor_diagnostic(
    config: &FieldConfig,
    k: f64,
    rho: i8,
    sigma: i8,
) -> Result<EigenvectorFactorDiagnostic> {
    config.validate()?;
    let bloch = bloch_matrix(config, k);
    let k = bloch.k;
    let f = spectral_factors(config, k);
    let values = f.values();
    let eps = f.eps(sigma);
    if eps.norm() < DEGENERACY_TOL {
        return Err(degenerate(k, &values));
    }
    let (g1, g2) = config.fields();
    let (rho_f, sigma_f) = (f64::from(rho.signum()), f64::from(sigma.signum()));
    let i = Complex64::new(0.0, 1.0);
    let (s2, c2) = ((k / 2.0).sin(), (k / 2.0).cos());
    let lambda = s2 * ((g1 - g2) * (g1 - g2) + sigma_f * f.a + rho_f * eps * (g1 - g2));
    let eta_c = -i
        * (2.0 * g1 * k.cos()
            + 2.0 * g2
            + (rho_f * eps - 2.0 * g2) / 2.0 * (g1 * g1 - g2 * g2 - sigma_f * f.a));
    let xi_c = i * c2 * ((g1 + g2) * (g1 + g2) + sigma_f * f.a - rho_f * eps * (g1 + g2));
    let third = -2.0 * g1 * k.sin();
    let omega = eta_c * eta_c + xi_c * xi_c + 4.0 * g1 * g1 * k.sin().powi(2) + lambda * lambda;

    let value = -rho_f * eps;
    let basis = bloch.to_dense().shifted(value).null_space(NULL_TOL);
    let multiplicity = values
        .iter()
        .filter(|v| (*v - value).norm() < DEGENERACY_TOL)
        .count();
    if basis.is_empty() || basis.len() < multiplicity {
        // defective: exceptional point
        return Err(degenerate(k, &values));
    }
    let printed = [eta_c, xi_c, third, lambda];
    let pn = norm(&printed);
    let agreement = if pn < 1e-12 {
        0.0
    } else {
        let unit: Vec<Complex64> = printed.iter().map(|z| z / pn).collect();
        basis
            .iter()
            .map(|b| inner(b, &unit).norm_sqr())
            .sum::<f64>()
            .min(1.0)
    };
    Ok(EigenvectorFactorDiagnostic {
        lambda,
        eta_c,
        xi_c,
        omega,
        agreement,
    })
}
