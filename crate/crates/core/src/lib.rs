//! Exact solution of the dimerized transverse-field Ising ring
//!
//! ```text
//! H = -Σ_j (σᶻ_j σᶻ_{j+1} + g_j σˣ_j),   g_j = g₁ (odd j), g₂ (even j)
//! ```
//!
//! with either a real staggered pair `(g₁, g₂)` or the complex conjugate pair
//! `g₁ = η − iξ`, `g₂ = η + iξ`. After Jordan–Wigner and a two-sublattice Fourier
//! transform each momentum block is a 4×4 Nambu matrix whose spectrum is known in
//! closed form. On top of that the crate provides ground-state energetics and phase
//! scans, the (θ, φ)-extended pseudo-spin picture with its Berry curvature, Chern
//! and winding numbers, and brute-force oracles (dense eigensolvers, real-space BdG
//! matrices and spin-chain exact diagonalization) that check all of it.

pub mod cli;
mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod phase;
pub mod spectral;
pub mod topology;

pub use error::{Error, Result};
pub use model::{bloch_matrix, realspace_matrix, BlochMatrix, FieldConfig, FieldKind, RealSpaceMatrix};
pub use num_complex::Complex64;
pub use phase::{classify, scan_energy, PhaseLabel, PhaseRegion, PhaseScanResult};
pub use spectral::{
    eigensystem, eigenvector_factor_diagnostic, ground_energy_density, pair_energy_sum,
    spectral_factors, EigenSystem, SpectralFactors,
};
pub use topology::{
    chern_analytic, chern_curvature, loop_trace, theta, two_level, ChernMethod, ChernResult,
    LoopTrace, Quantized,
};
