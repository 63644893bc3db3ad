//! Field configurations, the 4×4 Bloch–Nambu matrix `h_k` and the real-space BdG matrix.
//!
//! `h_k` is stored in full (all entries twice the half-matrix often quoted), so its
//! eigenvalues are directly the quasiparticle energies `−ρ·ε_σ`. Basis order is
//! `(α_k, β_k, α₋ₖ†, β₋ₖ†)`, α living on even sites (field g₂) and β on odd sites
//! (field g₁).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::linalg::DenseMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Real,
    Complex,
}

/// Staggered transverse field.
///
/// `Complex { eta, xi }` stands for `g₁ = η − iξ`, `g₂ = η + iξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldConfig {
    Real { g1: f64, g2: f64 },
    Complex { eta: f64, xi: f64 },
}

fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteParameter { name, value })
    }
}

impl FieldConfig {
    pub fn new(kind: FieldKind, a: f64, b: f64) -> Result<Self> {
        match kind {
            FieldKind::Real => Self::real(a, b),
            FieldKind::Complex => Self::complex(a, b),
        }
    }

    pub fn real(g1: f64, g2: f64) -> Result<Self> {
        Ok(FieldConfig::Real {
            g1: finite("g1", g1)?,
            g2: finite("g2", g2)?,
        })
    }

    pub fn complex(eta: f64, xi: f64) -> Result<Self> {
        Ok(FieldConfig::Complex {
            eta: finite("eta", eta)?,
            xi: finite("xi", xi)?,
        })
    }

    /// Re-checks a value that may have been built directly from the enum variants.
    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.params();
        let (na, nb) = match self.kind() {
            FieldKind::Real => ("g1", "g2"),
            FieldKind::Complex => ("eta", "xi"),
        };
        finite(na, a)?;
        finite(nb, b)?;
        Ok(())
    }

    pub fn kind(&self) -> FieldKind {
        match self {
            FieldConfig::Real { .. } => FieldKind::Real,
            FieldConfig::Complex { .. } => FieldKind::Complex,
        }
    }

    /// The two raw parameters, `(g₁, g₂)` or `(η, ξ)`.
    pub fn params(&self) -> (f64, f64) {
        match *self {
            FieldConfig::Real { g1, g2 } => (g1, g2),
            FieldConfig::Complex { eta, xi } => (eta, xi),
        }
    }

    /// The site fields `(g₁, g₂)` as complex numbers.
    pub fn fields(&self) -> (Complex64, Complex64) {
        match *self {
            FieldConfig::Real { g1, g2 } => (Complex64::new(g1, 0.0), Complex64::new(g2, 0.0)),
            FieldConfig::Complex { eta, xi } => (Complex64::new(eta, -xi), Complex64::new(eta, xi)),
        }
    }

    /// Control parameter `p`: `g₁g₂` for real fields, `η² + ξ²` for complex ones.
    pub fn product(&self) -> f64 {
        match *self {
            FieldConfig::Real { g1, g2 } => g1 * g2,
            FieldConfig::Complex { eta, xi } => eta * eta + xi * xi,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        match *self {
            FieldConfig::Real { .. } => true,
            FieldConfig::Complex { xi, .. } => xi == 0.0,
        }
    }

    /// Configuration whose Bloch matrix is the conjugate transpose of this one's
    /// (ξ → −ξ, i.e. g₁ ↔ g₂ for the complex field).
    pub fn adjoint(&self) -> Self {
        match *self {
            FieldConfig::Real { .. } => *self,
            FieldConfig::Complex { eta, xi } => FieldConfig::Complex { eta, xi: -xi },
        }
    }

    /// Linear interpolation `(1−t)·self + t·other`; both must be the same kind.
    pub fn lerp(&self, other: &Self, t: f64) -> Result<Self> {
        if self.kind() != other.kind() {
            return Err(Error::MixedFieldKinds);
        }
        let (a0, b0) = self.params();
        let (a1, b1) = other.params();
        Self::new(self.kind(), a0 + t * (a1 - a0), b0 + t * (b1 - b0))
    }
}

impl std::fmt::Display for FieldConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldConfig::Real { g1, g2 } => write!(f, "Real{{g1={g1}, g2={g2}}}"),
            FieldConfig::Complex { eta, xi } => write!(f, "Complex{{eta={eta}, xi={xi}}}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochMatrix {
    /// Momentum reduced to `[0, 2π)`.
    pub k: f64,
    pub entries: [[Complex64; 4]; 4],
}

impl BlochMatrix {
    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_array(&self.entries)
    }

    pub fn adjoint(&self) -> Self {
        let mut entries = self.entries;
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = self.entries[j][i].conj();
            }
        }
        Self { k: self.k, entries }
    }

    /// Largest entrywise distance to another matrix.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        worst
    }
}

pub fn reduce_momentum(k: f64) -> f64 {
    let r = k.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// The Nambu matrix `h_k` of the momentum block at `k`.
pub fn bloch_matrix(config: &FieldConfig, k: f64) -> BlochMatrix {
    let k = reduce_momentum(k);
    let (g1, g2) = config.fields();
    let zero = Complex64::new(0.0, 0.0);
    let hop = Complex64::new(-2.0 * (k / 2.0).cos(), 0.0);
    let pair = Complex64::new(0.0, 2.0 * (k / 2.0).sin());
    let entries = [
        [2.0 * g2, hop, zero, -pair],
        [hop, 2.0 * g1, -pair, zero],
        [zero, pair, -2.0 * g2, -hop],
        [pair, zero, -hop, -2.0 * g1],
    ];
    BlochMatrix { k, entries }
}

/// BdG matrix of the ring in the basis `(c₁…c₂N, c₁†…c₂N†)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealSpaceMatrix {
    pub n_cells: usize,
    pub matrix: DenseMatrix,
}

impl RealSpaceMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn num_sites(&self) -> usize {
        2 * self.n_cells
    }
}

/// Real-space BdG matrix `[[A, B], [−B, −Aᵀ]]` of the fermionic ring with `N` unit cells.
///
/// `A_jj = 2g_j`, nearest-neighbour hopping `−1` and antisymmetric pairing `B_{j,j+1} = −1`.
/// The closing bond carries the same sign as the bulk (periodic fermions), so the spectrum
/// is the union of the `h_k` spectra over `k = 2πm/N`; the Jordan–Wigner parity term is
/// dropped.
pub fn realspace_matrix(config: &FieldConfig, n_cells: usize) -> Result<RealSpaceMatrix> {
    const MIN_CELLS: usize = 2;
    if n_cells < MIN_CELLS {
        return Err(Error::SizeTooSmall {
            n_cells,
            min: MIN_CELLS,
        });
    }
    config.validate()?;
    let sites = 2 * n_cells;
    let (g1, g2) = config.fields();
    let mut m = DenseMatrix::zeros(2 * sites)?;
    let one = Complex64::new(1.0, 0.0);
    for i in 0..sites {
        // site j = i + 1; odd j carries g₁
        let g = if i % 2 == 0 { g1 } else { g2 };
        m[(i, i)] = 2.0 * g;
        m[(sites + i, sites + i)] = -2.0 * g;
        let j = (i + 1) % sites;
        // A block (and −Aᵀ)
        m[(i, j)] -= one;
        m[(j, i)] -= one;
        m[(sites + i, sites + j)] += one;
        m[(sites + j, sites + i)] += one;
        // B block: B_ij = −1, B_ji = +1; lower-left is B† = −B
        m[(i, sites + j)] -= one;
        m[(j, sites + i)] += one;
        m[(sites + i, j)] += one;
        m[(sites + j, i)] -= one;
    }
    Ok(RealSpaceMatrix { n_cells, matrix: m })
}
