use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::DenseMatrix;
use crate::model::FieldConfig;
use crate::{Error, Result};

pub const MAX_SITES_HERMITIAN: usize = 12;
pub const MAX_SITES_NON_HERMITIAN: usize = 8;

/// Periodic spin ring with per-site transverse fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinChainSpec {
    pub num_sites: usize,
    pub fields: Vec<Complex64>,
}

impl SpinChainSpec {
    /// Ring of `2·n_cells` sites with the staggered pattern g₁, g₂, g₁, … (site 1 is odd).
    pub fn from_config(config: &FieldConfig, n_cells: usize) -> Result<Self> {
        config.validate()?;
        let (g1, g2) = config.fields();
        let num_sites = 2 * n_cells;
        let spec = Self {
            num_sites,
            fields: (0..num_sites).map(|i| if i % 2 == 0 { g1 } else { g2 }).collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn is_hermitian(&self) -> bool {
        self.fields.iter().all(|g| g.im == 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_sites < 2 || !self.num_sites.is_multiple_of(2) {
            return Err(Error::SizeTooSmall {
                n_cells: self.num_sites / 2,
                min: 1,
            });
        }
        if self.fields.len() != self.num_sites {
            return Err(Error::Dimension(format!(
                "{} fields for {} sites",
                self.fields.len(),
                self.num_sites
            )));
        }
        let limit = if self.is_hermitian() {
            MAX_SITES_HERMITIAN
        } else {
            MAX_SITES_NON_HERMITIAN
        };
        if self.num_sites > limit {
            return Err(Error::TooLarge {
                dim: 1 << self.num_sites,
                limit: 1 << limit,
            });
        }
        Ok(())
    }
}

/// Dense `−Σ_j (σᶻ_j σᶻ_{j+1} + g_j σˣ_j)` on the periodic ring.
///
/// Basis index bit `j` is 0 for σᶻ = +1 and 1 for σᶻ = −1.
pub fn spin_hamiltonian(spec: &SpinChainSpec) -> Result<DenseMatrix> {
    spec.validate()?;
    let l = spec.num_sites;
    let dim = 1usize << l;
    let mut h = DenseMatrix::zeros(dim)?;
    let spin = |s: usize, j: usize| if (s >> j) & 1 == 0 { 1.0 } else { -1.0 };
    for s in 0..dim {
        let zz: f64 = (0..l).map(|j| spin(s, j) * spin(s, (j + 1) % l)).sum();
        h[(s, s)] = Complex64::new(-zz, 0.0);
        for (j, g) in spec.fields.iter().enumerate() {
            h[(s ^ (1 << j), s)] -= *g;
        }
    }
    Ok(h)
}
