//! Energy scans along straight rays in parameter space and the phase labels I/II.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::FieldConfig;
use crate::spectral::ground_energy_density;
use crate::{Error, Result};

pub const MIN_SAMPLES: usize = 64;
pub const DEFAULT_SAMPLES: usize = 301;
pub const DEFAULT_Z: f64 = 8.0;
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseLabel {
    I,
    II,
    Boundary,
}

impl std::fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PhaseLabel::I => "I",
            PhaseLabel::II => "II",
            PhaseLabel::Boundary => "Boundary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRegion {
    pub label: PhaseLabel,
    pub p: f64,
}

/// Region I inside `|p| = 1`, region II outside.
pub fn classify(config: &FieldConfig) -> PhaseRegion {
    let p = config.product();
    let label = if (p.abs() - 1.0).abs() <= BOUNDARY_TOL {
        PhaseLabel::Boundary
    } else if p.abs() < 1.0 {
        PhaseLabel::I
    } else {
        PhaseLabel::II
    };
    PhaseRegion { label, p }
}

/// Straight segment `start + t·(end − start)`, `t ∈ [0, 1]`, sampled uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub start: FieldConfig,
    pub end: FieldConfig,
    pub samples: usize,
}

impl Ray {
    pub fn t(&self, i: usize) -> f64 {
        i as f64 / (self.samples - 1) as f64
    }

    pub fn at(&self, i: usize) -> Result<FieldConfig> {
        self.start.lerp(&self.end, self.t(i))
    }

    /// Euclidean length in the `(a, b)` parameter plane.
    pub fn length(&self) -> f64 {
        let (a0, b0) = self.start.params();
        let (a1, b1) = self.end.params();
        (a1 - a0).hypot(b1 - b0)
    }

    pub fn spacing(&self) -> f64 {
        self.length() / (self.samples - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub index: usize,
    pub t: f64,
    pub config: FieldConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseScanResult {
    pub ray: Ray,
    pub num_k: usize,
    pub z: f64,
    pub energies: Vec<f64>,
    /// d²E/ds² with s the arc length along the ray.
    pub second_derivative: Vec<f64>,
    /// `|d²E_i − (d²E_{i−1} + d²E_{i+1})/2|`: how far each second difference sticks out
    /// of its neighbours. This is the quantity the spike threshold applies to.
    pub excess: Vec<f64>,
    pub threshold: f64,
    pub criticals: Vec<CriticalPoint>,
}

impl PhaseScanResult {
    pub fn configs(&self) -> impl Iterator<Item = FieldConfig> + '_ {
        (0..self.ray.samples).map(|i| self.ray.at(i).expect("ray endpoints share a kind"))
    }
}

pub fn scan_energy(
    start: &FieldConfig,
    end: &FieldConfig,
    samples: usize,
    num_k: usize,
) -> Result<PhaseScanResult> {
    scan_energy_with(start, end, samples, num_k, DEFAULT_Z)
}

/// [`scan_energy`] with an explicit spike threshold `z` (in MADs above the median).
pub fn scan_energy_with(
    start: &FieldConfig,
    end: &FieldConfig,
    samples: usize,
    num_k: usize,
    z: f64,
) -> Result<PhaseScanResult> {
    start.validate()?;
    end.validate()?;
    if start.kind() != end.kind() {
        return Err(Error::MixedFieldKinds);
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidGrid(format!(
            "samples = {samples} < {MIN_SAMPLES}"
        )));
    }
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::NonFiniteParameter { name: "z", value: z });
    }
    let ray = Ray {
        start: *start,
        end: *end,
        samples,
    };
    if ray.length() == 0.0 {
        return Err(Error::InvalidGrid("start and end coincide".into()));
    }
    let energies = (0..samples)
        .into_par_iter()
        .map(|i| {
            ground_energy_density(&ray.at(i)?, num_k).map_err(|e| match e {
                Error::ComplexEnergy { k, imag, .. } => Error::ComplexEnergy {
                    k,
                    imag,
                    sample: Some(i),
                },
                other => other,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let second_derivative = second_differences(&energies, ray.spacing());
    let excess = local_excess(&second_derivative);
    let (threshold, peaks) = spikes(&excess, z);
    let criticals = peaks
        .into_iter()
        .map(|index| {
            Ok(CriticalPoint {
                index,
                t: ray.t(index),
                config: ray.at(index)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseScanResult {
        ray,
        num_k,
        z,
        energies,
        second_derivative,
        excess,
        threshold,
        criticals,
    })
}

/// Centered second differences, second-order one-sided stencils at the two ends.
fn second_differences(e: &[f64], h: f64) -> Vec<f64> {
    let n = e.len();
    let h2 = h * h;
    (0..n)
        .map(|i| match i {
            0 => (2.0 * e[0] - 5.0 * e[1] + 4.0 * e[2] - e[3]) / h2,
            i if i == n - 1 => (2.0 * e[i] - 5.0 * e[i - 1] + 4.0 * e[i - 2] - e[i - 3]) / h2,
            i => (e[i + 1] - 2.0 * e[i] + e[i - 1]) / h2,
        })
        .collect()
}

/// Deviation of each value from the mean of its two neighbours. Only centered second
/// differences enter; the two outermost samples on each side repeat the nearest value. A smooth background, however steep, contributes O(h²) while a kink
/// or log cusp stands out by orders of magnitude.
fn local_excess(d: &[f64]) -> Vec<f64> {
    let n = d.len();
    (0..n)
        .map(|i| {
            let j = i.clamp(2, n - 3);
            (d[j] - 0.5 * (d[j - 1] + d[j + 1])).abs()
        })
        .collect()
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Indices where `|d|` exceeds `median + z·MAD`. A run of consecutive exceedances is one
/// feature and contributes its largest element, provided that element is an interior
/// maximum: a run still rising into either end of the scan (a boundary lying beyond the
/// ray, or a steep approach to it) cannot be localized and is dropped.
fn spikes(d: &[f64], z: f64) -> (f64, Vec<usize>) {
    let mut mags: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let med = median(&mut mags.clone());
    let mut dev: Vec<f64> = mags.iter().map(|m| (m - med).abs()).collect();
    let mad = median(&mut dev);
    let threshold = med + z * mad;
    mags.iter_mut().for_each(|m| {
        if !m.is_finite() {
            *m = f64::INFINITY
        }
    });
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < mags.len() {
        if mags[i] > threshold {
            let mut best = i;
            while i < mags.len() && mags[i] > threshold {
                if mags[i] > mags[best] {
                    best = i;
                }
                i += 1;
            }
            if best > 2 && best + 3 < mags.len() {
                peaks.push(best);
            }
        } else {
            i += 1;
        }
    }
    (threshold, peaks)
}

/// `|E(p = 1 + δ) − E(p = 1 − δ)|` along the ray through `config` from the origin of the
/// parameter plane; the boundary crossing of that ray is at `|p| = 1`.
pub fn continuity_gap(config: &FieldConfig, delta: f64, num_k: usize) -> Result<f64> {
    let p = config.product().abs();
    if p == 0.0 {
        return Err(Error::InvalidGrid("ray through p = 0 never crosses the boundary".into()));
    }
    // p is quadratic in the ray scale
    let scaled = |target: f64| -> Result<FieldConfig> {
        let s = (target / p).sqrt();
        let (a, b) = config.params();
        FieldConfig::new(config.kind(), a * s, b * s)
    };
    let above = ground_energy_density(&scaled(1.0 + delta)?, num_k)?;
    let below = ground_energy_density(&scaled(1.0 - delta)?, num_k)?;
    Ok((above - below).abs())
}
