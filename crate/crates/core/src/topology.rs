//! Pseudo-spin picture of each momentum block and its topological invariants.
//!
//! In the even-parity subspace {pair-excited, vacuum} of the two `ρ = +` modes the
//! block is a two-level system. Extending it by a polar angle φ gives the field
//!
//! ```text
//! B(θ, φ) = (|B_k| sin φ cos θ, |B_k| sin φ sin θ, cos φ),   |B_k| = 2|ε₊₊ + ε₊₋|,
//! tan θ(k) = sin k / (cos k − p),   p = g₁g₂ (real) or η² + ξ² (complex).
//! ```
//!
//! The lower state's Berry curvature over `(k, φ) ∈ [0, 2π] × [0, π]` integrates to a
//! multiple of the winding of θ(k). The invariant is oriented so that it equals `+1`
//! when the circle `(cos k − p, sin k)` encloses the origin (`|p| < 1`) and `0` when it
//! does not. Taken literally, `c = (1/2π)∬Ω_{kφ}` evaluates to `−Δθ/2π`, the opposite
//! sign; [`ChernResult::raw`] is reported in the table orientation. On the boundary
//! `|p| = 1` the circle passes through the origin and the principal-value winding on the
//! punctured circle gives `1/2`.
//!
//! Real fields use the Dirac inner product, complex fields the biorthonormal one (left
//! states solved independently from the adjoint problem). Invariants are only defined
//! while the pair energy stays real; the complex-field entry points check that first.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::linalg::{dot, norm};
use crate::model::{FieldConfig, FieldKind};
use crate::spectral::{pair_energy_sum, IMAG_TOL};
use crate::{Error, Result};

/// `||p| − 1|` below this counts as the phase boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Distance kept from the puncture when tracking θ on a boundary configuration.
pub const PUNCTURE_OFFSET: f64 = 1e-6;
pub const MIN_NK: usize = 256;
pub const MIN_NPHI: usize = 128;
pub const DEFAULT_NPHI: usize = 256;

const ORIGIN_TOL: f64 = 1e-12;
const GAP_TOL: f64 = 1e-9;
const CONNECTION_STEP: f64 = 5e-5;
const PLAQUETTE_STEP: f64 = 1e-3;

pub fn is_boundary(config: &FieldConfig) -> bool {
    (config.product().abs() - 1.0).abs() < BOUNDARY_TOL
}

/// Principal value of θ(k) = atan2(sin k, cos k − p).
pub fn theta(config: &FieldConfig, k: f64) -> Result<f64> {
    let p = config.product();
    let (x, y) = (k.cos() - p, k.sin());
    if x.hypot(y) < ORIGIN_TOL {
        return Err(Error::OriginHit { k, p });
    }
    Ok(y.atan2(x))
}

/// ∂θ/∂k = (1 − p cos k) / (1 − 2p cos k + p²).
pub fn theta_derivative(config: &FieldConfig, k: f64) -> Result<f64> {
    let p = config.product();
    let den = 1.0 - 2.0 * p * k.cos() + p * p;
    if den.sqrt() < ORIGIN_TOL {
        return Err(Error::OriginHit { k, p });
    }
    Ok((1.0 - p * k.cos()) / den)
}

/// θ' with the removable singularity at the boundary puncture filled by its limit 1/2.
fn theta_derivative_or_limit(config: &FieldConfig, k: f64) -> Result<f64> {
    match theta_derivative(config, k) {
        Err(Error::OriginHit { .. }) if is_boundary(config) => Ok(0.5),
        other => other,
    }
}

/// Continuously unwrapped θ along one turn of the momentum circle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AngleTrack {
    pub k_samples: Vec<f64>,
    pub theta: Vec<f64>,
    pub total_change: f64,
    /// True when the turn starts and ends next to the boundary puncture.
    pub punctured: bool,
}

fn wrap_angle(d: f64) -> f64 {
    let w = (d + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// θ along `n_k` uniform intervals, bisected wherever adjacent samples differ by π/2 or
/// more. On boundary configurations the turn runs from just after the puncture to just
/// before it.
pub fn angle_track(config: &FieldConfig, n_k: usize) -> Result<AngleTrack> {
    if n_k == 0 {
        return Err(Error::InvalidGrid("n_k = 0".into()));
    }
    let punctured = is_boundary(config);
    let (start, span) = if punctured {
        let k0 = if config.product() > 0.0 { 0.0 } else { PI };
        (k0 + PUNCTURE_OFFSET, TAU - 2.0 * PUNCTURE_OFFSET)
    } else {
        (0.0, TAU)
    };
    let mut ks = vec![start];
    let mut raw = vec![theta(config, start)?];
    for i in 1..=n_k {
        let b = start + span * i as f64 / n_k as f64;
        let a = *ks.last().unwrap();
        let ta = *raw.last().unwrap();
        let tb = theta(config, b)?;
        refine(config, (a, ta), (b, tb), 0, &mut ks, &mut raw)?;
    }
    let mut unwrapped = Vec::with_capacity(raw.len());
    unwrapped.push(raw[0]);
    for w in raw.windows(2) {
        let prev = *unwrapped.last().unwrap();
        unwrapped.push(prev + wrap_angle(w[1] - w[0]));
    }
    let total_change = unwrapped.last().unwrap() - unwrapped[0];
    Ok(AngleTrack {
        k_samples: ks,
        theta: unwrapped,
        total_change,
        punctured,
    })
}

fn refine(
    config: &FieldConfig,
    (a, ta): (f64, f64),
    (b, tb): (f64, f64),
    depth: u32,
    ks: &mut Vec<f64>,
    thetas: &mut Vec<f64>,
) -> Result<()> {
    if wrap_angle(tb - ta).abs() < FRAC_PI_2 || depth >= 64 || b - a <= f64::EPSILON * b.abs() {
        ks.push(b);
        thetas.push(tb);
        return Ok(());
    }
    let mid = 0.5 * (a + b);
    let tm = theta(config, mid)?;
    refine(config, (a, ta), (mid, tm), depth + 1, ks, thetas)?;
    refine(config, (mid, tm), (b, tb), depth + 1, ks, thetas)
}

/// Allowed values of the invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantized {
    Zero,
    Half,
    One,
}

impl Quantized {
    pub fn value(self) -> f64 {
        match self {
            Quantized::Zero => 0.0,
            Quantized::Half => 0.5,
            Quantized::One => 1.0,
        }
    }

    /// Nearest allowed value.
    pub fn snap(x: f64) -> Self {
        [Quantized::Zero, Quantized::Half, Quantized::One]
            .into_iter()
            .min_by(|a, b| (a.value() - x).abs().total_cmp(&(b.value() - x).abs()))
            .unwrap()
    }
}

impl Serialize for Quantized {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Quantized {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let x = f64::deserialize(d)?;
        match x {
            0.0 => Ok(Quantized::Zero),
            0.5 => Ok(Quantized::Half),
            1.0 => Ok(Quantized::One),
            other => Err(serde::de::Error::custom(format!(
                "{other} is not one of 0, 0.5, 1"
            ))),
        }
    }
}

impl std::fmt::Display for Quantized {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quantized::Zero => write!(f, "0"),
            Quantized::Half => write!(f, "1/2"),
            Quantized::One => write!(f, "1"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChernMethod {
    AnalyticWinding,
    CurvatureGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernResult {
    pub raw: f64,
    pub snapped: Quantized,
    pub residual: f64,
    pub method: ChernMethod,
    /// `(n_k, n_phi)`; `n_phi` is 0 for the analytic route.
    pub grid: (usize, usize),
    pub boundary: bool,
}

impl ChernResult {
    fn new(raw: f64, method: ChernMethod, grid: (usize, usize), boundary: bool) -> Self {
        let snapped = Quantized::snap(raw);
        Self {
            raw,
            snapped,
            residual: (raw - snapped.value()).abs(),
            method,
            grid,
            boundary,
        }
    }
}

/// Chern number from the winding of θ(k): `c = Δθ / 2π`.
pub fn chern_analytic(config: &FieldConfig, n_k: usize) -> Result<ChernResult> {
    if n_k < MIN_NK {
        return Err(Error::InvalidGrid(format!("n_k = {n_k} < {MIN_NK}")));
    }
    config.validate()?;
    let track = angle_track(config, n_k)?;
    Ok(ChernResult::new(
        track.total_change / TAU,
        ChernMethod::AnalyticWinding,
        (n_k, 0),
        track.punctured,
    ))
}

/// `|B_k| = 2|ε₊₊ + ε₊₋|`; errors with `ComplexSpectrum` when the pair energy is complex.
pub fn field_magnitude(config: &FieldConfig, k: f64) -> Result<f64> {
    let s = pair_energy_sum(config, k);
    if s.im.abs() > IMAG_TOL {
        return Err(Error::ComplexSpectrum { k, imag: s.im });
    }
    Ok(2.0 * s.re.abs())
}

/// Spectrum-reality precondition for complex fields: the pair energy must be real on
/// every grid momentum.
pub fn check_real_pair_spectrum(config: &FieldConfig, n_k: usize) -> Result<()> {
    if config.kind() == FieldKind::Real {
        return Ok(());
    }
    (0..n_k).try_for_each(|m| field_magnitude(config, TAU * m as f64 / n_k as f64).map(|_| ()))
}

/// `H_k(θ, φ) = B(θ, φ)·σ` in the basis (pair-excited, vacuum).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelSystem {
    pub k: f64,
    pub phi: f64,
    pub theta: f64,
    /// `|B_k|`
    pub b_norm: f64,
    pub field: [f64; 3],
    pub matrix: [[Complex64; 2]; 2],
    /// `(ε⁻, ε⁺) = ∓√(cos²φ + |B_k|² sin²φ)`
    pub eps: [f64; 2],
}

pub fn two_level(config: &FieldConfig, k: f64, phi: f64) -> Result<TwoLevelSystem> {
    config.validate()?;
    let th = theta(config, k)?;
    let b = field_magnitude(config, k)?;
    let field = [
        b * phi.sin() * th.cos(),
        b * phi.sin() * th.sin(),
        phi.cos(),
    ];
    let matrix = [
        [
            Complex64::new(field[2], 0.0),
            Complex64::new(field[0], -field[1]),
        ],
        [
            Complex64::new(field[0], field[1]),
            Complex64::new(-field[2], 0.0),
        ],
    ];
    let e = (phi.cos().powi(2) + b * b * phi.sin().powi(2)).sqrt();
    Ok(TwoLevelSystem {
        k,
        phi,
        theta: th,
        b_norm: b,
        field,
        matrix,
        eps: [-e, e],
    })
}

/// Lower eigenstate as a right column and a left row with `left · right = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerState {
    pub right: [Complex64; 2],
    pub left: [Complex64; 2],
}

impl TwoLevelSystem {
    pub fn gap(&self) -> f64 {
        self.eps[1] - self.eps[0]
    }

    /// Numerical lower state. The right vector has unit norm with its pair-excited
    /// component real and non-negative (vacuum component at the φ = 0 pole). For the
    /// Dirac product the left row is its conjugate; for the biorthonormal product it is
    /// solved from `H† − ε⁻*`.
    pub fn lower_state(&self, product: InnerProduct) -> Result<LowerState> {
        if self.gap() < GAP_TOL {
            return Err(Error::GapClosed {
                k: self.k,
                phi: self.phi,
            });
        }
        let m = self.matrix;
        let e = Complex64::new(self.eps[0], 0.0);
        let mut right = null_vector(m, e);
        let anchor = if right[0].norm() > 1e-14 { 0 } else { 1 };
        let phase = right[anchor].conj() / right[anchor].norm();
        right.iter_mut().for_each(|z| *z *= phase);
        let n = norm(&right);
        right.iter_mut().for_each(|z| *z /= n);
        let left = match product {
            InnerProduct::Dirac => [right[0].conj(), right[1].conj()],
            InnerProduct::Biorthonormal => {
                let adj = [
                    [m[0][0].conj(), m[1][0].conj()],
                    [m[0][1].conj(), m[1][1].conj()],
                ];
                let ell = null_vector(adj, e.conj());
                let row = [ell[0].conj(), ell[1].conj()];
                let s = dot(&row, &right);
                [row[0] / s, row[1] / s]
            }
        };
        Ok(LowerState { right, left })
    }
}

/// Kernel vector of the rank-one 2×2 matrix `m − λ`: the better conditioned of its two
/// cofactor columns.
fn null_vector(m: [[Complex64; 2]; 2], lambda: Complex64) -> [Complex64; 2] {
    let a = [m[0][1], lambda - m[0][0]];
    let b = [lambda - m[1][1], m[1][0]];
    if norm(&a) >= norm(&b) {
        a
    } else {
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerProduct {
    Dirac,
    Biorthonormal,
}

impl InnerProduct {
    pub fn for_config(config: &FieldConfig) -> Self {
        match config.kind() {
            FieldKind::Real => InnerProduct::Dirac,
            FieldKind::Complex => InnerProduct::Biorthonormal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerryConnection {
    pub a_k: Complex64,
    pub a_phi: Complex64,
}

fn lower_state_at(config: &FieldConfig, k: f64, phi: f64) -> Result<LowerState> {
    two_level(config, k, phi)?.lower_state(InnerProduct::for_config(config))
}

/// Closed form `A_k = −|B_k|² sin²φ θ'(k) / Ω⁻`, `Ω⁻ = 2|ε⁻|(|ε⁻| − cos φ)`, `A_φ = 0`.
pub fn berry_connection_closed_form(
    config: &FieldConfig,
    k: f64,
    phi: f64,
) -> Result<BerryConnection> {
    let sys = two_level(config, k, phi)?;
    if sys.gap() < GAP_TOL {
        return Err(Error::GapClosed { k, phi });
    }
    let dtheta = theta_derivative(config, k)?;
    let e = sys.eps[1];
    // |B|² sin²φ / Ω⁻ = (|ε⁻| + cos φ) / (2|ε⁻|), which stays finite at the φ = 0 pole
    let a_k = -dtheta * (e + phi.cos()) / (2.0 * e);
    Ok(BerryConnection {
        a_k: Complex64::new(a_k, 0.0),
        a_phi: Complex64::new(0.0, 0.0),
    })
}

/// `A_x = i⟨ū|∂_x u⟩` with five-point centered differences of the gauge-fixed right
/// state. The exact `A_φ` vanishes, so a three-point stencil would leave its O(h²)
/// truncation term (which grows like |B_k|³) as the whole answer.
pub fn berry_connection(config: &FieldConfig, k: f64, phi: f64) -> Result<BerryConnection> {
    let h = CONNECTION_STEP;
    let here = lower_state_at(config, k, phi)?;
    let i = Complex64::new(0.0, 1.0);
    let deriv = |at: &dyn Fn(f64) -> Result<LowerState>| -> Result<Complex64> {
        let [m2, m1, p1, p2] = [-2.0, -1.0, 1.0, 2.0].map(|s| at(s * h));
        let (m2, m1, p1, p2) = (m2?.right, m1?.right, p1?.right, p2?.right);
        let d: [Complex64; 2] = std::array::from_fn(|c| {
            (m2[c] - 8.0 * m1[c] + 8.0 * p1[c] - p2[c]) / (12.0 * h)
        });
        Ok(i * dot(&here.left, &d))
    };
    let a_k = deriv(&|dk| lower_state_at(config, k + dk, phi))?;
    let a_phi = deriv(&|dphi| lower_state_at(config, k, phi + dphi))?;
    Ok(BerryConnection { a_k, a_phi })
}

/// Closed form `Ω_{kφ} = |B_k|² sin φ θ'(k) / (2(ε⁻)³)`.
pub fn berry_curvature(config: &FieldConfig, k: f64, phi: f64) -> Result<f64> {
    let sys = two_level(config, k, phi)?;
    if sys.gap() < GAP_TOL {
        return Err(Error::GapClosed { k, phi });
    }
    let dtheta = theta_derivative(config, k)?;
    Ok(curvature_from(sys.b_norm, dtheta, phi))
}

fn curvature_from(b_norm: f64, dtheta: f64, phi: f64) -> f64 {
    let b2 = b_norm * b_norm;
    let em = -(phi.cos().powi(2) + b2 * phi.sin().powi(2)).sqrt();
    b2 * phi.sin() * dtheta / (2.0 * em * em * em)
}

/// Gauge-invariant plaquette estimate of `Ω_{kφ}` at `(k, φ)`.
///
/// The flux through a square of side `h` is `F(h) = −arg(U₀₁U₁₂U₂₃U₃₀)` with link
/// variables `U_ab = ⟨ū_a|u_b⟩`; only the phase of the loop product carries curvature,
/// its modulus is a metric effect. `F(h) = Ωh² + O(h⁴)`, so the squares of side `h` and
/// `2h` are combined by Richardson extrapolation. A side of 1e−3 keeps the rounding
/// error of the phase (~1e−16/h²) well below the truncation error.
pub fn berry_curvature_plaquette(config: &FieldConfig, k: f64, phi: f64) -> Result<f64> {
    let h = PLAQUETTE_STEP;
    let f1 = plaquette_flux(config, k, phi, h)?;
    let f2 = plaquette_flux(config, k, phi, 2.0 * h)?;
    Ok((16.0 * f1 - f2) / (12.0 * h * h))
}

fn plaquette_flux(config: &FieldConfig, k: f64, phi: f64, h: f64) -> Result<f64> {
    let corners = [
        (k - h / 2.0, phi - h / 2.0),
        (k + h / 2.0, phi - h / 2.0),
        (k + h / 2.0, phi + h / 2.0),
        (k - h / 2.0, phi + h / 2.0),
    ];
    let states = corners
        .iter()
        .map(|&(kk, pp)| lower_state_at(config, kk, pp))
        .collect::<Result<Vec<_>>>()?;
    let mut prod = Complex64::new(1.0, 0.0);
    for a in 0..4 {
        let b = (a + 1) % 4;
        prod *= dot(&states[a].left, &states[b].right);
    }
    Ok(-prod.arg())
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Chern number by integrating the closed-form curvature over the `(k, φ)` rectangle.
///
/// Periodic trapezoid in k; trapezoid in φ on `n_phi` points including both poles, plus
/// the first Euler–Maclaurin end correction from the pole slopes `∂_φΩ = ∓|B_k|²θ'/2`.
/// Rows are summed in a fixed order and combined pairwise, so the result does not
/// depend on how rows are distributed over threads.
pub fn chern_curvature(config: &FieldConfig, n_k: usize, n_phi: usize) -> Result<ChernResult> {
    if n_k < MIN_NK || n_phi < MIN_NPHI {
        return Err(Error::InvalidGrid(format!(
            "(n_k, n_phi) = ({n_k}, {n_phi}) below ({MIN_NK}, {MIN_NPHI})"
        )));
    }
    config.validate()?;
    check_real_pair_spectrum(config, n_k)?;
    let hphi = PI / (n_phi - 1) as f64;
    let rows = (0..n_k)
        .into_par_iter()
        .map(|m| {
            let k = TAU * m as f64 / n_k as f64;
            let b = field_magnitude(config, k)?;
            if b < GAP_TOL {
                return Err(Error::GapClosed { k, phi: FRAC_PI_2 });
            }
            let dtheta = theta_derivative_or_limit(config, k)?;
            let mut row = 0.0;
            for j in 0..n_phi {
                let phi = j as f64 * hphi;
                let w = if j == 0 || j == n_phi - 1 { 0.5 } else { 1.0 };
                row += w * curvature_from(b, dtheta, phi);
            }
            let slope_gap = b * b * dtheta; // ∂_φΩ(π) − ∂_φΩ(0)
            Ok(hphi * row - hphi * hphi / 12.0 * slope_gap)
        })
        .collect::<Result<Vec<f64>>>()?;
    let literal = pairwise_sum(&rows) * (TAU / n_k as f64) / TAU;
    Ok(ChernResult::new(
        -literal,
        ChernMethod::CurvatureGrid,
        (n_k, n_phi),
        is_boundary(config),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopSample {
    pub k: f64,
    pub x: f64,
    pub y: f64,
}

/// The φ = π/2 curve `(x, y) = |B_k|(cos θ, sin θ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopTrace {
    pub samples: Vec<LoopSample>,
    pub winding: f64,
    /// Curve passes through the origin; `winding` is the principal value 1/2.
    pub boundary: bool,
    pub encloses_origin: bool,
}

impl LoopTrace {
    pub fn snapped(&self) -> Quantized {
        Quantized::snap(self.winding)
    }

    pub fn closure_gap(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => (a.x - b.x).hypot(a.y - b.y),
            _ => 0.0,
        }
    }
}

/// Samples the loop at `k_i = 2πi/n_k`, `i = 0..=n_k`, and sums exact polyline angle
/// increments. Boundary configurations skip the puncture sample and report 1/2.
pub fn loop_trace(config: &FieldConfig, n_k: usize) -> Result<LoopTrace> {
    if n_k < MIN_NK {
        return Err(Error::InvalidGrid(format!("n_k = {n_k} < {MIN_NK}")));
    }
    config.validate()?;
    check_real_pair_spectrum(config, n_k)?;
    let boundary = is_boundary(config);
    let mut samples = Vec::with_capacity(n_k + 1);
    for i in 0..=n_k {
        let k = TAU * i as f64 / n_k as f64;
        let th = match theta(config, k) {
            Ok(t) => t,
            Err(Error::OriginHit { .. }) if boundary => continue,
            Err(e) => return Err(e),
        };
        let b = field_magnitude(config, k)?;
        samples.push(LoopSample {
            k,
            x: b * th.cos(),
            y: b * th.sin(),
        });
    }
    let winding = if boundary {
        0.5
    } else {
        samples
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                (a.x * b.y - a.y * b.x).atan2(a.x * b.x + a.y * b.y)
            })
            .sum::<f64>()
            / TAU
    };
    Ok(LoopTrace {
        encloses_origin: !boundary && winding.round() != 0.0,
        samples,
        winding,
        boundary,
    })
}
