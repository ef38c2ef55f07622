//! Tensor-product Meyer wavelets built in the frequency domain.
//!
//! `Φ^ε` has Fourier transform `Π_i Ψ^{ε_i}(ξ_i)`, with `Ψ⁰` the scaling
//! profile and `Ψ¹(ξ) = Ω(ξ) e^{−iξ/2}` the wavelet profile. Because every
//! profile is compactly supported, grid sampling and periodization are exact
//! up to roundoff once the grid resolves the spectrum.

pub mod check;
mod grid;
mod profile;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature;

pub use check::{meyer_check, MeyerCheckReport, OrthonormalityProbe};
pub use grid::{analyze, synthesize, GridSpec, MAX_GRID_DIM};
pub use profile::{
    MeyerProfile, Transition, DEFAULT_TRANSITION_ORDER, EIGHT_PI_THIRDS, FOUR_PI_THIRDS,
    TWO_PI_THIRDS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeyerError {
    #[error("transition order must be at least 1, got {0}")]
    InvalidTransitionOrder(u32),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("channel entries must be 0 or 1, got {0}")]
    InvalidChannel(u8),
    #[error("the zero channel has no periodization polynomial")]
    ZeroChannel,
    #[error(
        "grid with {points} points per side cannot resolve scale {scale}; \
         needs at least {required} points per side"
    )]
    Unresolved {
        scale: i32,
        points: usize,
        required: usize,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Builds the spectral profile for the given transition order.
pub fn build_profile(transition_order: u32) -> Result<MeyerProfile, MeyerError> {
    MeyerProfile::new(transition_order)
}

/// Index `(ε, j, k)` of `Φ^ε_{j,k}(x) = 2^{nj/2} Φ^ε(2^j x − k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WaveletIndex {
    pub eps: Vec<u8>,
    pub j: i32,
    pub k: Vec<i64>,
}

impl WaveletIndex {
    pub fn new(eps: Vec<u8>, j: i32, k: Vec<i64>) -> Result<Self, MeyerError> {
        if eps.len() != k.len() {
            return Err(MeyerError::DimensionMismatch {
                expected: eps.len(),
                found: k.len(),
            });
        }
        if let Some(&bad) = eps.iter().find(|&&e| e > 1) {
            return Err(MeyerError::InvalidChannel(bad));
        }
        Ok(Self { eps, j, k })
    }

    pub fn dim(&self) -> usize {
        self.eps.len()
    }

    /// True for members of the wavelet set `Λₙ` (nonzero channel).
    pub fn is_wavelet(&self) -> bool {
        self.eps.contains(&1)
    }
}

/// All nonzero channels `ε ∈ {0,1}ⁿ \ {0}`, in lexicographic order.
pub fn wavelet_channels(n: usize) -> Vec<Vec<u8>> {
    (1..(1u32 << n))
        .map(|bits| (0..n).map(|i| ((bits >> (n - 1 - i)) & 1) as u8).collect())
        .collect()
}

fn check_channel(eps: &[u8]) -> Result<(), MeyerError> {
    match eps.iter().find(|&&e| e > 1) {
        Some(&bad) => Err(MeyerError::InvalidChannel(bad)),
        None => Ok(()),
    }
}

/// `Φ̂^ε(ξ) = Π_i Ψ^{ε_i}(ξ_i)`.
pub fn phi_hat(profile: &MeyerProfile, eps: &[u8], xi: &[f64]) -> Result<Complex64, MeyerError> {
    if eps.len() != xi.len() {
        return Err(MeyerError::DimensionMismatch {
            expected: eps.len(),
            found: xi.len(),
        });
    }
    check_channel(eps)?;
    Ok(eps
        .iter()
        .zip(xi)
        .map(|(&e, &x)| profile.psi(e, x))
        .product())
}

/// Fourier transform of the dilated translate `Φ^ε_{j,k}`:
/// `2^{−nj/2} Φ̂^ε(2^{−j}ξ) e^{−i 2^{−j} ξ·k}`.
pub fn phi_hat_jk(
    profile: &MeyerProfile,
    idx: &WaveletIndex,
    xi: &[f64],
) -> Result<Complex64, MeyerError> {
    let n = idx.dim();
    if xi.len() != n {
        return Err(MeyerError::DimensionMismatch {
            expected: n,
            found: xi.len(),
        });
    }
    let inv = (-idx.j as f64).exp2();
    let mut value = Complex64::new((-0.5 * n as f64 * idx.j as f64).exp2(), 0.0);
    let mut phase = 0.0;
    for i in 0..n {
        let s = xi[i] * inv;
        value *= profile.psi(idx.eps[i], s);
        phase -= s * idx.k[i] as f64;
    }
    Ok(value * Complex64::from_polar(1.0, phase))
}

/// Samples the box-periodization of `Φ^ε_{j,k}` on `grid`.
///
/// The grid's Fourier coefficients are `Φ̂^ε_{j,k}(2πm/L) / Lⁿ`; the inverse
/// DFT of that array is exact whenever the grid resolves scale `j`.
pub fn sample_wavelet(
    profile: &MeyerProfile,
    idx: &WaveletIndex,
    grid: &GridSpec,
) -> Result<Vec<f64>, MeyerError> {
    if grid.dim() != idx.dim() {
        return Err(MeyerError::DimensionMismatch {
            expected: grid.dim(),
            found: idx.dim(),
        });
    }
    check_channel(&idx.eps)?;
    grid.check_scale(idx.j)?;
    let volume = grid.box_side().powi(grid.dim() as i32);
    let spectrum = (0..grid.len())
        .map(|flat| phi_hat_jk(profile, idx, &grid.frequency(flat)).map(|v| v / volume))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(synthesize(grid, spectrum).into_iter().map(|c| c.re).collect())
}

/// Finite trigonometric polynomial `P(y) = Σ_m c_m e^{2πi m·y}` with real values.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    n: usize,
    terms: Vec<(Vec<i64>, Complex64)>,
}

impl TrigPolynomial {
    pub fn new(n: usize, terms: Vec<(Vec<i64>, Complex64)>) -> Self {
        Self { n, terms }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Vec<i64>, Complex64)] {
        &self.terms
    }

    pub fn coefficient(&self, m: &[i64]) -> Complex64 {
        self.terms
            .iter()
            .find(|(mm, _)| mm.as_slice() == m)
            .map(|(_, c)| *c)
            .unwrap_or_default()
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let phase: f64 = m.iter().zip(y).map(|(&mi, &yi)| mi as f64 * yi).sum();
                (c * Complex64::from_polar(1.0, 2.0 * PI * phase)).re
            })
            .sum()
    }

    /// Maximum of `|P|` over the lattice `{i/points}ⁿ` of one period.
    pub fn max_abs_on_lattice(&self, points: usize) -> f64 {
        let total = points.pow(self.n as u32);
        let mut y = vec![0.0; self.n];
        let mut best = 0.0f64;
        for flat in 0..total {
            let mut rem = flat;
            for slot in y.iter_mut().rev() {
                *slot = (rem % points) as f64 / points as f64;
                rem /= points;
            }
            best = best.max(self.eval(&y).abs());
        }
        best
    }

    /// Upper bound on the Euclidean Lipschitz constant, `Σ |c_m|·2π|m|`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let norm = m.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
                c.norm() * 2.0 * PI * norm
            })
            .sum()
    }

    pub fn l1_coefficients(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).sum()
    }
}

/// Fourier coefficients `Φ̂^ε(2πm)` of `P(y) = Σ_k Φ^ε(y − k)`.
///
/// The spectrum of `Φ^ε` lies in `[−8π/3, 8π/3]ⁿ`, so only `m ∈ {−1,0,1}ⁿ`
/// can contribute, and `Ψ¹(0) = 0` forces `m_i = ±1` wherever `ε_i = 1`.
pub fn periodization_polynomial(
    profile: &MeyerProfile,
    eps: &[u8],
) -> Result<TrigPolynomial, MeyerError> {
    check_channel(eps)?;
    if !eps.contains(&1) {
        return Err(MeyerError::ZeroChannel);
    }
    let n = eps.len();
    let mut terms = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let mut rem = code;
        let mut m = vec![0i64; n];
        for slot in m.iter_mut().rev() {
            *slot = (rem % 3) as i64 - 1;
            rem /= 3;
        }
        let xi: Vec<f64> = m.iter().map(|&v| 2.0 * PI * v as f64).collect();
        let c = phi_hat(profile, eps, &xi)?;
        if c.norm() > 0.0 {
            terms.push((m, c));
        }
    }
    Ok(TrigPolynomial::new(n, terms))
}

fn inner_product_1d(
    profile: &MeyerProfile,
    (e1, j1, k1): (u8, i32, i64),
    (e2, j2, k2): (u8, i32, i64),
) -> f64 {
    let s1 = (j1 as f64).exp2();
    let s2 = (j2 as f64).exp2();
    let (lo1, hi1) = MeyerProfile::positive_support(e1);
    let (lo2, hi2) = MeyerProfile::positive_support(e2);
    let lo = (lo1 * s1).max(lo2 * s2);
    let hi = (hi1 * s1).min(hi2 * s2);
    if lo >= hi {
        return 0.0;
    }
    let shift = k1 as f64 / s1 - k2 as f64 / s2;
    let breaks: Vec<f64> = MeyerProfile::breakpoints(e1)
        .iter()
        .map(|b| b * s1)
        .chain(MeyerProfile::breakpoints(e2).iter().map(|b| b * s2))
        .collect();
    let width = (hi - lo).min(1.0 / (1.0 + shift.abs()));
    let integral = quadrature::integrate_with_breaks(lo, hi, &breaks, width, |xi| {
        let v = profile.psi(e1, xi / s1)
            * profile.psi(e2, xi / s2).conj()
            * Complex64::from_polar(1.0, -xi * shift);
        v.re
    });
    // Real wavelets: the integrand's real part is even, so the full line
    // integral is twice the half-line one.
    integral / PI / (s1 * s2).sqrt()
}

/// `⟨Φ^ε_{j,k}, Φ^{ε'}_{j',k'}⟩` on `ℝⁿ` by frequency-domain quadrature
/// (Plancherel), factored over axes.
pub fn inner_product(
    profile: &MeyerProfile,
    a: &WaveletIndex,
    b: &WaveletIndex,
) -> Result<f64, MeyerError> {
    if a.dim() != b.dim() {
        return Err(MeyerError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    check_channel(&a.eps)?;
    check_channel(&b.eps)?;
    Ok((0..a.dim())
        .map(|i| inner_product_1d(profile, (a.eps[i], a.j, a.k[i]), (b.eps[i], b.j, b.k[i])))
        .product())
}

/// Pointwise evaluator of the one-dimensional profile inverse transform
/// `ψ^bit(x) = (1/π) ∫₀^∞ Re(Ψ^bit(ξ) e^{iξx}) dξ`, accurate for `|x| ≤ x_max`.
///
/// Quadrature nodes and profile values are cached, so repeated evaluation
/// costs one cosine and sine per node.
#[derive(Debug, Clone)]
pub struct PointEvaluator {
    nodes: Vec<(f64, Complex64)>,
}

impl PointEvaluator {
    pub fn new(profile: &MeyerProfile, bit: u8, x_max: f64) -> Self {
        let (lo, hi) = MeyerProfile::positive_support(bit);
        let width = (1.0 / (1.0 + x_max.abs())).min(0.25);
        let mut nodes = Vec::new();
        let mut cuts: Vec<f64> = MeyerProfile::breakpoints(bit)
            .iter()
            .copied()
            .filter(|&b| b > lo && b < hi)
            .collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            let panels = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / panels as f64;
            for p in 0..panels {
                let a = w[0] + p as f64 * h;
                nodes.extend(
                    quadrature::panel_nodes(a, a + h)
                        .map(|(xi, w)| (xi, profile.psi(bit, xi) * w / PI)),
                );
            }
        }
        Self { nodes }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.nodes
            .iter()
            .map(|&(xi, c)| {
                let (s, co) = (xi * x).sin_cos();
                c.re * co - c.im * s
            })
            .sum()
    }
}

/// Value of `Φ^ε(x)` on `ℝⁿ` (not periodized), by frequency quadrature.
pub fn wavelet_value(profile: &MeyerProfile, eps: &[u8], x: &[f64]) -> Result<f64, MeyerError> {
    if eps.len() != x.len() {
        return Err(MeyerError::DimensionMismatch {
            expected: eps.len(),
            found: x.len(),
        });
    }
    check_channel(eps)?;
    Ok(eps
        .iter()
        .zip(x)
        .map(|(&e, &xi)| PointEvaluator::new(profile, e, xi.abs()).eval(xi))
        .product())
}

/// Nonzero Fourier-series coefficients of a grid spectrum, as signed modes.
pub fn sparse_spectrum(
    grid: &GridSpec,
    coefficients: &[Complex64],
    rel_threshold: f64,
) -> Vec<(Vec<i64>, Complex64)> {
    let peak = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Vec::new();
    }
    let mut idx = vec![0usize; grid.dim()];
    coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > rel_threshold * peak)
        .map(|(flat, c)| {
            grid.unflatten(flat, &mut idx);
            let modes = idx.iter().map(|&b| grid.mode_of_bin(b)).collect();
            (modes, *c)
        })
        .collect()
}

/// Wavelet coefficient `⟨f, Φ^ε_{j,k}⟩` over the periodic box, for `f`
/// given by Fourier-series coefficients `f(x) = Σ_m c_m e^{2πi m·x/L}`.
pub fn analysis_coefficient(
    profile: &MeyerProfile,
    grid: &GridSpec,
    spectrum: &[(Vec<i64>, Complex64)],
    idx: &WaveletIndex,
) -> Result<f64, MeyerError> {
    if grid.dim() != idx.dim() {
        return Err(MeyerError::DimensionMismatch {
            expected: grid.dim(),
            found: idx.dim(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (modes, c) in spectrum {
        let xi: Vec<f64> = modes.iter().map(|&m| grid.frequency_of_mode(m)).collect();
        acc += c * phi_hat_jk(profile, idx, &xi)?.conj();
    }
    Ok(acc.re)
}
