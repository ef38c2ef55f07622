//! The explicit field `u₁(t,x) = Σ_{j,k} a_{j,k}(t) Φ^e_{j,k}(x)` with
//! `a_{j,k}(t) = t^{−a} 2^{−bj}` on `1 ≤ j ≤ −½log₂t`, `t < 1`, and zero
//! otherwise; its divergence-free partner `u₂ = −∂₂⁻¹∂₁u₁`; and closed forms
//! for the two Carleson-type quantities it is judged by.
//!
//! Only the all-ones channel `e = (1,…,1)` is populated. Because the
//! coefficients do not depend on `k`, every dyadic sum collapses to a
//! geometric series and the field is a finite sum of dilated periodization
//! polynomials.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::dyadic::{
    self, CarlesonEstimate, CoefficientField, DyadicCube, DyadicError, Provenance, QuadratureSpec,
    StaticField, TimeCoefficientField,
};
use crate::meyer::{
    analysis_coefficient, analyze, periodization_polynomial, sparse_spectrum, synthesize,
    wavelet_channels, GridSpec, MeyerError, MeyerProfile, TrigPolynomial, WaveletIndex,
};
use crate::report::{
    BbmoRow, BlimRow, BlowupRow, Claims, Diagnostics, NinftyRow, NormReport, ParamsRecord, Verdict,
};

#[derive(Debug, Error)]
pub enum CounterexampleError {
    #[error("dimension n = {0} must be at least 2")]
    DimensionTooSmall(usize),
    #[error("a = {0} must lie in (0, 1/2)")]
    AOutOfRange(f64),
    #[error("b = {b} must exceed the lower bound n/2 + 2a - 1 = {lower}")]
    BelowLowerBound { b: f64, lower: f64 },
    #[error("b = {b} must be below the upper bound n/2 = {upper}")]
    AboveUpperBound { b: f64, upper: f64 },
    #[error("time t = {t} outside {range}")]
    TimeOutOfRange { t: f64, range: &'static str },
    #[error("m_max = {m_max} is below the required minimum {required}")]
    MMaxTooSmall { m_max: u32, required: u32 },
    #[error("dyadic series diverges: piece ratio {ratio} >= 1")]
    Divergent { ratio: f64 },
    #[error("relative tail did not reach {target:e} by m = {m_max}")]
    NotConverged { target: f64, m_max: u32 },
    #[error("blow-up certificate refused: {0}")]
    CertificateRefused(String),
    #[error("box side {0} must be a positive integer for periodic synthesis")]
    NonIntegerBox(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Meyer(#[from] MeyerError),
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
}

type Result<T> = std::result::Result<T, CounterexampleError>;

/// `(n, a, b)` with `n ≥ 2`, `0 < a < 1/2` and `n/2 + 2a − 1 < b < n/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleParams {
    n: usize,
    a: f64,
    b: f64,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        Self::unchecked(2, 0.25, 0.75)
    }
}

impl CounterexampleParams {
    pub fn validate(n: usize, a: f64, b: f64) -> Result<Self> {
        if n < 2 {
            return Err(CounterexampleError::DimensionTooSmall(n));
        }
        if !(a > 0.0 && a < 0.5) {
            return Err(CounterexampleError::AOutOfRange(a));
        }
        let p = Self { n, a, b };
        if !(b > p.lower_bound()) {
            return Err(CounterexampleError::BelowLowerBound {
                b,
                lower: p.lower_bound(),
            });
        }
        if !(b < p.upper_bound()) {
            return Err(CounterexampleError::AboveUpperBound {
                b,
                upper: p.upper_bound(),
            });
        }
        Ok(p)
    }

    /// Skips the admissibility gate, for probing the failure modes.
    pub fn unchecked(n: usize, a: f64, b: f64) -> Self {
        Self { n, a, b }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn lower_bound(&self) -> f64 {
        self.n as f64 / 2.0 + 2.0 * self.a - 1.0
    }

    pub fn upper_bound(&self) -> f64 {
        self.n as f64 / 2.0
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `log₂ r` with `r = 2^{n−2b}`, the per-scale growth of `2^{nj}|a|²`.
    fn energy_log2(&self) -> f64 {
        self.nf() - 2.0 * self.b
    }

    /// `log₂ ρ`: ratio of consecutive dyadic time pieces of the Carleson sum.
    fn piece_ratio_log2(&self) -> f64 {
        self.energy_log2() - 2.0 + 4.0 * self.a
    }

    /// `log₂ q` with `q = 2^{n−2b−2}`, the ratio of the fixed-time sum.
    fn blim_ratio_log2(&self) -> f64 {
        self.energy_log2() - 2.0
    }

    /// Exponent `β` in `sup_norm_bound(t) ~ t^β` as `t → 0`:
    /// `1/2 − a − (n/2 − b)/2`, nonnegative exactly when `b ≥ n/2 + 2a − 1`.
    pub fn sup_norm_exponent(&self) -> f64 {
        0.5 - self.a - (self.nf() / 2.0 - self.b) / 2.0
    }

    /// All-ones channel `e`.
    pub fn channel(&self) -> Vec<u8> {
        vec![1; self.n]
    }
}

/// `⌊−½log₂t⌋`, exact at the breakpoints `t = 4^{−m}`.
pub fn max_scale(t: f64) -> i32 {
    let mut j = (-0.5 * t.log2()).floor() as i32;
    while (-2.0 * (j as f64 + 1.0)).exp2() >= t {
        j += 1;
    }
    while (-2.0 * j as f64).exp2() < t {
        j -= 1;
    }
    j
}

fn active_range(t: f64) -> Option<(i32, i32)> {
    let top = max_scale(t);
    (t < 1.0 && top >= 1).then_some((1, top))
}

/// `a_{j,k}(t)`; independent of `k`.
pub fn coeff(params: &CounterexampleParams, t: f64, j: i32, k: &[i64]) -> Result<f64> {
    if !(t > 0.0) {
        return Err(CounterexampleError::TimeOutOfRange {
            t,
            range: "(0, ∞)",
        });
    }
    if k.len() != params.n {
        return Err(MeyerError::DimensionMismatch {
            expected: params.n,
            found: k.len(),
        }
        .into());
    }
    Ok(match active_range(t) {
        Some((lo, hi)) if (lo..=hi).contains(&j) => t.powf(-params.a) * (-params.b * j as f64).exp2(),
        _ => 0.0,
    })
}

/// `S(j₀)` truncated at `m_max`, with an upper bound on the remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BbmoValue {
    pub j0: u32,
    pub value: f64,
    pub tail: f64,
    pub m_max: u32,
}

impl BbmoValue {
    pub fn relative_tail(&self) -> f64 {
        if self.value == 0.0 {
            self.tail
        } else {
            self.tail / self.value
        }
    }
}

/// `∫` of `t^{−2a}` over `(4^{−(m+1)}, 4^{−m}]` is `κ·4^{−m(1−2a)}`.
fn piece_kappa(a: f64) -> f64 {
    let s = 1.0 - 2.0 * a;
    (1.0 - (-2.0 * s).exp2()) / s
}

/// Bound on `Σ_{m > last} G(m)·I(m)`, using `G(m) ≤ r^m·r/(r−1)`.
fn bbmo_tail(params: &CounterexampleParams, last: u32) -> f64 {
    let rho = params.piece_ratio_log2();
    let inv_r = (-params.energy_log2()).exp2();
    piece_kappa(params.a) / (1.0 - inv_r) * (rho * (last as f64 + 1.0)).exp2()
        / (1.0 - rho.exp2())
}

fn check_convergent(params: &CounterexampleParams) -> Result<()> {
    if params.energy_log2() <= 0.0 {
        return Err(CounterexampleError::AboveUpperBound {
            b: params.b,
            upper: params.upper_bound(),
        });
    }
    let rho = params.piece_ratio_log2();
    if !(rho < 0.0) {
        return Err(CounterexampleError::Divergent { ratio: rho.exp2() });
    }
    Ok(())
}

/// `S(j₀) = Σ_{m=M}^{m_max} G(m) ∫_{4^{−(m+1)}}^{4^{−m}} t^{−2a} dt` with
/// `M = max(j₀, 1)` and `G(m) = Σ_{j=M}^m 2^{(n−2b)j}`, plus a geometric
/// bound on the omitted pieces.
///
/// Each term is evaluated as `H(m)·2^{(n−2b)m − 2m(1−2a)}·κ` with the
/// normalized partial sum `H(m) = G(m)/r^m`, so nothing overflows for large
/// `m_max`.
pub fn bbmo_closed_form(params: &CounterexampleParams, j0: u32, m_max: u32) -> Result<BbmoValue> {
    let first = j0.max(1);
    let required = first + 5;
    if m_max < required {
        return Err(CounterexampleError::MMaxTooSmall { m_max, required });
    }
    check_convergent(params)?;
    let e = params.energy_log2();
    let s = 1.0 - 2.0 * params.a;
    let kappa = piece_kappa(params.a);
    let inv_r = (-e).exp2();
    let mut h = 0.0;
    let mut value = 0.0;
    for m in first..=m_max {
        h = h * inv_r + 1.0;
        value += h * ((e - 2.0 * s) * m as f64).exp2() * kappa;
    }
    Ok(BbmoValue {
        j0,
        value,
        tail: bbmo_tail(params, m_max),
        m_max,
    })
}

/// Extends `m_max` (doubling from `m_start`) until `tail ≤ rel·value`.
pub fn bbmo_converged(
    params: &CounterexampleParams,
    j0: u32,
    m_start: u32,
    rel: f64,
) -> Result<BbmoValue> {
    const M_CAP: u32 = 1 << 20;
    let mut m_max = m_start.max(j0.max(1) + 5);
    loop {
        let v = bbmo_closed_form(params, j0, m_max)?;
        if v.tail <= rel * v.value {
            return Ok(v);
        }
        if m_max >= M_CAP {
            return Err(CounterexampleError::NotConverged {
                target: rel,
                m_max,
            });
        }
        m_max = (2 * m_max).min(M_CAP);
    }
}

/// `C ∫₀^{4^{−j₀}} t^{b−n/2−2a} dt` with `C = r/(r−1)`: the power-law
/// majorant of `S(j₀)`.
pub fn bbmo_majorant(params: &CounterexampleParams, j0: u32) -> Result<f64> {
    check_convergent(params)?;
    let c = 1.0 / (1.0 - (-params.energy_log2()).exp2());
    let p = params.b - params.nf() / 2.0 - 2.0 * params.a + 1.0;
    Ok(c * (-2.0 * j0 as f64 * p).exp2() / p)
}

/// `c(t, j₀) = t^{−2a} Σ_{j=max(j₀,1)}^{⌊−½log₂t⌋} 2^{(n−2b−2)j}`.
pub fn blim_closed_form(params: &CounterexampleParams, t: f64, j0: u32) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(CounterexampleError::TimeOutOfRange { t, range: "(0, 1)" });
    }
    let q = params.blim_ratio_log2();
    let top = max_scale(t);
    let sum: f64 = (j0.max(1) as i32..=top).map(|j| (q * j as f64).exp2()).sum();
    Ok(t.powf(-2.0 * params.a) * sum)
}

/// `lim_{t→0} t^{2a}·c(t, 0) = q/(1−q)` with `q = 2^{n−2b−2}`.
pub fn limit_constant(params: &CounterexampleParams) -> f64 {
    let q = params.blim_ratio_log2().exp2();
    q / (1.0 - q)
}

pub const SLOPE_TOLERANCE: f64 = 0.05;
pub const MIN_CURVE_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupCertificate {
    pub t_values: Vec<f64>,
    pub c_values: Vec<f64>,
    /// Least-squares slope of `log₂ c` against `m = −½log₂t`.
    pub slope: f64,
    pub expected_slope: f64,
    /// `c ∝ t^{fitted_exponent}`; equals `−slope/2`.
    pub fitted_exponent: f64,
    pub limit_constant: f64,
}

pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `(t, c(t, 0))` at `t = 4^{−m}` over `m_range`.
pub fn blowup_curve(
    params: &CounterexampleParams,
    m_range: RangeInclusive<u32>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let t: Vec<f64> = m_range.map(|m| (-2.0 * m as f64).exp2()).collect();
    let c = t
        .iter()
        .map(|&t| blim_closed_form(params, t, 0))
        .collect::<Result<Vec<_>>>()?;
    Ok((t, c))
}

/// Accepts a curve ordered by decreasing `t` only if it is positive,
/// strictly increasing, and its `log₂ c` vs `m` slope is within
/// [`SLOPE_TOLERANCE`] of `expected_slope`. Returns the slope.
pub fn certify_curve(t: &[f64], c: &[f64], expected_slope: f64) -> Result<f64> {
    let refuse = |msg: String| Err(CounterexampleError::CertificateRefused(msg));
    if t.len() != c.len() || t.len() < MIN_CURVE_POINTS {
        return refuse(format!(
            "need at least {MIN_CURVE_POINTS} paired points, got {} t and {} c",
            t.len(),
            c.len()
        ));
    }
    if let Some(i) = c.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return refuse(format!("c = {} at t = {} is not positive and finite", c[i], t[i]));
    }
    for i in 1..t.len() {
        if !(t[i] < t[i - 1]) {
            return refuse(format!("t values not strictly decreasing at index {i}"));
        }
        if !(c[i] > c[i - 1]) {
            return refuse(format!(
                "c not strictly increasing: c({}) = {} <= c({}) = {}",
                t[i],
                c[i],
                t[i - 1],
                c[i - 1]
            ));
        }
    }
    let m: Vec<f64> = t.iter().map(|t| -0.5 * t.log2()).collect();
    let logc: Vec<f64> = c.iter().map(|c| c.log2()).collect();
    let slope = least_squares_slope(&m, &logc);
    if !((slope - expected_slope).abs() <= SLOPE_TOLERANCE) {
        return refuse(format!(
            "fitted slope {slope} differs from {expected_slope} by more than {SLOPE_TOLERANCE}"
        ));
    }
    Ok(slope)
}

/// Certificate that `c(t, 0) → ∞` like `t^{−2a}` along `t = 4^{−m}`.
pub fn blowup_certificate(
    params: &CounterexampleParams,
    m_range: RangeInclusive<u32>,
) -> Result<BlowupCertificate> {
    let (t, c) = blowup_curve(params, m_range)?;
    let expected = 4.0 * params.a;
    let slope = certify_curve(&t, &c, expected)?;
    Ok(BlowupCertificate {
        t_values: t,
        c_values: c,
        slope,
        expected_slope: expected,
        fitted_exponent: -slope / 2.0,
        limit_constant: limit_constant(params),
    })
}

pub const SUP_SAMPLES: usize = 4096;

/// Certified upper bound on `‖P‖_∞` for the all-ones periodization
/// polynomial. `P` is a tensor product of the 1-D polynomial, so the
/// lattice maximum and the Lipschitz margin are taken per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodizationSup {
    pub sampled: f64,
    pub lipschitz_margin: f64,
    pub bound: f64,
}

pub fn periodization_sup(profile: &MeyerProfile, n: usize) -> Result<PeriodizationSup> {
    let p1 = periodization_polynomial(profile, &[1])?;
    let sampled1 = p1.max_abs_on_lattice(SUP_SAMPLES);
    let margin1 = p1.lipschitz_bound() * 0.5 / SUP_SAMPLES as f64;
    let sampled = sampled1.powi(n as i32);
    let bound = (sampled1 + margin1).powi(n as i32);
    Ok(PeriodizationSup {
        sampled,
        lipschitz_margin: bound - sampled,
        bound,
    })
}

/// `t^{1/2−a}·‖P‖·Σ_{j=1}^{⌊−½log₂t⌋} 2^{(n/2−b)j}` for a precomputed `‖P‖`.
pub fn sup_norm_bound_with(params: &CounterexampleParams, p_sup: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(CounterexampleError::TimeOutOfRange { t, range: "(0, 1)" });
    }
    let g = params.nf() / 2.0 - params.b;
    let sum: f64 = (1..=max_scale(t)).map(|j| (g * j as f64).exp2()).sum();
    Ok(t.powf(0.5 - params.a) * p_sup * sum)
}

/// Upper bound on `t^{1/2}‖u₁(t)‖_∞`.
pub fn sup_norm_bound(params: &CounterexampleParams, profile: &MeyerProfile, t: f64) -> Result<f64> {
    let p = periodization_sup(profile, params.n)?;
    sup_norm_bound_with(params, p.bound, t)
}

fn integer_box(grid: &GridSpec) -> Result<i64> {
    let l = grid.box_side();
    if l.fract() != 0.0 || l < 1.0 || l > (1u64 << 40) as f64 {
        return Err(CounterexampleError::NonIntegerBox(l));
    }
    Ok(l as i64)
}

fn check_grid(params: &CounterexampleParams, grid: &GridSpec) -> Result<()> {
    if grid.dim() != params.n {
        return Err(MeyerError::DimensionMismatch {
            expected: params.n,
            found: grid.dim(),
        }
        .into());
    }
    integer_box(grid).map(|_| ())
}

/// `−ξ₁/ξ₂`, undefined where `ξ₂ = 0` or `n < 2`.
pub fn u2_multiplier(xi: &[f64]) -> Option<f64> {
    match xi {
        [x1, x2, ..] if *x2 != 0.0 => Some(-x1 / x2),
        _ => None,
    }
}

/// Adds `weight·2^{nj/2}P(2^j x)` (optionally through the `u₂` multiplier)
/// to a dense grid spectrum. The `2^{nj/2}` is left to the caller.
fn add_scale_piece(
    poly: &TrigPolynomial,
    grid: &GridSpec,
    j: i32,
    weight: f64,
    through_multiplier: bool,
    spectrum: &mut [Complex64],
) -> Result<()> {
    grid.check_scale(j)?;
    let stride = (1i64 << j) * integer_box(grid)?;
    for (m, c) in poly.terms() {
        let modes: Vec<i64> = m.iter().map(|&v| v * stride).collect();
        let flat = grid.flat_of_modes(&modes).ok_or(MeyerError::Unresolved {
            scale: j,
            points: grid.points_per_side(),
            required: GridSpec::required_points(grid.box_side(), j),
        })?;
        let mut v = c * weight;
        if through_multiplier {
            let xi: Vec<f64> = modes.iter().map(|&q| grid.frequency_of_mode(q)).collect();
            v *= u2_multiplier(&xi).unwrap_or(0.0);
        }
        spectrum[flat] += v;
    }
    Ok(())
}

/// Fourier-series coefficients of `u₁(t)` on the grid's box:
/// `t^{−a} Σ_{j=1}^{J} 2^{(n/2−b)j} P(2^j x)`.
pub fn u1_spectrum(
    params: &CounterexampleParams,
    profile: &MeyerProfile,
    t: f64,
    grid: &GridSpec,
) -> Result<Vec<Complex64>> {
    if !(t > 0.0) {
        return Err(CounterexampleError::TimeOutOfRange {
            t,
            range: "(0, ∞)",
        });
    }
    check_grid(params, grid)?;
    let mut spectrum = vec![Complex64::new(0.0, 0.0); grid.len()];
    let Some((lo, hi)) = active_range(t) else {
        return Ok(spectrum);
    };
    grid.check_scale(hi)?;
    let poly = periodization_polynomial(profile, &params.channel())?;
    let amp = t.powf(-params.a);
    for j in lo..=hi {
        let weight = amp * ((params.nf() / 2.0 - params.b) * j as f64).exp2();
        add_scale_piece(&poly, grid, j, weight, false, &mut spectrum)?;
    }
    Ok(spectrum)
}

fn real_samples(grid: &GridSpec, spectrum: Vec<Complex64>) -> Vec<f64> {
    synthesize(grid, spectrum).into_iter().map(|c| c.re).collect()
}

/// Exact samples of `u₁(t, ·)` on the grid.
pub fn synthesize_u1(
    params: &CounterexampleParams,
    profile: &MeyerProfile,
    t: f64,
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    Ok(real_samples(grid, u1_spectrum(params, profile, t, grid)?))
}

fn apply_u2_multiplier(grid: &GridSpec, spectrum: &mut [Complex64]) {
    for (flat, v) in spectrum.iter_mut().enumerate() {
        if v.norm() != 0.0 {
            *v *= u2_multiplier(&grid.frequency(flat)).unwrap_or(0.0);
        }
    }
}

/// Samples of `u₂ = −∂₂⁻¹∂₁u₁`, via the multiplier `−ξ₁/ξ₂` on `û₁`.
pub fn build_u2(
    params: &CounterexampleParams,
    profile: &MeyerProfile,
    t: f64,
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    if params.n < 2 {
        return Err(CounterexampleError::DimensionTooSmall(params.n));
    }
    let mut spectrum = u1_spectrum(params, profile, t, grid)?;
    apply_u2_multiplier(grid, &mut spectrum);
    Ok(real_samples(grid, spectrum))
}

/// `(u₁, u₂, 0, …, 0)` sampled on the grid.
pub fn velocity_samples(
    params: &CounterexampleParams,
    profile: &MeyerProfile,
    t: f64,
    grid: &GridSpec,
) -> Result<Vec<Vec<f64>>> {
    if params.n < 2 {
        return Err(CounterexampleError::DimensionTooSmall(params.n));
    }
    let spectrum = u1_spectrum(params, profile, t, grid)?;
    let mut s2 = spectrum.clone();
    apply_u2_multiplier(grid, &mut s2);
    let mut out = vec![real_samples(grid, spectrum), real_samples(grid, s2)];
    out.resize(params.n, vec![0.0; grid.len()]);
    Ok(out)
}

/// `max_ξ |Σᵢ ξᵢ ûᵢ(ξ)| / max_ξ Σᵢ |ξᵢ||ûᵢ(ξ)|` over the grid's frequencies;
/// zero when the normalizer vanishes.
pub fn divergence_residual(components: &[Vec<f64>], grid: &GridSpec) -> Result<f64> {
    if components.len() != grid.dim() {
        return Err(CounterexampleError::InvalidInput(format!(
            "{} components for a {}-dimensional grid",
            components.len(),
            grid.dim()
        )));
    }
    if let Some(c) = components.iter().find(|c| c.len() != grid.len()) {
        return Err(CounterexampleError::InvalidInput(format!(
            "component has {} samples, grid has {}",
            c.len(),
            grid.len()
        )));
    }
    let hats: Vec<Vec<Complex64>> = components.iter().map(|c| analyze(grid, c)).collect();
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    let mut bins = vec![0usize; grid.dim()];
    for flat in 0..grid.len() {
        grid.unflatten(flat, &mut bins);
        let mut div = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for (i, hat) in hats.iter().enumerate() {
            let xi = grid.frequency_of_mode(grid.mode_of_bin(bins[i]));
            div += hat[flat] * xi;
            mag += xi.abs() * hat[flat].norm();
        }
        num = num.max(div.norm());
        den = den.max(mag);
    }
    Ok(if den == 0.0 { 0.0 } else { num / den })
}

/// The coefficient family as a [`TimeCoefficientField`], optionally scaled
/// by a constant amplitude.
#[derive(Debug, Clone)]
pub struct CounterexampleField {
    params: CounterexampleParams,
    amplitude: f64,
    channel: Vec<u8>,
}

impl CounterexampleField {
    pub fn new(params: CounterexampleParams) -> Self {
        Self::with_amplitude(params, 1.0)
    }

    pub fn with_amplitude(params: CounterexampleParams, amplitude: f64) -> Self {
        Self {
            channel: params.channel(),
            params,
            amplitude,
        }
    }
}

impl TimeCoefficientField for CounterexampleField {
    fn dim(&self) -> usize {
        self.params.n
    }

    fn coeff(&self, t: f64, idx: &WaveletIndex) -> f64 {
        if idx.eps != self.channel || !(t > 0.0) {
            return 0.0;
        }
        coeff(&self.params, t, idx.j, &idx.k).map_or(0.0, |v| self.amplitude * v)
    }

    fn active_scales(&self, t: f64) -> Option<(i32, i32)> {
        active_range(t)
    }

    fn level_energy(&self, t: f64, j: i32, root: &DyadicCube) -> f64 {
        match active_range(t) {
            Some((lo, hi)) if (lo..=hi).contains(&j) && j >= root.j => {
                let p = &self.params;
                // 2^{n(j−j₀)} cubes, each carrying (t^{−a}2^{−bj})².
                let log2 = p.nf() * (j - root.j) as f64 - 2.0 * p.b * j as f64;
                self.amplitude * self.amplitude * log2.exp2() * t.powf(-2.0 * p.a)
            }
            _ => 0.0,
        }
    }

    fn dyadic_breakpoints(&self) -> bool {
        true
    }

    fn carleson_tail(&self, root: &DyadicCube, last_piece: u32) -> Option<f64> {
        if check_convergent(&self.params).is_err() {
            return Some(f64::INFINITY);
        }
        let unscaled = (-self.params.nf() * root.j as f64).exp2();
        Some(self.amplitude * self.amplitude * unscaled * bbmo_tail(&self.params, last_piece))
    }
}

pub const SPOT_MAX_SCALE: i32 = 3;
pub const SPOT_POINTS: usize = 64;
const SPOT_DROP: f64 = 1e-13;

/// `u₂` re-expanded in the wavelet basis on the unit box for scales
/// `j' ≤ SPOT_MAX_SCALE`. Its scale-`j` piece is a fixed pattern `T_j`, so
/// at time `t` the coefficients are `t^{−a} Σ_{j ≤ min(J(t), SPOT_MAX_SCALE)}
/// 2^{−bj} T_j`.
pub struct ReanalyzedField {
    n: usize,
    a: f64,
    partial: Vec<StaticField>,
}

impl ReanalyzedField {
    fn stage(&self, t: f64) -> Option<&StaticField> {
        let (_, top) = active_range(t)?;
        self.partial.get((top.min(SPOT_MAX_SCALE) - 1) as usize)
    }

    fn saturated_energy(&self, root: &DyadicCube) -> f64 {
        let last = self.partial.last().expect("nonempty stages");
        match last.active_scales(0.0) {
            Some((lo, hi)) => (lo..=hi).map(|j| last.level_energy(0.0, j, root)).sum(),
            None => 0.0,
        }
    }
}

impl TimeCoefficientField for ReanalyzedField {
    fn dim(&self) -> usize {
        self.n
    }

    fn coeff(&self, t: f64, idx: &WaveletIndex) -> f64 {
        self.stage(t)
            .map_or(0.0, |s| t.powf(-self.a) * s.coeff(t, idx))
    }

    fn active_scales(&self, t: f64) -> Option<(i32, i32)> {
        self.stage(t)?.active_scales(t)
    }

    fn level_energy(&self, t: f64, j: i32, root: &DyadicCube) -> f64 {
        self.stage(t)
            .map_or(0.0, |s| t.powf(-2.0 * self.a) * s.level_energy(t, j, root))
    }

    fn dyadic_breakpoints(&self) -> bool {
        true
    }

    fn carleson_tail(&self, root: &DyadicCube, last_piece: u32) -> Option<f64> {
        // Below 4^{−SPOT_MAX_SCALE} the pattern is frozen and the energy is
        // E·t^{−2a}.
        if (last_piece as i32) + 1 < SPOT_MAX_SCALE {
            return None;
        }
        let s = 1.0 - 2.0 * self.a;
        Some(self.saturated_energy(root) * (-2.0 * s * (last_piece as f64 + 1.0)).exp2() / s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpotRoot {
    pub j0: i32,
    pub k0: Vec<i64>,
    pub value: f64,
    pub tail: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpotCheck {
    pub max_scale: i32,
    pub coefficients: usize,
    /// Max deviation of the re-analyzed `u₁` pattern from its exact
    /// coefficients (1 on its own scale and channel, 0 elsewhere).
    pub u1_recovery_error: f64,
    pub roots: Vec<SpotRoot>,
}

impl SpotCheck {
    pub fn max_value(&self) -> f64 {
        self.roots.iter().map(|r| r.value).fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.roots.iter().all(|r| r.value.is_finite() && r.tail.is_finite())
    }
}

fn box_cubes(n: usize, j: i32) -> Vec<DyadicCube> {
    DyadicCube::origin(n, 0).subcubes(j)
}

/// Re-analyzes the scale pieces of `u₁` and `u₂` from grid samples and
/// returns the `u₂` field together with the `u₁` recovery error.
pub fn reanalyze_u2(
    params: &CounterexampleParams,
    profile: &MeyerProfile,
) -> Result<(ReanalyzedField, f64)> {
    let n = params.n;
    let grid = GridSpec::new(n, 1.0, SPOT_POINTS)?;
    let poly = periodization_polynomial(profile, &params.channel())?;
    let channels = wavelet_channels(n);
    let mut u1_err = 0.0f64;
    let mut templates = Vec::new();
    for j in 1..=SPOT_MAX_SCALE {
        let mut template = CoefficientField::new(n, Provenance::ExplicitTable);
        for through in [false, true] {
            let mut spectrum = vec![Complex64::new(0.0, 0.0); grid.len()];
            let norm = (n as f64 * j as f64 / 2.0).exp2();
            add_scale_piece(&poly, &grid, j, norm, through, &mut spectrum)?;
            let samples = real_samples(&grid, spectrum);
            let sparse = sparse_spectrum(&grid, &analyze(&grid, &samples), 1e-12);
            for jp in 1..=SPOT_MAX_SCALE {
                for cube in box_cubes(n, jp) {
                    for eps in &channels {
                        let idx = WaveletIndex::new(eps.clone(), jp, cube.k.clone())?;
                        let c = analysis_coefficient(profile, &grid, &sparse, &idx)?;
                        if through {
                            if c.abs() > SPOT_DROP {
                                template.insert(idx, c)?;
                            }
                        } else {
                            let exact = if *eps == params.channel() && jp == j { 1.0 } else { 0.0 };
                            u1_err = u1_err.max((c - exact).abs());
                        }
                    }
                }
            }
        }
        templates.push(template);
    }
    let mut partial = Vec::new();
    let mut acc = CoefficientField::new(n, Provenance::AnalyticGenerator);
    for (i, template) in templates.iter().enumerate() {
        let w = (-params.b * (i as f64 + 1.0)).exp2();
        let mut next = acc.clone();
        for (idx, c) in template.entries() {
            next.insert(idx.clone(), acc.get(idx) + w * c)?;
        }
        acc = next;
        partial.push(StaticField::new(acc.clone()));
    }
    Ok((
        ReanalyzedField {
            n,
            a: params.a,
            partial,
        },
        u1_err,
    ))
}

/// Carleson quantity of re-analyzed `u₂` on every dyadic root of the unit
/// box down to `SPOT_MAX_SCALE`.
pub fn u2_spot_check(params: &CounterexampleParams, profile: &MeyerProfile) -> Result<SpotCheck> {
    let (field, u1_err) = reanalyze_u2(params, profile)?;
    let coefficients = field
        .partial
        .last()
        .map_or(0, |s| (1..=SPOT_MAX_SCALE).map(|j| {
            box_cubes(params.n, j)
                .iter()
                .filter(|c| s.level_energy(0.0, j, c) > 0.0)
                .count()
        }).sum());
    let spec = QuadratureSpec::for_field(&field);
    let mut roots = Vec::new();
    for j0 in 0..=SPOT_MAX_SCALE {
        for root in box_cubes(params.n, j0) {
            let CarlesonEstimate { value, tail, .. } =
                dyadic::carleson_time_integral(&field, &root, spec)?;
            roots.push(SpotRoot {
                j0,
                k0: root.k,
                value,
                tail,
            });
        }
    }
    Ok(SpotCheck {
        max_scale: SPOT_MAX_SCALE,
        coefficients,
        u1_recovery_error: u1_err,
        roots,
    })
}

pub const NINFTY_SWEEP: RangeInclusive<u32> = 1..=12;
pub const MAX_GRID_POINTS: usize = 1 << 22;
pub const BBMO_REL_TAIL: f64 = 1e-9;
pub const DIVERGENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub j0_max: u32,
    pub m_max: u32,
    pub m_range: (u32, u32),
    pub grid_points: usize,
    pub box_side: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            j0_max: 10,
            m_max: 40,
            m_range: (4, 16),
            grid_points: 256,
            box_side: 1.0,
        }
    }
}

/// Largest power of two `N ≤ cap` with `Nⁿ ≤ MAX_GRID_POINTS`.
fn capped_points(n: usize, cap: usize) -> usize {
    let mut p = cap.next_power_of_two();
    while p > 8 && (p > cap || p.checked_pow(n as u32).is_none_or(|v| v > MAX_GRID_POINTS)) {
        p /= 2;
    }
    p
}

fn finest_resolved(grid: &GridSpec) -> i32 {
    let mut j = 0;
    while grid.resolves_scale(j + 1) {
        j += 1;
    }
    j
}

/// Runs every check of the construction and collects the outcome.
pub fn verify_theorem(
    params: &CounterexampleParams,
    profile: &MeyerProfile,
    config: &VerifyConfig,
) -> Result<NormReport> {
    let n = params.n;
    let (m_lo, m_hi) = config.m_range;
    if m_hi < m_lo || ((m_hi - m_lo + 1) as usize) < MIN_CURVE_POINTS || m_lo == 0 {
        return Err(CounterexampleError::InvalidInput(format!(
            "m range {m_lo}..{m_hi} must start at 1 or later and hold at least {MIN_CURVE_POINTS} values"
        )));
    }
    let base_grid = GridSpec::new(n, config.box_side, config.grid_points)?;
    integer_box(&base_grid)?;
    let mut failures = Vec::new();

    // Carleson condition.
    let mut bbmo = Vec::new();
    for j0 in 0..=config.j0_max {
        bbmo.push(bbmo_converged(params, j0, config.m_max, BBMO_REL_TAIL)?);
    }
    let s0 = bbmo[0].value;
    for v in &bbmo {
        if !(v.value.is_finite() && v.relative_tail() <= BBMO_REL_TAIL) {
            failures.push(format!("S({}) = {} with tail {}", v.j0, v.value, v.tail));
        }
        if v.value > s0 * (1.0 + 1e-12) {
            failures.push(format!("S({}) = {} exceeds S(0) = {s0}", v.j0, v.value));
        }
        let major = bbmo_majorant(params, v.j0)?;
        if v.value > major * (1.0 + 1e-12) {
            failures.push(format!("S({}) = {} exceeds majorant {major}", v.j0, v.value));
        }
    }
    let spot = u2_spot_check(params, profile)?;
    if !spot.all_finite() || spot.u1_recovery_error > 1e-9 {
        failures.push(format!(
            "u2 spot check: max {} finite {} u1 recovery error {}",
            spot.max_value(),
            spot.all_finite(),
            spot.u1_recovery_error
        ));
    }
    let bbmo_pass = failures.is_empty();

    // Fixed-time blow-up.
    let (t_curve, c_curve) = blowup_curve(params, m_lo..=m_hi)?;
    let m_curve: Vec<f64> = (m_lo..=m_hi).map(f64::from).collect();
    let logc: Vec<f64> = c_curve.iter().map(|c| c.log2()).collect();
    let slope = least_squares_slope(&m_curve, &logc);
    let expected = 4.0 * params.a;
    let certificate = blowup_certificate(params, m_lo..=m_hi);
    if let Err(e) = &certificate {
        failures.push(e.to_string());
    }
    let blim_pass = certificate.is_ok();

    // Weighted sup norm.
    let before = failures.len();
    let p_sup = periodization_sup(profile, n)?;
    let mut ninfty = Vec::new();
    for m in NINFTY_SWEEP {
        let t = (-2.0 * m as f64).exp2();
        let bound = sup_norm_bound_with(params, p_sup.bound, t)?;
        let need = GridSpec::required_points(config.box_side, m as i32).max(config.grid_points);
        let grid_value = if need.checked_pow(n as u32).is_some_and(|v| v <= MAX_GRID_POINTS) {
            let grid = GridSpec::new(n, config.box_side, need)?;
            let mut samples = Some(synthesize_u1(params, profile, t, &grid)?);
            let v = dyadic::n_infty(&[t], 1.0, |_| Ok(vec![samples.take().unwrap_or_default()]))?;
            if v > bound {
                failures.push(format!("grid value {v} exceeds bound {bound} at t = {t}"));
            }
            Some(v)
        } else {
            None
        };
        if !bound.is_finite() {
            failures.push(format!("non-finite bound at t = {t}"));
        }
        ninfty.push(NinftyRow {
            t,
            bound,
            grid_value,
        });
    }
    if params.sup_norm_exponent() < 0.0 {
        failures.push(format!(
            "bound grows like t^{} as t -> 0",
            params.sup_norm_exponent()
        ));
    }
    let ninfty_pass = failures.len() == before;

    // Divergence.
    let div_grid = GridSpec::new(
        n,
        config.box_side,
        capped_points(n, config.grid_points),
    )?;
    let j_div = finest_resolved(&div_grid);
    let div_t = (-2.0 * j_div.max(1) as f64).exp2();
    div_grid.check_scale(j_div.max(1))?;
    let u = velocity_samples(params, profile, div_t, &div_grid)?;
    let residual = divergence_residual(&u, &div_grid)?;
    let div_pass = residual <= DIVERGENCE_TOL;
    if !div_pass {
        failures.push(format!("divergence residual {residual:e} above {DIVERGENCE_TOL:e}"));
    }

    let verdict = |ok| if ok { Verdict::Pass } else { Verdict::Fail };
    Ok(NormReport {
        params: ParamsRecord {
            n,
            a: params.a,
            b: params.b,
            transition_order: profile.transition().order(),
        },
        bbmo: bbmo
            .iter()
            .map(|v| BbmoRow {
                j0: v.j0,
                value: v.value,
                tail: v.tail,
            })
            .collect(),
        blim: (m_lo..=m_hi)
            .zip(t_curve.iter().zip(&c_curve))
            .map(|(m, (&t, &c))| BlimRow { m, t, c })
            .collect(),
        blowup: BlowupRow { slope, expected },
        ninfty,
        divergence_residual: residual,
        claims: Claims {
            bbmo: verdict(bbmo_pass),
            blim_fails: verdict(blim_pass),
            n_infty: verdict(ninfty_pass),
            div_free: verdict(div_pass),
        },
        diagnostics: Diagnostics {
            failures,
            periodization_sup: p_sup.bound,
            limit_constant: limit_constant(params),
            sup_norm_exponent: params.sup_norm_exponent(),
            divergence_grid: div_grid.points_per_side(),
            divergence_scale: j_div,
            spot_check_max: spot.max_value(),
            u1_recovery_error: spot.u1_recovery_error,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> CounterexampleParams {
        CounterexampleParams::validate(2, 0.25, 0.75).unwrap()
    }

    #[test]
    fn gate() {
        assert!(CounterexampleParams::validate(2, 0.25, 0.75).is_ok());
        assert!(CounterexampleParams::validate(3, 0.3, 1.2).is_ok());
        assert!(CounterexampleParams::validate(2, 0.45, 0.95).is_ok());
        assert!(matches!(
            CounterexampleParams::validate(2, 0.25, 0.4),
            Err(CounterexampleError::BelowLowerBound { lower, .. }) if (lower - 0.5).abs() < 1e-15
        ));
        assert!(matches!(
            CounterexampleParams::validate(2, 0.6, 0.9),
            Err(CounterexampleError::AOutOfRange(_))
        ));
        assert!(matches!(
            CounterexampleParams::validate(2, 0.25, 1.0),
            Err(CounterexampleError::AboveUpperBound { .. })
        ));
        assert!(matches!(
            CounterexampleParams::validate(1, 0.25, 0.3),
            Err(CounterexampleError::DimensionTooSmall(1))
        ));
        assert!(CounterexampleParams::validate(2, f64::NAN, 0.75).is_err());
    }

    #[test]
    fn max_scale_breakpoints() {
        for m in 0..30 {
            let t = (-2.0 * m as f64).exp2();
            assert_eq!(max_scale(t), m);
            assert_eq!(max_scale(t * 1.0000001), m - 1);
            assert_eq!(max_scale(t * 0.9999999), m);
        }
    }

    #[test]
    fn coefficient_examples() {
        let p = defaults();
        let v = coeff(&p, 0.25, 1, &[0, 0]).unwrap();
        assert!((v - (-0.25f64).exp2()).abs() < 1e-15);
        assert_eq!(coeff(&p, 0.25, 2, &[0, 0]).unwrap(), 0.0);
        assert_eq!(coeff(&p, 0.25, 0, &[0, 0]).unwrap(), 0.0);
        assert_eq!(coeff(&p, 1.5, 1, &[0, 0]).unwrap(), 0.0);
        assert_eq!(coeff(&p, 1.0, 1, &[0, 0]).unwrap(), 0.0);
        assert!(coeff(&p, 0.0, 1, &[0, 0]).is_err());
        assert_eq!(
            coeff(&p, 0.01, 2, &[5, -3]).unwrap(),
            coeff(&p, 0.01, 2, &[0, 0]).unwrap()
        );
    }

    #[test]
    fn bbmo_default_value() {
        let p = defaults();
        let v = bbmo_converged(&p, 0, 40, 1e-14).unwrap();
        let oracle = 2.0 + 2.0 * 2f64.sqrt();
        assert!((v.value - oracle).abs() < 1e-12, "{}", v.value);
        assert!(bbmo_closed_form(&p, 3, 7).is_err());
        assert!(bbmo_closed_form(&p, 3, 8).is_ok());
    }

    #[test]
    fn bbmo_divergence_is_structured() {
        let p = CounterexampleParams::unchecked(2, 0.25, 0.4);
        assert!(matches!(
            bbmo_closed_form(&p, 0, 40),
            Err(CounterexampleError::Divergent { .. })
        ));
        let field = CounterexampleField::new(p);
        let err = dyadic::carleson_time_quantity(
            &field,
            0,
            &[0, 0],
            QuadratureSpec::for_field(&field),
        );
        assert!(matches!(err, Err(DyadicError::Divergent { .. })));
    }

    #[test]
    fn blim_examples() {
        let p = defaults();
        let c = blim_closed_form(&p, (-20f64).exp2(), 0).unwrap();
        let oracle = 1024.0 * (1..=10).map(|j| (-1.5 * j as f64).exp2()).sum::<f64>();
        assert!((c - oracle).abs() < 1e-12 * oracle);
        assert!(c > 500.0);
        // One active scale for t ∈ (1/16, 1/4].
        for t in [0.25, 0.1, 0.0626] {
            let c = blim_closed_form(&p, t, 0).unwrap();
            let one = t.powf(-0.5) * (-1.5f64).exp2();
            assert!((c - one).abs() < 1e-14 * one);
        }
        assert_eq!(blim_closed_form(&p, 0.5, 0).unwrap(), 0.0);
        assert!(blim_closed_form(&p, 1.0, 0).is_err());
    }

    #[test]
    fn certificate_defaults_and_refusals() {
        let p = defaults();
        let cert = blowup_certificate(&p, 4..=16).unwrap();
        assert!((cert.slope - 1.0).abs() < 0.05);
        assert!((cert.limit_constant - 1.0 / (2f64.powf(1.5) - 1.0)).abs() < 1e-14);
        let zeros = vec![0.0; 5];
        let t: Vec<f64> = (1..=5).map(|m| (-2.0 * m as f64).exp2()).collect();
        assert!(certify_curve(&t, &zeros, 1.0).is_err());
        assert!(blowup_certificate(&p, 4..=6).is_err());
    }

    #[test]
    fn sup_bound_single_scale() {
        let p = defaults();
        let profile = MeyerProfile::default();
        let sup = periodization_sup(&profile, 2).unwrap();
        assert!((sup.sampled - 2.0).abs() < 1e-12);
        for t in [0.25, 0.2, 0.07] {
            let b = sup_norm_bound(&p, &profile, t).unwrap();
            let one = t.powf(0.25) * 2f64.powf(0.25) * sup.bound;
            assert!((b - one).abs() < 1e-14 * one);
        }
    }

    #[test]
    fn u1_mean_zero_and_attains_bound() {
        let p = defaults();
        let profile = MeyerProfile::default();
        let grid = GridSpec::new(2, 1.0, 64).unwrap();
        let t = 1.0 / 256.0;
        let u = synthesize_u1(&p, &profile, t, &grid).unwrap();
        let mean = u.iter().sum::<f64>() / u.len() as f64;
        assert!(mean.abs() < 1e-10);
        let sup = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let bound = sup_norm_bound(&p, &profile, t).unwrap() / t.sqrt();
        assert!(sup <= bound && sup > 0.99 * bound);
        let zero = synthesize_u1(&p, &profile, 2.0, &grid).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn u1_matches_direct_wavelet_sum() {
        // Brute force: every translate of Φ^e_{j,k} whose support origin lies
        // in the box, periodized exactly by the sampler.
        let p = defaults();
        let profile = MeyerProfile::default();
        let grid = GridSpec::new(2, 1.0, 32).unwrap();
        let t = 1.0 / 16.0;
        let fast = synthesize_u1(&p, &profile, t, &grid).unwrap();
        let mut slow = vec![0.0; grid.len()];
        for j in 1..=2 {
            let c = coeff(&p, t, j, &[0, 0]).unwrap();
            for cube in box_cubes(2, j) {
                let idx = WaveletIndex::new(vec![1, 1], j, cube.k).unwrap();
                let s = crate::meyer::sample_wavelet(&profile, &idx, &grid).unwrap();
                slow.iter_mut().zip(&s).for_each(|(a, b)| *a += c * b);
            }
        }
        let err = fast.iter().zip(&slow).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-8, "{err:e}");
    }

    #[test]
    fn multiplier_signs() {
        let x = 2.0 * std::f64::consts::PI * 4.0;
        assert_eq!(u2_multiplier(&[x, x]), Some(-1.0));
        assert_eq!(u2_multiplier(&[x, -x]), Some(1.0));
        assert_eq!(u2_multiplier(&[x, 0.0]), None);
        assert_eq!(u2_multiplier(&[x]), None);
    }

    #[test]
    fn u2_bounded_by_u1() {
        let p = defaults();
        let profile = MeyerProfile::default();
        let grid = GridSpec::new(2, 1.0, 64).unwrap();
        let t = 1.0 / 64.0;
        let u1 = synthesize_u1(&p, &profile, t, &grid).unwrap();
        let u2 = build_u2(&p, &profile, t, &grid).unwrap();
        let s1 = u1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let s2 = u2.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(s2 > 0.0 && s2 <= s1 * (1.0 + 1e-12));
        let bad = CounterexampleParams::unchecked(1, 0.25, 0.3);
        let g1 = GridSpec::new(1, 1.0, 64).unwrap();
        assert!(matches!(
            build_u2(&bad, &profile, t, &g1),
            Err(CounterexampleError::DimensionTooSmall(1))
        ));
    }

    #[test]
    fn divergence_examples() {
        let p = defaults();
        let profile = MeyerProfile::default();
        for points in [64, 128, 256] {
            let grid = GridSpec::new(2, 1.0, points).unwrap();
            let j = finest_resolved(&grid);
            let t = (-2.0 * j as f64).exp2();
            let u = velocity_samples(&p, &profile, t, &grid).unwrap();
            let r = divergence_residual(&u, &grid).unwrap();
            assert!(r <= DIVERGENCE_TOL, "N = {points}: {r:e}");
            let r1 = divergence_residual(&[u[0].clone(), vec![0.0; grid.len()]], &grid).unwrap();
            assert!(r1 > 0.5);
        }
        let grid = GridSpec::new(2, 1.0, 16).unwrap();
        let zero = vec![vec![0.0; grid.len()]; 2];
        assert_eq!(divergence_residual(&zero, &grid).unwrap(), 0.0);
        assert!(divergence_residual(&zero[..1], &grid).is_err());
    }

    #[test]
    fn synthesis_errors() {
        let p = defaults();
        let profile = MeyerProfile::default();
        let grid = GridSpec::new(2, 1.0, 64).unwrap();
        assert!(matches!(
            synthesize_u1(&p, &profile, 1e-9, &grid),
            Err(CounterexampleError::Meyer(MeyerError::Unresolved { scale: 14, .. }))
        ));
        let odd = GridSpec::new(2, 1.5, 64).unwrap();
        assert!(matches!(
            synthesize_u1(&p, &profile, 0.1, &odd),
            Err(CounterexampleError::NonIntegerBox(_))
        ));
    }

    #[test]
    fn spot_check_is_finite_and_recovers_u1() {
        let p = defaults();
        let profile = MeyerProfile::default();
        let spot = u2_spot_check(&p, &profile).unwrap();
        assert!(spot.u1_recovery_error < 1e-12, "{}", spot.u1_recovery_error);
        assert!(spot.all_finite());
        assert_eq!(spot.roots.len(), 1 + 4 + 16 + 64);
        assert!(spot.max_value() > 0.0);
    }

    #[test]
    fn field_coefficients_follow_closed_form() {
        let p = defaults();
        let f = CounterexampleField::with_amplitude(p, 2.0);
        let idx = WaveletIndex::new(vec![1, 1], 2, vec![3, -1]).unwrap();
        assert_eq!(f.coeff(0.01, &idx), 2.0 * coeff(&p, 0.01, 2, &[0, 0]).unwrap());
        let other = WaveletIndex::new(vec![1, 0], 2, vec![3, -1]).unwrap();
        assert_eq!(f.coeff(0.01, &other), 0.0);
        assert_eq!(f.active_scales(0.01), Some((1, 3)));
        assert_eq!(f.active_scales(0.5), None);
    }
}
