//! Invariant battery for a [`MeyerProfile`]: partition identities,
//! Littlewood–Paley completeness, orthonormality and periodization.

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use serde::Serialize;

use super::profile::{FOUR_PI_THIRDS, TWO_PI_THIRDS};
use super::{
    inner_product, periodization_polynomial, wavelet_channels, MeyerError, MeyerProfile,
    PointEvaluator, WaveletIndex,
};

pub const PARTITION_SAMPLES: usize = 10_000;
pub const PARTITION_TOL: f64 = 1e-12;
pub const LP_SAMPLES: usize = 50;
pub const LP_TOL: f64 = 1e-10;
pub const ORTHO_PAIRS_PER_DIM: usize = 20;
pub const ORTHO_TOL: f64 = 1e-6;
/// Translate truncation of the reported (non-gating) periodization probe.
pub const PERIODIZATION_PROBE_TRUNCATION: i64 = 30;

#[derive(Debug, Clone, Serialize)]
pub struct OrthonormalityProbe {
    pub a: WaveletIndex,
    pub b: WaveletIndex,
    pub expected: f64,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeyerCheckReport {
    pub transition_order: u32,
    pub seed: u64,
    pub partition_doubling_residual: f64,
    pub partition_reflection_residual: f64,
    pub littlewood_paley_residual: f64,
    pub orthonormality_max_error: f64,
    pub orthonormality: Vec<OrthonormalityProbe>,
    /// Max deviation of the `|k| ≤ 30` direct sum from the periodization
    /// polynomial. Reported only: its size is governed by the transition's
    /// finite smoothness, not by an identity.
    pub periodization_probe_residual: f64,
    pub passed: bool,
}

/// Max residuals of `Ω²(ξ) + Ω²(2ξ) − 1` and `Ω²(ξ) + Ω²(2π − ξ) − 1`
/// over `samples` equispaced points of `[2π/3, 4π/3]`.
pub fn partition_residuals(profile: &MeyerProfile, samples: usize) -> (f64, f64) {
    let mut doubling = 0.0f64;
    let mut reflection = 0.0f64;
    for i in 0..samples {
        let xi = TWO_PI_THIRDS + (FOUR_PI_THIRDS - TWO_PI_THIRDS) * i as f64 / (samples - 1) as f64;
        let w = profile.omega(xi).powi(2);
        doubling = doubling.max((w + profile.omega(2.0 * xi).powi(2) - 1.0).abs());
        reflection = reflection.max((w + profile.omega(2.0 * PI - xi).powi(2) - 1.0).abs());
    }
    (doubling, reflection)
}

fn random_index(rng: &mut StdRng, n: usize) -> WaveletIndex {
    let channels = wavelet_channels(n);
    let eps = channels[rng.random_range(0..channels.len())].clone();
    let j = rng.random_range(-1..=2);
    let k = (0..n).map(|_| rng.random_range(-3..=3)).collect();
    WaveletIndex { eps, j, k }
}

/// Seeded sample of index pairs: a third identical, a third at the same
/// scale, a third at neighbouring scales.
pub fn sample_pairs(seed: u64, n: usize, count: usize) -> Vec<(WaveletIndex, WaveletIndex)> {
    let mut rng = StdRng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    (0..count)
        .map(|i| {
            let a = random_index(&mut rng, n);
            let b = match i % 3 {
                0 => a.clone(),
                1 => {
                    let mut b = random_index(&mut rng, n);
                    b.j = a.j;
                    b
                }
                _ => {
                    let mut b = random_index(&mut rng, n);
                    b.j = a.j + if rng.random_range(0..2) == 0 { -1 } else { 1 };
                    b
                }
            };
            (a, b)
        })
        .collect()
}

pub fn orthonormality_probes(
    profile: &MeyerProfile,
    pairs: &[(WaveletIndex, WaveletIndex)],
) -> Result<Vec<OrthonormalityProbe>, MeyerError> {
    pairs
        .iter()
        .map(|(a, b)| {
            let value = inner_product(profile, a, b)?;
            let expected = if a == b { 1.0 } else { 0.0 };
            Ok(OrthonormalityProbe {
                a: a.clone(),
                b: b.clone(),
                expected,
                value,
                error: (value - expected).abs(),
            })
        })
        .collect()
}

/// Max deviation between `Σ_{|k| ≤ truncation} ψ(y − k)` and the
/// one-dimensional periodization polynomial at `points` equispaced `y`.
pub fn periodization_residual_1d(
    profile: &MeyerProfile,
    truncation: i64,
    points: usize,
) -> Result<f64, MeyerError> {
    let poly = periodization_polynomial(profile, &[1])?;
    let eval = PointEvaluator::new(profile, 1, truncation as f64 + 1.0);
    let mut worst = 0.0f64;
    for i in 0..points {
        let y = i as f64 / points as f64;
        let direct: f64 = (-truncation..=truncation).map(|k| eval.eval(y - k as f64)).sum();
        worst = worst.max((direct - poly.eval(&[y])).abs());
    }
    Ok(worst)
}

/// Runs the full battery. The report passes when the partition identities
/// hold to 1e−12, Littlewood–Paley completeness to 1e−10 and every
/// orthonormality probe to 1e−6.
pub fn meyer_check(profile: &MeyerProfile, seed: u64) -> Result<MeyerCheckReport, MeyerError> {
    let (doubling, reflection) = partition_residuals(profile, PARTITION_SAMPLES);

    let mut rng = StdRng::seed_from_u64(seed);
    let lp = (0..LP_SAMPLES)
        .map(|_| {
            let mag = 10f64.powf(rng.random_range(-1.0..=2.0));
            let xi = if rng.random_range(0..2) == 0 { mag } else { -mag };
            (profile.littlewood_paley_sum(xi) - 1.0).abs()
        })
        .fold(0.0, f64::max);

    let mut pairs = sample_pairs(seed, 1, ORTHO_PAIRS_PER_DIM);
    pairs.extend(sample_pairs(seed, 2, ORTHO_PAIRS_PER_DIM));
    let probes = orthonormality_probes(profile, &pairs)?;
    let ortho = probes.iter().map(|p| p.error).fold(0.0, f64::max);

    let periodization = periodization_residual_1d(profile, PERIODIZATION_PROBE_TRUNCATION, 16)?;

    let passed =
        doubling <= PARTITION_TOL && reflection <= PARTITION_TOL && lp <= LP_TOL && ortho <= ORTHO_TOL;
    Ok(MeyerCheckReport {
        transition_order: profile.transition().order(),
        seed,
        partition_doubling_residual: doubling,
        partition_reflection_residual: reflection,
        littlewood_paley_residual: lp,
        orthonormality_max_error: ortho,
        orthonormality: probes,
        periodization_probe_residual: periodization,
        passed,
    })
}
