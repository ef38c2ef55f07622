//! Dyadic cubes, wavelet coefficient fields and the norm functionals built
//! on them: the endpoint Triebel–Lizorkin norm, the time-integrated Carleson
//! quantity, the fixed-time `BMO⁻¹` quantity and the weighted sup norm.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::meyer::{MeyerError, WaveletIndex};
use crate::quadrature;

#[derive(Debug, Error)]
pub enum DyadicError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("root cube list is empty")]
    EmptyRoots,
    #[error("q must lie in [1, ∞], got {0}")]
    InvalidExponent(f64),
    #[error("root scale must be nonnegative, got {0}")]
    NegativeRootScale(i32),
    #[error("time {t} outside (0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },
    #[error("coefficient index {0:?} is not in the wavelet set (zero channel)")]
    ZeroChannel(WaveletIndex),
    #[error("time integral diverges near t = 0 (last piece ratio {ratio:.6})")]
    Divergent { ratio: f64 },
    #[error("time integral did not converge within {pieces} dyadic pieces")]
    NotConverged { pieces: u32 },
    #[error("malformed coefficient table: {0}")]
    Schema(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Sampling(#[from] MeyerError),
}

/// `Q_{j,k} = 2^{−j}k + 2^{−j}[0,1]ⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub j: i32,
    pub k: Vec<i64>,
}

impl DyadicCube {
    pub fn new(j: i32, k: Vec<i64>) -> Self {
        Self { j, k }
    }

    /// The cube `Q_{j,0}`.
    pub fn origin(n: usize, j: i32) -> Self {
        Self { j, k: vec![0; n] }
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    pub fn side_length(&self) -> f64 {
        (-self.j as f64).exp2()
    }

    pub fn volume(&self) -> f64 {
        (-(self.j as f64) * self.dim() as f64).exp2()
    }

    /// Whether `other ⊂ self`: `j ≥ j₀` and `⌊k_i 2^{j₀−j}⌋ = k₀_i`.
    pub fn contains(&self, other: &DyadicCube) -> bool {
        if other.j < self.j || other.dim() != self.dim() {
            return false;
        }
        let shift = (other.j - self.j) as u32;
        other
            .k
            .iter()
            .zip(&self.k)
            .all(|(&k, &k0)| floor_shift(k, shift) == k0)
    }

    /// The unique ancestor at the coarser scale `j0 ≤ self.j`.
    pub fn ancestor(&self, j0: i32) -> Option<DyadicCube> {
        if j0 > self.j {
            return None;
        }
        let shift = (self.j - j0) as u32;
        Some(DyadicCube {
            j: j0,
            k: self.k.iter().map(|&k| floor_shift(k, shift)).collect(),
        })
    }

    /// Every subcube at scale `j ≥ self.j`, by enumeration.
    pub fn subcubes(&self, j: i32) -> Vec<DyadicCube> {
        if j < self.j {
            return Vec::new();
        }
        let per_axis = 1i64 << (j - self.j);
        let n = self.dim();
        let total = (per_axis as u64).pow(n as u32);
        (0..total)
            .map(|mut code| {
                let mut k = vec![0i64; n];
                for i in (0..n).rev() {
                    k[i] = self.k[i] * per_axis + (code % per_axis as u64) as i64;
                    code /= per_axis as u64;
                }
                DyadicCube { j, k }
            })
            .collect()
    }

    /// Number of subcubes at scale `j`, `2^{n(j−j₀)}` (as a float so large
    /// scale gaps do not overflow).
    pub fn subcube_count(&self, j: i32) -> f64 {
        if j < self.j {
            0.0
        } else {
            ((self.dim() as f64) * (j - self.j) as f64).exp2()
        }
    }
}

fn floor_shift(k: i64, shift: u32) -> i64 {
    if shift >= 63 {
        if k < 0 {
            -1
        } else {
            0
        }
    } else {
        k >> shift
    }
}

impl From<&WaveletIndex> for DyadicCube {
    fn from(idx: &WaveletIndex) -> Self {
        DyadicCube {
            j: idx.j,
            k: idx.k.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ExplicitTable,
    AnalyticGenerator,
}

/// Finite map from wavelet index to real coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    n: usize,
    entries: BTreeMap<WaveletIndex, f64>,
    provenance: Provenance,
}

#[derive(Debug, Serialize, Deserialize)]
struct TableEntry {
    eps: Vec<u8>,
    j: i32,
    k: Vec<i64>,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Table {
    n: usize,
    entries: Vec<TableEntry>,
}

impl CoefficientField {
    pub fn new(n: usize, provenance: Provenance) -> Self {
        Self {
            n,
            entries: BTreeMap::new(),
            provenance,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&WaveletIndex, f64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    pub fn get(&self, idx: &WaveletIndex) -> f64 {
        self.entries.get(idx).copied().unwrap_or(0.0)
    }

    /// Inserts (or overwrites) a coefficient. Indices must have dimension
    /// `n` and a nonzero channel.
    pub fn insert(&mut self, idx: WaveletIndex, value: f64) -> Result<(), DyadicError> {
        if idx.dim() != self.n {
            return Err(DyadicError::DimensionMismatch {
                expected: self.n,
                found: idx.dim(),
            });
        }
        if !idx.is_wavelet() {
            return Err(DyadicError::ZeroChannel(idx));
        }
        self.entries.insert(idx, value);
        Ok(())
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|(k, &v)| (k.clone(), v * lambda)).collect(),
            provenance: self.provenance,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self, DyadicError> {
        let table: Table =
            serde_json::from_str(text).map_err(|e| DyadicError::Schema(e.to_string()))?;
        let mut field = CoefficientField::new(table.n, Provenance::ExplicitTable);
        for e in table.entries {
            if !e.value.is_finite() {
                return Err(DyadicError::Schema(format!("non-finite value {}", e.value)));
            }
            let idx = WaveletIndex::new(e.eps, e.j, e.k)
                .map_err(|err| DyadicError::Schema(err.to_string()))?;
            field
                .insert(idx, e.value)
                .map_err(|err| DyadicError::Schema(err.to_string()))?;
        }
        Ok(field)
    }

    pub fn to_json_string(&self) -> String {
        let table = Table {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|(idx, &value)| TableEntry {
                    eps: idx.eps.clone(),
                    j: idx.j,
                    k: idx.k.clone(),
                    value,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&table).expect("table serializes")
    }

    pub fn load(path: &Path) -> Result<Self, DyadicError> {
        let text = std::fs::read_to_string(path).map_err(|source| DyadicError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    /// Candidate supremum cubes for a finite table: every ancestor of every
    /// entry, from the finest entry scale down to the first scale at which
    /// all ancestors sit in the `2ⁿ` cubes touching the origin. Coarser
    /// cubes only dilute the same content, so the supremum is attained here.
    pub fn hull_roots(&self) -> Vec<DyadicCube> {
        let Some(j_max) = self.entries.keys().map(|i| i.j).max() else {
            return Vec::new();
        };
        let cubes: Vec<DyadicCube> = self.entries.keys().map(DyadicCube::from).collect();
        let mut roots = std::collections::BTreeSet::new();
        let mut j0 = j_max;
        loop {
            let level: Vec<DyadicCube> = cubes.iter().filter_map(|c| c.ancestor(j0)).collect();
            let settled = level.len() == cubes.len()
                && level.iter().all(|c| c.k.iter().all(|&k| k == 0 || k == -1));
            roots.extend(level);
            if settled || j0 < j_max - 64 {
                break;
            }
            j0 -= 1;
        }
        roots.into_iter().collect()
    }
}

/// Regularity index `γ` and summability `q ∈ [1, ∞]` of `Ḟ^{γ,q}_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub gamma: f64,
    pub q: f64,
}

impl SpaceParams {
    pub fn new(gamma: f64, q: f64) -> Result<Self, DyadicError> {
        if q.is_nan() || q < 1.0 {
            return Err(DyadicError::InvalidExponent(q));
        }
        Ok(Self { gamma, q })
    }

    /// `BMO⁻¹ = Ḟ^{−1,2}_∞`.
    pub fn bmo_minus_one() -> Self {
        Self { gamma: -1.0, q: 2.0 }
    }
}

/// Value for a single root cube:
/// `{|Q|⁻¹ Σ_{Q_{j,k} ⊂ Q} 2^{jq(γ + n/2 − n/q)} |a|^q}^{1/q}`, or for
/// `q = ∞` the supremum of `2^{j(γ + n/2)} |a|` over the cube.
pub fn tl_root_value(field: &CoefficientField, params: SpaceParams, root: &DyadicCube) -> f64 {
    let n = field.dim() as f64;
    let inside = field
        .entries()
        .filter(|(idx, _)| root.contains(&DyadicCube::from(*idx)));
    if params.q.is_infinite() {
        return inside
            .map(|(idx, a)| (idx.j as f64 * (params.gamma + n / 2.0)).exp2() * a.abs())
            .fold(0.0, f64::max);
    }
    let q = params.q;
    let sum: f64 = inside
        .map(|(idx, a)| (idx.j as f64 * q * (params.gamma + n / 2.0 - n / q)).exp2() * a.abs().powf(q))
        .sum();
    ((n * root.j as f64).exp2() * sum).powf(1.0 / q)
}

/// Wavelet-coefficient norm of `Ḟ^{γ,q}_∞`, with the supremum restricted
/// to the supplied root cubes.
pub fn tl_norm(
    field: &CoefficientField,
    params: SpaceParams,
    roots: &[DyadicCube],
) -> Result<f64, DyadicError> {
    if roots.is_empty() {
        return Err(DyadicError::EmptyRoots);
    }
    if let Some(bad) = roots.iter().find(|r| r.dim() != field.dim()) {
        return Err(DyadicError::DimensionMismatch {
            expected: field.dim(),
            found: bad.dim(),
        });
    }
    Ok(roots
        .par_iter()
        .map(|r| tl_root_value(field, params, r))
        .reduce(|| 0.0, f64::max))
}

/// Time-dependent coefficients `a^ε_{j,k}(t)` of one vector component.
pub trait TimeCoefficientField: Sync {
    fn dim(&self) -> usize;

    fn coeff(&self, t: f64, idx: &WaveletIndex) -> f64;

    /// Inclusive scale range carrying nonzero coefficients at time `t`.
    fn active_scales(&self, t: f64) -> Option<(i32, i32)>;

    /// `Σ |a^ε_{j,k}(t)|²` over populated channels and all `k` with
    /// `Q_{j,k} ⊂ root`.
    fn level_energy(&self, t: f64, j: i32, root: &DyadicCube) -> f64;

    /// True when the active set and `k`-structure only change at the
    /// dyadic times `t = 4^{−m}`, so each piece `(4^{−(m+1)}, 4^{−m}]` has a
    /// smooth integrand.
    fn dyadic_breakpoints(&self) -> bool {
        false
    }

    /// Analytic bound on `∫₀^{4^{−(m+1)}} Σ_{j ≥ root.j} level_energy dt`,
    /// i.e. everything below the last piece integrated. `None` when the
    /// generator has no closed-form tail; `Some(∞)` flags divergence.
    fn carleson_tail(&self, _root: &DyadicCube, _last_piece: u32) -> Option<f64> {
        None
    }
}

/// Coefficients that depend only on `(t, j)` for a fixed set of channels,
/// so per-level sums use the exact subcube count `2^{n(j−j₀)}`.
pub struct ScaleProfileField<A, S> {
    n: usize,
    channels: Vec<Vec<u8>>,
    amplitude: A,
    scales: S,
    dyadic: bool,
}

impl<A, S> ScaleProfileField<A, S>
where
    A: Fn(f64, i32) -> f64 + Sync,
    S: Fn(f64) -> Option<(i32, i32)> + Sync,
{
    pub fn new(n: usize, channels: Vec<Vec<u8>>, amplitude: A, scales: S, dyadic: bool) -> Self {
        Self {
            n,
            channels,
            amplitude,
            scales,
            dyadic,
        }
    }
}

impl<A, S> TimeCoefficientField for ScaleProfileField<A, S>
where
    A: Fn(f64, i32) -> f64 + Sync,
    S: Fn(f64) -> Option<(i32, i32)> + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }

    fn coeff(&self, t: f64, idx: &WaveletIndex) -> f64 {
        match (self.scales)(t) {
            Some((lo, hi)) if (lo..=hi).contains(&idx.j) && self.channels.contains(&idx.eps) => {
                (self.amplitude)(t, idx.j)
            }
            _ => 0.0,
        }
    }

    fn active_scales(&self, t: f64) -> Option<(i32, i32)> {
        (self.scales)(t)
    }

    fn level_energy(&self, t: f64, j: i32, root: &DyadicCube) -> f64 {
        match (self.scales)(t) {
            Some((lo, hi)) if (lo..=hi).contains(&j) && j >= root.j => {
                let a = (self.amplitude)(t, j);
                self.channels.len() as f64 * root.subcube_count(j) * a * a
            }
            _ => 0.0,
        }
    }

    fn dyadic_breakpoints(&self) -> bool {
        self.dyadic
    }
}

/// A time-independent coefficient table viewed as a time field.
pub struct StaticField {
    field: CoefficientField,
    by_scale: BTreeMap<i32, Vec<(DyadicCube, f64)>>,
}

impl StaticField {
    pub fn new(field: CoefficientField) -> Self {
        let mut by_scale: BTreeMap<i32, Vec<(DyadicCube, f64)>> = BTreeMap::new();
        for (idx, a) in field.entries() {
            by_scale
                .entry(idx.j)
                .or_default()
                .push((DyadicCube::from(idx), a));
        }
        Self { field, by_scale }
    }

    fn total_energy(&self, root: &DyadicCube) -> f64 {
        self.by_scale
            .keys()
            .map(|&j| self.level_energy(0.0, j, root))
            .sum()
    }
}

impl TimeCoefficientField for StaticField {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn coeff(&self, _t: f64, idx: &WaveletIndex) -> f64 {
        self.field.get(idx)
    }

    fn active_scales(&self, _t: f64) -> Option<(i32, i32)> {
        let lo = *self.by_scale.keys().next()?;
        let hi = *self.by_scale.keys().next_back()?;
        Some((lo, hi))
    }

    fn level_energy(&self, _t: f64, j: i32, root: &DyadicCube) -> f64 {
        self.by_scale.get(&j).map_or(0.0, |cubes| {
            cubes
                .iter()
                .filter(|(c, _)| root.contains(c))
                .map(|(_, a)| a * a)
                .sum()
        })
    }

    fn dyadic_breakpoints(&self) -> bool {
        true
    }

    fn carleson_tail(&self, root: &DyadicCube, last_piece: u32) -> Option<f64> {
        Some(self.total_energy(root) * (-2.0 * (last_piece as f64 + 1.0)).exp2())
    }
}

/// How `carleson_time_quantity` integrates over `(0, 4^{−j₀}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureSpec {
    /// 20-point Gauss–Legendre on each dyadic piece `(4^{−(m+1)}, 4^{−m}]`.
    DyadicPiecewise { rel_tail: f64, max_pieces: u32 },
    /// Composite midpoint on each dyadic piece, refined until successive
    /// estimates agree to `rel_tol`.
    AdaptiveMidpoint { rel_tol: f64, max_pieces: u32 },
}

impl QuadratureSpec {
    pub const DEFAULT_REL_TAIL: f64 = 1e-9;
    pub const DEFAULT_MIDPOINT_TOL: f64 = 1e-6;
    pub const DEFAULT_MAX_PIECES: u32 = 20_000;

    /// Piecewise-exact rule when the field declares dyadic breakpoints,
    /// adaptive midpoint otherwise.
    pub fn for_field<F: TimeCoefficientField + ?Sized>(field: &F) -> Self {
        if field.dyadic_breakpoints() {
            QuadratureSpec::DyadicPiecewise {
                rel_tail: Self::DEFAULT_REL_TAIL,
                max_pieces: Self::DEFAULT_MAX_PIECES,
            }
        } else {
            QuadratureSpec::AdaptiveMidpoint {
                rel_tol: Self::DEFAULT_MIDPOINT_TOL,
                max_pieces: Self::DEFAULT_MAX_PIECES,
            }
        }
    }
}

/// Result of the time-integrated Carleson quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarlesonEstimate {
    pub value: f64,
    /// Bound (or estimate, for fields without an analytic tail) on the
    /// neglected part of the integral, in the same units as `value`.
    pub tail: f64,
    pub pieces: u32,
}

fn energy_at<F: TimeCoefficientField + ?Sized>(field: &F, t: f64, root: &DyadicCube) -> f64 {
    match field.active_scales(t) {
        Some((lo, hi)) => (lo.max(root.j)..=hi)
            .map(|j| field.level_energy(t, j, root))
            .sum(),
        None => 0.0,
    }
}

fn midpoint_piece<F: TimeCoefficientField + ?Sized>(
    field: &F,
    root: &DyadicCube,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> f64 {
    let rule = |panels: usize| {
        let h = (hi - lo) / panels as f64;
        (0..panels)
            .map(|i| energy_at(field, lo + (i as f64 + 0.5) * h, root))
            .sum::<f64>()
            * h
    };
    let mut panels = 8;
    let mut prev = rule(panels);
    while panels < 1 << 20 {
        panels *= 2;
        let next = rule(panels);
        if (next - prev).abs() <= rel_tol * next.abs() {
            return next;
        }
        prev = next;
    }
    prev
}

/// `2^{nj₀} ∫₀^{2^{−2j₀}} Σ_{Q_{j,k} ⊂ Q_{j₀,k₀}} |a(t)|² dt` with tail
/// accounting.
pub fn carleson_time_integral<F: TimeCoefficientField + ?Sized>(
    field: &F,
    root: &DyadicCube,
    quadrature: QuadratureSpec,
) -> Result<CarlesonEstimate, DyadicError> {
    if root.j < 0 {
        return Err(DyadicError::NegativeRootScale(root.j));
    }
    if root.dim() != field.dim() {
        return Err(DyadicError::DimensionMismatch {
            expected: field.dim(),
            found: root.dim(),
        });
    }
    let (rel, max_pieces) = match quadrature {
        QuadratureSpec::DyadicPiecewise {
            rel_tail,
            max_pieces,
        } => (rel_tail, max_pieces),
        QuadratureSpec::AdaptiveMidpoint {
            rel_tol,
            max_pieces,
        } => (rel_tol, max_pieces),
    };
    let j0 = root.j as u32;
    let mut acc = 0.0;
    let mut prev_piece = f64::NAN;
    let mut ratio = f64::NAN;
    let mut m = j0;
    loop {
        let hi = (-2.0 * m as f64).exp2();
        let lo = 0.25 * hi;
        let piece = match quadrature {
            QuadratureSpec::DyadicPiecewise { .. } => {
                quadrature::gauss20(lo, hi, |t| energy_at(field, t, root))
            }
            QuadratureSpec::AdaptiveMidpoint { rel_tol, .. } => {
                midpoint_piece(field, root, lo, hi, rel_tol)
            }
        };
        acc += piece;
        if prev_piece > 0.0 && piece > 0.0 {
            ratio = piece / prev_piece;
        }
        prev_piece = piece;

        let tail = match field.carleson_tail(root, m) {
            Some(t) if t.is_infinite() => return Err(DyadicError::Divergent { ratio }),
            Some(t) => Some(t),
            None if m >= j0 + 3 && ratio.is_finite() && ratio < 1.0 => {
                Some(piece * ratio / (1.0 - ratio))
            }
            None if m >= j0 + 3 && acc == 0.0 && piece == 0.0 && field.active_scales(lo).is_none() => {
                Some(0.0)
            }
            None => None,
        };
        if let Some(tail) = tail {
            if tail <= rel * acc || (acc == 0.0 && tail == 0.0) {
                let scale = (field.dim() as f64 * root.j as f64).exp2();
                return Ok(CarlesonEstimate {
                    value: scale * acc,
                    tail: scale * tail,
                    pieces: m - j0 + 1,
                });
            }
        }
        if m - j0 + 1 >= max_pieces {
            if ratio.is_finite() && ratio >= 1.0 {
                return Err(DyadicError::Divergent { ratio });
            }
            return Err(DyadicError::NotConverged { pieces: max_pieces });
        }
        m += 1;
    }
}

/// The Carleson quantity of one component at root `Q_{j₀,k₀}`.
pub fn carleson_time_quantity<F: TimeCoefficientField + ?Sized>(
    field: &F,
    j0: i32,
    k0: &[i64],
    quadrature: QuadratureSpec,
) -> Result<f64, DyadicError> {
    carleson_time_integral(field, &DyadicCube::new(j0, k0.to_vec()), quadrature).map(|e| e.value)
}

/// `2^{nj₀} Σ_{Q_{j,k} ⊂ Q_{j₀,k₀}} 2^{−2j} |a(t)|²`: the squared fixed-time
/// `BMO⁻¹` quantity on one root cube.
pub fn fixed_time_bmo_quantity<F: TimeCoefficientField + ?Sized>(
    field: &F,
    t: f64,
    j0: i32,
    k0: &[i64],
) -> Result<f64, DyadicError> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(DyadicError::TimeOutOfRange { t, horizon: 1.0 });
    }
    if j0 < 0 {
        return Err(DyadicError::NegativeRootScale(j0));
    }
    if k0.len() != field.dim() {
        return Err(DyadicError::DimensionMismatch {
            expected: field.dim(),
            found: k0.len(),
        });
    }
    let root = DyadicCube::new(j0, k0.to_vec());
    let Some((lo, hi)) = field.active_scales(t) else {
        return Ok(0.0);
    };
    let sum: f64 = (lo.max(j0)..=hi)
        .map(|j| (-2.0 * j as f64).exp2() * field.level_energy(t, j, &root))
        .sum();
    Ok((field.dim() as f64 * j0 as f64).exp2() * sum)
}

/// Maximum of a per-component quantity (the `sup over i`).
pub fn max_over_components<T, E>(
    components: &[T],
    f: impl Fn(&T) -> Result<f64, E>,
) -> Result<f64, E> {
    components
        .iter()
        .map(f)
        .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))
}

/// Samples of every vector component at one time.
pub type ComponentSamples = Vec<Vec<f64>>;

/// Per-time values of `t^{1/2} ‖u(t)‖_∞`, with the sup norm of the
/// Euclidean magnitude taken over the samples.
pub fn n_infty_profile<S>(
    t_grid: &[f64],
    horizon: f64,
    mut sample: S,
) -> Result<Vec<(f64, f64)>, DyadicError>
where
    S: FnMut(f64) -> Result<ComponentSamples, DyadicError>,
{
    t_grid
        .iter()
        .map(|&t| {
            if !(t > 0.0 && t <= horizon) {
                return Err(DyadicError::TimeOutOfRange { t, horizon });
            }
            let comps = sample(t)?;
            let points = comps.first().map_or(0, Vec::len);
            if let Some(bad) = comps.iter().find(|c| c.len() != points) {
                return Err(DyadicError::DimensionMismatch {
                    expected: points,
                    found: bad.len(),
                });
            }
            let sup = (0..points)
                .map(|p| comps.iter().map(|c| c[p] * c[p]).sum::<f64>().sqrt())
                .fold(0.0, f64::max);
            Ok((t, t.sqrt() * sup))
        })
        .collect()
}

/// `max_{t ∈ t_grid} t^{1/2} ‖u(t)‖_∞` over sampled fields: a lower bound
/// for `N_{∞,T}(u) = sup_{0<t≤T} t^{1/2}‖u(t)‖_∞`.
pub fn n_infty<S>(t_grid: &[f64], horizon: f64, sample: S) -> Result<f64, DyadicError>
where
    S: FnMut(f64) -> Result<ComponentSamples, DyadicError>,
{
    Ok(n_infty_profile(t_grid, horizon, sample)?
        .into_iter()
        .map(|(_, v)| v)
        .fold(0.0, f64::max))
}
