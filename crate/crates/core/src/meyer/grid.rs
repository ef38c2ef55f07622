//! Periodic sampling grids and their discrete Fourier transforms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::profile::EIGHT_PI_THIRDS;
use super::MeyerError;

/// Largest dimension the grid samplers target.
pub const MAX_GRID_DIM: usize = 3;

/// Uniform periodic grid on `[0, L)ⁿ` with `N` points per side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    box_side: f64,
    points_per_side: usize,
}

impl GridSpec {
    pub fn new(n: usize, box_side: f64, points_per_side: usize) -> Result<Self, MeyerError> {
        if n == 0 || n > MAX_GRID_DIM {
            return Err(MeyerError::InvalidGrid(format!(
                "dimension {n} outside 1..={MAX_GRID_DIM}"
            )));
        }
        if !(box_side.is_finite() && box_side > 0.0) {
            return Err(MeyerError::InvalidGrid(format!(
                "box side must be positive, got {box_side}"
            )));
        }
        if points_per_side < 8 || !points_per_side.is_power_of_two() {
            return Err(MeyerError::InvalidGrid(format!(
                "points per side must be a power of two >= 8, got {points_per_side}"
            )));
        }
        Ok(Self {
            n,
            box_side,
            points_per_side,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn box_side(&self) -> f64 {
        self.box_side
    }

    pub fn points_per_side(&self) -> usize {
        self.points_per_side
    }

    /// Total number of grid points, `Nⁿ`.
    pub fn len(&self) -> usize {
        self.points_per_side.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.box_side / self.points_per_side as f64
    }

    /// Largest angular frequency represented without aliasing, `πN/L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.points_per_side as f64 / self.box_side
    }

    /// Whether a scale-`j` wavelet's spectrum `[−2^j·8π/3, 2^j·8π/3]` fits
    /// inside the grid's dual lattice.
    pub fn resolves_scale(&self, j: i32) -> bool {
        (j as f64).exp2() * EIGHT_PI_THIRDS <= self.nyquist()
    }

    /// Smallest power-of-two side count resolving scale `j` on this box.
    pub fn required_points(box_side: f64, j: i32) -> usize {
        let need = (j as f64).exp2() * EIGHT_PI_THIRDS * box_side / PI;
        let mut p = 8usize;
        while (p as f64) < need {
            p *= 2;
        }
        p
    }

    pub fn check_scale(&self, j: i32) -> Result<(), MeyerError> {
        if self.resolves_scale(j) {
            Ok(())
        } else {
            Err(MeyerError::Unresolved {
                scale: j,
                points: self.points_per_side,
                required: Self::required_points(self.box_side, j),
            })
        }
    }

    /// Signed Fourier mode of a DFT bin; the Nyquist bin maps to `−N/2`.
    pub fn mode_of_bin(&self, bin: usize) -> i64 {
        let n = self.points_per_side;
        if bin < n / 2 {
            bin as i64
        } else {
            bin as i64 - n as i64
        }
    }

    /// DFT bin holding a signed mode, if the mode is representable.
    pub fn bin_of_mode(&self, mode: i64) -> Option<usize> {
        let n = self.points_per_side as i64;
        if mode >= -n / 2 && mode < n / 2 {
            Some(mode.rem_euclid(n) as usize)
        } else {
            None
        }
    }

    /// Angular frequency `2πm/L` of a signed mode.
    pub fn frequency_of_mode(&self, mode: i64) -> f64 {
        2.0 * PI * mode as f64 / self.box_side
    }

    /// Row-major multi-index of a flat index; the last axis varies fastest.
    pub fn unflatten(&self, mut flat: usize, out: &mut [usize]) {
        let n = self.points_per_side;
        for slot in out.iter_mut().rev() {
            *slot = flat % n;
            flat /= n;
        }
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter()
            .fold(0, |acc, &i| acc * self.points_per_side + i)
    }

    /// Spatial coordinates of a flat index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.n];
        self.unflatten(flat, &mut idx);
        idx.iter().map(|&i| i as f64 * self.spacing()).collect()
    }

    /// Angular frequency vector of a flat DFT index.
    pub fn frequency(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.n];
        self.unflatten(flat, &mut idx);
        idx.iter()
            .map(|&b| self.frequency_of_mode(self.mode_of_bin(b)))
            .collect()
    }

    /// Flat DFT index of a signed mode vector.
    pub fn flat_of_modes(&self, modes: &[i64]) -> Option<usize> {
        let mut acc = 0usize;
        for &m in modes {
            acc = acc * self.points_per_side + self.bin_of_mode(m)?;
        }
        Some(acc)
    }
}

fn transform_axes(grid: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let n = grid.points_per_side;
    let dim = grid.n;
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[start + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[start + i * stride] = *v;
                }
            }
        }
    }
}

/// Synthesizes grid samples from Fourier-series coefficients:
/// `f(x) = Σ_m c_m e^{2πi m·x/L}`, evaluated at every grid point.
pub fn synthesize(grid: &GridSpec, mut coefficients: Vec<Complex64>) -> Vec<Complex64> {
    assert_eq!(coefficients.len(), grid.len(), "spectrum does not match grid");
    transform_axes(grid, &mut coefficients, true);
    coefficients
}

/// Fourier-series coefficients of real grid samples (normalized by `Nⁿ`).
pub fn analyze(grid: &GridSpec, samples: &[f64]) -> Vec<Complex64> {
    assert_eq!(samples.len(), grid.len(), "samples do not match grid");
    let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_axes(grid, &mut data, false);
    let scale = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
    data
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(2, 1.0, 6).is_err());
        assert!(GridSpec::new(2, 1.0, 4).is_err());
        assert!(GridSpec::new(4, 1.0, 8).is_err());
        assert!(GridSpec::new(1, 0.0, 8).is_err());
        assert!(GridSpec::new(1, 1.0, 8).is_ok());
    }

    #[test]
    fn modes_round_trip() {
        let g = GridSpec::new(1, 1.0, 16).unwrap();
        for b in 0..16 {
            assert_eq!(g.bin_of_mode(g.mode_of_bin(b)), Some(b));
        }
        assert_eq!(g.bin_of_mode(8), None);
        assert_eq!(g.mode_of_bin(8), -8);
    }

    #[test]
    fn single_mode_synthesis() {
        let g = GridSpec::new(2, 1.0, 16).unwrap();
        let mut spec = vec![Complex64::new(0.0, 0.0); g.len()];
        spec[g.flat_of_modes(&[1, -2]).unwrap()] = Complex64::new(1.0, 0.0);
        let samples = synthesize(&g, spec);
        for (flat, v) in samples.iter().enumerate() {
            let x = g.point(flat);
            let phase = 2.0 * PI * (x[0] - 2.0 * x[1]);
            assert!((v.re - phase.cos()).abs() < 1e-12);
            assert!((v.im - phase.sin()).abs() < 1e-12);
        }
        let re: Vec<f64> = samples.iter().map(|c| c.re).collect();
        let coeffs = analyze(&g, &re);
        let hit = coeffs[g.flat_of_modes(&[1, -2]).unwrap()];
        assert!((hit.re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn scale_resolution() {
        let g = GridSpec::new(1, 1.0, 8).unwrap();
        assert!(g.resolves_scale(1));
        assert!(!g.resolves_scale(2));
        assert_eq!(GridSpec::required_points(1.0, 2), 16);
        assert!(matches!(
            g.check_scale(2),
            Err(MeyerError::Unresolved { required: 16, .. })
        ));
    }
}
