//! One-dimensional spectral profiles of the Meyer scaling function and wavelet.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::MeyerError;

pub const TWO_PI_THIRDS: f64 = 2.0 * PI / 3.0;
pub const FOUR_PI_THIRDS: f64 = 4.0 * PI / 3.0;
pub const EIGHT_PI_THIRDS: f64 = 8.0 * PI / 3.0;

/// Transition order used when none is requested. Order 3 gives
/// `ν(x) = x⁴(35 − 84x + 70x² − 20x³)`.
pub const DEFAULT_TRANSITION_ORDER: u32 = 3;

/// Smooth step `ν: [0,1] → [0,1]` with `ν(x) + ν(1 − x) = 1`.
///
/// Order `r` is the polynomial `x^{r+1} Σ_{i=0}^{r} C(r+i, i) (1 − x)^i`,
/// whose first `r` derivatives vanish at both endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    order: u32,
    binomials: Vec<f64>,
}

impl Transition {
    pub fn new(order: u32) -> Result<Self, MeyerError> {
        if order < 1 {
            return Err(MeyerError::InvalidTransitionOrder(order));
        }
        let r = order as u64;
        let mut binomials = Vec::with_capacity(order as usize + 1);
        let mut c = 1.0f64;
        for i in 0..=r {
            binomials.push(c);
            // C(r+i+1, i+1) = C(r+i, i) * (r+i+1) / (i+1)
            c = c * (r + i + 1) as f64 / (i + 1) as f64;
        }
        Ok(Self { order, binomials })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Evaluates `ν(x)`, clamped to 0 below the interval and 1 above it.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let y = 1.0 - x;
        let poly = self.binomials.iter().rev().fold(0.0, |acc, &c| acc * y + c);
        x.powi(self.order as i32 + 1) * poly
    }
}

/// Spectral profiles `Ψ⁰`, `Ω` and `Ψ¹(ξ) = Ω(ξ) e^{−iξ/2}`.
///
/// Immutable after construction; cheap to clone and share between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct MeyerProfile {
    transition: Transition,
}

impl MeyerProfile {
    pub fn new(transition_order: u32) -> Result<Self, MeyerError> {
        Ok(Self {
            transition: Transition::new(transition_order)?,
        })
    }

    pub fn transition(&self) -> &Transition {
        &self.transition
    }

    /// Scaling-function profile: 1 on `|ξ| ≤ 2π/3`, 0 on `|ξ| ≥ 4π/3`.
    pub fn psi0(&self, xi: f64) -> f64 {
        let a = xi.abs();
        if a <= TWO_PI_THIRDS {
            1.0
        } else if a >= FOUR_PI_THIRDS {
            0.0
        } else {
            let x = 3.0 * a / (2.0 * PI) - 1.0;
            (FRAC_PI_2 * self.transition.eval(x)).cos()
        }
    }

    /// Wavelet modulus `Ω(ξ) = sqrt(Ψ⁰(ξ/2)² − Ψ⁰(ξ)²)`.
    ///
    /// The radicand is clamped at zero so roundoff at the band edges
    /// cannot produce NaN.
    pub fn omega(&self, xi: f64) -> f64 {
        let a = xi.abs();
        if a <= TWO_PI_THIRDS || a >= EIGHT_PI_THIRDS {
            return 0.0;
        }
        let outer = self.psi0(0.5 * a);
        let inner = self.psi0(a);
        (outer * outer - inner * inner).max(0.0).sqrt()
    }

    pub fn psi1(&self, xi: f64) -> Complex64 {
        Complex64::from_polar(self.omega(xi), -0.5 * xi)
    }

    /// `Ψ^ε(ξ)` for a single channel bit.
    pub fn psi(&self, bit: u8, xi: f64) -> Complex64 {
        if bit == 0 {
            Complex64::new(self.psi0(xi), 0.0)
        } else {
            self.psi1(xi)
        }
    }

    /// Closed frequency interval `[lo, hi]` (for `ξ ≥ 0`) carrying the
    /// support of `Ψ^bit`.
    pub fn positive_support(bit: u8) -> (f64, f64) {
        if bit == 0 {
            (0.0, FOUR_PI_THIRDS)
        } else {
            (TWO_PI_THIRDS, EIGHT_PI_THIRDS)
        }
    }

    /// Points where the profile of `bit` switches formula (positive side).
    pub fn breakpoints(bit: u8) -> &'static [f64] {
        if bit == 0 {
            &[TWO_PI_THIRDS, FOUR_PI_THIRDS]
        } else {
            &[TWO_PI_THIRDS, FOUR_PI_THIRDS, EIGHT_PI_THIRDS]
        }
    }

    /// `Σ_j |Ψ¹(2^{−j} ξ)|²` over the finitely many scales whose band
    /// contains `ξ`; equals 1 for every `ξ ≠ 0`.
    pub fn littlewood_paley_sum(&self, xi: f64) -> f64 {
        let a = xi.abs();
        if a == 0.0 {
            return 0.0;
        }
        let lo = (a / EIGHT_PI_THIRDS).log2().floor() as i32 - 1;
        let hi = (a / TWO_PI_THIRDS).log2().ceil() as i32 + 1;
        (lo..=hi)
            .map(|j| {
                let w = self.omega(a * (-j as f64).exp2());
                w * w
            })
            .sum()
    }
}

impl Default for MeyerProfile {
    fn default() -> Self {
        Self::new(DEFAULT_TRANSITION_ORDER).expect("default order is valid")
    }
}
