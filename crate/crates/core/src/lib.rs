//! Meyer wavelets, dyadic Carleson-type functionals, and an explicit
//! divergence-free field that stays in the Koch–Tataru space while its
//! fixed-time `BMO⁻¹` norm blows up as `t → 0`.

pub mod cli;
pub mod counterexample;
pub mod dyadic;
pub mod meyer;
pub mod quadrature;
pub mod report;
