//! The entangled two-particle Gaussian initial state.
//!
//! The wavefunction is a product of Gaussians in the relative and
//! center-of-mass coordinates,
//!
//! ```text
//! Ψ(x₁, x₂) ∝ exp[-(x₁-x₂)²/(4s²)] · exp[-(x₁+x₂)²/(16d²)],
//! ```
//!
//! so `s` controls the relative-coordinate width and `d` the center-of-mass
//! width. The state is entangled unless `s = 2d`, where it factorizes into a
//! product of single-particle Gaussians. Its second moments are conveniently
//! expressed through
//!
//! ```text
//! ε± = 1/(4s²) ± 1/(16d²).
//! ```

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::symplectic::CovarianceMatrix;

/// Physical constants entering the master equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_boltzmann: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, k_boltzmann: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "hbar must be a positive finite number, got {hbar}"
            )));
        }
        if !(k_boltzmann > 0.0 && k_boltzmann.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "k_boltzmann must be a positive finite number, got {k_boltzmann}"
            )));
        }
        Ok(Self { hbar, k_boltzmann })
    }

    /// Natural units: ħ = k = 1.
    pub fn natural() -> Self {
        Self {
            hbar: 1.0,
            k_boltzmann: 1.0,
        }
    }
}

/// Width parameters of the initial entangled Gaussian wavefunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    s: f64,
    d: f64,
}

impl InitialState {
    pub fn new(s: f64, d: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "relative width s must be positive and finite, got {s}"
            )));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "center-of-mass width d must be positive and finite, got {d}"
            )));
        }
        Ok(Self { s, d })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// `ε₊ = 1/(4s²) + 1/(16d²)`; always positive.
    pub fn epsilon_plus(&self) -> f64 {
        1.0 / (4.0 * self.s * self.s) + 1.0 / (16.0 * self.d * self.d)
    }

    /// `ε₋ = 1/(4s²) - 1/(16d²)`; zero exactly at the product point `s = 2d`.
    pub fn epsilon_minus(&self) -> f64 {
        1.0 / (4.0 * self.s * self.s) - 1.0 / (16.0 * self.d * self.d)
    }
}

/// The characteristic function of the initial state, normalized to
/// `P̃(0, 0) = 1`:
///
/// ```text
/// P̃(q, z) = exp[ -2ε₊ħ²(z₁² + z₂²) + 4ε₋ħ² z₁z₂
///                - ε₊(q₁² + q₂²)/(8(ε₊² - ε₋²)) - ε₋ q₁q₂/(4(ε₊² - ε₋²)) ]
/// ```
///
/// `q` is conjugate to the center coordinates and `z` to the (scaled) offset
/// coordinates of the position-representation density matrix.
pub fn initial_characteristic_function(
    st: &InitialState,
    q: [f64; 2],
    z: [f64; 2],
    hbar: f64,
) -> Result<f64> {
    let ep = st.epsilon_plus();
    let em = st.epsilon_minus();
    let det = ep * ep - em * em;
    if det <= 0.0 {
        // Unreachable for s, d > 0; kept as an explicit guard.
        return Err(Error::DegenerateState(format!(
            "ε₊² - ε₋² = {det} is not positive"
        )));
    }
    let h2 = hbar * hbar;
    let exponent = -2.0 * ep * h2 * (z[0] * z[0] + z[1] * z[1])
        + 4.0 * em * h2 * z[0] * z[1]
        - ep * (q[0] * q[0] + q[1] * q[1]) / (8.0 * det)
        - em * q[0] * q[1] / (4.0 * det);
    Ok(exponent.exp())
}

/// Second moments of the initial state in the doubled convention:
///
/// ```text
/// 2⟨x₁²⟩ = 2d² + s²/2      2⟨x₁x₂⟩ = 2d² - s²/2
/// 2⟨p₁²⟩ = 2ħ²ε₊           2⟨p₁p₂⟩ = -2ħ²ε₋
/// ```
///
/// with all position–momentum cross moments zero. Positions are correlated
/// and momenta anticorrelated for `s < 2d`; the state is pure, so both
/// symplectic eigenvalues equal `ħ`.
pub fn initial_covariance(st: &InitialState, hbar: f64) -> Result<CovarianceMatrix> {
    let s2 = st.s * st.s;
    let d2 = st.d * st.d;
    let h2 = hbar * hbar;
    let xx = 2.0 * d2 + 0.5 * s2;
    let xy = 2.0 * d2 - 0.5 * s2;
    let pp = 2.0 * h2 * st.epsilon_plus();
    let pq = -2.0 * h2 * st.epsilon_minus();
    CovarianceMatrix::new(Matrix4::new(
        xx, 0.0, xy, 0.0, //
        0.0, pp, 0.0, pq, //
        xy, 0.0, xx, 0.0, //
        0.0, pq, 0.0, pp,
    ))
}
