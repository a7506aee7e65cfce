//! Generic propagator for the Gaussian characteristic function under any
//! quadratic two-particle Hamiltonian, in particular the harmonic
//! inter-particle potential `m ω₀² (x₁ - x₂)² / 2`.
//!
//! The evolution closes on the quadratic exponent of the characteristic
//! function in the variables `v = (z₁, z₂, q₁, q₂)`. Writing the exponent as
//! `-vᵀ Q v`, the flow is affine:
//!
//! ```text
//! Q(t) = e^{Fᵀt} Q(0) e^{Ft} + ∫₀ᵗ e^{Fᵀs} N e^{Fs} ds,     F = -M / 2m,
//! ```
//!
//! where `M` is the drift matrix of the characteristics and
//! `N = diag(4γ₁kT₁, 4γ₂kT₂, 0, 0)` the thermal diffusion weight. Both the
//! transport factor and the diffusion integral come out of one block matrix
//! exponential, so over-, under-, and critically damped parameters share a
//! single code path — there is no eigendecomposition to go defective at
//! critical damping, and no complex arithmetic anywhere.
//!
//! Long intervals are split into uniform substeps with `‖F‖·Δt` of order one
//! and composed exactly; this keeps the block exponential well conditioned
//! at strong damping, where a single-shot evaluation would cancel
//! catastrophically.

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::free_dynamics::{QuadraticForm, SystemParams};
use crate::linalg::van_loan_gw;
use crate::states::InitialState;
use crate::symplectic::CovarianceMatrix;

/// Ten-coefficient exponent of the propagated characteristic function;
/// identical layout to the closed-form free case.
pub type PropagatedForm = QuadraticForm;

/// Target for `‖F‖ Δt` per substep of the flow.
const STEP_BUDGET: f64 = 0.5;

/// Drift matrix `M` of the characteristic system `∂v/∂t = (M / 2m) v` in the
/// ordering `v = (z₁, z₂, q₁, q₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix {
    entries: Matrix4<f64>,
}

impl DriftMatrix {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.entries
    }
}

/// Builds the drift matrix for the given parameters. For `ω₀ = 0` this is the
/// free-evolution drift (upper-left `diag(2γ₁, 2γ₂)` with a unit coupling
/// block and vanishing lower rows); for `ω₀ > 0` the harmonic coupling adds
/// the `±4m²ω₀²` block feeding `q̇` from `z₁ - z₂`.
pub fn build_drift(p: &SystemParams) -> DriftMatrix {
    let c = 4.0 * p.mass * p.mass * p.omega0 * p.omega0;
    DriftMatrix {
        entries: Matrix4::new(
            2.0 * p.gamma1,
            0.0,
            1.0,
            0.0,
            0.0,
            2.0 * p.gamma2,
            0.0,
            1.0,
            -c,
            c,
            0.0,
            0.0,
            c,
            -c,
            0.0,
            0.0,
        ),
    }
}

/// The exact Gaussian flow over a fixed interval: `Q ↦ Gᵀ Q G + W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFlow {
    g: Matrix4<f64>,
    w: Matrix4<f64>,
}

impl GaussianFlow {
    /// Flow over `[0, t]`, substepped so each block exponential stays
    /// well conditioned.
    pub fn new(p: &SystemParams, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time must be non-negative, got {t}"
            )));
        }
        let drift = build_drift(p);
        let f = -drift.matrix() / (2.0 * p.mass);
        let n = Matrix4::from_diagonal(&nalgebra::Vector4::new(
            4.0 * p.gamma1 * p.constants.k_boltzmann * p.temp1,
            4.0 * p.gamma2 * p.constants.k_boltzmann * p.temp2,
            0.0,
            0.0,
        ));
        let rate = (p.gamma1.max(p.gamma2) / p.mass).max(std::f64::consts::SQRT_2 * p.omega0);
        let n_steps = ((t * rate / STEP_BUDGET).ceil() as usize).max(1);
        let dt = t / n_steps as f64;
        let (g_step, w_step) = van_loan_gw(&f, &n, dt);
        if g_step.iter().any(|x| !x.is_finite()) || w_step.iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericalFailure(
                "matrix exponential did not converge".into(),
            ));
        }
        let step = GaussianFlow {
            g: g_step,
            w: w_step,
        };
        let mut total = GaussianFlow {
            g: Matrix4::identity(),
            w: Matrix4::zeros(),
        };
        for _ in 0..n_steps {
            total = total.then(&step);
        }
        Ok(total)
    }

    /// Composition: run `self` first, then `next`.
    pub fn then(&self, next: &GaussianFlow) -> GaussianFlow {
        GaussianFlow {
            g: self.g * next.g,
            w: next.g.transpose() * self.w * next.g + next.w,
        }
    }

    /// Applies the flow to an exponent matrix `Q` (ordering `(z₁,z₂,q₁,q₂)`).
    pub fn apply(&self, q: &Matrix4<f64>) -> Matrix4<f64> {
        let out = self.g.transpose() * q * self.g + self.w;
        (out + out.transpose()) * 0.5
    }

    /// The accumulated diffusion integral `W`.
    pub fn diffusion(&self) -> &Matrix4<f64> {
        &self.w
    }

    /// The transport factor `G = e^{Ft}`.
    pub fn transport(&self) -> &Matrix4<f64> {
        &self.g
    }
}

/// Exponent matrix of the initial characteristic function in the
/// `(z₁, z₂, q₁, q₂)` ordering.
pub fn initial_form(st: &InitialState, hbar: f64) -> Matrix4<f64> {
    let h2 = hbar * hbar;
    let ep = st.epsilon_plus();
    let em = st.epsilon_minus();
    let d2 = st.d() * st.d();
    let s2 = st.s() * st.s();
    let fq = d2 / 2.0 + s2 / 8.0;
    let fq_cross = (d2 - s2 / 4.0) / 2.0;
    Matrix4::new(
        2.0 * h2 * ep,
        -2.0 * h2 * em,
        0.0,
        0.0,
        -2.0 * h2 * em,
        2.0 * h2 * ep,
        0.0,
        0.0,
        0.0,
        0.0,
        fq,
        fq_cross,
        0.0,
        0.0,
        fq_cross,
        fq,
    )
}

/// Reads the ten named coefficients off an exponent matrix.
pub fn form_from_matrix(q: &Matrix4<f64>) -> PropagatedForm {
    PropagatedForm {
        a1: q[(2, 2)],
        a2: q[(3, 3)],
        b1: q[(0, 0)],
        b2: q[(1, 1)],
        e: 4.0 * q[(2, 3)],
        d: q[(0, 1)],
        c11: 2.0 * q[(0, 2)],
        c22: 2.0 * q[(1, 3)],
        c12: 2.0 * q[(0, 3)],
        c21: 2.0 * q[(1, 2)],
    }
}

fn propagate_impl(st: &InitialState, p: &SystemParams, t: f64) -> Result<PropagatedForm> {
    let flow = GaussianFlow::new(p, t)?;
    let q = flow.apply(&initial_form(st, p.constants.hbar));
    if q.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure(format!(
            "propagated form is not finite at t = {t}"
        )));
    }
    Ok(form_from_matrix(&q))
}

/// Propagates the initial state to time `t`.
///
/// For `ω₀ > 0` this requires equal baths (`γ₁ = γ₂`, `T₁ = T₂`); the
/// unequal-bath combination runs through the same machinery but has no
/// reference results, so it lives behind [`propagate_generic`].
pub fn propagate(st: &InitialState, p: &SystemParams, t: f64) -> Result<PropagatedForm> {
    if p.omega0 > 0.0 && !p.equal_baths() {
        return Err(Error::UnsupportedConfiguration(
            "omega0 > 0 with unequal baths requires the explicit generic path".into(),
        ));
    }
    propagate_impl(st, p, t)
}

/// Opt-in propagation without the equal-bath restriction.
pub fn propagate_generic(st: &InitialState, p: &SystemParams, t: f64) -> Result<PropagatedForm> {
    propagate_impl(st, p, t)
}

/// Covariance of the propagated state at time `t` (equal-bath guard as in
/// [`propagate`]).
pub fn covariance_at(st: &InitialState, p: &SystemParams, t: f64) -> Result<CovarianceMatrix> {
    propagate(st, p, t)?.covariance()
}
