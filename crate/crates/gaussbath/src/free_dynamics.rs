//! Closed-form time evolution for two free particles, each coupled to its own
//! Ohmic heat bath.
//!
//! The characteristic function stays Gaussian for all times; its ten exponent
//! coefficients are elementary functions of `t` built from the relaxation
//! factors `e_j = exp(-γ_j t / m)`. The covariance matrix is assembled from
//! those coefficients directly, so a whole trajectory costs a handful of
//! exponentials per sample.

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::states::{InitialState, PhysicalConstants};
use crate::symplectic::CovarianceMatrix;

/// Masses, bath couplings and temperatures, and the oscillator frequency of
/// the optional inter-particle potential. Both particles share one mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub mass: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub temp1: f64,
    pub temp2: f64,
    pub omega0: f64,
    pub constants: PhysicalConstants,
}

impl SystemParams {
    pub fn new(
        mass: f64,
        gamma1: f64,
        gamma2: f64,
        temp1: f64,
        temp2: f64,
        omega0: f64,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        let positive = |name: &str, v: f64| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        let non_negative = |name: &str, v: f64| -> Result<()> {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} must be non-negative and finite, got {v}"
                )))
            }
        };
        positive("mass", mass)?;
        positive("gamma1", gamma1)?;
        positive("gamma2", gamma2)?;
        non_negative("temp1", temp1)?;
        non_negative("temp2", temp2)?;
        non_negative("omega0", omega0)?;
        Ok(Self {
            mass,
            gamma1,
            gamma2,
            temp1,
            temp2,
            omega0,
            constants,
        })
    }

    pub fn gammas(&self) -> [f64; 2] {
        [self.gamma1, self.gamma2]
    }

    pub fn temps(&self) -> [f64; 2] {
        [self.temp1, self.temp2]
    }

    pub fn equal_baths(&self) -> bool {
        self.gamma1 == self.gamma2 && self.temp1 == self.temp2
    }
}

/// Bath-relaxation kernels for free evolution, evaluated at one time.
///
/// Per particle: `λ_j(t) = 2 m k T_j (1 - e^{-2γ_j t/m})` (momentum-variance
/// buildup, saturating at `2 m k T_j`), `α_j(t) = (4 m k T_j / γ_j)(1 - e^{-γ_j t/m})`,
/// `τ_j = k T_j / γ_j` (long-time position diffusion rate), and the backward
/// characteristic `z₀_j(z, q) = z e^{-γ_j t/m} - (q / 2γ_j)(1 - e^{-γ_j t/m})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEvolutionKernels {
    pub lambda: [f64; 2],
    pub alpha: [f64; 2],
    pub tau: [f64; 2],
    /// Coefficient of `z` in `z₀_j`: `e^{-γ_j t/m}`.
    pub z0_z: [f64; 2],
    /// Coefficient of `q` in `z₀_j`: `-(1 - e^{-γ_j t/m}) / (2γ_j)`.
    pub z0_q: [f64; 2],
}

impl FreeEvolutionKernels {
    /// The backward characteristic for particle `j` (0-based).
    pub fn z0(&self, j: usize, z: f64, q: f64) -> f64 {
        self.z0_z[j] * z + self.z0_q[j] * q
    }
}

/// Evaluates the free-evolution kernels at time `t ≥ 0`.
pub fn evolve_kernels(p: &SystemParams, t: f64) -> Result<FreeEvolutionKernels> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time must be non-negative, got {t}"
        )));
    }
    let k = p.constants.k_boltzmann;
    let mut lambda = [0.0; 2];
    let mut alpha = [0.0; 2];
    let mut tau = [0.0; 2];
    let mut z0_z = [0.0; 2];
    let mut z0_q = [0.0; 2];
    for (j, (gamma, temp)) in p.gammas().into_iter().zip(p.temps()).enumerate() {
        let e = (-gamma * t / p.mass).exp();
        let f = 1.0 - e;
        lambda[j] = 2.0 * p.mass * k * temp * (1.0 - e * e);
        alpha[j] = 4.0 * p.mass * k * temp * f / gamma;
        tau[j] = k * temp / gamma;
        z0_z[j] = e;
        z0_q[j] = -f / (2.0 * gamma);
    }
    Ok(FreeEvolutionKernels {
        lambda,
        alpha,
        tau,
        z0_z,
        z0_q,
    })
}

/// The ten exponent coefficients of the evolved Gaussian characteristic
/// function, normalized so they slot directly into the covariance assembly
///
/// ```text
///        ⎛ 4A₁  -C₁₁   E   -C₂₁ ⎞
///  γ_t = ⎜-C₁₁   B₁  -C₁₂   D   ⎟
///        ⎜  E   -C₁₂  4A₂  -C₂₂ ⎟
///        ⎝-C₂₁   D   -C₂₂   B₂  ⎠
/// ```
///
/// in the `(x₁, p₁, x₂, p₂)` ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticForm {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c11: f64,
    pub c22: f64,
    pub c12: f64,
    pub c21: f64,
    pub d: f64,
    pub e: f64,
}

impl QuadraticForm {
    /// Assembles the covariance matrix from the coefficients.
    pub fn covariance(&self) -> Result<CovarianceMatrix> {
        CovarianceMatrix::new(Matrix4::new(
            4.0 * self.a1,
            -self.c11,
            self.e,
            -self.c21,
            -self.c11,
            self.b1,
            -self.c12,
            self.d,
            self.e,
            -self.c12,
            4.0 * self.a2,
            -self.c22,
            -self.c21,
            self.d,
            -self.c22,
            self.b2,
        ))
    }
}

/// Evaluates the ten coefficients at time `t` for free evolution
/// (requires `omega0 = 0`).
///
/// With `e_j = e^{-γ_j t/m}`, `f_j = 1 - e_j`, and `ε±` from the initial
/// state:
///
/// ```text
/// A_j  = d²/2 + s²/8 + τ_j t - α_j/(2γ_j) + λ_j/(4γ_j²) + ħ²ε₊ f_j²/(2γ_j²)
/// B_j  = 2ħ²ε₊ e_j² + λ_j
/// C_jj = λ_j/γ_j - α_j - 2ħ²ε₊ e_j f_j / γ_j
/// C_jk = 2ħ²ε₋ e_j f_k / γ_k                    (j ≠ k)
/// D    = -2ħ²ε₋ e₁ e₂
/// E    = 2d² - s²/2 - 2ħ²ε₋ f₁ f₂/(γ₁ γ₂)
/// ```
///
/// The signs of `C_jj`, `C_jk`, and `D` are fixed by three independent
/// anchors checked in the tests: the `t = 0` covariance of the initial state,
/// the second-moment equations of motion, and the stationary drift
/// `⟨xp + px⟩ → 2 m k T/γ`.
pub fn coefficients_at(st: &InitialState, p: &SystemParams, t: f64) -> Result<QuadraticForm> {
    if p.omega0 != 0.0 {
        return Err(Error::InvalidArgument(
            "free-evolution coefficients require omega0 = 0; use the generic propagator".into(),
        ));
    }
    let kernels = evolve_kernels(p, t)?;
    let hbar2 = p.constants.hbar * p.constants.hbar;
    let ep = st.epsilon_plus();
    let em = st.epsilon_minus();
    let s2 = st.s() * st.s();
    let d2 = st.d() * st.d();
    let gamma = p.gammas();
    let e = kernels.z0_z;
    let f = [1.0 - e[0], 1.0 - e[1]];

    let al = |j: usize| -> f64 {
        d2 / 2.0 + s2 / 8.0 + kernels.tau[j] * t - kernels.alpha[j] / (2.0 * gamma[j])
            + kernels.lambda[j] / (4.0 * gamma[j] * gamma[j])
            + hbar2 * ep * f[j] * f[j] / (2.0 * gamma[j] * gamma[j])
    };
    let bl = |j: usize| -> f64 { 2.0 * hbar2 * ep * e[j] * e[j] + kernels.lambda[j] };
    let cjj = |j: usize| -> f64 {
        kernels.lambda[j] / gamma[j] - kernels.alpha[j] - 2.0 * hbar2 * ep * e[j] * f[j] / gamma[j]
    };
    let cjk = |j: usize, k: usize| -> f64 { 2.0 * hbar2 * em * e[j] * f[k] / gamma[k] };

    Ok(QuadraticForm {
        a1: al(0),
        a2: al(1),
        b1: bl(0),
        b2: bl(1),
        c11: cjj(0),
        c22: cjj(1),
        c12: cjk(0, 1),
        c21: cjk(1, 0),
        d: -2.0 * hbar2 * em * e[0] * e[1],
        e: 2.0 * d2 - s2 / 2.0 - 2.0 * hbar2 * em * f[0] * f[1] / (gamma[0] * gamma[1]),
    })
}

/// Covariance matrix of the freely evolving state at time `t`.
pub fn covariance_at(st: &InitialState, p: &SystemParams, t: f64) -> Result<CovarianceMatrix> {
    coefficients_at(st, p, t)?.covariance()
}

/// Symplectic eigenvalues of the partially transposed covariance, evaluated in
/// closed form from the ten coefficients.
///
/// The quartic characteristic polynomial of `-σ γᵀ¹ σ γᵀ¹` factors into a
/// squared quadratic; its two roots are
///
/// ```text
/// Λ± = (ε₁₁ + ε₃₃)/2 ± ½ √((ε₁₁ - ε₃₃)² + 4 ε₁₃ ε₂₄ - 4 ε₁₄ ε₂₃)
/// ```
///
/// where the `ε` entries are the quadratic invariants listed in the code.
/// `Λ±` are the *squared* symplectic eigenvalues — the unit tests pin this
/// against the generic eigensolver route — so the returned pair is
/// `(√Λ₊, √Λ₋)`.
pub fn pt_symplectic_eigs_closed_form(qf: &QuadraticForm) -> Result<(f64, f64)> {
    let a1 = 4.0 * qf.a1;
    let a2 = 4.0 * qf.a2;
    let (b1, b2) = (qf.b1, qf.b2);
    let (c11, c22, c12, c21) = (qf.c11, qf.c22, qf.c12, qf.c21);
    let (d, e) = (qf.d, qf.e);

    let e11 = a1 * b1 - d * e + c12 * c21 - c11 * c11;
    let e33 = a2 * b2 - c22 * c22 - d * e + c12 * c21;
    let e13 = e * b1 - a2 * d - c11 * c12 + c12 * c22;
    let e14 = -c12 * b2 - c21 * b1 + c11 * d + c22 * d;
    let e23 = -e * c11 + a1 * c12 + a2 * c21 - e * c22;
    let e24 = e * b2 - c22 * c21 + c11 * c21 - a1 * d;

    let half_sum = 0.5 * (e11 + e33);
    let disc = (e11 - e33) * (e11 - e33) + 4.0 * (e13 * e24 - e14 * e23);
    let scale = (e11 * e11 + e33 * e33).max(1.0);
    if disc < -1e-12 * scale {
        return Err(Error::NumericalFailure(format!(
            "negative discriminant {disc:.3e} in closed-form PT spectrum"
        )));
    }
    let half_root = 0.5 * disc.max(0.0).sqrt();
    let lam_plus_sq = half_sum + half_root;
    let lam_minus_sq = half_sum - half_root;
    if lam_minus_sq < -1e-12 * scale {
        return Err(Error::NumericalFailure(format!(
            "negative squared symplectic eigenvalue {lam_minus_sq:.3e}"
        )));
    }
    Ok((lam_plus_sq.max(0.0).sqrt(), lam_minus_sq.max(0.0).sqrt()))
}
