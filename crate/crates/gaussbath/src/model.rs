//! Ties the initial state, bath parameters, and a choice of dynamics into a
//! single evaluator for covariances and log-negativity trajectories.

use serde::{Deserialize, Serialize};

use crate::analysis::Trajectory;
use crate::error::{Error, Result};
use crate::free_dynamics::{self, QuadraticForm, SystemParams};
use crate::quadratic_dynamics::{self, form_from_matrix, initial_form, GaussianFlow};
use crate::states::InitialState;
use crate::symplectic::{self, CovarianceMatrix};

/// Which dynamics to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Free particles, closed-form coefficients (requires `ω₀ = 0`).
    Free,
    /// Harmonically coupled particles through the generic propagator
    /// (`ω₀ = 0` is allowed and reproduces the free case).
    Harmonic,
}

/// A fully validated simulation setup.
#[derive(Debug, Clone, Copy)]
pub struct Model {
    state: InitialState,
    params: SystemParams,
    mode: Mode,
    allow_unequal_baths: bool,
}

impl Model {
    pub fn new(state: InitialState, params: SystemParams, mode: Mode) -> Result<Self> {
        Self::with_options(state, params, mode, false)
    }

    /// As [`Model::new`], optionally admitting unequal baths with `ω₀ > 0`
    /// (a configuration without reference results).
    pub fn with_options(
        state: InitialState,
        params: SystemParams,
        mode: Mode,
        allow_unequal_baths: bool,
    ) -> Result<Self> {
        match mode {
            Mode::Free => {
                if params.omega0 != 0.0 {
                    return Err(Error::InvalidArgument(
                        "free mode requires omega0 = 0".into(),
                    ));
                }
            }
            Mode::Harmonic => {
                if params.omega0 > 0.0 && !params.equal_baths() && !allow_unequal_baths {
                    return Err(Error::UnsupportedConfiguration(
                        "omega0 > 0 with unequal baths requires allow_unequal_baths".into(),
                    ));
                }
            }
        }
        Ok(Self {
            state,
            params,
            mode,
            allow_unequal_baths,
        })
    }

    pub fn state(&self) -> &InitialState {
        &self.state
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The ten exponent coefficients at time `t`.
    pub fn form(&self, t: f64) -> Result<QuadraticForm> {
        match self.mode {
            Mode::Free => free_dynamics::coefficients_at(&self.state, &self.params, t),
            Mode::Harmonic => {
                if self.allow_unequal_baths {
                    quadratic_dynamics::propagate_generic(&self.state, &self.params, t)
                } else {
                    quadratic_dynamics::propagate(&self.state, &self.params, t)
                }
            }
        }
    }

    /// Covariance matrix at time `t`.
    pub fn covariance(&self, t: f64) -> Result<CovarianceMatrix> {
        self.form(t)?.covariance()
    }

    /// Log-negativity at time `t`, computed from the closed-form PT spectrum
    /// of the coefficients (validated against the generic eigensolver route).
    pub fn log_negativity(&self, t: f64) -> Result<f64> {
        let (lp, lm) = free_dynamics::pt_symplectic_eigs_closed_form(&self.form(t)?)?;
        Ok(symplectic::log_negativity_from_spectrum(
            &[lp, lm],
            self.params.constants.hbar,
        ))
    }

    /// Continuous evaluator for bisection refinement; panics inside only on
    /// propagation failure, which the grid pass would already have surfaced.
    pub fn en_evaluator(&self) -> impl Fn(f64) -> f64 + '_ {
        move |t| self.log_negativity(t).expect("evaluator inside sampled range")
    }

    /// Samples the log-negativity and physicality data on a uniform grid of
    /// `n_points` over `[0, t_end]`. Harmonic runs advance one exact flow step
    /// per grid interval instead of re-propagating from zero.
    pub fn trajectory(&self, t_end: f64, n_points: usize) -> Result<Trajectory> {
        let (times, forms) = self.forms_on_grid(t_end, n_points)?;
        let hbar = self.params.constants.hbar;
        let mut values = Vec::with_capacity(n_points);
        let mut physical = Vec::with_capacity(n_points);
        let mut margins = Vec::with_capacity(n_points);
        for qf in &forms {
            let (lp, lm) = free_dynamics::pt_symplectic_eigs_closed_form(qf)?;
            values.push(symplectic::log_negativity_from_spectrum(&[lp, lm], hbar));
            let report = symplectic::is_physical(&qf.covariance()?, hbar);
            physical.push(report.physical);
            margins.push(report.margin);
        }
        Trajectory::new(times, values, physical, margins)
    }

    /// Covariance snapshots on the same uniform grid as [`Model::trajectory`].
    pub fn covariance_trajectory(
        &self,
        t_end: f64,
        n_points: usize,
    ) -> Result<Vec<(f64, CovarianceMatrix)>> {
        let (times, forms) = self.forms_on_grid(t_end, n_points)?;
        times
            .into_iter()
            .zip(forms)
            .map(|(t, qf)| Ok((t, qf.covariance()?)))
            .collect()
    }

    fn forms_on_grid(&self, t_end: f64, n_points: usize) -> Result<(Vec<f64>, Vec<QuadraticForm>)> {
        if !(t_end > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "t_end must be positive, got {t_end}"
            )));
        }
        if n_points < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 grid points, got {n_points}"
            )));
        }
        let dt = t_end / (n_points - 1) as f64;
        let times: Vec<f64> = (0..n_points).map(|i| i as f64 * dt).collect();
        let forms = match self.mode {
            Mode::Free => times
                .iter()
                .map(|t| free_dynamics::coefficients_at(&self.state, &self.params, *t))
                .collect::<Result<Vec<_>>>()?,
            Mode::Harmonic => {
                let step = GaussianFlow::new(&self.params, dt)?;
                let mut q = initial_form(&self.state, self.params.constants.hbar);
                let mut forms = Vec::with_capacity(n_points);
                forms.push(form_from_matrix(&q));
                for _ in 1..n_points {
                    q = step.apply(&q);
                    forms.push(form_from_matrix(&q));
                }
                forms
            }
        };
        Ok((times, forms))
    }
}
