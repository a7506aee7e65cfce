//! Trajectory post-processing: sudden-death cutoff times, revival intervals,
//! long-time asymptotes, and the damping-regime classification.
//!
//! Death and revival edges are first located on the sampling grid and then
//! refined by bisection on the continuous evaluator, so grid density never
//! changes a verdict, only how fast it is reached.

use crate::error::{Error, Result};
use crate::free_dynamics::SystemParams;

/// Default threshold below which the log-negativity counts as zero.
/// The measure hits exact zero when the smallest PT symplectic eigenvalue
/// crosses the separability bound; anything below this level is numerical
/// dust, not entanglement.
pub const DEATH_EPS: f64 = 1e-12;

/// Time resolution of the bisection refinement.
const TIME_RESOLUTION: f64 = 1e-6;

/// A sampled log-negativity trajectory with per-sample physicality data.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    values: Vec<f64>,
    physical: Vec<bool>,
    margins: Vec<f64>,
}

impl Trajectory {
    /// Validates the grid (strictly increasing, non-negative values, equal
    /// lengths) and builds the trajectory. `margins` carries the smallest
    /// symplectic eigenvalue minus `ħ` per sample.
    pub fn new(
        times: Vec<f64>,
        values: Vec<f64>,
        physical: Vec<bool>,
        margins: Vec<f64>,
    ) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidArgument("empty trajectory".into()));
        }
        if times.len() != values.len()
            || times.len() != physical.len()
            || times.len() != margins.len()
        {
            return Err(Error::InvalidArgument(
                "trajectory column lengths differ".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "log-negativity values must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            times,
            values,
            physical,
            margins,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn physical_flags(&self) -> &[bool] {
        &self.physical
    }

    pub fn margins(&self) -> &[f64] {
        &self.margins
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Damping regime of the coupled system, decided by the sign of
/// `γ² - 8m²ω₀²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeClass {
    OverDamped,
    UnderDamped,
    Critical,
}

impl std::fmt::Display for RegimeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegimeClass::OverDamped => "over-damped",
            RegimeClass::UnderDamped => "under-damped",
            RegimeClass::Critical => "critical",
        };
        write!(f, "{s}")
    }
}

/// Classifies the damping regime from `γ² - 8m²ω₀²` (equal-bath coupling
/// `γ = γ₁`; temperatures and the initial state play no role).
pub fn classify_regime(p: &SystemParams) -> RegimeClass {
    let gamma = p.gamma1;
    let disc = gamma * gamma - 8.0 * p.mass * p.mass * p.omega0 * p.omega0;
    if disc.abs() <= 1e-12 * gamma * gamma {
        RegimeClass::Critical
    } else if disc > 0.0 {
        RegimeClass::OverDamped
    } else {
        RegimeClass::UnderDamped
    }
}

/// Bisection for the crossing of `en(t) = eps` inside `[lo, hi]`, assuming
/// `en(lo) ≥ eps > en(hi)` or the reverse.
fn refine_crossing<F: Fn(f64) -> f64>(en: &F, eps: f64, mut lo: f64, mut hi: f64) -> f64 {
    let above_at_lo = en(lo) >= eps;
    while hi - lo > TIME_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if (en(mid) >= eps) == above_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First time the log-negativity falls below `eps`, refined by bisection on
/// the continuous evaluator `en`; `None` if the trajectory never drops below
/// `eps`. A trajectory that starts dead reports time 0 (its first grid time).
pub fn esd_time<F: Fn(f64) -> f64>(tr: &Trajectory, en: F, eps: f64) -> Result<Option<f64>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let Some(first_below) = tr.values.iter().position(|v| *v < eps) else {
        return Ok(None);
    };
    if first_below == 0 {
        return Ok(Some(tr.times[0]));
    }
    Ok(Some(refine_crossing(
        &en,
        eps,
        tr.times[first_below - 1],
        tr.times[first_below],
    )))
}

/// Maximal dead intervals followed by a rebirth, as `(death, rebirth)` pairs
/// with bisection-refined boundaries. A terminal dead stretch with no rebirth
/// is not listed (it is the sudden death reported by [`esd_time`]).
pub fn revivals<F: Fn(f64) -> f64>(
    tr: &Trajectory,
    en: F,
    eps: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let mut out = Vec::new();
    let mut death_start: Option<usize> = None;
    for i in 0..tr.len() {
        let dead = tr.values[i] < eps;
        match (dead, death_start) {
            (true, None) => death_start = Some(i),
            (false, Some(start)) => {
                let death = if start == 0 {
                    tr.times[0]
                } else {
                    refine_crossing(&en, eps, tr.times[start - 1], tr.times[start])
                };
                let rebirth = refine_crossing(&en, eps, tr.times[i - 1], tr.times[i]);
                out.push((death, rebirth));
                death_start = None;
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Mean and peak-to-peak amplitude of the trailing `tail_fraction` of the
/// trajectory samples. Requires `0 < tail_fraction ≤ 0.5` and at least ten
/// samples in the window.
pub fn asymptote(tr: &Trajectory, tail_fraction: f64) -> Result<(f64, f64)> {
    if !(tail_fraction > 0.0 && tail_fraction <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "tail_fraction must be in (0, 0.5], got {tail_fraction}"
        )));
    }
    let n_tail = ((tr.len() as f64) * tail_fraction).ceil() as usize;
    if n_tail < 10 {
        return Err(Error::InvalidArgument(format!(
            "tail window has {n_tail} samples; need at least 10"
        )));
    }
    let window = &tr.values[tr.len() - n_tail..];
    let mean = window.iter().sum::<f64>() / n_tail as f64;
    let max = window.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    let min = window.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    Ok((mean, max - min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::PhysicalConstants;
    use approx::assert_abs_diff_eq;

    fn traj_from(values: Vec<f64>) -> Trajectory {
        let n = values.len();
        let times: Vec<f64> = (0..n).map(|i| i as f64 * 0.1).collect();
        Trajectory::new(times, values, vec![true; n], vec![0.0; n]).unwrap()
    }

    fn params(gamma: f64, m: f64, omega0: f64) -> SystemParams {
        SystemParams::new(m, gamma, gamma, 1.0, 1.0, omega0, PhysicalConstants::natural())
            .unwrap()
    }

    #[test]
    fn trajectory_validation() {
        assert!(Trajectory::new(vec![], vec![], vec![], vec![]).is_err());
        assert!(Trajectory::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![true; 2], vec![0.0; 2])
            .is_err());
        assert!(Trajectory::new(vec![0.0, 1.0], vec![1.0, -0.2], vec![true; 2], vec![0.0; 2])
            .is_err());
        assert!(Trajectory::new(vec![0.0, 1.0], vec![1.0], vec![true; 2], vec![0.0; 2]).is_err());
    }

    #[test]
    fn esd_of_identically_zero_trajectory_is_time_zero() {
        let tr = traj_from(vec![0.0; 20]);
        let t = esd_time(&tr, |_| 0.0, DEATH_EPS).unwrap();
        assert_eq!(t, Some(0.0));
    }

    #[test]
    fn esd_of_strictly_positive_trajectory_is_none() {
        let tr = traj_from(vec![0.5; 20]);
        assert_eq!(esd_time(&tr, |_| 0.5, DEATH_EPS).unwrap(), None);
    }

    #[test]
    fn esd_refines_the_crossing_by_bisection() {
        // en(t) = max(0, 1 - t); crossing at exactly t = 1 (below eps after).
        let en = |t: f64| (1.0 - t).max(0.0);
        let times: Vec<f64> = (0..30).map(|i| i as f64 * 0.07).collect();
        let values: Vec<f64> = times.iter().map(|t| en(*t)).collect();
        let n = times.len();
        let tr = Trajectory::new(times, values, vec![true; n], vec![0.0; n]).unwrap();
        let t = esd_time(&tr, en, 1e-12).unwrap().unwrap();
        assert_abs_diff_eq!(t, 1.0, epsilon = 1e-5);
    }

    #[test]
    fn monotone_decay_has_no_revivals() {
        let tr = traj_from((0..40).map(|i| (1.0 - i as f64 / 20.0).max(0.0)).collect());
        let r = revivals(&tr, |t| (1.0 - t / 2.0).max(0.0), DEATH_EPS).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn oscillating_trajectory_counts_death_rebirth_pairs() {
        // Dead on [1, 2] and [3, 4], alive elsewhere, evaluated continuously.
        let en = |t: f64| {
            if (1.0..=2.0).contains(&t) || (3.0..=4.0).contains(&t) {
                0.0
            } else {
                0.3
            }
        };
        let times: Vec<f64> = (0..501).map(|i| i as f64 * 0.01).collect();
        let values: Vec<f64> = times.iter().map(|t| en(*t)).collect();
        let n = times.len();
        let tr = Trajectory::new(times, values, vec![true; n], vec![0.0; n]).unwrap();
        let r = revivals(&tr, en, 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].0 - 1.0).abs() < 0.02 && (r[0].1 - 2.0).abs() < 0.02);
        assert!((r[1].0 - 3.0).abs() < 0.02 && (r[1].1 - 4.0).abs() < 0.02);
    }

    #[test]
    fn revival_count_is_monotone_in_threshold() {
        let en = |t: f64| 0.5 + 0.5 * (3.0 * t).sin();
        let times: Vec<f64> = (0..2001).map(|i| i as f64 * 0.01).collect();
        let values: Vec<f64> = times.iter().map(|t| en(*t).max(0.0)).collect();
        let n = times.len();
        let tr = Trajectory::new(times, values, vec![true; n], vec![0.0; n]).unwrap();
        let mut prev = usize::MAX;
        for eps in [0.5, 0.1, 1e-3, 1e-9] {
            let count = revivals(&tr, en, eps).unwrap().len();
            assert!(count <= prev);
            prev = count;
        }
    }

    #[test]
    fn asymptote_of_constant_trajectory() {
        let tr = traj_from(vec![0.7; 100]);
        let (mean, amp) = asymptote(&tr, 0.2).unwrap();
        assert_abs_diff_eq!(mean, 0.7, epsilon = 1e-15);
        assert_eq!(amp, 0.0);
    }

    #[test]
    fn asymptote_of_dead_tail_is_zero() {
        let mut v = vec![1.0; 50];
        v.extend(vec![0.0; 50]);
        let tr = traj_from(v);
        let (mean, amp) = asymptote(&tr, 0.2).unwrap();
        assert_eq!(mean, 0.0);
        assert_eq!(amp, 0.0);
    }

    #[test]
    fn asymptote_rejects_short_windows_and_bad_fractions() {
        let tr = traj_from(vec![1.0; 20]);
        assert!(asymptote(&tr, 0.2).is_err()); // 4 samples < 10
        assert!(asymptote(&tr, 0.0).is_err());
        assert!(asymptote(&tr, 0.7).is_err());
    }

    #[test]
    fn regime_classification() {
        assert_eq!(classify_regime(&params(3.0, 1.0, 1.0)), RegimeClass::OverDamped);
        assert_eq!(classify_regime(&params(0.2, 1.0, 1.0)), RegimeClass::UnderDamped);
        let critical = params(8.0f64.sqrt(), 1.0, 1.0);
        assert_eq!(classify_regime(&critical), RegimeClass::Critical);
        // The m-inclusive discriminant: γ = 2√2·m·ω₀ is critical for m ≠ 1 too.
        let critical_m = params(2.0 * 8.0f64.sqrt(), 2.0, 1.0);
        assert_eq!(classify_regime(&critical_m), RegimeClass::Critical);
    }

    #[test]
    fn regime_ignores_temperatures() {
        let mut p = params(3.0, 1.0, 1.0);
        p.temp1 = 0.01;
        p.temp2 = 40.0;
        assert_eq!(classify_regime(&p), RegimeClass::OverDamped);
    }
}
