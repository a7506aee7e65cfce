//! Gaussian-state linear algebra: the symplectic form, symplectic spectra,
//! partial transposition, physicality checks, and the logarithmic negativity.
//!
//! Covariance matrices follow the doubled convention
//! `γ_jk = 2 Re ⟨R_j R_k⟩` in the canonical ordering `(x₁, p₁, x₂, p₂)`.
//! In that convention a pure state saturates the uncertainty bound with both
//! symplectic eigenvalues equal to `ħ`, and a two-particle state is separable
//! exactly when every symplectic eigenvalue of the partially transposed
//! covariance is at least `ħ`.

use nalgebra::{DMatrix, Matrix4};

use crate::error::{Error, Result};

/// Relative symmetry tolerance for covariance inputs.
const SYMMETRY_TOL: f64 = 1e-12;

/// Relative tolerance on imaginary parts of the `-σγσγ` spectrum.
const IMAG_TOL: f64 = 1e-9;

/// Absolute tolerance (in units of ħ) on the physicality margin.
const MARGIN_TOL: f64 = 1e-9;

/// Which particle a partial transposition acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Particle {
    One,
    Two,
}

impl Particle {
    /// Index of this particle's momentum row/column in `(x₁,p₁,x₂,p₂)`.
    fn momentum_index(self) -> usize {
        match self {
            Particle::One => 1,
            Particle::Two => 3,
        }
    }
}

/// 4×4 second-moment matrix of a two-particle Gaussian state, ordering
/// `(x₁, p₁, x₂, p₂)`, doubled convention `γ = 2 Re ⟨R Rᵀ⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    entries: Matrix4<f64>,
}

impl CovarianceMatrix {
    /// Validates symmetry (relative tolerance 1e-12), finiteness, and a
    /// strictly positive diagonal, then stores the symmetrized matrix.
    pub fn new(entries: Matrix4<f64>) -> Result<Self> {
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidCovariance(
                "matrix contains non-finite entries".into(),
            ));
        }
        let scale = entries.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        let asym = (entries - entries.transpose())
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()));
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::InvalidCovariance(format!(
                "asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:.0e} relative tolerance"
            )));
        }
        for i in 0..4 {
            if entries[(i, i)] <= 0.0 {
                return Err(Error::InvalidCovariance(format!(
                    "diagonal entry {} is {} (must be > 0)",
                    i,
                    entries[(i, i)]
                )));
            }
        }
        Ok(Self {
            entries: (entries + entries.transpose()) * 0.5,
        })
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.entries
    }

    /// Entry access in the `(x₁,p₁,x₂,p₂)` ordering.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }
}

/// The canonical skew-symmetric form on `n` modes:
/// block diagonal with `n` copies of `[[0, 1], [-1, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    entries: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn n_modes(&self) -> usize {
        self.entries.nrows() / 2
    }
}

/// Builds the symplectic form on `n_modes` modes.
pub fn symplectic_form(n_modes: usize) -> Result<SymplecticForm> {
    if n_modes == 0 {
        return Err(Error::InvalidArgument(
            "symplectic form needs at least one mode".into(),
        ));
    }
    let dim = 2 * n_modes;
    let mut entries = DMatrix::zeros(dim, dim);
    for k in 0..n_modes {
        entries[(2 * k, 2 * k + 1)] = 1.0;
        entries[(2 * k + 1, 2 * k)] = -1.0;
    }
    Ok(SymplecticForm { entries })
}

/// Two-mode symplectic form as a fixed-size matrix (the hot path).
pub(crate) fn symplectic_form_4() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

/// Symplectic eigenvalues of a covariance matrix, in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("spectrum is non-empty")
    }
}

/// Spectrum of `-σγσγ`, computed through a symmetric similarity so the
/// eigensolve cannot stall on the doubly degenerate pairs: with
/// `K = γ^{1/2} σ γ^{1/2}` (real skew-symmetric),
/// `-K² = γ^{1/2} (-σγσγ) γ^{-1/2}` is symmetric positive semi-definite and
/// shares the spectrum of `-σγσγ`, which is therefore real by construction.
/// A general Schur iteration on the non-symmetric product is not safe here:
/// every matrix of this family has exactly coincident eigenvalue pairs, the
/// worst case for its convergence.
fn paired_roots(g: &Matrix4<f64>) -> Result<[f64; 2]> {
    let eig = nalgebra::SymmetricEigen::new(*g);
    if eig.eigenvalues.iter().any(|l| *l <= 0.0) {
        return Err(Error::InvalidCovariance(
            "matrix is not positive definite".into(),
        ));
    }
    let sqrt_g = eig.eigenvectors
        * Matrix4::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
        * eig.eigenvectors.transpose();
    let k = sqrt_g * symplectic_form_4() * sqrt_g;
    let product = -(k * k);
    let product = (product + product.transpose()) * 0.5;
    let evs = product.symmetric_eigenvalues();
    let scale = evs
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let mut roots = [0.0f64; 4];
    for (i, ev) in evs.iter().enumerate() {
        if !ev.is_finite() || *ev < -IMAG_TOL * scale {
            return Err(Error::NumericalFailure(format!(
                "eigenvalue {ev} of -σγσγ is outside the positive real axis"
            )));
        }
        roots[i] = ev.max(0.0).sqrt();
    }
    // The four roots come in coincident pairs; sorting and averaging adjacent
    // entries is robust to eigensolver jitter.
    roots.sort_by(|a, b| b.partial_cmp(a).expect("roots are finite"));
    Ok([(roots[0] + roots[1]) * 0.5, (roots[2] + roots[3]) * 0.5])
}

/// Symplectic eigenvalues of `g`: positive square roots of the eigenvalues of
/// `-σ g σ g`, deduplicated by pairing. Requires `g` positive definite.
pub fn symplectic_eigenvalues(g: &CovarianceMatrix) -> Result<SymplecticSpectrum> {
    let pair = paired_roots(g.matrix())?;
    Ok(SymplecticSpectrum {
        values: vec![pair[0], pair[1]],
    })
}

/// Partial transposition: time reversal of one particle, `p → -p`.
/// Involutive, and preserves symmetry.
pub fn partial_transpose(g: &CovarianceMatrix, particle: Particle) -> CovarianceMatrix {
    let p = particle.momentum_index();
    let mut m = *g.matrix();
    for j in 0..4 {
        m[(p, j)] = -m[(p, j)];
        m[(j, p)] = -m[(j, p)];
    }
    // Flipping a row and column of a symmetric positive-diagonal matrix cannot
    // break the constructor invariants.
    CovarianceMatrix { entries: m }
}

/// Logarithmic negativity of the two-particle state described by `g`, with the
/// separability threshold set by `hbar`.
///
/// Computes the partial transpose with respect to particle 1, its symplectic
/// spectrum `(ν₊, ν₋)`, and returns `-2 (log₂ min(1, ν₊/ħ) + log₂ min(1, ν₋/ħ))`.
/// The factor 2 counts the doubled symplectic spectrum of a two-mode state.
pub fn log_negativity(g: &CovarianceMatrix, hbar: f64) -> Result<f64> {
    let spectrum = symplectic_eigenvalues(&partial_transpose(g, Particle::One))?;
    Ok(log_negativity_from_spectrum(spectrum.values(), hbar))
}

/// Log-negativity from an already-computed PT symplectic spectrum.
pub fn log_negativity_from_spectrum(values: &[f64], hbar: f64) -> f64 {
    let en: f64 = values
        .iter()
        .map(|v| -2.0 * (v.abs() / hbar).min(1.0).log2())
        .sum();
    en.max(0.0)
}

/// Result of the positive-semi-definiteness check of `γ + iħσ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalityReport {
    /// True when every symplectic eigenvalue is at least `ħ` (to tolerance).
    pub physical: bool,
    /// Smallest symplectic eigenvalue minus `ħ`. Negative margins within
    /// `1e-9·ħ` still report `physical = true`.
    pub margin: f64,
    /// Set when the margin sits on the boundary within tolerance, as pure
    /// states do; callers may treat this as a warning channel.
    pub saturated: bool,
}

/// Checks whether `g + iħσ` is positive semi-definite, i.e. whether `g`
/// describes a physical state. Never errors: indeterminate spectra report
/// `physical = false` with margin `-ħ`.
pub fn is_physical(g: &CovarianceMatrix, hbar: f64) -> PhysicalityReport {
    let tol = MARGIN_TOL * hbar;
    match paired_roots(g.matrix()) {
        Ok(pair) => {
            let margin = pair[1].min(pair[0]) - hbar;
            PhysicalityReport {
                physical: margin >= -tol,
                margin,
                saturated: margin.abs() <= tol,
            }
        }
        Err(_) => PhysicalityReport {
            physical: false,
            margin: -hbar,
            saturated: false,
        },
    }
}
