//! Dense matrix exponential and the block-exponential quadrature used by the
//! generic propagator.
//!
//! The exponential uses Padé order 13 with scaling and squaring, which keeps a
//! single code path for diagonalizable and defective inputs alike. Accuracy on
//! the small, well-scaled matrices used here is near machine precision.

use nalgebra::{Matrix4, SMatrix};

/// Padé-13 numerator/denominator coefficients for the exponential.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Scaling threshold for the order-13 approximant (Higham 2005, Table 10.2).
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a Padé-13 approximant.
pub fn expm<const N: usize>(a: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N>
where
    nalgebra::Const<N>: nalgebra::DimMin<nalgebra::Const<N>, Output = nalgebra::Const<N>>,
{
    let norm = one_norm(a);
    let mut squarings = 0u32;
    let mut scaled = *a;
    if norm > THETA13 {
        squarings = (norm / THETA13).log2().ceil() as u32;
        scaled /= 2f64.powi(squarings as i32);
    }

    let identity = SMatrix::<f64, N, N>::identity();
    let a2 = scaled * scaled;
    let a4 = a2 * a2;
    let a6 = a4 * a2;

    let u_inner = a6 * (a6 * PADE13[13] + a4 * PADE13[11] + a2 * PADE13[9])
        + a6 * PADE13[7]
        + a4 * PADE13[5]
        + a2 * PADE13[3]
        + identity * PADE13[1];
    let u = scaled * u_inner;
    let v = a6 * (a6 * PADE13[12] + a4 * PADE13[10] + a2 * PADE13[8])
        + a6 * PADE13[6]
        + a4 * PADE13[4]
        + a2 * PADE13[2]
        + identity * PADE13[0];

    let denom = v - u;
    let numer = v + u;
    let mut result = denom
        .lu()
        .solve(&numer)
        .expect("Pade denominator is singular; input matrix is not finite");

    for _ in 0..squarings {
        result = result * result;
    }
    result
}

fn one_norm<const N: usize>(a: &SMatrix<f64, N, N>) -> f64 {
    (0..N)
        .map(|j| (0..N).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// One exact step of the Gaussian flow: returns `(G, W)` with
/// `G = exp(F t)` and `W = ∫_0^t exp(Fᵀ s) N exp(F s) ds`,
/// evaluated through the exponential of the 8×8 block matrix
/// `[[-Fᵀ, N], [0, F]] t` (the top-right block of its exponential, premultiplied
/// by `Gᵀ`, is the integral).
pub fn van_loan_gw(f: &Matrix4<f64>, n: &Matrix4<f64>, t: f64) -> (Matrix4<f64>, Matrix4<f64>) {
    let mut block = SMatrix::<f64, 8, 8>::zeros();
    let neg_ft = -f.transpose();
    for i in 0..4 {
        for j in 0..4 {
            block[(i, j)] = neg_ft[(i, j)] * t;
            block[(i, j + 4)] = n[(i, j)] * t;
            block[(i + 4, j + 4)] = f[(i, j)] * t;
        }
    }
    let e = expm(&block);
    let mut g = Matrix4::zeros();
    let mut e12 = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            g[(i, j)] = e[(i + 4, j + 4)];
            e12[(i, j)] = e[(i, j + 4)];
        }
    }
    let w = g.transpose() * e12;
    // W is symmetric by construction; discard roundoff asymmetry.
    let w = (w + w.transpose()) * 0.5;
    (g, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::Matrix2;

    #[test]
    fn expm_zero_is_identity() {
        let z = Matrix4::<f64>::zeros();
        let e = expm(&z);
        assert_abs_diff_eq!(e, Matrix4::identity(), epsilon = 1e-15);
    }

    #[test]
    fn expm_diagonal() {
        let a = Matrix4::from_diagonal(&nalgebra::Vector4::new(0.3, -1.2, 2.0, -7.5));
        let e = expm(&a);
        for i in 0..4 {
            assert_abs_diff_eq!(e[(i, i)], a[(i, i)].exp(), epsilon = 1e-13);
        }
    }

    #[test]
    fn expm_rotation_block() {
        // exp(θ J) with J = [[0,1],[-1,0]] is the rotation by θ.
        let theta = 1.234f64;
        let j = Matrix2::new(0.0, theta, -theta, 0.0);
        let e = expm(&j);
        assert_abs_diff_eq!(e[(0, 0)], theta.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(0, 1)], theta.sin(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(1, 0)], -theta.sin(), epsilon = 1e-14);
    }

    #[test]
    fn expm_defective_jordan_block() {
        // exp of a 2x2 Jordan block [[a,1],[0,a]] is e^a [[1,1],[0,1]].
        let a = -0.7f64;
        let m = Matrix2::new(a, 1.0, 0.0, a);
        let e = expm(&m);
        assert_abs_diff_eq!(e[(0, 0)], a.exp(), epsilon = 1e-13);
        assert_abs_diff_eq!(e[(0, 1)], a.exp(), epsilon = 1e-13);
        assert_abs_diff_eq!(e[(1, 0)], 0.0, epsilon = 1e-13);
    }

    #[test]
    fn expm_matches_taylor_series_on_moderate_input() {
        let a = Matrix4::new(
            0.2, -0.5, 0.1, 0.0, //
            0.3, 0.0, -0.2, 0.4, //
            -0.1, 0.2, 0.5, -0.3, //
            0.0, 0.1, 0.2, -0.4,
        );
        let mut series = Matrix4::identity();
        let mut term = Matrix4::identity();
        for k in 1..40 {
            term = term * a / k as f64;
            series += term;
        }
        assert_abs_diff_eq!(expm(&a), series, epsilon = 1e-13);
    }

    #[test]
    fn van_loan_matches_scalar_ou_integral() {
        // For diagonal F and N the integral is n_i (e^{2 f_i t} - 1) / (2 f_i).
        let f = Matrix4::from_diagonal(&nalgebra::Vector4::new(-0.5, -1.0, -2.0, -0.1));
        let n = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 2.0, 0.5, 3.0));
        let t = 1.7;
        let (g, w) = van_loan_gw(&f, &n, t);
        for i in 0..4 {
            let fi = f[(i, i)];
            assert_abs_diff_eq!(g[(i, i)], (fi * t).exp(), epsilon = 1e-13);
            let exact = n[(i, i)] * ((2.0 * fi * t).exp() - 1.0) / (2.0 * fi);
            assert_abs_diff_eq!(w[(i, i)], exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn van_loan_zero_time() {
        let f = Matrix4::new(
            0.4, -1.1, 0.2, 0.0, //
            0.9, 0.3, -0.5, 1.2, //
            -0.7, 0.1, 0.8, -0.2, //
            0.5, -0.3, 0.6, -1.0,
        );
        let n = Matrix4::identity();
        let (g, w) = van_loan_gw(&f, &n, 0.0);
        assert_abs_diff_eq!(g, Matrix4::identity(), epsilon = 1e-15);
        assert_abs_diff_eq!(w, Matrix4::zeros(), epsilon = 1e-15);
    }
}
