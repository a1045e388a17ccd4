//! Hessian algebra in reduced coordinates.

use nalgebra::DMatrix;

/// Reduced Hessian `h_{μν} = H_{μν} + H_{00} − H_{0μ} − H_{0ν}` from the full
/// Hessian, with action 0 eliminated.
pub fn reduce(full: &DMatrix<f64>) -> DMatrix<f64> {
    let d = full.nrows() - 1;
    DMatrix::from_fn(d, d, |m, n| {
        full[(m + 1, n + 1)] + full[(0, 0)] - full[(0, n + 1)] - full[(m + 1, 0)]
    })
}

/// Reduced Hessian of a decomposable entropy, `q_μ δ_{μν} + q_0`, where
/// `q = (θ″(x_0), θ″(x_1), …)`.
pub fn kernel_reduced(q: &[f64]) -> DMatrix<f64> {
    let d = q.len() - 1;
    DMatrix::from_fn(d, d, |m, n| if m == n { q[m + 1] + q[0] } else { q[0] })
}

/// Harmonic aggregate `Q_h = 1/Σ_α 1/q_α`.
pub fn harmonic_aggregate(q: &[f64]) -> f64 {
    1.0 / q.iter().map(|v| 1.0 / v).sum::<f64>()
}

/// Closed-form inverse of [`kernel_reduced`]: `δ_{μν}/q_μ − Q_h/(q_μ q_ν)`.
pub fn kernel_reduced_inverse(q: &[f64]) -> DMatrix<f64> {
    let d = q.len() - 1;
    let qh = harmonic_aggregate(q);
    DMatrix::from_fn(d, d, |m, n| {
        let off = qh / (q[m + 1] * q[n + 1]);
        if m == n {
            1.0 / q[m + 1] - off
        } else {
            -off
        }
    })
}
