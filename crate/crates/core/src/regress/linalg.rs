//! Ridge solve through a one-sided Jacobi SVD of the design matrix.
//!
//! Working on `X` directly (not `XᵀX`) keeps the conditioning of the
//! original problem, and dropping numerically zero singular values gives the
//! minimum-norm least-squares solution when `lambda = 0` and `X` is rank
//! deficient.

/// Solves `min ||X w - y||² + lambda ||w||²` for row-major `x` (n rows, p
/// columns).
pub fn ridge_solve(x: &[Vec<f64>], y: &[f64], lambda: f64) -> Vec<f64> {
    let n = x.len();
    let p = x.first().map_or(0, Vec::len);
    if n == 0 || p == 0 {
        return vec![0.0; p];
    }
    // Column-major working copy; `cols[j]` is column j of X V.
    let mut cols: Vec<Vec<f64>> = (0..p).map(|j| x.iter().map(|r| r[j]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..p)
        .map(|j| {
            let mut e = vec![0.0; p];
            e[j] = 1.0;
            e
        })
        .collect();

    const MAX_SWEEPS: usize = 60;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..p {
            for j in (i + 1)..p {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                let gamma = dot(&cols[i], &cols[j]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let tol = sigma_max * f64::EPSILON * n.max(p) as f64;
    let mut w = vec![0.0; p];
    for k in 0..p {
        if sigma[k] <= tol {
            continue;
        }
        // u_k = cols[k] / sigma_k, so the coefficient sigma_k (u_kᵀ y) / (sigma_k² + lambda)
        // equals (cols[k]ᵀ y) / (sigma_k² + lambda).
        let coef = dot(&cols[k], y) / (sigma[k] * sigma[k] + lambda);
        for (wi, vi) in w.iter_mut().zip(&v[k]) {
            *wi += coef * vi;
        }
    }
    w
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(j);
    let (a, b) = (&mut left[i], &mut right[0]);
    for (ai, bj) in a.iter_mut().zip(b.iter_mut()) {
        let (x, y) = (*ai, *bj);
        *ai = c * x - s * y;
        *bj = s * x + c * y;
    }
}
