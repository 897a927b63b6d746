//! Probabilists' Hermite polynomials `He_n`, their zeros, and Gauss-Hermite
//! quadrature against the normalised weight `(2π)^{-1/2} e^{-v²/2}`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// `He_n(x)` by the three-term recurrence.
pub fn hermite_eval(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `(h_{n-1}(x), h_n(x))` for the orthonormal family `h_n = He_n / √(n!)`.
fn normalized_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (prev, cur)
}

/// Eigen-decomposition of the symmetric Jacobi matrix of `He_n`
/// (zero diagonal, off-diagonal `√k`).
///
/// Eigenvalues are the zeros of `He_n` (ascending); `vectors` is row-major
/// `n × n` with column `j` the unit eigenvector of `zeros[j]`.
#[derive(Debug, Clone)]
pub struct JacobiEigen {
    pub zeros: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl JacobiEigen {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("Hermite order must be >= 1".into()));
        }
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let off = (k as f64).sqrt();
            jacobi[(k - 1, k)] = off;
            jacobi[(k, k - 1)] = off;
        }
        let eig = SymmetricEigen::try_new(jacobi, f64::EPSILON, 10_000 * n.max(1))
            .ok_or(Error::EigenSolve(n))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let mut zeros = Vec::with_capacity(n);
        for &j in &order {
            let mut z = eig.eigenvalues[j];
            if n > 1 {
                let (lower, upper) = normalized_pair(n, z);
                z -= upper / ((n as f64).sqrt() * lower);
            }
            zeros.push(z);
        }
        // Symmetry is exact for the true zeros; pin it so speed lists are
        // symmetric bit-for-bit.
        for i in 0..n / 2 {
            let half = 0.5 * (zeros[n - 1 - i] - zeros[i]);
            zeros[i] = -half;
            zeros[n - 1 - i] = half;
        }
        if n % 2 == 1 {
            zeros[n / 2] = 0.0;
        }
        for &z in &zeros {
            let (lower, upper) = normalized_pair(n, z);
            let step = if n > 1 {
                (upper / ((n as f64).sqrt() * lower)).abs()
            } else {
                upper.abs()
            };
            if !step.is_finite() || step > 1e-12 * z.abs().max(1.0) {
                return Err(Error::EigenSolve(n));
            }
        }

        let mut vectors = vec![0.0; n * n];
        for (col, &j) in order.iter().enumerate() {
            for row in 0..n {
                vectors[row * n + col] = eig.eigenvectors[(row, j)];
            }
        }
        Ok(JacobiEigen { zeros, vectors })
    }
}

/// All `n` zeros of `He_n` in ascending order.
pub fn hermite_zeros(n: usize) -> Result<Vec<f64>> {
    Ok(JacobiEigen::new(n)?.zeros)
}

/// Gauss-Hermite weights for the normalised Gaussian weight; they sum to 1.
pub fn gauss_hermite_weights(n: usize) -> Result<Vec<f64>> {
    Ok(weights_at(n, &hermite_zeros(n)?))
}

fn weights_at(n: usize, zeros: &[f64]) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    zeros
        .iter()
        .map(|&z| {
            let (lower, _) = normalized_pair(n, z);
            1.0 / (n as f64 * lower * lower)
        })
        .collect()
}

/// Zeros and quadrature weights of one order, computed once and shared.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    pub order: usize,
    pub zeros: Vec<f64>,
    pub weights: Vec<f64>,
}

impl HermiteTable {
    pub fn new(order: usize) -> Result<Self> {
        let zeros = hermite_zeros(order)?;
        let weights = weights_at(order, &zeros);
        Ok(HermiteTable {
            order,
            zeros,
            weights,
        })
    }

    /// `Σ_j w_j g(z_j)`, i.e. `E[g(Z)]` for standard normal `Z` when `g`
    /// is a polynomial of degree `≤ 2·order − 1`.
    pub fn expect(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.zeros
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * g(z))
            .sum()
    }

    pub fn max_zero(&self) -> f64 {
        *self.zeros.last().expect("order >= 1")
    }
}

/// Largest zero of `He_n`.
pub fn max_hermite_zero(n: usize) -> Result<f64> {
    Ok(*hermite_zeros(n)?.last().expect("n >= 1"))
}
