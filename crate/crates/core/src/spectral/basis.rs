//! One-dimensional Legendre machinery shared by both tensor directions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Legendre values `L_0(x) ..= L_n(x)` by the three-term recurrence.
pub fn legendre_values(n: usize, x: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(n + 1);
    v.push(1.0);
    if n >= 1 {
        v.push(x);
    }
    for j in 1..n {
        let jf = j as f64;
        v.push(((2.0 * jf + 1.0) * x * v[j] - jf * v[j - 1]) / (jf + 1.0));
    }
    v
}

/// Legendre-Gauss-Lobatto nodes (ascending) and weights on `m` points.
pub fn lgl_nodes_weights(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 2, "LGL rule needs at least two points");
    let n = m - 1;
    let nf = n as f64;
    let mut x: Vec<f64> = (0..m).map(|j| -(std::f64::consts::PI * j as f64 / nf).cos()).collect();
    // Newton on (1 - x^2) L_n'(x), written through L_n and L_{n-1}.
    for xi in x.iter_mut().take(n).skip(1) {
        for _ in 0..100 {
            let l = legendre_values(n, *xi);
            let step = (*xi * l[n] - l[n - 1]) / (m as f64 * l[n]);
            *xi -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
    }
    let w = x
        .iter()
        .map(|&xi| {
            let ln = legendre_values(n, xi)[n];
            2.0 / (nf * (nf + 1.0) * ln * ln)
        })
        .collect();
    (x, w)
}

/// Sparse matrix as `(row, col, value)` triplets; the basis changes between
/// compact and Legendre coefficients have at most two entries per column.
#[derive(Clone, Debug)]
pub struct Sparse {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Sparse {
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if m[(i, j)] != 0.0 {
                    entries.push((i, j, m[(i, j)]));
                }
            }
        }
        Sparse { nrows: m.nrows(), ncols: m.ncols(), entries }
    }

    /// `self * x`.
    pub fn mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.nrows, x.ncols());
        for j in 0..x.ncols() {
            for &(r, c, v) in &self.entries {
                out[(r, j)] += v * x[(c, j)];
            }
        }
        out
    }

    /// `self^T * x`.
    pub fn tr_mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.ncols, x.ncols());
        for j in 0..x.ncols() {
            for &(r, c, v) in &self.entries {
                out[(c, j)] += v * x[(r, j)];
            }
        }
        out
    }

    /// `self * x * self^T`.
    pub fn sandwich(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.mul(&self.mul(x).transpose()).transpose()
    }

    /// `self^T * x * self`.
    pub fn tr_sandwich(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.tr_mul(&self.tr_mul(x).transpose()).transpose()
    }
}

/// Spectral-Galerkin tables for polynomial degree `n` in one direction.
///
/// Velocity functions are `phi_j = L_j - L_{j+2}` (`j = 0 ..= n-2`); the full
/// space is `L_0 ..= L_n`. Quadrature uses `ceil(3n/2) + 2` Lobatto points so
/// that quadratic products project exactly.
#[derive(Clone, Debug)]
pub struct Basis1D {
    n: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `L_j(x_a)`, `m x (n+1)`.
    leg: DMatrix<f64>,
    /// Discrete Legendre projection, `(n+1) x m`.
    proj: DMatrix<f64>,
    /// `||L_j||^2 = 2/(2j+1)`.
    leg_norm: DVector<f64>,
    /// Legendre coefficients of `d/dx`.
    deriv: DMatrix<f64>,
    deriv2: DMatrix<f64>,
    /// Columns are `phi_j` in Legendre coefficients, `(n+1) x (n-1)`.
    s: DMatrix<f64>,
    s_sparse: Sparse,
    vel_mass: DMatrix<f64>,
    /// L2 projection from Legendre coefficients onto the velocity space, `(n-1) x (n+1)`.
    vel_proj: DMatrix<f64>,
    vel_stiff: DVector<f64>,
    /// `E^T K E = I`, `E^T M E = diag(vel_lambda)`.
    vel_e: DMatrix<f64>,
    vel_lambda: DVector<f64>,
    /// Pressure basis `{L_0, L_1, phi_0, ..}` in Legendre coefficients.
    pres_t: DMatrix<f64>,
    pres_t_sparse: Sparse,
    pres_mass: DMatrix<f64>,
    pres_stiff: DVector<f64>,
    /// `E^T M E = I`, `E^T K E = diag(pres_lambda)`.
    pres_e: DMatrix<f64>,
    pres_lambda: DVector<f64>,
    pres_zero: usize,
}

/// Smallest supported polynomial degree.
pub const MIN_DEGREE: usize = 3;

impl Basis1D {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_DEGREE {
            return Err(Error::InvalidArgument(format!("polynomial degree {n} below {MIN_DEGREE}")));
        }
        let m = (3 * n).div_ceil(2) + 2;
        let (nodes, weights) = lgl_nodes_weights(m);
        let leg = DMatrix::from_fn(m, n + 1, |a, j| legendre_values(n, nodes[a])[j]);
        let leg_norm = DVector::from_fn(n + 1, |j, _| 2.0 / (2.0 * j as f64 + 1.0));
        let proj = DMatrix::from_fn(n + 1, m, |j, a| leg[(a, j)] * weights[a] / leg_norm[j]);
        let deriv = DMatrix::from_fn(n + 1, n + 1, |k, j| {
            if j > k && (j - k) % 2 == 1 {
                2.0 * k as f64 + 1.0
            } else {
                0.0
            }
        });

        let nv = n - 1;
        let s = DMatrix::from_fn(n + 1, nv, |i, j| {
            if i == j {
                1.0
            } else if i == j + 2 {
                -1.0
            } else {
                0.0
            }
        });
        let mleg = DMatrix::from_diagonal(&leg_norm);
        let vel_mass = s.transpose() * &mleg * &s;
        let vel_proj = vel_mass
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Singular("velocity mass matrix".into()))?
            .solve(&(s.transpose() * &mleg));
        let vel_stiff = DVector::from_fn(nv, |j, _| 4.0 * j as f64 + 6.0);
        let k_isqrt = DMatrix::from_diagonal(&vel_stiff.map(|v| 1.0 / v.sqrt()));
        let eig = SymmetricEigen::new(&k_isqrt * &vel_mass * &k_isqrt);
        let vel_e = &k_isqrt * eig.eigenvectors;
        let vel_lambda = eig.eigenvalues;

        let mut pres_t = DMatrix::zeros(n + 1, n + 1);
        pres_t[(0, 0)] = 1.0;
        pres_t[(1, 1)] = 1.0;
        pres_t.view_mut((0, 2), (n + 1, nv)).copy_from(&s);
        let pres_mass = pres_t.transpose() * &mleg * &pres_t;
        let mut pres_stiff = DVector::zeros(n + 1);
        pres_stiff[1] = 2.0;
        pres_stiff.rows_mut(2, nv).copy_from(&vel_stiff);
        let chol = pres_mass
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Singular("pressure mass matrix".into()))?;
        let l_inv = chol.l().try_inverse().ok_or_else(|| Error::Singular("pressure mass factor".into()))?;
        let reduced = &l_inv * DMatrix::from_diagonal(&pres_stiff) * l_inv.transpose();
        let eig = SymmetricEigen::new((&reduced + reduced.transpose()) * 0.5);
        let pres_e = l_inv.transpose() * eig.eigenvectors;
        let pres_lambda = eig.eigenvalues;
        let scale = pres_lambda.amax();
        let zeros: Vec<usize> = (0..=n).filter(|&i| pres_lambda[i].abs() <= 1e-10 * scale).collect();
        if zeros.len() != 1 {
            return Err(Error::Singular(format!(
                "pressure stiffness has {} null modes, expected 1",
                zeros.len()
            )));
        }
        Ok(Basis1D {
            n,
            nodes,
            weights,
            leg,
            proj,
            leg_norm,
            deriv2: &deriv * &deriv,
            deriv,
            s_sparse: Sparse::from_dense(&s),
            s,
            vel_mass,
            vel_proj,
            vel_stiff,
            vel_e,
            vel_lambda,
            pres_t_sparse: Sparse::from_dense(&pres_t),
            pres_t,
            pres_mass,
            pres_stiff,
            pres_e,
            pres_lambda,
            pres_zero: zeros[0],
        })
    }

    /// Polynomial degree.
    pub fn degree(&self) -> usize {
        self.n
    }

    /// Number of velocity basis functions per direction.
    pub fn n_velocity(&self) -> usize {
        self.n - 1
    }

    pub fn n_full(&self) -> usize {
        self.n + 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn legendre_at_nodes(&self) -> &DMatrix<f64> {
        &self.leg
    }

    pub fn legendre_norms(&self) -> &DVector<f64> {
        &self.leg_norm
    }

    pub fn derivative_matrix(&self) -> &DMatrix<f64> {
        &self.deriv
    }

    pub fn second_derivative_matrix(&self) -> &DMatrix<f64> {
        &self.deriv2
    }

    pub fn velocity_to_legendre_sparse(&self) -> &Sparse {
        &self.s_sparse
    }

    pub fn pressure_to_legendre_sparse(&self) -> &Sparse {
        &self.pres_t_sparse
    }

    /// Velocity-to-Legendre coefficient map.
    pub fn velocity_to_legendre(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn velocity_mass(&self) -> &DMatrix<f64> {
        &self.vel_mass
    }

    pub fn legendre_to_velocity(&self) -> &DMatrix<f64> {
        &self.vel_proj
    }

    pub fn velocity_stiffness(&self) -> &DVector<f64> {
        &self.vel_stiff
    }

    pub(crate) fn velocity_eigen(&self) -> (&DMatrix<f64>, &DVector<f64>) {
        (&self.vel_e, &self.vel_lambda)
    }

    pub fn pressure_to_legendre(&self) -> &DMatrix<f64> {
        &self.pres_t
    }

    pub fn pressure_mass(&self) -> &DMatrix<f64> {
        &self.pres_mass
    }

    pub fn pressure_stiffness(&self) -> &DVector<f64> {
        &self.pres_stiff
    }

    pub(crate) fn pressure_eigen(&self) -> (&DMatrix<f64>, &DVector<f64>, usize) {
        (&self.pres_e, &self.pres_lambda, self.pres_zero)
    }

    /// Discrete Legendre transform from node values, exact for degree `<= 2m - 3 - n`.
    pub fn projection(&self) -> &DMatrix<f64> {
        &self.proj
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_low_orders() {
        let v = legendre_values(3, 0.5);
        assert_eq!(v[0], 1.0);
        assert_eq!(v[1], 0.5);
        assert!((v[2] - (3.0 * 0.25 - 1.0) / 2.0).abs() < 1e-15);
        assert!((v[3] - (5.0 * 0.125 - 1.5) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn lgl_small_rules() {
        let (x, w) = lgl_nodes_weights(3);
        assert!((x[1]).abs() < 1e-15 && (x[0] + 1.0).abs() < 1e-15);
        assert!((w[0] - 1.0 / 3.0).abs() < 1e-15 && (w[1] - 4.0 / 3.0).abs() < 1e-15);
        let (x, w) = lgl_nodes_weights(4);
        assert!((x[2] - 5f64.sqrt() / 5.0).abs() < 1e-15);
        assert!((w[1] - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn velocity_functions_vanish_at_ends() {
        let b = Basis1D::new(12).unwrap();
        let at = |x: f64| legendre_values(12, x);
        for x in [-1.0, 1.0] {
            let l = DVector::from_vec(at(x));
            let vals = b.velocity_to_legendre().transpose() * l;
            assert!(vals.amax() < 1e-13);
        }
    }

    #[test]
    fn eigen_bases_diagonalize() {
        let b = Basis1D::new(16).unwrap();
        let (e, lam) = b.velocity_eigen();
        let k = DMatrix::from_diagonal(b.velocity_stiffness());
        let eye = e.transpose() * k * e;
        assert!((eye - DMatrix::identity(15, 15)).amax() < 1e-12);
        assert!((e.transpose() * b.velocity_mass() * e - DMatrix::from_diagonal(lam)).amax() < 1e-12);
        let (e, lam, z) = b.pressure_eigen();
        assert!((e.transpose() * b.pressure_mass() * e - DMatrix::identity(17, 17)).amax() < 1e-11);
        assert!(lam[z].abs() < 1e-10);
    }

    #[test]
    fn sparse_products_match_dense() {
        let b = Basis1D::new(9).unwrap();
        let x = DMatrix::from_fn(8, 8, |i, j| (i as f64 + 1.0) * 0.3 - (j as f64) * 0.7 + (i * j) as f64 * 0.01);
        let s = b.velocity_to_legendre();
        let sp = b.velocity_to_legendre_sparse();
        assert!((sp.sandwich(&x) - s * &x * s.transpose()).amax() < 1e-13);
        let y = DMatrix::from_fn(10, 10, |i, j| ((i + 2 * j) as f64).sin());
        assert!((sp.tr_sandwich(&y) - s.transpose() * &y * s).amax() < 1e-13);
        let t = b.pressure_to_legendre();
        let tp = b.pressure_to_legendre_sparse();
        assert!((tp.sandwich(&y) - t * &y * t.transpose()).amax() < 1e-13);
    }

    #[test]
    fn degree_too_small() {
        assert!(Basis1D::new(2).is_err());
    }
}
