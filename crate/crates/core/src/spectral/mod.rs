//! Legendre-Galerkin discretization on the square `(-1, 1)^2`.
//!
//! Coefficient matrices are indexed `[(i, j)]` with `i` the `x` degree and `j`
//! the `y` degree. Velocity components live in the tensor Dirichlet basis
//! `phi_i(x) phi_j(y)`; pressures and derived quantities (gradients,
//! divergence, products) live in the full Legendre space of degree `<= n` in
//! each direction, where differentiation is exact.

mod basis;
mod io;

pub use basis::{legendre_values, lgl_nodes_weights, Basis1D, Sparse, MIN_DEGREE};
pub use io::{nodes_csv, read_snapshots, write_snapshot, Snapshot, SNAPSHOT_MAGIC};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::Combine;

/// Which coefficient space a [`Field2D`] lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    /// Homogeneous Dirichlet tensor basis, `(n-1) x (n-1)` coefficients.
    Velocity,
    /// Full Legendre tensor basis, `(n+1) x (n+1)` coefficients.
    Full,
}

impl Space {
    pub fn dim(self, degree: usize) -> usize {
        match self {
            Space::Velocity => degree - 1,
            Space::Full => degree + 1,
        }
    }

    pub fn tag(self) -> u32 {
        match self {
            Space::Velocity => 0,
            Space::Full => 1,
        }
    }

    pub fn from_tag(t: u32) -> Option<Self> {
        match t {
            0 => Some(Space::Velocity),
            1 => Some(Space::Full),
            _ => None,
        }
    }
}

/// A scalar field as a tensor coefficient matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    space: Space,
    coeffs: DMatrix<f64>,
}

impl Field2D {
    pub fn new(b: &Basis1D, space: Space, coeffs: DMatrix<f64>) -> Result<Self> {
        Self::with_degree(b.degree(), space, coeffs)
    }

    pub(crate) fn with_degree(degree: usize, space: Space, coeffs: DMatrix<f64>) -> Result<Self> {
        let d = space.dim(degree);
        if coeffs.shape() != (d, d) {
            return Err(Error::LengthMismatch {
                what: format!("{space:?} coefficient matrix side"),
                expected: d,
                got: if coeffs.nrows() != d { coeffs.nrows() } else { coeffs.ncols() },
            });
        }
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Field2D { space, coeffs })
    }

    pub(crate) fn full(coeffs: DMatrix<f64>) -> Self {
        Field2D { space: Space::Full, coeffs }
    }

    pub(crate) fn velocity(coeffs: DMatrix<f64>) -> Self {
        Field2D { space: Space::Velocity, coeffs }
    }

    pub fn zeros(b: &Basis1D, space: Space) -> Self {
        let d = space.dim(b.degree());
        Field2D { space, coeffs: DMatrix::zeros(d, d) }
    }

    /// Samples `f` at the quadrature nodes and transforms into `space`.
    pub fn from_fn(b: &Basis1D, space: Space, f: impl Fn(f64, f64) -> f64) -> Self {
        let x = b.nodes();
        let grid = DMatrix::from_fn(x.len(), x.len(), |a, c| f(x[a], x[c]));
        grid_to_coeffs(b, &grid, space)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> DMatrix<f64> {
        self.coeffs
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|v| v.is_finite())
    }

    /// Coefficients in the full Legendre basis.
    pub fn to_legendre(&self, b: &Basis1D) -> DMatrix<f64> {
        match self.space {
            Space::Full => self.coeffs.clone(),
            Space::Velocity => b.velocity_to_legendre_sparse().sandwich(&self.coeffs),
        }
    }

    /// Point evaluation.
    pub fn eval(&self, b: &Basis1D, x: f64, y: f64) -> f64 {
        let n = b.degree();
        let lx = nalgebra::DVector::from_vec(legendre_values(n, x));
        let ly = nalgebra::DVector::from_vec(legendre_values(n, y));
        (lx.transpose() * self.to_legendre(b) * ly)[(0, 0)]
    }

    /// `L2` inner product over the square.
    pub fn inner(&self, other: &Field2D, b: &Basis1D) -> f64 {
        legendre_inner(b, &self.to_legendre(b), &other.to_legendre(b))
    }

    pub fn l2_norm(&self, b: &Basis1D) -> f64 {
        self.inner(self, b).max(0.0).sqrt()
    }

    /// Average over the square.
    pub fn mean(&self, b: &Basis1D) -> f64 {
        match self.space {
            Space::Full => self.coeffs[(0, 0)],
            Space::Velocity => self.to_legendre(b)[(0, 0)],
        }
    }
}

impl Combine for Field2D {
    fn zero_like(&self) -> Self {
        Field2D { space: self.space, coeffs: self.coeffs.zero_like() }
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        assert_eq!(self.space, x.space, "axpy across coefficient spaces");
        self.coeffs.axpy(a, &x.coeffs);
    }
}

pub(crate) fn legendre_inner(b: &Basis1D, p: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    let w = b.legendre_norms();
    let mut s = 0.0;
    for j in 0..p.ncols() {
        for i in 0..p.nrows() {
            s += w[i] * w[j] * p[(i, j)] * q[(i, j)];
        }
    }
    s
}

/// Velocity `(u1, u2)`, both components in the Dirichlet space.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    u1: Field2D,
    u2: Field2D,
}

impl VelocityField {
    pub fn new(u1: Field2D, u2: Field2D) -> Result<Self> {
        if u1.space != Space::Velocity || u2.space != Space::Velocity {
            return Err(Error::InvalidArgument("velocity components must be in the Dirichlet space".into()));
        }
        if u1.coeffs.shape() != u2.coeffs.shape() {
            return Err(Error::LengthMismatch {
                what: "velocity component".into(),
                expected: u1.coeffs.nrows(),
                got: u2.coeffs.nrows(),
            });
        }
        Ok(VelocityField { u1, u2 })
    }

    pub fn zeros(b: &Basis1D) -> Self {
        VelocityField { u1: Field2D::zeros(b, Space::Velocity), u2: Field2D::zeros(b, Space::Velocity) }
    }

    pub fn from_fn(b: &Basis1D, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        VelocityField {
            u1: Field2D::from_fn(b, Space::Velocity, |x, y| f(x, y)[0]),
            u2: Field2D::from_fn(b, Space::Velocity, |x, y| f(x, y)[1]),
        }
    }

    pub fn u1(&self) -> &Field2D {
        &self.u1
    }

    pub fn u2(&self) -> &Field2D {
        &self.u2
    }

    pub fn into_parts(self) -> (Field2D, Field2D) {
        (self.u1, self.u2)
    }

    pub fn is_finite(&self) -> bool {
        self.u1.is_finite() && self.u2.is_finite()
    }

    /// `||u||_{L2}`.
    pub fn l2_norm(&self, b: &Basis1D) -> f64 {
        (self.u1.inner(&self.u1, b) + self.u2.inner(&self.u2, b)).max(0.0).sqrt()
    }

    /// `0.5 ||u||^2`.
    pub fn energy(&self, b: &Basis1D) -> f64 {
        0.5 * self.l2_norm(b).powi(2)
    }

    /// `||grad u||_{L2}` over both components.
    pub fn grad_norm(&self, b: &Basis1D) -> f64 {
        let mut s = 0.0;
        for f in [&self.u1, &self.u2] {
            let l = f.to_legendre(b);
            let (gx, gy) = (dx(b, &l), dy(b, &l));
            s += legendre_inner(b, &gx, &gx) + legendre_inner(b, &gy, &gy);
        }
        s.max(0.0).sqrt()
    }

    /// Largest magnitude on the boundary nodes of the quadrature grid.
    pub fn boundary_max(&self, b: &Basis1D) -> f64 {
        [&self.u1, &self.u2]
            .iter()
            .map(|f| {
                let g = transform_to_nodes(b, f);
                let m = g.nrows() - 1;
                (0..=m)
                    .flat_map(|i| [g[(0, i)], g[(m, i)], g[(i, 0)], g[(i, m)]])
                    .fold(0.0f64, |acc, v| acc.max(v.abs()))
            })
            .fold(0.0, f64::max)
    }
}

impl Combine for VelocityField {
    fn zero_like(&self) -> Self {
        VelocityField { u1: self.u1.zero_like(), u2: self.u2.zero_like() }
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        self.u1.axpy(a, &x.u1);
        self.u2.axpy(a, &x.u2);
    }
}

/// Mean-zero pressure in the full space.
#[derive(Clone, Debug, PartialEq)]
pub struct PressureField {
    p: Field2D,
}

impl PressureField {
    /// Wraps a full-space field, projecting out its mean.
    pub fn new(b: &Basis1D, p: Field2D) -> Result<Self> {
        let mut coeffs = match p.space {
            Space::Full => p.coeffs,
            Space::Velocity => p.to_legendre(b),
        };
        coeffs[(0, 0)] = 0.0;
        Ok(PressureField { p: Field2D::new(b, Space::Full, coeffs)? })
    }

    pub fn zeros(b: &Basis1D) -> Self {
        PressureField { p: Field2D::zeros(b, Space::Full) }
    }

    pub fn from_fn(b: &Basis1D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut p = Field2D::from_fn(b, Space::Full, f);
        p.coeffs[(0, 0)] = 0.0;
        PressureField { p }
    }

    pub fn field(&self) -> &Field2D {
        &self.p
    }

    pub fn into_field(self) -> Field2D {
        self.p
    }
}

impl Combine for PressureField {
    fn zero_like(&self) -> Self {
        PressureField { p: self.p.zero_like() }
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        self.p.axpy(a, &x.p);
    }
}

fn grid_to_coeffs(b: &Basis1D, grid: &DMatrix<f64>, space: Space) -> Field2D {
    let p = b.projection();
    let leg = p * grid * p.transpose();
    match space {
        Space::Full => Field2D::full(leg),
        Space::Velocity => Field2D::velocity(legendre_to_velocity(b, &leg)),
    }
}

/// `L2` projection of Legendre coefficients onto the Dirichlet space.
pub fn legendre_to_velocity(b: &Basis1D, leg: &DMatrix<f64>) -> DMatrix<f64> {
    let q = b.legendre_to_velocity();
    q * leg * q.transpose()
}

/// Values on the `m x m` Lobatto grid, `grid[(a, c)] = f(x_a, y_c)`.
pub fn transform_to_nodes(b: &Basis1D, f: &Field2D) -> DMatrix<f64> {
    let v = b.legendre_at_nodes();
    v * f.to_legendre(b) * v.transpose()
}

/// Inverse of [`transform_to_nodes`] on resolved fields; for velocity fields
/// the result is the `L2` projection onto the Dirichlet space.
pub fn transform_to_coeffs(b: &Basis1D, grid: &DMatrix<f64>, space: Space) -> Result<Field2D> {
    let m = b.n_nodes();
    if grid.shape() != (m, m) {
        return Err(Error::LengthMismatch {
            what: "node grid side".into(),
            expected: m,
            got: if grid.nrows() != m { grid.nrows() } else { grid.ncols() },
        });
    }
    let f = grid_to_coeffs(b, grid, space);
    if !f.is_finite() {
        return Err(Error::InvalidArgument("non-finite node value".into()));
    }
    Ok(f)
}

/// `d/dx` on Legendre coefficients.
pub fn dx(b: &Basis1D, leg: &DMatrix<f64>) -> DMatrix<f64> {
    b.derivative_matrix() * leg
}

/// `d/dy` on Legendre coefficients.
pub fn dy(b: &Basis1D, leg: &DMatrix<f64>) -> DMatrix<f64> {
    leg * b.derivative_matrix().transpose()
}

pub fn grad(b: &Basis1D, p: &Field2D) -> (Field2D, Field2D) {
    let l = p.to_legendre(b);
    (Field2D::full(dx(b, &l)), Field2D::full(dy(b, &l)))
}

pub fn div(b: &Basis1D, u: &VelocityField) -> Field2D {
    Field2D::full(dx(b, &u.u1.to_legendre(b)) + dy(b, &u.u2.to_legendre(b)))
}

/// Laplacian on Legendre coefficients.
pub fn lap(b: &Basis1D, leg: &DMatrix<f64>) -> DMatrix<f64> {
    let d2 = b.second_derivative_matrix();
    d2 * leg + leg * d2.transpose()
}

pub fn laplacian(b: &Basis1D, f: &Field2D) -> Field2D {
    Field2D::full(lap(b, &f.to_legendre(b)))
}

/// `omega = d_x u2 - d_y u1`.
pub fn vorticity(b: &Basis1D, u: &VelocityField) -> Field2D {
    Field2D::full(dx(b, &u.u2.to_legendre(b)) - dy(b, &u.u1.to_legendre(b)))
}

/// `curl curl u = (d_y omega, -d_x omega)`.
pub fn curlcurl(b: &Basis1D, u: &VelocityField) -> (Field2D, Field2D) {
    let w = vorticity(b, u).coeffs;
    (Field2D::full(dy(b, &w)), Field2D::full(-dx(b, &w)))
}

/// Right-hand side `(f, phi_i phi_j)` of a velocity solve.
pub fn galerkin_load(b: &Basis1D, f: &Field2D) -> DMatrix<f64> {
    b.velocity_to_legendre_sparse().tr_sandwich(&weigh(b, f.to_legendre(b)))
}

/// `Ml x Ml` with `Ml` the diagonal Legendre mass.
fn weigh(b: &Basis1D, mut x: DMatrix<f64>) -> DMatrix<f64> {
    let w = b.legendre_norms();
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            x[(i, j)] *= w[i] * w[j];
        }
    }
    x
}

fn check_helmholtz(alpha: f64, diffusion: f64) -> Result<()> {
    if !alpha.is_finite() || !diffusion.is_finite() || alpha < 0.0 || diffusion < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "helmholtz coefficients must be finite and nonnegative (alpha = {alpha}, diffusion = {diffusion})"
        )));
    }
    if alpha == 0.0 && diffusion == 0.0 {
        return Err(Error::Singular("helmholtz operator with alpha = diffusion = 0".into()));
    }
    Ok(())
}

/// Galerkin form `alpha (u, v) + diffusion (grad u, grad v)` over the velocity test basis.
pub fn helmholtz_apply(b: &Basis1D, alpha: f64, diffusion: f64, u: &Field2D) -> DMatrix<f64> {
    let c = match u.space {
        Space::Velocity => u.coeffs.clone(),
        Space::Full => legendre_to_velocity(b, &u.coeffs),
    };
    let m = b.velocity_mass();
    let k = DMatrix::from_diagonal(b.velocity_stiffness());
    let mcm = m * &c * m;
    let kcm = &k * &c * m;
    let mck = m * &c * &k;
    mcm * alpha + (kcm + mck) * diffusion
}

/// Solves `alpha u - diffusion Lap u = rhs` with `u = 0` on the boundary.
pub fn helmholtz_solve(b: &Basis1D, alpha: f64, diffusion: f64, rhs: &Field2D) -> Result<Field2D> {
    check_helmholtz(alpha, diffusion)?;
    if !rhs.is_finite() {
        return Err(Error::InvalidArgument("non-finite helmholtz right-hand side".into()));
    }
    let (e, lam) = b.velocity_eigen();
    let mut w = e.transpose() * galerkin_load(b, rhs) * e;
    for j in 0..w.ncols() {
        for i in 0..w.nrows() {
            w[(i, j)] /= alpha * lam[i] * lam[j] + diffusion * (lam[i] + lam[j]);
        }
    }
    Ok(Field2D::velocity(e * w * e.transpose()))
}

/// `(g, grad q)` over the pressure test basis.
pub fn pressure_load(b: &Basis1D, g: (&Field2D, &Field2D)) -> DMatrix<f64> {
    let d = b.derivative_matrix();
    let h = d.transpose() * weigh(b, g.0.to_legendre(b)) + weigh(b, g.1.to_legendre(b)) * d;
    b.pressure_to_legendre_sparse().tr_sandwich(&h)
}

/// Mean-zero `p` with `(grad p, grad q) = (g, grad q)` for every pressure test function.
pub fn pressure_poisson(b: &Basis1D, g: (&Field2D, &Field2D)) -> Result<PressureField> {
    if !g.0.is_finite() || !g.1.is_finite() {
        return Err(Error::InvalidArgument("non-finite pressure right-hand side".into()));
    }
    let (e, lam, zero) = b.pressure_eigen();
    let mut w = e.transpose() * pressure_load(b, g) * e;
    for j in 0..w.ncols() {
        for i in 0..w.nrows() {
            if i == zero && j == zero {
                w[(i, j)] = 0.0;
            } else {
                w[(i, j)] /= lam[i] + lam[j];
            }
        }
    }
    let t = b.pressure_to_legendre_sparse();
    PressureField::new(b, Field2D::full(t.sandwich(&(e * w * e.transpose()))))
}

/// Galerkin residual `(grad p - g, grad q)` over the pressure test basis.
pub fn pressure_residual(b: &Basis1D, p: &PressureField, g: (&Field2D, &Field2D)) -> DMatrix<f64> {
    let (gx, gy) = grad(b, &p.p);
    pressure_load(b, (&gx, &gy)) - pressure_load(b, g)
}

/// `(u . grad) u` on Legendre coefficients, evaluated on the dealiased grid
/// and projected back onto the full space.
pub fn advect_legendre(b: &Basis1D, u1: &DMatrix<f64>, u2: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let v = b.legendre_at_nodes();
    let vt = v.transpose();
    let p = b.projection();
    let pt = p.transpose();
    let nodes = |a: &DMatrix<f64>| v * a * &vt;
    let (a1, a2) = (nodes(u1), nodes(u2));
    let comp = |c: &DMatrix<f64>| {
        let n = a1.component_mul(&nodes(&dx(b, c))) + a2.component_mul(&nodes(&dy(b, c)));
        p * n * &pt
    };
    (comp(u1), comp(u2))
}

pub fn nonlinear_term(b: &Basis1D, u: &VelocityField) -> (Field2D, Field2D) {
    let (n1, n2) = advect_legendre(b, &u.u1.to_legendre(b), &u.u2.to_legendre(b));
    (Field2D::full(n1), Field2D::full(n2))
}
