//! Reference problems on `(-1, 1)^2` with no-slip walls.

use std::f64::consts::PI;
use std::sync::Arc;

/// Vector field of `(t, x, y)`.
pub type VectorFn = Arc<dyn Fn(f64, f64, f64) -> [f64; 2] + Send + Sync>;
/// Scalar field of `(t, x, y)`.
pub type ScalarFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Whether the convective term is part of the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Stokes,
    #[serde(alias = "navier-stokes", alias = "nse")]
    NavierStokes,
}

/// Velocity and pressure of an analytic solution.
#[derive(Clone)]
pub struct ExactSolution {
    pub velocity: VectorFn,
    pub pressure: ScalarFn,
}

impl std::fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ExactSolution { .. }")
    }
}

/// Divergence-free vortex pair `(sin 2pi y sin^2 pi x, -sin 2pi x sin^2 pi y)`.
pub fn vortex(x: f64, y: f64) -> [f64; 2] {
    let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
    [(2.0 * PI * y).sin() * sx * sx, -(2.0 * PI * x).sin() * sy * sy]
}

/// Initial data of the energy-evolution runs.
pub fn example1_initial() -> VectorFn {
    Arc::new(|_, x, y| vortex(x, y))
}

/// Manufactured solution `u = vortex(x, y) sin t`, `p = cos(pi x) sin(pi y) sin t`.
pub fn example2_exact() -> ExactSolution {
    ExactSolution {
        velocity: Arc::new(|t, x, y| vortex(x, y).map(|v| v * t.sin())),
        pressure: Arc::new(|t, x, y| (PI * x).cos() * (PI * y).sin() * t.sin()),
    }
}

/// Forcing `u_t + (u . grad) u - nu Lap u + grad p` for [`example2_exact`];
/// the convective part is dropped in Stokes mode.
pub fn example2_forcing(nu: f64, mode: Mode) -> VectorFn {
    Arc::new(move |t, x, y| {
        let (s, c) = t.sin_cos();
        let (sx, cx) = (PI * x).sin_cos();
        let (sy, cy) = (PI * y).sin_cos();
        let (s2x, c2x) = (2.0 * PI * x).sin_cos();
        let (s2y, c2y) = (2.0 * PI * y).sin_cos();
        let pi2 = PI * PI;

        let v1 = s2y * sx * sx;
        let v2 = -s2x * sy * sy;
        let lap1 = 2.0 * pi2 * s2y * c2x - 4.0 * pi2 * s2y * sx * sx;
        let lap2 = -(2.0 * pi2 * s2x * c2y - 4.0 * pi2 * s2x * sy * sy);
        let px = -PI * sx * sy;
        let py = PI * cx * cy;

        let mut f = [c * v1 - nu * s * lap1 + s * px, c * v2 - nu * s * lap2 + s * py];
        if mode == Mode::NavierStokes {
            let d1x = PI * s2x * s2y;
            let d1y = 2.0 * PI * c2y * sx * sx;
            let d2x = -2.0 * PI * c2x * sy * sy;
            let d2y = -PI * s2x * s2y;
            f[0] += s * s * (v1 * d1x + v2 * d1y);
            f[1] += s * s * (v1 * d2x + v2 * d2y);
        }
        f
    })
}
