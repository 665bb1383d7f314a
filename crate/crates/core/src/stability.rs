//! Linear stability of the generalized BDF scheme on `phi' = lambda phi`.
//!
//! With `phi^n = mu^n` and `z = lambda dt` the scheme `A(phi)/dt = lambda B(phi)`
//! has characteristic polynomial `sum_q (a_q - b_{q-1} z) mu^q` with `b_{-1} = 0`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par::{map_range, Exec};
use crate::roots::{poly_roots, PolyRoots};
use crate::stencil::{make_stencils, SchemeSpec, StencilSet};

/// Default modulus tolerance for [`is_stable`].
pub const DEFAULT_TOL: f64 = 1e-9;

/// Characteristic polynomial of one scheme, as a function of `z`.
#[derive(Clone, Debug)]
pub struct CharPoly {
    pub spec: SchemeSpec,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl CharPoly {
    pub fn new(st: &StencilSet) -> Self {
        CharPoly { spec: st.spec.clone(), a: st.a_f64(), b: st.b_f64() }
    }

    pub fn from_spec(spec: &SchemeSpec) -> Result<Self> {
        Ok(Self::new(&make_stencils(spec)?))
    }

    pub fn degree(&self) -> usize {
        self.a.len() - 1
    }

    /// Coefficients of `mu^0 .. mu^k` at `z`.
    pub fn coeffs_at(&self, z: Complex64) -> Vec<Complex64> {
        (0..=self.degree())
            .map(|q| {
                let bq = if q == 0 { 0.0 } else { self.b[q - 1] };
                Complex64::new(self.a[q], 0.0) - z * bq
            })
            .collect()
    }

    /// The `z` where the leading coefficient vanishes and the degree drops.
    pub fn pole(&self) -> Option<f64> {
        let lead_b = self.b[self.degree() - 1];
        (lead_b != 0.0).then(|| self.a[self.degree()] / lead_b)
    }
}

/// Roots of the characteristic polynomial at `z`.
///
/// At a pole the degree drops and fewer than `k` roots come back; the missing
/// root sits at infinity.
pub fn roots_at(cp: &CharPoly, z: Complex64) -> PolyRoots {
    poly_roots(&cp.coeffs_at(z))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    /// Multiple roots on (or within `tol` of) the unit circle.
    Boundary,
}

/// Classifies `z` by root moduli.
pub fn is_stable(cp: &CharPoly, z: Complex64, tol: f64) -> Verdict {
    classify(&roots_at(cp, z), tol)
}

pub fn classify(r: &PolyRoots, tol: f64) -> Verdict {
    if r.degree_dropped() || r.roots.iter().any(|m| !m.is_finite() || m.norm() > 1.0 + tol) {
        return Verdict::Unstable;
    }
    let unit: Vec<Complex64> = r.roots.iter().copied().filter(|m| m.norm() >= 1.0 - tol).collect();
    let simple = unit
        .iter()
        .enumerate()
        .all(|(i, a)| unit[i + 1..].iter().all(|b| (a - b).norm() > 10.0 * tol));
    if simple {
        Verdict::Stable
    } else {
        Verdict::Boundary
    }
}

/// Axis-aligned window in the complex `z` plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub const DEFAULT: Window = Window { re_min: -6.0, re_max: 1.0, im_min: -4.0, im_max: 4.0 };

    /// Parses `a,b,c,d` as `re_min,re_max,im_min,im_max`.
    pub fn parse(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad window component {t:?}"))))
            .collect::<Result<_>>()?;
        let [re_min, re_max, im_min, im_max] = v[..] else {
            return Err(Error::Parse(format!("window needs 4 values, got {}", v.len())));
        };
        let w = Window { re_min, re_max, im_min, im_max };
        w.validate().map_err(|_| Error::Parse(format!("empty window {s:?}")))?;
        Ok(w)
    }

    /// Finite with positive extent in both directions.
    pub fn validate(&self) -> Result<()> {
        let all = [self.re_min, self.re_max, self.im_min, self.im_max];
        if all.iter().all(|v| v.is_finite()) && self.re_min < self.re_max && self.im_min < self.im_max {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("empty or non-finite window {self:?}")))
        }
    }
}

/// Stability mask on a cell-centred grid; `mask[iy * nx + ix]`, `iy = 0` is
/// the lowest imaginary part.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionRaster {
    pub spec: SchemeSpec,
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub mask: Vec<bool>,
}

impl RegionRaster {
    pub fn point(&self, ix: usize, iy: usize) -> Complex64 {
        grid_point(&self.window, self.nx, self.ny, ix, iy)
    }

    pub fn stable(&self, ix: usize, iy: usize) -> bool {
        self.mask[iy * self.nx + ix]
    }

    pub fn stable_count(&self) -> usize {
        self.mask.iter().filter(|&&s| s).count()
    }

    /// CSV with columns `re,im,stable`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,stable\n");
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let z = self.point(ix, iy);
                let _ = writeln!(out, "{},{},{}", z.re, z.im, u8::from(self.stable(ix, iy)));
            }
        }
        out
    }

    /// Plain-text grid, top row = largest imaginary part, `#` = stable.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for iy in (0..self.ny).rev() {
            for ix in 0..self.nx {
                out.push(if self.stable(ix, iy) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }

    /// Binary PGM (P5, maxval 255, stable = 255), top row = largest imaginary part.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.nx, self.ny).into_bytes();
        for iy in (0..self.ny).rev() {
            out.extend((0..self.nx).map(|ix| if self.stable(ix, iy) { 255u8 } else { 0u8 }));
        }
        out
    }

    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_pgm())?;
        Ok(())
    }
}

fn grid_point(w: &Window, nx: usize, ny: usize, ix: usize, iy: usize) -> Complex64 {
    let dx = (w.re_max - w.re_min) / nx as f64;
    let dy = (w.im_max - w.im_min) / ny as f64;
    Complex64::new(w.re_min + (ix as f64 + 0.5) * dx, w.im_min + (iy as f64 + 0.5) * dy)
}

/// Minimum raster resolution per axis.
pub const MIN_RESOLUTION: usize = 16;

/// Scans a window; a cell is marked only when its verdict is [`Verdict::Stable`].
///
/// Rows are independent and may run in parallel; the result does not depend
/// on the schedule.
pub fn region_scan(spec: &SchemeSpec, window: Window, nx: usize, ny: usize, exec: Exec) -> Result<RegionRaster> {
    if nx < MIN_RESOLUTION || ny < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "resolution {nx}x{ny} below minimum {MIN_RESOLUTION}x{MIN_RESOLUTION}"
        )));
    }
    window.validate()?;
    let cp = CharPoly::from_spec(spec)?;
    let rows = map_range(exec, ny, |iy| {
        (0..nx)
            .map(|ix| is_stable(&cp, grid_point(&window, nx, ny, ix, iy), DEFAULT_TOL) == Verdict::Stable)
            .collect::<Vec<bool>>()
    });
    Ok(RegionRaster { spec: spec.clone(), window, nx, ny, mask: rows.concat() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(k: usize, beta: i64) -> CharPoly {
        CharPoly::from_spec(&SchemeSpec::int(k, beta)).unwrap()
    }

    fn sorted_re(r: &PolyRoots) -> Vec<f64> {
        let mut v: Vec<f64> = r.roots.iter().map(|z| z.re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn roots_at_origin_k2_beta3() {
        let r = roots_at(&cp(2, 3), Complex64::new(0.0, 0.0));
        let re = sorted_re(&r);
        assert!((re[0] - 5.0 / 7.0).abs() < 1e-14);
        assert!((re[1] - 1.0).abs() < 1e-14);
        assert_eq!(is_stable(&cp(2, 3), Complex64::new(0.0, 0.0), DEFAULT_TOL), Verdict::Stable);
    }

    #[test]
    fn bdf2_at_minus_one() {
        let r = roots_at(&cp(2, 1), Complex64::new(-1.0, 0.0));
        for m in &r.roots {
            assert!((m.norm() - 5f64.sqrt() / 5.0).abs() < 1e-14);
            assert!((m.re - 0.4).abs() < 1e-14 && (m.im.abs() - 0.2).abs() < 1e-14);
        }
    }

    #[test]
    fn bdf2_right_half_plane() {
        // z = 1: (1/2) mu^2 - 2 mu + 1/2 = 0, mu = 2 +- sqrt3.
        let r = roots_at(&cp(2, 1), Complex64::new(1.0, 0.0));
        let re = sorted_re(&r);
        assert!((re[1] - (2.0 + 3f64.sqrt())).abs() < 1e-13);
        assert_eq!(is_stable(&cp(2, 1), Complex64::new(1.0, 0.0), DEFAULT_TOL), Verdict::Unstable);
        // z = 10: -17/2 mu^2 - 2 mu + 1/2 = 0, mu = (-2 +- sqrt21)/17, both inside.
        let r = roots_at(&cp(2, 1), Complex64::new(10.0, 0.0));
        let re = sorted_re(&r);
        assert!((re[0] - (-2.0 - 21f64.sqrt()) / 17.0).abs() < 1e-14);
        assert!((re[1] - (-2.0 + 21f64.sqrt()) / 17.0).abs() < 1e-14);
        assert_eq!(is_stable(&cp(2, 1), Complex64::new(10.0, 0.0), DEFAULT_TOL), Verdict::Stable);
    }

    #[test]
    fn real_z_roots_are_conjugate_pairs() {
        let r = roots_at(&cp(2, 3), Complex64::new(-2.5, 0.0));
        let s: Complex64 = r.roots.iter().sum();
        assert!(s.im.abs() < 1e-12);
        if r.roots[0].im.abs() > 1e-12 {
            assert!((r.roots[0] - r.roots[1].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn pole_drops_degree() {
        let c = cp(2, 3);
        let pole = c.pole().unwrap();
        assert!((pole - 3.5 / 3.0).abs() < 1e-15);
        let r = roots_at(&c, Complex64::new(pole, 0.0));
        assert!(r.degree_dropped());
        assert_eq!(is_stable(&c, Complex64::new(pole, 0.0), DEFAULT_TOL), Verdict::Unstable);
    }

    #[test]
    fn double_unit_root_is_boundary() {
        let r = PolyRoots {
            roots: vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
            nominal_degree: 2,
            degree: 2,
        };
        assert_eq!(classify(&r, DEFAULT_TOL), Verdict::Boundary);
    }

    #[test]
    fn window_parsing() {
        assert_eq!(Window::parse("-6,1,-4,4").unwrap(), Window::DEFAULT);
        assert!(Window::parse("1,2,3").is_err());
        assert!(Window::parse("1,0,0,1").is_err());
    }

    #[test]
    fn small_resolution_rejected() {
        assert!(region_scan(&SchemeSpec::int(2, 1), Window::DEFAULT, 8, 64, Exec::Sequential).is_err());
    }

    #[test]
    fn pgm_header() {
        let r = region_scan(&SchemeSpec::int(2, 1), Window::DEFAULT, 16, 16, Exec::Sequential).unwrap();
        let pgm = r.to_pgm();
        assert!(pgm.starts_with(b"P5\n16 16\n255\n"));
        assert_eq!(pgm.len(), b"P5\n16 16\n255\n".len() + 256);
        assert_eq!(r.to_text().lines().count(), 16);
        assert_eq!(r.to_csv().lines().count(), 257);
    }
}
