//! Viscous-term splitting `B = eta C + D + F` and its certificates.
//!
//! The splitting constants are terminating decimals, so everything here is
//! exact rational arithmetic until a certificate minimizes a polynomial on
//! `[-1, 1]`, which happens in `f64` from exactly known coefficients.

pub mod radical;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::linalg::{inner, norm_sq};
use crate::roots::{eval_real, poly_roots_real, real_roots_in};
use crate::stencil::{fmt_rational, make_stencils, parse_rational, rational_to_f64, SchemeSpec, StencilSet};
use radical::Radical;

/// Default splitting weight; the smallest two-decimal value above `sqrt(2)/2`.
pub const DEFAULT_ETA: &str = "0.71";

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Splitting of the implicit extrapolation `B` into `eta C + D + F`.
#[derive(Clone, Debug)]
pub struct SplitSet {
    pub spec: SchemeSpec,
    pub stencils: StencilSet,
    pub eta: BigRational,
    /// Oldest level first, same window as `B`.
    pub f: Vec<BigRational>,
    /// `d_q = b_q - eta c_q - f_q`.
    pub d: Vec<BigRational>,
    pub kappa: BigRational,
    /// False when `(k, beta)` has no tabulated `F` (then `F = 0`, `kappa = 0`).
    pub canonical: bool,
}

impl SplitSet {
    pub fn d_f64(&self) -> Vec<f64> {
        self.d.iter().map(rational_to_f64).collect()
    }

    pub fn f_f64(&self) -> Vec<f64> {
        self.f.iter().map(rational_to_f64).collect()
    }

    pub fn kappa_f64(&self) -> f64 {
        rational_to_f64(&self.kappa)
    }

    pub fn eta_f64(&self) -> f64 {
        rational_to_f64(&self.eta)
    }
}

/// `eta > sqrt(2)/2`, decided exactly.
pub fn eta_above_threshold(eta: &BigRational) -> bool {
    eta.is_positive() && eta * eta * q(2, 1) > BigRational::one()
}

fn tabulated_f(spec: &SchemeSpec) -> Option<(Vec<BigRational>, BigRational)> {
    if !spec.is_canonical() {
        return None;
    }
    Some(match spec.k {
        2 => (vec![q(0, 1), q(1, 100)], q(1, 100)),
        3 => (vec![q(0, 1), q(-21, 100), q(27, 100)], q(3, 50)),
        4 => (
            vec![q(0, 1), q(330, 100_000), q(-750, 100_000), q(430, 100_000)],
            q(1, 10_000),
        ),
        _ => unreachable!(),
    })
}

/// Builds the splitting for `spec` with weight `eta`.
pub fn make_split(spec: &SchemeSpec, eta: &BigRational) -> Result<SplitSet> {
    if !eta_above_threshold(eta) {
        return Err(Error::InvalidArgument(format!(
            "eta = {} must exceed sqrt(2)/2 ~ 0.70711",
            fmt_rational(eta)
        )));
    }
    let stencils = make_stencils(spec)?;
    let k = spec.k;
    let (f, kappa, canonical) = match tabulated_f(spec) {
        Some((f, kappa)) => (f, kappa, true),
        None => (vec![BigRational::zero(); k], BigRational::zero(), false),
    };
    let d = (0..k).map(|i| &stencils.b[i] - eta * &stencils.c[i] - &f[i]).collect();
    Ok(SplitSet { spec: spec.clone(), stencils, eta: eta.clone(), f, d, kappa, canonical })
}

pub fn make_split_default(spec: &SchemeSpec) -> Result<SplitSet> {
    make_split(spec, &parse_rational(DEFAULT_ETA)?)
}

/// Monomial coefficients (ascending) of the Chebyshev polynomial `T_m`.
fn chebyshev_t(m: usize) -> Vec<BigRational> {
    let mut prev = vec![BigRational::one()];
    if m == 0 {
        return prev;
    }
    let mut cur = vec![BigRational::zero(), BigRational::one()];
    for _ in 1..m {
        let mut next = vec![BigRational::zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c * q(2, 1);
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `Re[P(e^{i theta}) Q(e^{-i theta})]` as a polynomial in `y = cos theta`.
pub fn unit_circle_real_part(p: &[BigRational], qc: &[BigRational]) -> Vec<BigRational> {
    let deg = p.len().max(qc.len());
    let mut out = vec![BigRational::zero(); deg.max(1)];
    for (i, pi) in p.iter().enumerate() {
        for (j, qj) in qc.iter().enumerate() {
            let w = pi * qj;
            if w.is_zero() {
                continue;
            }
            for (l, t) in chebyshev_t(i.abs_diff(j)).iter().enumerate() {
                out[l] += &w * t;
            }
        }
    }
    while out.len() > 1 && out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    out
}

/// Exact resultant of two polynomials (ascending coefficients).
pub fn resultant(p: &[BigRational], qc: &[BigRational]) -> BigRational {
    let trim = |v: &[BigRational]| {
        let mut v = v.to_vec();
        while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        v
    };
    let p = trim(p);
    let qc = trim(qc);
    let m = p.len() - 1;
    let n = qc.len() - 1;
    let size = m + n;
    if size == 0 {
        return BigRational::one();
    }
    let mut s = vec![vec![BigRational::zero(); size]; size];
    for r in 0..n {
        for (i, c) in p.iter().rev().enumerate() {
            s[r][r + i] = c.clone();
        }
    }
    for r in 0..m {
        for (i, c) in qc.iter().rev().enumerate() {
            s[n + r][r + i] = c.clone();
        }
    }
    determinant(s)
}

fn determinant(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::one();
    for p in 0..n {
        let Some(piv) = (p..n).find(|&r| !a[r][p].is_zero()) else {
            return BigRational::zero();
        };
        if piv != p {
            a.swap(p, piv);
            det = -det;
        }
        let pv = a[p][p].clone();
        det *= &pv;
        for r in p + 1..n {
            let factor = &a[r][p] / &pv;
            if factor.is_zero() {
                continue;
            }
            for c in p..n {
                let v = &factor * &a[p][c];
                a[r][c] -= v;
            }
        }
    }
    det
}

/// Which multiplier lemma a certificate checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertKind {
    /// `Re D(z) / C(z) > 0` for `|z| > 1`.
    DOverC,
    /// `Re A(z) / (z C(z)) > 0` for `|z| > 1`.
    AOverZC,
}

impl CertKind {
    pub fn label(self) -> &'static str {
        match self {
            CertKind::DOverC => "D/C",
            CertKind::AOverZC => "A/(zC)",
        }
    }
}

/// Outcome of a unit-circle positivity check.
#[derive(Clone, Debug)]
pub struct CertResult {
    pub kind: CertKind,
    pub spec: SchemeSpec,
    pub canonical: bool,
    /// Coefficients in `y = cos theta`, ascending.
    pub polynomial: Vec<BigRational>,
    /// `polynomial / (1 - y)` when the polynomial vanishes at `y = 1`
    /// (always the case for `A/(zC)`, since `A(1) = 0`). The minimum is then
    /// taken over this quotient so that positivity away from `z = 1` is a
    /// strict test.
    pub reduced: Option<Vec<BigRational>>,
    pub min_value: f64,
    pub argmin_y: f64,
    /// `min_value > 0`.
    pub passed: bool,
    /// Numerator and denominator share no root (nonzero resultant).
    pub coprime: bool,
    pub numerator_roots: Vec<Complex64>,
    pub denominator_roots: Vec<Complex64>,
    /// Every denominator root strictly inside the unit disk.
    pub denominator_inside: bool,
}

impl CertResult {
    /// Positivity, coprimality and holomorphy outside the disk together.
    pub fn holds(&self) -> bool {
        self.passed && self.coprime && self.denominator_inside
    }

    pub fn polynomial_f64(&self) -> Vec<f64> {
        self.polynomial.iter().map(rational_to_f64).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let roots = |v: &[Complex64]| v.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>();
        json!({
            "kind": self.kind.label(),
            "k": self.spec.k,
            "beta": self.spec.beta.to_string(),
            "canonical": self.canonical,
            "polynomial": self.polynomial.iter().map(fmt_rational).collect::<Vec<_>>(),
            "reduced_polynomial": self.reduced.as_ref().map(|r| r.iter().map(fmt_rational).collect::<Vec<_>>()),
            "min_value": self.min_value,
            "argmin_y": self.argmin_y,
            "passed": self.passed,
            "coprime": self.coprime,
            "numerator_roots": roots(&self.numerator_roots),
            "denominator_roots": roots(&self.denominator_roots),
            "denominator_root_moduli": self.denominator_roots.iter().map(|z| z.norm()).collect::<Vec<_>>(),
            "denominator_inside": self.denominator_inside,
            "holds": self.holds(),
        })
    }

    pub fn pretty(&self) -> String {
        let mut s = format!(
            "[{}] {} ({})\n",
            self.kind.label(),
            self.spec,
            if self.canonical { "canonical" } else { "non-canonical, diagnostic" }
        );
        let poly: Vec<_> = self.polynomial.iter().map(fmt_rational).collect();
        s.push_str(&format!("  f(y) coefficients (ascending): [{}]\n", poly.join(", ")));
        if let Some(r) = &self.reduced {
            let red: Vec<_> = r.iter().map(fmt_rational).collect();
            s.push_str(&format!("  f(y)/(1-y) coefficients (ascending): [{}]\n", red.join(", ")));
        }
        s.push_str(&format!("  min over [-1,1]: {:.9e} at y = {:.9}\n", self.min_value, self.argmin_y));
        let moduli: Vec<_> = self.denominator_roots.iter().map(|z| format!("{:.6}", z.norm())).collect();
        s.push_str(&format!("  denominator root moduli: [{}]\n", moduli.join(", ")));
        s.push_str(&format!(
            "  positive: {}  coprime: {}  holomorphic outside disk: {}  => {}\n",
            self.passed,
            self.coprime,
            self.denominator_inside,
            if self.holds() { "PASS" } else { "FAIL" }
        ));
        s
    }
}

/// Exact quotient `p(y) / (1 - y)`, or `None` when `p(1) != 0`.
pub fn divide_by_one_minus_y(p: &[BigRational]) -> Option<Vec<BigRational>> {
    let at_one: BigRational = p.iter().sum();
    if !at_one.is_zero() || p.len() < 2 {
        return None;
    }
    // Synthetic division by (y - 1), then negate.
    let n = p.len() - 1;
    let mut quot = vec![BigRational::zero(); n];
    let mut carry = BigRational::zero();
    for i in (0..n).rev() {
        carry = &p[i + 1] + carry;
        quot[i] = -carry.clone();
    }
    Some(quot)
}

/// Minimum of a polynomial on `[-1, 1]` from endpoints and critical points.
pub fn minimize_on_unit_interval(poly: &[f64]) -> (f64, f64) {
    let deriv: Vec<f64> = poly.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect();
    let mut cands = vec![-1.0, 1.0];
    if !deriv.is_empty() {
        cands.extend(real_roots_in(&deriv, -1.0, 1.0));
    }
    cands
        .into_iter()
        .map(|y| (eval_real(poly, y), y))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("candidate set is never empty")
}

fn certify(
    kind: CertKind,
    spec: &SchemeSpec,
    canonical: bool,
    numer: &[BigRational],
    denom: &[BigRational],
) -> CertResult {
    let polynomial = unit_circle_real_part(numer, denom);
    let reduced = match kind {
        CertKind::AOverZC => divide_by_one_minus_y(&polynomial),
        CertKind::DOverC => None,
    };
    let target = reduced.as_ref().unwrap_or(&polynomial);
    let pf: Vec<f64> = target.iter().map(rational_to_f64).collect();
    let (min_value, argmin_y) = minimize_on_unit_interval(&pf);
    let coprime = !resultant(numer, denom).is_zero();
    let to_f = |v: &[BigRational]| v.iter().map(rational_to_f64).collect::<Vec<_>>();
    let numerator_roots = poly_roots_real(&to_f(numer)).roots;
    let denominator_roots = poly_roots_real(&to_f(denom)).roots;
    let denominator_inside = denominator_roots.iter().all(|z| z.norm() < 1.0);
    CertResult {
        kind,
        spec: spec.clone(),
        canonical,
        polynomial,
        reduced,
        min_value,
        argmin_y,
        passed: min_value > 0.0,
        coprime,
        numerator_roots,
        denominator_roots,
        denominator_inside,
    }
}

/// Checks `Re D(z)/C(z) > 0` outside the unit disk.
///
/// Non-canonical splits (no tabulated `F`) still get a certificate, flagged
/// as diagnostic through `canonical = false`.
pub fn certify_dc(split: &SplitSet) -> CertResult {
    certify(CertKind::DOverC, &split.spec, split.canonical, &split.d, &split.stencils.c)
}

/// Checks `Re A(z)/(z C(z)) > 0` outside the unit disk.
pub fn certify_ac(st: &StencilSet) -> CertResult {
    let mut zc = vec![BigRational::zero()];
    zc.extend(st.c.iter().cloned());
    certify(CertKind::AOverZC, &st.spec, st.spec.is_canonical(), &st.a, &zc)
}

/// One `coef * ||sum_j stencil[j] u_j||^2` term.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadTerm {
    pub coef: f64,
    pub stencil: Vec<f64>,
}

impl QuadTerm {
    fn new(coef: f64, stencil: &[f64]) -> Self {
        QuadTerm { coef, stencil: stencil.to_vec() }
    }

    fn eval(&self, levels: &[Vec<f64>]) -> f64 {
        debug_assert_eq!(levels.len(), self.stencil.len());
        let mut acc = vec![0.0; levels[0].len()];
        for (w, u) in self.stencil.iter().zip(levels) {
            for (a, x) in acc.iter_mut().zip(u) {
                *a += w * x;
            }
        }
        self.coef * norm_sq(&acc)
    }
}

/// The k = 4 constants of the telescoped `(F, C)` product, exact and rounded.
#[derive(Clone, Debug)]
pub struct TelescopeConstants {
    pub a: Radical,
    pub b: Radical,
    pub c: Radical,
    pub d: Radical,
    pub e: Radical,
    pub f: Radical,
}

impl TelescopeConstants {
    pub fn new() -> Self {
        let half = q(1, 2);
        // sqrt(37.5) = (5/2) sqrt6, sqrt(3375/2) = (15/2) sqrt30
        let s = Radical::sqrt6().scale(&q(5, 2));
        let r = Radical::sqrt30().scale(&q(15, 2));
        let e = -r.clone();
        let f = (r - s.clone()).scale(&half);
        let c = f.clone();
        let d = s + f.clone();
        let b = (Radical::int(660) + Radical::int(2) * e.clone() * f.clone()) / (Radical::int(2) * c.clone());
        let a = Radical::int(1050) - b.clone() * b.clone() - d.clone() * d.clone();
        TelescopeConstants { a, b, c, d, e, f }
    }

    /// The Gram-matrix identities that make the quadratic decomposition exact.
    ///
    /// Returns `(name, residual)` for each; all residuals are exactly zero.
    pub fn identity_residuals(&self) -> Vec<(&'static str, Radical)> {
        let TelescopeConstants { a, b, c, d, e, f } = self.clone();
        let two = Radical::int(2);
        vec![
            ("|u1|^2: a + b^2 + d^2 = 1050", a.clone() + b.clone() * b.clone() + d.clone() * d.clone() - Radical::int(1050)),
            ("|u0|^2: -a + c^2 - b^2 + e^2 = 1500", -a + c.clone() * c.clone() - b.clone() * b.clone() + e.clone() * e.clone() - Radical::int(1500)),
            ("|u-1|^2: f^2 - c^2 = 0", f.clone() * f.clone() - c.clone() * c.clone()),
            ("(u1,u0): 2bc + 2de = -2715", two.clone() * b.clone() * c.clone() + two.clone() * d.clone() * e.clone() + Radical::int(2715)),
            ("(u1,u-1): 2df = 825", two.clone() * d.clone() * f.clone() - Radical::int(825)),
            ("(u0,u-1): -2bc + 2ef = -660", -(two.clone() * b * c) + two * e * f + Radical::int(660)),
        ]
    }
}

impl Default for TelescopeConstants {
    fn default() -> Self {
        Self::new()
    }
}

/// `(F u, C u) = kappa |u_new|^2 + U(new window) - U(old window) + sum of squares`.
///
/// Histories hold `k` levels oldest first. `u_terms` act on `k-1`
/// consecutive levels and are evaluated on the newest and the oldest window;
/// `squares` act on all `k` levels.
#[derive(Clone, Debug)]
pub struct TelescopeForm {
    pub k: usize,
    pub kappa: f64,
    pub f: Vec<f64>,
    pub c: Vec<f64>,
    pub u_terms: Vec<QuadTerm>,
    pub squares: Vec<QuadTerm>,
    pub constants: Option<TelescopeConstants>,
}

/// Telescoped form of the canonical split of order `k` (2, 3 or 4).
pub fn telescope_form(k: usize) -> Result<TelescopeForm> {
    let spec = SchemeSpec::canonical(k)
        .ok_or_else(|| Error::Unsupported(format!("no telescoping form for k = {k}")))?;
    let split = make_split_default(&spec)?;
    let f = split.f_f64();
    let c = split.stencils.c_f64();
    let kappa = split.kappa_f64();
    let form = match k {
        2 => TelescopeForm {
            k,
            kappa,
            f,
            c,
            u_terms: vec![QuadTerm::new(3.0 / 200.0, &[1.0])],
            squares: vec![QuadTerm::new(3.0 / 200.0, &[-1.0, 1.0])],
            constants: None,
        },
        3 => TelescopeForm {
            k,
            kappa,
            f,
            c,
            u_terms: vec![
                QuadTerm::new(21.0 / 200.0, &[0.0, 1.0]),
                QuadTerm::new(1.0 / 200.0, &[-21.0, 27.0]),
            ],
            squares: vec![
                QuadTerm::new(21.0 / 200.0, &[0.0, -1.0, 1.0]),
                QuadTerm::new(1.0 / 200.0, &[21.0, -48.0, 27.0]),
            ],
            constants: None,
        },
        4 => {
            let cs = TelescopeConstants::new();
            let (a, b, cc, d, e, ff) =
                (cs.a.to_f64(), cs.b.to_f64(), cs.c.to_f64(), cs.d.to_f64(), cs.e.to_f64(), cs.f.to_f64());
            let w = 2e-5;
            TelescopeForm {
                k,
                kappa,
                f,
                c,
                u_terms: vec![
                    QuadTerm::new(w * a, &[0.0, 0.0, 1.0]),
                    QuadTerm::new(w, &[0.0, cc, b]),
                    QuadTerm::new(2e-4, &[0.0, 0.0, 1.0]),
                    QuadTerm::new(1e-5, &[165.0, -375.0, 215.0]),
                ],
                squares: vec![
                    QuadTerm::new(w, &[0.0, ff, e, d]),
                    QuadTerm::new(2e-4, &[0.0, 0.0, -1.0, 1.0]),
                    QuadTerm::new(1e-5, &[-165.0, 540.0, -590.0, 215.0]),
                ],
                constants: Some(cs),
            }
        }
        _ => unreachable!(),
    };
    Ok(form)
}

/// Result of evaluating both sides of the telescoped identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TelescopeEval {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / (1 + |lhs|)`.
    pub residual: f64,
    /// `(lhs - [kappa |u|^2 + U_new - U_old]) / (1 + |lhs|)`; the dropped
    /// squares make this nonnegative.
    pub inequality_margin: f64,
}

/// Evaluates `(F u, C u)` and its telescoped expansion on a history of `k`
/// vectors (oldest first).
pub fn telescope_eval(form: &TelescopeForm, history: &[Vec<f64>]) -> Result<TelescopeEval> {
    if history.len() != form.k {
        return Err(Error::LengthMismatch { what: "telescope history".into(), expected: form.k, got: history.len() });
    }
    let dim = history[0].len();
    if let Some(bad) = history.iter().find(|h| h.len() != dim) {
        return Err(Error::LengthMismatch { what: "telescope vector dimension".into(), expected: dim, got: bad.len() });
    }
    let mix = |w: &[f64]| {
        let mut out = vec![0.0; dim];
        for (c, u) in w.iter().zip(history) {
            for (o, x) in out.iter_mut().zip(u) {
                *o += c * x;
            }
        }
        out
    };
    let lhs = inner(&mix(&form.f), &mix(&form.c));
    let newest = &history[form.k - 1];
    let new_window = &history[1..];
    let old_window = &history[..form.k - 1];
    let u_new: f64 = form.u_terms.iter().map(|t| t.eval(new_window)).sum();
    let u_old: f64 = form.u_terms.iter().map(|t| t.eval(old_window)).sum();
    let squares: f64 = form.squares.iter().map(|t| t.eval(history)).sum();
    let core = form.kappa * norm_sq(newest) + u_new - u_old;
    let rhs = core + squares;
    let scale = 1.0 + lhs.abs();
    Ok(TelescopeEval { lhs, rhs, residual: (lhs - rhs).abs() / scale, inequality_margin: (lhs - core) / scale })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qs(v: &[(i64, i64)]) -> Vec<BigRational> {
        v.iter().map(|&(n, d)| q(n, d)).collect()
    }

    #[test]
    fn d_coefficients_k2() {
        let s = make_split_default(&SchemeSpec::int(2, 3)).unwrap();
        assert_eq!(s.d, qs(&[(13, 100), (3, 20)]));
        assert!(s.canonical);
    }

    #[test]
    fn eta_threshold() {
        assert!(make_split(&SchemeSpec::int(2, 3), &q(7, 10)).is_err());
        assert!(make_split(&SchemeSpec::int(2, 3), &q(-1, 1)).is_err());
        assert!(eta_above_threshold(&q(71, 100)));
        assert!(!eta_above_threshold(&q(7071, 10000)));
        assert!(eta_above_threshold(&q(7072, 10000)));
    }

    #[test]
    fn non_canonical_split_is_flagged() {
        let spec = SchemeSpec::new(2, "2.9".parse().unwrap()).unwrap();
        let s = make_split_default(&spec).unwrap();
        assert!(!s.canonical);
        assert!(s.kappa.is_zero());
        assert!(s.f.iter().all(Zero::is_zero));
        let cert = certify_dc(&s);
        assert!(!cert.canonical);
    }

    #[test]
    fn exact_division_by_one_minus_y() {
        // 3 - 2y - y^2 = (1 - y)(3 + y)
        let p = qs(&[(3, 1), (-2, 1), (-1, 1)]);
        assert_eq!(divide_by_one_minus_y(&p), Some(qs(&[(3, 1), (1, 1)])));
        assert_eq!(divide_by_one_minus_y(&qs(&[(1, 1), (1, 1)])), None);
    }

    #[test]
    fn chebyshev_polynomials() {
        assert_eq!(chebyshev_t(3), qs(&[(0, 1), (-3, 1), (0, 1), (4, 1)]));
        assert_eq!(chebyshev_t(2), qs(&[(-1, 1), (0, 1), (2, 1)]));
    }

    #[test]
    fn resultant_detects_common_root() {
        // (x-1)(x-2) and (x-1)(x+3)
        let p = qs(&[(2, 1), (-3, 1), (1, 1)]);
        let r = qs(&[(-3, 1), (2, 1), (1, 1)]);
        assert!(resultant(&p, &r).is_zero());
        let r2 = qs(&[(3, 1), (1, 1)]);
        // Res((x-1)(x-2), x+3) = (-3-1)(-3-2) = 20
        assert_eq!(resultant(&p, &r2), q(20, 1));
    }

    #[test]
    fn telescope_zero_and_unit_history() {
        let form = telescope_form(2).unwrap();
        let z = telescope_eval(&form, &[vec![0.0], vec![0.0]]).unwrap();
        assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
        let one = telescope_eval(&form, &[vec![1.0], vec![1.0]]).unwrap();
        assert!((one.lhs - 0.01).abs() < 1e-16);
        assert!((one.rhs - 0.01).abs() < 1e-16);
        assert!(telescope_eval(&form, &[vec![1.0]]).is_err());
        assert!(telescope_eval(&form, &[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(telescope_form(5).is_err());
    }

    #[test]
    fn radical_constants_satisfy_gram_identities() {
        let cs = TelescopeConstants::new();
        for (name, r) in cs.identity_residuals() {
            assert!(r.is_zero(), "{name}: {r}");
        }
        assert!((cs.a.to_f64() - 0.2188).abs() < 5e-5, "a = {}", cs.a.to_f64());
    }
}
