//! Polynomial roots: balanced companion matrix eigenvalues plus Newton polish,
//! and closed forms for the low degrees used by the certificates.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Coefficients smaller than this (relative to the largest) count as zero
/// when deciding the effective degree.
pub const DEGREE_DROP_TOL: f64 = 1e-14;

/// Roots of a polynomial with complex coefficients in ascending order.
#[derive(Clone, Debug)]
pub struct PolyRoots {
    pub roots: Vec<Complex64>,
    /// Nominal degree, `coeffs.len() - 1`.
    pub nominal_degree: usize,
    /// Degree after dropping vanishing leading coefficients.
    pub degree: usize,
}

impl PolyRoots {
    pub fn degree_dropped(&self) -> bool {
        self.degree < self.nominal_degree
    }
}

pub fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}

fn horner_with_derivative(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// All roots of `sum_i coeffs[i] x^i`.
///
/// Leading coefficients below [`DEGREE_DROP_TOL`] relative to the largest are
/// deflated away, so the returned root count is the effective degree.
pub fn poly_roots(coeffs: &[Complex64]) -> PolyRoots {
    let nominal_degree = coeffs.len().saturating_sub(1);
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut n = nominal_degree;
    while n > 0 && coeffs[n].norm() <= DEGREE_DROP_TOL * scale {
        n -= 1;
    }
    let active = &coeffs[..=n];
    let mut roots = match n {
        0 => Vec::new(),
        1 => vec![-active[0] / active[1]],
        _ => companion_eigenvalues(active),
    };
    for r in &mut roots {
        polish(active, r);
    }
    PolyRoots { roots, nominal_degree, degree: n }
}

/// Real-coefficient convenience wrapper.
pub fn poly_roots_real(coeffs: &[f64]) -> PolyRoots {
    let c: Vec<Complex64> = coeffs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    poly_roots(&c)
}

fn polish(coeffs: &[Complex64], root: &mut Complex64) {
    let (p, dp) = horner_with_derivative(coeffs, *root);
    if dp.norm() == 0.0 || !p.is_finite() {
        return;
    }
    let cand = *root - p / dp;
    if cand.is_finite() && horner(coeffs, cand).norm() <= p.norm() {
        *root = cand;
    }
}

fn companion_eigenvalues(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[i] / lead;
    }
    balance(&mut m);
    match m.clone().try_schur(f64::EPSILON, 10_000) {
        Some(schur) => {
            let (_, t) = schur.unpack();
            (0..n).map(|i| t[(i, i)]).collect()
        }
        None => Vec::new(),
    }
}

/// Parlett-Reinsch balancing with power-of-two scalings.
fn balance(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    let radix = 2.0_f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].norm();
                    r += m[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut c2 = c;
            let g = r / radix;
            while c2 < g {
                f *= radix;
                c2 *= radix * radix;
            }
            let g = r * radix;
            while c2 > g {
                f /= radix;
                c2 /= radix * radix;
            }
            if (c * f + r / f) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Real roots in `[lo, hi]` of a real polynomial (ascending coefficients).
///
/// Degrees up to two use closed forms; higher degrees go through
/// [`poly_roots`]. Every root is refined by a few Newton steps.
pub fn real_roots_in(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut n = coeffs.len().saturating_sub(1);
    while n > 0 && coeffs[n] == 0.0 {
        n -= 1;
    }
    let c = &coeffs[..=n];
    let raw: Vec<f64> = match n {
        0 => Vec::new(),
        1 => vec![-c[0] / c[1]],
        2 => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = b * b - 4.0 * a * cc;
            if disc < 0.0 {
                Vec::new()
            } else {
                // Numerically stable pairing.
                let q = -0.5 * (b + b.signum() * disc.sqrt());
                let mut v = Vec::new();
                if q != 0.0 {
                    v.push(cc / q);
                    v.push(q / a);
                } else {
                    v.push(0.0);
                }
                v
            }
        }
        _ => {
            poly_roots_real(c)
                .roots
                .into_iter()
                .filter(|r| r.im.abs() <= 1e-8 * (1.0 + r.re.abs()))
                .map(|r| r.re)
                .collect()
        }
    };
    let slack = 1e-12 * (hi - lo);
    raw.into_iter()
        .map(|x| newton_real(c, x))
        .filter(|x| x.is_finite() && *x >= lo - slack && *x <= hi + slack)
        .map(|x| x.clamp(lo, hi))
        .collect()
}

fn newton_real(c: &[f64], mut x: f64) -> f64 {
    for _ in 0..4 {
        let mut p = 0.0;
        let mut dp = 0.0;
        for a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        if dp == 0.0 {
            break;
        }
        let next = x - p / dp;
        if !next.is_finite() || (next - x).abs() <= f64::EPSILON * x.abs() {
            break;
        }
        x = next;
    }
    x
}

pub fn eval_real(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots() {
        // 7 mu^2 - 12 mu + 5 = 0 -> {1, 5/7}
        let r = poly_roots_real(&[5.0, -12.0, 7.0]);
        let mut re: Vec<f64> = r.roots.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] - 5.0 / 7.0).abs() < 1e-14);
        assert!((re[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degree_drop_is_reported() {
        let r = poly_roots_real(&[1.0, 2.0, 0.0]);
        assert!(r.degree_dropped());
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0].re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn companion_matches_known_roots() {
        // (x-1)(x-2)(x-3)(x+0.5)
        let c = [-3.0, -0.5, 8.0, -5.5, 1.0];
        let r = poly_roots_real(&c);
        let mut re: Vec<f64> = r.roots.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        for (got, want) in re.iter().zip([-0.5, 1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn real_roots_window() {
        let r = real_roots_in(&[-0.25, 0.0, 1.0], -1.0, 1.0);
        assert_eq!(r.len(), 2);
        let r = real_roots_in(&[-4.0, 0.0, 1.0], -1.0, 1.0);
        assert!(r.is_empty());
    }
}
