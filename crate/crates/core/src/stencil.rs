//! Exact generalized BDF stencils.
//!
//! For an order `k` and a shift `beta >= 1` the three stencils are derived
//! from Taylor expansion about `t^{n+beta}`:
//!
//! * `A` (k+1 weights): `sum_q a_q phi^{n+1-k+q} / dt ~ phi'(t^{n+beta})`
//! * `B` (k weights):   `sum_q b_q phi^{n+2-k+q}      ~ phi(t^{n+beta})`
//! * `C` (k weights):   `sum_q c_q phi^{n+1-k+q}      ~ phi(t^{n+beta})`
//!
//! All coefficient vectors are stored **oldest level first**: index `q = 0`
//! multiplies the oldest time level the stencil touches.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Combine;

/// Largest order accepted by [`make_stencils`].
pub const MAX_ORDER: usize = 6;

/// Exact rational shift `beta`.
///
/// Parses `"3"`, `"29/10"` and terminating decimals such as `"2.9"`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Beta(pub BigRational);

impl Beta {
    pub fn integer(v: i64) -> Self {
        Beta(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(Beta)
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Beta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Beta {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(Beta::integer(v)),
            // Floats go through their shortest decimal representation so that
            // `2.9` becomes exactly 29/10.
            Raw::Float(v) => format!("{v}").parse().map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Parses `P/Q`, an integer, or a terminating decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    // BigRational::to_f64 rounds correctly for the magnitudes used here.
    r.to_f64().unwrap_or(f64::NAN)
}

/// Order `k` and shift `beta` of one generalized BDF scheme.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub k: usize,
    pub beta: Beta,
}

impl SchemeSpec {
    pub fn new(k: usize, beta: Beta) -> Result<Self> {
        let spec = SchemeSpec { k, beta };
        spec.validate()?;
        Ok(spec)
    }

    /// Shorthand for integer shifts; panics on invalid input.
    pub fn int(k: usize, beta: i64) -> Self {
        Self::new(k, Beta::integer(beta)).expect("invalid scheme spec")
    }

    /// The shift that carries the stability proofs: 3, 6, 9 for k = 2, 3, 4.
    pub fn canonical_beta(k: usize) -> Option<i64> {
        match k {
            2 => Some(3),
            3 => Some(6),
            4 => Some(9),
            _ => None,
        }
    }

    pub fn canonical(k: usize) -> Option<Self> {
        Self::canonical_beta(k).map(|b| Self::int(k, b))
    }

    pub fn is_canonical(&self) -> bool {
        Self::canonical_beta(self.k)
            .is_some_and(|b| self.beta.0 == BigRational::from_integer(BigInt::from(b)))
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.k > MAX_ORDER {
            return Err(Error::InvalidSpec(format!(
                "order k = {} outside 1..={MAX_ORDER}",
                self.k
            )));
        }
        if self.beta.0 < BigRational::one() {
            return Err(Error::InvalidSpec(format!("shift beta = {} must be >= 1", self.beta)));
        }
        Ok(())
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={}, beta={}", self.k, self.beta)
    }
}

/// Exact coefficients of the `A`, `B` and `C` operators, oldest level first.
#[derive(Clone, Debug, PartialEq)]
pub struct StencilSet {
    pub spec: SchemeSpec,
    pub a: Vec<BigRational>,
    pub b: Vec<BigRational>,
    pub c: Vec<BigRational>,
}

impl StencilSet {
    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn a_f64(&self) -> Vec<f64> {
        self.a.iter().map(rational_to_f64).collect()
    }

    pub fn b_f64(&self) -> Vec<f64> {
        self.b.iter().map(rational_to_f64).collect()
    }

    pub fn c_f64(&self) -> Vec<f64> {
        self.c.iter().map(rational_to_f64).collect()
    }

    /// `sum_q a_q * history[q]`; `history` holds k+1 levels, newest last.
    pub fn apply_a<T: Combine>(&self, history: &[T]) -> Result<T> {
        combine(&self.a_f64(), history, "A")
    }

    /// `sum_q b_q * history[q]` over levels `n+2-k ..= n+1`.
    pub fn apply_b<T: Combine>(&self, history: &[T]) -> Result<T> {
        combine(&self.b_f64(), history, "B")
    }

    /// `sum_q c_q * history[q]` over levels `n+1-k ..= n`.
    pub fn apply_c<T: Combine>(&self, history: &[T]) -> Result<T> {
        combine(&self.c_f64(), history, "C")
    }
}

fn combine<T: Combine>(coeffs: &[f64], history: &[T], op: &str) -> Result<T> {
    if history.len() != coeffs.len() {
        return Err(Error::LengthMismatch {
            what: format!("{op} stencil history"),
            expected: coeffs.len(),
            got: history.len(),
        });
    }
    let mut out = history[0].zero_like();
    for (w, h) in coeffs.iter().zip(history) {
        out.axpy(*w, h);
    }
    Ok(out)
}

/// Builds the three stencils by solving the shifted Vandermonde systems exactly.
pub fn make_stencils(spec: &SchemeSpec) -> Result<StencilSet> {
    spec.validate()?;
    let k = spec.k;
    let beta = &spec.beta.0;
    let one = BigRational::one();
    let node = |off: i64| beta + BigRational::from_integer(BigInt::from(off));

    // A: nodes beta-1+j multiply a_{k-j}; moments give -delta_{m,1}.
    let nodes_a: Vec<_> = (0..=k as i64).map(|j| node(j - 1)).collect();
    let mut rhs_a = vec![BigRational::zero(); k + 1];
    rhs_a[1] = -one.clone();
    let mut a = solve_vandermonde(&nodes_a, &rhs_a)?;
    a.reverse();

    // B: nodes beta-1+j multiply b_{k-1-j}.
    let nodes_b: Vec<_> = (0..k as i64).map(|j| node(j - 1)).collect();
    let mut rhs_1 = vec![BigRational::zero(); k];
    rhs_1[0] = one;
    let mut b = solve_vandermonde(&nodes_b, &rhs_1)?;
    b.reverse();

    // C: nodes beta+j multiply c_{k-1-j}.
    let nodes_c: Vec<_> = (0..k as i64).map(node).collect();
    let mut c = solve_vandermonde(&nodes_c, &rhs_1)?;
    c.reverse();

    Ok(StencilSet { spec: spec.clone(), a, b, c })
}

/// Solves `sum_j nodes[j]^m x_j = rhs[m]`, `m = 0..n`, exactly.
///
/// Rows are scaled to integers and reduced with Bareiss fraction-free
/// elimination; only the final back substitution forms fractions.
pub fn solve_vandermonde(nodes: &[BigRational], rhs: &[BigRational]) -> Result<Vec<BigRational>> {
    let n = nodes.len();
    if rhs.len() != n {
        return Err(Error::LengthMismatch { what: "vandermonde rhs".into(), expected: n, got: rhs.len() });
    }
    let mut den = BigInt::one();
    for x in nodes.iter().chain(rhs) {
        den = den.lcm(x.denom());
    }
    // Row m scaled by den^m (node powers) and den^(m+1) (rhs denominators).
    let mut aug: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    let den_r = BigRational::from_integer(den.clone());
    for m in 0..n {
        let scale = num_traits::pow(den_r.clone(), m + 1);
        let mut row: Vec<BigInt> = nodes
            .iter()
            .map(|x| to_integer(&(num_traits::pow(x.clone(), m) * &scale)))
            .collect();
        row.push(to_integer(&(&rhs[m] * &scale)));
        aug.push(row);
    }

    let mut prev = BigInt::one();
    for p in 0..n {
        let piv = (p..n).find(|&r| !aug[r][p].is_zero()).ok_or(Error::Singular("vandermonde nodes not distinct".into()))?;
        aug.swap(p, piv);
        for r in p + 1..n {
            for c in p + 1..=n {
                let v = &aug[p][p] * &aug[r][c] - &aug[r][p] * &aug[p][c];
                aug[r][c] = v / &prev;
            }
            aug[r][p] = BigInt::zero();
        }
        prev = aug[p][p].clone();
    }

    let mut x = vec![BigRational::zero(); n];
    for r in (0..n).rev() {
        let mut acc = BigRational::from_integer(aug[r][n].clone());
        for c in r + 1..n {
            acc -= BigRational::from_integer(aug[r][c].clone()) * &x[c];
        }
        x[r] = acc / BigRational::from_integer(aug[r][r].clone());
    }
    Ok(x)
}

fn to_integer(r: &BigRational) -> BigInt {
    debug_assert!(r.is_integer());
    r.to_integer()
}

/// Residual of one moment condition; zero for every valid stencil set.
///
/// `op` is one of `'a'`, `'b'`, `'c'`; `m` ranges over `0..=k` for `a`
/// and `0..k` for `b` and `c`.
pub fn moment_residual(st: &StencilSet, op: char, m: usize) -> BigRational {
    let k = st.k() as i64;
    let beta = &st.spec.beta.0;
    let pow_at = |off: i64| num_traits::pow(beta + BigRational::from_integer(BigInt::from(off)), m);
    let kronecker = |i: usize| if m == i { BigRational::one() } else { BigRational::zero() };
    match op {
        'a' => {
            let s: BigRational = (0..=k).map(|j| &st.a[(k - j) as usize] * pow_at(j - 1)).sum();
            s + kronecker(1)
        }
        'b' => {
            let s: BigRational = (0..k).map(|j| &st.b[(k - 1 - j) as usize] * pow_at(j - 1)).sum();
            s - kronecker(0)
        }
        'c' => {
            let s: BigRational = (0..k).map(|j| &st.c[(k - 1 - j) as usize] * pow_at(j)).sum();
            s - kronecker(0)
        }
        _ => panic!("unknown stencil operator {op:?}"),
    }
}

/// Checks every moment condition exactly.
pub fn moments_hold(st: &StencilSet) -> bool {
    let k = st.k();
    (0..=k).all(|m| moment_residual(st, 'a', m).is_zero())
        && (0..k).all(|m| moment_residual(st, 'b', m).is_zero() && moment_residual(st, 'c', m).is_zero())
}

/// Formats a rational as `p/q` (or `p` for integers).
pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// CSV rows `operator,q,numerator,denominator` for the three stencils.
pub fn coeffs_csv(st: &StencilSet) -> String {
    let mut out = String::from("operator,q,numerator,denominator\n");
    for (name, v) in [("A", &st.a), ("B", &st.b), ("C", &st.c)] {
        for (q, r) in v.iter().enumerate() {
            out.push_str(&format!("{name},{q},{},{}\n", r.numer(), r.denom()));
        }
    }
    out
}

/// Human-readable coefficient table.
pub fn coeffs_pretty(st: &StencilSet) -> String {
    let mut out = format!("generalized BDF stencils ({}), oldest level first\n", st.spec);
    for (name, v) in [("A", &st.a), ("B", &st.b), ("C", &st.c)] {
        let body: Vec<_> = v.iter().map(fmt_rational).collect();
        out.push_str(&format!("  {name}: ({})\n", body.join(", ")));
    }
    out
}
