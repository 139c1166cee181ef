//! Exact polynomial identities for hyperelliptic families `y² = f(x; t)` and
//! maps `(x, y) ↦ (P(x), y·R(x))` between them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::Error;

pub type Rational = BigRational;

fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Univariate polynomial over Q, coefficients in ascending degree.
#[derive(Clone, PartialEq, Eq, Debug, Default, Hash)]
pub struct UPoly(Vec<Rational>);

impl UPoly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        UPoly::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        UPoly::new(vec![c])
    }

    pub fn one() -> Self {
        UPoly::constant(Rational::one())
    }

    /// The variable itself.
    pub fn var() -> Self {
        UPoly::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.0.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lc(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Rational) -> UPoly {
        UPoly::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly::new(c)
    }

    pub fn pow(&self, e: usize) -> UPoly {
        let mut r = UPoly::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(self.0.iter().enumerate().skip(1).map(|(k, c)| c * q(k as i64)).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// `self(inner)`.
    pub fn compose(&self, inner: &UPoly) -> UPoly {
        self.0.iter().rev().fold(UPoly::zero(), |acc, c| acc.mul(inner).add(&UPoly::constant(c.clone())))
    }

    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.degree().unwrap();
        let mut r = self.0.clone();
        let lc = d.lc();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quo = vec![Rational::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = &r[k] / &lc;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.0.iter().enumerate() {
                r[k - dd + j] -= &c * dc;
            }
            quo[k - dd] = c;
        }
        r.truncate(dd);
        (UPoly::new(quo), UPoly::new(r))
    }

    /// Quotient when the division is exact.
    pub fn exact_div(&self, d: &UPoly) -> Option<UPoly> {
        let (qq, r) = self.div_rem(d);
        r.is_zero().then_some(qq)
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        self.scale(&(Rational::one() / self.lc()))
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's algorithm: monic `a_i` with `self = lc·Π a_iⁱ`, indexed from 1.
    pub fn squarefree_decomposition(&self) -> Vec<(UPoly, usize)> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let f = self.monic();
        let fp = f.derivative();
        let mut a = f.gcd(&fp);
        let mut b = f.exact_div(&a).unwrap();
        let mut c = fp.exact_div(&a).unwrap();
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        let mut i = 1;
        loop {
            a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.exact_div(&a).unwrap();
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.exact_div(&a).unwrap();
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Product of the distinct irreducible factors.
    pub fn squarefree_part(&self) -> UPoly {
        self.squarefree_decomposition().iter().fold(UPoly::one(), |acc, (a, _)| acc.mul(a))
    }

    /// Scales to a primitive integer polynomial with positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let den = self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if self.lc().is_negative() { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    pub fn render(&self, var: &str) -> String {
        render_terms(self.0.iter().enumerate().map(|(k, c)| (c.clone(), vec![(var, k)])).collect())
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("x"))
    }
}

fn render_terms(terms: Vec<(Rational, Vec<(&str, usize)>)>) -> String {
    let mut s = String::new();
    for (c, vars) in terms.into_iter().rev() {
        if c.is_zero() {
            continue;
        }
        let mono: Vec<String> = vars
            .iter()
            .filter(|(_, k)| *k > 0)
            .map(|(v, k)| if *k == 1 { v.to_string() } else { format!("{}^{}", v, k) })
            .collect();
        let neg = c.is_negative();
        let a = c.abs();
        let body = if mono.is_empty() {
            a.to_string()
        } else if a.is_one() {
            mono.join("*")
        } else {
            format!("{}*{}", a, mono.join("*"))
        };
        if s.is_empty() {
            s = if neg { format!("-{}", body) } else { body };
        } else {
            s.push_str(if neg { " - " } else { " + " });
            s.push_str(&body);
        }
    }
    if s.is_empty() { "0".into() } else { s }
}

/// Polynomial in `x` with coefficients in `Q[t]`; entry `k` is the coefficient of `xᵏ`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BPoly(Vec<UPoly>);

impl BPoly {
    pub fn new(mut c: Vec<UPoly>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        BPoly(c)
    }

    /// Constant in `t`.
    pub fn from_x(p: &UPoly) -> Self {
        BPoly::new(p.coeffs().iter().map(|c| UPoly::constant(c.clone())).collect())
    }

    pub fn coeffs(&self) -> &[UPoly] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> UPoly {
        self.0.get(k).cloned().unwrap_or_default()
    }

    pub fn degree_x(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn degree_t(&self) -> usize {
        self.0.iter().filter_map(|c| c.degree()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &BPoly) -> BPoly {
        let n = self.0.len().max(o.0.len());
        BPoly::new((0..n).map(|k| self.coeff(k).add(&o.coeff(k))).collect())
    }

    pub fn sub(&self, o: &BPoly) -> BPoly {
        self.add(&BPoly(o.0.iter().map(|c| c.neg()).collect()))
    }

    pub fn mul(&self, o: &BPoly) -> BPoly {
        if self.is_zero() || o.is_zero() {
            return BPoly::default();
        }
        let mut c = vec![UPoly::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        BPoly::new(c)
    }

    pub fn derivative_x(&self) -> BPoly {
        BPoly::new(self.0.iter().enumerate().skip(1).map(|(k, c)| c.scale(&q(k as i64))).collect())
    }

    /// `self(P(x); t)`.
    pub fn compose_x(&self, p: &UPoly) -> BPoly {
        let bp = BPoly::from_x(p);
        self.0.iter().rev().fold(BPoly::default(), |acc, c| acc.mul(&bp).add(&BPoly::new(vec![c.clone()])))
    }

    /// Specializes `t`.
    pub fn at_t(&self, t: &Rational) -> UPoly {
        UPoly::new(self.0.iter().map(|c| c.eval(t)).collect())
    }

    pub fn eval(&self, x: &Rational, t: &Rational) -> Rational {
        self.at_t(t).eval(x)
    }

    pub fn render(&self) -> String {
        let mut terms = Vec::new();
        for (k, c) in self.0.iter().enumerate() {
            for (j, a) in c.coeffs().iter().enumerate() {
                terms.push((a.clone(), vec![("x", k), ("t", j)]));
            }
        }
        // ascending order in (x, t) so that rendering puts the top term first
        render_terms(terms)
    }
}

impl fmt::Display for BPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

fn parse_rational(s: &str, whole: &str) -> Result<Rational, Error> {
    let err = |m: &str| Error::Parse(format!("polynomial {:?}: {} in coefficient {:?}", whole, m, s));
    match s.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.parse().map_err(|_| err("bad numerator"))?;
            let d: BigInt = b.parse().map_err(|_| err("bad denominator"))?;
            if d.is_zero() {
                return Err(err("zero denominator"));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| err("bad integer"))?)),
    }
}

/// Parses terms `c*x^k*t^j` joined by `+` and `-`; the coefficient and either
/// variable may be omitted.
pub fn parse_bpoly(s: &str) -> Result<BPoly, Error> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let mut start = 0;
    let mut neg = false;
    let bytes = compact.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if (b == b'+' || b == b'-') && i > 0 {
            terms.push((neg, &compact[start..i]));
            neg = b == b'-';
            start = i + 1;
        } else if (b == b'+' || b == b'-') && i == 0 {
            neg = b == b'-';
            start = 1;
        }
    }
    terms.push((neg, &compact[start..]));
    let mut out = BPoly::default();
    for (neg, t) in terms {
        if t.is_empty() {
            return Err(Error::Parse(format!("polynomial {:?}: empty term", s)));
        }
        let mut c = Rational::one();
        let (mut kx, mut kt) = (0usize, 0usize);
        let mut seen_coef = false;
        for (idx, f) in t.split('*').enumerate() {
            let (base, exp) = match f.split_once('^') {
                Some((b, e)) => (b, Some(e.parse::<usize>().map_err(|_| Error::Parse(format!("polynomial {:?}: bad exponent in {:?}", s, f)))?)),
                None => (f, None),
            };
            match base {
                "x" => kx += exp.unwrap_or(1),
                "t" => kt += exp.unwrap_or(1),
                _ if idx == 0 && exp.is_none() && !seen_coef => {
                    c = parse_rational(base, s)?;
                    seen_coef = true;
                }
                _ => return Err(Error::Parse(format!("polynomial {:?}: unexpected factor {:?}", s, f))),
            }
        }
        if neg {
            c = -c;
        }
        let mut tc = vec![Rational::zero(); kt + 1];
        tc[kt] = c;
        let mut xc = vec![UPoly::zero(); kx + 1];
        xc[kx] = UPoly::new(tc);
        out = out.add(&BPoly::new(xc));
    }
    Ok(out)
}

/// Parses a polynomial that must not involve `t`.
pub fn parse_upoly(s: &str) -> Result<UPoly, Error> {
    let b = parse_bpoly(s)?;
    if b.degree_t() > 0 {
        return Err(Error::Parse(format!("polynomial {:?} must not involve t", s)));
    }
    Ok(b.at_t(&Rational::zero()))
}

/// The curve family `y² = f(x; t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticFamily {
    pub f: BPoly,
}

/// `(x, y) ↦ (P(x), y·R(x))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringMapData {
    pub p: UPoly,
    pub r: UPoly,
}

impl CoveringMapData {
    pub fn identity() -> Self {
        CoveringMapData { p: UPoly::var(), r: UPoly::one() }
    }
}

/// `f_src·R² = f_dst(P)` in `Q[t][x]`.
pub fn verify_covering_identity(src: &HyperellipticFamily, map: &CoveringMapData, dst: &HyperellipticFamily) -> bool {
    let lhs = src.f.mul(&BPoly::from_x(&map.r.mul(&map.r)));
    lhs == dst.f.compose_x(&map.p)
}

/// `m2 ∘ m1`: `(P₂∘P₁, (R₂∘P₁)·R₁)`.
pub fn compose_maps(m1: &CoveringMapData, m2: &CoveringMapData) -> CoveringMapData {
    CoveringMapData { p: m2.p.compose(&m1.p), r: m2.r.compose(&m1.p).mul(&m1.r) }
}

/// Solves `gauss` on a dense rational system; returns the unique solution, or
/// `None` if the system is inconsistent or underdetermined.
fn solve_linear(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>, n: usize) -> Result<Vec<Rational>, String> {
    let m = a.len();
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        let Some(pr) = (row..m).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, pr);
        b.swap(row, pr);
        let inv = Rational::one() / &a[row][col];
        for j in 0..n {
            a[row][j] = &a[row][j] * &inv;
        }
        b[row] = &b[row] * &inv;
        for r in 0..m {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let v = &f * &a[row][j];
                    a[r][j] -= v;
                }
                let v = &f * &b[row];
                b[r] -= v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    if b[row..].iter().any(|x| !x.is_zero()) {
        return Err("the coefficient system has no solution".into());
    }
    if pivots.len() < n {
        return Err("the coefficient system has more than one solution".into());
    }
    let mut x = vec![Rational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = b[r].clone();
    }
    Ok(x)
}

/// The polynomial `g(X; t)` with `f_src·R² = g(P)`, of degree `⌊deg(f·R²)/deg P⌋`.
pub fn derive_target_cubic(src: &HyperellipticFamily, map: &CoveringMapData) -> Result<HyperellipticFamily, Error> {
    let dp = map.p.degree().filter(|&d| d > 0).ok_or_else(|| Error::Invalid("P must be nonconstant".into()))?;
    let lhs = src.f.mul(&BPoly::from_x(&map.r.mul(&map.r)));
    let dl = lhs.degree_x().unwrap_or(0);
    let k = dl / dp;
    let powers: Vec<UPoly> = (0..=k).map(|i| map.p.pow(i)).collect();
    let rows = dl.max(k * dp) + 1;
    let a: Vec<Vec<Rational>> = (0..rows).map(|m| powers.iter().map(|pk| pk.coeff(m)).collect()).collect();
    let mut g = vec![vec![Rational::zero(); lhs.degree_t() + 1]; k + 1];
    for j in 0..=lhs.degree_t() {
        let b: Vec<Rational> = (0..rows).map(|m| lhs.coeff(m).coeff(j)).collect();
        let x = solve_linear(a.clone(), b, k + 1).map_err(|e| Error::Verification(format!("no target polynomial in X = P(x): {}", e)))?;
        for (i, v) in x.into_iter().enumerate() {
            g[i][j] = v;
        }
    }
    let f = BPoly::new(g.into_iter().map(UPoly::new).collect());
    Ok(HyperellipticFamily { f })
}

/// Multiplicities of the roots of `P − c`, decreasing.
pub fn fiber_profile(p: &UPoly, c: &Rational) -> Result<Vec<usize>, Error> {
    if p.degree().unwrap_or(0) == 0 {
        return Err(Error::Invalid("P must be nonconstant".into()));
    }
    let shifted = p.sub(&UPoly::constant(c.clone()));
    let mut out: Vec<usize> = Vec::new();
    for (a, i) in shifted.squarefree_decomposition() {
        out.extend(std::iter::repeat_n(i, a.degree().unwrap()));
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    Ok(out)
}

/// Determinant over `Q[t]` by fraction-free elimination.
fn bareiss_det(mut m: Vec<Vec<UPoly>>) -> UPoly {
    let n = m.len();
    let mut sign = false;
    let mut prev = UPoly::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return UPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = UPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign { d.neg() } else { d }
}

/// Resultant in `x` of two polynomials over `Q[t]`, as the Sylvester determinant.
pub fn resultant_x(f: &BPoly, g: &BPoly) -> UPoly {
    let (Some(m), Some(n)) = (f.degree_x(), g.degree_x()) else { return UPoly::zero() };
    if m + n == 0 {
        return UPoly::one();
    }
    let size = m + n;
    let mut s = vec![vec![UPoly::zero(); size]; size];
    for r in 0..n {
        for k in 0..=m {
            s[r][r + k] = f.coeff(m - k);
        }
    }
    for r in 0..m {
        for k in 0..=n {
            s[n + r][r + k] = g.coeff(n - k);
        }
    }
    bareiss_det(s)
}

/// `(−1)^{n(n−1)/2} Res(f, f′) / lc(f)`.
pub fn discriminant_x(f: &BPoly) -> UPoly {
    let n = f.degree_x().unwrap_or(0);
    let r = resultant_x(f, &f.derivative_x());
    let lc = f.coeff(n);
    let d = r.exact_div(&lc).expect("leading coefficient divides the resultant");
    if (n * (n.saturating_sub(1)) / 2) % 2 == 1 { d.neg() } else { d }
}

/// Rational roots of a nonzero polynomial, increasing.
pub fn rational_roots(p: &UPoly) -> Result<Vec<Rational>, Error> {
    let sf = p.squarefree_part();
    if sf.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let mut ints = sf.primitive_integer();
    let mut roots = Vec::new();
    if ints[0].is_zero() {
        roots.push(Rational::zero());
        ints.remove(0);
    }
    let lead = ints.last().unwrap().clone();
    let tail = ints[0].clone();
    let ps = divisors(&tail)?;
    let qs = divisors(&lead)?;
    let poly = UPoly::new(ints.iter().map(|c| Rational::from_integer(c.clone())).collect());
    let mut cand: Vec<Rational> = Vec::new();
    for pp in &ps {
        for qq in &qs {
            for s in [1, -1] {
                cand.push(Rational::new(pp * BigInt::from(s), qq.clone()));
            }
        }
    }
    cand.sort();
    cand.dedup();
    for c in cand {
        if poly.eval(&c).is_zero() {
            roots.push(c);
        }
    }
    roots.sort();
    Ok(roots)
}

fn is_probable_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if *n < two {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let bp = BigInt::from(p);
        if *n == bp {
            return true;
        }
        if (n % &bp).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut s = 0;
    while (&d % &two).is_zero() {
        d /= &two;
        s += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Positive divisors by trial division; a leftover cofactor must pass a primality test.
fn divisors(n: &BigInt) -> Result<Vec<BigInt>, Error> {
    let mut m = n.abs();
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(100_000);
    while p <= limit && &p * &p <= m {
        let mut e = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e > 0 {
            primes.push((p.clone(), e));
        }
        p += 1;
    }
    if m > BigInt::one() {
        if &limit * &limit < m && !is_probable_prime(&m) {
            return Err(Error::Verification(format!("cannot factor {} to enumerate rational roots", n)));
        }
        primes.push((m, 1));
    }
    let mut out = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::new();
        for d in &out {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Factor {
    /// Monic factor, rendered in `t`.
    pub factor: String,
    pub multiplicity: usize,
    /// Linear factors, and factors of degree 2 or 3 without rational roots.
    pub certified_irreducible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularReport {
    pub discriminant: String,
    pub leading_constant: String,
    pub factors: Vec<Factor>,
    pub rational_roots: Vec<String>,
    #[serde(skip)]
    pub discriminant_poly: UPoly,
    #[serde(skip)]
    pub roots: Vec<Rational>,
}

/// Zero set of the discriminant in `t`, by squarefree decomposition and rational roots.
pub fn singular_parameters(fam: &HyperellipticFamily) -> Result<SingularReport, Error> {
    let disc = discriminant_x(&fam.f);
    if disc.is_zero() {
        return Err(Error::Invalid("f is not squarefree in x for generic t".into()));
    }
    let mut factors = Vec::new();
    let mut roots = Vec::new();
    for (a, mult) in disc.squarefree_decomposition() {
        let mut rest = a.clone();
        for r in rational_roots(&a)? {
            let lin = UPoly::new(vec![-r.clone(), Rational::one()]);
            rest = rest.exact_div(&lin).unwrap();
            factors.push(Factor { factor: lin.render("t"), multiplicity: mult, certified_irreducible: true });
            roots.push(r);
        }
        if let Some(d) = rest.degree().filter(|&d| d > 0) {
            factors.push(Factor { factor: rest.render("t"), multiplicity: mult, certified_irreducible: d <= 3 });
        }
    }
    roots.sort();
    Ok(SingularReport {
        discriminant: disc.render("t"),
        leading_constant: disc.lc().to_string(),
        factors,
        rational_roots: roots.iter().map(|r| r.to_string()).collect(),
        discriminant_poly: disc,
        roots,
    })
}

/// Families and maps shipped with the crate.
pub fn builtin_family(name: &str) -> Option<HyperellipticFamily> {
    let m = builtin_manifest();
    m.families.get(name).map(|s| HyperellipticFamily { f: parse_bpoly(s).expect("built-in family parses") })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub p: String,
    pub r: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitySpec {
    pub src: String,
    pub map: String,
    pub dst: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubicSpec {
    pub src: String,
    pub map: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub p: String,
    pub c: String,
    pub expected: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularSpec {
    pub family: String,
    pub expected_rational_roots: Vec<String>,
}

/// A batch of checks over named families and maps; maps listed in `compose`
/// as `[first, second, name]` are composed before the identities run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub families: BTreeMap<String, String>,
    pub maps: BTreeMap<String, MapSpec>,
    #[serde(default)]
    pub compose: Vec<[String; 3]>,
    #[serde(default)]
    pub identities: Vec<IdentitySpec>,
    #[serde(default)]
    pub cubics: Vec<CubicSpec>,
    #[serde(default)]
    pub profiles: Vec<ProfileSpec>,
    #[serde(default)]
    pub singular: Vec<SingularSpec>,
}

pub fn builtin_manifest() -> Manifest {
    serde_json::from_str(include_str!("../data/families.json")).expect("built-in manifest parses")
}

impl Manifest {
    pub fn from_json(s: &str) -> Result<Manifest, Error> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("manifest, line {} column {}: {}", e.line(), e.column(), e)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Runs every check in the manifest.
pub fn run_manifest(m: &Manifest) -> Result<Vec<CheckOutcome>, Error> {
    let mut fams = BTreeMap::new();
    for (k, v) in &m.families {
        fams.insert(k.clone(), HyperellipticFamily { f: parse_bpoly(v)? });
    }
    let mut maps = BTreeMap::new();
    for (k, v) in &m.maps {
        maps.insert(k.clone(), CoveringMapData { p: parse_upoly(&v.p)?, r: parse_upoly(&v.r)? });
    }
    let lookup_map = |maps: &BTreeMap<String, CoveringMapData>, k: &str| {
        maps.get(k).cloned().ok_or_else(|| Error::Invalid(format!("unknown map {:?}", k)))
    };
    for [a, b, name] in &m.compose {
        let c = compose_maps(&lookup_map(&maps, a)?, &lookup_map(&maps, b)?);
        maps.insert(name.clone(), c);
    }
    let fam = |k: &str| fams.get(k).cloned().ok_or_else(|| Error::Invalid(format!("unknown family {:?}", k)));
    let mut out = Vec::new();
    for c in &m.identities {
        let ok = verify_covering_identity(&fam(&c.src)?, &lookup_map(&maps, &c.map)?, &fam(&c.dst)?);
        out.push(CheckOutcome {
            name: format!("identity {} --{}--> {}", c.src, c.map, c.dst),
            passed: ok,
            detail: if ok { "f_src·R² = f_dst(P)".into() } else { "f_src·R² ≠ f_dst(P)".into() },
        });
    }
    for c in &m.cubics {
        let r = derive_target_cubic(&fam(&c.src)?, &lookup_map(&maps, &c.map)?);
        out.push(match r {
            Ok(g) => CheckOutcome { name: format!("target of {} under {}", c.src, c.map), passed: true, detail: g.f.render() },
            Err(e) => CheckOutcome { name: format!("target of {} under {}", c.src, c.map), passed: false, detail: e.to_string() },
        });
    }
    for c in &m.profiles {
        let p = parse_upoly(&c.p)?;
        let val = parse_rational(&c.c, &c.c)?;
        let prof = fiber_profile(&p, &val)?;
        out.push(CheckOutcome {
            name: format!("fiber of {} over {}", c.p, c.c),
            passed: prof == c.expected,
            detail: format!("{:?}", prof),
        });
    }
    for c in &m.singular {
        let rep = singular_parameters(&fam(&c.family)?)?;
        let mut exp: Vec<Rational> = c.expected_rational_roots.iter().map(|s| parse_rational(s, s)).collect::<Result<_, _>>()?;
        exp.sort();
        out.push(CheckOutcome {
            name: format!("singular parameters of {}", c.family),
            passed: rep.roots == exp,
            detail: format!("discriminant {}; rational roots {:?}", rep.discriminant, rep.rational_roots),
        });
    }
    Ok(out)
}

/// Small integer value of a rational, for tests and reports.
pub fn as_i64(r: &Rational) -> Option<i64> {
    if r.is_integer() { r.to_integer().to_i64() } else { None }
}
