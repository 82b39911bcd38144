//! Sparse multivariate polynomials over the rationals in `h_1..h_ℓ`.
//!
//! The variable `h_i` is the coordinate `λ ↦ λ(h_i)` on `𝔥*`, so a weight
//! `λ = Σ λ(h_i) ϖ_i` has coordinates `(λ(h_1), …, λ(h_ℓ))`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, parse_rational, rat, Rational};
use crate::rootsys::{CartanDatum, WeylElement};
use crate::upoly::UPoly;

/// Largest supported number of variables (rank of E8).
pub const MAX_VARS: usize = 8;

/// Exponent vector. Ordered by total degree, then lexicographically with
/// `h_1 > h_2 > …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: [u16; MAX_VARS],
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(i: usize) -> Self {
        let mut m = Monomial::default();
        m.exps[i] = 1;
        m
    }

    pub fn from_exps(exps: &[u16]) -> Self {
        let mut m = Monomial::default();
        m.exps[..exps.len()].copy_from_slice(exps);
        m
    }

    pub fn exps(&self) -> &[u16; MAX_VARS] {
        &self.exps
    }

    pub fn get(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for (a, b) in m.exps.iter_mut().zip(other.exps.iter()) {
            *a += b;
        }
        m
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn div_into(&self, other: &Monomial) -> Monomial {
        let mut m = *other;
        for (a, b) in m.exps.iter_mut().zip(self.exps.iter()) {
            *a -= b;
        }
        m
    }

    /// All monomials of total degree `d` in `n` variables, in increasing order.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<Monomial> {
        fn rec(n: usize, i: usize, left: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
            if i + 1 == n {
                cur.exps[i] = left as u16;
                out.push(*cur);
                cur.exps[i] = 0;
                return;
            }
            for e in (0..=left).rev() {
                cur.exps[i] = e as u16;
                rec(n, i + 1, left - e, cur, out);
            }
            cur.exps[i] = 0;
        }
        let mut out = Vec::new();
        if n == 0 {
            if d == 0 {
                out.push(Monomial::one());
            }
            return out;
        }
        rec(n, 0, d, &mut Monomial::default(), &mut out);
        out.sort();
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Number of monomials of degree `d` in `n` variables.
pub fn monomial_count(n: usize, d: u32) -> usize {
    binomial(d as u64 + n as u64 - 1, n as u64 - 1) as usize
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `C(e, t) · s^t` for `t = 0..=e`.
fn shifted_binomial_row(e: u16, s: i64) -> Vec<BigInt> {
    let sb = BigInt::from(s);
    let mut power = BigInt::one();
    binomial_row(e)
        .into_iter()
        .map(|b| {
            let v = b * &power;
            power *= &sb;
            v
        })
        .collect()
}

fn binomial_row(e: u16) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 1..=u64::from(e) {
        let prev = row[k as usize - 1].clone();
        row.push(prev * (u64::from(e) - k + 1) / k);
    }
    row
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, Monomial::one(), c)
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// The variable `h_{i+1}` (0-based index `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, Monomial::var(i), Rational::one())
    }

    /// `constant + Σ coeffs[i] h_i`.
    pub fn linear(coeffs: &[i64], constant: i64) -> Self {
        let n = coeffs.len();
        let mut p = Self::constant(n, rat(constant));
        for (i, &c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(i), rat(c));
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one())
    }

    /// Total degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Homogeneous components indexed by degree, up to the total degree.
    pub fn homogeneous_parts(&self) -> Vec<Poly> {
        let Some(top) = self.degree() else {
            return Vec::new();
        };
        let mut parts = vec![Poly::zero(self.nvars); top as usize + 1];
        for (m, c) in &self.terms {
            parts[m.degree() as usize].terms.insert(*m, c.clone());
        }
        parts
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.mul(mono), x * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Scales to coprime integer coefficients with a positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = self.terms.values().fold(BigInt::zero(), |acc, c| {
            acc.gcd(&(c.numer() * (&den / c.denom())))
        });
        let mut factor = Rational::new(den, num);
        if self.leading_term().expect("non-zero").1.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// Plain partial derivative `∂/∂h_i`.
    pub fn partial(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.get(i);
            if e > 0 {
                let mut dm = *m;
                dm.exps[i] -= 1;
                out.terms.insert(dm, c * rat(i64::from(e)));
            }
        }
        out
    }

    /// Exact division by the variable `h_i`; `None` if some term lacks it.
    pub fn div_var(&self, i: usize) -> Option<Poly> {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.get(i) == 0 {
                return None;
            }
            let mut dm = *m;
            dm.exps[i] -= 1;
            out.terms.insert(dm, c.clone());
        }
        Some(out)
    }

    /// Exact division by an arbitrary non-zero polynomial; `None` if it does
    /// not divide.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading_term().expect("division by the zero polynomial");
        let (lm, lc) = (*lm, lc.clone());
        let mut rem = self.clone();
        let mut quo = Poly::zero(self.nvars);
        while let Some((m, c)) = rem.leading_term() {
            if !lm.divides(m) {
                return None;
            }
            let qm = lm.div_into(m);
            let qc = c / &lc;
            rem -= &d.mul_monomial(&qm, &qc);
            quo.terms.insert(qm, qc);
        }
        Some(quo)
    }

    /// Substitutes `h_k ↦ h_k + shifts[k] h_i` for `k ≠ i` and `h_i ↦ sign·h_i`,
    /// the shape of every simple reflection.
    fn shear(&self, i: usize, shifts: &[i64], sign: i64) -> Poly {
        let (den, terms) = self.integral_terms();
        let movers: Vec<usize> = (0..self.nvars)
            .filter(|&k| k != i && shifts[k] != 0)
            .collect();
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(terms.len() * 4);
        for (m, c) in terms {
            let base = if sign < 0 && m.get(i) % 2 == 1 { -c } else { c };
            // expand Π_k (h_k + shifts[k] h_i)^{e_k}
            let mut partial: Vec<(Monomial, BigInt)> = vec![(m, base)];
            for &k in &movers {
                let e = m.get(k);
                if e == 0 {
                    continue;
                }
                let row = shifted_binomial_row(e, shifts[k]);
                let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                for (pm, pc) in &partial {
                    for (t, coeff) in row.iter().enumerate() {
                        let mut nm = *pm;
                        nm.exps[k] -= t as u16;
                        nm.exps[i] += t as u16;
                        next.push((nm, pc * coeff));
                    }
                }
                partial = next;
            }
            for (nm, nc) in partial {
                *acc.entry(nm).or_default() += nc;
            }
        }
        Poly::from_integral_terms(self.nvars, &den, acc)
    }

    /// Coefficients scaled by their common denominator `L`: returns `L` and
    /// the integer numerators.
    fn integral_terms(&self) -> (BigInt, Vec<(Monomial, BigInt)>) {
        let den = crate::rational::common_denominator(self.terms.values());
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let n = if den.is_one() {
                    c.numer().clone()
                } else {
                    c.numer() * (&den / c.denom())
                };
                (*m, n)
            })
            .collect();
        (den, terms)
    }

    fn from_integral_terms(nvars: usize, den: &BigInt, acc: HashMap<Monomial, BigInt>) -> Poly {
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m, Rational::new(c, den.clone())))
            .collect();
        Poly { nvars, terms }
    }

    /// Simple reflection `s_i` acting by `h_k ↦ h_k − α_i(h_k) h_i`.
    pub fn reflect_simple(&self, cartan: &[Vec<i64>], i: usize) -> Poly {
        let shifts: Vec<i64> = (0..self.nvars).map(|k| -cartan[k][i]).collect();
        self.shear(i, &shifts, -1)
    }

    /// Action of a Weyl group element as an algebra automorphism of `S(𝔥)`.
    pub fn weyl_act(&self, datum: &CartanDatum, w: &WeylElement) -> Poly {
        w.word
            .iter()
            .rev()
            .fold(self.clone(), |p, &i| p.reflect_simple(&datum.cartan, i))
    }

    /// Translation `h_k ↦ h_k + shifts[k]`.
    pub fn translate(&self, shifts: &[Rational]) -> Poly {
        let sden = crate::rational::common_denominator(shifts);
        if !sden.is_one() {
            // h ↦ h + a/b: substitute through the general path
            let images: Vec<Poly> = (0..self.nvars)
                .map(|k| {
                    let mut p = Poly::var(self.nvars, k);
                    p.add_term(Monomial::one(), shifts[k].clone());
                    p
                })
                .collect();
            return self.substitute(&images);
        }
        let shifts: Vec<i64> = shifts
            .iter()
            .map(|s| i64::try_from(s.numer()).expect("shift fits in i64"))
            .collect();
        let (den, terms) = self.integral_terms();
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(terms.len() * 4);
        for (m, c) in terms {
            let mut partial: Vec<(Monomial, BigInt)> = vec![(m, c)];
            for (k, &sk) in shifts.iter().enumerate() {
                let e = m.get(k);
                if e == 0 || sk == 0 {
                    continue;
                }
                let row = shifted_binomial_row(e, sk);
                let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                for (pm, pc) in &partial {
                    for (t, coeff) in row.iter().enumerate() {
                        let mut nm = *pm;
                        nm.exps[k] -= t as u16;
                        next.push((nm, pc * coeff));
                    }
                }
                partial = next;
            }
            for (nm, nc) in partial {
                *acc.entry(nm).or_default() += nc;
            }
        }
        Poly::from_integral_terms(self.nvars, &den, acc)
    }

    /// `θ: h_k ↦ h_k + 1`.
    pub fn theta(&self) -> Poly {
        self.translate(&vec![Rational::one(); self.nvars])
    }

    pub fn theta_inv(&self) -> Poly {
        self.translate(&vec![-Rational::one(); self.nvars])
    }

    /// Translated action `s_i.q = θ(s_i θ⁻¹(q))`.
    pub fn dot_reflect(&self, cartan: &[Vec<i64>], i: usize) -> Poly {
        self.theta_inv().reflect_simple(cartan, i).theta()
    }

    pub fn dot_act(&self, datum: &CartanDatum, w: &WeylElement) -> Poly {
        self.theta_inv().weyl_act(datum, w).theta()
    }

    /// General substitution `h_k ↦ images[k]`.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        let n = images.first().map(|p| p.nvars).unwrap_or(self.nvars);
        let mut powers: Vec<Vec<Poly>> = images
            .iter()
            .map(|p| vec![Poly::one(p.nvars), p.clone()])
            .collect();
        let mut out = Poly::zero(n);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(n, c.clone());
            for (k, pw) in powers.iter_mut().enumerate().take(self.nvars) {
                let e = m.get(k) as usize;
                while pw.len() <= e {
                    let next = &pw[pw.len() - 1] * &images[k];
                    pw.push(next);
                }
                if e > 0 {
                    term = &term * &pw[e];
                }
            }
            out += &term;
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (k, x) in point.iter().enumerate().take(self.nvars) {
                for _ in 0..m.get(k) {
                    v *= x;
                }
            }
            total += v;
        }
        total
    }

    /// Restriction to the line `sρ`: every `h_i ↦ s`.
    pub fn eval_srho(&self) -> UPoly {
        let top = self.degree().unwrap_or(0) as usize;
        let mut coeffs = vec![Rational::zero(); top + 1];
        for (m, c) in &self.terms {
            coeffs[m.degree() as usize] += c;
        }
        UPoly::from_coeffs(coeffs)
    }

    /// Coefficient vector of the degree-`d` part against a monomial list.
    pub fn coords(&self, basis: &[Monomial]) -> Vec<Rational> {
        basis.iter().map(|m| self.coeff(m)).collect()
    }

    /// Parses the canonical text form with a fixed number of variables.
    pub fn parse(s: &str, nvars: usize) -> Result<Poly> {
        let parsed = parse_terms(s)?;
        if nvars > MAX_VARS {
            return Err(Error::Parse(format!("at most {MAX_VARS} variables")));
        }
        let mut p = Poly::zero(nvars);
        for (exps, c) in parsed {
            if let Some(k) = (nvars..MAX_VARS).find(|&k| exps[k] > 0) {
                return Err(Error::Parse(format!("variable h{} out of range", k + 1)));
            }
            p.add_term(Monomial { exps }, c);
        }
        Ok(p)
    }
}

/// A quotient of polynomials whose denominator is a product of linear factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    pub num: Poly,
    /// Linear factors of the denominator, with multiplicity.
    pub den: Vec<Poly>,
}

impl RatFn {
    pub fn new(num: Poly, den: Vec<Poly>) -> Self {
        RatFn { num, den }.reduced()
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFn {
            num: p,
            den: Vec::new(),
        }
    }

    pub fn denominator(&self) -> Poly {
        self.den
            .iter()
            .fold(Poly::one(self.num.nvars()), |acc, f| &acc * f)
    }

    /// Cancels every denominator factor that divides the numerator.
    pub fn reduced(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let mut kept = Vec::new();
        for f in std::mem::take(&mut self.den) {
            match self.num.div_exact(&f) {
                Some(q) => self.num = q,
                None => kept.push(f),
            }
        }
        self.den = kept;
        self
    }

    /// The polynomial value, if the denominator cancels completely.
    pub fn as_poly(&self) -> Option<Poly> {
        let r = self.clone().reduced();
        if r.den.is_empty() {
            return Some(r.num);
        }
        let d = r.denominator();
        if d.is_constant() {
            return Some(r.num.scale(&(Rational::one() / d.constant_term())));
        }
        None
    }

    /// Equality as rational functions, by cross-multiplication.
    pub fn equals(&self, other: &RatFn) -> bool {
        &self.num * &other.denominator() == &other.num * &self.denominator()
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let den: Vec<String> = self.den.iter().map(|d| format!("({d})")).collect();
        write!(f, "({}) / {}", self.num, den.join("*"))
    }
}

/// The `ϖ_i`-components of the gradient of `q` for the `W`-invariant form:
/// `c_i = d_i⁻¹ Σ_j a[j][i] ∂q/∂h_j`.
pub fn weight_gradient(datum: &CartanDatum, q: &Poly) -> Vec<Poly> {
    let n = datum.rank();
    let partials: Vec<Poly> = (0..n).map(|j| q.partial(j)).collect();
    (0..n)
        .map(|i| {
            let mut c = Poly::zero(n);
            for (j, pj) in partials.iter().enumerate() {
                let a = datum.cartan[j][i];
                if a != 0 {
                    c += &pj.scale(&rat(a));
                }
            }
            c.scale(&Rational::new(
                BigInt::one(),
                BigInt::from(datum.symmetrizer[i]),
            ))
        })
        .collect()
}

fn parse_terms(s: &str) -> Result<Vec<([u16; MAX_VARS], Rational)>> {
    let err = |msg: &str| Error::Parse(msg.to_string());
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err("empty input"));
    }
    let bytes = compact.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0usize;
    let mut first = true;
    while pos < bytes.len() {
        let mut negative = false;
        match bytes[pos] {
            b'+' | b'-' => {
                negative = bytes[pos] == b'-';
                pos += 1;
            }
            _ if !first => return Err(err("expected `+` or `-` between terms")),
            _ => {}
        }
        first = false;
        let end = bytes[pos..]
            .iter()
            .position(|&b| b == b'+' || b == b'-')
            .map_or(bytes.len(), |k| pos + k);
        let term = &compact[pos..end];
        if term.is_empty() {
            return Err(err("empty term"));
        }
        let (exps, mut c) = parse_term(term)?;
        if negative {
            c = -c;
        }
        out.push((exps, c));
        pos = end;
    }
    Ok(out)
}

fn parse_term(term: &str) -> Result<([u16; MAX_VARS], Rational)> {
    let err = |msg: String| Error::Parse(msg);
    let mut exps = [0u16; MAX_VARS];
    let mut coeff = Rational::one();
    for (k, factor) in term.split('*').enumerate() {
        if factor.is_empty() {
            return Err(err(format!("empty factor in `{term}`")));
        }
        if let Some(rest) = factor.strip_prefix('h') {
            let (idx, exp) = match rest.split_once('^') {
                Some((a, b)) => (a, Some(b)),
                None => (rest, None),
            };
            let digits =
                |t: &str| !t.is_empty() && t.len() <= 5 && t.bytes().all(|b| b.is_ascii_digit());
            if !digits(idx) {
                return Err(err(format!("bad variable `{factor}`")));
            }
            let idx: usize = idx
                .parse()
                .map_err(|_| err(format!("bad variable `{factor}`")))?;
            if idx == 0 || idx > MAX_VARS {
                return Err(err(format!("variable index {idx} out of range")));
            }
            let e: u16 = match exp {
                None => 1,
                Some(t) if digits(t) => t
                    .parse()
                    .map_err(|_| err(format!("bad exponent in `{factor}`")))?,
                Some(_) => return Err(err(format!("bad exponent in `{factor}`"))),
            };
            exps[idx - 1] = exps[idx - 1]
                .checked_add(e)
                .ok_or_else(|| err("exponent overflow".into()))?;
        } else if k == 0 {
            coeff =
                parse_rational(factor).ok_or_else(|| err(format!("bad coefficient `{factor}`")))?;
        } else {
            return Err(err(format!("unexpected factor `{factor}`")));
        }
    }
    let total: u32 = exps.iter().map(|&e| u32::from(e)).sum();
    if total > u32::from(u16::MAX) {
        return Err(err("degree too large".into()));
    }
    Ok((exps, coeff))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let mag = c.abs();
            match (k == 0, c.is_negative()) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                (true, false) => {}
            }
            let mut factors = Vec::new();
            if m.degree() == 0 || !mag.is_one() {
                factors.push(fmt_rational(&mag));
            }
            for (i, &e) in m.exps.iter().enumerate().take(self.nvars) {
                match e {
                    0 => {}
                    1 => factors.push(format!("h{}", i + 1)),
                    _ => factors.push(format!("h{}^{}", i + 1, e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Poly {
    type Err = Error;

    /// Parses with as many variables as the largest index that occurs.
    fn from_str(s: &str) -> Result<Poly> {
        let parsed = parse_terms(s)?;
        let nvars = parsed
            .iter()
            .filter_map(|(exps, _)| exps.iter().rposition(|&e| e > 0))
            .max()
            .map_or(1, |k| k + 1);
        let mut p = Poly::zero(nvars);
        for (exps, c) in parsed {
            p.add_term(Monomial { exps }, c);
        }
        Ok(p)
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c.clone());
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let (da, ta) = self.integral_terms();
        let (db, tb) = rhs.integral_terms();
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(ta.len() * tb.len());
        for (ma, ca) in &ta {
            for (mb, cb) in &tb {
                *acc.entry(ma.mul(mb)).or_default() += ca * cb;
            }
        }
        Poly::from_integral_terms(self.nvars.max(rhs.nvars), &(da * db), acc)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::RootData;

    fn p(s: &str, n: usize) -> Poly {
        Poly::parse(s, n).unwrap()
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "0",
            "1",
            "-3/2",
            "h1^2*h2 - h2 + 5",
            "2/3*h3^4 - h1",
            "h1*h2*h3",
        ] {
            assert_eq!(p(s, 3).to_string(), s);
        }
        assert_eq!(p("h2 + h1", 2).to_string(), "h1 + h2");
        assert_eq!(p("h1*h1 - h1^2 + 0", 2).to_string(), "0");
    }

    #[test]
    fn parser_rejects_garbage() {
        for s in [
            "",
            "+",
            "h",
            "h0",
            "h9",
            "1/0",
            "h1^",
            "2**h1",
            "h1 h2",
            "h1-+h2",
            "x",
            "h1^99999999",
        ] {
            assert!(Poly::parse(s, 3).is_err(), "{s}");
        }
        assert!(Poly::parse("h4", 3).is_err());
    }

    #[test]
    fn reflections_and_dot_action() {
        let a2 = CartanDatum::new("A2".parse().unwrap());
        let h1 = Poly::var(2, 0);
        let h2 = Poly::var(2, 1);
        assert_eq!(h1.pow(2).reflect_simple(&a2.cartan, 0), h1.pow(2));
        assert_eq!(h2.reflect_simple(&a2.cartan, 0), &h1 + &h2);
        // s_1.h_1 = -h_1 - 2
        assert_eq!(h1.dot_reflect(&a2.cartan, 0), p("-h1 - 2", 2));
        // s_1.h_2 = h_2 + h_1 + 1
        assert_eq!(h2.dot_reflect(&a2.cartan, 0), p("h1 + h2 + 1", 2));
        assert_eq!(
            Poly::constant(2, rat(7)).dot_reflect(&a2.cartan, 1),
            Poly::constant(2, rat(7))
        );
    }

    #[test]
    fn theta_and_srho() {
        let q = p("h1^2*h2", 2);
        assert_eq!(p("h1", 2).theta(), p("h1 + 1", 2));
        assert_eq!(q.theta().theta_inv(), q);
        assert_eq!(p("h1*h2", 2).eval_srho(), &UPoly::s() * &UPoly::s());
        assert_eq!(p("h1 + 2", 2).eval_srho(), UPoly::linear(2, 1));
    }

    #[test]
    fn exact_division() {
        let a = p("h1 + 2*h2 + 1", 2);
        let b = p("h1^3 - h2 + 7/2", 2);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(p("h1 + 1", 2).div_exact(&p("h1 + 2", 2)), None);
        assert_eq!(p("h1^2*h2 + h1", 2).div_var(0), Some(p("h1*h2 + 1", 2)));
        assert_eq!(p("h1^2*h2 + h2", 2).div_var(0), None);
    }

    #[test]
    fn weyl_act_matches_matrix() {
        let rd = RootData::from_type("B3".parse().unwrap());
        for w in rd.weyl_group().iter().take(30) {
            for j in 0..3 {
                let img = Poly::var(3, j).weyl_act(&rd.datum, w);
                let col: Vec<i64> = (0..3).map(|k| w.matrix[k][j]).collect();
                assert_eq!(img, Poly::linear(&col, 0));
            }
        }
    }

    #[test]
    fn gradient_of_killing_form_is_divisible() {
        // A2 invariant quadratic h1² + h1 h2 + h2²
        let a2 = CartanDatum::new("A2".parse().unwrap());
        let q = p("h1^2 + h1*h2 + h2^2", 2);
        let c = weight_gradient(&a2, &q);
        assert_eq!(c[0], p("3*h1", 2));
        assert_eq!(c[1], p("3*h2", 2));
        // the plain partial is not divisible
        assert_eq!(q.partial(0), p("2*h1 + h2", 2));
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(Monomial::all_of_degree(4, 10).len(), 286);
        assert_eq!(monomial_count(4, 10), 286);
        assert_eq!(
            Monomial::all_of_degree(1, 3),
            vec![Monomial::from_exps(&[3])]
        );
    }

    #[test]
    fn rational_functions_cancel() {
        let h1 = p("h1", 2);
        let f = RatFn::new(p("h1^2 + 2*h1*h2", 2), vec![h1.clone(), p("h2 + 1", 2)]);
        assert_eq!(f.num, p("h1 + 2*h2", 2));
        assert_eq!(f.den, vec![p("h2 + 1", 2)]);
        assert!(f.as_poly().is_none());
        let g = RatFn::new(
            p("h1^2 + 2*h1*h2", 2).scale(&rat(2)),
            vec![p("2*h2 + 2", 2), h1],
        );
        assert!(f.equals(&g));
    }

    #[test]
    fn primitive_normalizes() {
        assert_eq!(p("-2/3*h1 + 4/9", 1).primitive(), p("3*h1 - 2", 1));
    }
}
