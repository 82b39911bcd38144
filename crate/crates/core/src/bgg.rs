//! Divided-difference operators, the invariant ring and the coinvariant algebra.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{inconsistency, Result};
use crate::linalg::{exact_rref, Rref};
use crate::poly::{Monomial, Poly};
use crate::rational::Rational;
use crate::rootsys::RootData;

/// `A_i f = (f − s_i f) / h_i`.
pub fn bgg_apply(cartan: &[Vec<i64>], i: usize, f: &Poly) -> Poly {
    let diff = f - &f.reflect_simple(cartan, i);
    diff.div_var(i).expect("f - s_i f is divisible by h_i")
}

/// `A_{i_1} A_{i_2} … A_{i_k} f`: the last letter acts first.
pub fn bgg_word_apply(cartan: &[Vec<i64>], word: &[usize], f: &Poly) -> Poly {
    let mut out = f.clone();
    for &i in word.iter().rev() {
        if out.is_zero() {
            break;
        }
        out = bgg_apply(cartan, i, &out);
    }
    out
}

/// A word in the operators `A_i`, printed with 1-based letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BggWord(pub Vec<usize>);

impl fmt::Display for BggWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &i in &self.0 {
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

/// Power sum `Σ_{u ∈ orbit} (u·h)^d` over a list of coroot-lattice vectors.
fn orbit_power_sum(orbit: &[Vec<i64>], nvars: usize, d: u32) -> Poly {
    let monos = Monomial::all_of_degree(nvars, d);
    let factorials: Vec<BigInt> = (0..=d)
        .scan(BigInt::one(), |acc, k| {
            if k > 0 {
                *acc *= k;
            }
            Some(acc.clone())
        })
        .collect();
    let terms: Vec<(Monomial, Rational)> = monos
        .par_iter()
        .map(|m| {
            let mut total = BigInt::zero();
            for u in orbit {
                let mut prod = BigInt::one();
                for k in 0..nvars {
                    let e = m.get(k);
                    if e > 0 {
                        prod *= BigInt::from(u[k]).pow(u32::from(e));
                    }
                }
                total += prod;
            }
            let mut multinomial = factorials[d as usize].clone();
            for k in 0..nvars {
                multinomial /= &factorials[m.get(k) as usize];
            }
            (*m, Rational::from_integer(total * multinomial))
        })
        .collect();
    Poly::from_terms(nvars, terms)
}

/// All products of the given homogeneous generators with total degree `d`.
pub fn products_of_degree(gens: &[Poly], d: u32) -> Vec<Poly> {
    fn rec(gens: &[Poly], start: usize, left: u32, cur: Poly, out: &mut Vec<Poly>) {
        if left == 0 {
            out.push(cur);
            return;
        }
        for k in start..gens.len() {
            let dk = gens[k].degree().expect("non-zero");
            if dk <= left {
                rec(gens, k, left - dk, &cur * &gens[k], out);
            }
        }
    }
    let mut out = Vec::new();
    if let Some(first) = gens.first() {
        rec(gens, 0, d, Poly::one(first.nvars()), &mut out);
    }
    out
}

fn degree_rank(polys: &[Poly], d: u32, nvars: usize) -> usize {
    let monos = Monomial::all_of_degree(nvars, d);
    let rows: Vec<Vec<Rational>> = polys.iter().map(|p| p.coords(&monos)).collect();
    exact_rref(&rows, monos.len()).rank()
}

/// Homogeneous generators of `S(𝔥)^W`, of degrees `m_i + 1`, as primitive
/// integer polynomials. Built from orbit power sums of random linear forms.
pub fn invariant_generators(rd: &RootData) -> Result<Vec<Poly>> {
    let n = rd.rank();
    let exps = rd.exponents();
    let top = *exps.last().expect("rank ≥ 1") as u32 + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + n as u64);
    let mut gens: Vec<Poly> = Vec::new();
    for d in 2..=top {
        if gens.len() == n {
            break;
        }
        let mut misses = 0;
        while misses < 3 && gens.len() < n {
            let v: Vec<i64> = (0..n)
                .map(|_| rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 })
                .collect();
            let orbit = rd.coroot_orbit(&v);
            let sample = orbit_power_sum(&orbit, n, d);
            if sample.is_zero() {
                misses += 1;
                continue;
            }
            let mut span = products_of_degree(&gens, d);
            let before = if span.is_empty() {
                0
            } else {
                degree_rank(&span, d, n)
            };
            span.push(sample.clone());
            if degree_rank(&span, d, n) > before {
                gens.push(sample.primitive());
                misses = 0;
            } else {
                misses += 1;
            }
        }
    }
    let degrees: Vec<usize> = gens
        .iter()
        .map(|g| g.degree().unwrap_or(0) as usize - 1)
        .collect();
    if degrees != exps {
        return Err(inconsistency(format!(
            "invariant generator degrees minus one {degrees:?} differ from the dual-partition exponents {exps:?}"
        )));
    }
    Ok(gens)
}

/// Graded dimensions of the coinvariant algebra from the exponents:
/// `Π_i (1 + t + … + t^{m_i})`.
pub fn hilbert_dims(exponents: &[usize]) -> Vec<u64> {
    let mut dims = vec![1u64];
    for &m in exponents {
        let mut next = vec![0u64; dims.len() + m];
        for (k, &c) in dims.iter().enumerate() {
            for slot in next.iter_mut().skip(k).take(m + 1) {
                *slot += c;
            }
        }
        dims = next;
    }
    dims
}

/// One graded piece of `Q = S(𝔥)/L`.
#[derive(Debug)]
pub struct QDegree {
    pub degree: u32,
    /// All monomials of this degree, largest first (column order).
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// Row-reduced spanning set of `L_d`.
    pub rref: Rref,
    /// Column indices of the standard monomials, which form a basis of `Q_d`.
    pub basis: Vec<usize>,
}

impl QDegree {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn vector(&self, f: &Poly) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.monomials.len()];
        for (m, c) in f.terms() {
            if m.degree() == self.degree {
                v[self.index[m]] = c.clone();
            }
        }
        v
    }

    /// Coordinates of the degree-`d` part of `f` in the standard basis.
    pub fn coordinates(&self, f: &Poly) -> Vec<Rational> {
        let reduced = self.rref.reduce(&self.vector(f));
        self.basis.iter().map(|&k| reduced[k].clone()).collect()
    }

    /// The normal-form polynomial with the given coordinates.
    pub fn lift(&self, coords: &[Rational], nvars: usize) -> Poly {
        Poly::from_terms(
            nvars,
            self.basis
                .iter()
                .zip(coords)
                .map(|(&k, c)| (self.monomials[k], c.clone())),
        )
    }
}

/// A homogeneous class in `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QClass {
    pub degree: u32,
    pub coords: Vec<Rational>,
}

impl QClass {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Representative of the scalar class: first non-zero coordinate is 1.
    pub fn scalar_key(&self) -> QClass {
        match self.coords.iter().find(|c| !c.is_zero()) {
            None => self.clone(),
            Some(lead) => {
                let inv = Rational::one() / lead;
                QClass {
                    degree: self.degree,
                    coords: self.coords.iter().map(|c| c * &inv).collect(),
                }
            }
        }
    }

    /// `λ` with `self = λ·other`, if the two are proportional and `other ≠ 0`.
    pub fn ratio_to(&self, other: &QClass) -> Option<Rational> {
        if self.degree != other.degree {
            return None;
        }
        let k = other.coords.iter().position(|c| !c.is_zero())?;
        let lambda = &self.coords[k] / &other.coords[k];
        self.coords
            .iter()
            .zip(&other.coords)
            .all(|(a, b)| *a == &lambda * b)
            .then_some(lambda)
    }
}

/// The coinvariant algebra, built lazily one degree at a time.
#[derive(Debug)]
pub struct CoinvariantSpace {
    nvars: usize,
    cartan: Vec<Vec<i64>>,
    generators: Vec<Poly>,
    degrees: Mutex<HashMap<u32, Arc<QDegree>>>,
}

impl CoinvariantSpace {
    pub fn new(rd: &RootData, generators: Vec<Poly>) -> Self {
        CoinvariantSpace {
            nvars: rd.rank(),
            cartan: rd.datum.cartan.clone(),
            generators,
            degrees: Mutex::new(HashMap::new()),
        }
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn level(&self, d: u32) -> Arc<QDegree> {
        if let Some(q) = self.degrees.lock().expect("poisoned").get(&d) {
            return q.clone();
        }
        let built = Arc::new(self.build(d));
        self.degrees
            .lock()
            .expect("poisoned")
            .entry(d)
            .or_insert(built)
            .clone()
    }

    fn build(&self, d: u32) -> QDegree {
        let n = self.nvars;
        let mut monomials = Monomial::all_of_degree(n, d);
        monomials.reverse();
        let index: HashMap<Monomial, usize> =
            monomials.iter().enumerate().map(|(k, m)| (*m, k)).collect();
        let mut rows = Vec::new();
        for g in &self.generators {
            let dg = g.degree().expect("non-zero");
            if dg > d || dg == 0 {
                continue;
            }
            for m in Monomial::all_of_degree(n, d - dg) {
                let prod = g.mul_monomial(&m, &Rational::one());
                let mut v = vec![Rational::zero(); monomials.len()];
                for (mm, c) in prod.terms() {
                    v[index[mm]] = c.clone();
                }
                rows.push(v);
            }
        }
        let rref = exact_rref(&rows, monomials.len());
        let basis = rref.free_columns();
        QDegree {
            degree: d,
            monomials,
            index,
            rref,
            basis,
        }
    }

    pub fn dim(&self, d: u32) -> usize {
        self.level(d).dim()
    }

    /// Class of a homogeneous polynomial (only the degree-`d` part is read).
    pub fn reduce(&self, f: &Poly, d: u32) -> QClass {
        QClass {
            degree: d,
            coords: self.level(d).coordinates(f),
        }
    }

    /// Class of a non-zero homogeneous polynomial.
    pub fn reduce_homogeneous(&self, f: &Poly) -> QClass {
        let d = f.degree().unwrap_or(0);
        self.reduce(f, d)
    }

    pub fn lift(&self, c: &QClass) -> Poly {
        self.level(c.degree).lift(&c.coords, self.nvars)
    }

    /// `A_i` on a class. Well defined because `A_i L ⊆ L`.
    pub fn apply(&self, i: usize, c: &QClass) -> QClass {
        if c.degree == 0 {
            return QClass {
                degree: 0,
                coords: vec![Rational::zero(); self.dim(0)],
            };
        }
        let image = bgg_apply(&self.cartan, i, &self.lift(c));
        self.reduce(&image, c.degree - 1)
    }

    /// A word `w` of length `deg f` with `A_w f` a non-zero scalar. Greedy:
    /// by the vanishing lemma some `A_i` is non-zero on any non-zero class of
    /// positive degree.
    pub fn find_killing_word(&self, f: &QClass) -> Result<BggWord> {
        if f.is_zero() {
            return Err(inconsistency("killing word requested for the zero class"));
        }
        let mut cur = f.clone();
        let mut letters = Vec::new();
        while cur.degree > 0 {
            let step = (0..self.nvars)
                .map(|i| (i, self.apply(i, &cur)))
                .find(|(_, c)| !c.is_zero());
            match step {
                Some((i, next)) => {
                    letters.push(i);
                    cur = next;
                }
                None => {
                    return Err(inconsistency(format!(
                        "a non-zero class of degree {} is killed by every A_i",
                        cur.degree
                    )))
                }
            }
        }
        letters.reverse();
        Ok(BggWord(letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn rd(tag: &str) -> RootData {
        RootData::from_type(tag.parse().unwrap())
    }

    #[test]
    fn basic_operator_values() {
        let a2 = rd("A2");
        let h1 = Poly::var(2, 0);
        assert_eq!(
            bgg_apply(&a2.datum.cartan, 0, &h1),
            Poly::constant(2, rat(2))
        );
        assert!(bgg_apply(&a2.datum.cartan, 1, &Poly::constant(2, rat(5))).is_zero());
        // A_2 h_1 = (h_1 - (h_1 + h_2)) / h_2 = -1
        assert_eq!(
            bgg_apply(&a2.datum.cartan, 1, &h1),
            Poly::constant(2, rat(-1))
        );
    }

    #[test]
    fn generators_are_invariant() {
        for tag in ["A1", "A2", "B2", "G2", "B3", "D4"] {
            let r = rd(tag);
            let gens = invariant_generators(&r).unwrap();
            assert_eq!(gens.len(), r.rank());
            for g in &gens {
                for i in 0..r.rank() {
                    assert_eq!(&g.reflect_simple(&r.datum.cartan, i), g, "{tag}");
                }
            }
        }
    }

    #[test]
    fn a1_generator_is_the_square() {
        let gens = invariant_generators(&rd("A1")).unwrap();
        assert_eq!(gens, vec![Poly::parse("h1^2", 1).unwrap()]);
    }

    #[test]
    fn hilbert_series() {
        assert_eq!(hilbert_dims(&[1, 2]), vec![1, 2, 2, 1]);
        assert_eq!(hilbert_dims(&[1, 5, 7, 11]).iter().sum::<u64>(), 1152);
    }

    #[test]
    fn coinvariant_dims_match_weyl_order() {
        for tag in ["A2", "B2", "G2", "A3"] {
            let r = rd(tag);
            let cs = CoinvariantSpace::new(&r, invariant_generators(&r).unwrap());
            let top = r.coroots.num_positive() as u32;
            let dims: Vec<u64> = (0..=top + 1).map(|d| cs.dim(d) as u64).collect();
            let mut expected = hilbert_dims(&r.exponents());
            expected.push(0);
            assert_eq!(dims, expected, "{tag}");
            assert_eq!(dims.iter().sum::<u64>() as usize, r.weyl_order());
        }
    }

    #[test]
    fn killing_words() {
        let r = rd("A2");
        let cs = CoinvariantSpace::new(&r, invariant_generators(&r).unwrap());
        let f = cs.reduce_homogeneous(&Poly::var(2, 0));
        let w = cs.find_killing_word(&f).unwrap();
        assert_eq!(w.0.len(), 1);
        let one = cs.reduce_homogeneous(&Poly::one(2));
        assert_eq!(cs.find_killing_word(&one).unwrap().0.len(), 0);
    }
}
