//! Exact linear algebra over the rationals.
//!
//! Small systems are reduced directly over `ℚ`. Large ones go through a
//! multi-modular path: row reduction modulo 62-bit primes, Chinese
//! remaindering, rational reconstruction, and an exact check of the result
//! before it is returned. Nothing modular escapes unverified.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::rational::Rational;

/// Reduced row echelon form with the pivot column of each row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub rows: Vec<Vec<Rational>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Columns without a pivot.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Normal form of `v` modulo the row space: zero at every pivot column.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if out[p].is_zero() {
                continue;
            }
            let c = out[p].clone();
            for (o, r) in out.iter_mut().zip(row) {
                if !r.is_zero() {
                    *o -= &c * r;
                }
            }
        }
        out
    }

    /// Basis of the right nullspace `{x : A x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![Rational::zero(); self.ncols];
                v[f] = Rational::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = -row[f].clone();
                }
                v
            })
            .collect()
    }
}

/// Row reduction directly over `ℚ`.
pub fn rref_rational(rows: &[Vec<Rational>], ncols: usize) -> Rref {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..m.len()).find(|&k| !m[k][c].is_zero()) else {
            continue;
        };
        m.swap(r, k);
        let inv = Rational::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (k, row) in m.iter_mut().enumerate() {
            if k == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    Rref {
        rows: m,
        pivots,
        ncols,
    }
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    exact_rref(rows, ncols).rank()
}

/// Below this many entries the direct rational elimination is used.
const SMALL: usize = 600;

/// Exact reduced row echelon form.
pub fn exact_rref(rows: &[Vec<Rational>], ncols: usize) -> Rref {
    if rows.len() * ncols <= SMALL {
        return rref_rational(rows, ncols);
    }
    let ints = integer_rows(rows);
    let primes = PrimeStream::new();
    multimodular_rref(&ints, ncols, primes).unwrap_or_else(|| rref_rational(rows, ncols))
}

/// A particular solution of `A x = b` with all free variables zero, or
/// `None` when the system is inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational], ncols: usize) -> Option<Vec<Rational>> {
    let aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    if aug.len() * (ncols + 1) <= SMALL {
        let rref = rref_rational(&aug, ncols + 1);
        return particular_from_rref(&rref, ncols);
    }
    let ints = integer_rows(&aug);
    multimodular_solve(&ints, ncols).or_else(|| {
        let rref = rref_rational(&aug, ncols + 1);
        particular_from_rref(&rref, ncols)
    })
}

fn particular_from_rref(rref: &Rref, ncols: usize) -> Option<Vec<Rational>> {
    if rref.pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (row, &p) in rref.rows.iter().zip(&rref.pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

/// Scales each row by the lcm of its denominators.
fn integer_rows(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.par_iter()
        .map(|row| {
            let den = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&den / x.denom())).collect()
        })
        .collect()
}

// ---------- primes ----------

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Descending primes below `2^62`.
#[derive(Debug, Clone)]
pub struct PrimeStream {
    next: u64,
}

impl PrimeStream {
    pub fn new() -> Self {
        PrimeStream {
            next: (1u64 << 62) - 1,
        }
    }

    pub fn take(&mut self, k: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(k);
        while out.len() < k {
            let c = self.next;
            self.next -= 2;
            if is_prime(c) {
                out.push(c);
            }
        }
        out
    }
}

impl Default for PrimeStream {
    fn default() -> Self {
        Self::new()
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn to_mod(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits")
}

struct ModRref {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    used_rows: Vec<usize>,
}

fn mod_rref(rows: &[Vec<BigInt>], ncols: usize, p: u64) -> ModRref {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| to_mod(x, p)).collect())
        .collect();
    let mut origin: Vec<usize> = (0..m.len()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(k) = (r..m.len()).find(|&k| m[k][c] != 0) else {
            continue;
        };
        m.swap(r, k);
        origin.swap(r, k);
        let inv = inv_mod(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = std::mem::take(&mut m[r]);
        m.par_iter_mut().enumerate().for_each(|(k, row)| {
            if k == r || row.is_empty() || row[c] == 0 {
                return;
            }
            let f = p - row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if y != 0 {
                    *x = ((*x as u128 + f as u128 * y as u128) % p as u128) as u64;
                }
            }
        });
        m[r] = pivot_row;
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    origin.truncate(r);
    ModRref {
        rows: m,
        pivots,
        used_rows: origin,
    }
}

/// Rational reconstruction of `a mod m` with both parts bounded by `sqrt(m/2)`.
pub fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if r1.gcd(&t1) != BigInt::one() {
        return None;
    }
    let (n, d) = if t1.sign() == Sign::Minus {
        (-r1, -t1)
    } else {
        (r1, t1)
    };
    Some(Rational::new(n, d))
}

/// Incremental Chinese remaindering of a table of residues.
struct Crt {
    modulus: BigInt,
    values: Vec<Vec<BigInt>>,
}

impl Crt {
    fn new(first: &[Vec<u64>], p: u64) -> Self {
        Crt {
            modulus: BigInt::from(p),
            values: first
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        }
    }

    fn absorb(&mut self, table: &[Vec<u64>], p: u64) {
        let m_mod_p = to_mod(&self.modulus, p);
        let inv = inv_mod(m_mod_p, p);
        let modulus = self.modulus.clone();
        self.values
            .par_iter_mut()
            .zip(table.par_iter())
            .for_each(|(row, res)| {
                for (v, &b) in row.iter_mut().zip(res) {
                    let a = to_mod(v, p);
                    let diff = (b + p - a) % p;
                    let t = mul_mod(diff, inv, p);
                    if t != 0 {
                        *v += &modulus * t;
                    }
                }
            });
        self.modulus *= p;
    }

    fn reconstruct(&self) -> Option<Vec<Vec<Rational>>> {
        self.values
            .par_iter()
            .map(|row| {
                row.iter()
                    .map(|v| rational_reconstruct(v, &self.modulus))
                    .collect::<Option<Vec<_>>>()
            })
            .collect()
    }
}

/// Tracks the best (highest rank, then lexicographically smallest pivots)
/// modular images; worse primes are discarded as unlucky.
fn better(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    b.len().cmp(&a.len()).then_with(|| a.cmp(b))
}

const MAX_PRIMES: usize = 4096;

fn multimodular_rref(rows: &[Vec<BigInt>], ncols: usize, mut primes: PrimeStream) -> Option<Rref> {
    let first_p = primes.take(1)[0];
    let first = mod_rref(rows, ncols, first_p);
    if first.pivots.is_empty() {
        return Some(Rref {
            rows: Vec::new(),
            pivots: Vec::new(),
            ncols,
        });
    }
    // a spanning subset of rows, certified at the end against every row
    let subset: Vec<Vec<BigInt>> = first.used_rows.iter().map(|&k| rows[k].clone()).collect();
    let mut pivots = first.pivots.clone();
    let mut crt = Crt::new(&first.rows, first_p);
    let mut previous: Option<Vec<Vec<Rational>>> = None;
    let mut used = 1;
    let mut batch = 1;
    while used < MAX_PRIMES {
        let ps = primes.take(batch);
        let images: Vec<(u64, ModRref)> = ps
            .par_iter()
            .map(|&p| (p, mod_rref(&subset, ncols, p)))
            .collect();
        for (p, img) in images {
            match better(&img.pivots, &pivots) {
                std::cmp::Ordering::Less => {
                    pivots = img.pivots.clone();
                    crt = Crt::new(&img.rows, p);
                    previous = None;
                }
                std::cmp::Ordering::Equal => crt.absorb(&img.rows, p),
                std::cmp::Ordering::Greater => {}
            }
        }
        used += batch;
        batch = (batch * 2).min(16);
        if let Some(cand) = crt.reconstruct() {
            if previous.as_ref() == Some(&cand) {
                let rref = Rref {
                    rows: cand,
                    pivots: pivots.clone(),
                    ncols,
                };
                if verify_rref(rows, &rref) {
                    return Some(rref);
                }
                // the row subset came from an unlucky prime: fall back to all rows
                return multimodular_rref_full(rows, ncols, primes);
            }
            previous = Some(cand);
        }
    }
    None
}

fn multimodular_rref_full(
    rows: &[Vec<BigInt>],
    ncols: usize,
    mut primes: PrimeStream,
) -> Option<Rref> {
    let mut state: Option<(Vec<usize>, Crt)> = None;
    let mut previous: Option<Vec<Vec<Rational>>> = None;
    for _ in 0..MAX_PRIMES {
        let p = primes.take(1)[0];
        let img = mod_rref(rows, ncols, p);
        match &mut state {
            None => state = Some((img.pivots.clone(), Crt::new(&img.rows, p))),
            Some((piv, crt)) => match better(&img.pivots, piv) {
                std::cmp::Ordering::Less => {
                    *piv = img.pivots.clone();
                    *crt = Crt::new(&img.rows, p);
                    previous = None;
                }
                std::cmp::Ordering::Equal => crt.absorb(&img.rows, p),
                std::cmp::Ordering::Greater => continue,
            },
        }
        let (piv, crt) = state.as_ref().expect("set above");
        if let Some(cand) = crt.reconstruct() {
            if previous.as_ref() == Some(&cand) {
                let rref = Rref {
                    rows: cand.clone(),
                    pivots: piv.clone(),
                    ncols,
                };
                if verify_rref(rows, &rref) {
                    return Some(rref);
                }
            }
            previous = Some(cand);
        }
    }
    None
}

/// Certifies `rref` as the row-reduced form of `rows`: each reconstructed row
/// is in reduced form, and every input row equals the combination of
/// reduced rows given by its pivot entries. Since the modular rank bounds the
/// rational rank from below, this pins down the row space exactly.
fn verify_rref(rows: &[Vec<BigInt>], rref: &Rref) -> bool {
    for (k, (row, &p)) in rref.rows.iter().zip(&rref.pivots).enumerate() {
        if !row[p].is_one() {
            return false;
        }
        for (j, &q) in rref.pivots.iter().enumerate() {
            if j != k && !row[q].is_zero() {
                return false;
            }
        }
        if row[..p].iter().any(|x| !x.is_zero()) {
            return false;
        }
    }
    // integer form of the reduced rows: row_k = y_k / den_k
    let scaled: Vec<(BigInt, Vec<BigInt>)> = rref
        .rows
        .iter()
        .map(|row| {
            let den = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let ints = row.iter().map(|x| x.numer() * (&den / x.denom())).collect();
            (den, ints)
        })
        .collect();
    let total = scaled.iter().fold(BigInt::one(), |acc, (d, _)| acc.lcm(d));
    let factors: Vec<BigInt> = scaled.iter().map(|(d, _)| &total / d).collect();
    rows.par_iter().all(|a| {
        let mut acc: Vec<BigInt> = vec![BigInt::zero(); rref.ncols];
        for ((&p, (_, y)), f) in rref.pivots.iter().zip(&scaled).zip(&factors) {
            if a[p].is_zero() {
                continue;
            }
            let c = &a[p] * f;
            for (s, v) in acc.iter_mut().zip(y) {
                if !v.is_zero() {
                    *s += &c * v;
                }
            }
        }
        acc.iter().zip(a).all(|(s, x)| *s == x * &total)
    })
}

fn multimodular_solve(aug: &[Vec<BigInt>], ncols: usize) -> Option<Vec<Rational>> {
    let mut primes = PrimeStream::new();
    let first_p = primes.take(1)[0];
    let first = mod_rref(aug, ncols + 1, first_p);
    let subset: Vec<Vec<BigInt>> = first.used_rows.iter().map(|&k| aug[k].clone()).collect();
    let extract = |img: &ModRref| -> Vec<Vec<u64>> {
        let mut x = vec![0u64; ncols];
        for (row, &p) in img.rows.iter().zip(&img.pivots) {
            if p < ncols {
                x[p] = row[ncols];
            }
        }
        vec![x]
    };
    let mut pivots = first.pivots.clone();
    let mut crt = Crt::new(&extract(&first), first_p);
    let mut previous: Option<Vec<Rational>> = None;
    for round in 0..MAX_PRIMES {
        let rows_for_round: &[Vec<BigInt>] = if round < 64 { &subset } else { aug };
        let ps = primes.take(4);
        let images: Vec<(u64, ModRref)> = ps
            .par_iter()
            .map(|&p| (p, mod_rref(rows_for_round, ncols + 1, p)))
            .collect();
        for (p, img) in images {
            match better(&img.pivots, &pivots) {
                std::cmp::Ordering::Less => {
                    pivots = img.pivots.clone();
                    crt = Crt::new(&extract(&img), p);
                    previous = None;
                }
                std::cmp::Ordering::Equal => crt.absorb(&extract(&img), p),
                std::cmp::Ordering::Greater => {}
            }
        }
        if pivots.last() == Some(&ncols) {
            // the right-hand side is a pivot at the best prime seen so far
            if round >= 2 {
                return None;
            }
            continue;
        }
        if let Some(mut cand) = crt.reconstruct() {
            let x = cand.pop().expect("one row");
            if previous.as_ref() == Some(&x) && verify_solution(aug, &x, ncols) {
                return Some(x);
            }
            previous = Some(x);
        }
    }
    None
}

fn verify_solution(aug: &[Vec<BigInt>], x: &[Rational], ncols: usize) -> bool {
    let den = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let y: Vec<BigInt> = x.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    aug.par_iter().all(|row| {
        let mut s = BigInt::zero();
        for (a, v) in row[..ncols].iter().zip(&y) {
            if !a.is_zero() && !v.is_zero() {
                s += a * v;
            }
        }
        s == &row[ncols] * &den
    })
}

/// Rank of an integer matrix modulo a single large prime. A lower bound on
/// the rational rank, used only for fast independence screening.
pub fn rank_mod_prime(rows: &[Vec<Rational>], ncols: usize) -> usize {
    let ints = integer_rows(rows);
    let p = PrimeStream::new().take(1)[0];
    mod_rref(&ints, ncols, p).pivots.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, rat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(
        rng: &mut ChaCha8Rng,
        rows: usize,
        cols: usize,
        rank: usize,
    ) -> Vec<Vec<Rational>> {
        // product of a rows×rank and rank×cols matrix
        let left: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..rank).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        let right: Vec<Vec<i64>> = (0..rank)
            .map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        (0..rows)
            .map(|i| {
                (0..cols)
                    .map(|j| rat((0..rank).map(|k| left[i][k] * right[k][j]).sum()))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn primes_are_prime() {
        assert!(is_prime(2) && is_prime(3) && is_prime(1_000_000_007));
        assert!(!is_prime(1) && !is_prime(561) && !is_prime(1_000_000_007u64 * 3));
        let ps = PrimeStream::new().take(3);
        assert!(ps.iter().all(|&p| p < (1 << 62) && is_prime(p)));
        assert!(ps[0] > ps[1] && ps[1] > ps[2]);
    }

    #[test]
    fn reconstruction_inverts_reduction() {
        let m = BigInt::from(PrimeStream::new().take(1)[0]);
        for (n, d) in [(3i64, 7i64), (-22, 5), (0, 1), (123456, 1)] {
            let x = frac(n, d);
            let residue =
                (BigInt::from(n) * BigInt::from(d).modpow(&(&m - 2u32), &m)).mod_floor(&m);
            assert_eq!(rational_reconstruct(&residue, &m), Some(x));
        }
    }

    #[test]
    fn multimodular_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (rows, cols, r) in [(30, 25, 18), (40, 30, 30), (25, 40, 10)] {
            let mut m = random_matrix(&mut rng, rows, cols, r);
            m[0][0] += frac(1, 3);
            let direct = rref_rational(&m, cols);
            let ints = integer_rows(&m);
            let multi = multimodular_rref(&ints, cols, PrimeStream::new()).unwrap();
            assert_eq!(direct, multi);
        }
    }

    #[test]
    fn solve_finds_particular_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 50, 30, 20);
        let x0: Vec<Rational> = (0..30).map(|k| frac(k as i64 - 7, 3)).collect();
        let b: Vec<Rational> = a
            .iter()
            .map(|row| row.iter().zip(&x0).map(|(p, q)| p * q).sum())
            .collect();
        let x = solve(&a, &b, 30).unwrap();
        for (row, rhs) in a.iter().zip(&b) {
            let lhs: Rational = row.iter().zip(&x).map(|(p, q)| p * q).sum();
            assert_eq!(&lhs, rhs);
        }
        let direct = {
            let aug: Vec<Vec<Rational>> = a
                .iter()
                .zip(&b)
                .map(|(r, v)| {
                    let mut r = r.clone();
                    r.push(v.clone());
                    r
                })
                .collect();
            particular_from_rref(&rref_rational(&aug, 31), 30).unwrap()
        };
        assert_eq!(x, direct);
        let mut bad = b.clone();
        bad[0] += rat(1);
        assert!(solve(&a, &bad, 30).is_none());
    }

    #[test]
    fn nullspace_is_annihilated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 12, 15, 7);
        let rref = exact_rref(&a, 15);
        let ns = rref.nullspace();
        assert_eq!(ns.len(), 8);
        for v in ns {
            for row in &a {
                let s: Rational = row.iter().zip(&v).map(|(p, q)| p * q).sum();
                assert!(s.is_zero());
            }
        }
    }
}
