//! Chevalley basis of the Langlands dual `𝔤∨`.
//!
//! The roots of `𝔤∨` are the coroots of `𝔤`, written in simple-coroot
//! coordinates. The Cartan basis `t_j = [x_{α_j∨}, x_{−α_j∨}]` is identified
//! with the simple roots `α_j` of `𝔤`. Signs follow the extraspecial-pair
//! convention with positive roots ordered by height, then lexicographically.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{inconsistency, Error, Result};
use crate::linalg::rref_rational;
use crate::rational::{frac, rat, to_i64, Rational};
use crate::rootsys::RootData;
use crate::upoly::UPoly;

/// Row coroots, column coroots and the matrix between them.
pub type LevelMap = (Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<Vec<Rational>>);

#[derive(Debug, Clone)]
pub struct ChevalleyBasis {
    pub rd: RootData,
    /// Positive roots followed by their negatives, in the same order.
    roots: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    /// Squared lengths of the roots of `𝔤∨` up to a common scale.
    norms: Vec<i64>,
    /// `n[r][s] = N_{r,s}`, zero when `r + s` is not a root.
    n: Vec<Vec<i64>>,
}

/// One row of the exported structure-constant table.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct NEntry {
    pub beta: Vec<i64>,
    pub gamma: Vec<i64>,
    pub n: i64,
}

impl ChevalleyBasis {
    pub fn new(rd: &RootData) -> Result<Self> {
        let pos: Vec<Vec<i64>> = rd.positive_coroots().to_vec();
        let npos = pos.len();
        let mut roots = pos.clone();
        roots.extend(
            pos.iter()
                .map(|v| v.iter().map(|c| -c).collect::<Vec<i64>>()),
        );
        let index: HashMap<Vec<i64>, usize> = roots
            .iter()
            .cloned()
            .enumerate()
            .map(|(k, v)| (v, k))
            .collect();
        let norms: Vec<i64> = roots.iter().map(|v| rd.coroot_norm(v)).collect();
        let mut builder = Builder {
            roots: &roots,
            index: &index,
            norms: &norms,
            npos,
            memo: HashMap::new(),
        };
        let total = roots.len();
        let mut n = vec![vec![0i64; total]; total];
        for r in 0..total {
            for s in 0..total {
                if builder.sum_index(r, s).is_some() {
                    n[r][s] = builder.n(r, s)?;
                }
            }
        }
        Ok(ChevalleyBasis {
            rd: rd.clone(),
            roots,
            index,
            norms,
            n,
        })
    }

    pub fn rank(&self) -> usize {
        self.rd.rank()
    }

    pub fn num_positive(&self) -> usize {
        self.roots.len() / 2
    }

    /// Dimension of `𝔤∨`.
    pub fn dim(&self) -> usize {
        self.rank() + self.roots.len()
    }

    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn root_index(&self, v: &[i64]) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// `N_{β,γ}` for roots of `𝔤∨` given by coordinates; zero if either is
    /// not a root or their sum is not a root.
    pub fn n(&self, beta: &[i64], gamma: &[i64]) -> i64 {
        match (self.root_index(beta), self.root_index(gamma)) {
            (Some(b), Some(g)) => self.n[b][g],
            _ => 0,
        }
    }

    fn negate(v: &[i64]) -> Vec<i64> {
        v.iter().map(|c| -c).collect()
    }

    /// Coefficients of `[x_r, x_{−r}]` in the basis `t_j`.
    fn coroot_of(&self, r: usize) -> Vec<Rational> {
        let v = &self.roots[r];
        let nr = self.norms[r];
        (0..self.rank())
            .map(|k| {
                let mut e = vec![0; self.rank()];
                e[k] = 1;
                frac(v[k] * self.rd.coroot_norm(&e), nr)
            })
            .collect()
    }

    /// Bracket of two basis vectors. Basis index `k < ℓ` is `t_k`; index
    /// `ℓ + r` is the root vector `x_r`.
    pub fn basis_bracket(&self, a: usize, b: usize) -> Vec<(usize, Rational)> {
        let l = self.rank();
        match (a < l, b < l) {
            (true, true) => Vec::new(),
            (true, false) => {
                let r = b - l;
                let c = self.rd.datum.root_on_coroot(a, &self.roots[r]);
                if c == 0 {
                    Vec::new()
                } else {
                    vec![(b, rat(c))]
                }
            }
            (false, true) => self
                .basis_bracket(b, a)
                .into_iter()
                .map(|(k, c)| (k, -c))
                .collect(),
            (false, false) => {
                let (r, s) = (a - l, b - l);
                let sum: Vec<i64> = self.roots[r]
                    .iter()
                    .zip(&self.roots[s])
                    .map(|(x, y)| x + y)
                    .collect();
                if sum.iter().all(|&c| c == 0) {
                    return self
                        .coroot_of(r)
                        .into_iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .collect();
                }
                match self.index.get(&sum) {
                    Some(&t) if self.n[r][s] != 0 => vec![(l + t, rat(self.n[r][s]))],
                    _ => Vec::new(),
                }
            }
        }
    }

    /// Exhaustive Jacobi identity check; returns the offending triples.
    pub fn jacobi_failures(&self) -> Vec<(usize, usize, usize)> {
        let d = self.dim();
        let mut bad = Vec::new();
        let nested = |x: usize, y: usize, z: usize, acc: &mut HashMap<usize, Rational>| {
            for (k, c) in self.basis_bracket(y, z) {
                for (m, e) in self.basis_bracket(x, k) {
                    *acc.entry(m).or_insert_with(Rational::zero) += &c * e;
                }
            }
        };
        for a in 0..d {
            for b in (a + 1)..d {
                for c in (b + 1)..d {
                    let mut acc = HashMap::new();
                    nested(a, b, c, &mut acc);
                    nested(b, c, a, &mut acc);
                    nested(c, a, b, &mut acc);
                    if acc.values().any(|v| !v.is_zero()) {
                        bad.push((a, b, c));
                    }
                }
            }
        }
        bad
    }

    pub fn export_table(&self) -> Vec<NEntry> {
        let mut out = Vec::new();
        for (r, beta) in self.roots.iter().enumerate() {
            for (s, gamma) in self.roots.iter().enumerate() {
                if self.n[r][s] != 0 {
                    out.push(NEntry {
                        beta: beta.clone(),
                        gamma: gamma.clone(),
                        n: self.n[r][s],
                    });
                }
            }
        }
        out
    }

    /// Whether a coroot of `𝔤` is short; simply-laced coroots count as long.
    pub fn is_short(&self, v: &[i64]) -> bool {
        !self.rd.coroot_is_long(v)
    }

    /// `e∨ = Σ_i x_{α_i∨}`.
    pub fn principal_e(&self) -> DualElement {
        let mut e = DualElement::zero(self);
        for i in 0..self.rank() {
            let mut v = vec![0; self.rank()];
            v[i] = 1;
            e.roots[self.index[&v]] = UPoly::one();
        }
        e
    }

    /// `f∨ = Σ_i x_{−α_i∨}`.
    pub fn principal_f(&self) -> DualElement {
        let mut f = DualElement::zero(self);
        for i in 0..self.rank() {
            let mut v = vec![0; self.rank()];
            v[i] = -1;
            f.roots[self.index[&v]] = UPoly::one();
        }
        f
    }

    pub fn bracket(&self, x: &DualElement, y: &DualElement) -> DualElement {
        let l = self.rank();
        let xs = x.support(l);
        let ys = y.support(l);
        let mut out = DualElement::zero(self);
        for (a, ca) in &xs {
            for (b, cb) in &ys {
                let prod = *ca * *cb;
                for (k, c) in self.basis_bracket(*a, *b) {
                    let term = prod.scale(&c);
                    let slot = if k < l {
                        &mut out.cartan[k]
                    } else {
                        &mut out.roots[k - l]
                    };
                    *slot = &*slot + &term;
                }
            }
        }
        out
    }

    /// `ad(x)^k v`.
    pub fn ad_power(&self, x: &DualElement, v: &DualElement, k: i64) -> Result<DualElement> {
        if k < 0 {
            return Err(Error::NegativePower(k));
        }
        let mut out = v.clone();
        for _ in 0..k {
            if out.is_zero() {
                break;
            }
            out = self.bracket(x, &out);
        }
        Ok(out)
    }

    /// Smallest `k` with `ad(x)^k v = 0`, searching up to `limit`.
    pub fn annihilating_power(
        &self,
        x: &DualElement,
        v: &DualElement,
        limit: usize,
    ) -> Option<usize> {
        let mut cur = v.clone();
        for k in 0..=limit {
            if cur.is_zero() {
                return Some(k);
            }
            cur = self.bracket(x, &cur);
        }
        None
    }

    /// `Σ_i c_i ϖ_i` as a Cartan element, using `ϖ_i = Σ_j (A⁻¹)[j][i] t_j`.
    pub fn embed_weight_vector(&self, coeffs: &[UPoly]) -> DualElement {
        let inv = inverse_cartan(&self.rd.datum.cartan);
        let mut out = DualElement::zero(self);
        for (i, c) in coeffs.iter().enumerate() {
            for j in 0..self.rank() {
                if !inv[j][i].is_zero() {
                    out.cartan[j] = &out.cartan[j] + &c.scale(&inv[j][i]);
                }
            }
        }
        out
    }

    /// Level map `X_{r−1} → X_r`: rows are coroots of height `r`, columns those
    /// of height `r − 1`, entry `(γ∨, γ∨ − α∨) = N_{−α∨, γ∨}`.
    pub fn build_mr(&self, r: i64) -> LevelMap {
        let level = |h: i64| -> Vec<Vec<i64>> {
            self.rd
                .positive_coroots()
                .iter()
                .filter(|v| v.iter().sum::<i64>() == h)
                .cloned()
                .collect()
        };
        let rows = level(r);
        let cols = level(r - 1);
        let matrix = rows
            .iter()
            .map(|g| {
                cols.iter()
                    .map(|c| {
                        let diff: Vec<i64> = g.iter().zip(c).map(|(a, b)| a - b).collect();
                        let simple = diff.iter().filter(|&&x| x == 1).count() == 1
                            && diff.iter().all(|&x| x == 0 || x == 1);
                        if simple {
                            rat(self.n(&Self::negate(&diff), g))
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        (rows, cols, matrix)
    }

    /// Rank of the level map at height `r`.
    pub fn mr_rank(&self, r: i64) -> usize {
        let (rows, cols, m) = self.build_mr(r);
        if rows.is_empty() || cols.is_empty() {
            return 0;
        }
        rref_rational(&m, cols.len()).rank()
    }
}

/// Rational inverse of a Cartan matrix.
pub fn inverse_cartan(a: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let aug: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = a[i].iter().map(|&x| rat(x)).collect();
            row.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            row
        })
        .collect();
    let r = rref_rational(&aug, 2 * n);
    r.rows.iter().map(|row| row[n..].to_vec()).collect()
}

struct Builder<'a> {
    roots: &'a [Vec<i64>],
    index: &'a HashMap<Vec<i64>, usize>,
    norms: &'a [i64],
    npos: usize,
    memo: HashMap<(usize, usize), i64>,
}

impl Builder<'_> {
    fn sum_index(&self, r: usize, s: usize) -> Option<usize> {
        let sum: Vec<i64> = self.roots[r]
            .iter()
            .zip(&self.roots[s])
            .map(|(a, b)| a + b)
            .collect();
        self.index.get(&sum).copied()
    }

    fn neg(&self, r: usize) -> usize {
        if r < self.npos {
            r + self.npos
        } else {
            r - self.npos
        }
    }

    fn is_pos(&self, r: usize) -> bool {
        r < self.npos
    }

    /// `N_{r,s}` with zero for non-roots.
    fn n_or_zero(&mut self, r: usize, s: usize) -> Result<i64> {
        if self.sum_index(r, s).is_some() {
            self.n(r, s)
        } else {
            Ok(0)
        }
    }

    fn n(&mut self, r: usize, s: usize) -> Result<i64> {
        if let Some(&v) = self.memo.get(&(r, s)) {
            return Ok(v);
        }
        let z = self
            .sum_index(r, s)
            .ok_or_else(|| inconsistency("structure constant requested for a non-root sum"))?;
        let value = match (self.is_pos(r), self.is_pos(s)) {
            (true, true) if r > s => -self.n(s, r)?,
            (true, true) => self.special(r, s, z)?,
            (false, false) => -self.n(self.neg(r), self.neg(s))?,
            (true, false) => self.mixed(r, s, z)?,
            (false, true) => -self.n(s, r)?,
        };
        self.memo.insert((r, s), value);
        Ok(value)
    }

    /// `r > 0 > s` with sum `z`.
    fn mixed(&mut self, r: usize, s: usize, z: usize) -> Result<i64> {
        let (nz, nr, ns) = (self.norms[z], self.norms[r], self.norms[s]);
        let ms = self.neg(s);
        let value = if self.is_pos(z) {
            // N_{ξ,η} = −|ζ|²/|ξ|² N_{−η,ζ}
            frac(-nz, nr) * rat(self.n(ms, z)?)
        } else {
            // N_{ξ,η} = |ζ|²/|η|² N_{−ζ,ξ}
            let mz = self.neg(z);
            frac(nz, ns) * rat(self.n(mz, r)?)
        };
        to_i64(&value).ok_or_else(|| inconsistency("non-integral structure constant"))
    }

    /// Positive special pair `r ≺ s` with sum `z`.
    fn special(&mut self, xi: usize, eta: usize, z: usize) -> Result<i64> {
        // extraspecial pair: smallest α with z − α a positive root
        let alpha = (0..self.npos)
            .find(|&a| {
                let diff: Vec<i64> = self.roots[z]
                    .iter()
                    .zip(&self.roots[a])
                    .map(|(x, y)| x - y)
                    .collect();
                self.index
                    .get(&diff)
                    .is_some_and(|&b| b < self.npos && a < b)
            })
            .expect("every non-simple positive root has an extraspecial pair");
        let beta_vec: Vec<i64> = self.roots[z]
            .iter()
            .zip(&self.roots[alpha])
            .map(|(x, y)| x - y)
            .collect();
        let beta = self.index[&beta_vec];
        let string_p = |b: &Builder<'_>| -> i64 {
            let mut p = 0;
            let mut v = b.roots[beta].clone();
            loop {
                for (x, y) in v.iter_mut().zip(&b.roots[alpha]) {
                    *x -= y;
                }
                if b.index.contains_key(&v) {
                    p += 1;
                } else {
                    return p;
                }
            }
        };
        let n_ab = string_p(self) + 1;
        if xi == alpha {
            return Ok(n_ab);
        }
        let (ma, mb) = (self.neg(alpha), self.neg(beta));
        let mut total = Rational::zero();
        // N_{η,−α} N_{ξ,−β} / |η−α|²
        if let Some(t) = self.sum_index(eta, ma) {
            let prod = self.n_or_zero(eta, ma)? * self.n_or_zero(xi, mb)?;
            total += frac(prod, self.norms[t]);
        }
        // N_{−α,ξ} N_{η,−β} / |ξ−α|²
        if let Some(t) = self.sum_index(ma, xi) {
            let prod = self.n_or_zero(ma, xi)? * self.n_or_zero(eta, mb)?;
            total += frac(prod, self.norms[t]);
        }
        let value = total * frac(self.norms[z], n_ab);
        to_i64(&value).ok_or_else(|| inconsistency("non-integral structure constant"))
    }
}

/// An element of `𝔤∨` with coefficients polynomial in the formal scalar `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualElement {
    pub cartan: Vec<UPoly>,
    pub roots: Vec<UPoly>,
}

impl DualElement {
    pub fn zero(cb: &ChevalleyBasis) -> Self {
        DualElement {
            cartan: vec![UPoly::zero(); cb.rank()],
            roots: vec![UPoly::zero(); cb.roots.len()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cartan.iter().chain(&self.roots).all(UPoly::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        DualElement {
            cartan: self.cartan.iter().map(|p| p.scale(c)).collect(),
            roots: self.roots.iter().map(|p| p.scale(c)).collect(),
        }
    }

    fn support(&self, l: usize) -> Vec<(usize, &UPoly)> {
        self.cartan
            .iter()
            .enumerate()
            .chain(self.roots.iter().enumerate().map(|(k, p)| (k + l, p)))
            .filter(|(_, p)| !p.is_zero())
            .collect()
    }
}

/// Which structure-constant identity an instance belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IdentityKind {
    Lowering,
    Raising,
    Orthogonal,
    Exchange,
    Triple,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityFailure {
    pub kind: IdentityKind,
    /// Simple indices involved (0-based) and the positive coroot.
    pub simple: Vec<usize>,
    pub gamma: Vec<i64>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct IdentityReport {
    pub checked: [usize; 5],
    pub failures: Vec<IdentityFailure>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the five Jacobi consequences relating structure constants at a
/// simple coroot `α∨` and a positive coroot `γ∨`.
pub fn verify_identities(cb: &ChevalleyBasis) -> IdentityReport {
    let l = cb.rank();
    let dat = &cb.rd.datum;
    let simple = |i: usize| -> Vec<i64> {
        let mut v = vec![0; l];
        v[i] = 1;
        v
    };
    let add = |a: &[i64], b: &[i64]| -> Vec<i64> { a.iter().zip(b).map(|(x, y)| x + y).collect() };
    let sub = |a: &[i64], b: &[i64]| -> Vec<i64> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
    let neg = |a: &[i64]| -> Vec<i64> { a.iter().map(|x| -x).collect() };
    let is_coroot = |v: &[i64]| cb.root_index(v).is_some();
    let mut rep = IdentityReport::default();
    let fail =
        |rep: &mut IdentityReport, kind, simple: Vec<usize>, gamma: &[i64], detail: String| {
            rep.failures.push(IdentityFailure {
                kind,
                simple,
                gamma: gamma.to_vec(),
                detail,
            });
        };
    for gamma in cb.rd.positive_coroots() {
        for a in 0..l {
            let av = simple(a);
            let pairing = dat.root_on_coroot(a, gamma);
            if pairing < 0 {
                rep.checked[0] += 1;
                let lhs = cb.n(&av, gamma) * cb.n(&neg(&av), &add(&av, gamma));
                if lhs != -pairing {
                    fail(
                        &mut rep,
                        IdentityKind::Lowering,
                        vec![a],
                        gamma,
                        format!("{lhs} != {}", -pairing),
                    );
                }
            } else if pairing > 0 && gamma != &av {
                rep.checked[1] += 1;
                let lhs = cb.n(&neg(&av), gamma) * cb.n(&av, &sub(gamma, &av));
                if lhs != pairing {
                    fail(
                        &mut rep,
                        IdentityKind::Raising,
                        vec![a],
                        gamma,
                        format!("{lhs} != {pairing}"),
                    );
                }
            } else if pairing == 0 {
                rep.checked[2] += 1;
                let nonzero = cb.n(&av, gamma) != 0 || cb.n(&neg(&av), gamma) != 0;
                if nonzero && !(cb.is_short(&av) && cb.is_short(gamma)) {
                    fail(
                        &mut rep,
                        IdentityKind::Orthogonal,
                        vec![a],
                        gamma,
                        "non-zero for a long coroot".into(),
                    );
                }
            }
            for b in 0..l {
                if a == b {
                    continue;
                }
                let bv = simple(b);
                if gamma != &bv {
                    rep.checked[3] += 1;
                    let lhs = cb.n(&av, gamma) * cb.n(&neg(&bv), &add(&av, gamma));
                    let rhs = cb.n(&neg(&bv), gamma) * cb.n(&av, &sub(gamma, &bv));
                    if lhs != rhs {
                        fail(
                            &mut rep,
                            IdentityKind::Exchange,
                            vec![a, b],
                            gamma,
                            format!("{lhs} != {rhs}"),
                        );
                    }
                }
                let ag = add(&av, gamma);
                if is_coroot(&ag) && !is_coroot(&add(&ag, &bv)) {
                    for d in 0..l {
                        let dv = simple(d);
                        if gamma == &dv {
                            continue;
                        }
                        rep.checked[4] += 1;
                        let gd = sub(gamma, &dv);
                        let lhs =
                            cb.n(&neg(&dv), gamma) * cb.n(&av, &gd) * cb.n(&bv, &add(&av, &gd));
                        let rhs = if d == b {
                            cb.n(&av, gamma) * dat.root_on_coroot(b, &ag)
                        } else {
                            0
                        };
                        if lhs != rhs {
                            fail(
                                &mut rep,
                                IdentityKind::Triple,
                                vec![a, b, d],
                                gamma,
                                format!("{lhs} != {rhs}"),
                            );
                        }
                    }
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cb(tag: &str) -> ChevalleyBasis {
        ChevalleyBasis::new(&RootData::from_type(tag.parse().unwrap())).unwrap()
    }

    #[test]
    fn jacobi_small_types() {
        for tag in ["A1", "A2", "B2", "G2", "A3", "B3", "C3"] {
            assert!(cb(tag).jacobi_failures().is_empty(), "{tag}");
        }
    }

    #[test]
    fn structure_constant_sizes() {
        for tag in ["A3", "D4"] {
            assert!(
                cb(tag).export_table().iter().all(|e| e.n.abs() == 1),
                "{tag}"
            );
        }
        let b2 = cb("B2");
        assert!(b2.export_table().iter().any(|e| e.n.abs() == 2));
        let g2 = cb("G2");
        assert!(g2.export_table().iter().any(|e| e.n.abs() == 3));
        for tag in ["B3", "C3", "F4", "G2"] {
            let c = cb(tag);
            for e in c.export_table() {
                assert_eq!(c.n(&e.gamma, &e.beta), -e.n);
                assert!((1..=3).contains(&e.n.abs()));
            }
        }
    }

    #[test]
    fn identities_hold() {
        for tag in ["A2", "B2", "A3", "B3", "C3", "D4"] {
            let rep = verify_identities(&cb(tag));
            assert!(rep.passed(), "{tag}: {:?}", rep.failures);
        }
    }

    #[test]
    fn inverse_cartan_a2() {
        let inv = inverse_cartan(&[vec![2, -1], vec![-1, 2]]);
        assert_eq!(inv[0][0], frac(2, 3));
        assert_eq!(inv[1][0], frac(1, 3));
    }

    #[test]
    fn sl2_nilpotency() {
        let c = cb("A1");
        let e = c.principal_e();
        let h = c.embed_weight_vector(&[UPoly::one()]);
        assert!(!c.ad_power(&e, &h, 1).unwrap().is_zero());
        assert!(c.ad_power(&e, &h, 2).unwrap().is_zero());
        assert!(c.ad_power(&e, &h, -1).is_err());
    }

    #[test]
    fn level_map_ranks() {
        for tag in ["A2", "B3", "C4", "F4", "G2"] {
            let c = cb(tag);
            let counts = c.rd.coroot_height_counts();
            for r in 2..=(counts.len() as i64 + 1) {
                let expected = counts.get(r as usize - 1).copied().unwrap_or(0);
                assert_eq!(c.mr_rank(r), expected, "{tag} r={r}");
            }
        }
    }
}
