//! Zhelobenko invariants in `𝔥 ⊗ S(𝔥)` for the adjoint module.
//!
//! An element `J = Σ_i ϖ_i ⊗ q_i` is stored as the tuple `(q_i)`. It is fixed
//! by every `ξ_i` exactly when each `q_i` is divisible by `h_i + 2` and the
//! tuple `P_i = θ⁻¹(q_i / (h_i + 2))` solves
//! `(1 + s_i(h_j)) A_i P_j = α_i(h_j) (P_i − P_j)` for all `i, j`.

use std::collections::VecDeque;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::bgg::{bgg_apply, products_of_degree};
use crate::error::{inconsistency, Result};
use crate::linalg::{exact_rref, solve};
use crate::poly::{weight_gradient, Monomial, Poly, RatFn};
use crate::rational::{rat, Rational};
use crate::rootsys::CartanDatum;

/// `Σ_i ϖ_i ⊗ q_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HTuple(pub Vec<Poly>);

impl HTuple {
    pub fn degree(&self) -> Option<u32> {
        self.0.iter().filter_map(Poly::degree).max()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Poly::is_zero)
    }
}

/// `s_i(h_j) = h_j − α_i(h_j) h_i`.
fn s_i_of_h_j(datum: &CartanDatum, i: usize, j: usize) -> Poly {
    let n = datum.rank();
    let mut coeffs = vec![0i64; n];
    coeffs[j] += 1;
    coeffs[i] -= datum.cartan[j][i];
    Poly::linear(&coeffs, 0)
}

/// `ξ_i` applied to `J`, returned in the `ϖ` basis.
///
/// Component `i` is `−(h_i + 2) s_i.q_i / h_i`; component `j ≠ i` is
/// `s_i.q_j − α_i(h_j)(h_i + 1) s_i.q_i / h_i`.
pub fn xi_apply(datum: &CartanDatum, i: usize, t: &HTuple) -> Vec<RatFn> {
    let (n, a) = (datum.rank(), &datum.cartan);
    let hi = Poly::var(n, i);
    let dot_qi = t.0[i].dot_reflect(a, i);
    (0..n)
        .map(|j| {
            let num = if j == i {
                -&(&Poly::linear(&unit(n, i), 2) * &dot_qi)
            } else {
                let own = &hi * &t.0[j].dot_reflect(a, i);
                let cross = (&Poly::linear(&unit(n, i), 1) * &dot_qi).scale(&rat(a[j][i]));
                &own - &cross
            };
            RatFn::new(num, vec![hi.clone()])
        })
        .collect()
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Residuals `h_i (ξ_i(J) − J)` as polynomial tuples, one per `i`.
pub fn xi_residuals(datum: &CartanDatum, t: &HTuple) -> Vec<Vec<Poly>> {
    let n = datum.rank();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let hi = Poly::var(n, i);
            xi_apply(datum, i, t)
                .iter()
                .zip(&t.0)
                .map(|(x, q)| {
                    // every component has denominator h_i, possibly cancelled
                    let lifted = match x.den.len() {
                        0 => &x.num * &hi,
                        _ => x.num.clone(),
                    };
                    &lifted - &(&hi * q)
                })
                .collect()
        })
        .collect()
}

/// Residuals of the cleared relation `(1 + s_i(h_j)) A_i P_j − α_i(h_j)(P_i − P_j)`.
pub fn relation_residuals(datum: &CartanDatum, p: &[Poly]) -> Vec<((usize, usize), Poly)> {
    let n = datum.rank();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    pairs
        .into_par_iter()
        .filter_map(|(i, j)| {
            let aip = bgg_apply(&datum.cartan, i, &p[j]);
            let lhs = &(&Poly::one(n) + &s_i_of_h_j(datum, i, j)) * &aip;
            let rhs = (&p[i] - &p[j]).scale(&rat(datum.cartan[j][i]));
            let r = &lhs - &rhs;
            (!r.is_zero()).then_some(((i, j), r))
        })
        .collect()
}

/// Residuals of the top-degree relation `s_i(h_j) A_i P⁰_j − α_i(h_j)(P⁰_i − P⁰_j)`.
pub fn leading_residuals(datum: &CartanDatum, p0: &[Poly]) -> Vec<((usize, usize), Poly)> {
    let n = datum.rank();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let lhs = &s_i_of_h_j(datum, i, j) * &bgg_apply(&datum.cartan, i, &p0[j]);
            let rhs = (&p0[i] - &p0[j]).scale(&rat(datum.cartan[j][i]));
            let r = &lhs - &rhs;
            if !r.is_zero() {
                out.push(((i, j), r));
            }
        }
    }
    out
}

/// Outcome of the two invariance tests.
#[derive(Debug, Clone)]
pub struct InvarianceReport {
    /// `ξ_i(J) = J` for every `i`.
    pub fixed_point: bool,
    /// Divisibility by `h_i + 2` and the cleared relation for the extracted `P`.
    pub relation: bool,
    /// Indices `i` where the fixed-point test failed.
    pub failing: Vec<usize>,
}

impl InvarianceReport {
    pub fn invariant(&self) -> bool {
        self.fixed_point && self.relation
    }
}

/// Extracts `P_i = θ⁻¹(q_i / (h_i + 2))`, if every division is exact.
pub fn extract_p(t: &HTuple) -> Option<Vec<Poly>> {
    let n = t.0.len();
    t.0.iter()
        .enumerate()
        .map(|(i, q)| {
            q.div_exact(&Poly::linear(&unit(n, i), 2))
                .map(|p| p.theta_inv())
        })
        .collect()
}

/// Tests invariance both through the `ξ_i` action and through the relation
/// on the extracted tuple. Disagreement is an internal inconsistency.
pub fn check_invariant(datum: &CartanDatum, t: &HTuple) -> Result<InvarianceReport> {
    let residuals = xi_residuals(datum, t);
    let failing: Vec<usize> = residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| r.iter().any(|p| !p.is_zero()))
        .map(|(i, _)| i)
        .collect();
    let fixed_point = failing.is_empty();
    let relation = match extract_p(t) {
        Some(p) => relation_residuals(datum, &p).is_empty(),
        None => false,
    };
    if fixed_point != relation {
        return Err(inconsistency(format!(
            "fixed-point test says {fixed_point}, relation test says {relation}"
        )));
    }
    Ok(InvarianceReport {
        fixed_point,
        relation,
        failing,
    })
}

/// A Zhelobenko invariant with its derived tuples.
#[derive(Debug, Clone)]
pub struct ZheloInvariant {
    /// Degree `m` of the `q_i`.
    pub degree: u32,
    pub q: HTuple,
    /// `p_i = q_i / (h_i + 2)`.
    pub p: Vec<Poly>,
    /// `P_i = θ⁻¹(p_i)`.
    pub big_p: Vec<Poly>,
}

/// Builds `q_i = (h_i + 2) θ(P_i)` from a tuple solving the relation.
pub fn assemble_invariant(datum: &CartanDatum, big_p: &[Poly]) -> Result<ZheloInvariant> {
    let bad = relation_residuals(datum, big_p);
    if let Some(((i, j), _)) = bad.first() {
        return Err(inconsistency(format!(
            "relation fails at (i, j) = ({}, {})",
            i + 1,
            j + 1
        )));
    }
    let n = datum.rank();
    let p: Vec<Poly> = big_p.iter().map(Poly::theta).collect();
    let q: Vec<Poly> = p
        .iter()
        .enumerate()
        .map(|(i, pi)| &Poly::linear(&unit(n, i), 2) * pi)
        .collect();
    let q = HTuple(q);
    let degree = q.degree().unwrap_or(0);
    Ok(ZheloInvariant {
        degree,
        q,
        p,
        big_p: big_p.to_vec(),
    })
}

/// A free generator of the invariants, tied to the invariant polynomial
/// whose divided gradient is its leading term.
#[derive(Debug, Clone)]
pub struct ZheloGenerator {
    /// The exponent `m`; `P` has degree `m − 1` and `q` degree `m`.
    pub m: u32,
    /// Index of the invariant polynomial used (degree `m + 1`).
    pub source: usize,
    /// Leading terms `P⁰_i = c_i / h_i` with `c` the invariant gradient.
    pub leading: Vec<Poly>,
    pub invariant: ZheloInvariant,
}

/// `P⁰_i = c_i / h_i` for a homogeneous invariant `q`.
pub fn divided_gradient(datum: &CartanDatum, q: &Poly) -> Result<Vec<Poly>> {
    weight_gradient(datum, q)
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            c.div_var(i).ok_or_else(|| {
                inconsistency(format!(
                    "gradient component {} is not divisible by h_{}",
                    i + 1,
                    i + 1
                ))
            })
        })
        .collect()
}

/// An affine expression `constant + Σ_m u_m · coeffs[m]` in unknown scalars `u`.
#[derive(Debug, Clone)]
struct Affine {
    constant: Poly,
    coeffs: Vec<Poly>,
}

impl Affine {
    fn map(&self, f: impl Fn(&Poly) -> Poly + Sync) -> Affine {
        Affine {
            constant: f(&self.constant),
            coeffs: self.coeffs.par_iter().map(&f).collect(),
        }
    }

    fn combine(&self, other: &Affine, f: impl Fn(&Poly, &Poly) -> Poly + Sync) -> Affine {
        Affine {
            constant: f(&self.constant, &other.constant),
            coeffs: self
                .coeffs
                .par_iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    fn evaluate(&self, u: &[Rational]) -> Poly {
        let mut out = self.constant.clone();
        for (c, p) in u.iter().zip(&self.coeffs) {
            if !c.is_zero() {
                out += &p.scale(c);
            }
        }
        out
    }

    /// Rows `coefficient(monomial) of Σ u_m coeffs[m] = −coefficient(monomial) of constant`.
    fn rows(&self, monos: &[Monomial]) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        let a = monos
            .iter()
            .map(|m| self.coeffs.iter().map(|p| p.coeff(m)).collect())
            .collect();
        let b = monos.iter().map(|m| -self.constant.coeff(m)).collect();
        (a, b)
    }
}

/// Breadth-first spanning tree of the Dynkin diagram rooted at node 0:
/// `(child, parent)` in visiting order.
fn dynkin_tree(datum: &CartanDatum) -> Vec<(usize, usize)> {
    let n = datum.rank();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    let mut edges = Vec::new();
    while let Some(p) = queue.pop_front() {
        for c in 0..n {
            if !seen[c] && datum.cartan[p][c] != 0 {
                seen[c] = true;
                edges.push((c, p));
                queue.push_back(c);
            }
        }
    }
    edges
}

/// Linear system for the degree-`d` layer `X` of a solution, given the layer
/// above. Returns the affine parametrisation of `X` by the coefficients of
/// `X_1`, and the residual equations.
fn layer_system(
    datum: &CartanDatum,
    d: u32,
    above: &[Poly],
) -> (Vec<Affine>, Vec<Vec<Rational>>, Vec<Rational>) {
    let n = datum.rank();
    let a = &datum.cartan;
    let monos = Monomial::all_of_degree(n, d);
    let mut xs: Vec<Option<Affine>> = vec![None; n];
    xs[0] = Some(Affine {
        constant: Poly::zero(n),
        coeffs: monos
            .iter()
            .map(|m| Poly::monomial(n, *m, Rational::from_integer(1.into())))
            .collect(),
    });
    let tree = dynkin_tree(datum);
    for &(c, p) in &tree {
        // X_c = X_p + (s_c(h_p) A_c X_p + A_c X_p^{above}) / α_c(h_p)
        let xp = xs[p].as_ref().expect("parent visited first");
        let s = s_i_of_h_j(datum, c, p);
        let inv = Rational::new(1.into(), a[p][c].into());
        let mut xc = xp.map(|q| q + &(&s * &bgg_apply(a, c, q)).scale(&inv));
        xc.constant += &bgg_apply(a, c, &above[p]).scale(&inv);
        xs[c] = Some(xc);
    }
    let xs: Vec<Affine> = xs
        .into_iter()
        .map(|x| x.expect("Dynkin diagram is connected"))
        .collect();
    let used: Vec<(usize, usize)> = tree.clone();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let lower = if d > 0 {
        Monomial::all_of_degree(n, d - 1)
    } else {
        Vec::new()
    };
    for i in 0..n {
        for j in 0..n {
            if used.contains(&(i, j)) {
                continue;
            }
            if i == j {
                if d == 0 {
                    continue;
                }
                let e = xs[i].map(|q| bgg_apply(a, i, q));
                let (r, b) = e.rows(&lower);
                rows.extend(r);
                rhs.extend(b);
                continue;
            }
            let s = s_i_of_h_j(datum, i, j);
            let aij = rat(a[j][i]);
            let left = xs[j].map(|q| &s * &bgg_apply(a, i, q));
            let diff = xs[i].combine(&xs[j], |x, y| (x - y).scale(&aij));
            let mut e = left.combine(&diff, |x, y| x - y);
            e.constant += &bgg_apply(a, i, &above[j]);
            let (r, b) = e.rows(&monos);
            rows.extend(r);
            rhs.extend(b);
        }
    }
    (xs, rows, rhs)
}

/// Continues a top-degree tuple `P⁰` (degree `m − 1`, solving the
/// top-degree relation) to a full solution of the cleared relation, one
/// homogeneous layer at a time, with every free coordinate set to zero.
pub fn complete_solution(datum: &CartanDatum, leading: &[Poly]) -> Result<Vec<Poly>> {
    if !leading_residuals(datum, leading).is_empty() {
        return Err(inconsistency(
            "leading terms do not solve the top-degree relation",
        ));
    }
    let top = leading.iter().filter_map(Poly::degree).max().unwrap_or(0);
    let mut total: Vec<Poly> = leading.to_vec();
    let mut above: Vec<Poly> = leading.to_vec();
    for d in (0..top).rev() {
        let (xs, rows, rhs) = layer_system(datum, d, &above);
        let ncols = xs[0].coeffs.len();
        let u = solve(&rows, &rhs, ncols)
            .ok_or_else(|| inconsistency(format!("no degree-{d} layer continues the solution")))?;
        let layer: Vec<Poly> = xs.iter().map(|x| x.evaluate(&u)).collect();
        for (t, l) in total.iter_mut().zip(&layer) {
            *t += l;
        }
        above = layer;
    }
    Ok(total)
}

/// Dimension of the space of homogeneous degree-`d` solutions of the
/// top-degree relation.
pub fn leading_solution_dim(datum: &CartanDatum, d: u32) -> usize {
    let n = datum.rank();
    let zero = vec![Poly::zero(n); n];
    let (xs, rows, _) = layer_system(datum, d, &zero);
    let ncols = xs[0].coeffs.len();
    if rows.is_empty() {
        return ncols;
    }
    ncols - exact_rref(&rows, ncols).rank()
}

/// Dimension of the degree-`d` part of the `S(𝔥)^W`-span of the given
/// leading tuples.
pub fn decomposable_dim(
    datum: &CartanDatum,
    invariants: &[Poly],
    leading: &[Vec<Poly>],
    d: u32,
) -> usize {
    let n = datum.rank();
    let monos = Monomial::all_of_degree(n, d);
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for tuple in leading {
        let e = tuple.iter().filter_map(Poly::degree).max().unwrap_or(0);
        if e > d {
            continue;
        }
        let multipliers = if e == d {
            vec![Poly::one(n)]
        } else {
            products_of_degree(invariants, d - e)
        };
        for f in multipliers {
            let mut row = Vec::with_capacity(n * monos.len());
            for p in tuple {
                row.extend((&f * p).coords(&monos));
            }
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return 0;
    }
    exact_rref(&rows, n * monos.len()).rank()
}

/// One generator per invariant polynomial: the leading tuple is the divided
/// gradient of the invariant of degree `m + 1`.
pub fn solve_generators(datum: &CartanDatum, invariants: &[Poly]) -> Result<Vec<ZheloGenerator>> {
    invariants
        .par_iter()
        .enumerate()
        .map(|(k, q)| {
            let m = q.degree().unwrap_or(0) - 1;
            let leading = divided_gradient(datum, q)?;
            let big_p = complete_solution(datum, &leading)?;
            let invariant = assemble_invariant(datum, &big_p)?;
            Ok(ZheloGenerator {
                m,
                source: k,
                leading,
                invariant,
            })
        })
        .collect()
}

/// Per-degree count of new generators among homogeneous leading tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreenessRow {
    /// Degree of the leading tuple `P⁰` (one less than the exponent).
    pub degree: u32,
    pub solutions: usize,
    pub decomposable: usize,
}

impl FreenessRow {
    pub fn new_generators(&self) -> usize {
        self.solutions - self.decomposable
    }
}

/// For each degree below the top exponent, the dimension of top-degree
/// solutions against the span of lower generators times invariants.
pub fn freeness_table(
    datum: &CartanDatum,
    invariants: &[Poly],
    generators: &[ZheloGenerator],
) -> Vec<FreenessRow> {
    let top = generators.iter().map(|g| g.m).max().unwrap_or(0);
    (0..top)
        .map(|d| {
            let lower: Vec<Vec<Poly>> = generators
                .iter()
                .filter(|g| g.m - 1 < d)
                .map(|g| g.leading.clone())
                .collect();
            FreenessRow {
                degree: d,
                solutions: leading_solution_dim(datum, d),
                decomposable: decomposable_dim(datum, invariants, &lower, d),
            }
        })
        .collect()
}

/// JSON form of a generator.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorExport {
    #[serde(rename = "type")]
    pub ty: String,
    pub degree: u32,
    pub q: Vec<String>,
    #[serde(rename = "P")]
    pub big_p: Vec<String>,
}

impl ZheloGenerator {
    pub fn export(&self, ty: &str) -> GeneratorExport {
        GeneratorExport {
            ty: ty.to_string(),
            degree: self.m,
            q: self.invariant.q.0.iter().map(ToString::to_string).collect(),
            big_p: self
                .invariant
                .big_p
                .iter()
                .map(ToString::to_string)
                .collect(),
        }
    }
}
