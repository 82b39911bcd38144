//! The Zhelobenko monoid, realized as scalar classes of BGG words applied to
//! the divided gradient of the top invariant inside the coinvariant algebra.
//!
//! A word `A_{i_1}…A_{i_r} P_j` is written `i_1…i_r(j)` with 1-based letters;
//! its length counts the generator, so `ℓ(P_j) = 1`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_traits::Zero;
use serde::Serialize;

use crate::bgg::{bgg_apply, CoinvariantSpace, QClass};
use crate::chevalley::ChevalleyBasis;
use crate::error::{inconsistency, Error, Result};
use crate::poly::Poly;
use crate::rational::{rat, Rational};
use crate::rootsys::{CartanDatum, Family, RootData};
use crate::zhelobenko::{divided_gradient, leading_residuals};

/// A word `i_1…i_r(j)`: `letters` are the operators, leftmost applied last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MonoidWord {
    pub letters: Vec<usize>,
    pub generator: usize,
}

impl MonoidWord {
    pub fn generator(j: usize) -> Self {
        MonoidWord {
            letters: Vec::new(),
            generator: j,
        }
    }

    pub fn length(&self) -> usize {
        self.letters.len() + 1
    }

    /// `A_i` applied to this word.
    pub fn prepend(&self, i: usize) -> Self {
        let mut letters = Vec::with_capacity(self.letters.len() + 1);
        letters.push(i);
        letters.extend_from_slice(&self.letters);
        MonoidWord {
            letters,
            generator: self.generator,
        }
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.letters
            .iter()
            .copied()
            .chain([self.generator])
            .collect()
    }
}

impl std::fmt::Display for MonoidWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sep = if self.letters.iter().any(|&i| i >= 9) || self.generator >= 9 {
            ","
        } else {
            ""
        };
        let letters: Vec<String> = self.letters.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{}({})", letters.join(sep), self.generator + 1)
    }
}

#[derive(Debug, Clone)]
pub struct MonoidVertex {
    pub length: usize,
    /// Scalar-normalized class in `Q`.
    pub class: QClass,
    /// First word found by the breadth-first search.
    pub witness: MonoidWord,
    /// 0-based letters occurring in the witness, including the generator.
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonoidEdge {
    pub from: usize,
    pub letter: usize,
    pub to: usize,
}

/// Leveled graph of monoid elements with `A_i` edges.
#[derive(Debug, Clone)]
pub struct MonoidGraph {
    pub type_tag: String,
    pub rank: usize,
    pub vertices: Vec<MonoidVertex>,
    pub edges: Vec<MonoidEdge>,
    /// `levels[k]` holds the vertices of length `k + 1`.
    pub levels: Vec<Vec<usize>>,
    /// Vertex of each generator `P_j`.
    pub generators: Vec<usize>,
    next: HashMap<(usize, usize), usize>,
}

impl MonoidGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn level_counts(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    /// Target of `A_i` from a vertex, `None` if the image is zero.
    pub fn step(&self, v: usize, i: usize) -> Option<usize> {
        self.next.get(&(v, i)).copied()
    }

    /// Vertex of a word, `None` if it is zero.
    pub fn locate(&self, w: &MonoidWord) -> Option<usize> {
        let mut v = *self.generators.get(w.generator)?;
        for &i in w.letters.iter().rev() {
            v = self.step(v, i)?;
        }
        Some(v)
    }

    /// Vertices killed by every `A_i`.
    pub fn terminal_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| (0..self.rank).all(|i| self.step(v, i).is_none()))
            .collect()
    }

    /// Every non-zero word, grouped by vertex. Words are the paths from the
    /// generators, so the count grows quickly with the rank.
    pub fn all_words(&self) -> Vec<Vec<MonoidWord>> {
        let mut words: Vec<Vec<MonoidWord>> = vec![Vec::new(); self.vertices.len()];
        for (j, &v) in self.generators.iter().enumerate() {
            words[v].push(MonoidWord::generator(j));
        }
        for level in &self.levels {
            for &v in level {
                let here = words[v].clone();
                for i in 0..self.rank {
                    if let Some(t) = self.step(v, i) {
                        words[t].extend(here.iter().map(|w| w.prepend(i)));
                    }
                }
            }
        }
        for w in &mut words {
            w.sort();
        }
        words
    }
}

/// `P⁰_i = h_i⁻¹ ∂q/∂ϖ_i` for the top invariant, as classes in `Q`.
pub fn realize_p0(
    rd: &RootData,
    q_space: &CoinvariantSpace,
    top_invariant: &Poly,
) -> Result<Vec<QClass>> {
    let p0 = divided_gradient(&rd.datum, top_invariant)?;
    if let Some(((i, j), _)) = leading_residuals(&rd.datum, &p0).first() {
        return Err(inconsistency(format!(
            "divided gradient violates the top-degree relation at ({}, {})",
            i + 1,
            j + 1
        )));
    }
    let degree = top_invariant.degree().unwrap_or(0).saturating_sub(2);
    let classes: Vec<QClass> = p0.iter().map(|p| q_space.reduce(p, degree)).collect();
    if let Some(i) = classes.iter().position(QClass::is_zero) {
        return Err(inconsistency(format!(
            "P⁰_{} vanishes in the coinvariant algebra",
            i + 1
        )));
    }
    Ok(classes)
}

/// Breadth-first enumeration of scalar classes reachable from the `P⁰_j`.
pub fn enumerate_monoid(rd: &RootData, q_space: &CoinvariantSpace, p0: &[QClass]) -> MonoidGraph {
    let n = rd.rank();
    let mut vertices: Vec<MonoidVertex> = Vec::new();
    let mut edges = Vec::new();
    let mut next = HashMap::new();
    let mut generators = Vec::with_capacity(n);
    let mut index: HashMap<QClass, usize> = HashMap::new();
    let mut levels: Vec<Vec<usize>> = vec![Vec::new()];
    for (j, c) in p0.iter().enumerate() {
        let key = c.scalar_key();
        let v = *index.entry(key.clone()).or_insert_with(|| {
            let witness = MonoidWord::generator(j);
            vertices.push(MonoidVertex {
                length: 1,
                class: key,
                support: vec![j],
                witness,
            });
            levels[0].push(vertices.len() - 1);
            vertices.len() - 1
        });
        generators.push(v);
    }
    let mut depth = 0;
    while !levels[depth].is_empty() {
        let mut fresh = Vec::new();
        for &v in &levels[depth].clone() {
            for i in 0..n {
                let image = q_space.apply(i, &vertices[v].class);
                if image.is_zero() {
                    continue;
                }
                let key = image.scalar_key();
                let t = match index.get(&key) {
                    Some(&t) => t,
                    None => {
                        let witness = vertices[v].witness.prepend(i);
                        let support = witness.support().into_iter().collect();
                        vertices.push(MonoidVertex {
                            length: depth + 2,
                            class: key.clone(),
                            witness,
                            support,
                        });
                        index.insert(key, vertices.len() - 1);
                        fresh.push(vertices.len() - 1);
                        vertices.len() - 1
                    }
                };
                edges.push(MonoidEdge {
                    from: v,
                    letter: i,
                    to: t,
                });
                next.insert((v, i), t);
            }
        }
        levels.push(fresh);
        depth += 1;
    }
    levels.pop();
    MonoidGraph {
        type_tag: rd.datum.ty.to_string(),
        rank: n,
        vertices,
        edges,
        levels,
        generators,
        next,
    }
}

/// Consistency of the realization with the defining relations.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RelationReport {
    pub words: usize,
    /// Relation moves whose two sides landed on different vertices or zero.
    pub violations: Vec<(String, String)>,
    /// Vertices whose words fall into more than one class under the moves,
    /// with one representative per class.
    pub extra_identifications: Vec<Vec<String>>,
    /// Vertices whose words disagree on support or length.
    pub unstable_support: Vec<usize>,
}

impl RelationReport {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty() && self.unstable_support.is_empty()
    }
}

fn m_ij(a: &[Vec<i64>], i: usize, j: usize) -> i64 {
    a[i][j] * a[j][i]
}

/// Words related to `w` by one application of a relation: a braid move
/// inside the operator letters, or an exchange at the generator end.
fn relation_moves(a: &[Vec<i64>], w: &MonoidWord) -> Vec<MonoidWord> {
    let n = a.len();
    let mut out = Vec::new();
    let l = &w.letters;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let m = m_ij(a, i, j);
            if m > 3 {
                continue;
            }
            // braid: alternating i, j of length m + 2 equals the one starting with j
            let blen = (m + 2) as usize;
            let lhs: Vec<usize> = (0..blen).map(|k| if k % 2 == 0 { i } else { j }).collect();
            let rhs: Vec<usize> = (0..blen).map(|k| if k % 2 == 0 { j } else { i }).collect();
            if l.len() >= blen {
                for s in 0..=l.len() - blen {
                    if l[s..s + blen] == lhs[..] {
                        let mut letters = l.clone();
                        letters[s..s + blen].copy_from_slice(&rhs);
                        out.push(MonoidWord {
                            letters,
                            generator: w.generator,
                        });
                    }
                }
            }
            // tail: alternating letters of length m ending on the generator
            if m == 0 {
                continue;
            }
            let tlen = m as usize;
            // (…j i)(j) with the letters before (j) alternating and ending in i
            let tail_lhs: Vec<usize> = (0..tlen)
                .map(|k| if (tlen - k) % 2 == 1 { i } else { j })
                .collect();
            let tail_rhs: Vec<usize> = (0..tlen)
                .map(|k| if (tlen - k) % 2 == 1 { j } else { i })
                .collect();
            if w.generator == j && l.len() >= tlen && l[l.len() - tlen..] == tail_lhs[..] {
                let mut letters = l[..l.len() - tlen].to_vec();
                letters.extend_from_slice(&tail_rhs);
                out.push(MonoidWord {
                    letters,
                    generator: i,
                });
            }
        }
    }
    out
}

/// Checks the defining relations on the realization and reports
/// identifications that the relations do not explain.
pub fn check_relations(graph: &MonoidGraph, datum: &CartanDatum) -> RelationReport {
    let words = graph.all_words();
    let mut report = RelationReport {
        words: words.iter().map(Vec::len).sum(),
        ..Default::default()
    };
    for (v, ws) in words.iter().enumerate() {
        let supports: BTreeSet<Vec<usize>> = ws
            .iter()
            .map(|w| w.support().into_iter().collect())
            .collect();
        let lengths: BTreeSet<usize> = ws.iter().map(MonoidWord::length).collect();
        if supports.len() > 1 || lengths.len() > 1 {
            report.unstable_support.push(v);
        }
        let local: HashMap<&MonoidWord, usize> =
            ws.iter().enumerate().map(|(k, w)| (w, k)).collect();
        let mut parent: Vec<usize> = (0..ws.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let z = p[y];
                p[y] = r;
                y = z;
            }
            r
        }
        for (k, w) in ws.iter().enumerate() {
            for partner in relation_moves(&datum.cartan, w) {
                match local.get(&partner) {
                    Some(&k2) => {
                        let (a, b) = (find(&mut parent, k), find(&mut parent, k2));
                        parent[a] = b;
                    }
                    None => report.violations.push((w.to_string(), partner.to_string())),
                }
            }
        }
        let mut reps: Vec<String> = Vec::new();
        let mut seen = BTreeSet::new();
        for k in 0..ws.len() {
            if seen.insert(find(&mut parent, k)) {
                reps.push(ws[k].to_string());
            }
        }
        if reps.len() > 1 {
            report.extra_identifications.push(reps);
        }
    }
    report.violations.sort();
    report.violations.dedup();
    report
}

/// Classification of a pair `(α, γ∨)` of a simple root and a positive coroot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairKind {
    Good,
    StartingBad,
    /// Carries the companion simple root `β` with `β(γ∨) = 2`.
    IntermediateBad {
        companion: usize,
    },
    Neither,
}

fn add(a: &[i64], b: &[i64], k: i64) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + k * y).collect()
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn is_coroot(rd: &RootData, v: &[i64]) -> bool {
    let neg: Vec<i64> = v.iter().map(|c| -c).collect();
    rd.coroots.is_root(v) || rd.coroots.is_root(&neg)
}

pub fn classify_pair(rd: &RootData, alpha: usize, gamma: &[i64]) -> Result<PairKind> {
    if rd.datum.ty.is_g2() {
        return Err(Error::G2Unsupported("good/bad pair classification"));
    }
    let n = rd.rank();
    let pairing = rd.datum.root_on_coroot(alpha, gamma);
    if pairing == -1 {
        return Ok(PairKind::Good);
    }
    if pairing != -2 {
        return Ok(PairKind::Neither);
    }
    let top = add(gamma, &unit(n, alpha), 2);
    if !is_coroot(rd, &top) {
        return Ok(PairKind::Neither);
    }
    // α∨ must be the only simple coroot δ∨ with 2α∨ + γ∨ − δ∨ a coroot
    let deltas: Vec<usize> = (0..n)
        .filter(|&d| is_coroot(rd, &add(&top, &unit(n, d), -1)))
        .collect();
    if deltas != [alpha] {
        return Ok(PairKind::Neither);
    }
    if gamma.iter().sum::<i64>() == 1 {
        return Ok(PairKind::StartingBad);
    }
    let companion = (0..n).find(|&b| {
        b != alpha && rd.datum.cartan[alpha][b] != 0 && rd.datum.root_on_coroot(b, gamma) == 2
    });
    match companion {
        Some(companion) => Ok(PairKind::IntermediateBad { companion }),
        None => Err(inconsistency(format!(
            "intermediate bad pair ({}, {:?}) has no companion",
            alpha + 1,
            gamma
        ))),
    }
}

/// One step `γ∨ → γ∨ + α∨` (good) or `γ∨ → γ∨ + 2α∨` (bad) between
/// positive coroots, realized by the operator word `word` (leftmost last).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AscentStep {
    pub from: Vec<i64>,
    pub to: Vec<i64>,
    pub alpha: usize,
    pub kind: PairKind,
    pub word: Vec<usize>,
}

/// Every good and bad step between positive coroots, in height-then-lex
/// order of the source and then by simple root.
pub fn ascent_steps(rd: &RootData) -> Result<Vec<AscentStep>> {
    let n = rd.rank();
    let mut out = Vec::new();
    for gamma in rd.positive_coroots() {
        for alpha in 0..n {
            let kind = classify_pair(rd, alpha, gamma)?;
            let (to, word) = match kind {
                PairKind::Good => (add(gamma, &unit(n, alpha), 1), vec![alpha]),
                PairKind::StartingBad => {
                    let g = gamma.iter().position(|&c| c == 1).expect("simple coroot");
                    (add(gamma, &unit(n, alpha), 2), vec![g, alpha])
                }
                PairKind::IntermediateBad { companion } => {
                    (add(gamma, &unit(n, alpha), 2), vec![companion, alpha])
                }
                PairKind::Neither => continue,
            };
            out.push(AscentStep {
                from: gamma.clone(),
                to,
                alpha,
                kind,
                word,
            });
        }
    }
    Ok(out)
}

/// For each positive coroot, the first step reaching it from a lower one.
fn spanning_steps(rd: &RootData, steps: &[AscentStep]) -> Result<HashMap<Vec<i64>, AscentStep>> {
    let mut chosen: HashMap<Vec<i64>, AscentStep> = HashMap::new();
    for s in steps {
        chosen.entry(s.to.clone()).or_insert_with(|| s.clone());
    }
    for gamma in rd.positive_coroots() {
        if gamma.iter().sum::<i64>() > 1 && !chosen.contains_key(gamma) {
            return Err(inconsistency(format!(
                "coroot {gamma:?} is not reached by good or bad steps"
            )));
        }
    }
    Ok(chosen)
}

/// The injection of positive coroots into the monoid.
#[derive(Debug, Clone)]
pub struct PMap {
    /// Positive coroots in height-then-lex order.
    pub coroots: Vec<Vec<i64>>,
    pub vertex: Vec<usize>,
}

impl PMap {
    pub fn image_of(&self, gamma: &[i64]) -> Option<usize> {
        self.coroots
            .iter()
            .position(|c| c == gamma)
            .map(|k| self.vertex[k])
    }

    pub fn image_set(&self) -> BTreeSet<usize> {
        self.vertex.iter().copied().collect()
    }
}

fn apply_word(graph: &MonoidGraph, v: usize, word: &[usize]) -> Option<usize> {
    word.iter().rev().try_fold(v, |u, &i| graph.step(u, i))
}

pub fn pmap(rd: &RootData, graph: &MonoidGraph) -> Result<PMap> {
    let steps = ascent_steps(rd)?;
    let chosen = spanning_steps(rd, &steps)?;
    let coroots: Vec<Vec<i64>> = rd.positive_coroots().to_vec();
    let mut at: HashMap<Vec<i64>, usize> = HashMap::new();
    for gamma in &coroots {
        let v = if gamma.iter().sum::<i64>() == 1 {
            graph.generators[gamma.iter().position(|&c| c == 1).expect("simple")]
        } else {
            let s = &chosen[gamma];
            apply_word(graph, at[&s.from], &s.word).ok_or_else(|| {
                inconsistency(format!("step into {gamma:?} vanishes in the realization"))
            })?
        };
        at.insert(gamma.clone(), v);
    }
    let vertex = coroots.iter().map(|g| at[g]).collect();
    Ok(PMap { coroots, vertex })
}

/// Checks of the coroot map against the monoid.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PMapReport {
    pub injective: bool,
    /// Coroots whose image length differs from their height.
    pub length_failures: Vec<Vec<i64>>,
    /// Steps not mapping `𝒫(γ∨)` to `𝒫` of the target.
    pub step_failures: Vec<AscentStep>,
    /// Instances checked for the transport property (`α(γ∨) = −1` and
    /// `A_α 𝒫(γ∨)` in the image), and failures among them.
    pub transport_checked: usize,
    pub transport_failures: Vec<(usize, Vec<i64>)>,
    /// Failures of: `γ∨ ± α∨` both coroots ⇒ `A_α 𝒫(γ∨) = 𝒫(γ∨ + α∨)`;
    /// neither a coroot ⇒ `A_α 𝒫(γ∨) = 0`.
    pub orthogonal_failures: Vec<(usize, Vec<i64>)>,
}

impl PMapReport {
    pub fn passed(&self) -> bool {
        self.injective
            && self.length_failures.is_empty()
            && self.step_failures.is_empty()
            && self.transport_failures.is_empty()
            && self.orthogonal_failures.is_empty()
    }
}

pub fn check_pmap(rd: &RootData, graph: &MonoidGraph, map: &PMap) -> Result<PMapReport> {
    let n = rd.rank();
    let mut report = PMapReport {
        injective: map.image_set().len() == map.vertex.len(),
        ..Default::default()
    };
    let image: HashMap<usize, usize> = map
        .vertex
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, k))
        .collect();
    for (k, gamma) in map.coroots.iter().enumerate() {
        if graph.vertices[map.vertex[k]].length as i64 != rd.rho_pairing(gamma) {
            report.length_failures.push(gamma.clone());
        }
    }
    for s in ascent_steps(rd)? {
        let src = map.image_of(&s.from).expect("positive coroot");
        if apply_word(graph, src, &s.word) != map.image_of(&s.to) {
            report.step_failures.push(s);
        }
    }
    for (k, gamma) in map.coroots.iter().enumerate() {
        let v = map.vertex[k];
        for alpha in 0..n {
            let target = graph.step(v, alpha);
            let up = add(gamma, &unit(n, alpha), 1);
            let down = add(gamma, &unit(n, alpha), -1);
            if rd.datum.root_on_coroot(alpha, gamma) == -1 {
                if let Some(t) = target.filter(|t| image.contains_key(t)) {
                    report.transport_checked += 1;
                    if Some(t) != map.image_of(&up) {
                        report.transport_failures.push((alpha, gamma.clone()));
                    }
                }
            }
            let (up_ok, down_ok) = (
                rd.coroots.is_root(&up),
                is_coroot(rd, &down) && down.iter().any(|&c| c != 0),
            );
            let expected = match (up_ok, down_ok) {
                (true, true) => Some(map.image_of(&up)),
                (false, false) => Some(None),
                _ => None,
            };
            if let Some(e) = expected {
                if target != e {
                    report.orthogonal_failures.push((alpha, gamma.clone()));
                }
            }
        }
    }
    Ok(report)
}

/// Canonical words `[i,j]` and `[i,n,j]` of types `A`, `B`, `C` (1-based
/// arguments). `[i,j] = i i−1 … j+1 (j)`; `[i,n,j] = i … n−1 n n−1 … j+1 (j)`,
/// where the ascent stops at `n − 1` when `j = n`.
pub fn canonical_word(i: usize, j: usize, n: Option<usize>) -> MonoidWord {
    match n {
        None => MonoidWord {
            letters: (j + 1..=i).rev().map(|k| k - 1).collect(),
            generator: j - 1,
        },
        Some(n) => {
            let mut letters: Vec<usize> = if j == n {
                (i..n).collect()
            } else {
                (i..=n).collect()
            };
            letters.extend((j + 1..n).rev());
            MonoidWord {
                letters: letters.into_iter().map(|k| k - 1).collect(),
                generator: j - 1,
            }
        }
    }
}

/// Census of canonical forms in types `B_n`, `C_n`.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalCensus {
    /// Canonical words that vanish in the realization.
    pub zero: Vec<String>,
    /// Pairs of canonical words landing on the same vertex.
    pub collisions: Vec<(String, String)>,
    /// Vertices not reached by any canonical word.
    pub uncovered: Vec<String>,
}

impl CanonicalCensus {
    pub fn exact(&self) -> bool {
        self.zero.is_empty() && self.collisions.is_empty() && self.uncovered.is_empty()
    }
}

pub fn canonical_census(rd: &RootData, graph: &MonoidGraph) -> Result<CanonicalCensus> {
    let n = rd.rank();
    if !matches!(rd.datum.ty.family, Family::B | Family::C) {
        return Err(inconsistency(
            "canonical census is defined for types B and C",
        ));
    }
    let mut words = Vec::new();
    for i in 1..n {
        for j in 1..=i {
            words.push(canonical_word(i, j, None));
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            words.push(canonical_word(i, j, Some(n)));
        }
    }
    let mut census = CanonicalCensus {
        zero: Vec::new(),
        collisions: Vec::new(),
        uncovered: Vec::new(),
    };
    let mut hit: HashMap<usize, MonoidWord> = HashMap::new();
    for w in words {
        match graph.locate(&w) {
            None => census.zero.push(w.to_string()),
            Some(v) => {
                if let Some(prev) = hit.get(&v) {
                    census.collisions.push((prev.to_string(), w.to_string()));
                } else {
                    hit.insert(v, w);
                }
            }
        }
    }
    for (v, vert) in graph.vertices.iter().enumerate() {
        if !hit.contains_key(&v) {
            census.uncovered.push(vert.witness.to_string());
        }
    }
    Ok(census)
}

/// Polynomials `P_{γ∨}` for every positive coroot.
#[derive(Debug, Clone)]
pub struct PGammaTable {
    pub coroots: Vec<Vec<i64>>,
    pub polys: Vec<Poly>,
}

impl PGammaTable {
    pub fn get(&self, gamma: &[i64]) -> Option<&Poly> {
        self.coroots
            .iter()
            .position(|c| c == gamma)
            .map(|k| &self.polys[k])
    }
}

/// Which structure constants enter the step scalars and the sum recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Normalization {
    /// `N_{x,y}` of the Chevalley basis of `𝔤∨`.
    Chevalley,
    /// `N_{x,y} · |y|² / |x + y|²`, which agrees with `N` in simply-laced types.
    LengthWeighted,
}

/// Structure constant under the chosen normalization.
pub fn structure_constant(
    rd: &RootData,
    cb: &ChevalleyBasis,
    norm: Normalization,
    x: &[i64],
    y: &[i64],
) -> Rational {
    let base = rat(cb.n(x, y));
    match norm {
        Normalization::Chevalley => base,
        Normalization::LengthWeighted => {
            let sum = add(x, y, 1);
            if base == rat(0) {
                return base;
            }
            base * Rational::new(rd.coroot_norm(y).into(), rd.coroot_norm(&sum).into())
        }
    }
}

/// The scalar `λ` with `P_{target} = λ · A_word P_{source}` for a step.
fn step_scalar(
    rd: &RootData,
    cb: &ChevalleyBasis,
    norm: Normalization,
    s: &AscentStep,
) -> Rational {
    let n = rd.rank();
    let a = unit(n, s.alpha);
    let neg_a: Vec<i64> = a.iter().map(|c| -c).collect();
    let gamma = &s.from;
    let nc = |x: &[i64], y: &[i64]| structure_constant(rd, cb, norm, x, y);
    match s.kind {
        PairKind::Good => rat(1) / nc(&a, gamma),
        PairKind::StartingBad => {
            nc(&neg_a, &add(gamma, &a, 2))
                / (rat(rd.datum.root_on_coroot(s.alpha, gamma)) * nc(gamma, &a))
        }
        PairKind::IntermediateBad { companion } => {
            // the denominator constant is taken at 2α∨ + γ∨, as in the starting case
            nc(&neg_a, &add(gamma, &a, 2))
                / (rat(rd.datum.root_on_coroot(companion, &add(gamma, &a, 1))) * nc(&a, gamma))
        }
        PairKind::Neither => unreachable!("steps are good or bad"),
    }
}

/// Extends a tuple `(P_i)` to all positive coroots through good and bad
/// steps. Every available step into a coroot is evaluated; disagreement is
/// an error.
pub fn propagate_p(
    rd: &RootData,
    cb: &ChevalleyBasis,
    norm: Normalization,
    p: &[Poly],
) -> Result<PGammaTable> {
    let steps = ascent_steps(rd)?;
    let coroots: Vec<Vec<i64>> = rd.positive_coroots().to_vec();
    let mut value: HashMap<Vec<i64>, Poly> = HashMap::new();
    let mut incoming: HashMap<Vec<i64>, Vec<&AscentStep>> = HashMap::new();
    for s in &steps {
        incoming.entry(s.to.clone()).or_default().push(s);
    }
    for gamma in &coroots {
        if gamma.iter().sum::<i64>() == 1 {
            value.insert(
                gamma.clone(),
                p[gamma.iter().position(|&c| c == 1).expect("simple")].clone(),
            );
            continue;
        }
        let mut found: Option<Poly> = None;
        for s in incoming.get(gamma).map(Vec::as_slice).unwrap_or(&[]) {
            let mut f = value[&s.from].clone();
            for &i in s.word.iter().rev() {
                f = bgg_apply(&rd.datum.cartan, i, &f);
            }
            let candidate = f.scale(&step_scalar(rd, cb, norm, s));
            match &found {
                None => found = Some(candidate),
                Some(prev) if *prev == candidate => {}
                Some(_) => {
                    return Err(inconsistency(format!(
                        "paths into {gamma:?} disagree (step by α_{} from {:?})",
                        s.alpha + 1,
                        s.from
                    )))
                }
            }
        }
        let f = found.ok_or_else(|| inconsistency(format!("coroot {gamma:?} is not reached")))?;
        value.insert(gamma.clone(), f);
    }
    let polys = coroots.iter().map(|g| value[g].clone()).collect();
    Ok(PGammaTable { coroots, polys })
}

/// Outcome of the recurrence checks on a coroot table.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RecurrenceReport {
    pub checked: [usize; 3],
    /// Coroots where `(c + γ∨) P_{γ∨} = Σ_α N_{−α∨,γ∨} P_{γ∨−α∨}` fails,
    /// including failure of exact divisibility.
    pub sum_failures: Vec<Vec<i64>>,
    /// `(α, γ∨)` with `A_α P_{γ∨} ≠ 0` although it must vanish.
    pub vanishing_failures: Vec<(usize, Vec<i64>)>,
}

impl RecurrenceReport {
    pub fn passed(&self) -> bool {
        self.sum_failures.is_empty() && self.vanishing_failures.is_empty()
    }
}

/// `shift = 1` checks the full-solution recurrences; `shift = 0` checks the
/// leading-term versions.
pub fn check_recurrences(
    rd: &RootData,
    cb: &ChevalleyBasis,
    norm: Normalization,
    table: &PGammaTable,
    shift: i64,
) -> RecurrenceReport {
    let n = rd.rank();
    let mut report = RecurrenceReport::default();
    for (gamma, pg) in table.coroots.iter().zip(&table.polys) {
        if gamma.iter().sum::<i64>() > 1 {
            report.checked[0] += 1;
            let mut sum = Poly::zero(n);
            for alpha in 0..n {
                let lower = add(gamma, &unit(n, alpha), -1);
                if let Some(pl) = table.get(&lower) {
                    let neg_a: Vec<i64> = unit(n, alpha).iter().map(|c| -c).collect();
                    let c = structure_constant(rd, cb, norm, &neg_a, gamma);
                    if !c.is_zero() {
                        sum += &pl.scale(&c);
                    }
                }
            }
            let lin = Poly::linear(gamma, shift);
            let ok = match sum.div_exact(&lin) {
                Some(q) => q == *pg,
                None => false,
            };
            if !ok {
                report.sum_failures.push(gamma.clone());
            }
        }
        for alpha in 0..n {
            let pairing = rd.datum.root_on_coroot(alpha, gamma);
            let up_is_coroot = rd.coroots.is_root(&add(gamma, &unit(n, alpha), 1));
            let must_vanish = if shift == 0 {
                !up_is_coroot
            } else {
                pairing > 0 || (pairing == 0 && !up_is_coroot)
            };
            if must_vanish {
                let k = if shift == 0 || pairing > 0 { 1 } else { 2 };
                report.checked[k] += 1;
                if !bgg_apply(&rd.datum.cartan, alpha, pg).is_zero() {
                    report.vanishing_failures.push((alpha, gamma.clone()));
                }
            }
        }
    }
    report
}

/// Classes of the table entries in `Q` land on the `𝒫` image. Returns the
/// coroots where this fails.
pub fn table_matches_pmap(
    q_space: &CoinvariantSpace,
    graph: &MonoidGraph,
    map: &PMap,
    table: &PGammaTable,
) -> Vec<Vec<i64>> {
    let mut bad = Vec::new();
    for (k, gamma) in table.coroots.iter().enumerate() {
        let f = &table.polys[k];
        let class = match f.degree() {
            Some(d) => q_space.reduce(f, d),
            None => {
                bad.push(gamma.clone());
                continue;
            }
        };
        if class.is_zero() || class.scalar_key() != graph.vertices[map.vertex[k]].class {
            bad.push(gamma.clone());
        }
    }
    bad
}

/// One rank-2 closed form: the relation between `P_i`, `P_j` for an
/// adjacent or orthogonal pair, where `α_j∨` is the shorter coroot.
#[derive(Debug, Clone, Serialize)]
pub struct ClosedForm {
    pub i: usize,
    pub j: usize,
    pub m: i64,
    /// The stated identity holds exactly.
    pub holds: bool,
    /// `1` if the identity holds, `-1` if it holds with the right side
    /// negated, `0` otherwise.
    pub observed_sign: i8,
}

/// Checks the rank-2 closed forms for a solution tuple `P` (pairs with
/// `m_{ij} ≤ 3`).
pub fn check_closed_forms(rd: &RootData, p: &[Poly]) -> Vec<ClosedForm> {
    let n = rd.rank();
    let a = &rd.datum.cartan;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let m = m_ij(a, i, j);
            let (ni, nj) = (rd.coroot_norm(&unit(n, i)), rd.coroot_norm(&unit(n, j)));
            if nj > ni || (nj == ni && j < i && m != 0) {
                continue;
            }
            let lin = |ci: i64, cj: i64| {
                let mut c = vec![0; n];
                c[i] = ci;
                c[j] = cj;
                Poly::linear(&c, 1)
            };
            let word: Vec<usize> = match m {
                0 | 1 => vec![j],
                2 => vec![j, i],
                3 => vec![j, i, j, i],
                _ => continue,
            };
            let start = if m <= 1 { &p[i] } else { &p[j] };
            let mut lhs = start.clone();
            for &k in word.iter().rev() {
                lhs = bgg_apply(a, k, &lhs);
            }
            let (num, dens) = match m {
                0 => (Poly::zero(n), vec![]),
                1 => (&p[i] - &p[j], vec![lin(1, 1)]),
                2 => ((&p[i] - &p[j]).scale(&rat(2)), vec![lin(1, 1), lin(1, 2)]),
                _ => (
                    (&p[j] - &p[i]).scale(&rat(6)),
                    vec![lin(1, 1), lin(1, 2), lin(1, 3), lin(2, 3)],
                ),
            };
            let cleared = dens.iter().fold(lhs, |acc, d| &acc * d);
            let observed_sign = if cleared == num {
                1
            } else if cleared == -&num {
                -1
            } else {
                0
            };
            out.push(ClosedForm {
                i,
                j,
                m,
                holds: observed_sign == 1,
                observed_sign,
            });
        }
    }
    out
}

/// JSON census of the monoid.
#[derive(Debug, Clone, Serialize)]
pub struct CensusExport {
    #[serde(rename = "type")]
    pub ty: String,
    pub levels: Vec<usize>,
    pub vertices: Vec<CensusVertex>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusVertex {
    pub length: usize,
    /// 1-based letters.
    pub support: Vec<usize>,
    pub witness: String,
    pub in_p_image: bool,
}

pub fn census(graph: &MonoidGraph, map: Option<&PMap>) -> CensusExport {
    let image = map.map(PMap::image_set).unwrap_or_default();
    CensusExport {
        ty: graph.type_tag.clone(),
        levels: graph.level_counts(),
        vertices: graph
            .levels
            .iter()
            .flatten()
            .map(|&v| {
                let vert = &graph.vertices[v];
                CensusVertex {
                    length: vert.length,
                    support: vert.support.iter().map(|i| i + 1).collect(),
                    witness: vert.witness.to_string(),
                    in_p_image: image.contains(&v),
                }
            })
            .collect(),
    }
}

/// Graphviz rendering: one rank per level, edges labelled by letter,
/// vertices in the coroot image drawn as boxes.
pub fn export_dot(graph: &MonoidGraph, map: Option<&PMap>) -> String {
    let image = map.map(PMap::image_set).unwrap_or_default();
    let mut out = String::new();
    let _ = writeln!(out, "digraph zhelobenko_{} {{", graph.type_tag);
    let _ = writeln!(out, "  rankdir=BT;");
    let _ = writeln!(out, "  node [fontname=\"monospace\"];");
    for (k, level) in graph.levels.iter().enumerate() {
        let _ = writeln!(out, "  subgraph level_{} {{", k + 1);
        let _ = writeln!(out, "    rank=same;");
        for &v in level {
            let shape = if image.contains(&v) { "box" } else { "ellipse" };
            let _ = writeln!(
                out,
                "    v{v} [label=\"{}\", shape={shape}];",
                graph.vertices[v].witness
            );
        }
        let _ = writeln!(out, "  }}");
    }
    for e in &graph.edges {
        let _ = writeln!(
            out,
            "  v{} -> v{} [label=\"{}\"];",
            e.from,
            e.to,
            e.letter + 1
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bgg::invariant_generators;

    fn setup(tag: &str) -> (RootData, CoinvariantSpace, MonoidGraph) {
        let rd = RootData::from_type(tag.parse().unwrap());
        let gens = invariant_generators(&rd).unwrap();
        let top = gens.last().unwrap().clone();
        let q = CoinvariantSpace::new(&rd, gens);
        let p0 = realize_p0(&rd, &q, &top).unwrap();
        let g = enumerate_monoid(&rd, &q, &p0);
        (rd, q, g)
    }

    #[test]
    fn word_display() {
        assert_eq!(canonical_word(3, 1, None).to_string(), "32(1)");
        assert_eq!(canonical_word(1, 1, Some(3)).to_string(), "1232(1)");
        assert_eq!(canonical_word(2, 3, Some(3)).to_string(), "2(3)");
        assert_eq!(canonical_word(3, 2, Some(3)).to_string(), "3(2)");
        assert_eq!(canonical_word(3, 3, Some(3)).to_string(), "(3)");
    }

    #[test]
    fn a1_monoid_is_a_point() {
        let (_, _, g) = setup("A1");
        assert_eq!(g.level_counts(), vec![1]);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn simply_laced_levels_follow_heights() {
        for tag in ["A2", "A3", "D4"] {
            let (rd, _, g) = setup(tag);
            assert_eq!(g.level_counts(), rd.coroot_height_counts(), "{tag}");
            let map = pmap(&rd, &g).unwrap();
            assert!(check_pmap(&rd, &g, &map).unwrap().passed());
            assert_eq!(map.image_set().len(), g.len());
        }
    }

    #[test]
    fn b3_listing() {
        let (rd, _, g) = setup("B3");
        assert_eq!(g.level_counts(), vec![3, 3, 3, 2, 1]);
        let census = canonical_census(&rd, &g).unwrap();
        assert!(census.exact(), "{census:?}");
        let top = g.levels.last().unwrap()[0];
        assert_eq!(g.vertices[top].witness.to_string(), "1232(1)");
        // 1(2) and 2(1) coincide
        let w12 = MonoidWord {
            letters: vec![0],
            generator: 1,
        };
        let w21 = MonoidWord {
            letters: vec![1],
            generator: 0,
        };
        assert_eq!(g.locate(&w12), g.locate(&w21));
        let rel = check_relations(&g, &rd.datum);
        assert!(rel.consistent(), "{rel:?}");
    }

    #[test]
    fn pair_classes_in_small_types() {
        let rd = RootData::from_type("C3".parse().unwrap());
        let steps = ascent_steps(&rd).unwrap();
        let bad: Vec<_> = steps.iter().filter(|s| s.kind != PairKind::Good).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].kind, PairKind::StartingBad);
        assert_eq!(bad[0].alpha, 2);
        assert_eq!(bad[0].from, vec![0, 1, 0]);
        let rd = RootData::from_type("B3".parse().unwrap());
        let kinds: Vec<_> = ascent_steps(&rd)
            .unwrap()
            .into_iter()
            .filter(|s| s.kind != PairKind::Good)
            .collect();
        assert!(kinds
            .iter()
            .any(|s| matches!(s.kind, PairKind::IntermediateBad { companion: 1 })));
        let g2 = RootData::from_type("G2".parse().unwrap());
        assert!(classify_pair(&g2, 0, &[0, 1]).is_err());
    }

    #[test]
    fn recurrences_in_a2() {
        let (rd, _, _) = setup("A2");
        let cb = ChevalleyBasis::new(&rd).unwrap();
        let inv = invariant_generators(&rd).unwrap();
        let gens = crate::zhelobenko::solve_generators(&rd.datum, &inv).unwrap();
        let top = gens.last().unwrap();
        let table = propagate_p(&rd, &cb, Normalization::Chevalley, &top.invariant.big_p).unwrap();
        assert!(check_recurrences(&rd, &cb, Normalization::Chevalley, &table, 1).passed());
        let lead = propagate_p(&rd, &cb, Normalization::Chevalley, &top.leading).unwrap();
        assert!(check_recurrences(&rd, &cb, Normalization::Chevalley, &lead, 0).passed());
        // the all-ones solution sends the non-simple coroot to zero
        let ones = propagate_p(
            &rd,
            &cb,
            Normalization::Chevalley,
            &[Poly::one(2), Poly::one(2)],
        )
        .unwrap();
        assert!(ones.get(&[1, 1]).unwrap().is_zero());
    }

    #[test]
    fn dot_is_deterministic() {
        let (rd, _, g) = setup("B2");
        let map = pmap(&rd, &g).unwrap();
        let a = export_dot(&g, Some(&map));
        assert_eq!(a, export_dot(&g, Some(&map)));
        assert!(a.starts_with("digraph zhelobenko_B2 {"));
        assert_eq!(a.matches(" -> ").count(), g.edges.len());
    }
}
