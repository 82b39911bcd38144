//! Cartan data, root and coroot systems, and the Weyl group.
//!
//! Convention used throughout the crate: `cartan[i][j] = α_j(h_i)`, the value
//! of the simple root `α_j` on the simple coroot `h_i = α_i∨`. Coroot vectors
//! carry coordinates in the basis `h_1..h_ℓ`; root vectors in `α_1..α_ℓ`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }
}

/// A type tag such as `A3` or `F4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CartanType {
    pub family: Family,
    pub rank: usize,
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(CartanType { family, rank })
        } else {
            Err(Error::UnknownType(format!("{}{}", family.letter(), rank)))
        }
    }

    pub fn is_g2(&self) -> bool {
        self.family == Family::G
    }

    pub fn is_simply_laced(&self) -> bool {
        matches!(self.family, Family::A | Family::D | Family::E)
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for CartanType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tag = s.trim();
        let mut chars = tag.chars();
        let letter = chars
            .next()
            .ok_or_else(|| Error::UnknownType(s.to_string()))?;
        let family = match letter.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return Err(Error::UnknownType(s.to_string())),
        };
        let digits = chars.as_str();
        if digits.is_empty() || digits.len() > 3 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::UnknownType(s.to_string()));
        }
        let rank: usize = digits
            .parse()
            .map_err(|_| Error::UnknownType(s.to_string()))?;
        CartanType::new(family, rank).map_err(|_| Error::UnknownType(s.to_string()))
    }
}

/// Cartan matrix together with its symmetrizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanDatum {
    pub ty: CartanType,
    pub cartan: Vec<Vec<i64>>,
    pub symmetrizer: Vec<i64>,
}

fn chain(rank: usize) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0i64; rank]; rank];
    for i in 0..rank {
        a[i][i] = 2;
        if i + 1 < rank {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    }
    a
}

impl CartanDatum {
    /// Builds the Cartan datum for a type tag. B and C follow Bourbaki with
    /// `α_n` of distinct length; F4 is labelled in reverse so that `α_1, α_2`
    /// are short roots (long coroots).
    pub fn new(ty: CartanType) -> Self {
        let n = ty.rank;
        let a = match ty.family {
            Family::A => chain(n),
            Family::B => {
                let mut a = chain(n);
                a[n - 1][n - 2] = -2;
                a
            }
            Family::C => {
                let mut a = chain(n);
                a[n - 2][n - 1] = -2;
                a
            }
            Family::D => {
                let mut a = chain(n);
                // nodes n-2 and n-1 (0-based) both hang off node n-3
                a[n - 2][n - 1] = 0;
                a[n - 1][n - 2] = 0;
                a[n - 3][n - 1] = -1;
                a[n - 1][n - 3] = -1;
                a
            }
            Family::E => {
                // Bourbaki: 1-3-4-5-...-n chain, 2 attached to 4
                let mut a = vec![vec![0i64; n]; n];
                for (i, row) in a.iter_mut().enumerate() {
                    row[i] = 2;
                }
                let mut link = |i: usize, j: usize| {
                    a[i][j] = -1;
                    a[j][i] = -1;
                };
                link(0, 2);
                link(1, 3);
                for k in 2..n - 1 {
                    link(k, k + 1);
                }
                a
            }
            Family::F => {
                let mut a = chain(4);
                a[1][2] = -2;
                a
            }
            Family::G => vec![vec![2, -3], vec![-1, 2]],
        };
        Self::from_matrix(ty, a).expect("built-in Cartan matrices are valid")
    }

    /// Validates an arbitrary matrix against the Cartan axioms and computes
    /// its symmetrizer.
    pub fn from_matrix(ty: CartanType, cartan: Vec<Vec<i64>>) -> Result<Self> {
        let n = cartan.len();
        if n == 0 || n != ty.rank || cartan.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidCartan(format!(
                "expected a {0}x{0} matrix",
                ty.rank
            )));
        }
        for i in 0..n {
            if cartan[i][i] != 2 {
                return Err(Error::InvalidCartan(format!(
                    "diagonal entry {i} is {}",
                    cartan[i][i]
                )));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if cartan[i][j] > 0 {
                    return Err(Error::InvalidCartan(format!("entry ({i},{j}) is positive")));
                }
                if (cartan[i][j] == 0) != (cartan[j][i] == 0) {
                    return Err(Error::InvalidCartan(format!(
                        "entries ({i},{j}) and ({j},{i}) disagree on zero"
                    )));
                }
            }
        }
        // symmetrizer by walking the (connected) Dynkin diagram
        let mut num = vec![0i64; n];
        let mut den = vec![0i64; n];
        num[0] = 1;
        den[0] = 1;
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if j != i && cartan[i][j] != 0 && den[j] == 0 {
                    // d_j = d_i a_ij / a_ji
                    num[j] = num[i] * cartan[i][j];
                    den[j] = den[i] * cartan[j][i];
                    let g = num_integer::gcd(num[j], den[j]);
                    num[j] /= g;
                    den[j] /= g;
                    if den[j] < 0 {
                        num[j] = -num[j];
                        den[j] = -den[j];
                    }
                    queue.push_back(j);
                }
            }
        }
        if den.contains(&0) {
            return Err(Error::InvalidCartan(
                "Dynkin diagram is not connected".into(),
            ));
        }
        let lcm = den.iter().fold(1i64, |acc, &d| num_integer::lcm(acc, d));
        let mut sym: Vec<i64> = (0..n).map(|i| num[i] * (lcm / den[i])).collect();
        let g = sym.iter().fold(0i64, |acc, &d| num_integer::gcd(acc, d));
        for d in &mut sym {
            *d /= g;
        }
        if sym.iter().any(|&d| d <= 0) {
            return Err(Error::InvalidCartan(
                "matrix is not symmetrizable with positive weights".into(),
            ));
        }
        for i in 0..n {
            for j in 0..n {
                if sym[i] * cartan[i][j] != sym[j] * cartan[j][i] {
                    return Err(Error::InvalidCartan("matrix is not symmetrizable".into()));
                }
            }
        }
        Ok(CartanDatum {
            ty,
            cartan,
            symmetrizer: sym,
        })
    }

    pub fn rank(&self) -> usize {
        self.ty.rank
    }

    /// The datum of the Langlands dual: the transposed matrix.
    pub fn transpose_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        (0..n)
            .map(|i| (0..n).map(|j| self.cartan[j][i]).collect())
            .collect()
    }

    /// `α_i(γ∨)` for a coroot vector given in simple-coroot coordinates.
    pub fn root_on_coroot(&self, i: usize, coroot: &[i64]) -> i64 {
        coroot
            .iter()
            .enumerate()
            .map(|(k, c)| c * self.cartan[k][i])
            .sum()
    }

    /// `λ(h_i)` for a root-lattice vector in simple-root coordinates.
    pub fn coroot_on_root(&self, i: usize, root: &[i64]) -> i64 {
        root.iter()
            .enumerate()
            .map(|(k, c)| c * self.cartan[i][k])
            .sum()
    }
}

/// Which lattice a vector lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lattice {
    Root,
    Coroot,
}

/// A vector of the root or coroot lattice in simple coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVec {
    pub coeffs: Vec<i64>,
    pub kind: Lattice,
}

impl LatticeVec {
    pub fn coroot(coeffs: Vec<i64>) -> Self {
        LatticeVec {
            coeffs,
            kind: Lattice::Coroot,
        }
    }

    pub fn root(coeffs: Vec<i64>) -> Self {
        LatticeVec {
            coeffs,
            kind: Lattice::Root,
        }
    }

    pub fn simple(kind: Lattice, rank: usize, i: usize) -> Self {
        let mut coeffs = vec![0; rank];
        coeffs[i] = 1;
        LatticeVec { coeffs, kind }
    }

    /// Sum of the coefficients (the height for positive vectors).
    pub fn height(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0) && self.coeffs.iter().any(|&c| c > 0)
    }

    pub fn is_negative(&self) -> bool {
        self.coeffs.iter().all(|&c| c <= 0) && self.coeffs.iter().any(|&c| c < 0)
    }
}

impl fmt::Display for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.kind {
            Lattice::Root => "a",
            Lattice::Coroot => "h",
        };
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c < 0 {
                write!(f, "{}", if first { "-" } else { " - " })?;
            } else if !first {
                write!(f, " + ")?;
            }
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            write!(f, "{}{}", prefix, i + 1)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Positive roots of the root system attached to a Cartan matrix, with
/// `cartan[i][j] = <α_j, α_i∨>`. Roots are in simple-root coordinates,
/// sorted by height and then lexicographically.
#[derive(Debug, Clone)]
pub struct RootSystem {
    cartan: Vec<Vec<i64>>,
    positive: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
}

impl RootSystem {
    pub fn new(cartan: &[Vec<i64>]) -> Self {
        let n = cartan.len();
        let pairing = |root: &[i64], i: usize| -> i64 {
            root.iter().enumerate().map(|(k, c)| c * cartan[i][k]).sum()
        };
        let mut positive: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut v = vec![0; n];
                v[i] = 1;
                v
            })
            .collect();
        let mut known: HashMap<Vec<i64>, usize> = positive
            .iter()
            .cloned()
            .enumerate()
            .map(|(k, v)| (v, k))
            .collect();
        let mut layer: Vec<Vec<i64>> = positive.clone();
        while !layer.is_empty() {
            let mut next: Vec<Vec<i64>> = Vec::new();
            for beta in &layer {
                for i in 0..n {
                    // p = largest p with beta - p α_i a root
                    let mut p = 0;
                    let mut down = beta.clone();
                    loop {
                        down[i] -= 1;
                        if known.contains_key(&down) {
                            p += 1;
                        } else {
                            break;
                        }
                    }
                    let q = p - pairing(beta, i);
                    if q > 0 {
                        let mut up = beta.clone();
                        up[i] += 1;
                        if !known.contains_key(&up) && !next.contains(&up) {
                            next.push(up);
                        }
                    }
                }
            }
            for v in &next {
                known.insert(v.clone(), usize::MAX);
            }
            positive.extend(next.iter().cloned());
            layer = next;
        }
        positive.sort_by(|a, b| {
            let ha: i64 = a.iter().sum();
            let hb: i64 = b.iter().sum();
            ha.cmp(&hb).then_with(|| a.cmp(b))
        });
        let index = positive
            .iter()
            .cloned()
            .enumerate()
            .map(|(k, v)| (v, k))
            .collect();
        RootSystem {
            cartan: cartan.to_vec(),
            positive,
            index,
        }
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn positive(&self) -> &[Vec<i64>] {
        &self.positive
    }

    pub fn num_positive(&self) -> usize {
        self.positive.len()
    }

    pub fn index_of(&self, v: &[i64]) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn is_root(&self, v: &[i64]) -> bool {
        if self.index.contains_key(v) {
            return true;
        }
        let neg: Vec<i64> = v.iter().map(|c| -c).collect();
        self.index.contains_key(&neg)
    }

    /// `<root, α_i∨>`.
    pub fn pairing(&self, root: &[i64], i: usize) -> i64 {
        root.iter()
            .enumerate()
            .map(|(k, c)| c * self.cartan[i][k])
            .sum()
    }

    /// The unique root of maximal height.
    pub fn highest(&self) -> &[i64] {
        self.positive.last().expect("root systems are non-empty")
    }

    /// Number of positive roots of each height, starting at height 1.
    pub fn height_counts(&self) -> Vec<usize> {
        let max = self
            .positive
            .iter()
            .map(|v| v.iter().sum::<i64>())
            .max()
            .unwrap_or(0) as usize;
        let mut counts = vec![0usize; max];
        for v in &self.positive {
            counts[(v.iter().sum::<i64>() - 1) as usize] += 1;
        }
        counts
    }

    /// Simple reflection `s_i` on a root-lattice vector.
    pub fn reflect(&self, i: usize, v: &[i64]) -> Vec<i64> {
        let mut out = v.to_vec();
        out[i] -= self.pairing(v, i);
        out
    }
}

/// Simple reflection of a lattice vector, respecting its kind.
pub fn reflect(datum: &CartanDatum, i: usize, v: &LatticeVec) -> LatticeVec {
    let mut out = v.clone();
    match v.kind {
        // s_i(h) = h - α_i(h) h_i
        Lattice::Coroot => out.coeffs[i] -= datum.root_on_coroot(i, &v.coeffs),
        // s_i(λ) = λ - λ(h_i) α_i
        Lattice::Root => out.coeffs[i] -= datum.coroot_on_root(i, &v.coeffs),
    }
    out
}

/// A Weyl group element: a word in the simple reflections together with its
/// matrix on the coroot lattice (column `j` is the image of `h_j`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylElement {
    pub word: Vec<usize>,
    pub matrix: Vec<Vec<i64>>,
}

impl WeylElement {
    pub fn identity(rank: usize) -> Self {
        let matrix = (0..rank)
            .map(|i| (0..rank).map(|j| i64::from(i == j)).collect())
            .collect();
        WeylElement {
            word: Vec::new(),
            matrix,
        }
    }

    pub fn simple(datum: &CartanDatum, i: usize) -> Self {
        Self::from_word(datum, &[i])
    }

    pub fn from_word(datum: &CartanDatum, word: &[usize]) -> Self {
        let n = datum.rank();
        let mut w = Self::identity(n);
        for &i in word {
            w = w.then_simple(datum, i);
        }
        w
    }

    /// `self · s_i`.
    pub fn then_simple(&self, datum: &CartanDatum, i: usize) -> Self {
        let n = datum.rank();
        // s_i as a matrix: column j is s_i(h_j) = h_j - a[j][i] h_i
        let mut matrix = self.matrix.clone();
        for row in 0..n {
            // (M S)[row][j] = M[row][j] - a[j][i] M[row][i]
            let mi = self.matrix[row][i];
            for j in 0..n {
                matrix[row][j] -= datum.cartan[j][i] * mi;
            }
        }
        let mut word = self.word.clone();
        word.push(i);
        WeylElement { word, matrix }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Action on a coroot-lattice vector.
    pub fn act(&self, v: &[i64]) -> Vec<i64> {
        let n = v.len();
        (0..n)
            .map(|row| (0..n).map(|j| self.matrix[row][j] * v[j]).sum())
            .collect()
    }
}

/// The root datum of a simple type: roots and coroots of `g`.
#[derive(Debug, Clone)]
pub struct RootData {
    pub datum: CartanDatum,
    /// Roots of `g` in simple-root coordinates.
    pub roots: RootSystem,
    /// Coroots of `g` (roots of the Langlands dual) in simple-coroot coordinates.
    pub coroots: RootSystem,
}

impl RootData {
    pub fn new(datum: CartanDatum) -> Self {
        let roots = RootSystem::new(&datum.cartan);
        let coroots = RootSystem::new(&datum.transpose_matrix());
        RootData {
            datum,
            roots,
            coroots,
        }
    }

    pub fn from_type(ty: CartanType) -> Self {
        Self::new(CartanDatum::new(ty))
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn positive_coroots(&self) -> &[Vec<i64>] {
        self.coroots.positive()
    }

    /// The coroot of maximal height.
    pub fn highest_coroot(&self) -> &[i64] {
        self.coroots.highest()
    }

    /// `n_r`: number of positive coroots of height `r`, for `r = 1..`.
    pub fn coroot_height_counts(&self) -> Vec<usize> {
        self.coroots.height_counts()
    }

    /// Exponents as the dual partition of the coroot height counts.
    pub fn exponents(&self) -> Vec<usize> {
        let counts = self.coroot_height_counts();
        let mut exps: Vec<usize> = (1..=counts[0])
            .map(|i| counts.iter().filter(|&&n| n >= i).count())
            .collect();
        exps.sort_unstable();
        exps
    }

    /// `ρ(γ∨)`, which for a positive coroot equals its height.
    pub fn rho_pairing(&self, coroot: &[i64]) -> i64 {
        // ρ = Σ ϖ_i and ϖ_i(h_j) = δ_ij
        coroot.iter().sum()
    }

    /// Writes `γ∨ = s_{j_1}…s_{j_s} α∨_{j_{s+1}}` so that heights strictly
    /// decrease along the path. Returns `(j_1..j_s, j_{s+1})`.
    pub fn descending_path(&self, coroot: &[i64]) -> (Vec<usize>, usize) {
        let n = self.rank();
        let mut letters = Vec::new();
        let mut current = coroot.to_vec();
        loop {
            if current.iter().sum::<i64>() == 1 {
                let last = current.iter().position(|&c| c == 1).expect("simple coroot");
                return (letters, last);
            }
            let i = (0..n)
                .find(|&i| self.datum.root_on_coroot(i, &current) > 0)
                .expect("a non-simple positive coroot pairs positively with some simple root");
            current = reflect(&self.datum, i, &LatticeVec::coroot(current)).coeffs;
            letters.push(i);
        }
    }

    /// Enumerates the Weyl group by breadth-first search; each element carries
    /// a reduced word.
    pub fn weyl_group(&self) -> Vec<WeylElement> {
        let n = self.rank();
        let id = WeylElement::identity(n);
        let mut seen: HashMap<Vec<Vec<i64>>, ()> = HashMap::new();
        seen.insert(id.matrix.clone(), ());
        let mut out = vec![id];
        let mut head = 0;
        while head < out.len() {
            let w = out[head].clone();
            head += 1;
            for i in 0..n {
                let next = w.then_simple(&self.datum, i);
                if seen.insert(next.matrix.clone(), ()).is_none() {
                    out.push(next);
                }
            }
        }
        out
    }

    /// Orbit of a coroot-lattice vector under the Weyl group.
    pub fn coroot_orbit(&self, v: &[i64]) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
        seen.insert(v.to_vec(), ());
        let mut out = vec![v.to_vec()];
        let mut head = 0;
        while head < out.len() {
            let u = out[head].clone();
            head += 1;
            for i in 0..n {
                let r = reflect(&self.datum, i, &LatticeVec::coroot(u.clone())).coeffs;
                if seen.insert(r.clone(), ()).is_none() {
                    out.push(r);
                }
            }
        }
        out
    }

    /// Order of the Weyl group, as the orbit size of the regular vector `2ρ∨`.
    pub fn weyl_order(&self) -> usize {
        let n = self.rank();
        let mut two_rho = vec![0i64; n];
        for c in self.positive_coroots() {
            for k in 0..n {
                two_rho[k] += c[k];
            }
        }
        self.coroot_orbit(&two_rho).len()
    }

    /// A reduced word for the longest element. `prefer_last` picks the largest
    /// available descent at each step, which usually yields a second reduced word.
    pub fn longest_word(&self, prefer_last: bool) -> Vec<usize> {
        let n = self.rank();
        // weight in fundamental-weight coordinates, start at ρ
        let mut x = vec![1i64; n];
        let mut word = Vec::new();
        loop {
            let mut candidates = (0..n).filter(|&i| x[i] > 0);
            let pick = if prefer_last {
                candidates.next_back()
            } else {
                candidates.next()
            };
            let Some(i) = pick else { break };
            let xi = x[i];
            for (k, xk) in x.iter_mut().enumerate() {
                // s_i λ = λ - λ(h_i) α_i, and α_i = Σ_k a[k][i] ϖ_k
                *xk -= xi * self.datum.cartan[k][i];
            }
            word.push(i);
        }
        word.reverse();
        word
    }

    /// Whether `α_i∨` is a long coroot.
    pub fn coroot_is_long(&self, coroot: &[i64]) -> bool {
        let norms = self.coroot_norms();
        let max = norms.iter().copied().max().unwrap_or(0);
        self.coroot_norm(coroot) == max
    }

    /// Squared lengths of the simple coroots, up to a common scale.
    fn coroot_norms(&self) -> Vec<i64> {
        let n = self.rank();
        (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                self.coroot_norm(&e)
            })
            .collect()
    }

    /// Squared length of a coroot up to a common positive scale.
    pub fn coroot_norm(&self, coroot: &[i64]) -> i64 {
        // h_i = α_i / d_i, so (h_i, h_j) = a[i][j] / d_j; scale by lcm(d)
        let d = &self.datum.symmetrizer;
        let l = d.iter().fold(1i64, |acc, &x| num_integer::lcm(acc, x));
        let n = self.rank();
        let mut total = 0;
        for i in 0..n {
            for j in 0..n {
                total += coroot[i] * coroot[j] * self.datum.cartan[i][j] * (l / d[j]);
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(tag: &str) -> RootData {
        RootData::from_type(tag.parse().unwrap())
    }

    #[test]
    fn parses_type_tags() {
        assert_eq!(
            "F4".parse::<CartanType>().unwrap(),
            CartanType {
                family: Family::F,
                rank: 4
            }
        );
        assert_eq!("b3".parse::<CartanType>().unwrap().to_string(), "B3");
        for bad in [
            "", "X3", "A", "A0", "D3", "E5", "F3", "G3", "A-1", "A1x", "B1",
        ] {
            assert!(bad.parse::<CartanType>().is_err(), "{bad}");
        }
    }

    #[test]
    fn rejects_non_cartan_matrices() {
        let ty = CartanType::new(Family::A, 2).unwrap();
        assert!(CartanDatum::from_matrix(ty, vec![vec![2, -1], vec![0, 2]]).is_err());
        assert!(CartanDatum::from_matrix(ty, vec![vec![2, 1], vec![1, 2]]).is_err());
        assert!(CartanDatum::from_matrix(ty, vec![vec![3, -1], vec![-1, 2]]).is_err());
        assert!(CartanDatum::from_matrix(ty, vec![vec![2, 0], vec![0, 2]]).is_err());
        assert!(CartanDatum::from_matrix(ty, vec![vec![2, -1], vec![-1, 2]]).is_ok());
    }

    #[test]
    fn symmetrizer_symmetrizes() {
        for tag in ["A3", "B3", "C4", "D4", "F4", "G2", "E6", "E8"] {
            let d = CartanDatum::new(tag.parse().unwrap());
            let n = d.rank();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(
                        d.symmetrizer[i] * d.cartan[i][j],
                        d.symmetrizer[j] * d.cartan[j][i],
                        "{tag}"
                    );
                }
            }
        }
    }

    #[test]
    fn a2_coroots() {
        let rd = data("A2");
        assert_eq!(rd.positive_coroots(), &[vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn positive_root_counts() {
        for (tag, count) in [
            ("A1", 1),
            ("A4", 10),
            ("B3", 9),
            ("C4", 16),
            ("D4", 12),
            ("F4", 24),
            ("G2", 6),
            ("E6", 36),
            ("E7", 63),
            ("E8", 120),
        ] {
            let rd = data(tag);
            assert_eq!(rd.roots.num_positive(), count, "{tag}");
            assert_eq!(rd.coroots.num_positive(), count, "{tag}");
        }
    }

    #[test]
    fn f4_heights() {
        let rd = data("F4");
        assert_eq!(rd.coroot_height_counts().len(), 11);
        assert_eq!(rd.highest_coroot().iter().sum::<i64>(), 11);
    }

    #[test]
    fn b4_heights_decrease() {
        let rd = data("B4");
        assert_eq!(rd.coroot_height_counts(), vec![4, 3, 3, 2, 2, 1, 1]);
    }

    #[test]
    fn reflections() {
        let a2 = CartanDatum::new("A2".parse().unwrap());
        let h1 = LatticeVec::simple(Lattice::Coroot, 2, 0);
        let h2 = LatticeVec::simple(Lattice::Coroot, 2, 1);
        assert_eq!(reflect(&a2, 0, &h1).coeffs, vec![-1, 0]);
        assert_eq!(reflect(&a2, 0, &h2).coeffs, vec![1, 1]);
        // B2, α_2 short: α_2(h_1) = -1 and α_1(h_2) = -2
        let b2 = CartanDatum::new("B2".parse().unwrap());
        let h1 = LatticeVec::simple(Lattice::Coroot, 2, 0);
        let h2 = LatticeVec::simple(Lattice::Coroot, 2, 1);
        assert_eq!(reflect(&b2, 1, &h1).coeffs, vec![1, 1]);
        assert_eq!(reflect(&b2, 0, &h2).coeffs, vec![2, 1]);
        let rd = RootData::new(b2.clone());
        assert!(rd.coroots.is_root(&[1, 1]) && rd.coroots.is_root(&[2, 1]));
        assert!(!rd.coroots.is_root(&[1, 2]));
    }

    #[test]
    fn reflection_preserves_coroots() {
        for tag in ["B3", "C3", "F4", "G2", "D4"] {
            let rd = data(tag);
            let n = rd.rank();
            for c in rd.positive_coroots() {
                for i in 0..n {
                    let r = reflect(&rd.datum, i, &LatticeVec::coroot(c.clone()));
                    assert!(rd.coroots.is_root(&r.coeffs));
                    assert_eq!(reflect(&rd.datum, i, &r).coeffs, *c);
                    assert_eq!(rd.coroot_norm(&r.coeffs), rd.coroot_norm(c));
                }
            }
        }
    }

    #[test]
    fn exponents_tables() {
        let table: &[(&str, &[usize])] = &[
            ("A1", &[1]),
            ("A2", &[1, 2]),
            ("A3", &[1, 2, 3]),
            ("A4", &[1, 2, 3, 4]),
            ("B2", &[1, 3]),
            ("B3", &[1, 3, 5]),
            ("B4", &[1, 3, 5, 7]),
            ("C3", &[1, 3, 5]),
            ("C4", &[1, 3, 5, 7]),
            ("D4", &[1, 3, 3, 5]),
            ("F4", &[1, 5, 7, 11]),
            ("G2", &[1, 5]),
            ("E6", &[1, 4, 5, 7, 8, 11]),
        ];
        for (tag, exps) in table {
            assert_eq!(data(tag).exponents(), exps.to_vec(), "{tag}");
        }
    }

    #[test]
    fn weyl_orders() {
        for (tag, order) in [
            ("A1", 2),
            ("A3", 24),
            ("B3", 48),
            ("D4", 192),
            ("F4", 1152),
            ("G2", 12),
        ] {
            let rd = data(tag);
            assert_eq!(rd.weyl_group().len(), order, "{tag}");
            assert_eq!(rd.weyl_order(), order, "{tag}");
        }
    }

    #[test]
    fn longest_words_are_reduced() {
        for tag in ["A3", "B3", "F4", "G2"] {
            let rd = data(tag);
            let n_pos = rd.coroots.num_positive();
            for prefer_last in [false, true] {
                let w = rd.longest_word(prefer_last);
                assert_eq!(w.len(), n_pos);
                // w0 sends every positive coroot to a negative one
                let el = WeylElement::from_word(&rd.datum, &w);
                for c in rd.positive_coroots() {
                    assert!(LatticeVec::coroot(el.act(c)).is_negative());
                }
            }
        }
    }

    #[test]
    fn weyl_matrix_matches_word() {
        let rd = data("B3");
        for w in rd.weyl_group().iter().take(20) {
            for c in rd.positive_coroots() {
                let mut v = LatticeVec::coroot(c.clone());
                for &i in w.word.iter().rev() {
                    v = reflect(&rd.datum, i, &v);
                }
                assert_eq!(w.act(c), v.coeffs);
            }
        }
    }

    #[test]
    fn descending_paths() {
        for tag in ["A3", "B4", "C4", "F4", "G2"] {
            let rd = data(tag);
            for c in rd.positive_coroots() {
                let (letters, last) = rd.descending_path(c);
                let mut v = LatticeVec::simple(Lattice::Coroot, rd.rank(), last);
                let mut h = 1;
                for &i in letters.iter().rev() {
                    v = reflect(&rd.datum, i, &v);
                    assert!(v.height() > h);
                    h = v.height();
                }
                assert_eq!(&v.coeffs, c);
            }
        }
    }

    #[test]
    fn coroot_lengths_f4() {
        // reversed labelling: α_1∨, α_2∨ long
        let rd = data("F4");
        assert!(rd.coroot_is_long(&[1, 0, 0, 0]));
        assert!(rd.coroot_is_long(&[0, 1, 0, 0]));
        assert!(!rd.coroot_is_long(&[0, 0, 1, 0]));
        assert!(!rd.coroot_is_long(&[0, 0, 0, 1]));
    }
}
