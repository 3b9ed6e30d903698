//! Character lattices, integer matrices and the root data of GL(n), SL(n), tori and products.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::Q;

/// A character of a torus, in the coordinates of its character lattice.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut w = Weight::zero(rank);
        w.0[i] = 1;
        w
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|x| x * k).collect())
    }

    /// Pairing with an integral functional.
    pub fn pair(&self, functional: &Weight) -> i64 {
        self.0.iter().zip(&functional.0).map(|(a, b)| a * b).sum()
    }

    /// Evaluation of a rational linear functional.
    pub fn eval(&self, functional: &[Q]) -> Q {
        self.0
            .iter()
            .zip(functional)
            .map(|(&a, v)| Q::from_int(a) * v)
            .sum()
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Add<&Weight> for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        assert_eq!(self.rank(), rhs.rank(), "weight rank mismatch");
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Weight> for &Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        assert_eq!(self.rank(), rhs.rank(), "weight rank mismatch");
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }
}

/// Dense integer matrix with arbitrary-precision entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl ZMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ZMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ZMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        ZMatrix { rows: r, cols: c, data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        ZMatrix::from_i64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Weight], rows: usize) -> Self {
        let mut m = ZMatrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m[(i, j)] = BigInt::from(c.0[i]);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        *self == ZMatrix::identity(self.rows) && self.is_square()
    }

    pub fn transpose(&self) -> Self {
        let mut t = ZMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_i64()).collect())
            .collect()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_q(&self) -> crate::matrix::QMatrix {
        crate::matrix::QMatrix::from_flat(
            self.rows,
            self.cols,
            self.data.iter().map(|x| Q::from_bigint(x.clone())).collect(),
        )
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !a[(r, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[target] += c · row[source]`
    fn row_axpy(&mut self, target: usize, source: usize, c: &BigInt) {
        for j in 0..self.cols {
            let v = c * &self[(source, j)];
            self[(target, j)] += v;
        }
    }

    /// `col[target] += c · col[source]`
    fn col_axpy(&mut self, target: usize, source: usize, c: &BigInt) {
        for i in 0..self.rows {
            let v = c * &self[(i, source)];
            self[(i, target)] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = -&self[(i, c)];
            self[(i, c)] = v;
        }
    }
}

impl Index<(usize, usize)> for ZMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ZMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul<&ZMatrix> for &ZMatrix {
    type Output = ZMatrix;
    fn mul(self, rhs: &ZMatrix) -> ZMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix dimension mismatch");
        let mut m = ZMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = a * &rhs[(k, j)];
                    m[(i, j)] += v;
                }
            }
        }
        m
    }
}

impl Sub<&ZMatrix> for &ZMatrix {
    type Output = ZMatrix;
    fn sub(self, rhs: &ZMatrix) -> ZMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ZMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ZMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_string()).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

impl Serialize for ZMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows = self
            .to_i64_rows()
            .ok_or_else(|| serde::ser::Error::custom("matrix entry exceeds i64"))?;
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ZMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(deserializer)?;
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(ZMatrix::from_i64_rows(&rows))
    }
}

/// A homomorphism of character lattices; columns are images of the source basis.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeMap(pub ZMatrix);

impl LatticeMap {
    pub fn identity(rank: usize) -> Self {
        LatticeMap(ZMatrix::identity(rank))
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        LatticeMap(ZMatrix::from_ints(rows))
    }

    pub fn matrix(&self) -> &ZMatrix {
        &self.0
    }

    pub fn source_rank(&self) -> usize {
        self.0.cols()
    }

    pub fn target_rank(&self) -> usize {
        self.0.rows()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    /// Panics when a coordinate of the image leaves `i64`.
    pub fn apply(&self, w: &Weight) -> Weight {
        assert_eq!(w.rank(), self.source_rank(), "weight rank mismatch");
        let m = &self.0;
        Weight(
            (0..m.rows())
                .map(|i| {
                    let mut acc = BigInt::zero();
                    for (j, &x) in w.0.iter().enumerate() {
                        if x != 0 {
                            acc += &m[(i, j)] * x;
                        }
                    }
                    acc.to_i64().expect("weight coordinate overflow")
                })
                .collect(),
        )
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LatticeMap) -> LatticeMap {
        LatticeMap(&self.0 * &other.0)
    }

    /// Smallest `k ≥ 1` with `self^k = id`, searched up to `bound`.
    pub fn order(&self, bound: usize) -> Option<usize> {
        if !self.0.is_square() {
            return None;
        }
        let id = ZMatrix::identity(self.0.rows());
        let mut acc = self.0.clone();
        for k in 1..=bound {
            if acc == id {
                return Some(k);
            }
            acc = &acc * &self.0;
        }
        None
    }
}

impl fmt::Debug for LatticeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `M = U · D · V` with `U`, `V` unimodular and `D` diagonal with `d₁ | d₂ | …`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: ZMatrix,
    pub d: ZMatrix,
    pub v: ZMatrix,
    /// `U⁻¹`, so that `U⁻¹ · M · V⁻¹ = D`.
    pub u_inv: ZMatrix,
    /// `V⁻¹`.
    pub v_inv: ZMatrix,
    pub rank: usize,
}

impl SmithForm {
    /// The nonzero diagonal entries `d₁ | d₂ | … | d_rank`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// Smith normal form by gcd-pivot elimination. The pivot is always the nonzero entry of least
/// absolute value in the active submatrix, ties broken in row-major order.
pub fn smith_normal_form(m: &ZMatrix) -> SmithForm {
    let (r, c) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u_inv = ZMatrix::identity(r);
    let mut u = ZMatrix::identity(r);
    let mut v_inv = ZMatrix::identity(c);
    let mut v = ZMatrix::identity(c);

    // Row operation on `a`, mirrored on U⁻¹ and inverted on U.
    macro_rules! row_axpy {
        ($t:expr, $s:expr, $k:expr) => {{
            let k: BigInt = $k;
            a.row_axpy($t, $s, &k);
            u_inv.row_axpy($t, $s, &k);
            u.col_axpy($s, $t, &-&k);
        }};
    }
    macro_rules! col_axpy {
        ($t:expr, $s:expr, $k:expr) => {{
            let k: BigInt = $k;
            a.col_axpy($t, $s, &k);
            v_inv.col_axpy($t, $s, &k);
            v.row_axpy($s, $t, &-&k);
        }};
    }

    let mut t = 0;
    while t < r.min(c) {
        let pick = |a: &ZMatrix| {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = &a[(i, j)];
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            best
        };
        let Some((pi, pj)) = pick(&a) else { break };
        a.swap_rows(t, pi);
        u_inv.swap_rows(t, pi);
        u.swap_cols(t, pi);
        a.swap_cols(t, pj);
        v_inv.swap_cols(t, pj);
        v.swap_rows(t, pj);

        loop {
            let p = a[(t, t)].clone();
            for i in t + 1..r {
                if !a[(i, t)].is_zero() {
                    let q = a[(i, t)].div_floor(&p);
                    row_axpy!(i, t, -q);
                }
            }
            for j in t + 1..c {
                if !a[(t, j)].is_zero() {
                    let q = a[(t, j)].div_floor(&p);
                    col_axpy!(j, t, -q);
                }
            }
            let line_clear =
                (t + 1..r).all(|i| a[(i, t)].is_zero()) && (t + 1..c).all(|j| a[(t, j)].is_zero());
            if line_clear {
                // Divisibility of the remaining block by the pivot.
                let bad = (t + 1..r)
                    .flat_map(|i| (t + 1..c).map(move |j| (i, j)))
                    .find(|&(i, j)| !(&a[(i, j)] % &p).is_zero());
                match bad {
                    None => break,
                    Some((i, _)) => row_axpy!(t, i, BigInt::one()),
                }
            }
            // Re-pivot on the least nonzero entry of the active block.
            let (pi, pj) = pick(&a).expect("active block cannot vanish while pivot is nonzero");
            if (pi, pj) != (t, t) && a[(pi, pj)].abs() < a[(t, t)].abs() {
                a.swap_rows(t, pi);
                u_inv.swap_rows(t, pi);
                u.swap_cols(t, pi);
                a.swap_cols(t, pj);
                v_inv.swap_cols(t, pj);
                v.swap_rows(t, pj);
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u_inv.negate_row(t);
            u.negate_col(t);
        }
        t += 1;
    }
    SmithForm { u, d: a, v, u_inv, v_inv, rank: t }
}

/// Row-style Hermite normal form of the lattice spanned by `vectors`: echelon rows with positive
/// pivots and entries above each pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hermite_normal_form(vectors: &[Weight]) -> Vec<Weight> {
    let Some(n) = vectors.first().map(Weight::rank) else {
        return Vec::new();
    };
    let mut rows: Vec<Vec<BigInt>> =
        vectors.iter().map(|v| v.0.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut r = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        loop {
            let nonzero: Vec<usize> = (r..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let best = *nonzero.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            rows.swap(r, best);
            if nonzero.len() == 1 {
                break;
            }
            let p = rows[r][col].clone();
            for i in r + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&p);
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
            }
        }
        if r < rows.len() && !rows[r][col].is_zero() {
            if rows[r][col].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -&*x;
                }
            }
            pivots.push(col);
            r += 1;
        }
    }
    rows.truncate(r);
    for (k, &col) in pivots.iter().enumerate() {
        let p = rows[k][col].clone();
        for i in 0..k {
            let q = rows[i][col].div_floor(&p);
            if q.is_zero() {
                continue;
            }
            let pivot_row = rows[k].clone();
            for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                *x -= &q * y;
            }
        }
    }
    rows.into_iter()
        .map(|row| Weight(row.into_iter().map(|x| x.to_i64().expect("HNF entry overflow")).collect()))
        .collect()
}

/// ℤ-basis of `ker(m)` (as a saturated sublattice of the source), Hermite-reduced.
pub fn integer_kernel(m: &ZMatrix) -> Vec<Weight> {
    let snf = smith_normal_form(m);
    let c = m.cols();
    let gens: Vec<Weight> = (snf.rank..c)
        .map(|j| {
            Weight(snf.v_inv.col(j).into_iter().map(|x| x.to_i64().expect("kernel overflow")).collect())
        })
        .collect();
    hermite_normal_form(&gens)
}

/// ℤ-basis of the sublattice fixed by an endomorphism, `ker(A − id)`, Hermite-reduced.
pub fn fixed_sublattice(a: &LatticeMap) -> Vec<Weight> {
    assert!(a.0.is_square(), "fixed_sublattice needs an endomorphism");
    let n = a.0.rows();
    integer_kernel(&(&a.0 - &ZMatrix::identity(n)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CokernelFactors {
    pub free_rank: usize,
    /// Nonzero invariant factors `d₁ | d₂ | …` (unit factors included).
    pub invariant_factors: Vec<i64>,
}

impl CokernelFactors {
    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<i64> {
        self.invariant_factors.iter().copied().filter(|&d| d > 1).collect()
    }

    pub fn order(&self) -> Option<i64> {
        self.is_finite().then(|| self.invariant_factors.iter().product())
    }
}

pub fn cokernel_invariant_factors(f: &LatticeMap) -> CokernelFactors {
    let snf = smith_normal_form(&f.0);
    CokernelFactors {
        free_rank: f.target_rank() - snf.rank,
        invariant_factors: snf
            .invariant_factors()
            .into_iter()
            .map(|d| d.to_i64().expect("invariant factor overflow"))
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Family {
    Gl { n: usize },
    Sl { n: usize },
    Torus { rank: usize },
    Product { factors: Vec<RootDatum> },
}

/// One factor's position inside a product datum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FactorBlock {
    pub lattice_offset: usize,
    pub lattice_rank: usize,
    pub std_offset: usize,
    pub std_dim: usize,
}

/// A reductive group given by its character lattice, simple roots and coroots, and the
/// standard faithful matrix realization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootDatum {
    family: Family,
    rank: usize,
    simple_roots: Vec<Weight>,
    simple_coroots: Vec<Weight>,
    /// Simple reflections together with the coordinate swap they induce on the standard
    /// representation.
    reflections: Vec<(LatticeMap, Vec<usize>)>,
    std_weights: Vec<Weight>,
    blocks: Vec<FactorBlock>,
}

impl Serialize for RootDatum {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.family.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RootDatum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let family = Family::deserialize(deserializer)?;
        RootDatum::from_family(family).map_err(serde::de::Error::custom)
    }
}

/// An element of the Weyl group: its action on the lattice, its permutation of the standard
/// basis (`e_j ↦ e_{perm[j]}`), and its lexicographically least reduced word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct WeylElement {
    pub lattice: LatticeMap,
    pub perm: Vec<usize>,
    pub word: Vec<usize>,
}

impl WeylElement {
    pub fn length(&self) -> usize {
        self.word.len()
    }
}

fn reflection_matrix(root: &Weight, coroot: &Weight) -> LatticeMap {
    let n = root.rank();
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j) - root.0[i] * coroot.0[j]).collect())
        .collect();
    LatticeMap(ZMatrix::from_i64_rows(&rows))
}

impl RootDatum {
    pub fn from_family(family: Family) -> Result<Self, String> {
        Ok(match family {
            Family::Gl { n } if n >= 1 => RootDatum::gl(n),
            Family::Sl { n } if n >= 2 => RootDatum::sl(n),
            Family::Torus { rank } => RootDatum::torus(rank),
            Family::Product { factors } if !factors.is_empty() => RootDatum::product(factors),
            other => return Err(format!("degenerate root datum {other:?}")),
        })
    }

    pub fn gl(n: usize) -> Self {
        assert!(n >= 1);
        let roots: Vec<Weight> = (0..n - 1)
            .map(|i| {
                let mut w = Weight::zero(n);
                w.0[i] = 1;
                w.0[i + 1] = -1;
                w
            })
            .collect();
        let reflections = roots
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.swap(i, i + 1);
                (reflection_matrix(r, r), perm)
            })
            .collect();
        RootDatum {
            family: Family::Gl { n },
            rank: n,
            simple_coroots: roots.clone(),
            simple_roots: roots,
            reflections,
            std_weights: (0..n).map(|i| Weight::unit(n, i)).collect(),
            blocks: vec![FactorBlock { lattice_offset: 0, lattice_rank: n, std_offset: 0, std_dim: n }],
        }
    }

    /// SL(n): lattice `ℤⁿ/ℤ·(1,…,1)` in the section with last coordinate zero, stored as the
    /// first `n − 1` coordinates.
    pub fn sl(n: usize) -> Self {
        assert!(n >= 2);
        let r = n - 1;
        let roots: Vec<Weight> = (0..r).map(|i| sl_section(&gl_simple_root(n, i))).collect();
        let coroots: Vec<Weight> = (0..r)
            .map(|i| {
                let mut w = Weight::zero(r);
                w.0[i] = 1;
                if i + 1 < r {
                    w.0[i + 1] = -1;
                }
                w
            })
            .collect();
        let reflections = roots
            .iter()
            .zip(&coroots)
            .enumerate()
            .map(|(i, (a, c))| {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.swap(i, i + 1);
                (reflection_matrix(a, c), perm)
            })
            .collect();
        RootDatum {
            family: Family::Sl { n },
            rank: r,
            simple_roots: roots,
            simple_coroots: coroots,
            reflections,
            std_weights: (0..n).map(|i| sl_section(&Weight::unit(n, i))).collect(),
            blocks: vec![FactorBlock { lattice_offset: 0, lattice_rank: r, std_offset: 0, std_dim: n }],
        }
    }

    pub fn torus(rank: usize) -> Self {
        RootDatum {
            family: Family::Torus { rank },
            rank,
            simple_roots: Vec::new(),
            simple_coroots: Vec::new(),
            reflections: Vec::new(),
            std_weights: (0..rank).map(|i| Weight::unit(rank, i)).collect(),
            blocks: vec![FactorBlock { lattice_offset: 0, lattice_rank: rank, std_offset: 0, std_dim: rank }],
        }
    }

    /// Direct product; the standard representation is the direct sum of the factors'.
    pub fn product(factors: Vec<RootDatum>) -> Self {
        let rank: usize = factors.iter().map(|f| f.rank).sum();
        let dim: usize = factors.iter().map(|f| f.std_dim()).sum();
        let embed = |w: &Weight, off: usize| {
            let mut v = Weight::zero(rank);
            v.0[off..off + w.rank()].copy_from_slice(&w.0);
            v
        };
        let (mut roots, mut coroots, mut reflections, mut stdw, mut blocks) =
            (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
        let (mut loff, mut soff) = (0, 0);
        for f in &factors {
            for ((a, c), (_, p)) in f.simple_roots.iter().zip(&f.simple_coroots).zip(&f.reflections) {
                let (a, c) = (embed(a, loff), embed(c, loff));
                let mut perm: Vec<usize> = (0..dim).collect();
                for (j, &pj) in p.iter().enumerate() {
                    perm[soff + j] = soff + pj;
                }
                reflections.push((reflection_matrix(&a, &c), perm));
                roots.push(a);
                coroots.push(c);
            }
            stdw.extend(f.std_weights.iter().map(|w| embed(w, loff)));
            blocks.push(FactorBlock { lattice_offset: loff, lattice_rank: f.rank, std_offset: soff, std_dim: f.std_dim() });
            loff += f.rank;
            soff += f.std_dim();
        }
        RootDatum {
            family: Family::Product { factors },
            rank,
            simple_roots: roots,
            simple_coroots: coroots,
            reflections,
            std_weights: stdw,
            blocks,
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn simple_roots(&self) -> &[Weight] {
        &self.simple_roots
    }

    pub fn simple_coroots(&self) -> &[Weight] {
        &self.simple_coroots
    }

    pub fn weyl_generators(&self) -> Vec<LatticeMap> {
        self.reflections.iter().map(|(m, _)| m.clone()).collect()
    }

    /// Dimension of the standard faithful representation.
    pub fn std_dim(&self) -> usize {
        self.std_weights.len()
    }

    /// Weights of the standard representation, one per basis vector.
    pub fn std_weights(&self) -> &[Weight] {
        &self.std_weights
    }

    pub fn blocks(&self) -> &[FactorBlock] {
        &self.blocks
    }

    pub fn is_torus(&self) -> bool {
        self.simple_roots.is_empty()
    }

    /// Whether matrices in the realization have determinant one on the given block.
    pub fn block_has_det_one(&self, block: usize) -> bool {
        match &self.family {
            Family::Sl { .. } => true,
            Family::Product { factors } => matches!(factors[block].family, Family::Sl { .. }),
            _ => false,
        }
    }

    /// Whether the realization consists of diagonal matrices on the given block.
    pub fn block_is_torus(&self, block: usize) -> bool {
        match &self.family {
            Family::Torus { .. } => true,
            Family::Product { factors } => matches!(factors[block].family, Family::Torus { .. }),
            _ => false,
        }
    }

    /// The standard-coordinate exponent vector of a weight's lift, inverse to the identification
    /// of the diagonal torus characters with the lattice (SL blocks use the zero-last-coordinate
    /// section).
    pub fn to_std_exponents(&self, w: &Weight) -> Vec<i64> {
        let mut out = vec![0; self.std_dim()];
        for blk in &self.blocks {
            let part = &w.0[blk.lattice_offset..blk.lattice_offset + blk.lattice_rank];
            out[blk.std_offset..blk.std_offset + part.len()].copy_from_slice(part);
        }
        out
    }

    /// Character of the diagonal torus with the given standard-coordinate exponents.
    pub fn from_std_exponents(&self, e: &[i64]) -> Weight {
        assert_eq!(e.len(), self.std_dim());
        let mut w = Weight::zero(self.rank);
        for (b, blk) in self.blocks.iter().enumerate() {
            let part = &e[blk.std_offset..blk.std_offset + blk.std_dim];
            if self.block_has_det_one(b) {
                let last = *part.last().unwrap();
                for k in 0..blk.lattice_rank {
                    w.0[blk.lattice_offset + k] = part[k] - last;
                }
            } else {
                w.0[blk.lattice_offset..blk.lattice_offset + blk.lattice_rank].copy_from_slice(part);
            }
        }
        w
    }

    pub fn is_dominant(&self, w: &Weight) -> bool {
        self.simple_coroots.iter().all(|c| w.pair(c) >= 0)
    }

    /// All roots, as the Weyl orbit of the simple roots.
    pub fn roots(&self) -> Vec<Weight> {
        let mut seen: Vec<Weight> = Vec::new();
        let mut queue: VecDeque<Weight> = self.simple_roots.iter().cloned().collect();
        while let Some(r) = queue.pop_front() {
            if seen.contains(&r) {
                continue;
            }
            for (s, _) in &self.reflections {
                queue.push_back(s.apply(&r));
            }
            queue.push_back(-&r);
            seen.push(r);
        }
        seen.sort();
        seen
    }

    /// Positivity of a root: lexicographically positive in lattice coordinates, which matches
    /// the choice of simple roots for every supported family.
    pub fn is_positive_root(&self, r: &Weight) -> bool {
        r.0.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
    }

    pub fn weyl_identity(&self) -> WeylElement {
        WeylElement {
            lattice: LatticeMap::identity(self.rank),
            perm: (0..self.std_dim()).collect(),
            word: Vec::new(),
        }
    }

    /// All Weyl group elements in order of (length, reduced word), each carrying its
    /// lexicographically least reduced word.
    pub fn weyl_elements(&self) -> Vec<WeylElement> {
        let mut out = vec![self.weyl_identity()];
        let mut index: HashMap<LatticeMap, usize> = HashMap::new();
        index.insert(out[0].lattice.clone(), 0);
        let mut frontier = 0;
        while frontier < out.len() {
            let w = out[frontier].clone();
            frontier += 1;
            for (i, (s, p)) in self.reflections.iter().enumerate() {
                let lattice = w.lattice.compose(s);
                if index.contains_key(&lattice) {
                    continue;
                }
                let perm = p.iter().map(|&j| w.perm[j]).collect();
                let mut word = w.word.clone();
                word.push(i);
                index.insert(lattice.clone(), out.len());
                out.push(WeylElement { lattice, perm, word });
            }
        }
        out
    }

    /// Sorts `w` into the dominant chamber by simple reflections.
    pub fn dominant_representative(&self, w: &Weight) -> (Weight, WeylElement) {
        assert_eq!(w.rank(), self.rank, "weight rank mismatch");
        let mut cur = w.clone();
        let mut elt = self.weyl_identity();
        while let Some(i) = self.simple_coroots.iter().position(|c| cur.pair(c) < 0) {
            let (s, p) = &self.reflections[i];
            cur = s.apply(&cur);
            elt = WeylElement {
                lattice: s.compose(&elt.lattice),
                perm: elt.perm.iter().map(|&j| p[j]).collect(),
                word: std::iter::once(i).chain(elt.word.iter().copied()).collect(),
            };
        }
        (cur, elt)
    }

    /// Weyl orbit of a weight.
    pub fn weyl_orbit(&self, w: &Weight) -> Vec<Weight> {
        let mut seen = vec![w.clone()];
        let mut k = 0;
        while k < seen.len() {
            let cur = seen[k].clone();
            for (s, _) in &self.reflections {
                let n = s.apply(&cur);
                if !seen.contains(&n) {
                    seen.push(n);
                }
            }
            k += 1;
        }
        seen.sort();
        seen
    }
}

fn gl_simple_root(n: usize, i: usize) -> Weight {
    let mut w = Weight::zero(n);
    w.0[i] = 1;
    w.0[i + 1] = -1;
    w
}

/// Image of a ℤⁿ vector in the SL(n) section (subtract last coordinate, drop it).
pub fn sl_section(v: &Weight) -> Weight {
    let last = *v.0.last().unwrap();
    Weight(v.0[..v.rank() - 1].iter().map(|x| x - last).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors(m: &ZMatrix) -> Vec<i64> {
        smith_normal_form(m).invariant_factors().iter().map(|d| d.to_i64().unwrap()).collect()
    }

    fn check_snf(m: &ZMatrix) {
        let s = smith_normal_form(m);
        assert_eq!(&(&s.u * &s.d) * &s.v, *m);
        assert_eq!(&(&s.u_inv * m) * &s.v_inv, s.d);
        assert!(s.u.det().abs().is_one() && s.v.det().abs().is_one());
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
    }

    #[test]
    fn snf_examples() {
        assert_eq!(factors(&ZMatrix::identity(3)), vec![1, 1, 1]);
        assert_eq!(factors(&ZMatrix::from_ints(&[&[2, 0], &[0, 3]])), vec![1, 6]);
        assert_eq!(factors(&ZMatrix::from_ints(&[&[2, 4], &[6, 8]])), vec![2, 4]);
        for m in [
            ZMatrix::from_ints(&[&[2, 0], &[0, 3]]),
            ZMatrix::from_ints(&[&[0, 0, 4], &[6, 0, 0]]),
            ZMatrix::from_ints(&[&[3, 5, 7], &[2, 4, 6], &[1, 1, 1]]),
            ZMatrix::zeros(2, 3),
        ] {
            check_snf(&m);
        }
    }

    #[test]
    fn fixed_sublattice_examples() {
        assert_eq!(fixed_sublattice(&LatticeMap::identity(3)).len(), 3);
        let cyc = LatticeMap::from_ints(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(fixed_sublattice(&cyc), vec![Weight(vec![1, 1, 1])]);
        let neg = LatticeMap::from_ints(&[&[-1, 0], &[0, -1]]);
        assert!(fixed_sublattice(&neg).is_empty());
    }

    #[test]
    fn cokernel_examples() {
        let c = cokernel_invariant_factors(&LatticeMap::from_ints(&[&[2, 0], &[0, 3]]));
        assert_eq!((c.free_rank, c.invariant_factors.clone()), (0, vec![1, 6]));
        let z = cokernel_invariant_factors(&LatticeMap::from_ints(&[&[0]]));
        assert_eq!(z.free_rank, 1);
        assert!(!z.is_finite());
        // (a, a) ↦ 2a
        let d = cokernel_invariant_factors(&LatticeMap::from_ints(&[&[2]]));
        assert_eq!((d.free_rank, d.torsion()), (0, vec![2]));
    }

    #[test]
    fn hnf_is_canonical() {
        let a = hermite_normal_form(&[Weight(vec![2, 4]), Weight(vec![1, 3])]);
        let b = hermite_normal_form(&[Weight(vec![1, 3]), Weight(vec![3, 7])]);
        assert_eq!(a, b);
        assert_eq!(a, vec![Weight(vec![1, 1]), Weight(vec![0, 2])]);
    }

    #[test]
    fn dominant_representatives() {
        let g2 = RootDatum::gl(2);
        assert_eq!(g2.dominant_representative(&Weight(vec![0, 2])).0, Weight(vec![2, 0]));
        let g3 = RootDatum::gl(3);
        let (d, w) = g3.dominant_representative(&Weight(vec![1, 3, 2]));
        assert_eq!(d, Weight(vec![3, 2, 1]));
        assert_eq!(w.lattice.apply(&Weight(vec![1, 3, 2])), d);
        let (d, w) = g3.dominant_representative(&Weight(vec![3, 1, 0]));
        assert_eq!(d, Weight(vec![3, 1, 0]));
        assert!(w.lattice.is_identity());
    }

    #[test]
    fn weyl_groups_have_expected_orders() {
        assert_eq!(RootDatum::gl(3).weyl_elements().len(), 6);
        assert_eq!(RootDatum::sl(3).weyl_elements().len(), 6);
        assert_eq!(RootDatum::product(vec![RootDatum::gl(2), RootDatum::gl(2)]).weyl_elements().len(), 4);
        assert_eq!(RootDatum::torus(3).weyl_elements().len(), 1);
        assert_eq!(RootDatum::gl(3).roots().len(), 6);
        assert_eq!(RootDatum::sl(3).roots().len(), 6);
    }

    #[test]
    fn sl_reflections_are_involutions_on_roots() {
        for g in [RootDatum::sl(2), RootDatum::sl(3), RootDatum::sl(4)] {
            let roots = g.roots();
            for s in g.weyl_generators() {
                assert!(s.compose(&s).is_identity());
                for r in &roots {
                    assert!(roots.contains(&s.apply(r)));
                }
            }
            for (a, c) in g.simple_roots().iter().zip(g.simple_coroots()) {
                assert_eq!(a.pair(c), 2);
            }
        }
    }

    #[test]
    fn weyl_perm_matches_lattice_action_on_std_weights() {
        let g = RootDatum::product(vec![RootDatum::gl(2), RootDatum::sl(3)]);
        for w in g.weyl_elements() {
            for (j, e) in g.std_weights().iter().enumerate() {
                assert_eq!(w.lattice.apply(e), g.std_weights()[w.perm[j]]);
            }
        }
    }
}
