//! Representations built from the standard one by duals, tensor products, exterior and
//! symmetric powers, determinant twists and direct sums.
//!
//! Bases are fixed once and for all: tensor products use the Kronecker order, exterior powers
//! the lexicographic order on increasing index tuples, symmetric powers the lexicographic order
//! on nondecreasing tuples (monomial basis), and direct sums concatenate.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{RootDatum, Weight};
use crate::matrix::QMatrix;
use crate::rational::Q;
use crate::repring::Character;

/// Serializes as its text form (`ext(std,2)`); deserializes from text or from the externally
/// tagged tree (`{"exterior": ["std", 2]}`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TensorWord {
    Std,
    Dual(Box<TensorWord>),
    Tensor(Box<TensorWord>, Box<TensorWord>),
    Exterior(Box<TensorWord>, usize),
    Sym(Box<TensorWord>, usize),
    DetPower(i64),
    Sum(Box<TensorWord>, Box<TensorWord>),
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

type Sparse = Vec<(usize, Q)>;

fn sparse_col(m: &QMatrix, j: usize) -> Sparse {
    (0..m.rows()).filter_map(|i| (!m[(i, j)].is_zero()).then(|| (i, m[(i, j)].clone()))).collect()
}

fn unit_col(j: usize) -> Sparse {
    vec![(j, Q::one())]
}

/// Expands `v₁ ∧ … ∧ v_r` (or `v₁ ⋯ v_r` when `symmetric`) into basis tuples.
fn expand_product(vectors: &[Sparse], symmetric: bool) -> HashMap<Vec<usize>, Q> {
    let mut acc: HashMap<Vec<usize>, Q> = HashMap::from([(Vec::new(), Q::one())]);
    for v in vectors {
        let mut next: HashMap<Vec<usize>, Q> = HashMap::new();
        for (key, c) in &acc {
            for (s, x) in v {
                let pos = key.partition_point(|&t| t < *s);
                if !symmetric && key.get(pos) == Some(s) {
                    continue;
                }
                let mut k2 = key.clone();
                k2.insert(pos, *s);
                let mut val = c * x;
                if !symmetric && (key.len() - pos) % 2 == 1 {
                    val = -val;
                }
                *next.entry(k2).or_insert_with(Q::zero) += val;
            }
        }
        next.retain(|_, c| !c.is_zero());
        acc = next;
    }
    acc
}

fn power_basis(d: usize, r: usize, symmetric: bool) -> Vec<Vec<usize>> {
    if symmetric {
        (0..d).combinations_with_replacement(r).collect()
    } else {
        (0..d).combinations(r).collect()
    }
}

/// Matrix of the induced map on the `r`-th exterior or symmetric power.
fn power_matrix(m: &QMatrix, r: usize, symmetric: bool) -> QMatrix {
    let basis = power_basis(m.rows(), r, symmetric);
    let index: HashMap<&Vec<usize>, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let cols: Vec<Sparse> = (0..m.cols()).map(|j| sparse_col(m, j)).collect();
    let mut out = QMatrix::zeros(basis.len(), basis.len());
    for (j, t) in basis.iter().enumerate() {
        let vecs: Vec<Sparse> = t.iter().map(|&k| cols[k].clone()).collect();
        for (key, c) in expand_product(&vecs, symmetric) {
            out[(index[&key], j)] = c;
        }
    }
    out
}

/// Matrix of the induced derivation on the `r`-th exterior or symmetric power.
fn power_derivation(x: &QMatrix, r: usize, symmetric: bool) -> QMatrix {
    let basis = power_basis(x.rows(), r, symmetric);
    let index: HashMap<&Vec<usize>, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut out = QMatrix::zeros(basis.len(), basis.len());
    for (j, t) in basis.iter().enumerate() {
        for k in 0..t.len() {
            let vecs: Vec<Sparse> = t
                .iter()
                .enumerate()
                .map(|(i, &ti)| if i == k { sparse_col(x, ti) } else { unit_col(ti) })
                .collect();
            for (key, c) in expand_product(&vecs, symmetric) {
                let i = index[&key];
                let v = &out[(i, j)] + &c;
                out[(i, j)] = v;
            }
        }
    }
    out
}

struct EvalContext<'a> {
    g: &'a QMatrix,
    g_inv: &'a QMatrix,
    det: Q,
}

impl TensorWord {
    pub fn std() -> Self {
        TensorWord::Std
    }

    pub fn dual(self) -> Self {
        TensorWord::Dual(Box::new(self))
    }

    pub fn tensor(self, other: TensorWord) -> Self {
        TensorWord::Tensor(Box::new(self), Box::new(other))
    }

    pub fn exterior(self, r: usize) -> Self {
        TensorWord::Exterior(Box::new(self), r)
    }

    pub fn sym(self, r: usize) -> Self {
        TensorWord::Sym(Box::new(self), r)
    }

    pub fn det_power(k: i64) -> Self {
        TensorWord::DetPower(k)
    }

    pub fn sum(self, other: TensorWord) -> Self {
        TensorWord::Sum(Box::new(self), Box::new(other))
    }

    /// Dimension when the standard representation has dimension `n`.
    pub fn dimension(&self, n: usize) -> usize {
        match self {
            TensorWord::Std => n,
            TensorWord::Dual(a) => a.dimension(n),
            TensorWord::Tensor(a, b) => a.dimension(n) * b.dimension(n),
            TensorWord::Exterior(a, r) => binom(a.dimension(n), *r),
            TensorWord::Sym(a, r) => {
                let d = a.dimension(n);
                if d == 0 {
                    usize::from(*r == 0)
                } else {
                    binom(d + r - 1, *r)
                }
            }
            TensorWord::DetPower(_) => 1,
            TensorWord::Sum(a, b) => a.dimension(n) + b.dimension(n),
        }
    }

    /// Degree under scalar matrices: `ρ(c·I) = c^d·I`. `None` for sums of mixed degree.
    pub fn scaling_degree(&self, n: usize) -> Option<i64> {
        match self {
            TensorWord::Std => Some(1),
            TensorWord::Dual(a) => a.scaling_degree(n).map(|d| -d),
            TensorWord::Tensor(a, b) => Some(a.scaling_degree(n)? + b.scaling_degree(n)?),
            TensorWord::Exterior(a, r) | TensorWord::Sym(a, r) => a.scaling_degree(n).map(|d| d * *r as i64),
            TensorWord::DetPower(k) => Some(k * n as i64),
            TensorWord::Sum(a, b) => {
                let (x, y) = (a.scaling_degree(n)?, b.scaling_degree(n)?);
                (x == y).then_some(x)
            }
        }
    }

    /// Number of standard factors, counting powers with multiplicity.
    pub fn std_degree(&self) -> usize {
        match self {
            TensorWord::Std => 1,
            TensorWord::Dual(a) => a.std_degree(),
            TensorWord::Tensor(a, b) | TensorWord::Sum(a, b) => a.std_degree() + b.std_degree(),
            TensorWord::Exterior(a, r) | TensorWord::Sym(a, r) => r * a.std_degree(),
            TensorWord::DetPower(_) => 0,
        }
    }

    /// Image of an invertible `n × n` matrix.
    pub fn evaluate(&self, g: &QMatrix) -> Result<QMatrix> {
        let g_inv = g.inverse().ok_or_else(|| Error::NonInvertible("group element".into()))?;
        self.evaluate_with_inverse(g, &g_inv)
    }

    pub fn evaluate_with_inverse(&self, g: &QMatrix, g_inv: &QMatrix) -> Result<QMatrix> {
        if !g.is_square() {
            return Err(Error::DimensionMismatch { expected: g.rows(), got: g.cols() });
        }
        let ctx = EvalContext { g, g_inv, det: g.det() };
        Ok(self.eval_in(&ctx))
    }

    fn eval_in(&self, ctx: &EvalContext) -> QMatrix {
        match self {
            TensorWord::Std => ctx.g.clone(),
            TensorWord::Dual(a) => match a.as_ref() {
                TensorWord::Std => ctx.g_inv.transpose(),
                _ => a.eval_in(ctx).inverse().expect("image of invertible element").transpose(),
            },
            TensorWord::Tensor(a, b) => a.eval_in(ctx).kron(&b.eval_in(ctx)),
            TensorWord::Exterior(a, r) => power_matrix(&a.eval_in(ctx), *r, false),
            TensorWord::Sym(a, r) => power_matrix(&a.eval_in(ctx), *r, true),
            TensorWord::DetPower(k) => QMatrix::scalar(1, ctx.det.pow(*k as i32)),
            TensorWord::Sum(a, b) => QMatrix::block_diag(&[a.eval_in(ctx), b.eval_in(ctx)]),
        }
    }

    /// Derived action of a Lie algebra element `x ∈ gl_n`.
    pub fn derived(&self, x: &QMatrix) -> QMatrix {
        match self {
            TensorWord::Std => x.clone(),
            TensorWord::Dual(a) => a.derived(x).transpose().scale(&-Q::one()),
            TensorWord::Tensor(a, b) => {
                let (da, db) = (a.derived(x), b.derived(x));
                let ia = QMatrix::identity(da.rows());
                let ib = QMatrix::identity(db.rows());
                &da.kron(&ib) + &ia.kron(&db)
            }
            TensorWord::Exterior(a, r) => power_derivation(&a.derived(x), *r, false),
            TensorWord::Sym(a, r) => power_derivation(&a.derived(x), *r, true),
            TensorWord::DetPower(k) => QMatrix::scalar(1, &x.trace() * &Q::from_int(*k)),
            TensorWord::Sum(a, b) => QMatrix::block_diag(&[a.derived(x), b.derived(x)]),
        }
    }

    /// Torus weight of each basis vector, as an exponent vector on the `n` diagonal entries.
    pub fn basis_exponents(&self, n: usize) -> Vec<Vec<i64>> {
        let add = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>();
        match self {
            TensorWord::Std => (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect(),
            TensorWord::Dual(a) => {
                a.basis_exponents(n).into_iter().map(|v| v.into_iter().map(|x| -x).collect()).collect()
            }
            TensorWord::Tensor(a, b) => {
                let (wa, wb) = (a.basis_exponents(n), b.basis_exponents(n));
                wa.iter().flat_map(|x| wb.iter().map(|y| add(x, y))).collect()
            }
            TensorWord::Exterior(a, r) | TensorWord::Sym(a, r) => {
                let wa = a.basis_exponents(n);
                let symmetric = matches!(self, TensorWord::Sym(..));
                power_basis(wa.len(), *r, symmetric)
                    .into_iter()
                    .map(|t| t.iter().fold(vec![0; n], |acc, &k| add(&acc, &wa[k])))
                    .collect()
            }
            TensorWord::DetPower(k) => vec![vec![*k; n]],
            TensorWord::Sum(a, b) => {
                let mut w = a.basis_exponents(n);
                w.extend(b.basis_exponents(n));
                w
            }
        }
    }

    /// Basis weights in the group's character lattice.
    pub fn basis_weights(&self, group: &RootDatum) -> Vec<Weight> {
        self.basis_exponents(group.std_dim()).iter().map(|e| group.from_std_exponents(e)).collect()
    }

    pub fn character(&self, group: &RootDatum) -> Character {
        Character::new(group, self.basis_weights(group).into_iter().map(|w| (w, 1)))
            .expect("basis weights have the group's rank")
    }
}

impl fmt::Display for TensorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensorWord::Std => write!(f, "std"),
            TensorWord::Dual(a) => write!(f, "dual({a})"),
            TensorWord::Tensor(a, b) => write!(f, "tensor({a},{b})"),
            TensorWord::Exterior(a, r) => write!(f, "ext({a},{r})"),
            TensorWord::Sym(a, r) => write!(f, "sym({a},{r})"),
            TensorWord::DetPower(k) => write!(f, "det({k})"),
            TensorWord::Sum(a, b) => write!(f, "sum({a},{b})"),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), String> {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected '{}' at offset {}", c as char, self.pos))
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn int(&mut self) -> Result<i64, String> {
        self.skip_ws();
        let start = self.pos;
        if self.s.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| format!("expected an integer at offset {start}"))
    }

    fn word(&mut self) -> Result<TensorWord, String> {
        let name = self.ident();
        if name == "std" {
            return Ok(TensorWord::Std);
        }
        self.expect(b'(')?;
        let out = match name.as_str() {
            "dual" => self.word()?.dual(),
            "tensor" | "sum" => {
                let a = self.word()?;
                self.expect(b',')?;
                let b = self.word()?;
                if name == "tensor" {
                    a.tensor(b)
                } else {
                    a.sum(b)
                }
            }
            "ext" | "sym" => {
                let a = self.word()?;
                self.expect(b',')?;
                let r = usize::try_from(self.int()?).map_err(|_| "negative power".to_string())?;
                if name == "ext" {
                    a.exterior(r)
                } else {
                    a.sym(r)
                }
            }
            "det" => TensorWord::DetPower(self.int()?),
            other => return Err(format!("unknown constructor '{other}'")),
        };
        self.expect(b')')?;
        Ok(out)
    }
}

impl Serialize for TensorWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum Tree {
    Std,
    Dual(Box<TensorWord>),
    Tensor(Box<TensorWord>, Box<TensorWord>),
    Exterior(Box<TensorWord>, usize),
    Sym(Box<TensorWord>, usize),
    DetPower(i64),
    Sum(Box<TensorWord>, Box<TensorWord>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WordRepr {
    Text(String),
    Tree(Tree),
}

impl<'de> Deserialize<'de> for TensorWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(match WordRepr::deserialize(deserializer)? {
            WordRepr::Text(s) if s == "std" => TensorWord::Std,
            WordRepr::Text(s) => s.parse().map_err(serde::de::Error::custom)?,
            WordRepr::Tree(t) => match t {
                Tree::Std => TensorWord::Std,
                Tree::Dual(a) => TensorWord::Dual(a),
                Tree::Tensor(a, b) => TensorWord::Tensor(a, b),
                Tree::Exterior(a, r) => TensorWord::Exterior(a, r),
                Tree::Sym(a, r) => TensorWord::Sym(a, r),
                Tree::DetPower(k) => TensorWord::DetPower(k),
                Tree::Sum(a, b) => TensorWord::Sum(a, b),
            },
        })
    }
}

impl FromStr for TensorWord {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut p = Parser { s: s.as_bytes(), pos: 0 };
        let w = p.word()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(format!("trailing input at offset {}", p.pos));
        }
        Ok(w)
    }
}
