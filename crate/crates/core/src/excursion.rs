//! Excursion operators on representation varieties of finitely presented groups.
//!
//! A point is a tuple of invertible rational matrices, one per generator, satisfying the
//! relators. An excursion datum evaluates `ξ((⊗ᵢ ρ_{Vᵢ}(σ(γᵢ)))·v)` for diagonal invariants `v`,
//! `ξ`. [`span_fit`] searches for an exact polynomial identity between such a function and trace
//! generators by sampling points of a free group.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{nullspace, rational_reconstruction, to_modp, Echelon, ModpEchelon, QMatrix};
use crate::rational::Q;
use crate::sampling::{point_rng, random_gl, random_sl, small_rational, SampleRng};
use crate::tensor_word::TensorWord;

const STREAM_FIT: u64 = 0x5501;
const STREAM_FIT_VERIFY: u64 = 0x5502;

/// A freely reduced word; each letter is `(generator, ±1)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord(Vec<(usize, i8)>);

impl GroupWord {
    pub fn new(letters: impl IntoIterator<Item = (usize, i8)>) -> Self {
        let mut out: Vec<(usize, i8)> = Vec::new();
        for (g, e) in letters {
            assert!(e == 1 || e == -1, "letter exponents are ±1");
            if out.last() == Some(&(g, -e)) {
                out.pop();
            } else {
                out.push((g, e));
            }
        }
        GroupWord(out)
    }

    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn generator(g: usize) -> Self {
        GroupWord(vec![(g, 1)])
    }

    /// Word from signed one-based generator indices: `[1, -2]` is `a·b⁻¹`.
    pub fn from_signed(letters: &[i64]) -> Result<Self> {
        letters
            .iter()
            .map(|&l| match l {
                0 => Err(Error::InvalidInput("generator index 0 in word (indices are one-based)".into())),
                l => Ok(((l.unsigned_abs() - 1) as usize, l.signum() as i8)),
            })
            .collect::<Result<Vec<_>>>()
            .map(GroupWord::new)
    }

    pub fn to_signed(&self) -> Vec<i64> {
        self.0.iter().map(|&(g, e)| (g as i64 + 1) * i64::from(e)).collect()
    }

    pub fn letters(&self) -> &[(usize, i8)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        GroupWord(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn concat(&self, other: &GroupWord) -> Self {
        GroupWord::new(self.0.iter().chain(&other.0).copied())
    }

    /// `w·self·w⁻¹`.
    pub fn conjugate_by(&self, w: &GroupWord) -> Self {
        w.concat(self).concat(&w.inverse())
    }

    /// Exponent sum of every generator (the abelianization).
    pub fn exponent_sums(&self, generators: usize) -> Vec<i64> {
        let mut out = vec![0; generators];
        for &(g, e) in &self.0 {
            out[g] += i64::from(e);
        }
        out
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|&(g, _)| g).max()
    }

    /// Substitutes a word for every generator.
    pub fn substitute(&self, images: &[GroupWord]) -> GroupWord {
        let mut out = GroupWord::identity();
        for &(g, e) in &self.0 {
            let piece = if e == 1 { images[g].clone() } else { images[g].inverse() };
            out = out.concat(&piece);
        }
        out
    }
}

impl Serialize for GroupWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_signed().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(deserializer)?;
        GroupWord::from_signed(&v).map_err(serde::de::Error::custom)
    }
}

/// All freely reduced words of length at most `max_len`, by length and then letter order
/// (`a < a⁻¹ < b < b⁻¹ < …`).
pub fn reduced_words(generators: usize, max_len: usize) -> Vec<GroupWord> {
    let letters: Vec<(usize, i8)> = (0..generators).flat_map(|g| [(g, 1), (g, -1)]).collect();
    let mut out = vec![GroupWord::identity()];
    let mut layer = vec![GroupWord::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &(g, e) in &letters {
                if w.0.last() == Some(&(g, -e)) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push((g, e));
                next.push(GroupWord(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FPGroup {
    pub generators: Vec<String>,
    #[serde(default)]
    pub relators: Vec<GroupWord>,
    /// Optional homomorphism to ℤ given on generators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<Vec<i64>>,
}

impl FPGroup {
    pub fn new(generators: Vec<String>, relators: Vec<GroupWord>, degree: Option<Vec<i64>>) -> Result<Self> {
        let g = FPGroup { generators, relators, degree };
        g.validate()?;
        Ok(g)
    }

    pub fn free(rank: usize) -> Self {
        FPGroup { generators: default_names(rank), relators: Vec::new(), degree: None }
    }

    /// `ℤ^rank` with commutator relators.
    pub fn free_abelian(rank: usize) -> Self {
        let mut relators = Vec::new();
        for i in 0..rank {
            for j in i + 1..rank {
                relators.push(GroupWord::new([(i, 1), (j, 1), (i, -1), (j, -1)]));
            }
        }
        FPGroup { generators: default_names(rank), relators, degree: None }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.generators.len();
        for r in &self.relators {
            if r.max_generator().is_some_and(|g| g >= k) {
                return Err(Error::InvalidInput(format!("relator {} uses an unknown generator", self.format_word(r))));
            }
        }
        if let Some(deg) = &self.degree {
            if deg.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: deg.len() });
            }
            for r in &self.relators {
                let d: i64 = r.exponent_sums(k).iter().zip(deg).map(|(a, b)| a * b).sum();
                if d != 0 {
                    return Err(Error::InvalidInput(format!(
                        "degree map does not kill relator {}",
                        self.format_word(r)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }

    pub fn word_degree(&self, w: &GroupWord) -> Option<i64> {
        let deg = self.degree.as_ref()?;
        Some(w.exponent_sums(self.rank()).iter().zip(deg).map(|(a, b)| a * b).sum())
    }

    pub fn format_word(&self, w: &GroupWord) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.0.iter()
            .map(|&(g, e)| {
                let name = self.generators.get(g).cloned().unwrap_or_else(|| format!("g{g}"));
                if e == 1 {
                    name
                } else {
                    format!("{name}^-1")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Parses `a*b^-1*a` style words over the generator names (`1` is the identity).
    pub fn parse_word(&self, s: &str) -> Result<GroupWord> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(GroupWord::identity());
        }
        let mut letters = Vec::new();
        for tok in s.split(['*', ' ']).filter(|t| !t.is_empty()) {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => {
                    (n, e.parse::<i64>().map_err(|_| Error::InvalidInput(format!("bad exponent in '{tok}'")))?)
                }
                None => (tok, 1),
            };
            let g = self
                .generators
                .iter()
                .position(|x| x == name)
                .ok_or_else(|| Error::InvalidInput(format!("unknown generator '{name}'")))?;
            let sign = if exp < 0 { -1 } else { 1 };
            letters.extend(std::iter::repeat_n((g, sign), exp.unsigned_abs() as usize));
        }
        Ok(GroupWord::new(letters))
    }
}

fn default_names(rank: usize) -> Vec<String> {
    (0..rank)
        .map(|i| if i < 26 { ((b'a' + i as u8) as char).to_string() } else { format!("g{i}") })
        .collect()
}

/// A homomorphism from a finitely presented group to `GL_n(ℚ)`, validated against the relators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationPoint {
    group: FPGroup,
    dim: usize,
    images: Vec<QMatrix>,
    inverses: Vec<QMatrix>,
}

impl Serialize for RepresentationPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            group: &'a FPGroup,
            dim: usize,
            images: &'a [QMatrix],
        }
        Repr { group: &self.group, dim: self.dim, images: &self.images }.serialize(serializer)
    }
}

/// Validates invertibility of generator images and that every relator maps to the identity.
pub fn check_representation(group: &FPGroup, images: Vec<QMatrix>) -> Result<RepresentationPoint> {
    group.validate()?;
    if images.len() != group.rank() {
        return Err(Error::DimensionMismatch { expected: group.rank(), got: images.len() });
    }
    let dim = images.first().map_or(0, QMatrix::rows);
    let mut inverses = Vec::with_capacity(images.len());
    for (m, name) in images.iter().zip(&group.generators) {
        if m.rows() != dim || m.cols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: m.rows().max(m.cols()) });
        }
        inverses.push(m.inverse().ok_or_else(|| Error::NonInvertible(name.clone()))?);
    }
    let point = RepresentationPoint { group: group.clone(), dim, images, inverses };
    for r in &point.group.relators {
        if !point.eval_word(r).is_identity() {
            return Err(Error::RelatorViolation(point.group.format_word(r)));
        }
    }
    Ok(point)
}

impl RepresentationPoint {
    pub fn group(&self) -> &FPGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn images(&self) -> &[QMatrix] {
        &self.images
    }

    pub fn eval_word(&self, w: &GroupWord) -> QMatrix {
        let mut acc = QMatrix::identity(self.dim);
        for &(g, e) in w.letters() {
            acc = if e == 1 { &acc * &self.images[g] } else { &acc * &self.inverses[g] };
        }
        acc
    }

    /// `h·σ·h⁻¹`.
    pub fn conjugate(&self, h: &QMatrix) -> Result<RepresentationPoint> {
        let h_inv = h.inverse().ok_or_else(|| Error::NonInvertible("conjugating matrix".into()))?;
        let images = self.images.iter().map(|m| &(h * m) * &h_inv).collect();
        check_representation(&self.group, images)
    }

    /// `σ ∘ ψ` for an endomorphism `ψ` given by generator images.
    pub fn precompose(&self, images: &[GroupWord]) -> Result<RepresentationPoint> {
        if images.len() != self.group.rank() {
            return Err(Error::DimensionMismatch { expected: self.group.rank(), got: images.len() });
        }
        check_representation(&self.group, images.iter().map(|w| self.eval_word(w)).collect())
    }

    pub fn direct_sum(&self, other: &RepresentationPoint) -> Result<RepresentationPoint> {
        if self.group != other.group {
            return Err(Error::InvalidInput("direct sum of points of different groups".into()));
        }
        let images = self.images.iter().zip(&other.images).map(|(a, b)| QMatrix::block_diag(&[a.clone(), b.clone()])).collect();
        check_representation(&self.group, images)
    }
}

/// Invariants of the diagonal Lie algebra action on `⊗ᵢ Vᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantTensors {
    pub dims: Vec<usize>,
    pub vectors: Vec<Vec<Q>>,
    pub covectors: Vec<Vec<Q>>,
}

/// Which Lie algebra acts: all of `gl_n`, or `sl_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    General,
    Special,
}

struct TensorLayout {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl TensorLayout {
    fn new(dims: Vec<usize>) -> Self {
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let total = dims.iter().product();
        TensorLayout { dims, strides, total }
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|&s| {
                let d = idx / s;
                idx %= s;
                d
            })
            .collect()
    }
}

/// Applies `Σᵢ 1⊗…⊗Xᵢ⊗…⊗1` to a basis vector, accumulating into `out`.
fn apply_derivation(layout: &TensorLayout, factors: &[QMatrix], idx: usize, out: &mut HashMap<usize, Q>) {
    let digits = layout.digits(idx);
    for (i, x) in factors.iter().enumerate() {
        let j = digits[i];
        for s in 0..x.rows() {
            let c = &x[(s, j)];
            if c.is_zero() {
                continue;
            }
            let target = idx - j * layout.strides[i] + s * layout.strides[i];
            *out.entry(target).or_insert_with(Q::zero) += c;
        }
    }
}

fn elementary(n: usize, a: usize, b: usize) -> QMatrix {
    let mut m = QMatrix::zeros(n, n);
    m[(a, b)] = Q::one();
    m
}

/// Bases of the diagonal invariants in `⊗ᵢ Vᵢ` and in its dual.
pub fn invariant_tensors(n: usize, words: &[TensorWord], symmetry: Symmetry) -> InvariantTensors {
    let layout = TensorLayout::new(words.iter().map(|w| w.dimension(n)).collect());
    let factor_weights: Vec<Vec<Vec<i64>>> = words.iter().map(|w| w.basis_exponents(n)).collect();
    let weight_of = |idx: usize| -> Vec<i64> {
        let mut acc = vec![0; n];
        for (i, d) in layout.digits(idx).into_iter().enumerate() {
            for (a, x) in acc.iter_mut().zip(&factor_weights[i][d]) {
                *a += x;
            }
        }
        acc
    };
    let admissible = |w: &[i64]| match symmetry {
        Symmetry::General => w.iter().all(|&x| x == 0),
        Symmetry::Special => w.iter().all(|&x| x == w[0]),
    };
    let weights: Vec<Vec<i64>> = (0..layout.total).map(weight_of).collect();
    let support: Vec<usize> = (0..layout.total).filter(|&i| admissible(&weights[i])).collect();
    let position: HashMap<usize, usize> = support.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let m = support.len();

    let mut vec_rows: Vec<Vec<Q>> = Vec::new();
    let mut cov_rows: Vec<Vec<Q>> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let x = elementary(n, a, b);
            let factors: Vec<QMatrix> = words.iter().map(|w| w.derived(&x)).collect();
            // Vectors: images of supported basis vectors must cancel.
            let mut by_target: BTreeMap<usize, Vec<Q>> = BTreeMap::new();
            for (k, &idx) in support.iter().enumerate() {
                let mut out = HashMap::new();
                apply_derivation(&layout, &factors, idx, &mut out);
                for (t, c) in out {
                    if !c.is_zero() {
                        by_target.entry(t).or_insert_with(|| vec![Q::zero(); m])[k] = c;
                    }
                }
            }
            vec_rows.extend(by_target.into_values());
            // Covectors: ξ must vanish on the image of every basis vector landing in the support.
            let mut shifted = weights_shift(n, a, b);
            shifted.iter_mut().for_each(|x| *x = -*x);
            for idx in 0..layout.total {
                let w = &weights[idx];
                let lands = match symmetry {
                    Symmetry::General => w.iter().zip(&shifted).all(|(p, q)| p == q),
                    Symmetry::Special => {
                        let v: Vec<i64> = w.iter().zip(&shifted).map(|(p, q)| p - q).collect();
                        admissible(&v)
                    }
                };
                if !lands {
                    continue;
                }
                let mut out = HashMap::new();
                apply_derivation(&layout, &factors, idx, &mut out);
                let mut row = vec![Q::zero(); m];
                let mut any = false;
                for (t, c) in out {
                    if let Some(&k) = position.get(&t) {
                        if !c.is_zero() {
                            row[k] = c;
                            any = true;
                        }
                    }
                }
                if any {
                    cov_rows.push(row);
                }
            }
        }
    }
    let embed = |basis: Vec<Vec<Q>>| -> Vec<Vec<Q>> {
        basis
            .into_iter()
            .map(|v| {
                let mut full = vec![Q::zero(); layout.total];
                for (k, x) in v.into_iter().enumerate() {
                    full[support[k]] = x;
                }
                full
            })
            .collect()
    };
    InvariantTensors {
        vectors: embed(nullspace(vec_rows, m)),
        covectors: embed(nullspace(cov_rows, m)),
        dims: layout.dims,
    }
}

/// Weight of `E_ab`: `e_a − e_b`.
fn weights_shift(n: usize, a: usize, b: usize) -> Vec<i64> {
    let mut w = vec![0; n];
    w[a] += 1;
    w[b] -= 1;
    w
}

/// Applies the derived diagonal action to a full tensor.
fn derive_tensor(n: usize, words: &[TensorWord], v: &[Q], x: &QMatrix, transpose: bool) -> Vec<Q> {
    let layout = TensorLayout::new(words.iter().map(|w| w.dimension(n)).collect());
    let factors: Vec<QMatrix> = words
        .iter()
        .map(|w| if transpose { w.derived(x).transpose() } else { w.derived(x) })
        .collect();
    let mut out = vec![Q::zero(); layout.total];
    for (idx, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut img = HashMap::new();
        apply_derivation(&layout, &factors, idx, &mut img);
        for (t, y) in img {
            out[t] += &(c * &y);
        }
    }
    out
}

/// Applies `⊗ᵢ Mᵢ` to a tensor with the given factor dimensions, one mode at a time.
pub fn apply_tensor_product(mats: &[QMatrix], v: &[Q]) -> Vec<Q> {
    let mut cur = v.to_vec();
    let mut cur_dims: Vec<usize> = mats.iter().map(QMatrix::cols).collect();
    for (i, m) in mats.iter().enumerate() {
        let left: usize = cur_dims[..i].iter().product();
        let right: usize = cur_dims[i + 1..].iter().product();
        let (din, dout) = (cur_dims[i], m.rows());
        let mut next = vec![Q::zero(); left * dout * right];
        for l in 0..left {
            for j in 0..din {
                for r in 0..right {
                    let x = &cur[(l * din + j) * right + r];
                    if x.is_zero() {
                        continue;
                    }
                    for s in 0..dout {
                        let c = &m[(s, j)];
                        if !c.is_zero() {
                            next[(l * dout + s) * right + r] += &(c * x);
                        }
                    }
                }
            }
        }
        cur = next;
        cur_dims[i] = dout;
    }
    cur
}

/// The tuple `(I, V_I, γ_I, v_I, ξ_I)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcursionDatum {
    pub words: Vec<TensorWord>,
    pub gammas: Vec<GroupWord>,
    pub vector: Vec<Q>,
    pub covector: Vec<Q>,
}

impl ExcursionDatum {
    /// The trace datum of `V`: `V ⊗ V^∨`, `γ_I = (γ, 1)`, unit and counit.
    pub fn trace(rep: &TensorWord, gamma: &GroupWord, n: usize) -> Self {
        let d = rep.dimension(n);
        let unit: Vec<Q> = (0..d * d).map(|k| if k / d == k % d { Q::one() } else { Q::zero() }).collect();
        ExcursionDatum {
            words: vec![rep.clone(), rep.clone().dual()],
            gammas: vec![gamma.clone(), GroupWord::identity()],
            vector: unit.clone(),
            covector: unit,
        }
    }

    pub fn tensor_dimension(&self, n: usize) -> usize {
        self.words.iter().map(|w| w.dimension(n)).product()
    }

    /// Shapes agree and `v`, `ξ` are killed by the diagonal Lie algebra.
    pub fn validate(&self, n: usize, symmetry: Symmetry) -> Result<()> {
        if self.words.len() != self.gammas.len() || self.words.is_empty() {
            return Err(Error::InvalidInput("one tensor word and one group word per index".into()));
        }
        let d = self.tensor_dimension(n);
        for len in [self.vector.len(), self.covector.len()] {
            if len != d {
                return Err(Error::DimensionMismatch { expected: d, got: len });
            }
        }
        let mut algebra: Vec<QMatrix> = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    algebra.push(elementary(n, a, b));
                }
            }
        }
        match symmetry {
            Symmetry::General => algebra.extend((0..n).map(|a| elementary(n, a, a))),
            Symmetry::Special => algebra.extend((1..n).map(|a| &elementary(n, a - 1, a - 1) - &elementary(n, a, a))),
        }
        for x in &algebra {
            if derive_tensor(n, &self.words, &self.vector, x, false).iter().any(|c| !c.is_zero()) {
                return Err(Error::InvalidInput("v_I is not invariant under the diagonal action".into()));
            }
            if derive_tensor(n, &self.words, &self.covector, x, true).iter().any(|c| !c.is_zero()) {
                return Err(Error::InvalidInput("ξ_I is not invariant under the diagonal action".into()));
            }
        }
        Ok(())
    }

    /// Scaling multidegree: the value is multiplied by `∏ c_g^{d_g}` when every generator image
    /// is multiplied by the scalar `c_g`. `None` when a word has mixed degree.
    pub fn multidegree(&self, n: usize, generators: usize) -> Option<Vec<i64>> {
        let mut out = vec![0; generators];
        for (w, g) in self.words.iter().zip(&self.gammas) {
            let d = w.scaling_degree(n)?;
            for (o, e) in out.iter_mut().zip(g.exponent_sums(generators)) {
                *o += d * e;
            }
        }
        Some(out)
    }
}

pub fn excursion_value(datum: &ExcursionDatum, point: &RepresentationPoint) -> Result<Q> {
    let n = point.dim();
    if datum.words.len() != datum.gammas.len() {
        return Err(Error::InvalidInput("one tensor word and one group word per index".into()));
    }
    let d = datum.tensor_dimension(n);
    if datum.vector.len() != d || datum.covector.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: datum.vector.len() });
    }
    let mut mats = Vec::with_capacity(datum.words.len());
    for (w, g) in datum.words.iter().zip(&datum.gammas) {
        if g.max_generator().is_some_and(|x| x >= point.group().rank()) {
            return Err(Error::InvalidInput("group word uses an unknown generator".into()));
        }
        let m = point.eval_word(g);
        let inv = point.eval_word(&g.inverse());
        mats.push(w.evaluate_with_inverse(&m, &inv)?);
    }
    let image = apply_tensor_product(&mats, &datum.vector);
    Ok(datum.covector.iter().zip(&image).map(|(a, b)| a * b).sum())
}

/// `tr ρ_V(σ(x))`.
pub fn hecke_value(rep: &TensorWord, x: &GroupWord, point: &RepresentationPoint) -> Result<Q> {
    if x.max_generator().is_some_and(|g| g >= point.group().rank()) {
        return Err(Error::InvalidInput("group word uses an unknown generator".into()));
    }
    let m = point.eval_word(x);
    let inv = point.eval_word(&x.inverse());
    Ok(rep.evaluate_with_inverse(&m, &inv)?.trace())
}

/// A trace function `σ ↦ tr ρ_V(σ(x))` used as a polynomial variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceGenerator {
    pub rep: TensorWord,
    pub word: GroupWord,
}

impl TraceGenerator {
    pub fn new(rep: TensorWord, word: GroupWord) -> Self {
        TraceGenerator { rep, word }
    }

    pub fn std(word: GroupWord) -> Self {
        TraceGenerator { rep: TensorWord::Std, word }
    }

    pub fn value(&self, point: &RepresentationPoint) -> Result<Q> {
        hecke_value(&self.rep, &self.word, point)
    }

    fn multidegree(&self, n: usize, generators: usize) -> Option<Vec<i64>> {
        let d = self.rep.scaling_degree(n)?;
        Some(self.word.exponent_sums(generators).into_iter().map(|e| d * e).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitTarget {
    Datum { datum: ExcursionDatum },
    Trace { generator: TraceGenerator },
}

impl FitTarget {
    pub fn value(&self, point: &RepresentationPoint) -> Result<Q> {
        match self {
            FitTarget::Datum { datum } => excursion_value(datum, point),
            FitTarget::Trace { generator } => generator.value(point),
        }
    }

    fn multidegree(&self, n: usize, generators: usize) -> Option<Vec<i64>> {
        match self {
            FitTarget::Datum { datum } => datum.multidegree(n, generators),
            FitTarget::Trace { generator } => generator.multidegree(n, generators),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Monomial {
    pub coefficient: Q,
    pub exponents: Vec<u32>,
}

/// A polynomial in the generator values, as a sorted list of monomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Polynomial {
    pub variables: usize,
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn evaluate(&self, values: &[Q]) -> Q {
        self.terms.iter().map(|t| &t.coefficient * &monomial_value(&t.exponents, values)).sum()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.exponents.iter().sum()).max().unwrap_or(0)
    }

    /// Human-readable form over variable names.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            for (v, &e) in t.exponents.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[v].clone()),
                    e => factors.push(format!("{}^{e}", names[v])),
                }
            }
            let (neg, mag) = (t.coefficient.is_negative(), t.coefficient.abs());
            let body = match (factors.is_empty(), mag.is_one()) {
                (true, _) => mag.to_string(),
                (false, true) => factors.join("*"),
                (false, false) => format!("{mag}*{}", factors.join("*")),
            };
            if i == 0 {
                out.push_str(if neg { "-" } else { "" });
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.variables).map(|i| format!("x{i}")).collect();
        f.write_str(&self.render(&names))
    }
}

fn monomial_value(exps: &[u32], values: &[Q]) -> Q {
    exps.iter().zip(values).filter(|(e, _)| **e > 0).map(|(&e, v)| v.pow(e as i32)).product()
}

/// Exponent vectors of total degree at most `degree`, graded then reverse-lexicographic
/// (higher powers of earlier variables first).
fn monomials(vars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(vars: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == vars {
            if left == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            rec(vars, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for d in (0..=degree).rev() {
        rec(vars, d, &mut Vec::new(), &mut out);
    }
    out
}

/// How random points of a free group are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSampler {
    /// Invertible matrices with small rational entries.
    General,
    /// Determinant-one matrices.
    Special,
}

impl PointSampler {
    pub fn symmetry(self) -> Symmetry {
        match self {
            PointSampler::General => Symmetry::General,
            PointSampler::Special => Symmetry::Special,
        }
    }
}

/// Random point of a free group in dimension `n`.
pub fn random_point(group: &FPGroup, n: usize, sampler: PointSampler, rng: &mut SampleRng) -> Result<RepresentationPoint> {
    if !group.is_free() {
        return Err(Error::InvalidInput("random points are only drawn for free groups".into()));
    }
    let images = (0..group.rank())
        .map(|_| match sampler {
            PointSampler::General => random_gl(n, rng),
            PointSampler::Special if n == 2 => random_sl2(rng),
            PointSampler::Special => random_sl(n, rng),
        })
        .collect();
    check_representation(group, images)
}

/// `[[a, b], [c, (1 + bc)/a]]` with `a, b, c` from the small pool.
fn random_sl2(rng: &mut SampleRng) -> QMatrix {
    loop {
        let (a, b, c) = (small_rational(rng), small_rational(rng), small_rational(rng));
        if a.is_zero() {
            continue;
        }
        let d = &(&Q::one() + &(&b * &c)) / &a;
        return QMatrix::from_rows(vec![vec![a, b], vec![c, d]]);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpanFitConfig {
    pub degree: u32,
    /// Maximum number of sample points, verification included.
    pub budget: usize,
    pub seed: u64,
    pub batch: usize,
    pub verification: usize,
    pub sampler: PointSampler,
}

impl Default for SpanFitConfig {
    fn default() -> Self {
        SpanFitConfig { degree: 6, budget: 500, seed: 0, batch: 8, verification: 50, sampler: PointSampler::General }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FitOutcome {
    Fit {
        polynomial: Polynomial,
        /// Points used to determine the fit.
        samples: usize,
        rank: usize,
        monomials: usize,
        verified_on: usize,
    },
    /// No polynomial of this degree matches the sampled values (not a proof of non-membership
    /// beyond the degree bound).
    NotInSpan { degree: u32, samples: usize, rank: usize },
    Inconclusive { samples: usize, reason: String },
}

/// Row of generator values and target value at one sampled point.
fn sample_row(
    group: &FPGroup,
    n: usize,
    cfg: &SpanFitConfig,
    stream: u64,
    index: u64,
    target: &FitTarget,
    generators: &[TraceGenerator],
) -> Result<(Vec<Q>, Q)> {
    let mut rng = point_rng(cfg.seed, stream, index);
    let point = random_point(group, n, cfg.sampler, &mut rng)?;
    let vals = generators.iter().map(|g| g.value(&point)).collect::<Result<Vec<_>>>()?;
    Ok((vals, target.value(&point)?))
}

fn degree_matches(deg: &[i64], target: &[i64], modulus: Option<i64>) -> bool {
    deg.iter().zip(target).all(|(a, b)| match modulus {
        Some(m) => (a - b).rem_euclid(m) == 0,
        None => a == b,
    })
}

/// Searches for a polynomial of degree at most `cfg.degree` in the generator values that equals
/// the target on sampled points of the free group `group` in dimension `n`.
pub fn span_fit(
    group: &FPGroup,
    n: usize,
    target: &FitTarget,
    generators: &[TraceGenerator],
    cfg: &SpanFitConfig,
) -> Result<FitOutcome> {
    if !group.is_free() {
        return Err(Error::InvalidInput("span_fit samples free groups only".into()));
    }
    let k = group.rank();
    let modulus = match cfg.sampler {
        PointSampler::General => None,
        PointSampler::Special => Some(n as i64),
    };
    let gen_degrees: Option<Vec<Vec<i64>>> = generators.iter().map(|g| g.multidegree(n, k)).collect();
    let target_degree = target.multidegree(n, k);
    // Low degrees first, so pivot columns (and the reported fit) favour low-degree monomials
    // when the generators are algebraically dependent.
    let basis: Vec<Vec<u32>> = monomials(generators.len(), cfg.degree)
        .into_iter()
        .rev()
        .filter(|m| match (&gen_degrees, &target_degree) {
            (Some(gd), Some(td)) => {
                let deg: Vec<i64> = (0..k).map(|c| m.iter().zip(gd).map(|(&e, d)| i64::from(e) * d[c]).sum()).collect();
                degree_matches(&deg, td, modulus)
            }
            _ => true,
        })
        .collect();
    let cols = basis.len();
    if cols == 0 {
        return Ok(FitOutcome::NotInSpan { degree: cfg.degree, samples: 0, rank: 0 });
    }

    let mut system = FitSystem::new(cols);
    let mut drawn = 0usize;
    let mut verify_index = 0u64;
    let mut stalls = 0;
    let fit_budget = cfg.budget.saturating_sub(cfg.verification);
    let row_of = |vals: &[Q], t: &Q| {
        let mut row: Vec<Q> = basis.iter().map(|m| monomial_value(m, vals)).collect();
        row.push(t.clone());
        row
    };
    loop {
        // Enlarge until two consecutive batches add no rank.
        while stalls < 2 {
            if drawn >= fit_budget {
                return Ok(FitOutcome::Inconclusive {
                    samples: drawn,
                    reason: format!("rank did not stabilize within {} samples", cfg.budget),
                });
            }
            let count = cfg.batch.min(fit_budget - drawn);
            let batch: Vec<(Vec<Q>, Q)> = (drawn..drawn + count)
                .into_par_iter()
                .map(|i| sample_row(group, n, cfg, STREAM_FIT, i as u64, target, generators))
                .collect::<Result<_>>()?;
            drawn += count;
            let mut grew = false;
            for (vals, t) in batch {
                grew |= system.push(row_of(&vals, &t));
            }
            stalls = if grew { 0 } else { stalls + 1 };
        }
        let augmented_rank = system.rank();
        let Some(coeffs) = system.solve() else {
            return Ok(FitOutcome::NotInSpan { degree: cfg.degree, samples: drawn, rank: augmented_rank });
        };
        let mut terms: Vec<Monomial> = basis
            .iter()
            .zip(&coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| Monomial { coefficient: c.clone(), exponents: m.clone() })
            .collect();
        terms.sort_by(|a, b| {
            let (da, db): (u32, u32) = (a.exponents.iter().sum(), b.exponents.iter().sum());
            db.cmp(&da).then_with(|| b.exponents.cmp(&a.exponents))
        });
        let polynomial = Polynomial { variables: generators.len(), terms };

        let count = cfg.verification;
        let checks: Vec<(Vec<Q>, Q)> = (verify_index..verify_index + count as u64)
            .into_par_iter()
            .map(|i| sample_row(group, n, cfg, STREAM_FIT_VERIFY, i, target, generators))
            .collect::<Result<_>>()?;
        verify_index += count as u64;
        let failures: Vec<&(Vec<Q>, Q)> = checks.iter().filter(|(v, t)| polynomial.evaluate(v) != *t).collect();
        if failures.is_empty() {
            return Ok(FitOutcome::Fit { polynomial, samples: drawn, rank: augmented_rank, monomials: cols, verified_on: count });
        }
        if drawn + failures.len() + count > cfg.budget {
            return Ok(FitOutcome::Inconclusive {
                samples: drawn,
                reason: "fit failed fresh verification and the budget is exhausted".into(),
            });
        }
        for (vals, t) in failures {
            system.push(row_of(vals, t));
            drawn += 1;
        }
        stalls = 0;
    }
}

/// Sampled linear system `Σ cⱼ·mⱼ(x) = t(x)`, rows augmented by the target value. Rank is
/// tracked modulo a large prime; solutions are computed and checked exactly.
struct FitSystem {
    cols: usize,
    rows: Vec<Vec<Q>>,
    modp: ModpEchelon,
    /// Set once a row had no modular image; forces the exact path.
    exact_only: bool,
}

impl FitSystem {
    fn new(cols: usize) -> Self {
        FitSystem { cols, rows: Vec::new(), modp: ModpEchelon::new(), exact_only: false }
    }

    fn rank(&self) -> usize {
        self.modp.rank()
    }

    /// Adds a row; returns `true` when the (modular) rank grew.
    fn push(&mut self, row: Vec<Q>) -> bool {
        let image: Option<Vec<u64>> = row.iter().map(to_modp).collect();
        self.rows.push(row);
        match image {
            Some(v) => self.modp.insert(&v),
            None => {
                self.exact_only = true;
                false
            }
        }
    }

    /// Solution with free variables set to zero, `None` when the system is inconsistent. The
    /// modular solution is lifted by rational reconstruction and accepted only if it satisfies
    /// every row exactly; otherwise the system is eliminated over `Q`.
    fn solve(&self) -> Option<Vec<Q>> {
        if !self.exact_only {
            if let Some(m) = self.modp.least_pivot_solution(self.cols) {
                let lifted: Option<Vec<Q>> = m.iter().map(|&v| rational_reconstruction(v)).collect();
                if let Some(x) = lifted.filter(|x| self.rows.iter().all(|r| self.satisfies(r, x))) {
                    return Some(x);
                }
            }
        }
        let mut echelon = Echelon::new();
        for r in &self.rows {
            echelon.insert(r);
        }
        solve_least_pivot(&echelon, self.cols)
    }

    fn satisfies(&self, row: &[Q], x: &[Q]) -> bool {
        let lhs: Q = row[..self.cols].iter().zip(x).filter(|(_, c)| !c.is_zero()).map(|(a, c)| a * c).sum();
        lhs == row[self.cols]
    }
}

/// Solution of the augmented system held in reduced echelon form (last column = right-hand
/// side) with free variables set to zero; `None` when inconsistent.
fn solve_least_pivot(echelon: &Echelon, cols: usize) -> Option<Vec<Q>> {
    let mut x = vec![Q::zero(); cols];
    for row in echelon.basis() {
        let p = row.iter().position(|c| !c.is_zero()).expect("nonzero echelon row");
        if p == cols {
            return None;
        }
        x[p] = row[cols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    fn fit(target: FitTarget, gens: &[TraceGenerator], sampler: PointSampler, degree: u32) -> FitOutcome {
        let cfg = SpanFitConfig { degree, sampler, ..SpanFitConfig::default() };
        span_fit(&FPGroup::free(2), 2, &target, gens, &cfg).unwrap()
    }

    fn fricke_generators() -> Vec<TraceGenerator> {
        [vec![1], vec![2], vec![1, 2]]
            .iter()
            .map(|w| TraceGenerator::std(GroupWord::from_signed(w).unwrap()))
            .collect()
    }

    fn terms(outcome: &FitOutcome) -> Vec<(Q, Vec<u32>)> {
        match outcome {
            FitOutcome::Fit { polynomial, .. } => {
                polynomial.terms.iter().map(|t| (t.coefficient.clone(), t.exponents.clone())).collect()
            }
            other => panic!("expected a fit, got {other:?}"),
        }
    }

    #[test]
    fn words_reduce_freely() {
        let w = GroupWord::from_signed(&[1, 2, -2, -1, 1]).unwrap();
        assert_eq!(w.to_signed(), vec![1]);
        let c = GroupWord::from_signed(&[1, 2, -1, -2]).unwrap();
        assert_eq!(c.concat(&c.inverse()), GroupWord::identity());
        assert_eq!(c.exponent_sums(2), vec![0, 0]);
        assert!(GroupWord::from_signed(&[0]).is_err());
        assert_eq!(reduced_words(2, 3).len(), 1 + 4 + 12 + 36);
        assert_eq!(reduced_words(1, 4).len(), 9);
    }

    #[test]
    fn word_syntax_roundtrips() {
        let g = FPGroup::free(2);
        let w = g.parse_word("a*b^-1*a^2").unwrap();
        assert_eq!(w.to_signed(), vec![1, -2, 1, 1]);
        assert_eq!(g.format_word(&w), "a*b^-1*a*a");
        assert_eq!(g.parse_word(&g.format_word(&w)).unwrap(), w);
        assert!(g.parse_word("c").is_err());
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(json, "[1,-2,1,1]");
    }

    #[test]
    fn representations_are_checked() {
        let z2 = FPGroup::free_abelian(2);
        let a = QMatrix::from_ints(&[&[2, 0], &[0, 3]]);
        let b = QMatrix::from_ints(&[&[5, 0], &[0, 1]]);
        assert!(check_representation(&z2, vec![a.clone(), b]).is_ok());
        let u = QMatrix::from_ints(&[&[1, 1], &[0, 1]]);
        assert!(matches!(check_representation(&z2, vec![a.clone(), u]), Err(Error::RelatorViolation(_))));
        let s = QMatrix::from_ints(&[&[1, 1], &[1, 1]]);
        assert!(matches!(check_representation(&z2, vec![a, s]), Err(Error::NonInvertible(_))));
        let bad = FPGroup { generators: vec!["a".into()], relators: vec![GroupWord::generator(0)], degree: Some(vec![1]) };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn invariant_counts() {
        let std = TensorWord::std();
        let dual = TensorWord::std().dual();
        let pair = invariant_tensors(3, &[std.clone(), dual.clone()], Symmetry::General);
        assert_eq!((pair.vectors.len(), pair.covectors.len()), (1, 1));
        for (n, k) in [(2, 2), (3, 2), (3, 3)] {
            let mut words = vec![std.clone(); k];
            words.extend(vec![dual.clone(); k]);
            let inv = invariant_tensors(n, &words, Symmetry::General);
            let fact: usize = (1..=k).product();
            assert_eq!(inv.vectors.len(), fact, "n={n} k={k}");
            assert_eq!(inv.covectors.len(), fact);
        }
        // Only the determinant pairing survives for SL(2).
        assert_eq!(invariant_tensors(2, &[std.clone(), std.clone()], Symmetry::General).vectors.len(), 0);
        let sl = invariant_tensors(2, &[std.clone(), std], Symmetry::Special);
        assert_eq!(sl.vectors, vec![vec![q(0), q(-1), q(1), q(0)]]);
    }

    #[test]
    fn trace_datum_is_the_trace() {
        let g = FPGroup::free(2);
        let p = check_representation(
            &g,
            vec![QMatrix::from_ints(&[&[1, 2], &[3, 4]]), QMatrix::from_ints(&[&[0, 1], &[-1, 1]])],
        )
        .unwrap();
        let ab = GroupWord::from_signed(&[1, 2]).unwrap();
        let d = ExcursionDatum::trace(&TensorWord::std(), &ab, 2);
        d.validate(2, Symmetry::General).unwrap();
        assert_eq!(excursion_value(&d, &p).unwrap(), p.eval_word(&ab).trace());
        let sym2 = TensorWord::std().sym(2);
        let d2 = ExcursionDatum::trace(&sym2, &ab, 2);
        assert_eq!(excursion_value(&d2, &p).unwrap(), hecke_value(&sym2, &ab, &p).unwrap());
        let mut broken = d.clone();
        broken.vector[1] = q(1);
        assert!(broken.validate(2, Symmetry::General).is_err());
    }

    #[test]
    fn fricke_commutator_identity() {
        let comm = GroupWord::from_signed(&[1, 2, -1, -2]).unwrap();
        let out = fit(FitTarget::Trace { generator: TraceGenerator::std(comm) }, &fricke_generators(), PointSampler::Special, 3);
        assert_eq!(
            terms(&out),
            vec![
                (q(-1), vec![1, 1, 1]),
                (q(1), vec![2, 0, 0]),
                (q(1), vec![0, 2, 0]),
                (q(1), vec![0, 0, 2]),
                (q(-2), vec![0, 0, 0]),
            ]
        );
    }

    #[test]
    fn square_trace_and_generator_extraction() {
        let gens = fricke_generators();
        let a2 = GroupWord::from_signed(&[1, 1]).unwrap();
        let out = fit(FitTarget::Trace { generator: TraceGenerator::std(a2) }, &gens, PointSampler::Special, 4);
        assert_eq!(terms(&out), vec![(q(1), vec![2, 0, 0]), (q(-2), vec![0, 0, 0])]);
        let out = fit(FitTarget::Trace { generator: gens[2].clone() }, &gens, PointSampler::Special, 4);
        assert_eq!(terms(&out), vec![(q(1), vec![0, 0, 1])]);
    }

    #[test]
    fn inverse_trace_needs_determinant() {
        let a = GroupWord::generator(0);
        let gens = vec![TraceGenerator::std(a.clone()), TraceGenerator::new(TensorWord::det_power(-1), a.clone())];
        let target = FitTarget::Trace { generator: TraceGenerator::new(TensorWord::std().dual(), a) };
        assert_eq!(terms(&fit(target, &gens, PointSampler::General, 3)), vec![(q(1), vec![1, 1])]);
    }

    #[test]
    fn missing_generator_is_detected() {
        let ab = GroupWord::from_signed(&[1, 2]).unwrap();
        let gens = fricke_generators()[..2].to_vec();
        let out = fit(FitTarget::Trace { generator: TraceGenerator::std(ab) }, &gens, PointSampler::Special, 4);
        assert!(matches!(out, FitOutcome::NotInSpan { .. }), "{out:?}");
        let tiny = SpanFitConfig { budget: 60, degree: 6, sampler: PointSampler::General, ..SpanFitConfig::default() };
        let g5 = FPGroup::free(2);
        let target = FitTarget::Trace { generator: TraceGenerator::std(GroupWord::from_signed(&[1, 2, 1, 2]).unwrap()) };
        let all: Vec<TraceGenerator> = reduced_words(2, 2).into_iter().skip(1).map(TraceGenerator::std).collect();
        assert!(matches!(span_fit(&g5, 2, &target, &all, &tiny).unwrap(), FitOutcome::Inconclusive { .. }));
    }

    #[test]
    fn span_fit_rejects_relators() {
        let cfg = SpanFitConfig::default();
        let t = FitTarget::Trace { generator: TraceGenerator::std(GroupWord::generator(0)) };
        assert!(span_fit(&FPGroup::free_abelian(2), 2, &t, &[], &cfg).is_err());
    }

    #[test]
    fn tensor_product_matches_kron() {
        let a = QMatrix::from_ints(&[&[1, 2], &[3, 4]]);
        let b = QMatrix::from_ints(&[&[0, 1, 2], &[1, 0, 5], &[2, 2, 1]]);
        let v: Vec<Q> = (1..=6).map(q).collect();
        assert_eq!(apply_tensor_product(&[a.clone(), b.clone()], &v), a.kron(&b).mul_vec(&v));
    }

    fn small_matrix() -> impl Strategy<Value = QMatrix> {
        proptest::collection::vec(-3i64..=3, 4)
            .prop_map(|v| QMatrix::from_rows(vec![vec![q(v[0]), q(v[1])], vec![q(v[2]), q(v[3])]]))
            .prop_filter("invertible", QMatrix::is_invertible)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn excursion_values_are_conjugation_invariant(
            a in small_matrix(), b in small_matrix(), h in small_matrix(),
            w in proptest::collection::vec(prop_oneof![Just(1i64), Just(-1), Just(2), Just(-2)], 0..5),
            pick in 0usize..3,
        ) {
            let g = FPGroup::free(2);
            let p = check_representation(&g, vec![a, b]).unwrap();
            let gamma = GroupWord::from_signed(&w).unwrap();
            let std = TensorWord::std();
            let words = [vec![std.clone(), std.clone().dual()], vec![std.clone(), std.clone(), std.clone().dual(), std.dual()]];
            let words = &words[pick.min(1)];
            let inv = invariant_tensors(2, words, Symmetry::General);
            let vector = inv.vectors[pick % inv.vectors.len()].clone();
            let covector = inv.covectors[0].clone();
            let gammas = (0..words.len()).map(|i| if i % 2 == 0 { gamma.clone() } else { GroupWord::generator(i % 2) }).collect();
            let d = ExcursionDatum { words: words.clone(), gammas, vector, covector };
            d.validate(2, Symmetry::General).unwrap();
            prop_assert_eq!(excursion_value(&d, &p).unwrap(), excursion_value(&d, &p.conjugate(&h).unwrap()).unwrap());
        }

        #[test]
        fn reduction_is_idempotent(w in proptest::collection::vec(prop_oneof![Just(1i64), Just(-1), Just(2), Just(-2)], 0..12)) {
            let r = GroupWord::from_signed(&w).unwrap();
            prop_assert_eq!(GroupWord::from_signed(&r.to_signed()).unwrap(), r.clone());
            prop_assert!(r.letters().windows(2).all(|p| p[0].0 != p[1].0 || p[0].1 == p[1].1));
        }
    }
}
