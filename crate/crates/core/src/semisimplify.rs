//! Semisimplification of matrix representations, commutants, Frobenius intertwiners and
//! weight-graded eigenvalue multisets.

use std::collections::{BTreeMap, HashSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::excursion::{check_representation, GroupWord, RepresentationPoint};
use crate::matrix::{nullspace, Echelon, QMatrix};
use crate::rational::Q;
use crate::sampling::{point_rng, small_int};

const STREAM_UNIT: u64 = 0x6601;

/// A unital subalgebra of `n×n` matrices, given by a basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixAlgebra {
    pub ambient: usize,
    pub basis: Vec<QMatrix>,
}

fn flat(m: &QMatrix) -> Vec<Q> {
    m.as_flat().to_vec()
}

impl MatrixAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn full(n: usize) -> Self {
        let basis = (0..n * n)
            .map(|k| {
                let mut m = QMatrix::zeros(n, n);
                m[(k / n, k % n)] = Q::one();
                m
            })
            .collect();
        MatrixAlgebra { ambient: n, basis }
    }

    /// Span closure of the identity under right multiplication by `generators`.
    pub fn generated_by(n: usize, generators: &[QMatrix]) -> Self {
        let mut ech = Echelon::new();
        let mut basis = Vec::new();
        let mut queue = vec![QMatrix::identity(n)];
        while let Some(x) = queue.pop() {
            if !ech.insert(&flat(&x)) {
                continue;
            }
            for g in generators {
                let y = &x * g;
                if !ech.contains(&flat(&y)) {
                    queue.push(y);
                }
            }
            basis.push(x);
        }
        MatrixAlgebra { ambient: n, basis }
    }

    fn echelon(&self) -> Echelon {
        let mut e = Echelon::new();
        for b in &self.basis {
            e.insert(&flat(b));
        }
        e
    }

    pub fn contains(&self, m: &QMatrix) -> bool {
        self.echelon().contains(&flat(m))
    }

    pub fn is_closed(&self) -> bool {
        let e = self.echelon();
        self.basis.iter().all(|a| self.basis.iter().all(|b| e.contains(&flat(&(a * b)))))
    }

    /// Gram matrix of `(x, y) ↦ tr(xy)` on the basis.
    pub fn trace_form(&self) -> QMatrix {
        let d = self.dim();
        let mut g = QMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let t = (&self.basis[i] * &self.basis[j]).trace();
                g[(i, j)] = t.clone();
                g[(j, i)] = t;
            }
        }
        g
    }

    fn combination(&self, coeffs: &[Q]) -> QMatrix {
        let mut acc = QMatrix::zeros(self.ambient, self.ambient);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = &acc + &b.scale(c);
            }
        }
        acc
    }
}

/// Unital algebra generated by the generator images and their inverses.
pub fn enveloping_algebra(point: &RepresentationPoint) -> MatrixAlgebra {
    let mut gens: Vec<QMatrix> = point.images().to_vec();
    for m in point.images() {
        gens.push(m.inverse().expect("validated point"));
    }
    MatrixAlgebra::generated_by(point.dim(), &gens)
}

/// Span of all products `x·y` with `x ∈ left`, `y ∈ right`.
fn product_span(n: usize, left: &[QMatrix], right: &[QMatrix]) -> Vec<QMatrix> {
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for x in left {
        for y in right {
            let p = x * y;
            if ech.insert(&flat(&p)) {
                out.push(p);
            }
        }
    }
    debug_assert!(out.len() <= n * n);
    out
}

/// Powers `J⁰ = A·1, J, J², …` of an ideal, ending with the first zero power.
fn ideal_powers(ideal: &MatrixAlgebra) -> Result<Vec<Vec<QMatrix>>> {
    let n = ideal.ambient;
    let mut powers = vec![vec![QMatrix::identity(n)], ideal.basis.clone()];
    while !powers.last().unwrap().is_empty() {
        if powers.len() > n + 1 {
            return Err(Error::Internal("radical is not nilpotent".into()));
        }
        let next = product_span(n, powers.last().unwrap(), &ideal.basis);
        powers.push(next);
    }
    Ok(powers)
}

/// Kernel of the trace form, verified nilpotent.
pub fn radical(algebra: &MatrixAlgebra) -> Result<MatrixAlgebra> {
    let gram = algebra.trace_form();
    let basis: Vec<QMatrix> =
        nullspace(gram.to_rows(), algebra.dim()).iter().map(|c| algebra.combination(c)).collect();
    let j = MatrixAlgebra { ambient: algebra.ambient, basis };
    ideal_powers(&j)?;
    Ok(j)
}

/// Words up to a length bound checked by a trace or characteristic-polynomial comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceCertificate {
    pub length_bound: usize,
    pub words_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemisimplificationResult {
    /// Bases of `V ⊇ JV ⊇ J²V ⊇ …`, ending before the zero space.
    pub flag: Vec<Vec<Vec<Q>>>,
    pub block_sizes: Vec<usize>,
    /// Columns: complements of successive flag steps; conjugating by it block-triangularizes.
    pub base_change: QMatrix,
    /// Per graded piece, the induced image of every generator.
    pub blocks: Vec<Vec<QMatrix>>,
    pub radical_dimension: usize,
    pub point: RepresentationPoint,
    pub certificate: TraceCertificate,
}

fn column_span(mats: &[QMatrix], n: usize) -> Echelon {
    let mut e = Echelon::new();
    for m in mats {
        for j in 0..n {
            e.insert(&m.col(j));
        }
    }
    e
}

/// Visits every freely reduced word of length at most `bound` together with its image under each
/// point, depth first; stops early when `visit` returns `false`. Returns the number visited.
pub fn walk_words(
    points: &[&RepresentationPoint],
    bound: usize,
    mut visit: impl FnMut(&[(usize, i8)], &[QMatrix]) -> bool,
) -> usize {
    let rank = points[0].group().rank();
    let letters: Vec<(usize, i8)> = (0..rank).flat_map(|g| [(g, 1), (g, -1)]).collect();
    let images: Vec<Vec<QMatrix>> = points
        .iter()
        .map(|p| letters.iter().map(|&(g, e)| p.eval_word(&GroupWord::new([(g, e)]))).collect())
        .collect();
    let mut word = Vec::new();
    let mut count = 0;
    let start: Vec<QMatrix> = points.iter().map(|p| QMatrix::identity(p.dim())).collect();
    fn rec(
        word: &mut Vec<(usize, i8)>,
        mats: &[QMatrix],
        bound: usize,
        letters: &[(usize, i8)],
        images: &[Vec<QMatrix>],
        count: &mut usize,
        visit: &mut dyn FnMut(&[(usize, i8)], &[QMatrix]) -> bool,
    ) -> bool {
        *count += 1;
        if !visit(word, mats) {
            return false;
        }
        if word.len() == bound {
            return true;
        }
        for (li, &(g, e)) in letters.iter().enumerate() {
            if word.last() == Some(&(g, -e)) {
                continue;
            }
            let next: Vec<QMatrix> = mats.iter().zip(images).map(|(m, im)| m * &im[li]).collect();
            word.push((g, e));
            let go_on = rec(word, &next, bound, letters, images, count, visit);
            word.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
    rec(&mut word, &start, bound, &letters, &images, &mut count, &mut visit);
    count
}

/// Direct sum of the graded pieces of the radical filtration; word traces are checked up to
/// `length_bound`.
pub fn semisimplification(point: &RepresentationPoint, length_bound: usize) -> Result<SemisimplificationResult> {
    let n = point.dim();
    let algebra = enveloping_algebra(point);
    let j = radical(&algebra)?;
    let powers = ideal_powers(&j)?;

    // Flag W_k = J^k V, from V down to the last nonzero step.
    let spans: Vec<Echelon> = powers.iter().map(|p| column_span(p, n)).collect();
    let mut flag = Vec::new();
    let mut columns: Vec<Vec<Q>> = Vec::new();
    let mut block_sizes = Vec::new();
    for k in 0..spans.len() - 1 {
        if spans[k].rank() == 0 {
            break;
        }
        flag.push(spans[k].basis());
        let mut lower = spans[k + 1].clone();
        let before = columns.len();
        for v in spans[k].basis() {
            if lower.insert(&v) {
                columns.push(v);
            }
        }
        block_sizes.push(columns.len() - before);
    }
    let base_change = QMatrix::from_rows(columns).transpose();
    let inv = base_change.inverse().ok_or_else(|| Error::Internal("flag complements do not span".into()))?;

    let offsets: Vec<usize> =
        block_sizes.iter().scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let mut blocks: Vec<Vec<QMatrix>> = vec![Vec::new(); block_sizes.len()];
    let mut images = Vec::new();
    for g in point.images() {
        let m = &(&inv * g) * &base_change;
        for (b, (&o, &s)) in offsets.iter().zip(&block_sizes).enumerate() {
            if !m.submatrix(o..o + s, o + s..n).is_zero() {
                return Err(Error::Internal("flag step is not stable".into()));
            }
            blocks[b].push(m.submatrix(o..o + s, o..o + s));
        }
        let diag: Vec<QMatrix> = blocks.iter().map(|bl| bl.last().unwrap().clone()).collect();
        images.push(QMatrix::block_diag(&diag));
    }
    let ss = check_representation(point.group(), images)?;

    let mut mismatch = None;
    let words_checked = walk_words(&[point, &ss], length_bound, |w, mats| {
        if mats[0].trace() != mats[1].trace() {
            mismatch = Some(GroupWord::new(w.iter().copied()));
            return false;
        }
        true
    });
    if let Some(w) = mismatch {
        return Err(Error::Internal(format!("semisimplification changed the trace of {}", point.group().format_word(&w))));
    }
    if radical(&enveloping_algebra(&ss))?.dim() != 0 {
        return Err(Error::Internal("graded pieces are not semisimple".into()));
    }
    Ok(SemisimplificationResult {
        flag,
        block_sizes,
        base_change,
        blocks,
        radical_dimension: j.dim(),
        point: ss,
        certificate: TraceCertificate { length_bound, words_checked },
    })
}

/// Basis of the matrices commuting with every generator image.
pub fn commutant(point: &RepresentationPoint) -> MatrixAlgebra {
    let n = point.dim();
    let basis = intertwining_space(point.images(), point.images(), n);
    MatrixAlgebra { ambient: n, basis }
}

/// `{A : A·xᵢ = yᵢ·A}` as a basis of matrices.
fn intertwining_space(xs: &[QMatrix], ys: &[QMatrix], n: usize) -> Vec<QMatrix> {
    let mut rows = Vec::new();
    for (x, y) in xs.iter().zip(ys) {
        // (A·x − y·A)_{ij} = Σ_k A_{ik} x_{kj} − y_{ik} A_{kj}; unknown A_{ab} at a·n + b.
        for i in 0..n {
            for jj in 0..n {
                let mut row = vec![Q::zero(); n * n];
                for k in 0..n {
                    row[i * n + k] += &x[(k, jj)];
                    row[k * n + jj] -= &y[(i, k)];
                }
                if row.iter().any(|c| !c.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    nullspace(rows, n * n).into_iter().map(|v| QMatrix::from_flat(n, n, v)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrobeniusReport {
    pub nonempty: bool,
    pub verdict: String,
    /// Basis of the linear solutions of `A·σ(γ) = σ(ψ(γ))·A`.
    pub solution_basis: Vec<QMatrix>,
    pub solution_dimension: usize,
    pub commutant_dimension: usize,
    pub twisted_commutant_dimension: usize,
    pub twisted_semisimple: bool,
    /// Linear solution space and commutant have equal dimension.
    pub torsor_dimension_check: bool,
    pub sample: Option<QMatrix>,
    pub commutant: MatrixAlgebra,
}

/// Frobenius intertwiners of a semisimple point with respect to an endomorphism of its group.
///
/// Emptiness is exact: the twisted point `σ∘ψ` is isomorphic to `σ` iff it is semisimple and
/// `dim Hom(σ, σ∘ψ) = dim End(σ) = dim End(σ∘ψ)`.
pub fn frobenius_intertwiners(point: &RepresentationPoint, endo: &[GroupWord], seed: u64) -> Result<FrobeniusReport> {
    if radical(&enveloping_algebra(point))?.dim() != 0 {
        return Err(Error::InvalidInput("frobenius_intertwiners needs a semisimple point".into()));
    }
    let n = point.dim();
    let twisted = point.precompose(endo)?;
    let solutions = intertwining_space(point.images(), twisted.images(), n);
    let comm = commutant(point);
    let twisted_comm = commutant(&twisted);
    let twisted_semisimple = radical(&enveloping_algebra(&twisted))?.dim() == 0;
    let nonempty =
        twisted_semisimple && solutions.len() == comm.dim() && twisted_comm.dim() == comm.dim() && !solutions.is_empty();
    let sample = if nonempty { Some(invertible_combination(&solutions, seed)?) } else { None };
    Ok(FrobeniusReport {
        nonempty,
        verdict: if nonempty { "frobenius structure".into() } else { "no Frobenius structure".into() },
        solution_dimension: solutions.len(),
        commutant_dimension: comm.dim(),
        twisted_commutant_dimension: twisted_comm.dim(),
        twisted_semisimple,
        torsor_dimension_check: solutions.len() == comm.dim(),
        solution_basis: solutions,
        sample,
        commutant: comm,
    })
}

/// First invertible element among: the basis vectors, their sum, then seeded small combinations.
fn invertible_combination(basis: &[QMatrix], seed: u64) -> Result<QMatrix> {
    let n = basis[0].rows();
    let combine = |c: &[i64]| {
        c.iter().zip(basis).fold(QMatrix::zeros(n, n), |acc, (&k, b)| &acc + &b.scale(&Q::from_int(k)))
    };
    for b in basis {
        if b.is_invertible() {
            return Ok(b.clone());
        }
    }
    let ones = combine(&vec![1; basis.len()]);
    if ones.is_invertible() {
        return Ok(ones);
    }
    for i in 0..256u64 {
        let mut rng = point_rng(seed, STREAM_UNIT, i);
        let c: Vec<i64> = basis.iter().map(|_| small_int(&mut rng, -(n as i64) - 2, n as i64 + 2)).collect();
        let m = combine(&c);
        if m.is_invertible() {
            return Ok(m);
        }
    }
    Err(Error::Internal("no invertible element found in a nonempty intertwiner space".into()))
}

/// Seeded random invertible element of an algebra (a unit).
pub fn random_unit(algebra: &MatrixAlgebra, seed: u64, index: u64) -> Option<QMatrix> {
    for attempt in 0..64u64 {
        let mut rng = point_rng(seed, STREAM_UNIT ^ 0xff, index * 64 + attempt);
        let c: Vec<Q> = algebra.basis.iter().map(|_| Q::from_int(small_int(&mut rng, -3, 3))).collect();
        let m = algebra.combination(&c);
        if m.is_invertible() {
            return Some(m);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub same: bool,
    pub certificate: TraceCertificate,
    /// First word (signed one-based letters) whose characteristic polynomials differ.
    pub witness: Option<GroupWord>,
    pub witness_charpolys: Option<(Vec<Q>, Vec<Q>)>,
}

/// Compares characteristic polynomials of all words up to `length_bound`. A `false` answer is
/// exact; `true` is certified only up to the reported bound.
pub fn same_component(a: &RepresentationPoint, b: &RepresentationPoint, length_bound: usize) -> Result<ComponentReport> {
    if a.group() != b.group() {
        return Err(Error::GroupMismatch);
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let mut witness = None;
    // Words with the same pair of images (common when relators hold) are compared once.
    let mut seen: HashSet<Vec<QMatrix>> = HashSet::new();
    let words_checked = walk_words(&[a, b], length_bound, |w, mats| {
        if !seen.insert(mats.to_vec()) {
            return true;
        }
        let (p, q) = (mats[0].charpoly(), mats[1].charpoly());
        if p != q {
            witness = Some((GroupWord::new(w.iter().copied()), p, q));
            return false;
        }
        true
    });
    Ok(ComponentReport {
        same: witness.is_none(),
        certificate: TraceCertificate { length_bound, words_checked },
        witness: witness.as_ref().map(|(w, _, _)| w.clone()),
        witness_charpolys: witness.map(|(_, p, q)| (p, q)),
    })
}

/// `ζ_N^k · q^{w/2}` with `q` formal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawRecord")]
pub struct EigenvalueRecord {
    pub k: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub w: i64,
}

#[derive(Deserialize)]
struct RawRecord {
    k: i64,
    #[serde(rename = "N")]
    n: u64,
    w: i64,
}

impl TryFrom<RawRecord> for EigenvalueRecord {
    type Error = String;

    fn try_from(r: RawRecord) -> std::result::Result<Self, String> {
        if r.n == 0 {
            return Err("root of unity order N must be at least 1".into());
        }
        Ok(EigenvalueRecord::new(r.k, r.n, r.w))
    }
}

impl EigenvalueRecord {
    /// Reduces `k` modulo `N` and divides out their gcd.
    pub fn new(k: i64, n: u64, w: i64) -> Self {
        assert!(n >= 1, "N must be positive");
        let k = k.rem_euclid(n as i64) as u64;
        let g = k.gcd(&n);
        EigenvalueRecord { k: k / g, n: n / g, w }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightGroup {
    pub w: i64,
    /// Unit parts as exponents of `ζ_L` for the common order `L`.
    pub left: Vec<u64>,
    pub right: Vec<u64>,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightPartition {
    pub common_order: u64,
    pub weights: Vec<WeightGroup>,
    pub equal: bool,
}

/// Groups both multisets by weight and compares unit parts inside `ℚ(ζ_L)`, `L` the lcm of all
/// orders.
pub fn weight_partition(left: &[EigenvalueRecord], right: &[EigenvalueRecord]) -> WeightPartition {
    let l = left.iter().chain(right).fold(1u64, |acc, r| acc.lcm(&r.n));
    let mut groups: BTreeMap<i64, (Vec<u64>, Vec<u64>)> = BTreeMap::new();
    for r in left {
        groups.entry(r.w).or_default().0.push(r.k * (l / r.n));
    }
    for r in right {
        groups.entry(r.w).or_default().1.push(r.k * (l / r.n));
    }
    let weights: Vec<WeightGroup> = groups
        .into_iter()
        .map(|(w, (mut a, mut b))| {
            a.sort_unstable();
            b.sort_unstable();
            let equal = a == b;
            WeightGroup { w, left: a, right: b, equal }
        })
        .collect();
    WeightPartition { common_order: l, equal: weights.iter().all(|g| g.equal), weights }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excursion::FPGroup;
    use crate::sampling::random_gl;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_ints(rows)
    }

    fn point(group: &FPGroup, images: Vec<QMatrix>) -> RepresentationPoint {
        check_representation(group, images).unwrap()
    }

    fn z() -> FPGroup {
        FPGroup::free(1)
    }

    #[test]
    fn enveloping_dimensions() {
        assert_eq!(enveloping_algebra(&point(&z(), vec![m(&[&[3, 0], &[0, 3]])])).dim(), 1);
        let f2 = FPGroup::free(2);
        let generic = point(&f2, vec![m(&[&[1, 1], &[0, 1]]), m(&[&[1, 0], &[1, 1]])]);
        assert_eq!(enveloping_algebra(&generic).dim(), 4);
        let jordan = enveloping_algebra(&point(&z(), vec![m(&[&[1, 1], &[0, 1]])]));
        assert_eq!(jordan.dim(), 2);
        assert!(jordan.is_closed() && jordan.contains(&QMatrix::identity(2)));
    }

    #[test]
    fn radical_examples() {
        assert_eq!(radical(&MatrixAlgebra::full(3)).unwrap().dim(), 0);
        let upper = MatrixAlgebra { ambient: 2, basis: vec![m(&[&[1, 0], &[0, 0]]), m(&[&[0, 1], &[0, 0]]), m(&[&[0, 0], &[0, 1]])] };
        let j = radical(&upper).unwrap();
        assert_eq!(j.dim(), 1);
        assert!(j.contains(&m(&[&[0, 1], &[0, 0]])));
        let jordan = enveloping_algebra(&point(&z(), vec![m(&[&[1, 1], &[0, 1]])]));
        let j = radical(&jordan).unwrap();
        assert_eq!(j.dim(), 1);
        assert!(j.contains(&m(&[&[0, 1], &[0, 0]])));
    }

    #[test]
    fn unipotent_becomes_trivial() {
        let r = semisimplification(&point(&z(), vec![m(&[&[1, 1], &[0, 1]])]), 6).unwrap();
        assert_eq!(r.point.images()[0], QMatrix::identity(2));
        assert_eq!(r.block_sizes, vec![1, 1]);
        assert_eq!(r.radical_dimension, 1);
    }

    #[test]
    fn triangular_pair_splits_into_characters() {
        let f2 = FPGroup::free(2);
        let p = point(&f2, vec![m(&[&[2, 1], &[0, 3]]), m(&[&[5, 7], &[0, -1]])]);
        let r = semisimplification(&p, 6).unwrap();
        assert_eq!(r.block_sizes, vec![1, 1]);
        let diag: Vec<(Q, Q)> = r.point.images().iter().map(|x| (x[(0, 0)].clone(), x[(1, 1)].clone())).collect();
        let mut first: Vec<Q> = vec![diag[0].0.clone(), diag[0].1.clone()];
        first.sort();
        assert_eq!(first, vec![Q::from_int(2), Q::from_int(3)]);
        // The characters pair up: the eigenvalue 2 of a goes with 5 of b.
        let pairs: Vec<(Q, Q)> = (0..2).map(|i| (r.point.images()[0][(i, i)].clone(), r.point.images()[1][(i, i)].clone())).collect();
        assert!(pairs.contains(&(Q::from_int(2), Q::from_int(5))) && pairs.contains(&(Q::from_int(3), Q::from_int(-1))));
        assert!(r.point.images().iter().all(|x| x[(0, 1)].is_zero() && x[(1, 0)].is_zero()));
        assert!(same_component(&p, &r.point, 6).unwrap().same);
    }

    #[test]
    fn semisimple_input_is_kept_up_to_conjugacy() {
        let f2 = FPGroup::free(2);
        let p = point(&f2, vec![m(&[&[1, 1], &[0, 1]]), m(&[&[1, 0], &[1, 1]])]);
        let r = semisimplification(&p, 6).unwrap();
        assert_eq!(r.block_sizes, vec![2]);
        assert!(same_component(&p, &r.point, 6).unwrap().same);
    }

    #[test]
    fn commutant_examples() {
        let f2 = FPGroup::free(2);
        let full = point(&f2, vec![m(&[&[1, 1], &[0, 1]]), m(&[&[1, 0], &[1, 1]])]);
        assert_eq!(commutant(&full).dim(), 1);
        let chars = point(&z(), vec![m(&[&[2, 0], &[0, 3]])]);
        let c = commutant(&chars);
        assert_eq!(c.dim(), 2);
        assert!(c.contains(&m(&[&[1, 0], &[0, 0]])) && c.contains(&m(&[&[0, 0], &[0, 1]])));
        assert_eq!(commutant(&point(&z(), vec![QMatrix::identity(3)])).dim(), 9);
    }

    #[test]
    fn frobenius_examples() {
        let id = vec![GroupWord::generator(0)];
        let inv = vec![GroupWord::generator(0).inverse()];
        let p = point(&z(), vec![m(&[&[2, 0], &[0, 3]])]);
        let r = frobenius_intertwiners(&p, &id, 0).unwrap();
        assert!(r.nonempty && r.torsor_dimension_check);
        assert!(r.sample.unwrap().is_invertible());
        let r = frobenius_intertwiners(&p, &inv, 0).unwrap();
        assert!(!r.nonempty);
        assert_eq!(r.verdict, "no Frobenius structure");
        let half = Q::new(1, 2);
        let p = point(&z(), vec![QMatrix::diagonal(&[Q::from_int(2), half])]);
        let r = frobenius_intertwiners(&p, &inv, 0).unwrap();
        assert!(r.nonempty);
        let a = r.sample.unwrap();
        assert!(a[(0, 0)].is_zero() && a[(1, 1)].is_zero());
        let non_ss = point(&z(), vec![m(&[&[1, 1], &[0, 1]])]);
        assert!(frobenius_intertwiners(&non_ss, &id, 0).is_err());
    }

    #[test]
    fn identity_endomorphism_sample_is_identity_when_commutant_is_scalar() {
        let f2 = FPGroup::free(2);
        let p = point(&f2, vec![m(&[&[1, 1], &[0, 1]]), m(&[&[1, 0], &[1, 1]])]);
        let r = frobenius_intertwiners(&p, &[GroupWord::generator(0), GroupWord::generator(1)], 0).unwrap();
        assert_eq!(r.sample, Some(QMatrix::identity(2)));
    }

    #[test]
    fn component_examples() {
        let a = point(&z(), vec![m(&[&[2, 0], &[0, 3]])]);
        let b = point(&z(), vec![m(&[&[2, 0], &[0, 5]])]);
        let r = same_component(&a, &b, 4).unwrap();
        assert!(!r.same);
        assert_eq!(r.witness, Some(GroupWord::generator(0)));
        let h = m(&[&[1, 2], &[3, 7]]);
        assert!(same_component(&a, &a.conjugate(&h).unwrap(), 5).unwrap().same);
        assert_eq!(same_component(&a, &a, 3).unwrap().certificate.words_checked, 7);
    }

    fn rec(k: i64, n: u64, w: i64) -> EigenvalueRecord {
        EigenvalueRecord::new(k, n, w)
    }

    #[test]
    fn weight_partition_examples() {
        let e = vec![rec(0, 1, 0), rec(1, 4, 0), rec(0, 1, 2)];
        let mut shuffled = e.clone();
        shuffled.reverse();
        assert!(weight_partition(&e, &shuffled).equal);
        let changed = vec![rec(0, 1, 0), rec(3, 4, 0), rec(0, 1, 2)];
        let r = weight_partition(&e, &changed);
        assert!(!r.equal);
        assert_eq!(r.weights.iter().map(|g| (g.w, g.equal)).collect::<Vec<_>>(), vec![(0, false), (2, true)]);
        let r = weight_partition(&[rec(0, 1, 0)], &[rec(0, 1, 1)]);
        assert!(!r.equal && r.weights.len() == 2);
        assert_eq!(rec(2, 4, 0), rec(1, 2, 0));
        assert_eq!(rec(-1, 3, 0), rec(2, 3, 0));
        let json = serde_json::to_string(&rec(1, 4, 2)).unwrap();
        assert_eq!(json, r#"{"k":1,"N":4,"w":2}"#);
        assert!(serde_json::from_str::<EigenvalueRecord>(r#"{"k":1,"N":0,"w":2}"#).is_err());
        assert_eq!(serde_json::from_str::<EigenvalueRecord>(r#"{"k":6,"N":8,"w":2}"#).unwrap(), rec(3, 4, 2));
    }

    fn random_point(seed: u64, n: usize, abelian: bool) -> RepresentationPoint {
        let mut rng = point_rng(seed, 99, 0);
        if abelian {
            // Commuting: polynomials in one block-triangular matrix.
            let x = random_gl(n, &mut rng);
            let y = &(&x * &x) + &QMatrix::identity(n);
            let y = if y.is_invertible() { y } else { &x * &x };
            point(&FPGroup::free_abelian(2), vec![x, y])
        } else {
            let h = random_gl(n, &mut rng);
            let hi = h.inverse().unwrap();
            let tri = |rng: &mut crate::sampling::SampleRng| {
                let mut t = random_gl(n, rng);
                for i in 0..n {
                    for j in 0..i.min(n / 2 + 1) {
                        t[(i, j)] = Q::zero();
                    }
                    if t[(i, i)].is_zero() {
                        t[(i, i)] = Q::one();
                    }
                }
                &(&h * &t) * &hi
            };
            let (a, b) = (tri(&mut rng), tri(&mut rng));
            let (a, b) = (if a.is_invertible() { a } else { h.clone() }, if b.is_invertible() { b } else { hi.clone() });
            point(&FPGroup::free(2), vec![a, b])
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn semisimplification_contract(seed in 0u64..1000, n in 1usize..=3, abelian in any::<bool>()) {
            let p = random_point(seed, n, abelian);
            let r = semisimplification(&p, 4).unwrap();
            prop_assert!(radical(&enveloping_algebra(&r.point)).unwrap().dim() == 0);
            let again = semisimplification(&r.point, 4).unwrap();
            prop_assert_eq!(again.radical_dimension, 0);
            prop_assert!(same_component(&p, &again.point, 3).unwrap().same);
            let c = commutant(&r.point);
            prop_assert!(c.is_closed() && c.contains(&QMatrix::identity(n)));
            prop_assert!(c.trace_form().is_invertible());
        }

        #[test]
        fn radical_is_a_nilpotent_ideal(seed in 0u64..1000, n in 2usize..=3) {
            let p = random_point(seed, n, false);
            let a = enveloping_algebra(&p);
            let j = radical(&a).unwrap();
            for x in &a.basis {
                for y in &j.basis {
                    prop_assert!(j.contains(&(x * y)) && j.contains(&(y * x)));
                }
            }
            let mut prod = vec![QMatrix::identity(n)];
            for _ in 0..n {
                prod = product_span(n, &prod, &j.basis);
            }
            prop_assert!(prod.iter().all(QMatrix::is_zero));
        }

        #[test]
        fn intertwiners_form_a_torsor(seed in 0u64..1000, swap in any::<bool>()) {
            let mut rng = point_rng(seed, 5, 0);
            let x = random_gl(2, &mut rng);
            let y = random_gl(2, &mut rng);
            let p = point(&FPGroup::free(2), vec![QMatrix::block_diag(&[x.clone(), y.clone()]), QMatrix::block_diag(&[y, x])]);
            prop_assume!(radical(&enveloping_algebra(&p)).unwrap().dim() == 0);
            let endo = if swap { vec![GroupWord::generator(1), GroupWord::generator(0)] } else { vec![GroupWord::generator(0), GroupWord::generator(1)] };
            let r = frobenius_intertwiners(&p, &endo, seed).unwrap();
            prop_assert!(r.nonempty);
            let a = r.sample.clone().unwrap();
            let space = MatrixAlgebra { ambient: 4, basis: r.solution_basis.clone() };
            if let Some(u) = random_unit(&r.commutant, seed, 0) {
                prop_assert!(space.contains(&(&a * &u)));
                let tw = p.precompose(&endo).unwrap();
                let tu = random_unit(&commutant(&tw), seed, 1).unwrap();
                prop_assert!(space.contains(&(&tu * &a)));
            }
        }

        #[test]
        fn weight_partition_symmetries(
            items in proptest::collection::vec((0i64..12, 1u64..7, -2i64..3), 0..8),
            perm_seed in any::<u64>(),
            scale in 1u64..5,
        ) {
            let left: Vec<EigenvalueRecord> = items.iter().map(|&(k, n, w)| rec(k, n, w)).collect();
            let mut right = left.clone();
            if !right.is_empty() {
                let i = (perm_seed % right.len() as u64) as usize;
                right[i] = rec(right[i].k as i64 + 1, right[i].n, right[i].w);
            }
            let verdict = weight_partition(&left, &right).equal;
            let mut shuffled = right.clone();
            let shift = (perm_seed % 5) as usize % shuffled.len().max(1);
            shuffled.rotate_left(shift);
            prop_assert_eq!(weight_partition(&shuffled, &left).equal, verdict);
            let enlarge = |v: &[EigenvalueRecord]| -> Vec<EigenvalueRecord> {
                v.iter().map(|r| rec((r.k * scale) as i64, r.n * scale, r.w)).collect()
            };
            prop_assert_eq!(weight_partition(&enlarge(&left), &enlarge(&right)).equal, verdict);
        }
    }
}
