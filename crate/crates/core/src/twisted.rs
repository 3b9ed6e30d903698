//! Twisted conjugation: automorphisms of root data with a matrix-level model, φ-fixed
//! irreducibles and their equivariance intertwiners, twisted traces, torus invariants, and the
//! two lattice certificates (valuation minimum in an exterior power, and Levi cokernels).
//!
//! Lattice actions use the pullback convention: the action `L` of `φ` sends a character `λ` to
//! `λ ∘ φ`. The matrix action is `g ↦ h·θ(g)·h⁻¹` with `θ` one of identity, transpose-inverse,
//! a permutation of isomorphic product factors, or (on tori) an explicit lattice automorphism.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{cokernel_invariant_factors, fixed_sublattice, Family, LatticeMap, RootDatum, Weight, ZMatrix};
use crate::matrix::{solve, Echelon, QMatrix};
use crate::rational::Q;
use crate::repring::{decompose_character, exterior_power_character, Character};
use crate::sampling::{
    elementary_generators, nonzero_small_rational, point_rng, random_group_element, random_torus_element,
};
use crate::tensor_word::TensorWord;

/// Bound used when testing a lattice action for finite order.
pub const DEFAULT_ORDER_BOUND: usize = 64;

const STREAM_BUILD: u64 = 0x7701;
const STREAM_VERIFY: u64 = 0x7702;
const STREAM_COMBINE: u64 = 0x7703;
const STREAM_TORUS_CHECK: u64 = 0x7704;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Theta {
    Identity,
    TransposeInverse,
    /// Block `b` of the standard representation is moved to block `perm[b]`.
    FactorPermutation(Vec<usize>),
    /// Torus automorphism given by its pullback on the character lattice.
    Lattice(LatticeMap),
}

impl Theta {
    pub fn name(&self) -> &'static str {
        match self {
            Theta::Identity => "identity",
            Theta::TransposeInverse => "transpose-inverse",
            Theta::FactorPermutation(_) => "factor-permutation",
            Theta::Lattice(_) => "lattice",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAutomorphism {
    group: RootDatum,
    theta: Theta,
    h: QMatrix,
    h_inv: QMatrix,
    lattice_action: LatticeMap,
}

impl Serialize for GroupAutomorphism {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            group: &'a RootDatum,
            theta: &'static str,
            #[serde(skip_serializing_if = "Option::is_none")]
            perm: Option<&'a Vec<usize>>,
            #[serde(skip_serializing_if = "Option::is_none")]
            torus_action: Option<&'a LatticeMap>,
            h: &'a QMatrix,
            lattice_action: &'a LatticeMap,
        }
        Repr {
            group: &self.group,
            theta: self.theta.name(),
            perm: match &self.theta {
                Theta::FactorPermutation(p) => Some(p),
                _ => None,
            },
            torus_action: match &self.theta {
                Theta::Lattice(a) => Some(a),
                _ => None,
            },
            h: &self.h,
            lattice_action: &self.lattice_action,
        }
        .serialize(serializer)
    }
}

/// For a monomial matrix, the row holding the nonzero entry of each column.
fn monomial_pattern(h: &QMatrix) -> Option<Vec<usize>> {
    let n = h.rows();
    let mut pattern = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for j in 0..n {
        let mut rows = (0..n).filter(|&i| !h[(i, j)].is_zero());
        let i = rows.next()?;
        if rows.next().is_some() || used[i] {
            return None;
        }
        used[i] = true;
        pattern.push(i);
    }
    Some(pattern)
}

fn block_permutation_matrix(group: &RootDatum, perm: &[usize]) -> QMatrix {
    let n = group.std_dim();
    let blocks = group.blocks();
    let mut p = QMatrix::zeros(n, n);
    for (b, blk) in blocks.iter().enumerate() {
        let target = &blocks[perm[b]];
        for k in 0..blk.std_dim {
            p[(target.std_offset + k, blk.std_offset + k)] = Q::one();
        }
    }
    p
}

/// Permutation matrix with `e_j ↦ e_{pi[j]}`.
fn permutation_matrix(pi: &[usize]) -> QMatrix {
    let n = pi.len();
    let mut p = QMatrix::zeros(n, n);
    for (j, &i) in pi.iter().enumerate() {
        p[(i, j)] = Q::one();
    }
    p
}

fn character_value(group: &RootDatum, w: &Weight, t: &QMatrix) -> Q {
    group.to_std_exponents(w).iter().enumerate().map(|(i, &k)| t[(i, i)].pow(k as i32)).product()
}

impl GroupAutomorphism {
    /// Builds and validates an automorphism. When `lattice_action` is omitted it is derived from
    /// `θ` and the monomial part of `h`; when given it must agree with the derivation (up to the
    /// Weyl group if `h` does not normalize the diagonal torus).
    pub fn new(
        group: &RootDatum,
        theta: Theta,
        h: Option<QMatrix>,
        lattice_action: Option<LatticeMap>,
    ) -> Result<Self> {
        let n = group.std_dim();
        let h = h.unwrap_or_else(|| QMatrix::identity(n));
        if h.rows() != n || h.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: h.rows() });
        }
        let h_inv = h.inverse().ok_or_else(|| Error::NonInvertible("h".into()))?;
        validate_theta(group, &theta)?;
        let theta_exps = theta_exponents(group, &theta);
        let pattern = monomial_pattern(&h);
        let derived = {
            let e = match &pattern {
                Some(pi) => &permutation_matrix_z(pi) * &theta_exps,
                None => theta_exps,
            };
            pullback_on_lattice(group, &e)
        };
        let action = match lattice_action {
            None => derived,
            Some(given) => {
                if given.source_rank() != group.rank() || given.target_rank() != group.rank() {
                    return Err(Error::DimensionMismatch { expected: group.rank(), got: given.source_rank() });
                }
                let ok = if pattern.is_some() {
                    given == derived
                } else {
                    group.weyl_elements().iter().any(|w| derived.compose(&w.lattice) == given)
                };
                if !ok {
                    return Err(Error::IncompatibleAutomorphism(
                        "lattice action does not match the matrix action on the torus".into(),
                    ));
                }
                given
            }
        };
        let roots = group.roots();
        let mut images: Vec<Weight> = roots.iter().map(|r| action.apply(r)).collect();
        images.sort();
        if images != roots {
            return Err(Error::NotRootAutomorphism);
        }
        let phi = GroupAutomorphism { group: group.clone(), theta, h, h_inv, lattice_action: action };
        if pattern.is_some() {
            phi.check_torus_compatibility(4)?;
        }
        Ok(phi)
    }

    pub fn identity(group: &RootDatum) -> Self {
        GroupAutomorphism::new(group, Theta::Identity, None, None).expect("identity is an automorphism")
    }

    pub fn transpose_inverse(group: &RootDatum) -> Self {
        GroupAutomorphism::new(group, Theta::TransposeInverse, None, None).expect("transpose-inverse is an automorphism")
    }

    pub fn group(&self) -> &RootDatum {
        &self.group
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }

    pub fn h(&self) -> &QMatrix {
        &self.h
    }

    pub fn lattice_action(&self) -> &LatticeMap {
        &self.lattice_action
    }

    pub fn order(&self, bound: usize) -> Option<usize> {
        self.lattice_action.order(bound)
    }

    /// Whether the lattice action sends every simple root to a positive root.
    pub fn preserves_dominant_cone(&self) -> bool {
        self.group.simple_roots().iter().all(|a| self.group.is_positive_root(&self.lattice_action.apply(a)))
    }

    fn theta_matrix(&self, g: &QMatrix) -> Result<QMatrix> {
        Ok(match &self.theta {
            Theta::Identity => g.clone(),
            Theta::TransposeInverse => g.inverse().ok_or_else(|| Error::NonInvertible("group element".into()))?.transpose(),
            Theta::FactorPermutation(perm) => {
                let p = block_permutation_matrix(&self.group, perm);
                &(&p * g) * &p.transpose()
            }
            Theta::Lattice(a) => {
                let n = g.rows();
                if (0..n).any(|i| (0..n).any(|j| i != j && !g[(i, j)].is_zero())) {
                    return Err(Error::InvalidInput("torus automorphism applied to a non-diagonal matrix".into()));
                }
                let diag: Vec<Q> = (0..n)
                    .map(|i| (0..n).map(|j| g[(j, j)].pow(a.matrix()[(j, i)].to_i32().unwrap())).product())
                    .collect();
                QMatrix::diagonal(&diag)
            }
        })
    }

    /// The matrix-level action `g ↦ h·θ(g)·h⁻¹`.
    pub fn apply(&self, g: &QMatrix) -> Result<QMatrix> {
        let n = self.group.std_dim();
        if g.rows() != n || g.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.rows() });
        }
        Ok(&(&self.h * &self.theta_matrix(g)?) * &self.h_inv)
    }

    /// Samples torus points `t` and checks `λ(φ(t)) = (Lλ)(t)` on a lattice basis.
    pub fn check_torus_compatibility(&self, samples: usize) -> Result<()> {
        let rank = self.group.rank();
        for i in 0..samples {
            let t = random_torus_element(&self.group, &mut point_rng(0, STREAM_TORUS_CHECK, i as u64));
            let ft = self.apply(&t)?;
            let n = ft.rows();
            if (0..n).any(|a| (0..n).any(|b| a != b && !ft[(a, b)].is_zero())) {
                return Err(Error::IncompatibleAutomorphism("matrix action does not preserve the diagonal torus".into()));
            }
            for k in 0..rank {
                let w = Weight::unit(rank, k);
                if character_value(&self.group, &w, &ft) != character_value(&self.group, &self.lattice_action.apply(&w), &t) {
                    return Err(Error::IncompatibleAutomorphism(format!(
                        "character {w:?} disagrees with the lattice action at a sampled torus point"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn validate_theta(group: &RootDatum, theta: &Theta) -> Result<()> {
    match theta {
        Theta::Identity | Theta::TransposeInverse => Ok(()),
        Theta::FactorPermutation(perm) => {
            let k = group.blocks().len();
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted != (0..k).collect::<Vec<_>>() {
                return Err(Error::InvalidInput(format!("factor permutation {perm:?} is not a permutation of {k} factors")));
            }
            if let Family::Product { factors } = group.family() {
                if perm.iter().enumerate().any(|(b, &t)| factors[b] != factors[t]) {
                    return Err(Error::InvalidInput("factor permutation mixes non-isomorphic factors".into()));
                }
            }
            Ok(())
        }
        Theta::Lattice(a) => {
            if !group.is_torus() {
                return Err(Error::InvalidInput("explicit lattice automorphisms are only supported on tori".into()));
            }
            let r = group.rank();
            if a.source_rank() != r || a.target_rank() != r {
                return Err(Error::DimensionMismatch { expected: r, got: a.source_rank() });
            }
            let det = a.matrix().det();
            if det != BigInt::from(1) && det != BigInt::from(-1) {
                return Err(Error::IncompatibleAutomorphism("torus action is not invertible over ℤ".into()));
            }
            Ok(())
        }
    }
}

fn permutation_matrix_z(pi: &[usize]) -> ZMatrix {
    let n = pi.len();
    let mut rows = vec![vec![0i64; n]; n];
    for (j, &i) in pi.iter().enumerate() {
        rows[i][j] = 1;
    }
    ZMatrix::from_i64_rows(&rows)
}

/// Exponent matrix `E` of `θ` on the diagonal torus: `θ(diag x)_i = ∏_j x_j^{E_ij}`.
fn theta_exponents(group: &RootDatum, theta: &Theta) -> ZMatrix {
    let n = group.std_dim();
    match theta {
        Theta::Identity => ZMatrix::identity(n),
        Theta::TransposeInverse => {
            let rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| -i64::from(i == j)).collect()).collect();
            ZMatrix::from_i64_rows(&rows)
        }
        Theta::FactorPermutation(perm) => {
            let blocks = group.blocks();
            let mut pi = vec![0; n];
            for (b, blk) in blocks.iter().enumerate() {
                for k in 0..blk.std_dim {
                    pi[blk.std_offset + k] = blocks[perm[b]].std_offset + k;
                }
            }
            permutation_matrix_z(&pi)
        }
        Theta::Lattice(a) => a.matrix().transpose(),
    }
}

/// Pullback on the character lattice of the torus map with exponent matrix `e`.
fn pullback_on_lattice(group: &RootDatum, e: &ZMatrix) -> LatticeMap {
    let et = e.transpose().to_i64_rows().expect("exponent overflow");
    let rank = group.rank();
    let cols: Vec<Weight> = (0..rank)
        .map(|k| {
            let a = group.to_std_exponents(&Weight::unit(rank, k));
            let b: Vec<i64> = et.iter().map(|row| row.iter().zip(&a).map(|(x, y)| x * y).sum()).collect();
            group.from_std_exponents(&b)
        })
        .collect();
    LatticeMap(ZMatrix::from_columns(&cols, rank))
}

/// Composes `raw` with the inner automorphism of the least Weyl element (by length, then reduced
/// word) that makes the lattice action preserve the dominant cone.
pub fn normalize_automorphism(group: &RootDatum, raw: &GroupAutomorphism) -> Result<GroupAutomorphism> {
    normalize_automorphism_bounded(group, raw, DEFAULT_ORDER_BOUND)
}

pub fn normalize_automorphism_bounded(
    group: &RootDatum,
    raw: &GroupAutomorphism,
    bound: usize,
) -> Result<GroupAutomorphism> {
    if raw.group != *group {
        return Err(Error::GroupMismatch);
    }
    if raw.order(bound).is_none() {
        return Err(Error::InfiniteOrder { bound });
    }
    for w in group.weyl_elements() {
        let action = raw.lattice_action.compose(&w.lattice);
        let positive = group.simple_roots().iter().all(|a| group.is_positive_root(&action.apply(a)));
        if !positive {
            continue;
        }
        let mut inv = vec![0; w.perm.len()];
        for (j, &pj) in w.perm.iter().enumerate() {
            inv[pj] = j;
        }
        let h = &permutation_matrix(&inv) * &raw.h;
        return GroupAutomorphism::new(group, raw.theta.clone(), Some(h), Some(action));
    }
    Err(Error::Internal("no Weyl element normalizes the automorphism".into()))
}

/// Dominant weights with all coordinates in `[-bound, bound]` fixed by the lattice action,
/// in lexicographic order.
pub fn fixed_dominant_weights(group: &RootDatum, phi: &GroupAutomorphism, bound: i64) -> Vec<Weight> {
    let rank = group.rank();
    let mut out = Vec::new();
    let mut cur = vec![-bound; rank];
    loop {
        let w = Weight(cur.clone());
        if group.is_dominant(&w) && phi.lattice_action.apply(&w) == w {
            out.push(w);
        }
        let Some(k) = (0..rank).rev().find(|&k| cur[k] < bound) else {
            break;
        };
        cur[k] += 1;
        for c in cur.iter_mut().skip(k + 1) {
            *c = -bound;
        }
    }
    out
}

/// A tensor word realizing the irreducible of highest weight `lambda`, when one of the simple
/// shapes applies: symmetric powers, exterior powers, determinant twists (GL and SL only).
pub fn irreducible_word(group: &RootDatum, lambda: &Weight) -> Option<TensorWord> {
    if !group.is_dominant(lambda) {
        return None;
    }
    let (coords, twist) = match group.family() {
        Family::Gl { n } => {
            let c = lambda.0[n - 1];
            (lambda.0.iter().map(|x| x - c).collect::<Vec<_>>(), c)
        }
        Family::Sl { .. } => {
            let mut v = lambda.0.clone();
            v.push(0);
            (v, 0)
        }
        _ => return None,
    };
    let top = coords[0];
    let ones = coords.iter().take_while(|&&x| x == 1).count();
    let base = if top == 0 {
        None
    } else if coords[1..].iter().all(|&x| x == 0) {
        Some(if top == 1 { TensorWord::Std } else { TensorWord::Std.sym(top as usize) })
    } else if coords[ones..].iter().all(|&x| x == 0) {
        Some(TensorWord::Std.exterior(ones))
    } else {
        return None;
    };
    Some(match (base, twist) {
        (None, k) => TensorWord::DetPower(k),
        (Some(b), 0) => b,
        (Some(b), k) => b.tensor(TensorWord::DetPower(k)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SampleConfig {
    pub seed: u64,
    /// Random construction samples added to the elementary generators.
    pub construction: usize,
    pub verification: usize,
    pub max_rounds: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { seed: 0, construction: 4, verification: 50, max_rounds: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub construction_samples: usize,
    pub verification_samples: usize,
    pub solution_dimension: usize,
    pub irreducible: bool,
    pub rounds: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivarianceIntertwiner {
    pub rep: TensorWord,
    pub alpha: QMatrix,
    pub report: VerificationReport,
}

impl EquivarianceIntertwiner {
    pub fn twisted_trace(&self, g: &QMatrix) -> Result<Q> {
        twisted_trace(&self.rep, &self.alpha, g)
    }
}

fn intertwining_rows(a: &QMatrix, b: &QMatrix) -> Vec<Vec<Q>> {
    let d = a.rows();
    let mut rows = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut row = vec![Q::zero(); d * d];
            for k in 0..d {
                if !a[(k, j)].is_zero() {
                    row[i * d + k] += &a[(k, j)];
                }
                if !b[(i, k)].is_zero() {
                    row[k * d + j] -= &b[(i, k)];
                }
            }
            rows.push(row);
        }
    }
    rows
}

fn intertwines(alpha: &QMatrix, rep: &TensorWord, phi: &GroupAutomorphism, g: &QMatrix) -> Result<bool> {
    let a = rep.evaluate(g)?;
    let b = rep.evaluate(&phi.apply(g)?)?;
    Ok(alpha * &a == &b * alpha)
}

fn normalize_first_entry(m: &QMatrix) -> QMatrix {
    match m.as_flat().iter().find(|x| !x.is_zero()) {
        Some(x) => m.scale(&x.recip().unwrap()),
        None => m.clone(),
    }
}

/// Solves `α·ρ(g) = ρ(φ(g))·α` on sampled group elements and verifies the solution on a
/// disjoint fresh sample.
pub fn equivariance_intertwiner(
    phi: &GroupAutomorphism,
    rep: &TensorWord,
    cfg: &SampleConfig,
) -> Result<EquivarianceIntertwiner> {
    let group = &phi.group;
    let d = rep.dimension(group.std_dim());
    let irreducible = decompose_character(&rep.character(group))?.is_irreducible();
    let mut samples = elementary_generators(group);
    let mut drawn = 0u64;
    let mut draw = |samples: &mut Vec<QMatrix>, count: usize| {
        for _ in 0..count {
            samples.push(random_group_element(group, &mut point_rng(cfg.seed, STREAM_BUILD, drawn)));
            drawn += 1;
        }
    };
    draw(&mut samples, cfg.construction);
    let mut eqs = Echelon::new();
    let mut used = 0;
    for round in 0..=cfg.max_rounds {
        for g in &samples[used..] {
            for row in intertwining_rows(&rep.evaluate(g)?, &rep.evaluate(&phi.apply(g)?)?) {
                eqs.insert(&row);
            }
        }
        used = samples.len();
        let sols = eqs.nullspace(d * d);
        if sols.is_empty() {
            return Err(Error::NotPhiFixed);
        }
        if irreducible && sols.len() > 1 {
            if round == cfg.max_rounds {
                return Err(Error::IntertwinerInconsistent { dim: sols.len() });
            }
            draw(&mut samples, cfg.construction.max(4));
            continue;
        }
        let alpha = pick_invertible(&sols, d, cfg.seed).ok_or(Error::NotPhiFixed)?;
        let mut failures = Vec::new();
        for i in 0..cfg.verification {
            let g = random_group_element(group, &mut point_rng(cfg.seed, STREAM_VERIFY, (round * 1_000_000 + i) as u64));
            if !intertwines(&alpha, rep, phi, &g)? {
                failures.push(g);
            }
        }
        if failures.is_empty() {
            return Ok(EquivarianceIntertwiner {
                rep: rep.clone(),
                alpha,
                report: VerificationReport {
                    construction_samples: samples.len(),
                    verification_samples: cfg.verification,
                    solution_dimension: sols.len(),
                    irreducible,
                    rounds: round + 1,
                },
            });
        }
        samples.extend(failures);
    }
    Err(Error::Internal("intertwiner failed verification after all sampling rounds".into()))
}

fn pick_invertible(sols: &[Vec<Q>], d: usize, seed: u64) -> Option<QMatrix> {
    let candidate = |coeffs: &[Q]| {
        let mut flat = vec![Q::zero(); d * d];
        for (c, v) in coeffs.iter().zip(sols) {
            for (f, x) in flat.iter_mut().zip(v) {
                if !x.is_zero() {
                    *f += c * x;
                }
            }
        }
        QMatrix::from_flat(d, d, flat)
    };
    let ones = vec![Q::one(); sols.len()];
    let first = candidate(&ones);
    if first.is_invertible() {
        return Some(normalize_first_entry(&first));
    }
    if sols.len() == 1 {
        return None;
    }
    for attempt in 0..64 {
        let mut rng = point_rng(seed, STREAM_COMBINE, attempt);
        let coeffs: Vec<Q> = sols.iter().map(|_| nonzero_small_rational(&mut rng)).collect();
        let m = candidate(&coeffs);
        if m.is_invertible() {
            return Some(normalize_first_entry(&m));
        }
    }
    None
}

/// `tr(α·ρ(g))`.
pub fn twisted_trace(rep: &TensorWord, alpha: &QMatrix, g: &QMatrix) -> Result<Q> {
    let r = rep.evaluate(g)?;
    if r.rows() != alpha.rows() || !alpha.is_square() {
        return Err(Error::DimensionMismatch { expected: r.rows(), got: alpha.rows() });
    }
    Ok((0..r.rows()).map(|i| (0..r.rows()).map(|k| &alpha[(i, k)] * &r[(k, i)]).sum::<Q>()).sum())
}

/// ℤ-basis of the φ-fixed characters of a torus.
pub fn torus_twisted_basis(torus: &RootDatum, phi: &GroupAutomorphism) -> Result<Vec<Weight>> {
    if !torus.is_torus() {
        return Err(Error::InvalidInput("torus_twisted_basis needs a torus".into()));
    }
    if phi.group != *torus {
        return Err(Error::GroupMismatch);
    }
    Ok(fixed_sublattice(&phi.lattice_action))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeviReport {
    pub finite: bool,
    pub free_rank: usize,
    /// Invariant factors of the cokernel, unit factors included.
    pub invariant_factors: Vec<i64>,
    pub torsion: Vec<i64>,
    pub ambient_fixed_basis: Vec<Weight>,
    pub sub_fixed_basis: Vec<Weight>,
    /// The induced map between fixed lattices in these bases.
    pub induced_map: ZMatrix,
}

/// Cokernel of `X*(T')^φ → X*(T)^φ` for the restriction `X*(T') → X*(T)`.
pub fn levi_finiteness_check(
    restriction: &LatticeMap,
    phi_ambient: &LatticeMap,
    phi_sub: &LatticeMap,
) -> Result<LeviReport> {
    let (big, small) = (restriction.source_rank(), restriction.target_rank());
    for (m, r) in [(phi_ambient, big), (phi_sub, small)] {
        if m.source_rank() != r || m.target_rank() != r {
            return Err(Error::DimensionMismatch { expected: r, got: m.source_rank() });
        }
    }
    if restriction.compose(phi_ambient) != phi_sub.compose(restriction) {
        return Err(Error::IncompatibleAutomorphism("restriction does not intertwine the two actions".into()));
    }
    let ambient_fixed = fixed_sublattice(phi_ambient);
    let sub_fixed = fixed_sublattice(phi_sub);
    let (m, mp) = (sub_fixed.len(), ambient_fixed.len());
    let basis_rows: Vec<Vec<Q>> = (0..small)
        .map(|i| sub_fixed.iter().map(|b| Q::from_int(b.0[i])).collect())
        .collect();
    let mut induced = vec![vec![0i64; mp]; m];
    for (j, b) in ambient_fixed.iter().enumerate() {
        let img = restriction.apply(b);
        let rhs: Vec<Q> = img.0.iter().map(|&x| Q::from_int(x)).collect();
        let coeffs = if m == 0 {
            Vec::new()
        } else {
            solve(&basis_rows, &rhs).ok_or_else(|| Error::Internal("fixed vector outside the fixed sublattice".into()))?
        };
        for (i, c) in coeffs.iter().enumerate() {
            induced[i][j] = c.to_i64().filter(|_| c.is_integer()).ok_or_else(|| {
                Error::Internal("fixed sublattice basis does not span integrally".into())
            })?;
        }
    }
    let induced = if m == 0 { ZMatrix::zeros(0, mp) } else { ZMatrix::from_i64_rows(&induced) };
    let factors = if m == 0 {
        crate::lattice::CokernelFactors { free_rank: 0, invariant_factors: Vec::new() }
    } else if mp == 0 {
        crate::lattice::CokernelFactors { free_rank: m, invariant_factors: Vec::new() }
    } else {
        cokernel_invariant_factors(&LatticeMap(induced.clone()))
    };
    Ok(LeviReport {
        finite: factors.is_finite(),
        free_rank: factors.free_rank,
        torsion: factors.torsion(),
        invariant_factors: factors.invariant_factors,
        ambient_fixed_basis: ambient_fixed,
        sub_fixed_basis: sub_fixed,
        induced_map: induced,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightRecord {
    pub weight: Weight,
    pub multiplicity: i64,
    pub orbit_size: usize,
    pub value: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FinitenessCertificate {
    /// Number of distinct twists of `V` summed to obtain a φ-stable character (1 if `V` is
    /// already φ-stable).
    pub envelope_size: usize,
    pub weights: Vec<WeightRecord>,
    pub v0: Q,
    pub r: usize,
    pub lambda0: Weight,
    pub lambda0_invariant: bool,
    pub lambda0_multiplicity: i64,
    pub lambda0_value: Q,
    /// Least value of the functional on the other φ-invariant weights of `Λ^r V`.
    pub next_invariant_value: Option<Q>,
    pub strictly_minimal: bool,
    /// `v₀ ≥ 0`, equivalently `v(λ₀) ≥ 0`.
    pub v0_nonnegative: bool,
    pub verified: bool,
    pub failure: Option<String>,
}

fn orbit(action: &LatticeMap, w: &Weight) -> Vec<Weight> {
    let mut out = vec![w.clone()];
    let mut cur = action.apply(w);
    while cur != *w {
        out.push(cur.clone());
        cur = action.apply(&cur);
    }
    out
}

/// The data of the exterior-power argument for a rational functional `v` on the lattice.
pub fn valuation_certificate(
    phi: &GroupAutomorphism,
    rep: &TensorWord,
    v: &[Q],
) -> Result<FinitenessCertificate> {
    let group = &phi.group;
    if v.len() != group.rank() {
        return Err(Error::DimensionMismatch { expected: group.rank(), got: v.len() });
    }
    if phi.order(DEFAULT_ORDER_BOUND).is_none() {
        return Err(Error::InfiniteOrder { bound: DEFAULT_ORDER_BOUND });
    }
    valuation_certificate_for_character(&phi.lattice_action, &rep.character(group), v)
}

pub fn valuation_certificate_for_character(
    action: &LatticeMap,
    chi: &Character,
    v: &[Q],
) -> Result<FinitenessCertificate> {
    if chi.is_virtual() {
        return Err(Error::VirtualCharacter);
    }
    let twist = |c: &Character| c.map_weights(|w| action.apply(w));
    let mut envelope = vec![chi.clone()];
    let mut cur = twist(chi);
    while cur != *chi {
        if !envelope.contains(&cur) {
            envelope.push(cur.clone());
        }
        cur = twist(&cur);
        if envelope.len() > DEFAULT_ORDER_BOUND {
            return Err(Error::InfiniteOrder { bound: DEFAULT_ORDER_BOUND });
        }
    }
    let stable = envelope.iter().skip(1).try_fold(chi.clone(), |acc, c| acc.add(c))?;

    let mut weights = Vec::new();
    for (w, &m) in stable.terms() {
        let orb = orbit(action, w);
        let total = orb.iter().fold(Weight::zero(w.rank()), |a, x| &a + x);
        let value = &total.eval(v) / &Q::from_int(orb.len() as i64);
        weights.push(WeightRecord { weight: w.clone(), multiplicity: m, orbit_size: orb.len(), value });
    }
    let v0 = weights.iter().map(|r| r.value.clone()).min().expect("nonzero representation");
    let minimal: Vec<&WeightRecord> = weights.iter().filter(|r| r.value == v0).collect();
    let r: usize = minimal.iter().map(|x| x.multiplicity as usize).sum();
    let lambda0 = minimal
        .iter()
        .fold(Weight::zero(stable.group().rank()), |a, x| &a + &x.weight.scale(x.multiplicity));
    let lambda0_value = lambda0.eval(v);
    let lambda0_invariant = action.apply(&lambda0) == lambda0;

    let ext = exterior_power_character(&stable, r)?;
    let lambda0_multiplicity = ext.multiplicity(&lambda0);
    let next_invariant_value = ext
        .terms()
        .keys()
        .filter(|w| **w != lambda0 && action.apply(w) == **w)
        .map(|w| w.eval(v))
        .min();
    let strictly_minimal = next_invariant_value.as_ref().is_none_or(|x| *x > lambda0_value);
    let expected_value = &v0 * &Q::from_int(r as i64);
    let failure = if !lambda0_invariant {
        Some("λ₀ is not φ-invariant".to_string())
    } else if lambda0_multiplicity != 1 {
        Some(format!("λ₀ has multiplicity {lambda0_multiplicity} in the exterior power"))
    } else if lambda0_value != expected_value {
        Some(format!("v(λ₀) = {lambda0_value} differs from r·v₀ = {expected_value}"))
    } else if !strictly_minimal {
        Some("another φ-invariant weight attains the minimum".to_string())
    } else {
        None
    };
    Ok(FinitenessCertificate {
        envelope_size: envelope.len(),
        weights,
        v0_nonnegative: !v0.is_negative(),
        v0,
        r,
        lambda0,
        lambda0_invariant,
        lambda0_multiplicity,
        lambda0_value,
        next_invariant_value,
        strictly_minimal,
        verified: failure.is_none(),
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repring::weyl_character;
    use crate::sampling::point_rng;
    use proptest::prelude::*;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    fn w(c: &[i64]) -> Weight {
        Weight(c.to_vec())
    }

    fn tw(s: &str) -> TensorWord {
        s.parse().unwrap()
    }

    fn normalized(group: &RootDatum, theta: Theta) -> GroupAutomorphism {
        let raw = GroupAutomorphism::new(group, theta, None, None).unwrap();
        normalize_automorphism(group, &raw).unwrap()
    }

    fn gl2_swap() -> RootDatum {
        RootDatum::product(vec![RootDatum::gl(2), RootDatum::gl(2)])
    }

    #[test]
    fn normalization_examples() {
        let g = RootDatum::gl(2);
        assert!(normalized(&g, Theta::Identity).lattice_action().is_identity());
        let ti = normalized(&g, Theta::TransposeInverse);
        assert_eq!(ti.lattice_action(), &LatticeMap::from_ints(&[&[0, -1], &[-1, 0]]));
        assert!(ti.preserves_dominant_cone());
        assert_eq!(ti.lattice_action().apply(&w(&[3, 1])), w(&[-1, -3]));

        let t = RootDatum::torus(2);
        let swap = LatticeMap::from_ints(&[&[0, 1], &[1, 0]]);
        let raw = GroupAutomorphism::new(&t, Theta::Lattice(swap.clone()), None, None).unwrap();
        assert_eq!(normalize_automorphism(&t, &raw).unwrap(), raw);
    }

    #[test]
    fn sl3_transpose_inverse_normalizes_to_the_diagram_flip() {
        let g = RootDatum::sl(3);
        let phi = normalized(&g, Theta::TransposeInverse);
        let (a1, a2) = (g.simple_roots()[0].clone(), g.simple_roots()[1].clone());
        assert_eq!(phi.lattice_action().apply(&a1), a2);
        assert_eq!(phi.lattice_action().apply(&a2), a1);
        assert_eq!(phi.order(10), Some(2));
    }

    #[test]
    fn inner_automorphisms_normalize_to_the_identity() {
        let g = RootDatum::gl(3);
        let h = QMatrix::from_ints(&[&[0, 2, 0], &[0, 0, 1], &[3, 0, 0]]);
        let raw = GroupAutomorphism::new(&g, Theta::Identity, Some(h), None).unwrap();
        assert!(!raw.lattice_action().is_identity());
        assert!(normalize_automorphism(&g, &raw).unwrap().lattice_action().is_identity());
        let generic = QMatrix::from_ints(&[&[1, 2, 0], &[0, 1, 1], &[1, 0, 1]]);
        let raw = GroupAutomorphism::new(&g, Theta::Identity, Some(generic), None).unwrap();
        assert!(normalize_automorphism(&g, &raw).unwrap().lattice_action().is_identity());
    }

    #[test]
    fn invalid_automorphisms_are_rejected() {
        let t = RootDatum::torus(2);
        let hyperbolic = LatticeMap::from_ints(&[&[2, 1], &[1, 1]]);
        let raw = GroupAutomorphism::new(&t, Theta::Lattice(hyperbolic), None, None).unwrap();
        assert_eq!(normalize_automorphism(&t, &raw), Err(Error::InfiniteOrder { bound: DEFAULT_ORDER_BOUND }));
        let g = RootDatum::gl(2);
        let wrong = LatticeMap::from_ints(&[&[0, 1], &[1, 0]]);
        assert!(matches!(
            GroupAutomorphism::new(&g, Theta::TransposeInverse, None, Some(wrong)),
            Err(Error::IncompatibleAutomorphism(_))
        ));
        let mixed = RootDatum::product(vec![RootDatum::gl(2), RootDatum::sl(2)]);
        assert!(GroupAutomorphism::new(&mixed, Theta::FactorPermutation(vec![1, 0]), None, None).is_err());
        assert!(GroupAutomorphism::new(&g, Theta::Lattice(LatticeMap::identity(2)), None, None).is_err());
    }

    #[test]
    fn fixed_weight_examples() {
        let g = RootDatum::gl(2);
        let all = fixed_dominant_weights(&g, &GroupAutomorphism::identity(&g), 2);
        assert_eq!(all.len(), 15);
        assert!(all.iter().all(|x| g.is_dominant(x)));
        let ti = normalized(&g, Theta::TransposeInverse);
        assert_eq!(fixed_dominant_weights(&g, &ti, 3), vec![w(&[0, 0]), w(&[1, -1]), w(&[2, -2]), w(&[3, -3])]);
        let p = gl2_swap();
        let swap = normalized(&p, Theta::FactorPermutation(vec![1, 0]));
        let fixed = fixed_dominant_weights(&p, &swap, 1);
        assert_eq!(fixed.len(), 6);
        assert!(fixed.iter().all(|x| x.0[..2] == x.0[2..]));
    }

    #[test]
    fn irreducible_words_have_the_right_characters() {
        let g = RootDatum::gl(3);
        for lam in [[2, 0, 0], [1, 1, 0], [1, 1, 1], [3, 1, 1], [0, -1, -1]] {
            let lam = w(&lam);
            let word = irreducible_word(&g, &lam).unwrap();
            assert_eq!(word.character(&g), weyl_character(&g, &lam).unwrap(), "{lam:?}");
        }
        assert!(irreducible_word(&g, &w(&[2, 1, 0])).is_none());
        assert!(irreducible_word(&g, &w(&[0, 0, -2])).is_none());
        let sl = RootDatum::sl(2);
        assert_eq!(irreducible_word(&sl, &w(&[3])).unwrap().character(&sl), weyl_character(&sl, &w(&[3])).unwrap());
        assert_eq!(irreducible_word(&RootDatum::gl(2), &w(&[1, -1])).unwrap(), tw("tensor(sym(std,2),det(-1))"));
    }

    #[test]
    fn identity_intertwiner_of_an_irreducible_is_the_identity() {
        let g = RootDatum::gl(2);
        let it = equivariance_intertwiner(&GroupAutomorphism::identity(&g), &tw("tensor(sym(std,2),det(-1))"), &SampleConfig::default())
            .unwrap();
        assert!(it.alpha.is_identity());
        assert_eq!(it.report.solution_dimension, 1);
        assert_eq!(it.twisted_trace(&QMatrix::identity(2)).unwrap(), q(3));
    }

    #[test]
    fn transpose_inverse_intertwiner_on_the_adjoint() {
        let g = RootDatum::gl(2);
        let phi = normalized(&g, Theta::TransposeInverse);
        let rep = tw("tensor(sym(std,2),det(-1))");
        let it = equivariance_intertwiner(&phi, &rep, &SampleConfig::default()).unwrap();
        assert_eq!(it.report.solution_dimension, 1);
        let sq = &it.alpha * &it.alpha;
        assert_eq!(sq, QMatrix::scalar(3, sq[(0, 0)].clone()));
        // ρ(diag(2,3)) = diag(2/3, 1, 3/2) in the monomial basis.
        let t = QMatrix::diagonal(&[q(2), q(3)]);
        let rho = QMatrix::diagonal(&[Q::new(2, 3), q(1), Q::new(3, 2)]);
        assert_eq!(rep.evaluate(&t).unwrap(), rho);
        assert_eq!(it.twisted_trace(&t).unwrap(), (&it.alpha * &rho).trace());
        assert_eq!(it.twisted_trace(&QMatrix::identity(2)).unwrap(), it.alpha.trace());
    }

    #[test]
    fn std_is_not_fixed_by_transpose_inverse() {
        let g = RootDatum::gl(2);
        let phi = normalized(&g, Theta::TransposeInverse);
        let err = equivariance_intertwiner(&phi, &TensorWord::Std, &SampleConfig::default()).unwrap_err();
        assert_eq!(err, Error::NotPhiFixed);
        assert_eq!(err.to_string(), "V not φ-fixed");
        let reducible = tw("sum(std,dual(std))");
        let it = equivariance_intertwiner(&phi, &reducible, &SampleConfig::default()).unwrap();
        assert_eq!(it.report.solution_dimension, 2);
    }

    #[test]
    fn torus_basis_examples() {
        let t3 = RootDatum::torus(3);
        let cyc = LatticeMap::from_ints(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
        let phi = GroupAutomorphism::new(&t3, Theta::Lattice(cyc), None, None).unwrap();
        assert_eq!(torus_twisted_basis(&t3, &phi).unwrap(), vec![w(&[1, 1, 1])]);
        assert_eq!(torus_twisted_basis(&t3, &GroupAutomorphism::identity(&t3)).unwrap().len(), 3);
        let t1 = RootDatum::torus(1);
        let inv = GroupAutomorphism::new(&t1, Theta::TransposeInverse, None, None).unwrap();
        assert!(torus_twisted_basis(&t1, &inv).unwrap().is_empty());
        assert!(torus_twisted_basis(&RootDatum::gl(2), &GroupAutomorphism::identity(&RootDatum::gl(2))).is_err());
    }

    #[test]
    fn levi_examples() {
        let swap = LatticeMap::from_ints(&[&[0, 1], &[1, 0]]);
        let rep = levi_finiteness_check(&LatticeMap::from_ints(&[&[1, 1]]), &swap, &LatticeMap::identity(1)).unwrap();
        assert!(rep.finite);
        assert_eq!(rep.torsion, vec![2]);
        let same = levi_finiteness_check(&LatticeMap::identity(2), &LatticeMap::identity(2), &LatticeMap::identity(2)).unwrap();
        assert!(same.finite && same.torsion.is_empty());
        let first = levi_finiteness_check(&LatticeMap::from_ints(&[&[1, 0]]), &LatticeMap::identity(2), &LatticeMap::identity(1)).unwrap();
        assert!(first.finite && first.torsion.is_empty());
        assert!(matches!(
            levi_finiteness_check(&LatticeMap::from_ints(&[&[1, 0]]), &swap, &LatticeMap::identity(1)),
            Err(Error::IncompatibleAutomorphism(_))
        ));
        let inv = LatticeMap::from_ints(&[&[-1]]);
        let none = levi_finiteness_check(&LatticeMap::identity(1), &inv, &inv).unwrap();
        assert!(none.finite && none.sub_fixed_basis.is_empty());
    }

    #[test]
    fn valuation_certificate_examples() {
        let g = RootDatum::gl(2);
        let c = valuation_certificate(&GroupAutomorphism::identity(&g), &TensorWord::Std, &[q(1), q(0)]).unwrap();
        assert_eq!((c.v0.clone(), c.r, c.lambda0.clone(), c.lambda0_multiplicity), (q(0), 1, w(&[0, 1]), 1));
        assert!(c.verified && c.v0_nonnegative);

        let t = RootDatum::torus(2);
        let swap = GroupAutomorphism::new(&t, Theta::Lattice(LatticeMap::from_ints(&[&[0, 1], &[1, 0]])), None, None).unwrap();
        let c = valuation_certificate(&swap, &TensorWord::Std, &[q(1), q(0)]).unwrap();
        assert!(c.weights.iter().all(|r| r.orbit_size == 2 && r.value == Q::new(1, 2)));
        assert_eq!((c.r, c.lambda0.clone(), c.lambda0_multiplicity), (2, w(&[1, 1]), 1));
        assert!(c.verified);

        let c = valuation_certificate(&GroupAutomorphism::identity(&g), &TensorWord::DetPower(0), &[q(3), q(-1)]).unwrap();
        assert_eq!((c.r, c.lambda0.clone(), c.lambda0_multiplicity), (1, w(&[0, 0]), 1));

        let ti = normalized(&g, Theta::TransposeInverse);
        let c = valuation_certificate(&ti, &TensorWord::Std, &[Q::new(1, 3), q(-2)]).unwrap();
        assert_eq!(c.envelope_size, 2);
        assert!(c.verified && c.lambda0_invariant);

        let bad = Character::new(&g, [(w(&[1, 0]), -1)]).unwrap();
        assert_eq!(
            valuation_certificate_for_character(ti.lattice_action(), &bad, &[q(1), q(0)]),
            Err(Error::VirtualCharacter)
        );
    }

    fn cases() -> Vec<(GroupAutomorphism, TensorWord)> {
        let gl2 = RootDatum::gl(2);
        let gl3 = RootDatum::gl(3);
        let sl3 = RootDatum::sl(3);
        let p = gl2_swap();
        let h = QMatrix::from_ints(&[&[1, 1], &[0, 2]]);
        vec![
            (normalized(&gl2, Theta::TransposeInverse), tw("tensor(sym(std,2),det(-1))")),
            (normalized(&gl2, Theta::TransposeInverse), tw("sum(std,dual(std))")),
            (normalized(&gl3, Theta::TransposeInverse), tw("tensor(std,dual(std))")),
            (normalized(&sl3, Theta::TransposeInverse), tw("tensor(std,dual(std))")),
            (GroupAutomorphism::new(&gl2, Theta::Identity, Some(h), None).unwrap(), tw("ext(std,2)")),
            (normalized(&p, Theta::FactorPermutation(vec![1, 0])), tw("sum(std,dual(std))")),
        ]
    }

    #[test]
    fn product_swap_intertwiner_verifies() {
        for (phi, rep) in cases() {
            let it = equivariance_intertwiner(&phi, &rep, &SampleConfig { verification: 10, ..Default::default() }).unwrap();
            assert!(it.alpha.is_invertible(), "{rep}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn twisted_traces_are_twisted_class_functions(case in 0usize..6, seed in 0u64..10_000) {
            let (phi, rep) = cases().swap_remove(case);
            let it = equivariance_intertwiner(&phi, &rep, &SampleConfig { verification: 5, ..Default::default() }).unwrap();
            let mut rng = point_rng(seed, 99, 0);
            let g = random_group_element(phi.group(), &mut rng);
            let h = random_group_element(phi.group(), &mut rng);
            let moved = &(&h * &g) * &phi.apply(&h).unwrap().inverse().unwrap();
            prop_assert_eq!(it.twisted_trace(&moved).unwrap(), it.twisted_trace(&g).unwrap());
        }

        #[test]
        fn torus_basis_matches_brute_force(perm_seed in 0u64..1000, rank in 1usize..=3) {
            let mut rng = point_rng(perm_seed, 5, 0);
            let mut pi: Vec<usize> = (0..rank).collect();
            rand::seq::SliceRandom::shuffle(pi.as_mut_slice(), &mut rng);
            let signs: Vec<i64> = (0..rank).map(|_| if rand::Rng::gen_bool(&mut rng, 0.5) { 1 } else { -1 }).collect();
            let mut rows = vec![vec![0i64; rank]; rank];
            for j in 0..rank {
                rows[pi[j]][j] = signs[j];
            }
            let t = RootDatum::torus(rank);
            let phi = GroupAutomorphism::new(&t, Theta::Lattice(LatticeMap(ZMatrix::from_i64_rows(&rows))), None, None).unwrap();
            let basis = torus_twisted_basis(&t, &phi).unwrap();
            let span = Echelon::new();
            let mut span = span;
            for b in &basis {
                span.insert(&b.0.iter().map(|&x| q(x)).collect::<Vec<_>>());
            }
            let mut cur = vec![-3i64; rank];
            loop {
                let x = Weight(cur.clone());
                let fixed = phi.lattice_action().apply(&x) == x;
                prop_assert_eq!(fixed, span.contains(&cur.iter().map(|&c| q(c)).collect::<Vec<_>>()));
                let Some(k) = (0..rank).rev().find(|&k| cur[k] < 3) else { break };
                cur[k] += 1;
                for c in cur.iter_mut().skip(k + 1) { *c = -3; }
            }
        }
    }
}
