//! Characters, the representation ring, and Newton's identities.
//!
//! A [`Character`] is a Laurent polynomial on the maximal torus, stored as a map from weights to
//! integer multiplicities. Irreducible characters come from Demazure operators applied along a
//! reduced word of the longest Weyl element, which works uniformly for every supported root
//! datum and never divides polynomials.

use std::collections::{BTreeMap, HashMap};

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{RootDatum, Weight};
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    group: RootDatum,
    terms: BTreeMap<Weight, i64>,
}

fn add_term(terms: &mut BTreeMap<Weight, i64>, w: Weight, c: i64) {
    use std::collections::btree_map::Entry;
    if c == 0 {
        return;
    }
    match terms.entry(w) {
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if *o.get() == 0 {
                o.remove();
            }
        }
        Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

fn add_hash_term(terms: &mut HashMap<Weight, i64>, w: Weight, c: i64) {
    use std::collections::hash_map::Entry;
    if c == 0 {
        return;
    }
    match terms.entry(w) {
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if *o.get() == 0 {
                o.remove();
            }
        }
        Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

impl Character {
    pub fn new(group: &RootDatum, terms: impl IntoIterator<Item = (Weight, i64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (w, c) in terms {
            if w.rank() != group.rank() {
                return Err(Error::RankMismatch { expected: group.rank(), got: w.rank(), weight: w });
            }
            add_term(&mut map, w, c);
        }
        Ok(Character { group: group.clone(), terms: map })
    }

    fn from_hash(group: &RootDatum, terms: HashMap<Weight, i64>) -> Self {
        Character { group: group.clone(), terms: terms.into_iter().filter(|(_, c)| *c != 0).collect() }
    }

    pub fn zero(group: &RootDatum) -> Self {
        Character { group: group.clone(), terms: BTreeMap::new() }
    }

    /// The trivial one-dimensional representation.
    pub fn unit(group: &RootDatum) -> Self {
        Character::monomial(group, Weight::zero(group.rank()))
    }

    pub fn monomial(group: &RootDatum, w: Weight) -> Self {
        Character { group: group.clone(), terms: BTreeMap::from([(w, 1)]) }
    }

    /// Character of the standard faithful representation.
    pub fn standard(group: &RootDatum) -> Self {
        let mut terms = BTreeMap::new();
        for w in group.std_weights() {
            add_term(&mut terms, w.clone(), 1);
        }
        Character { group: group.clone(), terms }
    }

    /// `det^k` of the standard representation.
    pub fn det_power(group: &RootDatum, k: i64) -> Self {
        let det = group.std_weights().iter().fold(Weight::zero(group.rank()), |a, w| &a + w);
        Character::monomial(group, det.scale(k))
    }

    pub fn group(&self) -> &RootDatum {
        &self.group
    }

    pub fn terms(&self) -> &BTreeMap<Weight, i64> {
        &self.terms
    }

    pub fn multiplicity(&self, w: &Weight) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Signed combination: some multiplicity is negative.
    pub fn is_virtual(&self) -> bool {
        self.terms.values().any(|&c| c < 0)
    }

    /// Value at the identity element (the dimension, for a genuine representation).
    pub fn dimension(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Every weight repeated by its multiplicity; requires a genuine character.
    pub fn weight_multiset(&self) -> Result<Vec<Weight>> {
        if self.is_virtual() {
            return Err(Error::VirtualCharacter);
        }
        Ok(self
            .terms
            .iter()
            .flat_map(|(w, &c)| std::iter::repeat_n(w.clone(), c as usize))
            .collect())
    }

    pub fn is_weyl_invariant(&self) -> bool {
        self.group.weyl_generators().iter().all(|s| {
            self.terms.iter().all(|(w, &c)| self.multiplicity(&s.apply(w)) == c)
        })
    }

    pub fn add(&self, other: &Character) -> Result<Character> {
        self.check_group(other)?;
        let mut terms = self.terms.clone();
        for (w, &c) in &other.terms {
            add_term(&mut terms, w.clone(), c);
        }
        Ok(Character { group: self.group.clone(), terms })
    }

    pub fn scale(&self, k: i64) -> Character {
        Character {
            group: self.group.clone(),
            terms: if k == 0 {
                BTreeMap::new()
            } else {
                self.terms.iter().map(|(w, &c)| (w.clone(), c * k)).collect()
            },
        }
    }

    pub fn sub(&self, other: &Character) -> Result<Character> {
        self.add(&other.scale(-1))
    }

    /// Character of the dual representation.
    pub fn dual(&self) -> Character {
        Character {
            group: self.group.clone(),
            terms: self.terms.iter().map(|(w, &c)| (-w, c)).collect(),
        }
    }

    /// Image under a lattice endomorphism (for instance the action of an automorphism).
    pub fn map_weights(&self, f: impl Fn(&Weight) -> Weight) -> Character {
        let mut terms = BTreeMap::new();
        for (w, &c) in &self.terms {
            add_term(&mut terms, f(w), c);
        }
        Character { group: self.group.clone(), terms }
    }

    fn check_group(&self, other: &Character) -> Result<()> {
        if self.group == other.group {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    /// Sorted `(weight, multiplicity)` pairs.
    pub fn to_pairs(&self) -> Vec<(Weight, i64)> {
        self.terms.iter().map(|(w, &c)| (w.clone(), c)).collect()
    }
}

impl Serialize for Character {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            weight: &'a Weight,
            multiplicity: i64,
        }
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (w, &c) in &self.terms {
            seq.serialize_element(&Term { weight: w, multiplicity: c })?;
        }
        seq.end()
    }
}

/// Pointwise Laurent-polynomial product.
pub fn multiply_characters(a: &Character, b: &Character) -> Result<Character> {
    a.check_group(b)?;
    let mut terms = HashMap::new();
    for (w1, &c1) in &a.terms {
        for (w2, &c2) in &b.terms {
            add_hash_term(&mut terms, w1 + w2, c1 * c2);
        }
    }
    Ok(Character::from_hash(&a.group, terms))
}

/// Demazure operator for the simple reflection `i`, applied to a Laurent polynomial.
fn demazure(group: &RootDatum, i: usize, terms: &HashMap<Weight, i64>) -> HashMap<Weight, i64> {
    let alpha = &group.simple_roots()[i];
    let coroot = &group.simple_coroots()[i];
    let mut out = HashMap::new();
    for (mu, &c) in terms {
        let k = mu.pair(coroot);
        if k >= 0 {
            let mut cur = mu.clone();
            for _ in 0..=k {
                add_hash_term(&mut out, cur.clone(), c);
                cur = &cur - alpha;
            }
        } else if k <= -2 {
            let mut cur = mu + alpha;
            for _ in 0..(-k - 1) {
                add_hash_term(&mut out, cur.clone(), -c);
                cur = &cur + alpha;
            }
        }
    }
    out
}

/// Character of the irreducible representation with highest weight `lambda`.
pub fn weyl_character(group: &RootDatum, lambda: &Weight) -> Result<Character> {
    if lambda.rank() != group.rank() {
        return Err(Error::RankMismatch { expected: group.rank(), got: lambda.rank(), weight: lambda.clone() });
    }
    if !group.is_dominant(lambda) {
        return Err(Error::NonDominant(lambda.clone()));
    }
    let longest = group.weyl_elements().pop().expect("Weyl group contains the identity");
    let mut poly: HashMap<Weight, i64> = HashMap::from([(lambda.clone(), 1)]);
    // Apply D_{i_1} ∘ … ∘ D_{i_N}, innermost last letter first.
    for &i in longest.word.iter().rev() {
        poly = demazure(group, i, &poly);
    }
    Ok(Character::from_hash(group, poly))
}

/// Weyl dimension formula `∏_{α>0} ⟨λ+ρ, α∨⟩ / ⟨ρ, α∨⟩`.
pub fn weyl_dimension(group: &RootDatum, lambda: &Weight) -> Q {
    let positive: Vec<Weight> = group.roots().into_iter().filter(|r| group.is_positive_root(r)).collect();
    // Positive coroot as the corresponding combination of simple coroots.
    let coroot_of = |r: &Weight| -> Weight {
        let n = group.simple_roots().len();
        let rows: Vec<Vec<Q>> = (0..r.rank())
            .map(|i| (0..n).map(|j| Q::from_int(group.simple_roots()[j].0[i])).collect())
            .collect();
        let rhs: Vec<Q> = r.0.iter().map(|&x| Q::from_int(x)).collect();
        let coeffs = crate::matrix::solve(&rows, &rhs).expect("root in the span of simple roots");
        let mut c = Weight::zero(group.rank());
        for (k, q) in coeffs.iter().enumerate() {
            let k_int = q.to_i64().expect("integral root coordinates");
            c = &c + &group.simple_coroots()[k].scale(k_int);
        }
        c
    };
    let two_rho = positive.iter().fold(Weight::zero(group.rank()), |a, r| &a + r);
    let mut num = Q::one();
    let mut den = Q::one();
    for r in &positive {
        let c = coroot_of(r);
        let rho_pair = Q::new(two_rho.pair(&c), 2);
        num *= Q::from_int(lambda.pair(&c)) + &rho_pair;
        den *= rho_pair;
    }
    num / den
}

/// A virtual representation: integer combination of irreducibles indexed by dominant weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepRingElement {
    group: RootDatum,
    terms: BTreeMap<Weight, i64>,
}

impl RepRingElement {
    pub fn new(group: &RootDatum, terms: impl IntoIterator<Item = (Weight, i64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (w, c) in terms {
            if !group.is_dominant(&w) {
                return Err(Error::NonDominant(w));
            }
            add_term(&mut map, w, c);
        }
        Ok(RepRingElement { group: group.clone(), terms: map })
    }

    pub fn group(&self) -> &RootDatum {
        &self.group
    }

    pub fn terms(&self) -> &BTreeMap<Weight, i64> {
        &self.terms
    }

    pub fn coefficient(&self, w: &Weight) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    /// Irreducible with multiplicity one.
    pub fn is_irreducible(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().all(|&c| c == 1)
    }

    /// `Σ c_λ · χ_λ`.
    pub fn to_character(&self) -> Result<Character> {
        let mut acc = Character::zero(&self.group);
        for (w, &c) in &self.terms {
            acc = acc.add(&weyl_character(&self.group, w)?.scale(c))?;
        }
        Ok(acc)
    }
}

impl Serialize for RepRingElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            highest_weight: &'a Weight,
            coefficient: i64,
        }
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (w, &c) in &self.terms {
            seq.serialize_element(&Term { highest_weight: w, coefficient: c })?;
        }
        seq.end()
    }
}

/// Decomposition into irreducibles by repeatedly subtracting the Weyl character of the
/// lexicographically largest dominant weight still present.
pub fn decompose_character(chi: &Character) -> Result<RepRingElement> {
    let group = &chi.group;
    let mut rest = chi.clone();
    let mut out = BTreeMap::new();
    // Each step removes the current leading weight and only adds lexicographically smaller ones
    // from a finite set; the cap only guards against malformed input.
    let cap = 100_000;
    for _ in 0..cap {
        let Some((lead, &c)) = rest.terms.iter().rev().find(|(w, _)| group.is_dominant(w)) else {
            return if rest.is_zero() {
                Ok(RepRingElement { group: group.clone(), terms: out })
            } else {
                Err(Error::NotAVirtualCharacter)
            };
        };
        let lead = lead.clone();
        if rest.terms.keys().next_back() != Some(&lead) {
            return Err(Error::NotAVirtualCharacter);
        }
        rest = rest.sub(&weyl_character(group, &lead)?.scale(c))?;
        add_term(&mut out, lead, c);
    }
    Err(Error::NotAVirtualCharacter)
}

/// Coefficient of `t^r` in `∏_μ (1 + t·x^μ)` over the weight multiset.
pub fn exterior_power_character(chi: &Character, r: usize) -> Result<Character> {
    let weights = chi.weight_multiset()?;
    if r > weights.len() {
        return Ok(Character::zero(&chi.group));
    }
    let mut layers: Vec<HashMap<Weight, i64>> = vec![HashMap::new(); r + 1];
    layers[0].insert(Weight::zero(chi.group.rank()), 1);
    for (count, mu) in weights.iter().enumerate() {
        for d in (1..=r.min(count + 1)).rev() {
            let shifted: Vec<(Weight, i64)> = layers[d - 1].iter().map(|(w, &c)| (w + mu, c)).collect();
            for (w, c) in shifted {
                add_hash_term(&mut layers[d], w, c);
            }
        }
    }
    Ok(Character::from_hash(&chi.group, layers.swap_remove(r)))
}

/// Coefficient of `t^r` in `∏_μ 1/(1 − t·x^μ)` over the weight multiset.
pub fn symmetric_power_character(chi: &Character, r: usize) -> Result<Character> {
    let weights = chi.weight_multiset()?;
    let mut layers: Vec<HashMap<Weight, i64>> = vec![HashMap::new(); r + 1];
    layers[0].insert(Weight::zero(chi.group.rank()), 1);
    for mu in &weights {
        for d in 1..=r {
            let shifted: Vec<(Weight, i64)> = layers[d - 1].iter().map(|(w, &c)| (w + mu, c)).collect();
            for (w, c) in shifted {
                add_hash_term(&mut layers[d], w, c);
            }
        }
    }
    Ok(Character::from_hash(&chi.group, layers.swap_remove(r)))
}

/// Elementary symmetric values `e₁…e_k` from power sums `p₁…p_k` via
/// `k·e_k = Σ_{i=1}^{k} (−1)^{i−1} e_{k−i} p_i`.
pub fn elementary_from_power_sums(p: &[Q]) -> Vec<Q> {
    let mut e = vec![Q::one()];
    for k in 1..=p.len() {
        let mut acc = Q::zero();
        for i in 1..=k {
            let t = &e[k - i] * &p[i - 1];
            if i % 2 == 1 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        e.push(acc / Q::from_int(k as i64));
    }
    e.remove(0);
    e
}

/// Inverse of [`elementary_from_power_sums`].
pub fn power_sums_from_elementary(e: &[Q]) -> Vec<Q> {
    let mut p: Vec<Q> = Vec::with_capacity(e.len());
    let e_at = |j: usize| if j == 0 { Q::one() } else { e[j - 1].clone() };
    for k in 1..=e.len() {
        // k·e_k − Σ_{i<k} (−1)^{i−1} e_{k−i} p_i = (−1)^{k−1} p_k
        let mut acc = Q::from_int(k as i64) * e_at(k);
        for i in 1..k {
            let t = e_at(k - i) * &p[i - 1];
            if i % 2 == 1 {
                acc -= t;
            } else {
                acc += t;
            }
        }
        p.push(if k % 2 == 1 { acc } else { -acc });
    }
    p
}

/// Newton transform: power sums to elementary symmetric values.
pub fn newton_transform(p: &[Q]) -> Vec<Q> {
    elementary_from_power_sums(p)
}

/// Inverse Newton transform: elementary symmetric values to power sums.
pub fn inverse_newton_transform(e: &[Q]) -> Vec<Q> {
    power_sums_from_elementary(e)
}
