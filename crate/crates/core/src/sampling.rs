//! Seeded sampling of small rationals and group elements.
//!
//! Every random draw goes through a [`ChaCha8Rng`] whose seed is derived from a base seed plus a
//! stream tag and an index, so concurrent evaluation of sample points yields the same values no
//! matter how the work is scheduled.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::RootDatum;
use crate::matrix::QMatrix;
use crate::rational::Q;

pub type SampleRng = ChaCha8Rng;

/// Entries drawn for random matrices.
const ENTRY_POOL: [(i64, i64); 15] = [
    (0, 1),
    (1, 1),
    (-1, 1),
    (2, 1),
    (-2, 1),
    (3, 1),
    (-3, 1),
    (1, 2),
    (-1, 2),
    (1, 3),
    (-1, 3),
    (2, 3),
    (-2, 3),
    (3, 2),
    (-3, 2),
];

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for item `index` of stream `stream` under `seed`.
pub fn point_rng(seed: u64, stream: u64, index: u64) -> SampleRng {
    let s = splitmix(splitmix(splitmix(seed) ^ stream.wrapping_mul(0xA24B_AED4_963E_E407)) ^ index);
    ChaCha8Rng::seed_from_u64(s)
}

pub fn small_rational(rng: &mut SampleRng) -> Q {
    let (n, d) = *ENTRY_POOL.choose(rng).unwrap();
    Q::new(n, d)
}

pub fn nonzero_small_rational(rng: &mut SampleRng) -> Q {
    let (n, d) = *ENTRY_POOL[1..].choose(rng).unwrap();
    Q::new(n, d)
}

pub fn small_int(rng: &mut SampleRng, lo: i64, hi: i64) -> i64 {
    rng.gen_range(lo..=hi)
}

/// Random invertible matrix with entries from the small pool, resampled on singularity.
pub fn random_gl(n: usize, rng: &mut SampleRng) -> QMatrix {
    loop {
        let m = QMatrix::from_flat(n, n, (0..n * n).map(|_| small_rational(rng)).collect());
        if m.is_invertible() {
            return m;
        }
    }
}

/// Random determinant-one matrix: a random invertible matrix with its first row rescaled.
pub fn random_sl(n: usize, rng: &mut SampleRng) -> QMatrix {
    let mut m = random_gl(n, rng);
    let inv_det = m.det().recip().unwrap();
    for j in 0..n {
        let v = &m[(0, j)] * &inv_det;
        m[(0, j)] = v;
    }
    m
}

pub fn random_diagonal(n: usize, rng: &mut SampleRng) -> QMatrix {
    QMatrix::diagonal(&(0..n).map(|_| nonzero_small_rational(rng)).collect::<Vec<_>>())
}

/// Random element of the standard matrix realization of `group`.
pub fn random_group_element(group: &RootDatum, rng: &mut SampleRng) -> QMatrix {
    let blocks: Vec<QMatrix> = group
        .blocks()
        .iter()
        .enumerate()
        .map(|(b, blk)| {
            if group.block_is_torus(b) {
                random_diagonal(blk.std_dim, rng)
            } else if group.block_has_det_one(b) {
                random_sl(blk.std_dim, rng)
            } else {
                random_gl(blk.std_dim, rng)
            }
        })
        .collect();
    QMatrix::block_diag(&blocks)
}

/// Random element of the diagonal maximal torus of the realization.
pub fn random_torus_element(group: &RootDatum, rng: &mut SampleRng) -> QMatrix {
    let mut d: Vec<Q> = (0..group.std_dim()).map(|_| nonzero_small_rational(rng)).collect();
    for (b, blk) in group.blocks().iter().enumerate() {
        if group.block_has_det_one(b) {
            let range = blk.std_offset..blk.std_offset + blk.std_dim - 1;
            let prod: Q = d[range].iter().cloned().product();
            d[blk.std_offset + blk.std_dim - 1] = prod.recip().unwrap();
        }
    }
    QMatrix::diagonal(&d)
}

/// A deterministic generating set of the realization: elementary unipotents and simple
/// diagonal elements in every block.
pub fn elementary_generators(group: &RootDatum) -> Vec<QMatrix> {
    let n = group.std_dim();
    let mut out = Vec::new();
    for (b, blk) in group.blocks().iter().enumerate() {
        let range = blk.std_offset..blk.std_offset + blk.std_dim;
        if !group.block_is_torus(b) {
            for i in range.clone() {
                for j in range.clone() {
                    if i != j {
                        let mut m = QMatrix::identity(n);
                        m[(i, j)] = Q::one();
                        out.push(m);
                    }
                }
            }
        }
        if group.block_has_det_one(b) {
            for i in range.clone().take(blk.std_dim - 1) {
                let mut m = QMatrix::identity(n);
                m[(i, i)] = Q::from_int(2);
                m[(i + 1, i + 1)] = Q::new(1, 2);
                out.push(m);
            }
        } else {
            for i in range {
                let mut m = QMatrix::identity(n);
                m[(i, i)] = Q::from_int(2);
                out.push(m);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<Q> = (0..8).map(|_| small_rational(&mut point_rng(7, 1, 3))).collect();
        let b: Vec<Q> = (0..8).map(|_| small_rational(&mut point_rng(7, 1, 3))).collect();
        assert_eq!(a, b);
        let mut r1 = point_rng(7, 1, 3);
        let mut r2 = point_rng(7, 1, 4);
        let x: Vec<Q> = (0..16).map(|_| small_rational(&mut r1)).collect();
        let y: Vec<Q> = (0..16).map(|_| small_rational(&mut r2)).collect();
        assert_ne!(x, y);
    }

    #[test]
    fn samples_lie_in_the_group() {
        let mut rng = point_rng(0, 0, 0);
        let g = RootDatum::product(vec![RootDatum::sl(3), RootDatum::gl(2), RootDatum::torus(2)]);
        for _ in 0..20 {
            let m = random_group_element(&g, &mut rng);
            assert!(m.is_invertible());
            assert!(m.submatrix(0..3, 0..3).det().is_one());
            assert!(m[(5, 6)].is_zero() && m[(6, 5)].is_zero());
        }
        for m in elementary_generators(&g) {
            assert!(m.submatrix(0..3, 0..3).det().is_one());
        }
    }
}
