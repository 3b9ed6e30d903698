use exalg::lattice::{
    cokernel_invariant_factors, fixed_sublattice, smith_normal_form, LatticeMap, RootDatum, Weight, ZMatrix,
};
use exalg::matrix::QMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ZMatrix> {
    prop::collection::vec(-6i64..=6, rows * cols)
        .prop_map(move |v| ZMatrix::from_i64_rows(&v.chunks(cols).map(<[i64]>::to_vec).collect::<Vec<_>>()))
}

fn shaped_matrix() -> impl Strategy<Value = ZMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| int_matrix(r, c))
}

// Product of elementary row operations: (target, source, multiplier) with target != source.
fn unimodular(n: usize) -> impl Strategy<Value = ZMatrix> {
    prop::collection::vec((0..n, 0..n, -3i64..=3, any::<bool>()), 0..8).prop_map(move |ops| {
        let mut m = ZMatrix::identity(n);
        for (t, s, k, swap) in ops {
            if t == s {
                continue;
            }
            let mut e = ZMatrix::identity(n);
            if swap {
                e[(t, t)] = BigInt::zero();
                e[(s, s)] = BigInt::zero();
                e[(t, s)] = BigInt::one();
                e[(s, t)] = BigInt::one();
            } else {
                e[(t, s)] = BigInt::from(k);
            }
            m = &e * &m;
        }
        m
    })
}

fn signed_permutation(n: usize) -> impl Strategy<Value = LatticeMap> {
    (Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), prop::collection::vec(any::<bool>(), n)).prop_map(
        move |(perm, signs)| {
            let mut m = ZMatrix::zeros(n, n);
            for (j, (&i, &neg)) in perm.iter().zip(&signs).enumerate() {
                m[(i, j)] = BigInt::from(if neg { -1 } else { 1 });
            }
            LatticeMap(m)
        },
    )
}

fn root_datum() -> impl Strategy<Value = RootDatum> {
    prop_oneof![
        (1usize..=4).prop_map(RootDatum::gl),
        (2usize..=4).prop_map(RootDatum::sl),
        Just(RootDatum::product(vec![RootDatum::gl(2), RootDatum::sl(3)])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_reconstructs_and_divides(m in shaped_matrix()) {
        let s = smith_normal_form(&m);
        prop_assert_eq!(&(&s.u * &s.d) * &s.v, m.clone());
        prop_assert!(s.u.det().abs().is_one());
        prop_assert!(s.v.det().abs().is_one());
        let f = s.invariant_factors();
        prop_assert_eq!(f.len(), m.to_q().rank());
        for w in f.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                prop_assert!(i == j || s.d[(i, j)].is_zero());
            }
        }
    }

    #[test]
    fn fixed_sublattice_is_the_rational_eigenspace(a in signed_permutation(4), u in unimodular(4)) {
        // Conjugating keeps finite order but breaks the coordinate structure.
        let su = smith_normal_form(&u);
        let u_inv = &su.v_inv * &(&su.d * &su.u_inv);
        let conj = LatticeMap(&(&u * &a.0) * &u_inv);
        for map in [a, conj] {
            let basis = fixed_sublattice(&map);
            for v in &basis {
                prop_assert_eq!(&map.apply(v), v);
            }
            let expected = (&map.0.to_q() - &QMatrix::identity(4)).nullspace().len();
            prop_assert_eq!(basis.len(), expected);
        }
    }

    #[test]
    fn cokernel_factors_ignore_unimodular_changes(
        (m, u, v) in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| (int_matrix(r, c), unimodular(r), unimodular(c)))
    ) {
        let base = cokernel_invariant_factors(&LatticeMap(m.clone()));
        let moved = cokernel_invariant_factors(&LatticeMap(&(&u * &m) * &v));
        prop_assert_eq!(base, moved);
    }

    #[test]
    fn dominant_representative_is_conjugate_and_dominant(
        (g, coords) in root_datum().prop_flat_map(|g| {
            let r = g.rank();
            (Just(g), prop::collection::vec(-5i64..=5, r))
        })
    ) {
        let w = Weight(coords);
        let (dom, elt) = g.dominant_representative(&w);
        prop_assert_eq!(&elt.lattice.apply(&w), &dom);
        prop_assert!(g.weyl_orbit(&w).contains(&dom));
        for c in g.simple_coroots() {
            prop_assert!(dom.pair(c) >= 0);
        }
        prop_assert!(g.is_dominant(&dom));
    }
}
