use moduli_betti::chern::{
    k_pairing, k_pairing_direct, prefactor_l, suffix_sums, yoshioka_defect, ChernF1, ChernP2,
    DecompPart, DivisorF1,
};
use moduli_betti::series::Rat;
use moduli_betti::Error;
use proptest::prelude::*;

fn p(r: u32, a: i64, b: i64) -> DecompPart {
    DecompPart::new(r, a, b)
}

#[test]
fn c2_examples() {
    assert_eq!(
        ChernP2::new(1, 0, Rat::from_integer(3)).unwrap().c2(),
        Rat::from_integer(3)
    );
    let g = ChernP2::new(2, -1, Rat::new(7, 8)).unwrap();
    assert_eq!(g.c2(), Rat::from_integer(2));
    assert_eq!(g.dim_moduli(), Rat::from_integer(4));
    assert_eq!(
        ChernP2::new(2, -1, Rat::from_integer(0)).unwrap().c2(),
        Rat::new(1, 4)
    );
    assert_eq!(ChernP2::from_c2(2, -1, 2).unwrap().delta, Rat::new(7, 8));
}

#[test]
fn intersection_form() {
    let e = DivisorF1::new(1, 0);
    let f = DivisorF1::new(0, 1);
    assert_eq!(e.square(), -1);
    assert_eq!(f.square(), 0);
    assert_eq!(e.dot(&f), 1);
    assert_eq!(DivisorF1::K.square(), 8);
}

#[test]
fn defect_examples() {
    assert_eq!(
        yoshioka_defect(&[p(3, 1, 2)]).unwrap(),
        Rat::from_integer(0)
    );
    assert_eq!(
        yoshioka_defect(&[p(1, 0, 0), p(1, 0, 0)]).unwrap(),
        Rat::from_integer(0)
    );
    assert_eq!(
        yoshioka_defect(&[p(1, 1, 0), p(1, 0, 0)]).unwrap(),
        Rat::new(1, 4)
    );
    assert_eq!(yoshioka_defect(&[]), Err(Error::EmptyDecomposition));
}

#[test]
fn k_pairing_examples() {
    assert_eq!(k_pairing(&[p(2, 1, 1)]).unwrap(), 0);
    assert_eq!(k_pairing(&[p(1, 0, 0), p(1, 0, 1)]).unwrap(), -2);
    assert_eq!(k_pairing(&[p(1, 1, 0), p(1, 0, 0)]).unwrap(), 1);
    assert_eq!(
        suffix_sums(&[p(1, 0, 2), p(2, 0, -1), p(1, 0, 3)]),
        vec![4, 2, 3]
    );
}

fn parts() -> impl Strategy<Value = Vec<DecompPart>> {
    prop::collection::vec((1u32..=3, -4i64..=4, -6i64..=6), 1..=4)
        .prop_map(|v| v.into_iter().map(|(r, a, b)| p(r, a, b)).collect())
}

fn deltas(n: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec((-8i64..=8, 1i64..=6), n)
        .prop_map(|v| v.into_iter().map(|(n, d)| Rat::new(n, d)).collect())
}

proptest! {
    #[test]
    fn closed_form_matches_direct(ps in parts()) {
        prop_assert_eq!(k_pairing(&ps).unwrap(), k_pairing_direct(&ps).unwrap());
    }

    /// `r Delta - sum r_i Delta_i` from additivity of `ch_2`.
    #[test]
    fn defect_from_characters((ps, ds) in parts().prop_flat_map(|ps| { let n = ps.len(); (Just(ps), deltas(n)) })) {
        let chs: Vec<ChernF1> = ps
            .iter()
            .zip(&ds)
            .map(|(q, &d)| ChernF1::new(q.r, q.r as i64 * q.a, q.b, d).unwrap())
            .collect();
        let r: i64 = ps.iter().map(|q| q.r as i64).sum();
        let (e, f) = chs.iter().fold((0, 0), |(e, f), c| (e + c.alpha, f + c.beta));
        let ch2: Rat = chs.iter().map(|c| c.ch2()).sum();
        let c = DivisorF1::new(e, f);
        let delta = (Rat::new(c.square(), 2 * r) - ch2) / Rat::from_integer(r);
        let sum: Rat = chs.iter().map(|c| Rat::from_integer(c.r as i64) * c.delta).sum();
        prop_assert_eq!(yoshioka_defect(&ps).unwrap(), Rat::from_integer(r) * delta - sum);
    }

    /// Antisymmetrized Euler pairings reproduce the `K`-pairing.
    #[test]
    fn k_pairing_from_euler_form((ps, ds) in parts().prop_flat_map(|ps| { let n = ps.len(); (Just(ps), deltas(n)) })) {
        let chs: Vec<ChernF1> = ps
            .iter()
            .zip(&ds)
            .map(|(q, &d)| ChernF1::new(q.r, q.r as i64 * q.a, q.b, d).unwrap())
            .collect();
        let mut k = Rat::from_integer(0);
        for i in 0..chs.len() {
            for j in i + 1..chs.len() {
                k += chs[j].euler_pairing(&chs[i]) - chs[i].euler_pairing(&chs[j]);
            }
        }
        prop_assert_eq!(k, Rat::from_integer(k_pairing(&ps).unwrap()));
        let r: i64 = ps.iter().map(|q| q.r as i64).sum();
        let sq: i64 = ps.iter().map(|q| (q.r as i64).pow(2)).sum();
        prop_assert_eq!(prefactor_l(&ps).unwrap(), (Rat::from_integer(r * r - sq) - k) / 2);
    }

    #[test]
    fn defect_is_twist_invariant(ps in parts(), t in -3i64..=3, u in -3i64..=3) {
        let moved: Vec<DecompPart> = ps.iter().map(|q| p(q.r, q.a + t, q.b + q.r as i64 * u)).collect();
        prop_assert_eq!(yoshioka_defect(&ps).unwrap(), yoshioka_defect(&moved).unwrap());
    }

    /// `-(r_2 c_1 - r_1 c_2)^2 / (2 r_1 r_2 r)` for two parts.
    #[test]
    fn two_part_defect(r1 in 1u32..=4, r2 in 1u32..=4, a1 in -4i64..=4, a2 in -4i64..=4, b1 in -5i64..=5, b2 in -5i64..=5) {
        let (x, y) = (p(r1, a1, b1), p(r2, a2, b2));
        let (c1, c2) = (x.c1(), y.c1());
        let (r1, r2) = (r1 as i64, r2 as i64);
        let d = DivisorF1::new(r2 * c1.e - r1 * c2.e, r2 * c1.f - r1 * c2.f);
        let want = Rat::new(-d.square(), 2 * r1 * r2 * (r1 + r2));
        prop_assert_eq!(yoshioka_defect(&[x, y]).unwrap(), want);
    }
}
