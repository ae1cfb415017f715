use moduli_betti::blowup::{
    assemble_g, assemble_g_with_lift, f_inverse, f_normalized, f_roundtrip, is_one, lambda_d,
    leading_q, rho_counts, LambdaTable,
};
use moduli_betti::rank1::{rank_one_g, Surface};
use moduli_betti::series::{LaurentPoly, QLSeries, Rat, TruncationConfig};

fn int(n: i64) -> Rat {
    Rat::from_integer(n)
}

#[test]
fn lambda_examples() {
    assert_eq!(
        lambda_d(2, 1, 1).unwrap(),
        LaurentPoly::from_terms([(0, 1), (-1, 1)])
    );
    assert_eq!(lambda_d(3, 0, 0).unwrap(), LaurentPoly::one());
    let t = LambdaTable::build(4, 3, 8).unwrap();
    assert_eq!(t.first_nonzero(), Some(6));
    assert_eq!(rho_counts(4, 2, 5), 2);
}

/// Inverse built term by term: `prod (1 - L^-rk q^k)^r`, the monomial
/// `(L^-r q)^{-m(r-m)/2r} L^{-(r-1)m/2}`, `Lambda_{d0}^-1`, and the composition
/// sum `1 + sum_d sum_{d_1+...+d_l=d} (-1)^l prod Lambda~_{d_i} (L^-r q)^d`.
fn closed_form_inverse(r: u32, m: u32, cfg: &TruncationConfig) -> QLSeries {
    let (ri, mi) = (r as i64, m as i64);
    let depth = cfg.window as i64 + 4 * ri * ri;
    let floor = -depth;
    let d0 = (mi * mi + mi) / 2;
    let l0_inv = lambda_d(r, m, d0).unwrap().inverse(floor).unwrap();
    let dmax = (cfg.q_max + leading_q(r, m)).floor().to_integer();
    let tilde: Vec<LaurentPoly> = (0..=dmax)
        .map(|k| l0_inv.mul_truncated(&lambda_d(r, m, d0 + k).unwrap(), floor))
        .collect();
    // c_d = sum over compositions of d; equivalently c_d = -sum_k tilde_k c_{d-k}.
    let mut c = vec![LaurentPoly::one()];
    for d in 1..=dmax as usize {
        let mut acc = LaurentPoly::zero();
        for k in 1..=d {
            let term = tilde[k].mul_truncated(&c[d - k], floor);
            for (e, v) in term.terms() {
                acc.add_term(e, &-v.clone());
            }
        }
        c.push(acc);
    }
    let wide = TruncationConfig::new(depth as u32, cfg.q_max + leading_q(r, m), cfg.denom).unwrap();
    let mut sum = QLSeries::zero(&wide);
    for (d, cd) in c.into_iter().enumerate() {
        let d = d as i64;
        sum.add_term(int(d), cd.mul_truncated(&l0_inv, floor).shift(-ri * d));
    }
    let y0 = leading_q(r, m);
    let l_exp = int(ri) * y0 - Rat::new((ri - 1) * mi, 2);
    assert!(l_exp.is_integer());
    let mut s = sum
        .mul_monomial(l_exp.to_integer(), -y0, depth as u32)
        .unwrap();
    for k in 1..=cfg.q_max.floor().to_integer() {
        for _ in 0..r {
            s = s.mul_one_minus(-ri * k, int(k));
        }
    }
    s.retruncate(cfg.window, cfg.q_max).unwrap()
}

#[test]
fn closed_form_inverse_agrees() {
    for (r, m) in [(2, 1), (3, 2), (3, 1), (4, 1), (4, 3)] {
        let cfg = TruncationConfig::new(6, int(5), 2 * r as i64).unwrap();
        let generic = f_inverse(r, m, &cfg).unwrap();
        assert_eq!(generic, closed_form_inverse(r, m, &cfg), "r={r} m={m}");
        assert_eq!(generic.lowest_q(), Some(-leading_q(r, m)));
    }
}

#[test]
fn rank_one_factor_is_eta_product() {
    let cfg = TruncationConfig::integral(6, 5);
    let f = f_normalized(1, 0, &cfg).unwrap();
    let mut want = QLSeries::one(&cfg);
    for k in 1..=5 {
        want = want.div_one_minus(-k, int(k), 1).unwrap();
    }
    assert_eq!(f, want);
}

#[test]
fn roundtrip_is_one() {
    for r in 1..=4 {
        for m in 0..r {
            let cfg = TruncationConfig::new(8, int(6), 2 * r as i64).unwrap();
            assert!(is_one(&f_roundtrip(r, m, &cfg).unwrap()), "r={r} m={m}");
        }
    }
    assert!(f_normalized(3, 3, &TruncationConfig::integral(2, 2)).is_err());
}

#[test]
fn lift_independence() {
    for (r, a) in [(2u32, -1i64), (3, -1), (3, 1), (4, 1), (5, 2)] {
        let cfg = TruncationConfig::new(5, int(4), 2 * r as i64).unwrap();
        let g = assemble_g(r, a, &cfg).unwrap();
        for m in -(r as i64)..2 * r as i64 {
            assert_eq!(
                g,
                assemble_g_with_lift(r, a, m, &cfg).unwrap(),
                "r={r} a={a} m={m}"
            );
        }
    }
}

#[test]
fn rank_one_through_blow_up() {
    let cfg = TruncationConfig::integral(6, 6);
    assert_eq!(
        assemble_g(1, 0, &cfg).unwrap(),
        rank_one_g(Surface::P2, &cfg).unwrap()
    );
    assert_eq!(
        assemble_g(1, 5, &cfg).unwrap(),
        rank_one_g(Surface::P2, &cfg).unwrap()
    );
}
