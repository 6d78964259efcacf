//! Bracket families: specialization, generators, serialization, sink orders.

use nullcone::analyzer::generator_bc;
use nullcone::bfunction::{compute_bfunction, compute_bfunction_with_order, BFunctionFamily, BracketTerm};
use nullcone::generic::{generic_decomposition, perp_simples};
use nullcone::linalg::{rat, ratio, Rat};
use nullcone::quiver::presets;
use nullcone::roots::RootSystem;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn term(r: usize) -> impl Strategy<Value = BracketTerm> {
    (prop::collection::vec(0u32..3, r), 0i64..4, 0i64..4, 1u32..3)
        .prop_filter("γ ≠ 0", |(g, ..)| g.iter().any(|&x| x > 0))
        .prop_map(|(g, a, len, k)| BracketTerm::new(g, a, a + len).with_mult(k))
}

fn family() -> impl Strategy<Value = BFunctionFamily> {
    (1usize..4).prop_flat_map(|r| prop::collection::vec(term(r), 1..5).prop_map(move |ts| BFunctionFamily::new(r, ts)))
}

fn point(r: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec((-9i64..9, 1i64..4), r).prop_map(|v| v.into_iter().map(|(n, d)| ratio(n, d)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn specialize_commutes_with_evaluate(
        f in family().prop_filter("two variables at least", |f| f.r >= 2),
        v in -4i64..4,
        m in prop::collection::vec(1u64..3, 3),
        z in point(3),
    ) {
        let i = 0;
        let g = f.specialize(i, v);
        let mut full = vec![rat(v)];
        full.extend_from_slice(&z[..f.r - 1]);
        let mut mm = m[..f.r].to_vec();
        mm[i] = 0;
        // with m_i = 0 the dropped variable contributes no forms of its own
        let lhs = f.evaluate(&mm, &full);
        let rest: Vec<u64> = mm[1..].to_vec();
        let scal = g.scalars.iter().flat_map(|t| t.forms(&[0])).fold(Rat::from_integer(1.into()), |a, x| a * x.eval(&[rat(0)]));
        prop_assert_eq!(lhs, g.evaluate(&rest, &z[..f.r - 1]) * scal);
    }

    #[test]
    fn generator_matches_independent_product(f in family(), cz in prop::collection::vec(-2i64..3, 3), z in point(3)) {
        let r = f.r;
        let mut c = cz[..r].to_vec();
        let fix: i64 = 1 - c[..r - 1].iter().sum::<i64>();
        c[r - 1] = fix;
        let g = generator_bc(&f, &c).unwrap();
        let plus: Vec<u64> = c.iter().map(|&x| x.max(0) as u64).collect();
        let shifted: Vec<Rat> = z[..r].iter().zip(&c).map(|(x, &ci)| x + rat(ci.min(0))).collect();
        let mut want = f.evaluate(&plus, &shifted);
        for (i, &ci) in c.iter().enumerate() {
            for j in 0..(-ci).max(0) {
                want *= (&z[i] - rat(j)) / rat(j + 1);
            }
        }
        let value = g.evaluate(&z[..r]);
        prop_assert_eq!(&value, &want);
        prop_assert_eq!(g.vanishes_at(&z[..r]), value == rat(0));
    }

    #[test]
    fn family_json_round_trip(f in family()) {
        let s = serde_json::to_string(&f).unwrap();
        let back: BFunctionFamily = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn permutation_preserves_layers(f in family()) {
        let perm: Vec<usize> = (0..f.r).rev().collect();
        prop_assert!(f.permuted(&perm).permuted(&perm).same_polynomial(&f));
    }
}

#[test]
fn sink_order_does_not_change_the_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (q, alpha) in [
        (presets::a(3), vec![2, 3, 2]),
        (presets::d(4), vec![2, 2, 2, 4]),
        (presets::e6(), vec![1, 4, 4, 4, 1, 3]),
        (presets::e8(), vec![2, 4, 7, 4, 3, 2, 1, 3]),
    ] {
        let rs = RootSystem::cached(&q).unwrap();
        let perp = perp_simples(&rs, &generic_decomposition(&rs, &alpha).unwrap()).unwrap();
        let base = compute_bfunction(&q, &alpha, &perp.simples).unwrap();
        for _ in 0..4 {
            let other = compute_bfunction_with_order(&q, &alpha, &perp.simples, |sinks| {
                let mut s = sinks.to_vec();
                s.shuffle(&mut rng);
                s
            })
            .unwrap();
            assert!(other.same_polynomial(&base), "{other} vs {base}");
        }
    }
}
