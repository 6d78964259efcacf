//! Hom tables, codimensions and the generic decomposition.

use nullcone::generic::{class_ext, class_hom, generic_decomposition, RepClass};
use nullcone::orbit::for_each_class;
use nullcone::quiver::presets;
use nullcone::roots::{ext_dim, hom_dim, RootSystem};
use nullcone::Quiver;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dynkin() -> Vec<Quiver> {
    vec![presets::a(3), presets::a(4), presets::d(4), presets::d(5), presets::e6(), presets::e7(), presets::e8()]
}

#[test]
fn hom_order_is_antisymmetric() {
    for q in dynkin() {
        let rs = RootSystem::cached(&q).unwrap();
        let m = rs.roots().len();
        for i in 0..m {
            assert_eq!(rs.hom(i, i), 1);
            assert_eq!(rs.ext(i, i), 0);
            for j in 0..i {
                assert!(rs.hom(i, j) == 0 || rs.hom(j, i) == 0, "{:?} {:?}", rs.roots()[i], rs.roots()[j]);
            }
        }
    }
}

#[test]
fn hom_and_ext_never_both_nonzero() {
    for q in dynkin() {
        let rs = RootSystem::cached(&q).unwrap();
        let m = rs.roots().len();
        for i in 0..m {
            for j in 0..m {
                assert_eq!(rs.hom(i, j) * rs.ext(i, j), 0);
            }
        }
    }
}

fn random_sink_order(q: &Quiver, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut cur = q.clone();
    let mut order = Vec::new();
    while order.len() < q.vertex_count() {
        let sinks: Vec<usize> = cur.sinks().into_iter().filter(|s| !order.contains(s)).collect();
        let x = *sinks.choose(rng).unwrap();
        order.push(x);
        cur = cur.reflect_at(x);
    }
    order
}

#[test]
fn tables_do_not_depend_on_realization_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for q in [presets::a(3), presets::d(4), presets::e6()] {
        let base = RootSystem::new(&q).unwrap();
        for _ in 0..3 {
            let other = RootSystem::with_order(&q, &random_sink_order(&q, &mut rng)).unwrap();
            assert_eq!(other.table.hom, base.table.hom);
            assert_eq!(other.table.ext, base.table.ext);
        }
    }
}

#[test]
fn direct_hom_and_ext_match_the_table() {
    let q = presets::d(5);
    let rs = RootSystem::cached(&q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..rs.reps.len() {
        for j in 0..rs.reps.len() {
            let v = rs.reps[i].random_base_change(&mut rng);
            assert_eq!(hom_dim(&v, &rs.reps[j]).unwrap() as u32, rs.hom(i, j));
            assert_eq!(ext_dim(&v, &rs.reps[j]).unwrap() as u32, rs.ext(i, j));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// ext(X,X) equals dim Rep(α) − dim GL(α) + dim End(X).
    #[test]
    fn codimension_two_ways(alpha in prop::collection::vec(0i64..4, 4).prop_filter("nonzero", |a| a.iter().any(|&x| x > 0)), pick in 0usize..1000) {
        let q = presets::d(4);
        let rs = RootSystem::cached(&q).unwrap();
        let mut classes = Vec::new();
        for_each_class(&rs, &alpha, |p| classes.push(p.to_vec()));
        let p = &classes[pick % classes.len()];
        let codim = class_hom(&rs, p, p) as i64 - q.euler(&alpha, &alpha);
        prop_assert_eq!(class_ext(&rs, p, p) as i64, codim);
    }

    #[test]
    fn generic_class_is_the_rigid_one(alpha in prop::collection::vec(0i64..5, 3).prop_filter("nonzero", |a| a.iter().any(|&x| x > 0))) {
        let rs = RootSystem::cached(&presets::a(3)).unwrap();
        let t = generic_decomposition(&rs, &alpha).unwrap();
        let idx = t.indexed(&rs).unwrap();
        prop_assert_eq!(class_ext(&rs, &idx, &idx), 0);
        prop_assert_eq!(t.total(3), alpha.clone());
        let mut rigid = 0;
        for_each_class(&rs, &alpha, |p| if class_ext(&rs, p, p) == 0 { rigid += 1 });
        prop_assert_eq!(rigid, 1);
        let json = serde_json::to_string(&t).unwrap();
        prop_assert_eq!(serde_json::from_str::<RepClass>(&json).unwrap(), t);
    }
}
