//! LP certificates and the case-analysis certificates built on them.

use nullcone::analyzer::{
    check_certificate, certify_all_good, is_good, membership_in_ztilde, Certificate, CertifyOptions, CertifyOutcome,
    Membership,
};
use nullcone::bfunction::{BFunctionFamily, BracketTerm};
use nullcone::bfunction::compute_bfunction;
use nullcone::generic::{generic_decomposition, perp_simples};
use nullcone::linalg::{rat, Rat};
use nullcone::lp::{Constraint, Outcome, Rel, System};
use nullcone::quiver::presets;
use nullcone::roots::RootSystem;
use proptest::prelude::*;

fn constraint(n: usize) -> impl Strategy<Value = Constraint> {
    (prop::collection::vec(-3i64..4, n), 0usize..4, -5i64..6).prop_map(|(c, rel, b)| {
        let coeffs: Vec<Rat> = c.into_iter().map(rat).collect();
        let rel = [Rel::Le, Rel::Lt, Rel::Eq, Rel::Le][rel];
        Constraint::new(coeffs, rel, rat(b))
    })
}

fn system() -> impl Strategy<Value = System> {
    (1usize..4).prop_flat_map(|n| prop::collection::vec(constraint(n), 1..7).prop_map(move |rows| System::from_rows(n, rows)))
}

fn small_family() -> impl Strategy<Value = BFunctionFamily> {
    let term = (prop::collection::vec(0u32..3, 2), 0i64..3, 1i64..3)
        .prop_filter("γ ≠ 0", |(g, ..)| g.iter().any(|&x| x > 0))
        .prop_map(|(g, a, len)| BracketTerm::new(g, a, a + len));
    prop::collection::vec(term, 1..4).prop_map(|ts| {
        // unit brackets in both variables keep Z(B̃) bounded
        let mut all = vec![BracketTerm::new(vec![1, 0], 0, 1), BracketTerm::new(vec![0, 1], 0, 1)];
        all.extend(ts);
        BFunctionFamily::new(2, all)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn lp_answers_carry_valid_certificates(sys in system()) {
        match sys.solve() {
            Outcome::Feasible(x) => prop_assert!(sys.check_point(&x)),
            Outcome::Infeasible(f) => prop_assert!(sys.check_farkas(&f)),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn certify_outcomes_are_checkable(f in small_family()) {
        let opts = CertifyOptions { node_limit: 20_000, ..CertifyOptions::default() };
        match certify_all_good(&f, opts) {
            CertifyOutcome::Certified(c) => {
                prop_assert_eq!(check_certificate(&c), Ok(()));
                let back: Certificate = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
                prop_assert_eq!(check_certificate(&back), Ok(()));
            }
            CertifyOutcome::Refuted(r) => {
                prop_assert!(!is_good(&r.z));
                prop_assert!(matches!(membership_in_ztilde(&f, &r.z, 4).unwrap(), Membership::Member(_)));
            }
            CertifyOutcome::Inconclusive(_) => {}
        }
    }
}

fn e6_family() -> BFunctionFamily {
    let q = presets::e6();
    let alpha = [2, 6, 6, 6, 2, 4];
    let rs = RootSystem::cached(&q).unwrap();
    let perp = perp_simples(&rs, &generic_decomposition(&rs, &alpha).unwrap()).unwrap();
    compute_bfunction(&q, &alpha, &perp.simples).unwrap()
}

#[test]
fn a_certificate_for_another_family_is_rejected() {
    let f = e6_family();
    let out = certify_all_good(&f, CertifyOptions::default());
    let CertifyOutcome::Certified(mut c) = out else {
        panic!("expected a certificate, got {out:?}");
    };
    assert_eq!(check_certificate(&c), Ok(()));
    c.family.terms[0].b += 1;
    assert!(check_certificate(&c).is_err());
}
