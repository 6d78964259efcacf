//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are expected to fail for a documented
//! reason; the target fails if any other criterion fails, or if a known
//! failure starts passing.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nullcone::analyzer::{
    check_certificate, certify_all_good, is_good, membership_in_ztilde, rational_singularities_verdict,
    CertifyOptions, CertifyOutcome, Evidence, Membership, Verdict, VerdictOptions,
};
use nullcone::bfunction::{bracket_identity_at, compute_bfunction, BFunctionFamily, BracketTerm};
use nullcone::generic::{class_ext, class_hom, evaluate_semiinvariant, generic_decomposition, perp_simples, RepClass};
use nullcone::linalg::{rat, Rat};
use nullcone::orbit::{for_each_class, reducedness_report, Reducedness, ZeroSetSpec};
use nullcone::quiver::presets;
use nullcone::roots::{hom_matrix_dvw, RootSystem};
use nullcone::{DimVector, Quiver, QuiverType};
use nullcone_cli::{cmd_bfunction, cmd_nullcone, Preset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 1: one printed component, the sixth, does not sum to α; its summand
///    (0,0,1,0,0,0,0;0) must be (0,1,1,1,1,0,0;0) for the sum to work.
/// 3: (9,−7) is not a point of Z(B̃) for the printed two-variable E8 family,
///    since the generator with c = (4,−3) does not vanish there.
const KNOWN_FAILURES: &[u32] = &[1, 3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(t: Duration, limit: Duration) -> String {
    format!("{:.2}s of {}s", t.as_secs_f64(), limit.as_secs())
}

fn t(g: &[u32], a: i64, b: i64) -> BracketTerm {
    BracketTerm::new(g.to_vec(), a, b)
}

/// Printed as a bottom row of seven and the branch vertex on top.
fn e8(bottom: [i64; 7], top: i64) -> Vec<i64> {
    let mut v = bottom.to_vec();
    v.push(top);
    v
}

fn printed_components() -> Vec<RepClass> {
    let p = |items: &[([i64; 7], i64)]| {
        RepClass::new(items.iter().map(|&(b, t)| (e8(b, t), 1)).collect())
    };
    vec![
        p(&[([0, 0, 1, 0, 0, 0, 0], 0), ([2, 4, 6, 4, 3, 2, 1], 3)]),
        p(&[
            ([0, 0, 1, 1, 0, 0, 0], 1),
            ([0, 0, 1, 1, 1, 0, 0], 0),
            ([0, 1, 1, 0, 0, 0, 0], 1),
            ([1, 1, 1, 0, 0, 0, 0], 0),
            ([1, 2, 3, 2, 2, 2, 1], 1),
        ]),
        p(&[([1, 1, 1, 0, 0, 0, 0], 0), ([0, 0, 1, 1, 1, 1, 1], 0), ([0, 1, 2, 1, 0, 0, 0], 1), ([1, 2, 3, 2, 2, 1, 0], 2)]),
        p(&[
            ([0, 0, 1, 1, 0, 0, 0], 1),
            ([0, 0, 1, 1, 1, 1, 1], 0),
            ([0, 1, 1, 0, 0, 0, 0], 0),
            ([1, 1, 2, 1, 1, 1, 0], 1),
            ([1, 2, 2, 1, 1, 0, 0], 1),
        ]),
        p(&[
            ([0, 0, 1, 0, 0, 0, 0], 1),
            ([0, 0, 1, 1, 1, 1, 1], 0),
            ([0, 1, 1, 1, 1, 0, 0], 0),
            ([1, 1, 1, 0, 0, 0, 0], 0),
            ([1, 2, 3, 2, 1, 1, 0], 2),
        ]),
        p(&[
            ([0, 0, 1, 1, 0, 0, 0], 1),
            ([0, 0, 1, 0, 0, 0, 0], 0),
            ([0, 0, 1, 1, 1, 1, 0], 0),
            ([0, 1, 1, 0, 0, 0, 0], 1),
            ([1, 1, 1, 0, 0, 0, 0], 0),
            ([1, 1, 2, 1, 1, 1, 1], 1),
        ]),
        p(&[
            ([0, 0, 1, 1, 0, 0, 0], 1),
            ([0, 0, 1, 1, 1, 1, 1], 0),
            ([0, 1, 1, 1, 1, 0, 0], 0),
            ([0, 1, 2, 1, 1, 1, 0], 1),
            ([1, 1, 1, 0, 0, 0, 0], 0),
            ([1, 1, 1, 0, 0, 0, 0], 1),
        ]),
        p(&[([1, 1, 1, 0, 0, 0, 0], 0), ([0, 0, 1, 1, 0, 0, 0], 0), ([1, 2, 4, 3, 3, 2, 1], 2), ([0, 1, 1, 0, 0, 0, 0], 1)]),
        p(&[
            ([0, 0, 1, 1, 0, 0, 0], 1),
            ([0, 0, 1, 1, 1, 1, 1], 0),
            ([0, 1, 2, 1, 1, 0, 0], 1),
            ([1, 1, 1, 0, 0, 0, 0], 0),
            ([1, 2, 2, 1, 1, 1, 0], 1),
        ]),
    ]
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let rep = match cmd_nullcone(&Preset::E8All.request(1, 1)) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let got: BTreeSet<RepClass> = rep.components.iter().map(|c| RepClass::new(c.parts.clone())).collect();
    let want: BTreeSet<RepClass> = printed_components().into_iter().collect();
    let n1 = &printed_components()[0];
    let second_simple = e8([0, 1, 2, 1, 1, 1, 0], 1);
    let witness_ok = rep.witness.as_ref().is_some_and(|w| {
        RepClass::new(w.component.clone()) == *n1 && w.hom == 2 && w.simple_dims == second_simple
    });
    let alpha = Preset::E8All.request(1, 1).alpha.unwrap();
    let unmatched: Vec<String> = want
        .difference(&got)
        .map(|c| {
            let mut sum = vec![0; alpha.len()];
            for (v, m) in &c.parts {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x * *m as i64;
                }
            }
            format!("{c:?} sums to {sum:?}{}", if sum == alpha { "" } else { ", not α" })
        })
        .collect();
    let time = start.elapsed();
    let pass = rep.components.len() == 9
        && got == want
        && rep.components.iter().all(|c| c.codim == 5)
        && rep.ci
        && rep.verdict == "not-reduced"
        && witness_ok
        && time <= Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "{} components, {} of 9 printed matched, unmatched printed {unmatched:?}, codims {:?}, ci {}, verdict {}, witness is the first component with hom 2: {}; {}",
            rep.components.len(),
            want.intersection(&got).count(),
            rep.components.iter().map(|c| c.codim).collect::<BTreeSet<_>>(),
            rep.ci,
            rep.verdict,
            witness_ok,
            within(time, Duration::from_secs(600))
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let (n, m) = (2, 2);
    let rep = match cmd_bfunction(&Preset::E6Scaled.request(n, m)) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    // printed variable k is lexicographic simple [2,0,1,3][k]
    let got = rep.family.permuted(&[2, 0, 1, 3]);
    let want = BFunctionFamily::new(
        4,
        vec![
            t(&[1, 0, 0, 0], 0, n + m),
            t(&[0, 1, 0, 0], 0, n + m),
            t(&[0, 0, 1, 0], 0, n),
            t(&[0, 0, 0, 1], 0, n),
            t(&[0, 0, 1, 1], n, 2 * n + m),
            t(&[0, 1, 1, 0], n + m, 2 * n + m),
            t(&[1, 0, 0, 1], n + m, 2 * n + m),
        ],
    );
    let time = start.elapsed();
    let same = got.same_polynomial(&want);
    outcome(same && time <= Duration::from_secs(10), format!("family {got}: match {same}; {}", within(time, Duration::from_secs(10))))
}

fn pos_family() -> BFunctionFamily {
    BFunctionFamily::new(
        2,
        vec![t(&[0, 1], 0, 4), t(&[0, 1], 1, 3).with_mult(2), t(&[0, 1], 2, 4), t(&[1, 0], 0, 1), t(&[1, 1], 1, 4), t(&[1, 2], 4, 7)],
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let req = Preset::E8Pair.request(1, 1);
    let rep = match rational_singularities_verdict(&req.quiver, req.alpha.as_ref().unwrap(), req.simples.clone(), VerdictOptions::default()) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let family_ok = rep.family.same_polynomial(&pos_family());
    let z = vec![rat(9), rat(-7)];
    let membership = membership_in_ztilde(&rep.family, &z, 0);
    let member = matches!(membership, Ok(Membership::Member(_)));
    let good = is_good(&z);
    let (not_certified, witness) = match &rep.verdict {
        Verdict::NotCertified { witness, .. } => (true, witness.as_ref().map(|w| w.z.iter().map(Rat::to_string).collect::<Vec<_>>())),
        _ => (false, None),
    };
    let time = start.elapsed();
    outcome(
        family_ok && member && !good && not_certified && time <= Duration::from_secs(10),
        format!(
            "family match {family_ok}; membership of (9,-7): {membership:?}; is_good {good}; NotCertified {not_certified} with witness {witness:?}; {}",
            within(time, Duration::from_secs(10))
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let req = Preset::E6Scaled.request(2, 2);
    let alpha = req.alpha.clone().unwrap();
    let rep = match rational_singularities_verdict(&req.quiver, &alpha, None, VerdictOptions::default()) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let direct = certify_all_good(&rep.family, CertifyOptions::default());
    let (certified, checked, size) = match &direct {
        CertifyOutcome::Certified(c) => (true, check_certificate(c), c.root.size()),
        other => (false, Err(format!("{other:?}")), 0),
    };
    let verdict_ok = matches!(&rep.verdict, Verdict::RationalSingularities(Evidence::Certificate(c)) if check_certificate(c).is_ok());
    let time = start.elapsed();
    outcome(
        certified && checked.is_ok() && verdict_ok && time <= Duration::from_secs(60),
        format!(
            "certificate {certified} ({size} nodes), checker {checked:?}, verdict RationalSingularities {verdict_ok}; {}",
            within(time, Duration::from_secs(60))
        ),
    )
}

/// Nonzero vectors of length `n` with entry sum at most `total`.
fn vectors(n: usize, total: i64) -> Vec<DimVector> {
    fn rec(n: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<DimVector>) {
        if cur.len() == n {
            if cur.iter().any(|&x| x > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(n, left - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, total, &mut Vec::new(), &mut out);
    out
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut vacuous = 0;
    let mut bad = Vec::new();
    for (q, bound) in [(presets::a(3), 1u32), (presets::d(4), 2)] {
        let rs = RootSystem::cached(&q).unwrap();
        for alpha in vectors(q.vertex_count(), 24) {
            let t = generic_decomposition(&rs, &alpha).unwrap();
            if t.parts.iter().any(|&(_, m)| m < bound) {
                continue;
            }
            if perp_simples(&rs, &t).unwrap().r == 0 {
                vacuous += 1;
                continue;
            }
            let spec = ZeroSetSpec::new(&q, &alpha, None).unwrap();
            checked += 1;
            if reducedness_report(&spec) != Reducedness::Reduced {
                bad.push(alpha);
            }
        }
    }
    let time = start.elapsed();
    outcome(
        bad.is_empty() && time <= Duration::from_secs(300),
        format!("{checked} zero sets reduced, {vacuous} without semi-invariants, failures {bad:?}; {}", within(time, Duration::from_secs(300))),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut instances = 0;
    let mut bad = Vec::new();
    for q in [presets::a(3), presets::a(4), presets::d(4)] {
        let type_a = q.require_dynkin().unwrap().0 == QuiverType::A;
        let rs = RootSystem::cached(&q).unwrap();
        for alpha in vectors(q.vertex_count(), 20) {
            let t = generic_decomposition(&rs, &alpha).unwrap();
            let perp = perp_simples(&rs, &t).unwrap();
            for s in &perp.simples {
                let family = compute_bfunction(&q, &alpha, std::slice::from_ref(s)).unwrap();
                // a constant semi-invariant cuts out nothing
                if family.terms.is_empty() {
                    continue;
                }
                instances += 1;
                let roots = family.univariate_roots().unwrap();
                let top_ok = roots.first().is_some_and(|(z, k)| *z == rat(-1) && *k == 1);
                let integral = !type_a || roots.iter().all(|(z, _)| z.is_integer());
                let negative = roots.iter().all(|(z, _)| *z < rat(0) && (z * rat(2)).is_integer());
                if !(top_ok && integral && negative) {
                    bad.push((alpha.clone(), s.clone()));
                }
            }
        }
    }
    let time = start.elapsed();
    outcome(
        instances > 0 && bad.is_empty() && time <= Duration::from_secs(300),
        format!("{instances} hypersurfaces, failures {bad:?}; {}", within(time, Duration::from_secs(300))),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut notes = Vec::new();

    // (i) hom − ext = Euler form, with ext as the cokernel of d^V_W
    let quivers = [presets::a(2), presets::a(3), presets::a(4), presets::d(4), presets::d(5), presets::e6(), presets::e7(), presets::e8()];
    let mut pairs = 0;
    let mut euler_ok = true;
    for q in &quivers {
        let rs = RootSystem::cached(q).unwrap();
        for i in 0..rs.reps.len() {
            for j in 0..rs.reps.len() {
                let d = hom_matrix_dvw(&rs.reps[i], &rs.reps[j]).unwrap();
                let coker = d.rows - d.rank();
                let (a, b) = (&rs.roots()[i], &rs.roots()[j]);
                euler_ok &= rs.hom(i, j) as i64 - coker as i64 == q.euler(a, b) && rs.ext(i, j) as usize == coker;
                pairs += 1;
            }
        }
    }
    notes.push(format!("(i) {pairs} pairs {euler_ok}"));

    // (ii) the generic class is the unique class without self-extensions
    let mut decomp_ok = true;
    let mut decomps = 0;
    for q in [presets::a(3), presets::d(4)] {
        let rs = RootSystem::cached(&q).unwrap();
        for alpha in vectors(q.vertex_count(), 16) {
            let mut rigid = Vec::new();
            for_each_class(&rs, &alpha, |p| {
                if class_ext(&rs, p, p) == 0 {
                    rigid.push(RepClass::from_indexed(&rs, p));
                }
            });
            decomp_ok &= rigid.len() == 1 && rigid[0] == generic_decomposition(&rs, &alpha).unwrap();
            decomps += 1;
        }
    }
    notes.push(format!("(ii) {decomps} vectors {decomp_ok}"));

    // (iii) c_S(V) = 0 iff hom(V, S) > 0
    let mut semi_ok = true;
    let mut semis = 0;
    for (q, alpha) in [(presets::a(3), vec![2, 3, 2]), (presets::d(4), vec![2, 2, 2, 4]), (presets::e6(), vec![1, 3, 3, 3, 1, 2])] {
        let rs = RootSystem::cached(&q).unwrap();
        let t = generic_decomposition(&rs, &alpha).unwrap();
        let perp = perp_simples(&rs, &t).unwrap();
        let mut classes = Vec::new();
        for_each_class(&rs, &alpha, |p| classes.push(p.to_vec()));
        for _ in 0..100 {
            let parts = &classes[rng.gen_range(0..classes.len())];
            let s = &perp.simples[rng.gen_range(0..perp.simples.len())];
            let si = rs.index_of(s).unwrap();
            let v = RepClass::from_indexed(&rs, parts).representation(&rs).unwrap().random_base_change(&mut rng);
            let value = evaluate_semiinvariant(&v, &rs.reps[si]).unwrap();
            semi_ok &= (value == rat(0)) == (class_hom(&rs, parts, &[(si, 1)]) > 0);
            semis += 1;
        }
    }
    notes.push(format!("(iii) {semis} representations {semi_ok}"));

    // (iv) [s]^d_{a,b}·[s]^d_a = [s]^d_b
    let mut bracket_ok = true;
    for _ in 0..50 {
        let r = rng.gen_range(1..=3);
        let d: Vec<u32> = loop {
            let d: Vec<u32> = (0..r).map(|_| rng.gen_range(0..=3)).collect();
            if d.iter().any(|&x| x > 0) {
                break d;
            }
        };
        let a = rng.gen_range(0..6);
        let b = a + rng.gen_range(0..6);
        let m: Vec<u64> = (0..r).map(|_| rng.gen_range(0..=3)).collect();
        bracket_ok &= bracket_identity_at(&d, a, b, &m);
    }
    notes.push(format!("(iv) 50 identities {bracket_ok}"));
    outcome(euler_ok && decomp_ok && semi_ok && bracket_ok, notes.join(", "))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let q: Quiver = presets::a(2);
    let family = compute_bfunction(&q, &[1, 1], &[vec![0, 1]]).unwrap();
    let rendered = family.render_univariate();
    let zero_set: Vec<(i64, bool)> = (-4..=3)
        .map(|v| (v, matches!(membership_in_ztilde(&family, &[rat(v)], 0), Ok(Membership::Member(_)))))
        .collect();
    let only_minus_one = zero_set.iter().all(|&(v, m)| m == (v == -1));
    let half = matches!(membership_in_ztilde(&family, &[Rat::new(1.into(), 2.into())], 0), Ok(Membership::NonMember { .. }));
    let verdict = rational_singularities_verdict(&q, &[1, 1], None, VerdictOptions::default()).map(|r| r.verdict);
    let rational = matches!(verdict, Ok(Verdict::RationalSingularities(_)));
    let time = start.elapsed();
    outcome(
        rendered.as_deref() == Some("s+1") && only_minus_one && half && rational && time < Duration::from_secs(1),
        format!("b = {rendered:?}, Z(B̃) ∩ [-4,3] = {{-1}}: {only_minus_one}, verdict rational {rational}; {:.3}s", time.as_secs_f64()),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "E8 nullcone with nine non-reduced components", criterion_1),
        (2, "E6 four-variable b-function family", criterion_2),
        (3, "E8 two-simple family, (9,-7) and verdict", criterion_3),
        (4, "E6 certification at n=m=2", criterion_4),
        (5, "reducedness above the multiplicity bound on A3 and D4", criterion_5),
        (6, "codimension-one b-functions on A3, A4, D4", criterion_6),
        (7, "oracle equivalences", criterion_7),
        (8, "A2 end to end", criterion_8),
    ];
    let mut unexpected = false;
    for (k, name, run) in criteria {
        let o = run();
        println!("{} criterion {k}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        let known = KNOWN_FAILURES.contains(&k);
        if o.pass == known {
            unexpected = true;
            if known {
                println!("  criterion {k} was expected to fail and now passes");
            }
        }
    }
    if unexpected {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
