use cartierkit::algebra::{big, FinAbPres, GroupHom, Invariants, Matrix};
use cartierkit::cartier::*;
use cartierkit::witt::{BaseRing, WittAdditive};
use cartierkit::Error;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn inv(torsion: &[i64], free: usize) -> Invariants {
    Invariants::canonical(torsion.iter().map(|&d| big(d)).collect(), free)
}

fn group_of(m: &CartierModule) -> FinAbPres {
    m.structure().unwrap().group
}

/// `Z/p^2 e1 + Z/p e2` with `V e1 = e2`, `F e2 = p e1`: a Cartier module with `VF != p`.
fn lopsided(p: u64) -> CartierModule {
    let pp = p as i64;
    CartierModule::finite(
        p,
        FinAbPres::from_diagonal(&[big(pp * pp), big(pp)], 0),
        Matrix::from_i64(&[vec![0, 1], vec![0, 0]], 2),
        Matrix::from_i64(&[vec![0, 0], vec![pp, 0]], 2),
    )
    .unwrap()
}

#[test]
fn axiom_checks() {
    for p in [2, 3, 5] {
        check_axioms(&CartierModule::alpha_p(p).unwrap(), false).unwrap();
        check_axioms(&CartierModule::witt_fp(p).unwrap(), true).unwrap();
        check_axioms(&CartierModule::unit(p, 4).unwrap(), false).unwrap();
        let bad = CartierModule::cyclic(p, 2, 1, 1).unwrap();
        match check_axioms(&bad, false) {
            Err(Error::AxiomViolation { relation, witness, .. }) => {
                assert_eq!(relation, "FV = p");
                assert_eq!(witness, "[1]");
            }
            other => panic!("expected a violation, got {other:?}"),
        }
    }
    check_axioms(&lopsided(3), false).unwrap();
    assert!(check_axioms(&lopsided(3), true).is_err());
}

#[test]
fn homotopy_tables() {
    for p in [2, 3, 5] {
        let t = homotopy_mod_v(&CartierModule::witt_fp(p).unwrap(), 10).unwrap();
        for (d, g) in t.entries.iter().enumerate() {
            let want = if d % 2 == 0 { inv(&[p as i64], 0) } else { Invariants::trivial() };
            assert_eq!(g.invariants(), want, "degree {d}");
        }
        let t = homotopy_mod_v(&CartierModule::cyclic(p, 1, 1, p as i64).unwrap(), 5).unwrap();
        let got: Vec<_> = t.entries.iter().map(|g| g.invariants().to_string()).collect();
        let zp = format!("Z/{p}");
        assert_eq!(got, vec!["0", "0", &zp, &zp, &zp, &zp]);
        let t = homotopy_mod_v(&CartierModule::k3(p, 6).unwrap(), 5).unwrap();
        assert_eq!(t.entries[0].invariants(), inv(&[p as i64], 0));
        assert!(t.entries[1].is_trivial());
        for d in 2..=5 {
            assert_eq!(t.entries[d].invariants(), inv(&[p as i64; 6], 0));
        }
        let t = homotopy_mod_v(&CartierModule::pruefer(p).unwrap(), 3).unwrap();
        let got: Vec<_> = t.entries.iter().map(|g| g.invariants().to_string()).collect();
        assert_eq!(got, vec!["0", &zp, "0", &zp]);
    }
    let unit = CartierModule::unit(2, 3).unwrap();
    assert_eq!(homotopy_mod_v(&unit, 1).unwrap().entries[0].invariants(), inv(&[], 1));
    assert!(matches!(homotopy_mod_v(&unit, 2), Err(Error::UnsupportedRepresentation(_))));
    let csv = homotopy_mod_v(&CartierModule::k3(2, 2).unwrap(), 3).unwrap().to_csv();
    assert_eq!(csv, "degree,invariant_factors\n0,Z/2\n1,0\n2,Z/2 + Z/2\n3,Z/2 + Z/2\n");
}

#[test]
fn alpha_tensor_alpha() {
    for p in [2, 3] {
        let a = CartierModule::alpha_p(p).unwrap();
        let t = tensor_trunc(&a, &a, 3).unwrap();
        assert_eq!(t.quotient.invariants(), inv(&[p as i64; 3], 0));
        let s = t.module.structure().unwrap();
        assert!(s.f.is_zero_map());
        let v2 = s.v.compose(&s.v);
        assert!(!v2.is_zero_map());
        assert!(v2.compose(&s.v).is_zero_map());
        check_axioms(&t.module, false).unwrap();
    }
    assert!(matches!(
        tensor_trunc(&CartierModule::alpha_p(2).unwrap(), &CartierModule::alpha_p(2).unwrap(), 0),
        Err(Error::TruncationTooSmall)
    ));
}

#[test]
fn truncation_is_level_by_level() {
    // (M ⊠ N)/V^(K+1) modulo V^K is (M ⊠ N)/V^K.
    let fpx = BaseRing::truncated(2, 1, &[("x", 2)]).unwrap();
    let mods = [
        CartierModule::witt_module(&fpx, Some(2)).unwrap(),
        lopsided(2),
        CartierModule::mu_p(2).unwrap(),
    ];
    for m in &mods {
        for n in &mods {
            for k in 1..=3 {
                let lo = tensor_trunc(m, n, k).unwrap();
                let hi = tensor_trunc(m, n, k + 1).unwrap();
                let vk = (1..k).fold(hi.v.clone(), |acc, _| acc.compose(&hi.v));
                let (q, _) = vk.cokernel();
                assert!(q.is_isomorphic(&lo.quotient), "{m} ⊠ {n} at {k}");
            }
        }
    }
}

#[test]
fn unit_law() {
    for p in [2, 3] {
        for e in finite_catalog(p).unwrap() {
            for k in 1..=4 {
                assert!(unit_law_check(&e.module, k).unwrap(), "{} at {k}", e.name);
            }
        }
        assert!(unit_law_check(&lopsided(p), 3).unwrap());
    }
}

#[test]
fn mod_v_layer() {
    for p in [2, 3] {
        let mu = CartierModule::mu_p(p).unwrap();
        let t = tensor_trunc(&mu, &mu, 3).unwrap();
        assert_eq!(t.v.cokernel().0.invariants(), inv(&[p as i64], 0));
        for e in finite_catalog(p).unwrap() {
            assert!(mod_v_compatibility(&e.module, &lopsided(p)).unwrap());
        }
    }
}

#[test]
fn symmetric_and_associative_on_dieudonne_inputs() {
    let p = 2;
    let fp = BaseRing::fp(p).unwrap();
    let mods = [
        CartierModule::alpha_p(p).unwrap(),
        CartierModule::mu_p(p).unwrap(),
        CartierModule::witt_module(&fp, Some(2)).unwrap(),
    ];
    let k = 2;
    for a in &mods {
        for b in &mods {
            let ab = tensor_trunc(a, b, k).unwrap();
            let ba = tensor_trunc(b, a, k).unwrap();
            assert!(ab.quotient.is_isomorphic(&ba.quotient));
            // VF = p on the inputs, so F descends and both quotients agree.
            assert!(ab.quotient.is_isomorphic(&group_of(&ab.module)));
            for c in &mods {
                let left = tensor_trunc(&ab.module, c, k).unwrap();
                let bc = tensor_trunc(b, c, k).unwrap();
                let right = tensor_trunc(a, &bc.module, k).unwrap();
                assert!(left.quotient.is_isomorphic(&right.quotient), "({a} ⊠ {b}) ⊠ {c}");
            }
        }
    }
}

#[test]
fn closed_quotient_differs_without_vf_equal_p() {
    // Z[V] ⊠ M mod V is M/VM = Z/4, while the F-stable quotient M/(VM + pM) is Z/2.
    let m = lopsided(2);
    let t = tensor_trunc(&CartierModule::unit(2, 1).unwrap(), &m, 1).unwrap();
    assert_eq!(t.quotient.invariants(), inv(&[4], 0));
    assert_eq!(group_of(&t.module).invariants(), inv(&[2], 0));
    check_axioms(&t.module, false).unwrap();
}

#[test]
fn completed_tensors() {
    for p in [2, 3] {
        let w = CartierModule::witt_fp(p).unwrap();
        let c = completed_tensor(&w, &w, 4).unwrap();
        for (i, l) in c.levels.iter().enumerate() {
            assert_eq!(l.quotient.invariants(), inv(&[(p as i64).pow(i as u32 + 1)], 0));
        }
        assert!(!c.limit.is_stable());
        let a = CartierModule::alpha_p(p).unwrap();
        let c = completed_tensor(&a, &a, 4).unwrap();
        for (i, l) in c.levels.iter().enumerate() {
            assert_eq!(l.quotient.invariants(), inv(&vec![p as i64; i + 1], 0));
        }
        // Unit ⊠ M is the completion of M; for V-nilpotent M that is M itself.
        let fp = BaseRing::fp(p).unwrap();
        let m = CartierModule::witt_module(&fp, Some(2)).unwrap();
        let c = completed_tensor(&CartierModule::unit(p, 4).unwrap(), &m, 4).unwrap();
        assert!(c.limit.is_stable());
        assert!(c.limit.h0.is_isomorphic(&group_of(&m)));
    }
}

#[test]
fn completed_tensors_with_level_dependent_inputs() {
    for p in [2, 3] {
        let a = CartierModule::alpha_p(p).unwrap();
        let fp = BaseRing::fp(p).unwrap();
        let catalog = completed_tensor(&a, &CartierModule::witt_fp(p).unwrap(), 4).unwrap();
        let witt = completed_tensor(&a, &CartierModule::witt_module(&fp, None).unwrap(), 4).unwrap();
        for (x, y) in catalog.levels.iter().zip(&witt.levels) {
            assert_eq!(x.quotient.invariants(), y.quotient.invariants());
        }
        assert!(catalog.limit.h0.is_isomorphic(&witt.limit.h0));
        let k3 = completed_tensor(&a, &CartierModule::k3(p, 4).unwrap(), 4).unwrap();
        for (i, l) in k3.levels.iter().enumerate() {
            assert_eq!(l.quotient.invariants(), inv(&vec![p as i64; i + 1], 0));
        }
    }
}

#[test]
fn witt_tensor_examples() {
    for p in [2, 3] {
        let fp = BaseRing::fp(p).unwrap();
        let r = witt_tensor_theorem_check(&fp, &fp, 3).unwrap();
        assert!(r.is_bijection() && r.mod_v_matches);
        assert_eq!(r.left, format!("Z/{}", p.pow(3)));
        let fpx = BaseRing::truncated(p, 1, &[("x", 2)]).unwrap();
        let r = witt_tensor_theorem_check(&fpx, &fp, 2).unwrap();
        assert!(r.is_bijection() && r.mod_v_matches);
        assert_eq!(r.right_order, Some(BigInt::from(p).pow(4)));
        let zp2 = BaseRing::zmod(p, 2).unwrap();
        let r = witt_tensor_theorem_check(&zp2, &fpx, 2).unwrap();
        assert!(r.is_bijection() && r.mod_v_matches, "{r:?}");
    }
    let f2 = BaseRing::fp(2).unwrap();
    let f3 = BaseRing::fp(3).unwrap();
    assert!(matches!(witt_tensor_theorem_check(&f2, &f3, 2), Err(Error::PrimeMismatch(2, 3))));
}

#[test]
fn completion_examples() {
    for p in [2, 3, 5] {
        for n in 1..=3 {
            let m = CartierModule::cyclic(p, n, p as i64, 1).unwrap();
            let c = derived_v_completion(&m).unwrap();
            assert_eq!(group_of(&c.h0).invariants(), inv(&[(p as i64).pow(n)], 0));
            assert!(c.h1.is_trivial());
            assert!(is_derived_v_complete(&m).unwrap().complete);
        }
        let c = derived_v_completion(&CartierModule::pruefer(p).unwrap()).unwrap();
        assert!(group_of(&c.h0).is_trivial());
        assert_eq!(c.h1.invariants(), inv(&[], 1));
        assert!(!is_derived_v_complete(&CartierModule::pruefer(p).unwrap()).unwrap().complete);
        let inv_v = CartierModule::cyclic(p, 1, 1, p as i64).unwrap();
        let c = derived_v_completion(&inv_v).unwrap();
        assert!(group_of(&c.h0).is_trivial() && c.h1.is_trivial());
        assert!(!is_derived_v_complete(&inv_v).unwrap().complete);
        assert!(is_derived_v_complete(&CartierModule::witt_fp(p).unwrap()).unwrap().complete);
        for e in catalog(p, 4).unwrap() {
            assert_eq!(is_derived_v_complete(&e.module).unwrap().complete, e.complete, "{}", e.name);
        }
    }
    assert!(matches!(
        derived_v_completion(&CartierModule::unit(2, 3).unwrap()),
        Err(Error::UnsupportedRepresentation(_))
    ));
}

#[test]
fn fgzp_completions() {
    let p = 3;
    // V = -1 is a unit: the completion vanishes.
    let m = CartierModule::fgzp(p, FinAbPres::free(1), Matrix::from_i64(&[vec![-1]], 1), Matrix::from_i64(&[vec![-3]], 1));
    let c = derived_v_completion(&m.unwrap()).unwrap();
    assert!(group_of(&c.h0).is_trivial());
    // Z^2 with V^2 = p, plus V-invertible torsion Z/3.
    let g = FinAbPres::from_diagonal(&[big(3)], 2);
    let v = Matrix::from_i64(&[vec![1, 0, 0], vec![0, 0, 1], vec![0, 3, 0]], 3);
    let f = Matrix::from_i64(&[vec![3, 0, 0], vec![0, 0, 1], vec![0, 3, 0]], 3);
    let m = CartierModule::fgzp(p, g, v, f).unwrap();
    check_axioms(&m, true).unwrap();
    let c = derived_v_completion(&m).unwrap();
    let h0 = c.h0.structure().unwrap();
    assert_eq!(h0.group.invariants(), inv(&[], 2));
    // V stays injective on the completion of a V-torsion-free module.
    assert!(h0.v.is_injective());
    // Mixed slopes: V = diag(1, 3).
    let m = CartierModule::fgzp(p, FinAbPres::free(2), Matrix::from_i64(&[vec![1, 0], vec![0, 3]], 2), Matrix::from_i64(&[vec![3, 0], vec![0, 1]], 2)).unwrap();
    assert!(matches!(derived_v_completion(&m), Err(Error::UnsupportedRepresentation(_))));
}

#[test]
fn mod_v_detects_completion_isomorphisms() {
    // c: Z_p -> Z_p with V = p on both sides; c/V is an isomorphism iff c is after completion.
    let p = 3;
    let m = CartierModule::witt_fp(p).unwrap();
    let s = m.structure().unwrap();
    let mv = s.v.cokernel().0;
    let h0 = derived_v_completion(&m).unwrap().h0.structure().unwrap().group;
    for c in 1..=9i64 {
        let mod_v_iso = GroupHom::scalar(&mv, c).is_iso();
        let fc = GroupHom::scalar(&h0, c);
        let completed_iso = fc.kernel().0.is_trivial() && fc.cokernel().0.localize(p).0.is_trivial();
        assert_eq!(mod_v_iso, completed_iso, "c = {c}");
        assert_eq!(mod_v_iso, c % 3 != 0);
    }
}

#[test]
fn bilinear_maps() {
    let p = 3;
    let fp = BaseRing::fp(p).unwrap();
    let n = 3;
    let w = CartierModule::witt_module(&fp, Some(n)).unwrap();
    let a = WittAdditive::new(&fp, n).unwrap();
    let g = a.num_generators();
    let table = (0..g)
        .map(|i| (0..g).map(|j| a.decompose(&a.generator(i).mul(&a.generator(j)).unwrap())).collect())
        .collect();
    let spec = BilinearMapSpec {
        m: w.clone(),
        n: w.clone(),
        q: w.clone(),
        table,
    };
    validate_bilinear(&spec).unwrap();
    validate_bilinear(&BilinearMapSpec::zero(&w, &w, &w).unwrap()).unwrap();
    let src = CartierModule::cyclic(p, 2, p as i64, 1).unwrap();
    let tgt = CartierModule::cyclic(p, 2, 1, p as i64).unwrap();
    let spec = BilinearMapSpec {
        m: src.clone(),
        n: src.clone(),
        q: tgt,
        table: vec![vec![vec![big(1)]]],
    };
    match validate_bilinear(&spec) {
        Err(Error::RelationViolation { relation, witness }) => {
            assert!(relation.contains("V(x,Fy) = (Vx,y)"), "{relation}");
            assert!(witness.contains("[1], [1]"), "{witness}");
        }
        other => panic!("expected a violation, got {other:?}"),
    }
    let t = tensor_trunc(&lopsided(p), &src, 3).unwrap();
    validate_bilinear(&BilinearMapSpec::universal(&lopsided(p), &src, &t)).unwrap();
}

#[test]
fn dieudonne_modules() {
    let scalars = [1, 2, 5, 9, -4];
    for p in [2, 3] {
        dieudonne_check(&CartierModule::mu_p(p).unwrap(), &scalars).unwrap();
        dieudonne_check(&CartierModule::alpha_p(p).unwrap(), &scalars).unwrap();
        dieudonne_check(&CartierModule::witt_fp(p).unwrap(), &scalars).unwrap();
        match dieudonne_check(&lopsided(p), &scalars) {
            Err(Error::ConditionViolation { condition, .. }) => assert_eq!(condition, "ii"),
            other => panic!("expected (ii) to fail, got {other:?}"),
        }
    }
}

#[test]
fn module_json_round_trip() {
    let fpx = BaseRing::truncated(2, 1, &[("x", 3)]).unwrap();
    let mods = [
        lopsided(2),
        CartierModule::witt_fp(2).unwrap(),
        CartierModule::unit(2, 3).unwrap(),
        CartierModule::k3(2, 5).unwrap(),
        CartierModule::pruefer(2).unwrap(),
        CartierModule::witt_module(&fpx, Some(2)).unwrap(),
    ];
    for m in &mods {
        let j = m.to_json();
        for key in ["p", "repr", "group", "V", "F", "params"] {
            assert!(j.get(key).is_some(), "{key} missing");
        }
        let back = CartierModule::from_json(&j).unwrap();
        assert_eq!(back.to_json(), j);
    }
    assert_eq!(lookup("K3", 2, 6).unwrap().to_json()["params"]["precision"], 6);
    assert!(lookup("witt:F2[x]/x^2:3", 2, 1).unwrap().is_finite());
    assert!(lookup("nonsense", 2, 1).is_err());
}

#[test]
fn random_modules_satisfy_the_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut nilpotent, mut not) = (0, 0);
    for p in [2, 3] {
        for _ in 0..30 {
            let m = random_finite_module(p, 4, &mut rng).unwrap();
            check_axioms(&m, false).unwrap();
            assert!(group_of(&m).log_order(p).unwrap() <= 4);
            if is_derived_v_complete(&m).unwrap().complete {
                nilpotent += 1;
            } else {
                not += 1;
            }
        }
    }
    assert!(nilpotent > 0 && not > 0, "{nilpotent} / {not}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tensor_outputs_are_cartier_modules(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3]), k in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_finite_module(p, 2, &mut rng).unwrap();
        let n = random_finite_module(p, 2, &mut rng).unwrap();
        let t = tensor_trunc(&m, &n, k).unwrap();
        check_axioms(&t.module, false).unwrap();
        prop_assert!(mod_v_compatibility(&m, &n).unwrap());
        let s = tensor_trunc(&n, &m, k).unwrap();
        prop_assert!(s.quotient.is_isomorphic(&t.quotient));
    }

    #[test]
    fn completeness_is_v_nilpotence(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_finite_module(p, 3, &mut rng).unwrap();
        let verdict = is_derived_v_complete(&m).unwrap();
        let c = derived_v_completion(&m).unwrap();
        prop_assert_eq!(verdict.complete, c.h0.order() == m.order());
        check_axioms(&c.h0, false).unwrap();
    }
}
