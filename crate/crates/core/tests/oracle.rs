use cartierkit::algebra::{big, FinAbPres, Matrix};
use cartierkit::cartier::*;
use cartierkit::drw::{build_drw, v_dv_quotient, DRWConfig};
use cartierkit::oracle::*;
use cartierkit::witt::{generate_universal_polys, BaseRing, Poly};
use cartierkit::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn zero_module(p: u64) -> CartierModule {
    CartierModule::finite(p, FinAbPres::trivial(), Matrix::zeros(0, 0), Matrix::zeros(0, 0)).unwrap()
}

fn v_nilpotent(m: &CartierModule) -> bool {
    let s = m.structure().unwrap();
    let k = s.group.log_order(m.p()).unwrap() as usize;
    (1..k.max(1)).fold(s.v.clone(), |acc, _| acc.compose(&s.v)).is_zero_map()
}

#[test]
fn hom_examples() {
    for p in [2, 3, 5] {
        let a = CartierModule::alpha_p(p).unwrap();
        assert_eq!(enumerate_cartier_homs(&a, &a, 625).unwrap().len(), p as usize);
        for m in [a.clone(), CartierModule::mu_p(p).unwrap(), CartierModule::cyclic(p, 2, p as i64, 1).unwrap()] {
            assert_eq!(enumerate_cartier_homs(&m, &zero_module(p), 625).unwrap().len(), 1);
        }
        // V = 1 on the source forces a V-invertible image inside a module where V = 0.
        let v_unit = CartierModule::cyclic(p, 1, 1, 0).unwrap();
        let homs = enumerate_cartier_homs(&v_unit, &a, 625).unwrap();
        assert_eq!(homs, vec![vec![vec![0]]]);
    }
}

#[test]
fn hom_size_bound() {
    let big_group = CartierModule::cyclic(2, 5, 2, 1).unwrap();
    let a = CartierModule::alpha_p(2).unwrap();
    assert!(matches!(enumerate_cartier_homs(&big_group, &a, 16), Err(Error::SizeBound(_))));
}

#[test]
fn corepresentability_examples() {
    for p in [2, 3] {
        let a = CartierModule::alpha_p(p).unwrap();
        let v = corepresentability_check(&a, &a, &a, 2).unwrap();
        assert_eq!(v, CorepVerdict { bilinear_maps: p as usize, homs: p as usize });
        let v = corepresentability_check(&a, &a, &zero_module(p), 2).unwrap();
        assert_eq!(v, CorepVerdict { bilinear_maps: 1, homs: 1 });
        let mu = CartierModule::mu_p(p).unwrap();
        assert!(matches!(
            corepresentability_check(&a, &a, &CartierModule::cyclic(p, 1, 1, 0).unwrap(), 2),
            Err(Error::UnsupportedRepresentation(_))
        ));
        // mu_p x mu_p -> alpha_p: F(x,y) = (Fx,Fy) forces the pairing to vanish.
        assert_eq!(corepresentability_check(&mu, &mu, &a, 2).unwrap().bilinear_maps, 1);
    }
}

#[test]
fn truncated_unit_recovers_homs() {
    // (Z/p)[V]/V^2 acts as a unit on targets killed by p and V.
    for p in [2, 3] {
        // Basis e, Ve with F e = e.
        let unit = CartierModule::finite(
            p,
            FinAbPres::from_diagonal(&[big(p as i64), big(p as i64)], 0),
            Matrix::from_i64(&[vec![0, 1], vec![0, 0]], 2),
            Matrix::from_i64(&[vec![1, 0], vec![0, 0]], 2),
        )
        .unwrap();
        let targets = [CartierModule::alpha_p(p).unwrap(), zero_module(p)];
        for n in small_cartier_modules(p, 1).unwrap() {
            for q in &targets {
                let v = corepresentability_check(&unit, &n, q, 2).unwrap();
                assert_eq!(v.bilinear_maps, v.homs);
                assert_eq!(v.homs, enumerate_cartier_homs(&n, q, 81).unwrap().len());
            }
        }
    }
}

#[test]
fn small_module_census() {
    // Z/2: (V, F) with VF = 0; Z/4: VF = 2; (Z/2)^2 up to conjugation.
    let mods = small_cartier_modules(2, 2).unwrap();
    let by_order = |k: u32| mods.iter().filter(|m| m.structure().unwrap().group.log_order(2) == Some(k)).count();
    assert_eq!(by_order(1), 3);
    assert_eq!(mods.len(), 23);
    for m in &mods {
        check_axioms(m, false).unwrap();
    }
    assert!(matches!(small_cartier_modules(2, 3), Err(Error::SizeBound(_))));
}

#[test]
fn corepresentability_on_all_small_pairs_p2() {
    let mods = small_cartier_modules(2, 2).unwrap();
    let targets: Vec<&CartierModule> = mods.iter().filter(|m| v_nilpotent(m)).collect();
    assert_eq!(targets.len(), 13);
    let mut checks = 0;
    for m in &mods {
        for n in &mods {
            let t = tensor_trunc(m, n, 2).unwrap();
            for q in &targets {
                let v = corepresentability_check_with(m, n, &t, q).unwrap();
                assert_eq!(v.bilinear_maps, v.homs);
                checks += 1;
            }
        }
    }
    assert_eq!(checks, 23 * 23 * 13);
}

#[test]
fn spotcheck_point_values() {
    // S_0(x0, y0) = x0 + y0.
    assert_eq!(generate_universal_polys(2, 1).sum[0].eval_int(&[big(3), big(5)]), big(8));
    let c = generate_universal_polys(2, 2);
    // Layout (x0, x1, y0, y1): S_1 = x1 + y1 - x0 y0 at p = 2.
    assert_eq!(c.sum[1].eval_int(&[big(1), big(0), big(1), big(0)]), big(-1));
    let r = witt_cache_spotcheck(&c, 20, 1).unwrap();
    assert_eq!(r.trials, 20);
    assert!(r.identities > 0);
    for p in [3, 5] {
        witt_cache_spotcheck(&generate_universal_polys(p, 3), 10, 2).unwrap();
    }
}

#[test]
fn spotcheck_rejects_corruption() {
    let mut c = generate_universal_polys(3, 3);
    c.prod[1] = c.prod[1].add(&Poly::constant(c.prod[1].nvars(), 1));
    assert!(matches!(witt_cache_spotcheck(&c, 5, 3), Err(Error::CacheCorrupt(_))));
}

#[test]
fn mod_v_table_oracle_matches_main_path() {
    for p in [2, 3, 5] {
        let mut modules: Vec<CartierModule> = finite_catalog(p).unwrap().into_iter().map(|e| e.module).collect();
        modules.extend(small_cartier_modules(p, 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            modules.push(random_finite_module(p, 3, &mut rng).unwrap());
        }
        for m in &modules {
            let want = homotopy_mod_v(m, 6).unwrap();
            let got = figure1_oracle(m, 6).unwrap();
            assert!(got.same_as(&want), "{m}: {} vs {}", got.to_csv(), want.to_csv());
            assert_eq!(got.to_csv(), want.to_csv());
        }
    }
}

#[test]
fn mod_v_table_oracle_with_invertible_v() {
    for p in [2, 3] {
        let t = figure1_oracle(&CartierModule::cyclic(p, 2, 1, p as i64).unwrap(), 3).unwrap();
        assert!(t.entries[0].is_trivial() && t.entries[1].is_trivial());
    }
}

#[test]
fn mod_v_table_oracle_on_finite_witt_quotients() {
    for p in [2, 3] {
        let want = homotopy_mod_v(&CartierModule::witt_fp(p).unwrap(), 8).unwrap();
        let fp = BaseRing::fp(p).unwrap();
        for n in 1..=4 {
            let t = figure1_oracle(&CartierModule::witt_module(&fp, Some(n)).unwrap(), 8).unwrap();
            for d in (0..=8).step_by(2) {
                assert!(t.entries[d].is_isomorphic(&want.entries[d]), "n = {n}, degree {d}");
            }
            // Odd degrees hold p^(n-1) Z/p^n, which maps to zero in W_(n-1).
            for d in (1..=8).step_by(2) {
                assert_eq!(t.entries[d].order(), Some(big(p as i64)));
            }
        }
    }
}

#[test]
fn basic_witt_count_matches_build() {
    for (p, n, d) in [(2, 2, 8), (3, 2, 8), (2, 3, 4), (3, 3, 3), (5, 2, 5), (2, 2, 1)] {
        let c = build_drw(&DRWConfig::new(p, n, 1, d)).unwrap();
        let o = basic_witt_count(p, n, d).unwrap();
        let main: Vec<[u32; 2]> = (1..=n).map(|m| [0, 1].map(|i| c.term(m, i).log_order(p).unwrap())).collect();
        assert_eq!(main, o.log_orders, "p = {p}, n = {n}, degcap {d}");
    }
}

#[test]
fn vdv_quotient_matches_basic_witt_count() {
    let c = build_drw(&DRWConfig::new(3, 2, 1, 8)).unwrap();
    let q = v_dv_quotient(&c.v_complex(2), 1, 1).unwrap();
    assert!(q.h0.is_finite() && q.h1.is_finite());
    assert_eq!(q.h0.log_order(3).unwrap(), basic_witt_vdv_h0(3, 2, 8, 1, 1).unwrap());
    for (p, n, d) in [(2, 2, 6), (3, 2, 4), (2, 3, 3)] {
        let c = build_drw(&DRWConfig::new(p, n, 1, d)).unwrap();
        for m in 1..=n {
            for i in 0..2 {
                for r in 1..=3u32 {
                    let got = v_dv_quotient(&c.v_complex(m), i as i64, r as usize).unwrap().h0.log_order(p).unwrap();
                    assert_eq!(got, basic_witt_vdv_h0(p, m, d, i, r).unwrap(), "p {p} m {m} i {i} r {r}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_corepresentability(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_finite_module(p, 2, &mut rng).unwrap();
        let n = random_finite_module(p, 1, &mut rng).unwrap();
        let q = CartierModule::alpha_p(p).unwrap();
        let v = corepresentability_check(&m, &n, &q, 1).unwrap();
        prop_assert_eq!(v.bilinear_maps, v.homs);
    }

    #[test]
    fn mod_v_table_oracle_on_random_modules(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_finite_module(p, 3, &mut rng).unwrap();
        let want = homotopy_mod_v(&m, 4).unwrap();
        prop_assert!(figure1_oracle(&m, 4).unwrap().same_as(&want));
    }
}
