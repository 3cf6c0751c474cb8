use proptest::prelude::*;

use polycat::finset::{check_pullback, compose_fn, pullback, FinFn};
use polycat::gen::{self, Rng};
use polycat::json::{element_from_json, element_to_json, fn_from_json, fn_to_json, poly_from_json, poly_to_json};
use polycat::laws::{find_law, run_law_with, Exec, InstanceGenConfig};
use polycat::poly::{compose2, compose_seq, Polynomial};
use polycat::slices::{check_dpb_terminal, dist_pullback, pi, sigma, SliceObj};
use polycat::symbolic::{decode, encode, eval_sym, eval_via_extension, parse_poly};
use rand::SeedableRng;

fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pullbacks_pass_their_own_check(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let (a, b, c) = (gen::set(&mut r, "a", n), gen::set(&mut r, "b", n), gen::set_between(&mut r, "c", 1, n));
        let f = gen::func(&mut r, &a, &c);
        let g = gen::func(&mut r, &b, &c);
        let sq = pullback(&f, &g).unwrap();
        prop_assert!(check_pullback(&sq).unwrap());
        prop_assert_eq!(sq.mediate(&sq.proj1, &sq.proj2).unwrap(), FinFn::identity(&sq.apex));
    }

    #[test]
    fn composition_is_associative_and_unital(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let sets: Vec<_> = (0..4).map(|i| gen::set_between(&mut r, &format!("s{i}_"), 1, n)).collect();
        let f = gen::func(&mut r, &sets[0], &sets[1]);
        let g = gen::func(&mut r, &sets[1], &sets[2]);
        let h = gen::func(&mut r, &sets[2], &sets[3]);
        let left = compose_fn(&h, &compose_fn(&g, &f).unwrap()).unwrap();
        let right = compose_fn(&compose_fn(&h, &g).unwrap(), &f).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(compose_fn(&FinFn::identity(&sets[1]), &f).unwrap(), f.clone());
        prop_assert_eq!(compose_fn(&f, &FinFn::identity(&sets[0])).unwrap(), f);
    }

    #[test]
    fn sigma_is_functorial(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let (a, b, c) = (gen::set_between(&mut r, "a", 1, n), gen::set_between(&mut r, "b", 1, n), gen::set_between(&mut r, "c", 1, n));
        let f = gen::func(&mut r, &a, &b);
        let g = gen::func(&mut r, &b, &c);
        let x = gen::slice(&mut r, &a, n);
        let twice = sigma(&g, &sigma(&f, &x).unwrap()).unwrap();
        prop_assert_eq!(twice, sigma(&compose_fn(&g, &f).unwrap(), &x).unwrap());
    }

    #[test]
    fn pi_counts_sections(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let (a, b) = (gen::set_between(&mut r, "a", 1, n), gen::set_between(&mut r, "b", 1, n));
        let f = gen::func(&mut r, &a, &b);
        let x = gen::slice(&mut r, &a, n);
        let px = pi(&f, &x).unwrap();
        let xs = x.fiber_sizes();
        for (bi, fib) in f.fibers().iter().enumerate() {
            let expected: usize = fib.iter().map(|&ai| xs[ai]).product();
            prop_assert_eq!(px.fiber_sizes()[bi], expected);
        }
        prop_assert_eq!(pi(&f, &SliceObj::terminal(&a)).unwrap(), SliceObj::terminal(&b));
    }

    #[test]
    fn chosen_dpbs_are_terminal(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let (a, b, z) = (gen::set_between(&mut r, "a", 1, n), gen::set_between(&mut r, "b", 1, n), gen::set(&mut r, "z", n));
        let f = gen::func(&mut r, &a, &b);
        let g = gen::func(&mut r, &z, &a);
        prop_assert!(check_dpb_terminal(&dist_pullback(&f, &g).unwrap()).unwrap());
    }

    #[test]
    fn identities_are_strict_units(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let (x, y) = (gen::set_between(&mut r, "x", 1, n), gen::set_between(&mut r, "y", 1, n));
        let p = gen::poly(&mut r, &x, &y, n);
        prop_assert_eq!(compose2(&Polynomial::identity(&y), &p).unwrap(), p.clone());
        prop_assert_eq!(compose2(&p, &Polynomial::identity(&x)).unwrap(), p);
    }

    #[test]
    fn binary_and_ternary_composites_have_matching_sizes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (x, seq) = gen::chain(&mut r, 3, 2);
        let all = compose_seq(&x, &seq).unwrap();
        let nested = compose2(&seq[2], &compose2(&seq[1], &seq[0]).unwrap()).unwrap();
        prop_assert_eq!(all.mid_src().len(), nested.mid_src().len());
        prop_assert_eq!(all.mid_tgt().len(), nested.mid_tgt().len());
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let (x, seq) = gen::chain(&mut r, 2, n);
        let p = compose_seq(&x, &seq).unwrap();
        prop_assert_eq!(poly_from_json(&poly_to_json(&p)).unwrap(), p.clone());
        prop_assert_eq!(fn_from_json(&fn_to_json(&p.p2)).unwrap(), p.p2.clone());
        for e in p.mid_tgt().iter() {
            prop_assert_eq!(&element_from_json(&element_to_json(e)).unwrap(), e);
        }
    }

    #[test]
    fn symbolic_forms_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = gen::sympoly(&mut r);
        prop_assert!(decode(&encode(&s).unwrap()).unwrap().equivalent(&s));
        let text = s.to_string();
        prop_assert_eq!(parse_poly(&text).unwrap().normalized().outputs, s.normalized().outputs);
    }

    #[test]
    fn extension_counts_match_arithmetic(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = gen::sympoly(&mut r);
        let a = gen::assignment(&mut r, &s, 4);
        prop_assert_eq!(eval_via_extension(&encode(&s).unwrap(), &a).unwrap(), eval_sym(&s, &a).unwrap());
    }
}

#[test]
fn reports_are_deterministic_across_schedules() {
    let cfg = InstanceGenConfig { seed: 42, max_set_size: 3, cases: 30 };
    for name in ["delta-criterion", "coherence", "roundtrip"] {
        let law = find_law(name).unwrap();
        let mut a = run_law_with(law, &cfg, Exec::Sequential).to_json();
        let mut b = run_law_with(law, &cfg, Exec::Parallel).to_json();
        a["wall_ms"] = 0.into();
        b["wall_ms"] = 0.into();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}

#[test]
fn degenerate_sizes_pass() {
    let cfg = InstanceGenConfig { seed: 42, max_set_size: 1, cases: 50 };
    for law in polycat::laws::LAWS {
        let rep = run_law_with(law, &cfg, Exec::Sequential);
        assert!(rep.passed(), "{}: {:?}", law.name, rep.failures.first());
    }
}
