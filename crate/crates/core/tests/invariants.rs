//! Randomized invariant checks: structural properties that must hold for
//! every grammar and transducer, exercised on generated instances.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pdtlab::automaton::{enumerate_computations, normalize, trim_pdt};
use pdtlab::grammar::{
    enumerate_derivations, is_reduced, left_corner_relation, nullable_set, reduce, Cfg, Pcfg,
    Rule, Symbol,
};
use pdtlab::lifting::lift;
use pdtlab::numeric::{ratio, Value};
use pdtlab::prefix::{prefix_probability, string_probability_ppdt};
use pdtlab::properties::{check_cpp, check_mass_bound, check_spp};
use pdtlab::strategies::{construct, map_output, StrategyKind, ALL_STRATEGIES};

const TOL: f64 = 1e-13;
const ITERS: usize = 200_000;

/// Random grammar that may contain cycles, unreachable and unproductive
/// parts; only the basic well-formedness that `Cfg::new` enforces is
/// guaranteed.
fn random_messy_cfg(seed: u64) -> Option<Cfg> {
    let mut rng = StdRng::seed_from_u64(seed);
    let terminals = ["a", "b", "c"];
    let k = rng.gen_range(2..=5usize);
    let mut rules = vec![Rule {
        id: "r_start".to_string(),
        lhs: "S".to_string(),
        rhs: vec![Symbol::n("N0")],
    }];
    for i in 0..k {
        for v in 0..rng.gen_range(1..=2usize) {
            let len = rng.gen_range(0..=3usize);
            let mut rhs = Vec::new();
            for _ in 0..len {
                if rng.gen_bool(0.4) {
                    rhs.push(Symbol::n(&format!("N{}", rng.gen_range(0..k))));
                } else {
                    rhs.push(Symbol::t(terminals[rng.gen_range(0..terminals.len())]));
                }
            }
            rules.push(Rule {
                id: format!("r{i}_{v}"),
                lhs: format!("N{i}"),
                rhs,
            });
        }
    }
    Cfg::new("S", rules).ok()
}

/// Random reduced non-nullable grammar, acyclic by stratification, with exact
/// rational rule probabilities.
fn random_acyclic_pcfg(seed: u64) -> Pcfg {
    let mut rng = StdRng::seed_from_u64(seed);
    let terminals = ["a", "b", "c"];
    loop {
        let k = rng.gen_range(2..=5usize);
        let mut rules = vec![Rule {
            id: "r_start".to_string(),
            lhs: "S".to_string(),
            rhs: vec![Symbol::n("N0")],
        }];
        for i in 0..k {
            for v in 0..rng.gen_range(1..=2usize) {
                let len = rng.gen_range(1..=3usize);
                let mut rhs = Vec::new();
                for _ in 0..len {
                    if i + 1 < k && rng.gen_bool(0.4) {
                        rhs.push(Symbol::n(&format!("N{}", rng.gen_range(i + 1..k))));
                    } else {
                        rhs.push(Symbol::t(terminals[rng.gen_range(0..terminals.len())]));
                    }
                }
                rules.push(Rule {
                    id: format!("r{i}_{v}"),
                    lhs: format!("N{i}"),
                    rhs,
                });
            }
        }
        let Ok(cfg) = Cfg::new("S", rules) else {
            continue;
        };
        let Ok(cfg) = reduce(&cfg) else { continue };
        if !is_reduced(&cfg) || !nullable_set(&cfg).is_empty() || cfg.rules.len() > 12 {
            continue;
        }
        let mut weights: BTreeMap<String, i64> = BTreeMap::new();
        let raw: Vec<i64> = cfg.rules.iter().map(|_| rng.gen_range(1..=9i64)).collect();
        for (r, w) in cfg.rules.iter().zip(&raw) {
            *weights.entry(r.lhs.clone()).or_insert(0) += w;
        }
        let probs = cfg
            .rules
            .iter()
            .zip(&raw)
            .map(|(r, &w)| Value::Exact(ratio(w, weights[&r.lhs])))
            .collect();
        return Pcfg::new(cfg, probs).unwrap();
    }
}

/// Short yields of the grammar, for use as test inputs.
fn sample_yields(cfg: &Cfg, max_len: usize, take: usize) -> Vec<Vec<String>> {
    let mut seen = BTreeSet::new();
    enumerate_derivations(cfg, 4000)
        .into_iter()
        .map(|(_, y)| y)
        .filter(|y| y.len() <= max_len && seen.insert(y.clone()))
        .take(take)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduction_is_idempotent(seed in any::<u64>()) {
        let Some(cfg) = random_messy_cfg(seed) else { return Ok(()) };
        let Ok(once) = reduce(&cfg) else { return Ok(()) };
        prop_assert!(is_reduced(&once));
        let twice = reduce(&once).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn strict_left_corners_are_contained_in_nullable_skipping_ones(seed in any::<u64>()) {
        let Some(cfg) = random_messy_cfg(seed) else { return Ok(()) };
        let strict = left_corner_relation(&cfg, false);
        let skipping = left_corner_relation(&cfg, true);
        for pair in strict.pairs() {
            prop_assert!(skipping.pairs().contains(pair));
        }
    }

    #[test]
    fn normalization_and_trimming_are_idempotent(seed in any::<u64>()) {
        let pcfg = random_acyclic_pcfg(seed);
        for kind in ALL_STRATEGIES {
            let pdt = construct(kind, &pcfg.cfg).unwrap();
            let norm = normalize(&pdt);
            prop_assert!(norm.is_normal_form());
            prop_assert_eq!(&normalize(&norm), &norm);
            let trimmed = trim_pdt(&pdt).unwrap();
            prop_assert_eq!(&trim_pdt(&trimmed).unwrap(), &trimmed);
        }
    }

    #[test]
    fn constructions_accept_exactly_the_language(seed in any::<u64>()) {
        let pcfg = random_acyclic_pcfg(seed);
        let yields: BTreeSet<Vec<String>> = enumerate_derivations(&pcfg.cfg, 4000)
            .into_iter()
            .map(|(_, y)| y)
            .filter(|y| y.len() <= 6)
            .collect();
        let mut inputs: Vec<(Vec<String>, bool)> =
            yields.iter().map(|y| (y.clone(), true)).collect();
        for y in yields.iter().take(3) {
            let mut bad = y.clone();
            bad.push("z".to_string());
            inputs.push((bad.clone(), yields.contains(&bad)));
            bad.pop();
            bad.reverse();
            inputs.push((bad.clone(), yields.contains(&bad)));
        }
        for kind in ALL_STRATEGIES {
            let pdt = construct(kind, &pcfg.cfg).unwrap();
            for (w, in_language) in &inputs {
                if w.len() > 6 {
                    continue;
                }
                let en = enumerate_computations(&pdt, w, 10_000);
                prop_assert!(!en.bound_hit);
                prop_assert_eq!(
                    !en.complete.is_empty(),
                    *in_language,
                    "{:?} on {:?}", kind, w
                );
            }
        }
    }

    #[test]
    fn outputs_map_to_derivations_that_replay_the_input(seed in any::<u64>()) {
        let pcfg = random_acyclic_pcfg(seed);
        for kind in ALL_STRATEGIES {
            let pdt = construct(kind, &pcfg.cfg).unwrap();
            for w in sample_yields(&pcfg.cfg, 6, 4) {
                for c in &enumerate_computations(&pdt, &w, 10_000).complete {
                    let d = map_output(kind, &pcfg.cfg, &c.output(&pdt)).unwrap();
                    prop_assert_eq!(&pcfg.cfg.replay(&d).unwrap(), &w);
                }
            }
        }
    }

    #[test]
    fn monomials_evaluate_to_the_computation_probability(seed in any::<u64>()) {
        let pcfg = random_acyclic_pcfg(seed);
        let ppdt = lift(&pcfg, StrategyKind::EpsLeftCorner, TOL, ITERS).unwrap();
        for w in sample_yields(&pcfg.cfg, 6, 4) {
            for c in &enumerate_computations(&ppdt.pdt, &w, 10_000).complete {
                let via_monomial = c.monomial().evaluate(&ppdt.probs);
                let direct = ppdt.computation_probability(c);
                prop_assert_eq!(via_monomial.as_exact(), direct.as_exact());
            }
        }
    }

    #[test]
    fn lifted_transducers_are_proper_with_mass_at_most_one(seed in any::<u64>()) {
        let pcfg = random_acyclic_pcfg(seed);
        for kind in [
            StrategyKind::TopDown,
            StrategyKind::LeftCorner,
            StrategyKind::Plr,
            StrategyKind::EpsLeftCorner,
        ] {
            let pdt = construct(kind, &pcfg.cfg).unwrap();
            prop_assert!(check_cpp(&pdt, None).unwrap().holds);
            prop_assert!(check_spp(&pdt).holds);
            let ppdt = lift(&pcfg, kind, TOL, ITERS).unwrap();
            prop_assert!(ppdt.is_proper(1e-9));
            let mass = check_mass_bound(&ppdt, 30);
            match mass.total.as_exact() {
                Some(t) => prop_assert!(*t <= ratio(1, 1)),
                None => prop_assert!(mass.total.to_f64() <= 1.0 + 1e-9),
            }
        }
    }

    #[test]
    fn prefix_probability_dominates_and_never_increases(seed in any::<u64>()) {
        let pcfg = random_acyclic_pcfg(seed);
        let ppdt = lift(&pcfg, StrategyKind::EpsLeftCorner, TOL, ITERS).unwrap();
        for w in sample_yields(&pcfg.cfg, 5, 3) {
            let mut previous = prefix_probability(&ppdt, &[], TOL, ITERS).unwrap();
            for cut in 1..=w.len() {
                let current = prefix_probability(&ppdt, &w[..cut], TOL, ITERS).unwrap();
                prop_assert!(current.to_f64() <= previous.to_f64() + 1e-12);
                previous = current;
            }
            let exact_string = string_probability_ppdt(&ppdt, &w, TOL, ITERS).unwrap();
            prop_assert!(exact_string.to_f64() <= previous.to_f64() + 1e-12);
        }
    }
}
