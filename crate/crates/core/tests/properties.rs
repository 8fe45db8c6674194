mod common;

use std::collections::BTreeSet;

use lazyasp::bench::{
    draw_house, gen_graph_colouring, gnm_edges, median, GraphColouringClass, HouseClass,
};
use lazyasp::grounding::{ground, Bound, StrategyConfig};
use lazyasp::oracle::{enumerate_answer_sets_bruteforce, BruteForceMode, Interpretation};
use lazyasp::program::{parse_program, program_meta, Atom, Rule};
use lazyasp::solving::{solve, SolveMode, SolveOptions};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bound() -> impl Strategy<Value = Bound> {
    prop_oneof![(0u32..4).prop_map(Bound::Finite), Just(Bound::Unbounded)]
}

/// Assignment, memory, rule and metadata drawn from one seed.
fn triple(
    seed: u64,
) -> Option<(
    lazyasp::grounding::Assignment,
    lazyasp::grounding::GrounderMemory,
    Rule,
    lazyasp::program::ProgramMeta,
)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = parse_program(&common::random_program_text(&mut rng, 5)).unwrap();
    let rules: Vec<&Rule> = p.rules.iter().filter(|r| !r.is_fact()).collect();
    if rules.is_empty() {
        return None;
    }
    let r = rules[rng.random_range(0..rules.len())].clone();
    let u = common::universe(&p);
    Some((
        common::random_assignment(&mut rng, &u),
        common::random_memory(&mut rng, &u),
        r,
        program_meta(&p),
    ))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn larger_bounds_ground_more(seed: u64, co in bound(), ru in bound(), dco in bound(), dru in bound(), acc: bool) {
        let Some((a, g, r, meta)) = triple(seed) else { return Ok(()) };
        let widen = |b: Bound, d: Bound| match (b, d) {
            (Bound::Finite(x), Bound::Finite(y)) => Bound::Finite(x + y),
            _ => Bound::Unbounded,
        };
        let small = StrategyConfig::k_unassigned(co, ru).with_accumulator(acc);
        let big = StrategyConfig::k_unassigned(widen(co, dco), widen(ru, dru)).with_accumulator(acc);
        let rs = ground(small, &a, &g, &r, &meta).1;
        let rb = ground(big, &a, &g, &r, &meta).1;
        prop_assert!(rs.is_subset(&rb));
    }

    #[test]
    fn default_is_subsumed_and_accumulator_widens(seed: u64, co in bound(), ru in bound()) {
        let Some((a, g, r, meta)) = triple(seed) else { return Ok(()) };
        let def = ground(StrategyConfig::DEFAULT, &a, &g, &r, &meta).1;
        let def_acc = ground(StrategyConfig::DEFAULT.with_accumulator(true), &a, &g, &r, &meta).1;
        let k = StrategyConfig::k_unassigned(co, ru);
        let plain = ground(k, &a, &g, &r, &meta).1;
        let acc = ground(k.with_accumulator(true), &a, &g, &r, &meta).1;
        prop_assert!(def.is_subset(&plain));
        prop_assert!(def.is_subset(&def_acc));
        prop_assert!(plain.is_subset(&acc));
    }

    #[test]
    fn default_equals_zero_unassigned(seed: u64, acc: bool) {
        let Some((a, mut g, r, meta)) = triple(seed) else { return Ok(()) };
        // The equivalence needs `G ⊎ A` to be consistent.
        g.atoms.retain(|x| !a.negative.contains(x));
        let zero = Bound::Finite(0);
        let def = ground(StrategyConfig::DEFAULT.with_accumulator(acc), &a, &g, &r, &meta);
        let k00 = ground(StrategyConfig::k_unassigned(zero, zero).with_accumulator(acc), &a, &g, &r, &meta);
        prop_assert_eq!(def, k00);
    }

    #[test]
    fn memory_is_previous_memory_plus_true_atoms(seed: u64, acc: bool) {
        let Some((a, g, r, meta)) = triple(seed) else { return Ok(()) };
        let config = StrategyConfig::DEFAULT.with_accumulator(acc);
        let (next, _) = ground(config, &a, &g, &r, &meta);
        let mut expected = a.positive.clone();
        if acc {
            expected.extend(g.atoms.iter().cloned());
        }
        prop_assert_eq!(next.atoms, expected);
    }

    #[test]
    fn emitted_instances_are_ground_and_weakly_applicable(seed: u64, co in bound(), ru in bound()) {
        let Some((a, g, r, meta)) = triple(seed) else { return Ok(()) };
        for inst in ground(StrategyConfig::k_unassigned(co, ru), &a, &g, &r, &meta).1 {
            prop_assert!(inst.ground.is_ground());
            prop_assert!(lazyasp::grounding::is_weakly_applicable(&inst.ground, &a, &meta).unwrap());
        }
    }

    #[test]
    fn printed_programs_parse_back(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = common::random_program_text(&mut rng, 5);
        // Desugared choices print reserved complement atoms.
        prop_assume!(!text.contains('{'));
        let p = parse_program(&text).unwrap();
        let again = parse_program(&p.to_string()).unwrap();
        prop_assert_eq!(p, again);
    }

    #[test]
    fn gnm_edges_are_distinct_and_in_range(seed: u64, v in 2u32..30, frac in 0.0f64..=1.0) {
        let max = GraphColouringClass::max_edges(v);
        let e = (max as f64 * frac) as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = gnm_edges(&mut rng, v, e).unwrap();
        prop_assert_eq!(edges.len(), e as usize);
        prop_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(edges.iter().all(|&(a, b)| 1 <= a && a < b && b <= v));
        prop_assert!(gnm_edges(&mut rng, v, max as u32 + 1).is_err());
    }

    #[test]
    fn instances_depend_only_on_class_and_index(seed: u64, i in 0u64..1000) {
        let cls = GraphColouringClass { v: 12, e: 30, c: 3, seed, replicas: 11 };
        prop_assert_eq!(gen_graph_colouring(&cls, i).unwrap(), gen_graph_colouring(&cls, i).unwrap());
        let h = HouseClass { t: 8, seed, replicas: 11 };
        prop_assert_eq!(draw_house(&h, i).unwrap(), draw_house(&h, i).unwrap());
    }

    #[test]
    fn house_draws_stay_in_range(seed: u64, t in 2u32..40, i in 0u64..1000) {
        let d = draw_house(&HouseClass { t, seed, replicas: 1 }, i).unwrap();
        prop_assert!((2..=t / 2 + 1).contains(&d.persons));
        prop_assert_eq!(d.owners.len(), t as usize);
        prop_assert!(d.owners.iter().all(|&o| (1..=d.persons).contains(&o)));
        prop_assert!(d.legacy.iter().all(|&(x, c)| (1..=t).contains(&x) && (1..=t).contains(&c)));
        prop_assert!(d.t_long() <= t);
        prop_assert!(d.long_things.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn median_is_order_free_and_bounded(mut xs in prop::collection::vec(-1e6f64..1e6, 1..40)) {
        let m = median(&xs).unwrap();
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= m && m <= hi);
        xs.reverse();
        prop_assert_eq!(median(&xs).unwrap(), m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_matches_oracle(seed: u64, co in bound(), ru in bound(), acc: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = parse_program(&common::random_program_text(&mut rng, 5)).unwrap();
        prop_assume!(common::guess_pool(&p) <= 12);
        let expected: BTreeSet<BTreeSet<Atom>> =
            enumerate_answer_sets_bruteforce(&p, BruteForceMode::Guess, Default::default())
                .unwrap()
                .iter()
                .map(Interpretation::visible)
                .collect();
        let mode = SolveMode::Lazy(StrategyConfig::k_unassigned(co, ru).with_accumulator(acc));
        let out = solve(&p, mode, &SolveOptions::all()).unwrap();
        let got: BTreeSet<BTreeSet<Atom>> = out.answer_sets.iter().cloned().collect();
        prop_assert_eq!(got.len(), out.answer_sets.len());
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn oracle_modes_agree(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = parse_program(&common::random_program_text(&mut rng, 4)).unwrap();
        let guess = enumerate_answer_sets_bruteforce(&p, BruteForceMode::Guess, Default::default());
        let exhaustive = enumerate_answer_sets_bruteforce(&p, BruteForceMode::Exhaustive, Default::default());
        if let (Ok(g), Ok(e)) = (guess, exhaustive) {
            prop_assert_eq!(g, e);
        }
    }
}
