//! Invariants over randomly sampled KBs and queries.

use std::collections::BTreeSet;

use elho::engine::{Budget, Substitution};
use elho::kb::{normalize, parse_kb};
use elho::oracle::expand_bounded;
use elho::oracle::sample::{random_general_kb, random_kb, random_query, SATURATION_FACTS};
use elho::query::{
    is_spurious, parse_query, CertainAnswers, ConjunctiveQuery, Reasoner, SpuriousReason, Verdict,
};
use elho::rewrite::{xi_translate, Term};
use elho::workbench::{compute_answer_stats, compute_stats, generate_abox};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        let n = normalize(&random_general_kb(&mut rng(seed)));
        prop_assert!(n.is_normalized());
        prop_assert_eq!(normalize(&n), n);
    }

    #[test]
    fn kb_text_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kb = if seed % 2 == 0 { random_kb(&mut r) } else { random_general_kb(&mut r) };
        prop_assert_eq!(parse_kb(&kb.to_text()).unwrap(), kb);
    }

    #[test]
    fn query_text_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kb = random_kb(&mut r);
        let q = random_query(&mut r, &kb);
        prop_assert_eq!(parse_query(&q.to_string()).unwrap(), q);
    }

    #[test]
    fn verdicts_ignore_atom_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kb = random_kb(&mut r);
        let q = random_query(&mut r, &kb);
        let mut atoms = q.atoms().to_vec();
        atoms.shuffle(&mut r);
        let shuffled = ConjunctiveQuery::new(q.answer_vars().to_vec(), atoms).unwrap();
        let reasoner = Reasoner::new(&kb, &Budget::default()).unwrap();
        for tau in reasoner.matches(&q).unwrap() {
            let v = is_spurious(&q, reasoner.model(), &tau, reasoner.aux_set());
            prop_assert_eq!(v, is_spurious(&shuffled, reasoner.model(), &tau, reasoner.aux_set()));
            prop_assert_eq!(v, is_spurious(&q, reasoner.model(), &tau, reasoner.aux_set()));
        }
        prop_assert_eq!(reasoner.certain_answers(&q).unwrap(), reasoner.certain_answers(&shuffled).unwrap());
    }

    #[test]
    fn certain_answers_are_projections_of_genuine_matches(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kb = random_kb(&mut r);
        let q = random_query(&mut r, &kb);
        let reasoner = Reasoner::new(&kb, &Budget::default()).unwrap();
        let CertainAnswers::Answers(answers) = reasoner.certain_answers(&q).unwrap() else {
            return Ok(());
        };
        let genuine: BTreeSet<Vec<Term>> = reasoner
            .explain(&q)
            .unwrap()
            .into_iter()
            .filter(|(_, v)| *v == Verdict::Genuine)
            .map(|(tau, _)| q.answer_vars().iter().map(|x| tau.apply(&Term::var(x))).collect())
            .collect();
        let answers: BTreeSet<Vec<Term>> =
            answers.into_iter().map(|t| t.into_iter().map(Term::Named).collect()).collect();
        prop_assert_eq!(answers, genuine);
    }

    #[test]
    fn expansion_is_monotone_in_depth(seed in any::<u64>(), depth in 0usize..4) {
        let program = xi_translate(&random_kb(&mut rng(seed)));
        let (Ok(small), Ok(large)) = (
            expand_bounded(&program, depth, SATURATION_FACTS),
            expand_bounded(&program, depth + 1, SATURATION_FACTS),
        ) else {
            return Ok(());
        };
        prop_assert!(small.facts().is_subset(&large.facts()));
        if small.saturated() {
            prop_assert_eq!(small.facts(), large.facts());
        }
    }

    #[test]
    fn stats_invariants(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kb = random_kb(&mut r);
        let q = random_query(&mut r, &kb);
        let reasoner = Reasoner::new(&kb, &Budget::default()).unwrap();
        let Some(st) = compute_stats(&reasoner) else { return Ok(()) };
        for p in [st.unary_aux_percent(), st.binary_aux_percent()] {
            prop_assert!((0.0..=100.0).contains(&p));
        }
        prop_assert!(st.aux_set <= st.aux_constants);
        let a = compute_answer_stats(&reasoner, &q).unwrap();
        prop_assert_eq!(a.by_reason.iter().sum::<usize>(), a.spurious);
        prop_assert!(a.spurious <= a.matches);
        prop_assert!(a.certain_answers <= a.matches - a.spurious);
    }

    #[test]
    fn generator_is_linear(scale in 1usize..6, seed in any::<u64>()) {
        prop_assert_eq!(generate_abox(scale, seed).len(), scale * generate_abox(1, seed).len());
    }

    /// A match rejected only because an answer variable hits a term equal
    /// to a named individual has a twin that uses the individual instead.
    #[test]
    fn rejected_answer_images_have_named_twins(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kb = random_kb(&mut r);
        let q = random_query(&mut r, &kb);
        let reasoner = Reasoner::new(&kb, &Budget::default()).unwrap();
        let model = reasoner.model();
        let named: Vec<Term> = kb.signature().individuals.iter().cloned().map(Term::Named).collect();
        for (tau, v) in reasoner.explain(&q).unwrap() {
            if v != Verdict::Spurious(SpuriousReason::AnswerNotNamed) {
                continue;
            }
            let mut pairs: Vec<(String, Term)> = tau.iter().map(|(x, t)| (x.to_string(), t.clone())).collect();
            let mut replaced = true;
            for (x, t) in pairs.iter_mut() {
                if !q.answer_vars().contains(x) || t.is_named() {
                    continue;
                }
                match named.iter().find(|c| model.entails_eq(t, c)) {
                    Some(c) => *t = c.clone(),
                    None => replaced = false,
                }
            }
            if replaced {
                let twin = Substitution::new(pairs);
                for a in q.atoms() {
                    prop_assert!(model.contains(&twin.apply_atom(a)), "{} under {}", a, twin);
                }
            }
        }
    }
}
