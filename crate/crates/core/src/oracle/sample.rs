//! Random small knowledge bases and queries for the equivalence suites.
//!
//! Signatures are bounded (at most 5 concepts, 3 roles, 2 nominals, 6
//! individuals, 12 axioms) so that the oracle stays cheap.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{try_saturate, ExpansionModel};
use crate::kb::{
    AboxFact, Axiom, Concept, ConceptExpr, GeneralAxiom, Individual, KnowledgeBase, Role,
};
use crate::query::ConjunctiveQuery;
use crate::rewrite::{xi_translate, Atom, Term};

const CONCEPTS: [&str; 5] = ["A", "B", "C", "D", "E"];
const ROLES: [&str; 3] = ["r", "s", "t"];
const INDIVIDUALS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
const VARS: [&str; 5] = ["x1", "x2", "y1", "y2", "y3"];

/// Depth bound and fact budget for the saturation test of sampled KBs.
pub const SATURATION_DEPTH: usize = 8;
pub const SATURATION_FACTS: usize = 2_000;

struct Sig {
    concepts: Vec<Concept>,
    roles: Vec<Role>,
    individuals: Vec<Individual>,
    nominals: Vec<Individual>,
}

fn signature(rng: &mut impl Rng) -> Sig {
    let nc = rng.gen_range(1..=CONCEPTS.len());
    let nr = rng.gen_range(1..=ROLES.len());
    let ni = rng.gen_range(1..=INDIVIDUALS.len());
    let nn = rng.gen_range(0..=2usize.min(ni));
    let individuals: Vec<Individual> = INDIVIDUALS[..ni]
        .iter()
        .map(|&i| Individual::new(i))
        .collect();
    let nominals = individuals.choose_multiple(rng, nn).cloned().collect();
    Sig {
        concepts: CONCEPTS[..nc].iter().map(|&c| Concept::atomic(c)).collect(),
        roles: ROLES[..nr].iter().map(|&r| Role::new(r)).collect(),
        individuals,
        nominals,
    }
}

fn pick<T: Clone>(rng: &mut impl Rng, xs: &[T]) -> T {
    xs.choose(rng).expect("non-empty").clone()
}

fn concept_or_top(rng: &mut impl Rng, sig: &Sig, p_top: f64) -> Concept {
    if rng.gen_bool(p_top) {
        Concept::Top
    } else {
        pick(rng, &sig.concepts)
    }
}

fn random_axiom(rng: &mut impl Rng, sig: &Sig) -> Axiom {
    let has_nominals = !sig.nominals.is_empty();
    loop {
        let ax = match rng.gen_range(0..16) {
            0 if has_nominals => Axiom::NominalSub {
                individual: pick(rng, &sig.nominals),
                sup: pick(rng, &sig.concepts),
            },
            1..=3 => Axiom::ConceptSub {
                sub: concept_or_top(rng, sig, 0.1),
                sup: if rng.gen_bool(0.08) {
                    Concept::Bot
                } else {
                    pick(rng, &sig.concepts)
                },
            },
            4 if has_nominals => Axiom::SubNominal {
                sub: pick(rng, &sig.concepts),
                individual: pick(rng, &sig.nominals),
            },
            5 | 6 => Axiom::conj(
                concept_or_top(rng, sig, 0.1),
                pick(rng, &sig.concepts),
                pick(rng, &sig.concepts),
            ),
            7 | 8 => Axiom::ExistsLhs {
                role: pick(rng, &sig.roles),
                filler: concept_or_top(rng, sig, 0.2),
                sup: pick(rng, &sig.concepts),
            },
            9..=11 => Axiom::ExistsRhs {
                sub: pick(rng, &sig.concepts),
                role: pick(rng, &sig.roles),
                filler: concept_or_top(rng, sig, 0.1),
            },
            12 | 13 => Axiom::RoleSub {
                sub: pick(rng, &sig.roles),
                sup: pick(rng, &sig.roles),
            },
            14 | 15 => Axiom::Range {
                role: pick(rng, &sig.roles),
                concept: pick(rng, &sig.concepts),
            },
            _ => continue,
        };
        return ax;
    }
}

fn random_abox(rng: &mut impl Rng, sig: &Sig, tbox: &KnowledgeBase) -> Vec<AboxFact> {
    let (concepts, roles) = tbox.tbox_predicates();
    let concepts: Vec<Concept> = concepts.into_iter().map(Concept::Atomic).collect();
    let roles: Vec<Role> = roles.into_iter().collect();
    let n = rng.gen_range(1..=8);
    let mut out = Vec::new();
    for _ in 0..n {
        let use_role = !roles.is_empty() && (concepts.is_empty() || rng.gen_bool(0.4));
        if use_role {
            out.push(AboxFact::Role(
                pick(rng, &roles),
                pick(rng, &sig.individuals),
                pick(rng, &sig.individuals),
            ));
        } else if !concepts.is_empty() {
            out.push(AboxFact::Concept(
                pick(rng, &concepts),
                pick(rng, &sig.individuals),
            ));
        }
    }
    out
}

/// A random normalized KB.
pub fn random_kb(rng: &mut impl Rng) -> KnowledgeBase {
    let sig = signature(rng);
    let n = rng.gen_range(1..=12);
    let tbox: Vec<Axiom> = (0..n).map(|_| random_axiom(rng, &sig)).collect();
    let t = KnowledgeBase::new(tbox.clone(), [], []).expect("sampled axioms are well formed");
    let abox = random_abox(rng, &sig, &t);
    KnowledgeBase::new(tbox, [], abox).expect("sampled ABox uses TBox predicates")
}

fn random_expr(rng: &mut impl Rng, sig: &Sig, depth: usize) -> ConceptExpr {
    let leaf = depth == 0 || rng.gen_bool(0.4);
    if leaf {
        return match rng.gen_range(0..10) {
            0 => ConceptExpr::Top,
            1 if !sig.nominals.is_empty() => ConceptExpr::Nominal(pick(rng, &sig.nominals)),
            _ => ConceptExpr::Atomic(pick(rng, &sig.concepts).name().to_string()),
        };
    }
    if rng.gen_bool(0.5) {
        ConceptExpr::and(
            random_expr(rng, sig, depth - 1),
            random_expr(rng, sig, depth - 1),
        )
    } else {
        ConceptExpr::exists(pick(rng, &sig.roles), random_expr(rng, sig, depth - 1))
    }
}

/// A random KB whose axioms are mostly not in normal form.
pub fn random_general_kb(rng: &mut impl Rng) -> KnowledgeBase {
    let sig = signature(rng);
    let n = rng.gen_range(1..=6);
    let mut general = Vec::new();
    let mut tbox = Vec::new();
    for _ in 0..n {
        match rng.gen_range(0..10) {
            0 => tbox.push(Axiom::RoleSub {
                sub: pick(rng, &sig.roles),
                sup: pick(rng, &sig.roles),
            }),
            1 => general.push(GeneralAxiom::Range {
                role: pick(rng, &sig.roles),
                filler: random_expr(rng, &sig, 1),
            }),
            _ => general.push(GeneralAxiom::SubClassOf {
                sub: random_expr(rng, &sig, 2),
                sup: random_expr(rng, &sig, 2),
            }),
        }
    }
    let t = KnowledgeBase::new(tbox.clone(), general.clone(), []).expect("well formed");
    let abox = random_abox(rng, &sig, &t);
    KnowledgeBase::new(tbox, general, abox).expect("sampled ABox uses TBox predicates")
}

/// Rejection-samples KBs until one whose function-symbol expansion
/// saturates within [`SATURATION_DEPTH`] and [`SATURATION_FACTS`].
pub fn saturating_kb(rng: &mut impl Rng) -> (KnowledgeBase, ExpansionModel) {
    loop {
        let kb = random_kb(rng);
        if let Ok(Some(exp)) = try_saturate(&xi_translate(&kb), SATURATION_DEPTH, SATURATION_FACTS)
        {
            return (kb, exp);
        }
    }
}

/// A random CQ over the KB's signature with at most 4 atoms and 2 answer
/// variables. Some queries follow fork or cycle shapes, which exercise the
/// filter conditions.
pub fn random_query(rng: &mut impl Rng, kb: &KnowledgeBase) -> ConjunctiveQuery {
    let sig = kb.signature();
    let mut concepts: Vec<Concept> = sig
        .concepts
        .iter()
        .map(|c| Concept::atomic(c.as_str()))
        .collect();
    concepts.push(Concept::Top);
    let roles: Vec<Role> = sig.roles.iter().cloned().collect();
    let individuals: Vec<Individual> = sig.individuals.iter().cloned().collect();
    let v = |n: &str| Term::var(n);
    let shape = rng.gen_range(0..10);
    if !roles.is_empty() && shape < 2 {
        let atoms = vec![
            Atom::role(pick(rng, &roles), v("x1"), v("y1")),
            Atom::role(pick(rng, &roles), v("x2"), v("y2")),
            Atom::role(pick(rng, &roles), v("y1"), v("y3")),
            Atom::role(pick(rng, &roles), v("y2"), v("y3")),
        ];
        let answers = match rng.gen_range(0..3) {
            0 => vec![],
            1 => vec!["x1".to_string()],
            _ => vec!["x1".to_string(), "x2".to_string()],
        };
        return ConjunctiveQuery::new(answers, atoms).expect("fork query");
    }
    if !roles.is_empty() && shape < 3 {
        let mut atoms = if rng.gen_bool(0.5) {
            vec![Atom::role(pick(rng, &roles), v("y1"), v("y1"))]
        } else {
            vec![
                Atom::role(pick(rng, &roles), v("y1"), v("y2")),
                Atom::role(pick(rng, &roles), v("y2"), v("y1")),
            ]
        };
        let mut answers = vec![];
        if rng.gen_bool(0.5) {
            atoms.push(Atom::role(pick(rng, &roles), v("x1"), v("y1")));
            answers.push("x1".to_string());
        }
        return ConjunctiveQuery::new(answers, atoms).expect("cycle query");
    }
    let pool_size = rng.gen_range(1..=4);
    let pool: Vec<&str> = VARS.choose_multiple(rng, pool_size).copied().collect();
    let term = |rng: &mut dyn rand::RngCore| {
        if !individuals.is_empty() && rng.gen_bool(0.12) {
            Term::Named(individuals.choose(rng).expect("non-empty").clone())
        } else {
            v(pool.choose(rng).expect("non-empty"))
        }
    };
    let n = rng.gen_range(1..=4);
    let mut atoms = Vec::new();
    for _ in 0..n {
        if !roles.is_empty() && rng.gen_bool(0.55) {
            let r = pick(rng, &roles);
            let (s, t) = (term(rng), term(rng));
            atoms.push(Atom::role(r, s, t));
        } else {
            let c = pick(rng, &concepts);
            atoms.push(Atom::concept(c, term(rng)));
        }
    }
    let mut used: Vec<String> = Vec::new();
    for a in &atoms {
        for t in &a.args {
            if let Term::Var(x) = t {
                if !used.contains(x) {
                    used.push(x.clone());
                }
            }
        }
    }
    let k = rng.gen_range(0..=2usize.min(used.len()));
    let mut answers: Vec<String> = used.choose_multiple(rng, k).cloned().collect();
    answers.sort();
    ConjunctiveQuery::new(answers, atoms).expect("answer variables come from the body")
}
