use std::collections::BTreeSet;

use elho::engine::{enumerate_matches, Budget, Substitution};
use elho::kb::{parse_kb, Concept, Individual, KnowledgeBase, Role};
use elho::query::{
    build_aux_graph, compute_sim, is_aux_cyclic, is_spurious, parse_query, CertainAnswers,
    Reasoner, Satisfiability, SpuriousReason, Verdict,
};
use elho::rewrite::{dat_translate, Term};
use elho::workbench::{compute_answer_stats, compute_stats};

const EXAMPLE1: &str = include_str!("../fixtures/example1.kb");
const EXAMPLE2: &str = include_str!("../fixtures/example2.kb");

fn example2() -> Reasoner {
    Reasoner::new(&parse_kb(EXAMPLE2).unwrap(), &Budget::default()).unwrap()
}

fn aux(role: &str, concept: &str) -> Term {
    Term::Aux(Role::new(role), Concept::atomic(concept))
}

fn subst(pairs: &[(&str, Term)]) -> Substitution {
    Substitution::new(
        pairs
            .iter()
            .map(|(v, t)| (v.to_string(), t.clone()))
            .collect(),
    )
}

#[test]
fn example1_dat_clauses() {
    let program = dat_translate(&parse_kb(EXAMPLE1).unwrap());
    let got: BTreeSet<String> = program.rules.iter().map(|c| c.to_string()).collect();
    let want: BTreeSet<String> = [
        "Course(?x) :- KRC(?x).",
        "Course(?x) :- taught(?x,?y).",
        "JProf(aux:taught:JProf) :- KRC(?x).",
        "KRC(kr).",
        "Prof(?y) :- taught(?x,?y).",
        "Prof(aux:advisor:Prof) :- Prof(?x).",
        "Prof(aux:taught:Prof) :- Course(?x).",
        "advisor(?x,aux:advisor:Prof) :- Prof(?x).",
        "eq(?x,john) :- JProf(?x).",
        "taught(?x,aux:taught:JProf) :- KRC(?x).",
        "taught(?x,aux:taught:Prof) :- Course(?x).",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(got, want);
    assert_eq!(program.top.len(), 8);
}

#[test]
fn example2_aux_set() {
    let r = example2();
    assert_eq!(r.satisfiability(), Satisfiability::Sat);
    let members: BTreeSet<Term> = r.aux_set().iter().cloned().collect();
    assert_eq!(
        members,
        [aux("advisor", "Prof"), aux("taught", "Prof")]
            .into_iter()
            .collect()
    );
    assert!(r
        .model()
        .entails_eq(&aux("taught", "JProf"), &Term::named("john")));
}

#[test]
fn example3_spurious_matches() {
    let r = example2();
    let cases = [
        (
            "q(x1,x2) :- taught(x1,x2).",
            subst(&[("x1", Term::named("kr")), ("x2", aux("taught", "Prof"))]),
            SpuriousReason::AnswerNotNamed,
        ),
        (
            "q(x1,x2) :- taught(x1,y1), taught(x2,y2), advisor(y1,y3), advisor(y2,y3).",
            subst(&[
                ("x1", Term::named("kr")),
                ("x2", Term::named("ai")),
                ("y1", aux("taught", "Prof")),
                ("y2", aux("taught", "Prof")),
                ("y3", aux("advisor", "Prof")),
            ]),
            SpuriousReason::UnentailedEquality,
        ),
        (
            "q() :- advisor(y,y).",
            subst(&[("y", aux("advisor", "Prof"))]),
            SpuriousReason::AuxCycle,
        ),
    ];
    for (text, tau, reason) in cases {
        let q = parse_query(text).unwrap();
        let matches = enumerate_matches(r.model(), q.atoms(), &q.variables()).unwrap();
        assert!(matches.contains(&tau), "{tau} not a match of {q}");
        assert_eq!(
            is_spurious(&q, r.model(), &tau, r.aux_set()),
            Verdict::Spurious(reason)
        );
    }
}

#[test]
fn example3_fork_rule_and_graph() {
    let r = example2();
    let q =
        parse_query("q(x1,x2) :- taught(x1,y1), taught(x2,y2), advisor(y1,y3), advisor(y2,y3).")
            .unwrap();
    let tau = subst(&[
        ("x1", Term::named("kr")),
        ("x2", Term::named("ai")),
        ("y1", aux("taught", "Prof")),
        ("y2", aux("taught", "Prof")),
        ("y3", aux("advisor", "Prof")),
    ]);
    let sim = compute_sim(&q, &tau, r.aux_set());
    assert!(sim.related(&Term::var("y1"), &Term::var("y2")));
    assert!(sim.related(&Term::var("x1"), &Term::var("x2")));
    assert_eq!(sim.representative(&Term::var("y2")), &Term::var("y1"));
    let g = build_aux_graph(&q, &tau, &sim, r.aux_set());
    assert_eq!(
        g.vertices,
        [Term::var("y1"), Term::var("y3")].into_iter().collect()
    );
    assert_eq!(
        g.edges,
        [(Term::var("y1"), Term::var("y3"))].into_iter().collect()
    );
    assert!(!is_aux_cyclic(&g));

    let q3 = parse_query("q() :- advisor(y,y).").unwrap();
    let tau3 = subst(&[("y", aux("advisor", "Prof"))]);
    let g3 = build_aux_graph(
        &q3,
        &tau3,
        &compute_sim(&q3, &tau3, r.aux_set()),
        r.aux_set(),
    );
    assert_eq!(
        g3.edges,
        [(Term::var("y"), Term::var("y"))].into_iter().collect()
    );
    assert!(is_aux_cyclic(&g3));
}

#[test]
fn genuine_match_for_john() {
    let r = example2();
    let q = parse_query("q(x1,x2) :- taught(x1,x2).").unwrap();
    let tau = subst(&[("x1", Term::named("kr")), ("x2", Term::named("john"))]);
    assert_eq!(
        is_spurious(&q, r.model(), &tau, r.aux_set()),
        Verdict::Genuine
    );
}

#[test]
fn certain_answer_fixtures() {
    let r = example2();
    let q1 = parse_query("q(x1,x2) :- taught(x1,x2).").unwrap();
    let want: BTreeSet<Vec<Individual>> = [vec![Individual::new("kr"), Individual::new("john")]]
        .into_iter()
        .collect();
    assert_eq!(
        r.certain_answers(&q1).unwrap(),
        CertainAnswers::Answers(want)
    );
    let q3 = parse_query("q() :- advisor(y,y).").unwrap();
    let ans = r.certain_answers(&q3).unwrap();
    assert!(!ans.holds());
    let q2 =
        parse_query("q(x1,x2) :- taught(x1,y1), taught(x2,y2), advisor(y1,y3), advisor(y2,y3).")
            .unwrap();
    let CertainAnswers::Answers(a2) = r.certain_answers(&q2).unwrap() else {
        panic!("satisfiable")
    };
    assert!(a2.contains(&vec![Individual::new("kr"), Individual::new("kr")]));
    assert!(a2.contains(&vec![Individual::new("ai"), Individual::new("ai")]));
    assert!(!a2.contains(&vec![Individual::new("kr"), Individual::new("ai")]));
}

fn unsat_kb() -> KnowledgeBase {
    parse_kb(include_str!("../fixtures/unsat_example.kb")).unwrap()
}

#[test]
fn unsatisfiable_fixtures() {
    let r = Reasoner::new(&unsat_kb(), &Budget::default()).unwrap();
    assert_eq!(r.satisfiability(), Satisfiability::Unsat);
    let q = parse_query("q(x) :- A(x).").unwrap();
    assert_eq!(
        r.certain_answers(&q).unwrap(),
        CertainAnswers::Unsatisfiable
    );
    let simple = parse_kb("A SubClassOf Bot\nA(a).").unwrap();
    assert_eq!(
        elho::query::check_satisfiability(&simple, &Budget::default()).unwrap(),
        Satisfiability::Unsat
    );
}

#[test]
fn unknown_query_predicate_has_no_answers() {
    let r = example2();
    let q = parse_query("q(x) :- Dean(x).").unwrap();
    assert_eq!(
        r.certain_answers(&q).unwrap(),
        CertainAnswers::Answers(BTreeSet::new())
    );
}

#[test]
fn example2_materialisation_stats() {
    let r = example2();
    let st = compute_stats(&r).unwrap();
    assert_eq!(st.aux_constants, 3);
    assert_eq!(st.aux_set, 2);
    assert!(st.growth() > 1.0);
    assert!((0.0..=100.0).contains(&st.unary_aux_percent()));
    assert!(st.to_machine().contains("aux_set=2\n"));
}

#[test]
fn kb_without_existentials_has_no_aux_constants() {
    let kb = parse_kb("A SubClassOf B\nr SubRoleOf s\nA(a).\nr(a,b).\n").unwrap();
    let r = Reasoner::new(&kb, &Budget::default()).unwrap();
    let st = compute_stats(&r).unwrap();
    assert_eq!((st.aux_constants, st.aux_set), (0, 0));
    assert_eq!(st.unary_aux_percent(), 0.0);
    assert_eq!(st.binary_aux_percent(), 0.0);
}

#[test]
fn answer_stats_for_example3_queries() {
    let r = example2();
    let st =
        compute_answer_stats(&r, &parse_query(include_str!("../fixtures/q3.cq")).unwrap()).unwrap();
    assert_eq!(st.certain_answers, 0);
    assert_eq!(st.spurious, st.matches);
    assert_eq!(st.by_reason[2], st.spurious);
    let st =
        compute_answer_stats(&r, &parse_query(include_str!("../fixtures/q1.cq")).unwrap()).unwrap();
    assert_eq!(st.certain_answers, 1);
    assert!(st.certain_answers <= st.matches - st.spurious);
    assert_eq!(st.by_reason.iter().sum::<usize>(), st.spurious);
}

#[test]
fn unsat_kb_has_no_stats() {
    let r = Reasoner::new(&unsat_kb(), &Budget::default()).unwrap();
    assert!(compute_stats(&r).is_none());
}
