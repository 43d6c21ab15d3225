//! Structural normalization of general axioms into the eight normal forms.
//!
//! Nested subexpressions are replaced by fresh concepts `_:norm<k>`. On the
//! left-hand side a replaced expression `E` gets `E ⊑ X`, on the right-hand
//! side `X ⊑ E`, so every model of the input extends to a model of the
//! output by interpreting `X` as `E`.

use std::collections::BTreeSet;

use super::{Axiom, Concept, ConceptExpr, GeneralAxiom, KnowledgeBase, FRESH_CONCEPT_PREFIX};

struct Normalizer {
    out: BTreeSet<Axiom>,
    next: usize,
}

/// Nominals never denote the empty set, so only `Bot` and expressions that
/// require a `Bot` instance are equivalent to it.
fn is_bottom(e: &ConceptExpr) -> bool {
    match e {
        ConceptExpr::Bot => true,
        ConceptExpr::And(a, b) => is_bottom(a) || is_bottom(b),
        ConceptExpr::Exists(_, f) => is_bottom(f),
        _ => false,
    }
}

impl Normalizer {
    fn fresh(&mut self) -> Concept {
        let c = Concept::Atomic(format!("{FRESH_CONCEPT_PREFIX}{}", self.next));
        self.next += 1;
        c
    }

    fn push(&mut self, ax: Axiom) {
        self.out.insert(ax);
    }

    /// Concept slot for `e` occurring on a left-hand side.
    fn left_slot(&mut self, e: &ConceptExpr) -> Concept {
        if let Some(c) = e.as_plain() {
            return c;
        }
        let x = self.fresh();
        self.subsumption(e, &ConceptExpr::from(&x));
        x
    }

    /// Concept slot for `e` occurring on a right-hand side.
    fn right_slot(&mut self, e: &ConceptExpr) -> Concept {
        if let Some(c) = e.as_plain() {
            return c;
        }
        let x = self.fresh();
        self.subsumption(&ConceptExpr::from(&x), e);
        x
    }

    fn subsumption(&mut self, sub: &ConceptExpr, sup: &ConceptExpr) {
        use ConceptExpr as E;
        if is_bottom(sub) {
            return;
        }
        if let E::And(d1, d2) = sup {
            let lhs = match sub {
                E::Top | E::Atomic(_) | E::Nominal(_) => sub.clone(),
                _ => E::from(&self.left_slot(sub)),
            };
            self.subsumption(&lhs, d1);
            self.subsumption(&lhs, d2);
            return;
        }
        // `sup` is atomic, Top, Bot, a nominal or an existential from here on
        let plain_sup = sup.as_plain();
        match sub {
            E::Top | E::Atomic(_) => {
                let a = sub.as_plain().expect("plain");
                let ax = match sup {
                    E::Bot => Axiom::ConceptSub {
                        sub: a,
                        sup: Concept::Bot,
                    },
                    E::Nominal(i) => Axiom::SubNominal {
                        sub: a,
                        individual: i.clone(),
                    },
                    E::Exists(role, filler) => {
                        let filler = self.right_slot(filler);
                        Axiom::ExistsRhs {
                            sub: a,
                            role: role.clone(),
                            filler,
                        }
                    }
                    _ => Axiom::ConceptSub {
                        sub: a,
                        sup: plain_sup.expect("plain"),
                    },
                };
                self.push(ax);
            }
            E::Nominal(i) => match plain_sup {
                Some(b) => self.push(Axiom::NominalSub {
                    individual: i.clone(),
                    sup: b,
                }),
                None => {
                    let x = self.fresh();
                    self.push(Axiom::NominalSub {
                        individual: i.clone(),
                        sup: x.clone(),
                    });
                    self.subsumption(&E::from(&x), sup);
                }
            },
            E::And(c1, c2) => {
                let l = self.left_slot(c1);
                let r = self.left_slot(c2);
                match plain_sup {
                    Some(b) => self.push(Axiom::conj(l, r, b)),
                    None => {
                        let x = self.fresh();
                        self.push(Axiom::conj(l, r, x.clone()));
                        self.subsumption(&E::from(&x), sup);
                    }
                }
            }
            E::Exists(role, filler) => {
                let f = self.left_slot(filler);
                match plain_sup {
                    Some(b) => self.push(Axiom::ExistsLhs {
                        role: role.clone(),
                        filler: f,
                        sup: b,
                    }),
                    None => {
                        let x = self.fresh();
                        self.push(Axiom::ExistsLhs {
                            role: role.clone(),
                            filler: f,
                            sup: x.clone(),
                        });
                        self.subsumption(&E::from(&x), sup);
                    }
                }
            }
            E::Bot => unreachable!("bottom subclasses are dropped"),
        }
    }

    fn general(&mut self, ax: &GeneralAxiom) {
        match ax {
            GeneralAxiom::SubClassOf { sub, sup } => self.subsumption(sub, sup),
            GeneralAxiom::Range { role, filler } => {
                let concept = self.right_slot(filler);
                self.push(Axiom::Range {
                    role: role.clone(),
                    concept,
                });
            }
        }
    }
}

/// Rewrites every general axiom into normal-form axioms. Already normalized
/// knowledge bases are returned unchanged. Fresh concept numbering continues
/// after the largest `_:norm<k>` already present, so repeated runs are
/// deterministic.
pub fn normalize(kb: &KnowledgeBase) -> KnowledgeBase {
    if kb.is_normalized() {
        return kb.clone();
    }
    let next = kb
        .signature()
        .concepts
        .iter()
        .filter_map(|c| c.strip_prefix(FRESH_CONCEPT_PREFIX)?.parse::<usize>().ok())
        .map(|k| k + 1)
        .max()
        .unwrap_or(0);
    let mut n = Normalizer {
        out: kb.tbox().clone(),
        next,
    };
    for ax in kb.general_axioms() {
        n.general(ax);
    }
    KnowledgeBase::assemble(n.out, BTreeSet::new(), kb.abox().clone())
}
