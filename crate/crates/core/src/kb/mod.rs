//! ELHO knowledge bases: normalized axioms, general concept inclusions that
//! still need normalization, ABox facts, and the signature they span.

mod normalize;
mod parser;

pub use normalize::normalize;
pub use parser::parse_kb;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Prefix of auxiliary constants `aux:<role>:<concept>`.
pub const AUX_PREFIX: &str = "aux:";
/// Prefix reserved for names minted by the library itself.
pub const FRESH_PREFIX: &str = "_:";
/// Prefix of concepts introduced by [`normalize`].
pub const FRESH_CONCEPT_PREFIX: &str = "_:norm";

const KEYWORDS: &[&str] = &[
    "SubClassOf",
    "SubRoleOf",
    "range",
    "and",
    "some",
    "Top",
    "Bot",
];

pub(crate) fn is_keyword(name: &str) -> bool {
    KEYWORDS.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("reserved prefix in name `{name}` at {line}:{column}")]
    ReservedPrefix {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("ABox predicate not in TBox: `{predicate}`{}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    AboxPredicateNotInTbox {
        predicate: String,
        line: Option<usize>,
    },
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("axiom `{0}` violates the normal-form side conditions")]
    InvalidAxiom(String),
}

/// A named individual.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Individual(String);

impl Individual {
    pub fn new(name: impl Into<String>) -> Self {
        Individual(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Individual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A role (binary predicate).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Role(String);

impl Role {
    pub fn new(name: impl Into<String>) -> Self {
        Role(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A unary predicate: an atomic concept or one of the two distinguished
/// predicates `Top` and `Bot`, which carry no built-in meaning.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Top,
    Bot,
    Atomic(String),
}

impl Concept {
    pub fn atomic(name: impl Into<String>) -> Self {
        Concept::Atomic(name.into())
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Concept::Atomic(_))
    }

    pub fn name(&self) -> &str {
        match self {
            Concept::Top => "Top",
            Concept::Bot => "Bot",
            Concept::Atomic(n) => n,
        }
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The eight normalized axiom shapes.
///
/// Concept slots accept atomic concepts and `Top`; only the superclass of
/// [`Axiom::ConceptSub`] may additionally be `Bot`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// `{a} ⊑ A`
    NominalSub {
        individual: Individual,
        sup: Concept,
    },
    /// `A ⊑ B`
    ConceptSub { sub: Concept, sup: Concept },
    /// `A ⊑ {a}`
    SubNominal {
        sub: Concept,
        individual: Individual,
    },
    /// `A1 ⊓ A2 ⊑ A`, stored with `left <= right`.
    ConjSub {
        left: Concept,
        right: Concept,
        sup: Concept,
    },
    /// `∃R.A1 ⊑ A`
    ExistsLhs {
        role: Role,
        filler: Concept,
        sup: Concept,
    },
    /// `A1 ⊑ ∃R.A`
    ExistsRhs {
        sub: Concept,
        role: Role,
        filler: Concept,
    },
    /// `R ⊑ S`
    RoleSub { sub: Role, sup: Role },
    /// `range(R, A)`
    Range { role: Role, concept: Concept },
}

impl Axiom {
    pub fn conj(a: Concept, b: Concept, sup: Concept) -> Self {
        let (left, right) = if a <= b { (a, b) } else { (b, a) };
        Axiom::ConjSub { left, right, sup }
    }

    /// Checks the side conditions on concept slots.
    pub fn is_well_formed(&self) -> bool {
        let plain = |c: &Concept| *c != Concept::Bot;
        match self {
            Axiom::NominalSub { sup, .. } => plain(sup),
            Axiom::ConceptSub { sub, .. } => plain(sub),
            Axiom::SubNominal { sub, .. } => plain(sub),
            Axiom::ConjSub { left, right, sup } => plain(left) && plain(right) && plain(sup),
            Axiom::ExistsLhs { filler, sup, .. } => plain(filler) && plain(sup),
            Axiom::ExistsRhs { sub, filler, .. } => plain(sub) && plain(filler),
            Axiom::RoleSub { .. } => true,
            Axiom::Range { concept, .. } => plain(concept),
        }
    }

    pub fn concepts(&self) -> Vec<&Concept> {
        match self {
            Axiom::NominalSub { sup, .. } => vec![sup],
            Axiom::ConceptSub { sub, sup } => vec![sub, sup],
            Axiom::SubNominal { sub, .. } => vec![sub],
            Axiom::ConjSub { left, right, sup } => vec![left, right, sup],
            Axiom::ExistsLhs { filler, sup, .. } => vec![filler, sup],
            Axiom::ExistsRhs { sub, filler, .. } => vec![sub, filler],
            Axiom::RoleSub { .. } => vec![],
            Axiom::Range { concept, .. } => vec![concept],
        }
    }

    pub fn roles(&self) -> Vec<&Role> {
        match self {
            Axiom::ExistsLhs { role, .. }
            | Axiom::ExistsRhs { role, .. }
            | Axiom::Range { role, .. } => vec![role],
            Axiom::RoleSub { sub, sup } => vec![sub, sup],
            _ => vec![],
        }
    }

    pub fn individuals(&self) -> Vec<&Individual> {
        match self {
            Axiom::NominalSub { individual, .. } | Axiom::SubNominal { individual, .. } => {
                vec![individual]
            }
            _ => vec![],
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::NominalSub { individual, sup } => write!(f, "{{{individual}}} SubClassOf {sup}"),
            Axiom::ConceptSub { sub, sup } => write!(f, "{sub} SubClassOf {sup}"),
            Axiom::SubNominal { sub, individual } => write!(f, "{sub} SubClassOf {{{individual}}}"),
            Axiom::ConjSub { left, right, sup } => write!(f, "{left} and {right} SubClassOf {sup}"),
            Axiom::ExistsLhs { role, filler, sup } => {
                write!(f, "some {role} {filler} SubClassOf {sup}")
            }
            Axiom::ExistsRhs { sub, role, filler } => {
                write!(f, "{sub} SubClassOf some {role} {filler}")
            }
            Axiom::RoleSub { sub, sup } => write!(f, "{sub} SubRoleOf {sup}"),
            Axiom::Range { role, concept } => write!(f, "range {role} {concept}"),
        }
    }
}

/// Concept expressions accepted in general axioms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConceptExpr {
    Top,
    Bot,
    Atomic(String),
    Nominal(Individual),
    And(Box<ConceptExpr>, Box<ConceptExpr>),
    Exists(Role, Box<ConceptExpr>),
}

impl ConceptExpr {
    pub fn and(a: ConceptExpr, b: ConceptExpr) -> Self {
        ConceptExpr::And(Box::new(a), Box::new(b))
    }

    pub fn exists(role: Role, filler: ConceptExpr) -> Self {
        ConceptExpr::Exists(role, Box::new(filler))
    }

    /// The expression as a normal-form concept slot (atomic or `Top`).
    pub(crate) fn as_plain(&self) -> Option<Concept> {
        match self {
            ConceptExpr::Top => Some(Concept::Top),
            ConceptExpr::Atomic(n) => Some(Concept::Atomic(n.clone())),
            _ => None,
        }
    }

    fn collect(&self, sig: &mut Signature) {
        match self {
            ConceptExpr::Top | ConceptExpr::Bot => {}
            ConceptExpr::Atomic(n) => {
                sig.concepts.insert(n.clone());
            }
            ConceptExpr::Nominal(a) => {
                sig.individuals.insert(a.clone());
            }
            ConceptExpr::And(a, b) => {
                a.collect(sig);
                b.collect(sig);
            }
            ConceptExpr::Exists(r, e) => {
                sig.roles.insert(r.clone());
                e.collect(sig);
            }
        }
    }
}

impl From<&Concept> for ConceptExpr {
    fn from(c: &Concept) -> Self {
        match c {
            Concept::Top => ConceptExpr::Top,
            Concept::Bot => ConceptExpr::Bot,
            Concept::Atomic(n) => ConceptExpr::Atomic(n.clone()),
        }
    }
}

impl fmt::Display for ConceptExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConceptExpr::Top => f.write_str("Top"),
            ConceptExpr::Bot => f.write_str("Bot"),
            ConceptExpr::Atomic(n) => f.write_str(n),
            ConceptExpr::Nominal(a) => write!(f, "{{{a}}}"),
            ConceptExpr::And(a, b) => {
                let wrap =
                    |e: &ConceptExpr| matches!(e, ConceptExpr::And(..) | ConceptExpr::Exists(..));
                if wrap(a) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                f.write_str(" and ")?;
                if wrap(b) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            ConceptExpr::Exists(r, e) => match **e {
                ConceptExpr::And(..) | ConceptExpr::Exists(..) => write!(f, "some {r} ({e})"),
                _ => write!(f, "some {r} {e}"),
            },
        }
    }
}

/// An axiom outside the normal form, kept until [`normalize`] runs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneralAxiom {
    SubClassOf { sub: ConceptExpr, sup: ConceptExpr },
    Range { role: Role, filler: ConceptExpr },
}

impl GeneralAxiom {
    /// Recognises the axiom as one of the normalized shapes, if it is one.
    pub fn as_normalized(&self) -> Option<Axiom> {
        use ConceptExpr as E;
        let ax = match self {
            GeneralAxiom::Range { role, filler } => Axiom::Range {
                role: role.clone(),
                concept: filler.as_plain()?,
            },
            GeneralAxiom::SubClassOf { sub, sup } => match (sub, sup) {
                (E::Nominal(a), _) => Axiom::NominalSub {
                    individual: a.clone(),
                    sup: sup.as_plain()?,
                },
                (_, E::Nominal(a)) => Axiom::SubNominal {
                    sub: sub.as_plain()?,
                    individual: a.clone(),
                },
                (E::And(l, r), _) => Axiom::conj(l.as_plain()?, r.as_plain()?, sup.as_plain()?),
                (E::Exists(role, filler), _) => Axiom::ExistsLhs {
                    role: role.clone(),
                    filler: filler.as_plain()?,
                    sup: sup.as_plain()?,
                },
                (_, E::Exists(role, filler)) => Axiom::ExistsRhs {
                    sub: sub.as_plain()?,
                    role: role.clone(),
                    filler: filler.as_plain()?,
                },
                (_, E::Bot) => Axiom::ConceptSub {
                    sub: sub.as_plain()?,
                    sup: Concept::Bot,
                },
                _ => Axiom::ConceptSub {
                    sub: sub.as_plain()?,
                    sup: sup.as_plain()?,
                },
            },
        };
        Some(ax)
    }
}

impl fmt::Display for GeneralAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneralAxiom::SubClassOf { sub, sup } => write!(f, "{sub} SubClassOf {sup}"),
            GeneralAxiom::Range { role, filler } => match filler {
                ConceptExpr::Top | ConceptExpr::Bot | ConceptExpr::Atomic(_) => {
                    write!(f, "range {role} {filler}")
                }
                _ => write!(f, "range {role} ({filler})"),
            },
        }
    }
}

/// An ABox fact over named individuals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AboxFact {
    Concept(Concept, Individual),
    Role(Role, Individual, Individual),
}

impl fmt::Display for AboxFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AboxFact::Concept(c, a) => write!(f, "{c}({a})."),
            AboxFact::Role(r, a, b) => write!(f, "{r}({a},{b})."),
        }
    }
}

/// Names mentioned anywhere in a knowledge base. `Top` and `Bot` are not
/// members of `concepts`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<Role>,
    pub individuals: BTreeSet<Individual>,
}

impl Signature {
    fn add_concept(&mut self, c: &Concept) {
        if let Concept::Atomic(n) = c {
            self.concepts.insert(n.clone());
        }
    }

    fn add_axiom(&mut self, ax: &Axiom) {
        for c in ax.concepts() {
            self.add_concept(c);
        }
        self.roles.extend(ax.roles().into_iter().cloned());
        self.individuals
            .extend(ax.individuals().into_iter().cloned());
    }

    fn add_general(&mut self, ax: &GeneralAxiom) {
        match ax {
            GeneralAxiom::SubClassOf { sub, sup } => {
                sub.collect(self);
                sup.collect(self);
            }
            GeneralAxiom::Range { role, filler } => {
                self.roles.insert(role.clone());
                filler.collect(self);
            }
        }
    }
}

/// An ELHO knowledge base. Immutable once constructed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    tbox: BTreeSet<Axiom>,
    general: BTreeSet<GeneralAxiom>,
    abox: BTreeSet<AboxFact>,
    signature: Signature,
}

impl KnowledgeBase {
    /// Builds a validated knowledge base.
    ///
    /// General axioms that already have a normalized shape are stored as
    /// such.
    pub fn new(
        tbox: impl IntoIterator<Item = Axiom>,
        general: impl IntoIterator<Item = GeneralAxiom>,
        abox: impl IntoIterator<Item = AboxFact>,
    ) -> Result<Self, KbError> {
        let mut tbox: BTreeSet<Axiom> = tbox.into_iter().collect();
        let mut rest = BTreeSet::new();
        for g in general {
            match g.as_normalized() {
                Some(ax) => {
                    tbox.insert(ax);
                }
                None => {
                    rest.insert(g);
                }
            }
        }
        if let Some(bad) = tbox.iter().find(|a| !a.is_well_formed()) {
            return Err(KbError::InvalidAxiom(bad.to_string()));
        }
        let kb = Self::assemble(tbox, rest, abox.into_iter().collect());
        kb.validate()?;
        Ok(kb)
    }

    pub(crate) fn assemble(
        tbox: BTreeSet<Axiom>,
        general: BTreeSet<GeneralAxiom>,
        abox: BTreeSet<AboxFact>,
    ) -> Self {
        let mut signature = Signature::default();
        for ax in &tbox {
            signature.add_axiom(ax);
        }
        for ax in &general {
            signature.add_general(ax);
        }
        for fact in &abox {
            match fact {
                AboxFact::Concept(c, a) => {
                    signature.add_concept(c);
                    signature.individuals.insert(a.clone());
                }
                AboxFact::Role(r, a, b) => {
                    signature.roles.insert(r.clone());
                    signature.individuals.insert(a.clone());
                    signature.individuals.insert(b.clone());
                }
            }
        }
        KnowledgeBase {
            tbox,
            general,
            abox,
            signature,
        }
    }

    fn validate(&self) -> Result<(), KbError> {
        let valid_name = |n: &str| !n.is_empty() && !n.chars().any(char::is_whitespace);
        for a in &self.signature.individuals {
            if !valid_name(a.as_str())
                || a.as_str().starts_with(AUX_PREFIX)
                || a.as_str().starts_with(FRESH_PREFIX)
            {
                return Err(KbError::InvalidName(a.to_string()));
            }
        }
        for n in self.signature.roles.iter().map(Role::as_str) {
            if !valid_name(n) {
                return Err(KbError::InvalidName(n.to_string()));
            }
        }
        for n in &self.signature.concepts {
            if !valid_name(n) || matches!(n.as_str(), "Top" | "Bot") {
                return Err(KbError::InvalidName(n.clone()));
            }
        }
        let (concepts, roles) = self.tbox_predicates();
        for fact in &self.abox {
            let missing = match fact {
                AboxFact::Concept(Concept::Atomic(n), _) => {
                    (!concepts.contains(n)).then(|| n.clone())
                }
                AboxFact::Concept(..) => None,
                AboxFact::Role(r, ..) => (!roles.contains(r)).then(|| r.to_string()),
            };
            if let Some(predicate) = missing {
                return Err(KbError::AboxPredicateNotInTbox {
                    predicate,
                    line: None,
                });
            }
        }
        Ok(())
    }

    /// Atomic concepts and roles occurring in the TBox (normalized and
    /// general axioms alike).
    pub fn tbox_predicates(&self) -> (BTreeSet<String>, BTreeSet<Role>) {
        let mut sig = Signature::default();
        for ax in &self.tbox {
            sig.add_axiom(ax);
        }
        for ax in &self.general {
            sig.add_general(ax);
        }
        (sig.concepts, sig.roles)
    }

    pub fn tbox(&self) -> &BTreeSet<Axiom> {
        &self.tbox
    }

    pub fn general_axioms(&self) -> &BTreeSet<GeneralAxiom> {
        &self.general
    }

    pub fn abox(&self) -> &BTreeSet<AboxFact> {
        &self.abox
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn is_normalized(&self) -> bool {
        self.general.is_empty()
    }

    /// The same TBox with a different ABox.
    pub fn with_abox(&self, abox: impl IntoIterator<Item = AboxFact>) -> Result<Self, KbError> {
        let kb = Self::assemble(
            self.tbox.clone(),
            self.general.clone(),
            abox.into_iter().collect(),
        );
        kb.validate()?;
        Ok(kb)
    }

    /// Renders the knowledge base in the text format accepted by
    /// [`parse_kb`]. Normalized KBs containing fresh concepts do not
    /// round-trip because those names are reserved.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for ax in &self.tbox {
            out.push_str(&ax.to_string());
            out.push('\n');
        }
        for ax in &self.general {
            out.push_str(&ax.to_string());
            out.push('\n');
        }
        for fact in &self.abox {
            out.push_str(&fact.to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_axiom_recognises_normal_shapes() {
        let g = GeneralAxiom::SubClassOf {
            sub: ConceptExpr::Atomic("KRC".into()),
            sup: ConceptExpr::exists(Role::new("taught"), ConceptExpr::Atomic("JProf".into())),
        };
        assert_eq!(
            g.as_normalized(),
            Some(Axiom::ExistsRhs {
                sub: Concept::atomic("KRC"),
                role: Role::new("taught"),
                filler: Concept::atomic("JProf"),
            })
        );
        let bot_filler = GeneralAxiom::SubClassOf {
            sub: ConceptExpr::Atomic("A".into()),
            sup: ConceptExpr::exists(Role::new("r"), ConceptExpr::Bot),
        };
        assert_eq!(bot_filler.as_normalized(), None);
    }

    #[test]
    fn conj_is_stored_in_canonical_order() {
        let a = Axiom::conj(
            Concept::atomic("B"),
            Concept::atomic("A"),
            Concept::atomic("C"),
        );
        let b = Axiom::conj(
            Concept::atomic("A"),
            Concept::atomic("B"),
            Concept::atomic("C"),
        );
        assert_eq!(a, b);
    }

    #[test]
    fn abox_predicates_must_occur_in_tbox() {
        let err = KnowledgeBase::new(
            [],
            [],
            [AboxFact::Concept(
                Concept::atomic("Q"),
                Individual::new("a"),
            )],
        )
        .unwrap_err();
        assert!(matches!(err, KbError::AboxPredicateNotInTbox { .. }));
        // Top and Bot are always available
        KnowledgeBase::new(
            [],
            [],
            [AboxFact::Concept(Concept::Top, Individual::new("a"))],
        )
        .unwrap();
    }

    #[test]
    fn bot_only_as_plain_superclass() {
        let bad = Axiom::ExistsRhs {
            sub: Concept::atomic("A"),
            role: Role::new("r"),
            filler: Concept::Bot,
        };
        assert!(!bad.is_well_formed());
        assert!(KnowledgeBase::new([bad], [], []).is_err());
        let good = Axiom::ConceptSub {
            sub: Concept::atomic("A"),
            sup: Concept::Bot,
        };
        assert!(good.is_well_formed());
    }

    #[test]
    fn aux_names_are_not_individuals() {
        let ax = Axiom::NominalSub {
            individual: Individual::new("aux:r:A"),
            sup: Concept::atomic("A"),
        };
        assert!(matches!(
            KnowledgeBase::new([ax], [], []),
            Err(KbError::InvalidName(_))
        ));
    }
}
