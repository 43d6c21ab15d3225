//! Line-oriented text format for knowledge bases.
//!
//! ```text
//! # comment
//! KRC SubClassOf some taught JProf
//! some taught Top SubClassOf Course
//! JProf SubClassOf {john}
//! taught SubRoleOf involves
//! range taught Prof
//! KRC(kr).  taught(kr,john).
//! ```

use std::collections::BTreeSet;

use super::{
    is_keyword, AboxFact, Concept, ConceptExpr, GeneralAxiom, Individual, KbError, KnowledgeBase,
    Role, AUX_PREFIX, FRESH_PREFIX,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Dot,
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub column: usize,
}

/// Splits one line into tokens. `#` starts a comment. Columns are 1-based.
pub(crate) fn tokenize(line: &str, line_no: usize) -> Result<Vec<Spanned>, KbError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let single = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, column });
            i += 1;
        } else if c == '#' {
            break;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == ':')
            {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word.starts_with(FRESH_PREFIX) || word.starts_with(AUX_PREFIX) {
                return Err(KbError::ReservedPrefix {
                    name: word,
                    line: line_no,
                    column,
                });
            }
            if c == '_' || word.contains(':') {
                return Err(KbError::Syntax {
                    line: line_no,
                    column,
                    message: format!("invalid identifier `{word}`"),
                });
            }
            out.push(Spanned {
                tok: Tok::Ident(word),
                column,
            });
        } else {
            return Err(KbError::Syntax {
                line: line_no,
                column,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    line_len: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn column(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|s| s.column)
            .unwrap_or(self.line_len + 1)
    }

    fn error(&self, message: impl Into<String>) -> KbError {
        KbError::Syntax {
            line: self.line,
            column: self.column(),
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), KbError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(w)) if w == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// A user name: an identifier that is not a keyword.
    fn name(&mut self, what: &str) -> Result<String, KbError> {
        match self.peek() {
            Some(Tok::Ident(w)) if !is_keyword(w) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expr(&mut self) -> Result<ConceptExpr, KbError> {
        let mut lhs = self.unary()?;
        while self.keyword("and") {
            let rhs = self.unary()?;
            lhs = ConceptExpr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ConceptExpr, KbError> {
        if self.keyword("some") {
            let role = Role::new(self.name("role name")?);
            let filler = self.unary()?;
            return Ok(ConceptExpr::exists(role, filler));
        }
        if self.keyword("Top") {
            return Ok(ConceptExpr::Top);
        }
        if self.keyword("Bot") {
            return Ok(ConceptExpr::Bot);
        }
        match self.peek() {
            Some(Tok::LBrace) => {
                self.pos += 1;
                let a = self.name("individual name")?;
                self.expect(Tok::RBrace, "`}`")?;
                Ok(ConceptExpr::Nominal(Individual::new(a)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Ok(ConceptExpr::Atomic(self.name("concept expression")?)),
        }
    }
}

enum Statement {
    Class(GeneralAxiom),
    RoleSub(Role, Role),
    Facts(Vec<AboxFact>),
}

fn statement(cur: &mut Cursor<'_>) -> Result<Statement, KbError> {
    let has_kw = |kw: &str| {
        cur.toks
            .iter()
            .any(|s| matches!(&s.tok, Tok::Ident(w) if w == kw))
    };
    if has_kw("SubRoleOf") {
        let sub = Role::new(cur.name("role name")?);
        if !cur.keyword("SubRoleOf") {
            return Err(cur.error("expected `SubRoleOf`"));
        }
        let sup = Role::new(cur.name("role name")?);
        return Ok(Statement::RoleSub(sub, sup));
    }
    if cur.keyword("range") {
        let role = Role::new(cur.name("role name")?);
        let filler = cur.expr()?;
        return Ok(Statement::Class(GeneralAxiom::Range { role, filler }));
    }
    if has_kw("SubClassOf") {
        let sub = cur.expr()?;
        if !cur.keyword("SubClassOf") {
            return Err(cur.error("expected `SubClassOf`"));
        }
        let sup = cur.expr()?;
        return Ok(Statement::Class(GeneralAxiom::SubClassOf { sub, sup }));
    }
    let mut facts = Vec::new();
    while !cur.at_end() {
        let pred = match cur.peek() {
            Some(Tok::Ident(w)) if w == "Top" || w == "Bot" || !is_keyword(w) => w.clone(),
            _ => return Err(cur.error("expected axiom or fact")),
        };
        cur.pos += 1;
        cur.expect(Tok::LParen, "`(`")?;
        let a = Individual::new(cur.name("individual name")?);
        let fact = if cur.peek() == Some(&Tok::Comma) {
            cur.pos += 1;
            let b = Individual::new(cur.name("individual name")?);
            if pred == "Top" || pred == "Bot" {
                return Err(cur.error(format!("`{pred}` is unary")));
            }
            AboxFact::Role(Role::new(pred), a, b)
        } else {
            let c = match pred.as_str() {
                "Top" => Concept::Top,
                "Bot" => Concept::Bot,
                _ => Concept::Atomic(pred),
            };
            AboxFact::Concept(c, a)
        };
        cur.expect(Tok::RParen, "`)`")?;
        cur.expect(Tok::Dot, "`.`")?;
        facts.push(fact);
    }
    Ok(Statement::Facts(facts))
}

/// Parses a knowledge-base document. Axioms already in normal form are
/// stored as such; everything else is kept for [`super::normalize`].
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, KbError> {
    let mut tbox = BTreeSet::new();
    let mut general = BTreeSet::new();
    let mut facts: Vec<(AboxFact, usize)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokenize(line, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor {
            toks: &toks,
            pos: 0,
            line: line_no,
            line_len: line.chars().count(),
        };
        let stmt = statement(&mut cur)?;
        if !cur.at_end() {
            return Err(cur.error("unexpected trailing input"));
        }
        match stmt {
            Statement::Class(g) => match g.as_normalized() {
                Some(ax) => {
                    tbox.insert(ax);
                }
                None => {
                    general.insert(g);
                }
            },
            Statement::RoleSub(sub, sup) => {
                tbox.insert(super::Axiom::RoleSub { sub, sup });
            }
            Statement::Facts(fs) => facts.extend(fs.into_iter().map(|f| (f, line_no))),
        }
    }
    let kb = KnowledgeBase::assemble(tbox, general, BTreeSet::new());
    let (concepts, roles) = kb.tbox_predicates();
    for (fact, line) in &facts {
        let missing = match fact {
            AboxFact::Concept(Concept::Atomic(n), _) => (!concepts.contains(n)).then(|| n.clone()),
            AboxFact::Concept(..) => None,
            AboxFact::Role(r, ..) => (!roles.contains(r)).then(|| r.to_string()),
        };
        if let Some(predicate) = missing {
            return Err(KbError::AboxPredicateNotInTbox {
                predicate,
                line: Some(*line),
            });
        }
    }
    kb.with_abox(facts.into_iter().map(|(f, _)| f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::Axiom;

    fn c(n: &str) -> Concept {
        Concept::atomic(n)
    }

    #[test]
    fn parses_every_normal_form() {
        let kb = parse_kb(
            "{kr} SubClassOf KRC\n\
             KRC SubClassOf Course\n\
             JProf SubClassOf {john}\n\
             A and B SubClassOf C\n\
             some taught Top SubClassOf Course\n\
             KRC SubClassOf some taught JProf\n\
             taught SubRoleOf involves\n\
             range taught Prof\n\
             A SubClassOf Bot\n",
        )
        .unwrap();
        let expected: BTreeSet<Axiom> = [
            Axiom::NominalSub {
                individual: Individual::new("kr"),
                sup: c("KRC"),
            },
            Axiom::ConceptSub {
                sub: c("KRC"),
                sup: c("Course"),
            },
            Axiom::SubNominal {
                sub: c("JProf"),
                individual: Individual::new("john"),
            },
            Axiom::conj(c("A"), c("B"), c("C")),
            Axiom::ExistsLhs {
                role: Role::new("taught"),
                filler: Concept::Top,
                sup: c("Course"),
            },
            Axiom::ExistsRhs {
                sub: c("KRC"),
                role: Role::new("taught"),
                filler: c("JProf"),
            },
            Axiom::RoleSub {
                sub: Role::new("taught"),
                sup: Role::new("involves"),
            },
            Axiom::Range {
                role: Role::new("taught"),
                concept: c("Prof"),
            },
            Axiom::ConceptSub {
                sub: c("A"),
                sup: Concept::Bot,
            },
        ]
        .into_iter()
        .collect();
        assert_eq!(kb.tbox(), &expected);
        assert!(kb.is_normalized());
    }

    #[test]
    fn empty_document() {
        let kb = parse_kb("").unwrap();
        assert!(kb.tbox().is_empty() && kb.abox().is_empty());
        let kb = parse_kb("# only a comment\n\n   \n").unwrap();
        assert!(kb.tbox().is_empty());
    }

    #[test]
    fn abox_facts_and_dedup() {
        let kb = parse_kb("A SubClassOf some r B\nA(a). r(a,b).\nA(a).\nTop(c). Bot(d).").unwrap();
        assert_eq!(kb.abox().len(), 4);
        assert!(kb.abox().contains(&AboxFact::Role(
            Role::new("r"),
            Individual::new("a"),
            Individual::new("b")
        )));
        assert!(kb
            .abox()
            .contains(&AboxFact::Concept(Concept::Bot, Individual::new("d"))));
    }

    #[test]
    fn abox_predicate_must_be_in_tbox() {
        let err = parse_kb("A SubClassOf B\nQ(a).").unwrap_err();
        assert_eq!(
            err,
            KbError::AboxPredicateNotInTbox {
                predicate: "Q".into(),
                line: Some(2)
            }
        );
        // a concept name is not a role name
        assert!(parse_kb("A SubClassOf B\nA(a,b).").is_err());
    }

    #[test]
    fn reserved_prefixes_are_rejected() {
        assert!(matches!(
            parse_kb("{aux:r:A} SubClassOf A"),
            Err(KbError::ReservedPrefix {
                line: 1,
                column: 2,
                ..
            })
        ));
        assert!(matches!(
            parse_kb("A SubClassOf B\nA(_:x)."),
            Err(KbError::ReservedPrefix { line: 2, .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_kb("A SubClassOf\n") {
            Err(KbError::Syntax {
                line: 1,
                column: 13,
                ..
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_kb("A SubClassOf B\nA SubClassOf (B and C") {
            Err(KbError::Syntax { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_kb("A SubClassOf B $"),
            Err(KbError::Syntax { column: 16, .. })
        ));
        assert!(parse_kb("some SubClassOf B").is_err());
    }

    #[test]
    fn nested_expressions_become_general_axioms() {
        let kb = parse_kb("A SubClassOf some R (B and C)\nsome R (some S A) SubClassOf B").unwrap();
        assert!(kb.tbox().is_empty());
        assert_eq!(kb.general_axioms().len(), 2);
        let texts: Vec<String> = kb.general_axioms().iter().map(|g| g.to_string()).collect();
        assert!(texts.contains(&"A SubClassOf some R (B and C)".to_string()));
        assert!(texts.contains(&"some R (some S A) SubClassOf B".to_string()));
    }

    #[test]
    fn and_binds_looser_than_some() {
        let kb = parse_kb("some r A and B SubClassOf C").unwrap();
        let g = kb.general_axioms().iter().next().unwrap();
        assert_eq!(
            *g,
            GeneralAxiom::SubClassOf {
                sub: ConceptExpr::and(
                    ConceptExpr::exists(Role::new("r"), ConceptExpr::Atomic("A".into())),
                    ConceptExpr::Atomic("B".into())
                ),
                sup: ConceptExpr::Atomic("C".into()),
            }
        );
    }
}
