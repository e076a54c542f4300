//! Structural repair of model-emitted token sequences.
//!
//! [`repair`] is total: any token list comes back as a sequence that
//! [`delinearize`](crate::linearize::delinearize) accepts. Valid input is
//! returned unchanged, so repair is idempotent.
//!
//! Fixes, applied in one left-to-right pass that reaches the fixpoint:
//!
//! 1. unmatched `)` (and anything else outside the root node) is dropped;
//! 2. a relation with no usable value is removed together with that value
//!    (dangling relations, references to undefined variables, and
//!    bare tokens in relation position are removed as invalid segments);
//! 3. a node whose `(` lacks a variable or concept gets `amr-unknown`
//!    (and a fresh variable token);
//! 4. missing `)` are appended;
//! 5. variable tokens are renumbered 0..n-1 in definition order.
//!
//! Input without any `(` becomes `( <V0> amr-empty )`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::linearize::{classify, var_token, LinearSeq, TokenClass, CLOSE, OPEN};

pub const UNKNOWN_CONCEPT: &str = "amr-unknown";
pub const EMPTY_CONCEPT: &str = "amr-empty";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairReport {
    pub parens_added: usize,
    pub parens_dropped: usize,
    pub segments_removed: usize,
    pub concepts_inserted: usize,
    pub variables_inserted: usize,
    pub variables_renumbered: usize,
    pub fallback: bool,
}

impl RepairReport {
    pub fn is_clean(&self) -> bool {
        *self == RepairReport::default()
    }

    pub fn merge(&mut self, other: &RepairReport) {
        self.parens_added += other.parens_added;
        self.parens_dropped += other.parens_dropped;
        self.segments_removed += other.segments_removed;
        self.concepts_inserted += other.concepts_inserted;
        self.variables_inserted += other.variables_inserted;
        self.variables_renumbered += other.variables_renumbered;
        self.fallback |= other.fallback;
    }
}

pub fn repair<S: AsRef<str>>(tokens: &[S]) -> LinearSeq {
    repair_pass_report(tokens).0
}

pub fn repair_pass_report<S: AsRef<str>>(tokens: &[S]) -> (LinearSeq, RepairReport) {
    let toks: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
    let classes: Vec<TokenClass> = toks.iter().map(|t| classify(t)).collect();
    let mut r = Repairer { toks: &toks, classes: &classes, pos: 0, out: Vec::new(), vars: HashMap::new(), next_var: 0, report: RepairReport::default() };

    while r.pos < toks.len() && classes[r.pos] != TokenClass::Open {
        r.drop_outside();
    }
    if r.pos == toks.len() {
        r.report.fallback = true;
        let out = [OPEN, "<V0>", EMPTY_CONCEPT, CLOSE].map(String::from).to_vec();
        return (LinearSeq::new(out), r.report);
    }
    r.node(true);
    while r.pos < toks.len() {
        r.drop_outside();
    }
    (LinearSeq::new(r.out), r.report)
}

struct Repairer<'a> {
    toks: &'a [&'a str],
    classes: &'a [TokenClass],
    pos: usize,
    out: Vec<String>,
    /// Input variable index -> output index, for the latest definition.
    vars: HashMap<usize, usize>,
    next_var: usize,
    report: RepairReport,
}

impl Repairer<'_> {
    fn class(&self) -> Option<TokenClass> {
        self.classes.get(self.pos).copied()
    }

    fn drop_outside(&mut self) {
        match self.classes[self.pos] {
            TokenClass::Open | TokenClass::Close => self.report.parens_dropped += 1,
            _ => self.report.segments_removed += 1,
        }
        self.pos += 1;
    }

    fn emit(&mut self, keep: bool, tok: impl Into<String>) {
        if keep {
            self.out.push(tok.into());
        }
    }

    /// Parses a node starting at `(`. With `keep == false` the subtree is
    /// consumed without output and its variables are not registered.
    fn node(&mut self, keep: bool) {
        debug_assert_eq!(self.class(), Some(TokenClass::Open));
        self.pos += 1;
        self.emit(keep, OPEN);

        match self.class() {
            Some(TokenClass::Var(n)) => {
                let fresh = self.next_var;
                if keep {
                    self.next_var += 1;
                    self.vars.insert(n, fresh);
                    if n != fresh {
                        self.report.variables_renumbered += 1;
                    }
                }
                self.emit(keep, var_token(fresh));
                self.pos += 1;
            }
            _ => {
                if keep {
                    self.report.variables_inserted += 1;
                    let fresh = self.next_var;
                    self.next_var += 1;
                    self.out.push(var_token(fresh));
                }
            }
        }

        if self.class() == Some(TokenClass::Literal) {
            let concept = self.toks[self.pos];
            self.emit(keep, concept);
            self.pos += 1;
        } else {
            if keep {
                self.report.concepts_inserted += 1;
            }
            self.emit(keep, UNKNOWN_CONCEPT);
        }

        loop {
            match self.class() {
                None => {
                    if keep {
                        self.report.parens_added += 1;
                    }
                    self.emit(keep, CLOSE);
                    return;
                }
                Some(TokenClass::Close) => {
                    self.pos += 1;
                    self.emit(keep, CLOSE);
                    return;
                }
                Some(TokenClass::Relation) => self.relation(keep),
                Some(TokenClass::Open) => {
                    // child without a relation: the whole subtree is one invalid segment
                    if keep {
                        self.report.segments_removed += 1;
                    }
                    self.node(false);
                }
                Some(_) => {
                    if keep {
                        self.report.segments_removed += 1;
                    }
                    self.pos += 1;
                }
            }
        }
    }

    fn relation(&mut self, keep: bool) {
        let label = self.toks[self.pos];
        self.pos += 1;
        match self.class() {
            Some(TokenClass::Open) => {
                self.emit(keep, label);
                self.node(keep);
            }
            Some(TokenClass::Literal) => {
                self.emit(keep, label);
                let lit = self.toks[self.pos];
                self.emit(keep, lit);
                self.pos += 1;
            }
            Some(TokenClass::Var(n)) => {
                self.pos += 1;
                match self.vars.get(&n).copied() {
                    Some(m) if keep => {
                        if m != n {
                            self.report.variables_renumbered += 1;
                        }
                        self.out.push(label.to_string());
                        self.out.push(var_token(m));
                    }
                    Some(_) => {}
                    None => {
                        if keep {
                            self.report.segments_removed += 1;
                        }
                    }
                }
            }
            _ => {
                if keep {
                    self.report.segments_removed += 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearize::delinearize;

    fn toks(s: &str) -> Vec<String> {
        LinearSeq::from_line(s).into_tokens()
    }

    fn fixed(s: &str) -> (String, RepairReport) {
        let (seq, rep) = repair_pass_report(&toks(s));
        assert!(delinearize(&seq).is_ok(), "repair produced invalid {seq}");
        (seq.to_string(), rep)
    }

    #[test]
    fn truncated_sequence_gets_closed() {
        let (s, r) = fixed("( <V0> want-01 :ARG0 ( <V1> boy");
        assert_eq!(s, "( <V0> want-01 :ARG0 ( <V1> boy ) )");
        assert_eq!(r, RepairReport { parens_added: 2, ..Default::default() });
    }

    #[test]
    fn valid_sequence_untouched() {
        let input = "( <V0> want-01 :ARG0 ( <V1> boy ) :ARG1 ( <V2> go-02 :ARG0 <V1> ) )";
        let (s, r) = fixed(input);
        assert_eq!(s, input);
        assert!(r.is_clean());
    }

    #[test]
    fn dangling_relation_removed() {
        let (s, r) = fixed("( <V0> want-01 :ARG0 :ARG1 ( <V1> boy ) )");
        assert_eq!(s, "( <V0> want-01 :ARG1 ( <V1> boy ) )");
        assert_eq!(r, RepairReport { segments_removed: 1, ..Default::default() });
    }

    #[test]
    fn empty_and_garbage_fall_back() {
        for input in ["", ":ARG0 boy ) )", "<V3>"] {
            let (s, r) = fixed(input);
            assert_eq!(s, "( <V0> amr-empty )");
            assert!(r.fallback);
        }
    }

    #[test]
    fn unmatched_close_and_trailing_roots_dropped() {
        let (s, r) = fixed(") ( <V0> cat ) ) ( <V1> dog )");
        assert_eq!(s, "( <V0> cat )");
        assert_eq!(r.parens_dropped, 4);
        assert_eq!(r.segments_removed, 2);
    }

    #[test]
    fn missing_concept_and_variable() {
        let (s, r) = fixed("( <V0> :ARG0 ( boy ) )");
        assert_eq!(s, "( <V0> amr-unknown :ARG0 ( <V1> boy ) )");
        assert_eq!(r.concepts_inserted, 1);
        assert_eq!(r.variables_inserted, 1);
        let (s, _) = fixed("( )");
        assert_eq!(s, "( <V0> amr-unknown )");
    }

    #[test]
    fn renumbering_and_undefined_references() {
        let (s, r) = fixed("( <V3> a :ARG0 ( <V7> b :ARG1 <V3> ) :ARG2 <V9> )");
        assert_eq!(s, "( <V0> a :ARG0 ( <V1> b :ARG1 <V0> ) )");
        assert_eq!(r.variables_renumbered, 3);
        assert_eq!(r.segments_removed, 1);
    }

    #[test]
    fn forward_reference_is_dropped() {
        let (s, _) = fixed("( <V0> a :ARG0 <V1> :ARG1 ( <V1> b ) )");
        assert_eq!(s, "( <V0> a :ARG1 ( <V1> b ) )");
    }

    #[test]
    fn unlabeled_subtree_is_removed_with_its_variables() {
        let (s, r) = fixed("( <V0> a ( <V1> b ) :ARG0 <V1> :ARG1 c )");
        assert_eq!(s, "( <V0> a :ARG1 c )");
        assert_eq!(r.segments_removed, 2);
    }

    #[test]
    fn duplicate_definition_gets_fresh_index() {
        let (s, _) = fixed("( <V0> a :ARG0 ( <V0> b ) :ARG1 <V0> )");
        assert_eq!(s, "( <V0> a :ARG0 ( <V1> b ) :ARG1 <V1> )");
    }

    #[test]
    fn idempotent_on_examples() {
        for input in ["( <V0> a :ARG0", "( ( ( :x", "( <V2> \"q r\" :op1 \"s\" ) )", "( <V0> a :ARG0 <V0> :mod"] {
            let once = repair(&toks(input));
            let twice = repair(once.tokens());
            assert_eq!(once, twice);
        }
    }
}
