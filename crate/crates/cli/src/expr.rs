//! Set-expression mini-language over regular subsets of the free
//! group. Prefix combinators with parenthesized arguments; word lists
//! inside a primitive are separated by `+` so commas stay reserved for
//! combinator arguments.
//!
//! ```text
//! expr     := F | word:LIST | cone:WORD | subgroup:LIST
//!           | transversal:LIST | unstable:LIST | singular:LIST
//!           | union(e, e) | inter(e, e) | diff(e, e)
//!           | concat(e, e) | closure(e) | complement(e)
//! LIST     := WORD (+ WORD)*
//! ```

use fgreg_core::transversal::SchreierTransversal;
use fgreg_core::{Alphabet, Error, ReducedAutomaton, Result, StallingsGraph, Word};

pub fn parse(input: &str, alphabet: Alphabet) -> Result<ReducedAutomaton> {
    let mut p = Parser {
        input: input.as_bytes(),
        pos: 0,
        alphabet,
    };
    let a = p.expr()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return Err(p.error("trailing input after expression"));
    }
    Ok(a)
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    alphabet: Alphabet,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.input.len()
            && (self.input[self.pos].is_ascii_alphanumeric() || self.input[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.input[start..self.pos]).into_owned()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.pos < self.input.len() && self.input[self.pos] == c {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    /// Raw token up to a delimiter, used for word payloads after ':'.
    fn payload(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.input.len()
            && !matches!(self.input[self.pos], b',' | b'(' | b')')
            && !self.input[self.pos].is_ascii_whitespace()
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.input[start..self.pos]).into_owned()
    }

    fn words(&mut self) -> Result<Vec<Word>> {
        let raw = self.payload();
        if raw.is_empty() {
            return Err(self.error("expected a word list"));
        }
        raw.split('+')
            .map(|w| self.alphabet.parse_word(w, true))
            .collect()
    }

    fn graph(&mut self) -> Result<StallingsGraph> {
        let gens = self.words()?;
        StallingsGraph::build(self.alphabet, &gens)
    }

    fn expr(&mut self) -> Result<ReducedAutomaton> {
        self.skip_ws();
        let head = self.ident();
        if head.is_empty() {
            return Err(self.error("expected an expression"));
        }
        let colon = self.pos < self.input.len() && self.input[self.pos] == b':';
        if colon {
            self.pos += 1;
        }
        match (head.as_str(), colon) {
            ("F", false) => Ok(ReducedAutomaton::universe(self.alphabet)),
            ("word", true) => Ok(ReducedAutomaton::finite(self.alphabet, &self.words()?)),
            ("cone", true) => {
                let words = self.words()?;
                if words.len() != 1 {
                    return Err(self.error("cone takes a single base word"));
                }
                Ok(ReducedAutomaton::cone(self.alphabet, &words[0]))
            }
            ("subgroup", true) => Ok(ReducedAutomaton::subgroup(&self.graph()?)),
            ("transversal", true) => {
                let t = SchreierTransversal::geodesic(self.graph()?);
                Ok(t.automaton().clone())
            }
            ("unstable", true) => {
                let t = SchreierTransversal::geodesic(self.graph()?);
                Ok(t.unstable_automaton())
            }
            ("singular", true) => {
                let t = SchreierTransversal::geodesic(self.graph()?);
                Ok(t.singular_automaton())
            }
            ("union", false) | ("inter", false) | ("diff", false) | ("concat", false) => {
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b')')?;
                Ok(match head.as_str() {
                    "union" => a.union(&b),
                    "inter" => a.intersection(&b),
                    "diff" => a.difference(&b),
                    _ => a.reduced_product(&b),
                })
            }
            ("closure", false) | ("complement", false) => {
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b')')?;
                Ok(if head == "closure" {
                    a.prefix_closure()
                } else {
                    a.complement_in_f()
                })
            }
            _ => Err(self.error(&format!("unknown expression head '{head}'"))),
        }
    }
}
