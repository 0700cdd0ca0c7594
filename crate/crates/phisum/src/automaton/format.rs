//! Line-oriented text format for automata.
//!
//! ```text
//! # comments run to end of line
//! state  <name>
//! symbol <name>
//! init   <state> <weight>
//! final  <state> <weight>
//! arc    <src> <dst> <symbol> <weight>
//! phi    <src> <dst> [<weight>]
//! ```
//!
//! Fields are whitespace-separated, directives may appear in any order, and
//! states/symbols are created on first mention; `state` and `symbol` lines
//! declare them explicitly, which fixes their ids and keeps isolated states
//! and unused alphabet symbols. Repeated `init`/`final` lines for one state
//! merge by semiring addition, exactly like parallel arcs. `phi` declares the
//! state's single fallback arc; a weight is optional, and the presence of any
//! weighted `phi` line switches the automaton into weighted-fallback mode.
//!
//! [`print_automaton`] emits a canonical form (state, symbol, init, final,
//! arc, phi blocks, each sorted by id) that reparses to an automaton with
//! identical ids and weights; printing is a fixed point of parse-then-print.

use thiserror::Error;

use crate::automaton::{Automaton, AutomatonBuilder, BuildError};
use crate::semiring::{Semiring, WeightParseError};

/// A defect in automaton text, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: unknown directive {directive:?}")]
    UnknownDirective { line: usize, directive: String },
    #[error("line {line}: {directive} expects {expected} fields, got {got}")]
    WrongArity {
        line: usize,
        directive: &'static str,
        expected: &'static str,
        got: usize,
    },
    #[error("line {line}: {source}")]
    BadWeight {
        line: usize,
        #[source]
        source: WeightParseError,
    },
    #[error("line {line}: {source}")]
    Structure {
        line: usize,
        #[source]
        source: BuildError,
    },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::UnknownDirective { line, .. }
            | ParseError::WrongArity { line, .. }
            | ParseError::BadWeight { line, .. }
            | ParseError::Structure { line, .. } => *line,
        }
    }
}

fn parse_weight<W: Semiring>(line: usize, token: &str) -> Result<W, ParseError> {
    W::parse_token(token).map_err(|source| ParseError::BadWeight { line, source })
}

/// Parses automaton text into weights of `W`.
pub fn parse_automaton<W: Semiring>(text: &str) -> Result<Automaton<W>, ParseError> {
    let mut b = AutomatonBuilder::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        let Some(&directive) = fields.first() else {
            continue;
        };
        let arity =
            |name: &'static str, expected: &'static str, ok: bool| -> Result<(), ParseError> {
                if ok {
                    Ok(())
                } else {
                    Err(ParseError::WrongArity {
                        line,
                        directive: name,
                        expected,
                        got: fields.len() - 1,
                    })
                }
            };
        match directive {
            "state" => {
                arity("state", "1", fields.len() == 2)?;
                b.state(fields[1]);
            }
            "symbol" => {
                arity("symbol", "1", fields.len() == 2)?;
                b.add_symbol(fields[1])
                    .map_err(|source| ParseError::Structure { line, source })?;
            }
            "init" => {
                arity("init", "2", fields.len() == 3)?;
                let w = parse_weight::<W>(line, fields[2])?;
                b.add_initial(fields[1], w);
            }
            "final" => {
                arity("final", "2", fields.len() == 3)?;
                let w = parse_weight::<W>(line, fields[2])?;
                b.add_final(fields[1], w);
            }
            "arc" => {
                arity("arc", "4", fields.len() == 5)?;
                let w = parse_weight::<W>(line, fields[4])?;
                b.add_arc(fields[1], fields[2], fields[3], w)
                    .map_err(|source| ParseError::Structure { line, source })?;
            }
            "phi" => {
                arity("phi", "2 or 3", fields.len() == 3 || fields.len() == 4)?;
                let w = match fields.get(3) {
                    Some(tok) => Some(parse_weight::<W>(line, tok)?),
                    None => None,
                };
                b.set_fallback(fields[1], fields[2], w)
                    .map_err(|source| ParseError::Structure { line, source })?;
            }
            other => {
                return Err(ParseError::UnknownDirective {
                    line,
                    directive: other.to_string(),
                })
            }
        }
    }
    Ok(b.build())
}

/// Canonical text form: state, symbol, init, final, arc, phi blocks, each
/// ascending by id.
pub fn print_automaton<W: Semiring>(a: &Automaton<W>) -> String {
    let mut out = String::new();
    for q in 0..a.n_states() {
        out.push_str(&format!("state {}\n", a.state_name(q)));
    }
    for s in 0..a.n_symbols() {
        out.push_str(&format!("symbol {}\n", a.symbol_name(s)));
    }
    for q in 0..a.n_states() {
        let w = a.initial_weight(q);
        if !w.is_zero() {
            out.push_str(&format!("init {} {}\n", a.state_name(q), w));
        }
    }
    for q in 0..a.n_states() {
        let w = a.final_weight(q);
        if !w.is_zero() {
            out.push_str(&format!("final {} {}\n", a.state_name(q), w));
        }
    }
    for arc in a.arcs() {
        out.push_str(&format!(
            "arc {} {} {} {}\n",
            a.state_name(arc.src),
            a.state_name(arc.dst),
            a.symbol_name(arc.sym),
            arc.weight
        ));
    }
    for q in 0..a.n_states() {
        if let Some(fb) = a.fallback_of(q) {
            if a.weighted_fallbacks() {
                out.push_str(&format!(
                    "phi {} {} {}\n",
                    a.state_name(q),
                    a.state_name(fb.dst),
                    fb.weight
                ));
            } else {
                out.push_str(&format!(
                    "phi {} {}\n",
                    a.state_name(q),
                    a.state_name(fb.dst)
                ));
            }
        }
    }
    out
}
