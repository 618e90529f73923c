//! Boolean network model, the `.bn` text format and influence-graph derivation.
//!
//! A `.bn` document is a list of `NAME = EXPR` lines. `#` starts a comment,
//! blank lines are skipped and declaration order fixes variable indices.
//! Expressions use `!`, `&`, `|`, `0`, `1`, parentheses and variable names,
//! with precedence `!` > `&` > `|`. Names may be referenced before they are
//! declared.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::state::{IndexSet, State};

/// Default cap on the number of variables (2^24 explicit states).
pub const DEFAULT_MAX_VARS: usize = 24;

/// Largest syntactic support whose truth table we are willing to enumerate.
pub const MAX_SUPPORT: usize = 20;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BoolExpr {
    Const(bool),
    /// 0-based variable position.
    Var(usize),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn eval(&self, s: State) -> bool {
        match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Var(i) => s.get(*i),
            BoolExpr::Not(e) => !e.eval(s),
            BoolExpr::And(a, b) => a.eval(s) && b.eval(s),
            BoolExpr::Or(a, b) => a.eval(s) || b.eval(s),
        }
    }

    /// Variables occurring anywhere in the tree.
    pub fn syntactic_support(&self) -> IndexSet {
        match self {
            BoolExpr::Const(_) => IndexSet::EMPTY,
            BoolExpr::Var(i) => IndexSet::singleton(*i),
            BoolExpr::Not(e) => e.syntactic_support(),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                a.syntactic_support().union(b.syntactic_support())
            }
        }
    }

    /// Prints the tree with the minimal parentheses the precedence rules need.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        self.render_into(names, 0, &mut out);
        out
    }

    // Precedence levels: 0 = or, 1 = and, 2 = unary/atom.
    fn render_into(&self, names: &[String], parent: u8, out: &mut String) {
        match self {
            BoolExpr::Const(b) => out.push(if *b { '1' } else { '0' }),
            BoolExpr::Var(i) => out.push_str(&names[*i]),
            BoolExpr::Not(e) => {
                out.push('!');
                e.render_into(names, 2, out);
            }
            BoolExpr::And(a, b) => {
                let wrap = parent > 1;
                if wrap {
                    out.push('(');
                }
                a.render_into(names, 1, out);
                out.push_str(" & ");
                b.render_into(names, 2, out);
                if wrap {
                    out.push(')');
                }
            }
            BoolExpr::Or(a, b) => {
                let wrap = parent > 0;
                if wrap {
                    out.push('(');
                }
                a.render_into(names, 0, out);
                out.push_str(" | ");
                b.render_into(names, 1, out);
                if wrap {
                    out.push(')');
                }
            }
        }
    }
}

/// How regulator edges of the influence graph are derived.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Dependency {
    /// `x_j` regulates `x_i` iff some pair of states differing only in `x_j`
    /// evaluates `f_i` differently.
    #[default]
    Semantic,
    /// Every variable mentioned in `f_i` regulates `x_i`.
    Syntactic,
}

#[derive(Clone, Copy, Debug)]
pub struct ParseOptions {
    pub max_vars: usize,
    pub dependency: Dependency,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            max_vars: DEFAULT_MAX_VARS,
            dependency: Dependency::Semantic,
        }
    }
}

/// Truth table of one update function over its regulators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruthTable {
    /// Regulator positions; row bit `k` is the value of `inputs[k]`.
    pub inputs: Vec<usize>,
    rows: Vec<u64>,
}

impl TruthTable {
    fn from_fn(inputs: Vec<usize>, f: impl Fn(u32) -> bool) -> TruthTable {
        let size = 1usize << inputs.len();
        let mut rows = vec![0u64; size.div_ceil(64)];
        for r in 0..size {
            if f(r as u32) {
                rows[r >> 6] |= 1 << (r & 63);
            }
        }
        TruthTable { inputs, rows }
    }

    #[inline]
    pub fn row(&self, r: u32) -> bool {
        let r = r as usize;
        (self.rows[r >> 6] >> (r & 63)) & 1 == 1
    }

    /// Evaluates the table at a global state.
    #[inline]
    pub fn eval(&self, s: State) -> bool {
        let mut r = 0u32;
        for (k, &i) in self.inputs.iter().enumerate() {
            r |= ((s.0 >> i) & 1) << k;
        }
        self.row(r)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BooleanNetwork {
    names: Vec<String>,
    functions: Vec<BoolExpr>,
    regulators: Vec<IndexSet>,
    tables: Vec<TruthTable>,
}

/// Variables in the semantic support of `f`, found by cofactor comparison
/// over the syntactic variables of `f`.
pub fn semantic_support(f: &BoolExpr) -> Result<IndexSet> {
    let syntactic = f.syntactic_support();
    if syntactic.len() > MAX_SUPPORT {
        return Err(Error::SupportTooLarge {
            name: String::new(),
            size: syntactic.len(),
        });
    }
    let inputs: Vec<usize> = syntactic.positions().collect();
    let table = TruthTable::from_fn(inputs.clone(), |r| f.eval(spread(r, &inputs)));
    let mut support = IndexSet::EMPTY;
    for (k, &var) in inputs.iter().enumerate() {
        let bit = 1u32 << k;
        if (0..(1u32 << inputs.len()))
            .filter(|r| r & bit == 0)
            .any(|r| table.row(r) != table.row(r | bit))
        {
            support.insert(var);
        }
    }
    Ok(support)
}

// Places row bits onto the global positions listed in `inputs`.
fn spread(row: u32, inputs: &[usize]) -> State {
    let mut s = 0u32;
    for (k, &i) in inputs.iter().enumerate() {
        s |= ((row >> k) & 1) << i;
    }
    State(s)
}

impl BooleanNetwork {
    /// Builds a network from names and expression trees.
    pub fn new(
        names: Vec<String>,
        functions: Vec<BoolExpr>,
        options: ParseOptions,
    ) -> Result<BooleanNetwork> {
        if names.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        let cap = options.max_vars.min(crate::state::MAX_WIDTH);
        if names.len() > cap {
            return Err(Error::TooManyVariables {
                n: names.len(),
                cap,
            });
        }
        assert_eq!(names.len(), functions.len());
        let mut regulators = Vec::with_capacity(names.len());
        let mut tables = Vec::with_capacity(names.len());
        for (i, f) in functions.iter().enumerate() {
            let support = match options.dependency {
                Dependency::Semantic => semantic_support(f).map_err(|e| match e {
                    Error::SupportTooLarge { size, .. } => Error::SupportTooLarge {
                        name: names[i].clone(),
                        size,
                    },
                    other => other,
                })?,
                Dependency::Syntactic => f.syntactic_support(),
            };
            let inputs: Vec<usize> = support.positions().collect();
            tables.push(TruthTable::from_fn(inputs.clone(), |r| {
                f.eval(spread(r, &inputs))
            }));
            regulators.push(support);
        }
        Ok(BooleanNetwork {
            names,
            functions,
            regulators,
            tables,
        })
    }

    pub fn parse(text: &str) -> Result<BooleanNetwork> {
        parse_network(text, ParseOptions::default())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn function(&self, i: usize) -> &BoolExpr {
        &self.functions[i]
    }

    pub fn functions(&self) -> &[BoolExpr] {
        &self.functions
    }

    /// Compiled truth table of `f_i` over its regulators.
    pub fn table(&self, i: usize) -> &TruthTable {
        &self.tables[i]
    }

    /// `par(v_i)`: positions `j` with an edge `j -> i`.
    pub fn regulators(&self, i: usize) -> IndexSet {
        self.regulators[i]
    }

    /// Influence edges `(j, i)` (0-based), sorted.
    pub fn influence_edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .regulators
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.positions().map(move |j| (j, i)))
            .collect();
        edges.sort_unstable();
        edges
    }

    /// Value of `f_i` at `s`, evaluated on the expression tree.
    pub fn eval(&self, i: usize, s: State) -> bool {
        self.functions[i].eval(s)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Serializes back to the `.bn` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, f) in self.names.iter().zip(&self.functions) {
            out.push_str(name);
            out.push_str(" = ");
            out.push_str(&f.render(&self.names));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for BooleanNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses a `.bn` document.
pub fn parse_network(text: &str, options: ParseOptions) -> Result<BooleanNetwork> {
    struct Decl<'t> {
        line: usize,
        expr_col: usize,
        expr: &'t str,
    }
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut decls = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(Error::Syntax {
                line,
                column: content.len() - content.trim_start().len() + 1,
                message: "expected `NAME = EXPR`".into(),
            });
        };
        let lhs = &content[..eq];
        let name = lhs.trim();
        let name_col = lhs.len() - lhs.trim_start().len() + 1;
        if !is_identifier(name) {
            return Err(Error::Syntax {
                line,
                column: name_col,
                message: format!("invalid variable name `{name}`"),
            });
        }
        if index.contains_key(name) {
            return Err(Error::DuplicateVariable {
                name: name.to_string(),
                line,
            });
        }
        index.insert(name.to_string(), names.len());
        names.push(name.to_string());
        decls.push(Decl {
            line,
            expr_col: eq + 2,
            expr: &content[eq + 1..],
        });
    }

    if names.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    let cap = options.max_vars.min(crate::state::MAX_WIDTH);
    if names.len() > cap {
        return Err(Error::TooManyVariables {
            n: names.len(),
            cap,
        });
    }

    let mut functions = Vec::with_capacity(decls.len());
    for d in &decls {
        let mut parser = ExprParser {
            src: d.expr.as_bytes(),
            pos: 0,
            line: d.line,
            col0: d.expr_col,
            index: &index,
        };
        let e = parser.or()?;
        parser.skip_ws();
        if parser.pos < parser.src.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        functions.push(e);
    }
    BooleanNetwork::new(names, functions, options)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col0: usize,
    index: &'a HashMap<String, usize>,
}

impl ExprParser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.col0 + self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn or(&mut self) -> Result<BoolExpr> {
        let mut lhs = self.and()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            let rhs = self.and()?;
            lhs = BoolExpr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<BoolExpr> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = BoolExpr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<BoolExpr> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Ok(BoolExpr::Not(Box::new(self.unary()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.or()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'0') => {
                self.pos += 1;
                Ok(BoolExpr::Const(false))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(BoolExpr::Const(true))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match self.index.get(name) {
                    Some(&i) => Ok(BoolExpr::Var(i)),
                    None => Err(Error::UndeclaredVariable {
                        name: name.to_string(),
                        line: self.line,
                        column: self.col0 + start,
                    }),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const EXAMPLE: &str =
        "x1 = !x2 | (x1 & x2)\nx2 = x1 & x2\nx3 = x4 | (!x2 & x3)\nx4 = !x3 & x4\n";

    fn bits(s: &str) -> State {
        State::parse_bits(s).unwrap()
    }

    #[test]
    fn parses_the_four_variable_example() {
        let bn = BooleanNetwork::parse(EXAMPLE).unwrap();
        assert_eq!(bn.len(), 4);
        let edges: Vec<(usize, usize)> = bn
            .influence_edges()
            .into_iter()
            .map(|(j, i)| (j + 1, i + 1))
            .collect();
        let mut expected = vec![
            (2, 1),
            (1, 1),
            (1, 2),
            (2, 2),
            (4, 3),
            (2, 3),
            (3, 3),
            (3, 4),
            (4, 4),
        ];
        expected.sort();
        assert_eq!(edges, expected);
    }

    #[test]
    fn identity_has_a_single_self_edge() {
        let bn = BooleanNetwork::parse("a = a").unwrap();
        assert_eq!(bn.len(), 1);
        assert_eq!(bn.influence_edges(), vec![(0, 0)]);
    }

    #[test]
    fn contradiction_has_no_semantic_regulators() {
        let bn = BooleanNetwork::parse("a = b & !b\nb = a").unwrap();
        assert_eq!(bn.influence_edges(), vec![(0, 1)]);
        let syn = parse_network(
            "a = b & !b\nb = a",
            ParseOptions {
                dependency: Dependency::Syntactic,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(syn.influence_edges(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn evaluation_examples() {
        let bn = BooleanNetwork::parse(EXAMPLE).unwrap();
        assert!(bn.eval(2, bits("0101")));
        assert!(bn.eval(0, bits("1100")));
        assert!(!BoolExpr::Const(false).eval(bits("1111")));
        for code in 0..16 {
            let s = State(code);
            for i in 0..4 {
                assert_eq!(bn.eval(i, s), bn.table(i).eval(s));
            }
        }
    }

    #[test]
    fn semantic_support_examples() {
        let bn = BooleanNetwork::parse(EXAMPLE).unwrap();
        assert_eq!(
            semantic_support(bn.function(2)).unwrap(),
            IndexSet::from_one_based([2, 3, 4])
        );
        assert_eq!(
            semantic_support(bn.function(0)).unwrap(),
            IndexSet::from_one_based([1, 2])
        );
        let contra = BoolExpr::And(
            Box::new(BoolExpr::Var(0)),
            Box::new(BoolExpr::Not(Box::new(BoolExpr::Var(0)))),
        );
        assert_eq!(semantic_support(&contra).unwrap(), IndexSet::EMPTY);
    }

    #[test]
    fn oversized_support_is_refused() {
        let names: Vec<String> = (0..21).map(|i| format!("v{i}")).collect();
        let body = names.join(" & ");
        let text: String = names.iter().map(|n| format!("{n} = {body}\n")).collect();
        let err = parse_network(
            &text,
            ParseOptions {
                max_vars: 30,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::SupportTooLarge { size: 21, .. }));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            BooleanNetwork::parse("a = a &"),
            Err(Error::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            BooleanNetwork::parse("a = a\na = 1"),
            Err(Error::DuplicateVariable { line: 2, .. })
        ));
        assert!(matches!(
            BooleanNetwork::parse("# comment\n\na = b"),
            Err(Error::UndeclaredVariable {
                line: 3,
                column: 5,
                ..
            })
        ));
        assert!(matches!(
            BooleanNetwork::parse("a = (a | 1"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            BooleanNetwork::parse("1a = 1"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            BooleanNetwork::parse("  # nothing"),
            Err(Error::EmptyNetwork)
        ));
        let many: String = (0..25).map(|i| format!("v{i} = 1\n")).collect();
        assert!(matches!(
            BooleanNetwork::parse(&many),
            Err(Error::TooManyVariables { n: 25, cap: 24 })
        ));
    }

    #[test]
    fn precedence_is_not_and_or() {
        let bn = BooleanNetwork::parse("a = !a | b & c\nb = b\nc = c").unwrap();
        // !a | (b & c)
        assert!(bn.eval(0, bits("000")));
        assert!(!bn.eval(0, bits("110")));
        assert!(bn.eval(0, bits("111")));
    }

    #[test]
    fn rendering_keeps_needed_parentheses() {
        let bn = BooleanNetwork::parse(EXAMPLE).unwrap();
        assert_eq!(
            bn.to_text(),
            "x1 = !x2 | x1 & x2\nx2 = x1 & x2\nx3 = x4 | !x2 & x3\nx4 = !x3 & x4\n"
        );
        let nested = BooleanNetwork::parse("a = !(a | b) & (b | 0)\nb = a & (b & a)").unwrap();
        let again = BooleanNetwork::parse(&nested.to_text()).unwrap();
        assert_eq!(nested, again);
    }
}
