//! Lexer and parser for rule files.
//!
//! ```text
//! # comment
//! output credit in {1, 2}
//! when savings > 500 and credit-history = Paid and employment > 2 -> 1
//! otherwise -> 2
//! ```
//!
//! Statements end at a newline or `;`. The `output` header and the `when`
//! keyword are optional. Values that are not plain words (for example `>45`
//! or anything with spaces) are written in double quotes.

use super::{CompareOp, Condition, Literal, Predicate, Rule, RuleSet};
use crate::error::{Error, Result};
use crate::Label;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    Op(CompareOp),
    Arrow,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Quoted(w) => format!("\"{w}\""),
            Tok::Op(op) => format!("`{op}`"),
            Tok::Arrow => "`->`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of statement".into(),
        }
    }
}

pub(super) fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '+' | '/' | '\'' | '&' | '?')
}

/// Splits the text into statements of tokens, each tagged with its line.
fn lex(text: &str) -> Result<Vec<(usize, Vec<Tok>)>> {
    let mut statements = Vec::new();
    let mut current: Vec<Tok> = Vec::new();
    let mut start_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |m: String| Error::RuleSyntax {
            line: line_no,
            message: m,
        };
        let chars: Vec<char> = raw.chars().collect();
        let mut k = 0;
        let mut flush = |current: &mut Vec<Tok>, start_line: &mut usize| {
            if !current.is_empty() {
                statements.push((*start_line, std::mem::take(current)));
            }
            *start_line = line_no;
        };
        flush(&mut current, &mut start_line);
        while k < chars.len() {
            let c = chars[k];
            let next = chars.get(k + 1).copied();
            match c {
                '#' => break,
                ';' => {
                    flush(&mut current, &mut start_line);
                    k += 1;
                }
                c if c.is_whitespace() => k += 1,
                '"' => {
                    let close = chars[k + 1..]
                        .iter()
                        .position(|&ch| ch == '"')
                        .ok_or_else(|| err("unterminated quoted value".into()))?;
                    current.push(Tok::Quoted(chars[k + 1..k + 1 + close].iter().collect()));
                    k += close + 2;
                }
                '-' if next == Some('>') => {
                    current.push(Tok::Arrow);
                    k += 2;
                }
                '→' => {
                    current.push(Tok::Arrow);
                    k += 1;
                }
                '<' | '>' => {
                    let eq = next == Some('=');
                    current.push(Tok::Op(match (c, eq) {
                        ('<', false) => CompareOp::Lt,
                        ('<', true) => CompareOp::Le,
                        ('>', false) => CompareOp::Gt,
                        _ => CompareOp::Ge,
                    }));
                    k += 1 + usize::from(eq);
                }
                '≤' => {
                    current.push(Tok::Op(CompareOp::Le));
                    k += 1;
                }
                '≥' => {
                    current.push(Tok::Op(CompareOp::Ge));
                    k += 1;
                }
                '=' => {
                    current.push(Tok::Op(CompareOp::Eq));
                    k += 1;
                }
                '[' | ']' | '{' | '}' | ',' => {
                    current.push(match c {
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        _ => Tok::Comma,
                    });
                    k += 1;
                }
                c if is_word_char(c) => {
                    let mut end = k;
                    while end < chars.len()
                        && is_word_char(chars[end])
                        && !(chars[end] == '-' && chars.get(end + 1) == Some(&'>'))
                    {
                        end += 1;
                    }
                    current.push(Tok::Word(chars[k..end].iter().collect()));
                    k = end;
                }
                other => return Err(err(format!("unexpected character `{other}`"))),
            }
        }
    }
    if !current.is_empty() {
        statements.push((start_line, current));
    }
    Ok(statements)
}

struct Cursor<'a> {
    toks: &'a [Tok],
    pos: usize,
    line: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> &Tok {
        self.toks.get(self.pos).unwrap_or(&Tok::End)
    }

    fn next(&mut self) -> Tok {
        let t = self.peek().clone();
        self.pos += 1;
        t
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::RuleSyntax {
            line: self.line,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: &Tok) -> Result<()> {
        let got = self.next();
        if &got == want {
            Ok(())
        } else {
            Err(self.err(format!("expected {}, found {}", want.describe(), got.describe())))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w == kw)
    }

    fn name(&mut self, what: &str) -> Result<String> {
        match self.next() {
            Tok::Word(w) | Tok::Quoted(w) => Ok(w),
            other => Err(self.err(format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn literal(&mut self) -> Result<Literal> {
        match self.next() {
            Tok::Word(w) | Tok::Quoted(w) => Ok(Literal::new(w)),
            other => Err(self.err(format!("expected a value, found {}", other.describe()))),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let lit = self.literal()?;
        lit.number()
            .ok_or_else(|| self.err(format!("`{}` is not a number", lit.text())))
    }

    fn label(&mut self) -> Result<Label> {
        let lit = self.literal()?;
        match lit.number() {
            Some(v) if v.fract() == 0.0 => Ok(v as Label),
            _ => Err(self.err(format!("label `{}` is not an integer", lit.text()))),
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            Tok::End => Ok(()),
            other => Err(self.err(format!("unexpected {} after statement", other.describe()))),
        }
    }

    fn label_set(&mut self) -> Result<Vec<Label>> {
        self.expect(&Tok::LBrace)?;
        let mut out = vec![self.label()?];
        while self.peek() == &Tok::Comma {
            self.next();
            out.push(self.label()?);
        }
        self.expect(&Tok::RBrace)?;
        Ok(out)
    }

    fn condition(&mut self) -> Result<Condition> {
        let column = self.name("a column name")?;
        let predicate = match self.next() {
            Tok::Op(op) => Predicate::Compare(op, self.literal()?),
            Tok::Word(w) if w == "in" => match self.peek() {
                Tok::LBracket => {
                    self.next();
                    let lo = self.number()?;
                    self.expect(&Tok::Comma)?;
                    let hi = self.number()?;
                    self.expect(&Tok::RBracket)?;
                    if lo > hi {
                        return Err(self.err(format!("empty range [{lo}, {hi}]")));
                    }
                    Predicate::Range(lo, hi)
                }
                Tok::LBrace => {
                    self.next();
                    let mut values = vec![self.literal()?];
                    while self.peek() == &Tok::Comma {
                        self.next();
                        values.push(self.literal()?);
                    }
                    self.expect(&Tok::RBrace)?;
                    Predicate::Set(values)
                }
                other => {
                    return Err(self.err(format!(
                        "expected `[` or `{{` after `in`, found {}",
                        other.describe()
                    )))
                }
            },
            other => {
                return Err(self.err(format!(
                    "expected an operator after `{column}`, found {}",
                    other.describe()
                )))
            }
        };
        Ok(Condition { column, predicate })
    }
}

pub(super) fn parse(text: &str) -> Result<RuleSet> {
    let mut output = None;
    let mut rules = Vec::new();
    let mut default = None;
    for (line, toks) in lex(text)? {
        let mut c = Cursor {
            toks: &toks,
            pos: 0,
            line,
        };
        if default.is_some() {
            return Err(c.err("statement after `otherwise`"));
        }
        if c.is_keyword("output") {
            if output.is_some() || !rules.is_empty() {
                return Err(c.err("`output` must appear once, before the rules"));
            }
            c.next();
            let name = c.name("an output name")?;
            if !c.is_keyword("in") {
                return Err(c.err("expected `in` after the output name"));
            }
            c.next();
            let domain = c.label_set()?;
            c.finish()?;
            output = Some((name, domain));
            continue;
        }
        if c.is_keyword("otherwise") {
            c.next();
            c.expect(&Tok::Arrow)?;
            let label = c.label()?;
            c.finish()?;
            default = Some((line, label));
            continue;
        }
        if c.is_keyword("when") {
            c.next();
        }
        let mut conditions = vec![c.condition()?];
        while c.is_keyword("and") || c.peek() == &Tok::Comma {
            c.next();
            conditions.push(c.condition()?);
        }
        c.expect(&Tok::Arrow)?;
        let label = c.label()?;
        c.finish()?;
        rules.push((line, Rule { conditions, label }));
    }
    let (default_line, default) = default.ok_or(Error::MissingDefault)?;
    if let Some((_, domain)) = &output {
        let labelled = rules.iter().map(|(l, r)| (*l, r.label));
        for (line, label) in labelled.chain(std::iter::once((default_line, default))) {
            if !domain.contains(&label) {
                return Err(Error::RuleSyntax {
                    line,
                    message: format!("label {label} is not in the declared output domain"),
                });
            }
        }
    }
    Ok(RuleSet::from_parts(
        output,
        rules.into_iter().map(|(_, r)| r).collect(),
        default,
    ))
}
