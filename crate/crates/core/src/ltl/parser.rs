use std::collections::BTreeSet;

use super::Formula;
use crate::error::LtlError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    Eventually,
    Always,
    Until,
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::True => "`true`".into(),
        Tok::False => "`false`".into(),
        Tok::Not => "`!`".into(),
        Tok::And => "`&`".into(),
        Tok::Or => "`|`".into(),
        Tok::Implies => "`->`".into(),
        Tok::Next => "`X`".into(),
        Tok::Eventually => "`F`".into(),
        Tok::Always => "`G`".into(),
        Tok::Until => "`U`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::End => "end of input".into(),
    }
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '^'
}

/// Length in bytes of the identifier starting at the beginning of `s`, or 0.
/// Parentheses and commas are identifier characters only inside `{...}`.
fn scan_identifier(s: &str) -> usize {
    let mut chars = s.char_indices().peekable();
    match chars.peek() {
        Some(&(_, c)) if ident_start(c) => {}
        _ => return 0,
    }
    let mut depth = 0usize;
    let mut end = 0;
    for (i, c) in chars {
        let ok = if c == '{' {
            depth += 1;
            true
        } else if c == '}' {
            if depth == 0 {
                false
            } else {
                depth -= 1;
                true
            }
        } else if depth > 0 {
            ident_char(c) || c == '(' || c == ')' || c == ','
        } else {
            ident_char(c)
        };
        if !ok {
            break;
        }
        end = i + c.len_utf8();
    }
    if depth > 0 {
        // An unbalanced brace group is not part of the identifier.
        s[..end].find('{').unwrap_or(end)
    } else {
        end
    }
}

/// Whether `s` is a legal atom name (and not a keyword).
pub fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && scan_identifier(s) == s.len()
        && !matches!(s, "X" | "F" | "G" | "U" | "true" | "false")
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, LtlError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let (tok, len) = match c {
            '!' => (Tok::Not, 1),
            '&' => (Tok::And, 1),
            '|' => (Tok::Or, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '-' if rest.starts_with("->") => (Tok::Implies, 2),
            _ => {
                let len = scan_identifier(rest);
                if len == 0 {
                    return Err(LtlError::Syntax {
                        pos: i,
                        message: format!("unexpected character `{c}`"),
                    });
                }
                let tok = match &rest[..len] {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" => Tok::Next,
                    "F" => Tok::Eventually,
                    "G" => Tok::Always,
                    "U" => Tok::Until,
                    w => Tok::Ident(w.to_string()),
                };
                (tok, len)
            }
        };
        out.push((tok, i));
        i += len;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    ap: Option<&'a BTreeSet<String>>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> LtlError {
        LtlError::Syntax {
            pos: self.pos(),
            message: format!("expected {wanted}, found {}", describe(self.peek())),
        }
    }

    fn implies(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, LtlError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, LtlError> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, LtlError> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::Until {
            self.bump();
            let rhs = self.until()?;
            return Ok(Formula::until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, LtlError> {
        let wrap: fn(Formula) -> Formula = match self.peek() {
            Tok::Not => Formula::not,
            Tok::Next => Formula::next,
            Tok::Eventually => Formula::eventually,
            Tok::Always => Formula::always,
            _ => return self.primary(),
        };
        self.bump();
        Ok(wrap(self.unary()?))
    }

    fn primary(&mut self) -> Result<Formula, LtlError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) => {
                if let Some(ap) = self.ap {
                    if !ap.contains(&name) {
                        return Err(LtlError::UndeclaredAtom { name, pos });
                    }
                }
                self.bump();
                Ok(Formula::Atom(name))
            }
            Tok::LParen => {
                self.bump();
                let f = self.implies()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(f)
            }
            _ => Err(self.unexpected("a formula")),
        }
    }
}

fn parse(text: &str, ap: Option<&BTreeSet<String>>) -> Result<Formula, LtlError> {
    let mut p = Parser { toks: lex(text)?, at: 0, ap };
    let f = p.implies()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

/// Parse `text`, rejecting atoms outside `ap`. Error positions are byte offsets.
pub fn parse_ltl(text: &str, ap: &BTreeSet<String>) -> Result<Formula, LtlError> {
    parse(text, Some(ap))
}

/// Parse `text` accepting any atom name.
pub fn parse_ltl_any(text: &str) -> Result<Formula, LtlError> {
    parse(text, None)
}
