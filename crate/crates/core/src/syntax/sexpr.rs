use crate::error::{Error, Result};

/// Source location (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Loc {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExpr {
    Atom(String, Loc),
    List(Vec<SExpr>, Loc),
}

impl SExpr {
    pub fn loc(&self) -> Loc {
        match self {
            SExpr::Atom(_, l) | SExpr::List(_, l) => *l,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(xs, _) => Some(xs),
            _ => None,
        }
    }
}

pub fn error_at(loc: Loc, msg: impl Into<String>) -> Error {
    Error::Parse {
        line: loc.line,
        col: loc.col,
        msg: msg.into(),
    }
}

/// Parse a sequence of s-expressions; `;` starts a line comment.
pub fn parse_all(src: &str) -> Result<Vec<SExpr>> {
    let mut stack: Vec<(Vec<SExpr>, Loc)> = Vec::new();
    let mut top = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let loc = Loc { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            ';' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
                continue;
            }
            '(' => {
                chars.next();
                stack.push((Vec::new(), loc));
            }
            ')' => {
                chars.next();
                let (items, start) = stack.pop().ok_or_else(|| error_at(loc, "unbalanced `)`"))?;
                let e = SExpr::List(items, start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(e),
                    None => top.push(e),
                }
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                    col += 1;
                }
                let e = SExpr::Atom(s, loc);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(e),
                    None => top.push(e),
                }
                continue;
            }
        }
        col += 1;
    }
    if let Some((_, start)) = stack.pop() {
        return Err(error_at(start, "unclosed `(`"));
    }
    Ok(top)
}

pub fn parse_one(src: &str) -> Result<SExpr> {
    let mut all = parse_all(src)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(error_at(Loc { line: 1, col: 1 }, "empty input")),
        _ => Err(error_at(all[1].loc(), "expected a single expression")),
    }
}
