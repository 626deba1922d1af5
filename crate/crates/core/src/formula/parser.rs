use super::Formula;
use crate::error::{Error, Result};

/// Which operators the parser accepts and how many agents exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Syntax {
    pub agents: usize,
    pub allow_some: bool,
    pub allow_dist: bool,
}

impl Syntax {
    /// Knowledge operators only.
    pub fn basic(agents: usize) -> Self {
        Syntax {
            agents,
            allow_some: false,
            allow_dist: false,
        }
    }

    /// Every operator, including `S` and `D`.
    pub fn full(agents: usize) -> Self {
        Syntax {
            agents,
            allow_some: true,
            allow_dist: true,
        }
    }
}

/// Parses with every operator enabled.
pub fn parse(text: &str, n: usize) -> Result<Formula> {
    parse_with(text, Syntax::full(n))
}

pub fn parse_with(text: &str, syntax: Syntax) -> Result<Formula> {
    if syntax.agents == 0 {
        return Err(Error::NoAgents);
    }
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        syntax,
    };
    let f = parser.iff()?;
    if let Some((at, tok)) = parser.tokens.get(parser.pos) {
        return Err(syntax_error(*at, format!("unexpected {}", tok.describe())));
    }
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Not,
    And,
    Or,
    Implies,
    Iff,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    LParen,
    RParen,
    Some,
    Dist,
    Nat(usize),
    Atom(String),
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Nat(k) => format!("number {k}"),
            Token::Atom(a) => format!("atom `{a}`"),
            Token::Not => "`~`".into(),
            Token::And => "`&`".into(),
            Token::Or => "`|`".into(),
            Token::Implies => "`->`".into(),
            Token::Iff => "`<->`".into(),
            Token::LBracket => "`[`".into(),
            Token::RBracket => "`]`".into(),
            Token::LAngle => "`<`".into(),
            Token::RAngle => "`>`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Some => "`S`".into(),
            Token::Dist => "`D`".into(),
        }
    }
}

fn syntax_error(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => Token::Not,
            b'&' => Token::And,
            b'|' => Token::Or,
            b'[' => Token::LBracket,
            b']' => Token::RBracket,
            b'>' => Token::RAngle,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'S' => Token::Some,
            b'D' => Token::Dist,
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 1;
                    Token::Implies
                } else {
                    return Err(syntax_error(i, "expected `->`"));
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    i += 2;
                    Token::Iff
                } else {
                    Token::LAngle
                }
            }
            b'0'..=b'9' => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..=i];
                let k = digits
                    .parse()
                    .map_err(|_| syntax_error(start, format!("agent index `{digits}` too large")))?;
                Token::Nat(k)
            }
            b'a'..=b'z' => {
                while i + 1 < bytes.len() && matches!(bytes[i + 1], b'a'..=b'z' | b'0'..=b'9' | b'_') {
                    i += 1;
                }
                Token::Atom(text[start..=i].to_string())
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax_error(i, format!("unexpected character `{ch}`")));
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    syntax: Syntax,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(at, _)| *at)
    }

    fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Token) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected {}", tok.describe())))
        }
    }

    fn unexpected(&self, what: &str) -> Error {
        let found = self.peek().map_or_else(|| "end of input".to_string(), Token::describe);
        syntax_error(self.position(), format!("{what}, found {found}"))
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut lhs = self.implication()?;
        while self.eat(&Token::Iff) {
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Token::Implies) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Token::Or) {
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&Token::And) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn agent(&mut self) -> Result<usize> {
        match self.peek().cloned() {
            Some(Token::Nat(k)) => {
                if k == 0 || k > self.syntax.agents {
                    return Err(Error::AgentOutOfRange {
                        agent: k,
                        n: self.syntax.agents,
                    });
                }
                self.pos += 1;
                Ok(k)
            }
            _ => Err(self.unexpected("expected agent index")),
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        let at = self.position();
        let Some(tok) = self.peek().cloned() else {
            return Err(self.unexpected("expected formula"));
        };
        self.pos += 1;
        match tok {
            Token::Not => Ok(Formula::not(self.unary()?)),
            Token::LBracket => {
                let i = self.agent()?;
                self.expect(&Token::RBracket)?;
                Ok(Formula::knows(i, self.unary()?))
            }
            Token::LAngle => {
                let i = self.agent()?;
                self.expect(&Token::RAngle)?;
                Ok(Formula::possible(i, self.unary()?))
            }
            Token::Some => {
                if !self.syntax.allow_some {
                    return Err(syntax_error(at, "operator `S` is not enabled"));
                }
                Ok(Formula::somebody(self.unary()?))
            }
            Token::Dist => {
                if !self.syntax.allow_dist {
                    return Err(syntax_error(at, "operator `D` is not enabled"));
                }
                Ok(Formula::dist(self.unary()?))
            }
            Token::Atom(name) => Ok(Formula::Atom(name)),
            Token::LParen => {
                let f = self.iff()?;
                self.expect(&Token::RParen)?;
                Ok(f)
            }
            other => {
                self.pos -= 1;
                Err(syntax_error(
                    at,
                    format!("expected formula, found {}", other.describe()),
                ))
            }
        }
    }
}
