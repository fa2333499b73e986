use std::sync::Arc;

use super::ast::SourcePos;
use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Magnitude of an integer literal; sign is handled by the parser.
    Int(u64),
    Str(String),
    // keywords
    Class,
    Var,
    Init,
    Pub,
    Fn,
    Let,
    If,
    Else,
    While,
    Return,
    Throw,
    New,
    True,
    False,
    Null,
    AssertThrows,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Dot,
    Arrow,
    Assign,
    PlusAssign,
    MinusAssign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Bang,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    AndAnd,
    OrOr,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Eof => "end of file".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Class => "class",
            Tok::Var => "var",
            Tok::Init => "init",
            Tok::Pub => "pub",
            Tok::Fn => "fn",
            Tok::Let => "let",
            Tok::If => "if",
            Tok::Else => "else",
            Tok::While => "while",
            Tok::Return => "return",
            Tok::Throw => "throw",
            Tok::New => "new",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Null => "null",
            Tok::AssertThrows => "assert_throws",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Arrow => "->",
            Tok::Assign => "=",
            Tok::PlusAssign => "+=",
            Tok::MinusAssign => "-=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::Bang => "!",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Ident(_) | Tok::Int(_) | Tok::Str(_) | Tok::Eof => "",
        }
    }
}

pub const KEYWORDS: [&str; 16] = [
    "class", "var", "init", "pub", "fn", "let", "if", "else", "while", "return", "throw", "new", "true", "false",
    "null", "assert_throws",
];

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "class" => Tok::Class,
        "var" => Tok::Var,
        "init" => Tok::Init,
        "pub" => Tok::Pub,
        "fn" => Tok::Fn,
        "let" => Tok::Let,
        "if" => Tok::If,
        "else" => Tok::Else,
        "while" => Tok::While,
        "return" => Tok::Return,
        "throw" => Tok::Throw,
        "new" => Tok::New,
        "true" => Tok::True,
        "false" => Tok::False,
        "null" => Tok::Null,
        "assert_throws" => Tok::AssertThrows,
        _ => return None,
    })
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: SourcePos,
    pub end: usize,
}

pub fn tokenize(source: &str, file: &Arc<str>) -> Result<Vec<Token>, ParseError> {
    Lexer { src: source, file: file.clone(), offset: 0, line: 1, col: 1 }.run()
}

struct Lexer<'s> {
    src: &'s str,
    file: Arc<str>,
    offset: usize,
    line: u32,
    col: u32,
}

impl Lexer<'_> {
    fn pos(&self) -> SourcePos {
        SourcePos::new(self.file.clone(), self.line, self.col, self.offset)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.offset..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, pos: SourcePos, message: impl Into<String>) -> ParseError {
        ParseError { pos, message: message.into() }
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let pos = self.pos();
            let Some(c) = self.bump() else {
                out.push(Token { tok: Tok::Eof, end: pos.byte_offset, pos });
                return Ok(out);
            };
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '.' => Tok::Dot,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '%' => Tok::Percent,
                '+' => self.either('=', Tok::PlusAssign, Tok::Plus),
                '-' => match self.peek() {
                    Some('>') => {
                        self.bump();
                        Tok::Arrow
                    }
                    Some('=') => {
                        self.bump();
                        Tok::MinusAssign
                    }
                    _ => Tok::Minus,
                },
                '=' => self.either('=', Tok::EqEq, Tok::Assign),
                '!' => self.either('=', Tok::Ne, Tok::Bang),
                '<' => self.either('=', Tok::Le, Tok::Lt),
                '>' => self.either('=', Tok::Ge, Tok::Gt),
                '&' if self.peek() == Some('&') => {
                    self.bump();
                    Tok::AndAnd
                }
                '|' if self.peek() == Some('|') => {
                    self.bump();
                    Tok::OrOr
                }
                '"' => self.string(&pos)?,
                c if c.is_ascii_digit() => self.number(c, &pos)?,
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = pos.byte_offset;
                    while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                        self.bump();
                    }
                    let word = &self.src[start..self.offset];
                    keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string()))
                }
                other => return Err(self.error(pos, format!("unexpected character `{other}`"))),
            };
            out.push(Token { tok, pos, end: self.offset });
        }
    }

    fn either(&mut self, next: char, yes: Tok, no: Tok) -> Tok {
        if self.peek() == Some(next) {
            self.bump();
            yes
        } else {
            no
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek2() == Some('/') => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn number(&mut self, first: char, pos: &SourcePos) -> Result<Tok, ParseError> {
        let mut value = u64::from(first.to_digit(10).unwrap_or(0));
        while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
            self.bump();
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(d)))
                .ok_or_else(|| self.error(pos.clone(), "integer literal too large"))?;
        }
        if self.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
            return Err(self.error(self.pos(), "expected a separator after integer literal"));
        }
        Ok(Tok::Int(value))
    }

    fn string(&mut self, pos: &SourcePos) -> Result<Tok, ParseError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.error(pos.clone(), "unterminated string literal")),
                Some('"') => return Ok(Tok::Str(s)),
                Some('\\') => {
                    let c = match self.bump() {
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('r') => '\r',
                        Some('\\') => '\\',
                        Some('"') => '"',
                        Some('0') => '\0',
                        _ => return Err(self.error(self.pos(), "invalid escape sequence")),
                    };
                    s.push(c);
                }
                Some(c) => s.push(c),
            }
        }
    }
}
