//! S-expression lexer with source positions, shared by the planning-language
//! parser and the reasoning rule files.

use crate::ParseError;

/// A lexed token: what it is plus where it started.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    LParen,
    RParen,
    /// Bare name: starts with a letter, may contain letters, digits, `-`, `_`.
    Symbol(String),
    /// Section keyword, lexed with its leading `:`.
    Keyword(String),
    /// Variable, lexed with its leading `?`.
    Variable(String),
    Integer(i64),
    /// Standalone `-`, the typed-list separator.
    Dash,
}

impl TokenKind {
    /// Short class name for diagnostics.
    pub fn describe(&self) -> &'static str {
        match self {
            TokenKind::LParen => "'('",
            TokenKind::RParen => "')'",
            TokenKind::Symbol(_) => "name",
            TokenKind::Keyword(_) => "keyword",
            TokenKind::Variable(_) => "variable",
            TokenKind::Integer(_) => "integer",
            TokenKind::Dash => "'-'",
        }
    }
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_name_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-' || c == '_'
}

/// Lexes source text into tokens. Comments run from `;` to end of line.
pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = src.chars().peekable();
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (tok_line, tok_col) = (line, col);
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '(' => {
                bump!();
                tokens.push(Token {
                    kind: TokenKind::LParen,
                    line: tok_line,
                    col: tok_col,
                });
            }
            ')' => {
                bump!();
                tokens.push(Token {
                    kind: TokenKind::RParen,
                    line: tok_line,
                    col: tok_col,
                });
            }
            '-' => {
                bump!();
                // A dash glued to digits is a (negative) integer literal;
                // anything else is the typed-list separator.
                if chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                    let mut text = String::from("-");
                    while let Some(&c) = chars.peek() {
                        if !c.is_ascii_digit() {
                            break;
                        }
                        text.push(c);
                        bump!();
                    }
                    let value = text.parse().map_err(|_| ParseError::Lexical {
                        line: tok_line,
                        col: tok_col,
                        message: format!("integer literal '{text}' out of range"),
                    })?;
                    tokens.push(Token {
                        kind: TokenKind::Integer(value),
                        line: tok_line,
                        col: tok_col,
                    });
                } else {
                    tokens.push(Token {
                        kind: TokenKind::Dash,
                        line: tok_line,
                        col: tok_col,
                    });
                }
            }
            c if c.is_ascii_digit() => {
                let mut text = String::new();
                while let Some(&c) = chars.peek() {
                    if !c.is_ascii_digit() {
                        break;
                    }
                    text.push(c);
                    bump!();
                }
                let value = text.parse().map_err(|_| ParseError::Lexical {
                    line: tok_line,
                    col: tok_col,
                    message: format!("integer literal '{text}' out of range"),
                })?;
                tokens.push(Token {
                    kind: TokenKind::Integer(value),
                    line: tok_line,
                    col: tok_col,
                });
            }
            ':' | '?' => {
                let sigil = c;
                bump!();
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_name_continue(c) {
                        break;
                    }
                    name.push(c);
                    bump!();
                }
                if name.is_empty() || !name.starts_with(is_name_start) {
                    return Err(ParseError::Lexical {
                        line: tok_line,
                        col: tok_col,
                        message: format!("'{sigil}' must be followed by a name"),
                    });
                }
                let kind = if sigil == ':' {
                    TokenKind::Keyword(name)
                } else {
                    TokenKind::Variable(name)
                };
                tokens.push(Token {
                    kind,
                    line: tok_line,
                    col: tok_col,
                });
            }
            c if is_name_start(c) => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_name_continue(c) {
                        break;
                    }
                    name.push(c);
                    bump!();
                }
                tokens.push(Token {
                    kind: TokenKind::Symbol(name),
                    line: tok_line,
                    col: tok_col,
                });
            }
            c => {
                return Err(ParseError::Lexical {
                    line: tok_line,
                    col: tok_col,
                    message: format!("illegal character '{c}'"),
                });
            }
        }
    }
    Ok(tokens)
}
