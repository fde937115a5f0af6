//! Hand-rolled lexer for the program syntax.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    // Literals and names.
    Nat(u64),
    Ident(String),
    // Keywords.
    Component,
    Attacker,
    Private,
    Public,
    Import,
    Fn,
    Skip,
    Let,
    In,
    If0,
    Else,
    Call,
    Write,
    WriteP,
    Read,
    ReadP,
    Lfence,
    CMov,
    Ret,
    Not,
    Or,
    // Punctuation and operators.
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Colon,
    Assign,
    EqEq,
    Plus,
    Minus,
    Star,
    Lt,
    Gt,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Nat(n) => write!(f, "{n}"),
            Token::Ident(s) => write!(f, "{s}"),
            Token::Component => write!(f, "component"),
            Token::Attacker => write!(f, "attacker"),
            Token::Private => write!(f, "private"),
            Token::Public => write!(f, "public"),
            Token::Import => write!(f, "import"),
            Token::Fn => write!(f, "fn"),
            Token::Skip => write!(f, "skip"),
            Token::Let => write!(f, "let"),
            Token::In => write!(f, "in"),
            Token::If0 => write!(f, "if0"),
            Token::Else => write!(f, "else"),
            Token::Call => write!(f, "call"),
            Token::Write => write!(f, "write"),
            Token::WriteP => write!(f, "writep"),
            Token::Read => write!(f, "read"),
            Token::ReadP => write!(f, "readp"),
            Token::Lfence => write!(f, "lfence"),
            Token::CMov => write!(f, "cmov"),
            Token::Ret => write!(f, "ret"),
            Token::Not => write!(f, "not"),
            Token::Or => write!(f, "or"),
            Token::LBrace => write!(f, "{{"),
            Token::RBrace => write!(f, "}}"),
            Token::LParen => write!(f, "("),
            Token::RParen => write!(f, ")"),
            Token::Semi => write!(f, ";"),
            Token::Comma => write!(f, ","),
            Token::Colon => write!(f, ":"),
            Token::Assign => write!(f, "="),
            Token::EqEq => write!(f, "=="),
            Token::Plus => write!(f, "+"),
            Token::Minus => write!(f, "-"),
            Token::Star => write!(f, "*"),
            Token::Lt => write!(f, "<"),
            Token::Gt => write!(f, ">"),
        }
    }
}

/// A token plus the 1-based line on which it starts (for error messages).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub token: Token,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("lex error on line {line}: {message}")]
pub struct LexError {
    pub line: u32,
    pub message: String,
}

/// Tokenize `src`. `//` comments run to end of line.
pub fn lex(src: &str) -> Result<Vec<Spanned>, LexError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let mut line: u32 = 1;

    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '/' => {
                chars.next();
                if chars.peek() == Some(&'/') {
                    for c in chars.by_ref() {
                        if c == '\n' {
                            line += 1;
                            break;
                        }
                    }
                } else {
                    return Err(LexError {
                        line,
                        message: "unexpected '/' (only '//' comments are supported)".into(),
                    });
                }
            }
            '0'..='9' => {
                let mut n: u64 = 0;
                while let Some(&d) = chars.peek() {
                    let Some(digit) = d.to_digit(10) else { break };
                    chars.next();
                    n = n
                        .checked_mul(10)
                        .and_then(|n| n.checked_add(u64::from(digit)))
                        .ok_or_else(|| LexError {
                            line,
                            message: "integer literal does not fit in 64 bits".into(),
                        })?;
                }
                out.push(Spanned {
                    token: Token::Nat(n),
                    line,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' || c == '$' => {
                let mut word = String::new();
                if c == '$' {
                    word.push('$');
                    chars.next();
                    match chars.peek() {
                        Some(&d) if d.is_ascii_alphabetic() || d == '_' => {}
                        _ => {
                            return Err(LexError {
                                line,
                                message: "'$' must be followed by an identifier".into(),
                            })
                        }
                    }
                }
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        word.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let token = match word.as_str() {
                    "component" => Token::Component,
                    "attacker" => Token::Attacker,
                    "private" => Token::Private,
                    "public" => Token::Public,
                    "import" => Token::Import,
                    "fn" => Token::Fn,
                    "skip" => Token::Skip,
                    "let" => Token::Let,
                    "in" => Token::In,
                    "if0" => Token::If0,
                    "else" => Token::Else,
                    "call" => Token::Call,
                    "write" => Token::Write,
                    "writep" => Token::WriteP,
                    "read" => Token::Read,
                    "readp" => Token::ReadP,
                    "lfence" => Token::Lfence,
                    "cmov" => Token::CMov,
                    "ret" => Token::Ret,
                    "not" => Token::Not,
                    "or" => Token::Or,
                    _ => Token::Ident(word),
                };
                out.push(Spanned { token, line });
            }
            _ => {
                chars.next();
                let token = match c {
                    '{' => Token::LBrace,
                    '}' => Token::RBrace,
                    '(' => Token::LParen,
                    ')' => Token::RParen,
                    ';' => Token::Semi,
                    ',' => Token::Comma,
                    ':' => Token::Colon,
                    '+' => Token::Plus,
                    '-' => Token::Minus,
                    '*' => Token::Star,
                    '<' => Token::Lt,
                    '>' => Token::Gt,
                    '=' => {
                        if chars.peek() == Some(&'=') {
                            chars.next();
                            Token::EqEq
                        } else {
                            Token::Assign
                        }
                    }
                    other => {
                        return Err(LexError {
                            line,
                            message: format!("unexpected character {other:?}"),
                        })
                    }
                };
                out.push(Spanned { token, line });
            }
        }
    }
    Ok(out)
}
