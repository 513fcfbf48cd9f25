#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Comma,
    Dot,
    Eq,
    Arrow,
    Newline,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Str(_) => "text literal".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LexError {
    pub start: usize,
    pub end: usize,
    pub message: String,
}

/// Splits `src` into tokens. Lexing never stops early: bad characters become
/// errors and are skipped.
pub(crate) fn lex(src: &str) -> (Vec<Token>, Vec<LexError>) {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut errs = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |t: Tok| Token { tok: t, start, end: start + 1 };
        match c {
            b' ' | b'\t' | b'\r' => i += 1,
            b'\n' => {
                toks.push(single(Tok::Newline));
                i += 1;
            }
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'{' => {
                toks.push(single(Tok::LBrace));
                i += 1;
            }
            b'}' => {
                toks.push(single(Tok::RBrace));
                i += 1;
            }
            b'(' => {
                toks.push(single(Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push(single(Tok::RParen));
                i += 1;
            }
            b':' => {
                toks.push(single(Tok::Colon));
                i += 1;
            }
            b',' => {
                toks.push(single(Tok::Comma));
                i += 1;
            }
            b'.' => {
                toks.push(single(Tok::Dot));
                i += 1;
            }
            b'=' => {
                toks.push(single(Tok::Eq));
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                toks.push(Token {
                    tok: Tok::Arrow,
                    start,
                    end: start + 2,
                });
                i += 2;
            }
            b'-' | b'0'..=b'9' => {
                i = lex_number(src, i, &mut toks, &mut errs);
            }
            b'"' => {
                i = lex_string(src, i, &mut toks, &mut errs);
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push(Token {
                    tok: Tok::Ident(src[start..i].to_string()),
                    start,
                    end: i,
                });
            }
            _ => {
                let ch = src[i..].chars().next().expect("in bounds on a char boundary");
                i += ch.len_utf8();
                errs.push(LexError {
                    start,
                    end: i,
                    message: format!("unexpected character {ch:?}"),
                });
            }
        }
    }
    toks.push(Token {
        tok: Tok::Eof,
        start: bytes.len(),
        end: bytes.len(),
    });
    (toks, errs)
}

fn lex_number(src: &str, start: usize, toks: &mut Vec<Token>, errs: &mut Vec<LexError>) -> usize {
    let bytes = src.as_bytes();
    let mut i = start;
    let digits = |i: &mut usize| {
        let s = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        *i > s
    };
    if bytes[i] == b'-' {
        i += 1;
    }
    let mut ok = digits(&mut i);
    if ok && i < bytes.len() && bytes[i] == b'.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()) {
        i += 1;
        digits(&mut i);
    }
    if ok && i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let save = i;
        i += 1;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        if !digits(&mut i) {
            i = save;
            ok = false;
        }
    }
    // a number glued to identifier characters is malformed
    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
        i += 1;
        ok = false;
    }
    if i == start {
        i = start + 1;
    }
    let text = &src[start..i];
    match text.parse::<f64>() {
        Ok(v) if ok => toks.push(Token {
            tok: Tok::Number(v),
            start,
            end: i,
        }),
        _ => errs.push(LexError {
            start,
            end: i,
            message: format!("malformed number `{text}`"),
        }),
    }
    i
}

fn lex_string(src: &str, start: usize, toks: &mut Vec<Token>, errs: &mut Vec<LexError>) -> usize {
    let mut out = String::new();
    let mut chars = src[start + 1..].char_indices();
    while let Some((off, ch)) = chars.next() {
        let pos = start + 1 + off;
        match ch {
            '"' => {
                toks.push(Token {
                    tok: Tok::Str(out),
                    start,
                    end: pos + 1,
                });
                return pos + 1;
            }
            '\n' => break,
            '\\' => match chars.next() {
                Some((_, 'n')) => out.push('\n'),
                Some((_, 't')) => out.push('\t'),
                Some((_, 'r')) => out.push('\r'),
                Some((_, '"')) => out.push('"'),
                Some((_, '\\')) => out.push('\\'),
                Some((eoff, e)) => {
                    let epos = start + 1 + eoff;
                    errs.push(LexError {
                        start: pos,
                        end: epos + e.len_utf8(),
                        message: format!("unknown escape `\\{e}`"),
                    });
                }
                None => break,
            },
            c => out.push(c),
        }
    }
    // unterminated: consume to end of line
    let end = src[start..].find('\n').map_or(src.len(), |n| start + n);
    errs.push(LexError {
        start,
        end: end.max(start + 1),
        message: "unterminated text literal".into(),
    });
    end.max(start + 1)
}
