//! Tokenizer shared by the `.fkb` and answer-file formats.

use super::diagnostic::{Code, Diagnostic};
use super::model::Span;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    /// End of a line; only emitted in line mode.
    Newline,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("number {n}"),
            Tok::Str(_) => "string".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Ne => "`!=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
    /// Text of a `#` comment trailing this token on the same line (line mode only).
    pub comment: Option<String>,
}

/// Splits `src` into tokens. Invalid characters produce a diagnostic and are
/// skipped, so the token stream always ends with `Eof`.
pub fn tokenize(src: &str, line_mode: bool) -> (Vec<Token>, Vec<Diagnostic>) {
    Lexer { chars: src.chars().collect(), pos: 0, line: 1, col: 1, line_mode }.run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    line_mode: bool,
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.pos + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn run(mut self) -> (Vec<Token>, Vec<Diagnostic>) {
        let mut toks: Vec<Token> = Vec::new();
        let mut diags = Vec::new();
        while let Some(c) = self.peek() {
            let span = Span::new(self.line, self.col);
            if c == '\n' {
                self.bump();
                if self.line_mode {
                    toks.push(Token { tok: Tok::Newline, span, comment: None });
                }
                continue;
            }
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '#' {
                let mut text = String::new();
                self.bump();
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                if self.line_mode {
                    if let Some(last) = toks.last_mut() {
                        if last.span.line == span.line && last.tok != Tok::Newline {
                            last.comment = Some(text.trim().to_string());
                        }
                    }
                }
                continue;
            }
            let tok = if c.is_ascii_alphabetic() || c == '_' {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            } else if c.is_ascii_digit()
                || (c == '-' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit() || d == '.'))
                || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()))
            {
                match self.number() {
                    Ok(n) => Tok::Number(n),
                    Err(raw) => {
                        diags.push(Diagnostic::error(Code::LexicalError, span, format!("malformed number `{raw}`")));
                        continue;
                    }
                }
            } else if c == '"' {
                match self.string() {
                    Ok(s) => Tok::Str(s),
                    Err(msg) => {
                        diags.push(Diagnostic::error(Code::LexicalError, span, msg));
                        continue;
                    }
                }
            } else {
                self.bump();
                match (c, self.peek()) {
                    ('{', _) => Tok::LBrace,
                    ('}', _) => Tok::RBrace,
                    ('(', _) => Tok::LParen,
                    (')', _) => Tok::RParen,
                    (';', _) => Tok::Semi,
                    (':', _) => Tok::Colon,
                    (',', _) => Tok::Comma,
                    ('=', _) => Tok::Eq,
                    ('!', Some('=')) => {
                        self.bump();
                        Tok::Ne
                    }
                    ('<', Some('=')) => {
                        self.bump();
                        Tok::Le
                    }
                    ('>', Some('=')) => {
                        self.bump();
                        Tok::Ge
                    }
                    ('<', _) => Tok::Lt,
                    ('>', _) => Tok::Gt,
                    ('≠', _) => Tok::Ne,
                    ('≤', _) => Tok::Le,
                    ('≥', _) => Tok::Ge,
                    (other, _) => {
                        diags.push(Diagnostic::error(
                            Code::LexicalError,
                            span,
                            format!("unexpected character {other:?}"),
                        ));
                        continue;
                    }
                }
            };
            toks.push(Token { tok, span, comment: None });
        }
        toks.push(Token { tok: Tok::Eof, span: Span::new(self.line, self.col), comment: None });
        (toks, diags)
    }

    fn number(&mut self) -> Result<f64, String> {
        let mut raw = String::new();
        if self.peek() == Some('-') {
            raw.push('-');
            self.bump();
        }
        while let Some(c) = self.peek() {
            let exp_sign = (c == '-' || c == '+') && matches!(raw.chars().last(), Some('e' | 'E'));
            if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                raw.push(c);
                self.bump();
            } else {
                break;
            }
        }
        // A trailing identifier character glued to a number is malformed.
        if self.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    raw.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            return Err(raw);
        }
        raw.parse::<f64>().ok().filter(|n| n.is_finite()).ok_or(raw)
    }

    fn string(&mut self) -> Result<String, String> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err("unterminated string".into()),
                Some('"') => return Ok(s),
                Some('\\') => match self.bump() {
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    other => return Err(format!("invalid escape `\\{}`", other.map(String::from).unwrap_or_default())),
                },
                Some(c) => s.push(c),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src, false).0.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_literals() {
        assert_eq!(
            kinds("a >= -3.5 and b != \"x\\\"y\" # c"),
            vec![
                Tok::Ident("a".into()),
                Tok::Ge,
                Tok::Number(-3.5),
                Tok::Ident("and".into()),
                Tok::Ident("b".into()),
                Tok::Ne,
                Tok::Str("x\"y".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn crlf_is_whitespace() {
        let (toks, diags) = tokenize("a\r\nb", false);
        assert!(diags.is_empty());
        assert_eq!(toks[1].span, Span::new(2, 1));
        assert_eq!(toks[1].span.line, 2);
    }

    #[test]
    fn bad_characters_are_reported_with_location() {
        let (toks, diags) = tokenize("a\n  @ b", false);
        assert_eq!(diags.len(), 1);
        assert_eq!((diags[0].line, diags[0].column), (2, 3));
        assert_eq!(toks.len(), 3);
    }

    #[test]
    fn unterminated_string() {
        let (_, diags) = tokenize("\"abc", false);
        assert_eq!(diags[0].code, Code::LexicalError);
    }

    #[test]
    fn line_mode_keeps_trailing_comments() {
        let (toks, _) = tokenize("a = 1 # t=5\nb = 2", true);
        assert_eq!(toks[2].comment.as_deref(), Some("t=5"));
        assert_eq!(toks[3].tok, Tok::Newline);
    }
}
