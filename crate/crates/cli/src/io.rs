//! Text formats for generator matrices, words and grids.
//!
//! All three share one token syntax: `#` starts a comment that runs to the
//! end of the line, whitespace separates tokens, and `*` stands for an
//! erased symbol where erasures are allowed. The first data line is a
//! header:
//!
//! ```text
//! code:  q n k     followed by k rows of n symbols
//! word:  q n       followed by n symbols
//! grid:  q rows cols  followed by rows*cols symbols
//! ```
//!
//! Writers emit one matrix row (or grid row) per line so the files diff
//! cleanly; readers only care about token order.

use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use listlab::code::{LinearCode, Word};
use listlab::field::Field;
use listlab::grid::Grid;

/// Where and why parsing stopped. Lines and columns are 1-based; the
/// column counts tokens, not characters, since the formats are
/// whitespace-separated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, token {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

/// A token with its position, after comment stripping.
struct Token<'a> {
    line: usize,
    column: usize,
    text: &'a str,
}

fn tokenize(text: &str) -> (Vec<Token<'_>>, Option<String>) {
    let mut tokens = Vec::new();
    let mut label = None;
    for (ln, raw) in text.lines().enumerate() {
        let (data, comment) = match raw.find('#') {
            Some(pos) => (&raw[..pos], Some(raw[pos + 1..].trim())),
            None => (raw, None),
        };
        if let Some(c) = comment {
            if let Some(rest) = c.strip_prefix("name:") {
                label.get_or_insert_with(|| rest.trim().to_string());
            }
        }
        for (col, tok) in data.split_whitespace().enumerate() {
            tokens.push(Token { line: ln + 1, column: col + 1, text: tok });
        }
    }
    (tokens, label)
}

struct Reader<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(tokens: Vec<Token<'a>>) -> Self {
        Reader { tokens, pos: 0 }
    }

    fn next(&mut self, what: &str) -> Result<&Token<'a>, ParseError> {
        let Some(t) = self.tokens.get(self.pos) else {
            let (line, column) = self
                .tokens
                .last()
                .map(|t| (t.line, t.column + 1))
                .unwrap_or((1, 1));
            return Err(err(line, column, format!("missing {what}")));
        };
        self.pos += 1;
        Ok(t)
    }

    fn integer(&mut self, what: &str) -> Result<u64, ParseError> {
        let t = self.next(what)?;
        t.text
            .parse::<u64>()
            .map_err(|_| err(t.line, t.column, format!("expected {what}, got {:?}", t.text)))
    }

    fn symbol(&mut self, q: u64, erasable: bool) -> Result<Option<u16>, ParseError> {
        let t = self.next("symbol")?;
        if t.text == "*" {
            if erasable {
                return Ok(None);
            }
            return Err(err(t.line, t.column, "erasures are not allowed here"));
        }
        let v = t
            .text
            .parse::<u64>()
            .map_err(|_| err(t.line, t.column, format!("expected symbol, got {:?}", t.text)))?;
        if v >= q {
            return Err(err(t.line, t.column, format!("symbol {v} out of range for q = {q}")));
        }
        Ok(Some(v as u16))
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.tokens.get(self.pos) {
            None => Ok(()),
            Some(t) => Err(err(t.line, t.column, format!("unexpected trailing token {:?}", t.text))),
        }
    }
}

fn field_for(q: u64, line: usize) -> Result<Arc<Field>, ParseError> {
    Field::new(q)
        .map(Arc::new)
        .map_err(|e| err(line, 1, e.to_string()))
}

/// Parses a generator-matrix file. A `# name: X` comment, if present,
/// becomes the code's label.
pub fn parse_code(text: &str) -> Result<LinearCode, ParseError> {
    let (tokens, label) = tokenize(text);
    let mut r = Reader::new(tokens);
    let q = r.integer("alphabet size q")?;
    let n = r.integer("length n")? as usize;
    let k = r.integer("dimension k")? as usize;
    let f = field_for(q, 1)?;
    let mut gen = Vec::with_capacity(k);
    for _ in 0..k {
        let mut row = Vec::with_capacity(n);
        for _ in 0..n {
            row.push(r.symbol(q, false)?.expect("erasures rejected"));
        }
        gen.push(row);
    }
    r.finish()?;
    LinearCode::new(f, gen, label.unwrap_or_else(|| "code".into()))
        .map_err(|e| err(1, 1, e.to_string()))
}

pub fn format_code(code: &LinearCode) -> String {
    let mut out = format!("# name: {}\n{} {} {}\n", code.label(), code.field().q(), code.n(), code.k());
    for row in code.generator() {
        let line: Vec<String> = row.iter().map(u16::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a word file; `*` marks erased positions.
pub fn parse_word(text: &str) -> Result<Word, ParseError> {
    let (tokens, _) = tokenize(text);
    let mut r = Reader::new(tokens);
    let q = r.integer("alphabet size q")?;
    let n = r.integer("length n")? as usize;
    let f = field_for(q, 1)?;
    let mut symbols = Vec::with_capacity(n);
    for _ in 0..n {
        symbols.push(r.symbol(q, true)?);
    }
    r.finish()?;
    Word::new(f, symbols).map_err(|e| err(1, 1, e.to_string()))
}

pub fn format_word(w: &Word) -> String {
    let mut out = format!("{} {}\n", w.field().q(), w.len());
    let syms: Vec<String> = w
        .symbols()
        .iter()
        .map(|s| match s {
            Some(v) => v.to_string(),
            None => "*".to_string(),
        })
        .collect();
    out.push_str(&syms.join(" "));
    out.push('\n');
    out
}

/// Parses a grid file; `*` marks erased cells.
pub fn parse_grid(text: &str) -> Result<Grid, ParseError> {
    let (tokens, _) = tokenize(text);
    let mut r = Reader::new(tokens);
    let q = r.integer("alphabet size q")?;
    let rows = r.integer("row count")? as usize;
    let cols = r.integer("column count")? as usize;
    let f = field_for(q, 1)?;
    let mut cells = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        cells.push(r.symbol(q, true)?);
    }
    r.finish()?;
    Grid::from_cells(f, rows, cols, cells).map_err(|e| err(1, 1, e.to_string()))
}

pub fn format_grid(g: &Grid) -> String {
    let mut out = format!("{} {} {}\n", g.field().q(), g.rows(), g.cols());
    for i in 0..g.rows() {
        let row: Vec<String> = (0..g.cols())
            .map(|j| match g.get(i, j) {
                Some(v) => v.to_string(),
                None => "*".to_string(),
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_code(path: &Path) -> anyhow::Result<LinearCode> {
    let text = fs::read_to_string(path)?;
    parse_code(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

pub fn read_word(path: &Path) -> anyhow::Result<Word> {
    let text = fs::read_to_string(path)?;
    parse_word(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

pub fn read_grid(path: &Path) -> anyhow::Result<Grid> {
    let text = fs::read_to_string(path)?;
    parse_grid(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use listlab::families::{hadamard, reed_solomon};

    #[test]
    fn code_roundtrip_preserves_generator_and_label() {
        for code in [hadamard(2, 3).unwrap(), reed_solomon(5, &[0, 1, 2, 3, 4], 1).unwrap()] {
            let text = format_code(&code);
            let back = parse_code(&text).unwrap();
            assert_eq!(back.generator(), code.generator());
            assert_eq!(back.field().q(), code.field().q());
            assert_eq!(back.label(), code.label());
        }
    }

    #[test]
    fn word_roundtrip_keeps_erasures() {
        let f = Arc::new(Field::new(5).unwrap());
        let w = Word::new(f, vec![Some(3), None, Some(0), Some(4), None]).unwrap();
        let text = format_word(&w);
        assert!(text.contains('*'));
        let back = parse_word(&text).unwrap();
        assert_eq!(back.symbols(), w.symbols());
    }

    #[test]
    fn grid_roundtrip_keeps_shape() {
        let f = Arc::new(Field::new(3).unwrap());
        let g = Grid::from_cells(
            f,
            2,
            3,
            vec![Some(0), Some(1), None, Some(2), Some(2), Some(0)],
        )
        .unwrap();
        let back = parse_grid(&format_grid(&g)).unwrap();
        assert_eq!(back.rows(), 2);
        assert_eq!(back.cols(), 3);
        assert_eq!(back.cells(), g.cells());
    }

    #[test]
    fn malformed_header_reports_line_one() {
        let e = parse_code("x 4 2\n0 1 0 1\n1 0 1 0\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert_eq!(e.column, 1);
        let e = parse_word("2\n").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn errors_carry_positions() {
        // Symbol out of range on the second data line, third token.
        let e = parse_code("2 3 2\n0 1 0\n1 7 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 2));
        // Erasure where none is allowed.
        let e = parse_code("2 3 1\n0 * 0\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 2));
        // Trailing garbage.
        let e = parse_word("2 2\n0 1 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# a code\n\n2 4 2  # header\n0 0 1 1\n# interior\n0 1 0 1\n";
        let code = parse_code(text).unwrap();
        assert_eq!(code.generator(), &[vec![0, 0, 1, 1], vec![0, 1, 0, 1]]);
    }
}
