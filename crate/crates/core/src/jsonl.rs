//! Line-oriented JSONL plumbing shared by every record format.

use std::io::{self, BufRead, Write};
use std::marker::PhantomData;

use serde::de::DeserializeOwned;
use serde::Serialize;

/// A raw input line with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub number: usize,
    pub text: String,
}

#[derive(Debug, thiserror::Error)]
pub enum LineFault {
    #[error("line {line}: invalid UTF-8 at byte offset {offset}")]
    Encoding { line: usize, offset: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Iterates the non-blank lines of a reader, one record per line.
///
/// Lines are read as bytes so that bad UTF-8 is reported with its offset
/// instead of aborting the whole stream.
pub struct Lines<R> {
    reader: R,
    number: usize,
    buf: Vec<u8>,
}

impl<R: BufRead> Lines<R> {
    pub fn new(reader: R) -> Self {
        Self { reader, number: 0, buf: Vec::new() }
    }
}

impl<R: BufRead> Iterator for Lines<R> {
    type Item = Result<Line, LineFault>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.reader.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(e.into())),
            }
            self.number += 1;
            let mut bytes = self.buf.as_slice();
            if let Some(rest) = bytes.strip_suffix(b"\n") {
                bytes = rest.strip_suffix(b"\r").unwrap_or(rest);
            }
            if bytes.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            return Some(match std::str::from_utf8(bytes) {
                Ok(s) => Ok(Line { number: self.number, text: s.to_owned() }),
                Err(e) => Err(LineFault::Encoding { line: self.number, offset: e.valid_up_to() }),
            });
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RecordError {
    #[error("line {line}: invalid UTF-8 at byte offset {offset}")]
    Encoding { line: usize, offset: usize },
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<LineFault> for RecordError {
    fn from(f: LineFault) -> Self {
        match f {
            LineFault::Encoding { line, offset } => RecordError::Encoding { line, offset },
            LineFault::Io(e) => RecordError::Io(e),
        }
    }
}

/// Typed records, one per non-blank line, paired with their line numbers.
pub struct Records<R, T> {
    lines: Lines<R>,
    _record: PhantomData<fn() -> T>,
}

impl<R: BufRead, T: DeserializeOwned> Records<R, T> {
    pub fn new(reader: R) -> Self {
        Self { lines: Lines::new(reader), _record: PhantomData }
    }
}

impl<R: BufRead, T: DeserializeOwned> Iterator for Records<R, T> {
    type Item = Result<(usize, T), RecordError>;

    fn next(&mut self) -> Option<Self::Item> {
        let line = match self.lines.next()? {
            Ok(line) => line,
            Err(fault) => return Some(Err(fault.into())),
        };
        Some(
            serde_json::from_str(&line.text)
                .map(|v| (line.number, v))
                .map_err(|source| RecordError::Json { line: line.number, source }),
        )
    }
}

/// Writes one value as a single LF-terminated JSON line.
pub fn write_line<W: Write + ?Sized, T: Serialize + ?Sized>(out: &mut W, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")
}

/// Rounds a score to the four decimals used in every serialized output.
pub fn round4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_blank_lines_but_keeps_numbering() {
        let input = b"{\"a\":1}\n\n  \n{\"b\":2}\r\n";
        let lines: Vec<_> = Lines::new(&input[..]).map(Result::unwrap).collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].number, 1);
        assert_eq!(lines[1].number, 4);
        assert_eq!(lines[1].text, "{\"b\":2}");
    }

    #[test]
    fn bad_utf8_reports_line_and_offset() {
        let input = b"ok\nab\xfe\n";
        let mut it = Lines::new(&input[..]);
        assert!(it.next().unwrap().is_ok());
        match it.next().unwrap() {
            Err(LineFault::Encoding { line, offset }) => assert_eq!((line, offset), (2, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn typed_records_carry_line_numbers() {
        let input = b"[1]\n\nnope\n[2]\n";
        let got: Vec<_> = Records::<_, Vec<u8>>::new(&input[..]).collect();
        assert_eq!(got[0].as_ref().unwrap(), &(1, vec![1]));
        assert!(matches!(got[1], Err(RecordError::Json { line: 3, .. })));
        assert_eq!(got[2].as_ref().unwrap(), &(4, vec![2]));
    }

    #[test]
    fn round4_is_stable() {
        assert_eq!(round4(55.2), 55.2);
        assert_eq!(round4(49.99996), 50.0);
        assert_eq!(round4(12.345_649), 12.3456);
    }
}
