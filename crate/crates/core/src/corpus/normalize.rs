//! Text normalization applied before segmentation and scoring.

use unicode_normalization::UnicodeNormalization;

use super::CorpusError;

/// Canonicalizes a raw string.
///
/// The output is NFC-composed, has control characters other than `\n`
/// removed, and has every whitespace run collapsed to one character. A run
/// that contains a newline becomes `"\n"`, any other run becomes `" "`.
/// Leading and trailing whitespace is stripped.
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    // pending whitespace run: None, Some(false) = spaces only, Some(true) = saw newline
    let mut pending: Option<bool> = None;
    for c in text.nfc() {
        if c == '\n' {
            pending = Some(true);
            continue;
        }
        if c.is_whitespace() {
            pending = Some(pending.unwrap_or(false));
            continue;
        }
        if c.is_control() {
            continue;
        }
        if let Some(newline) = pending.take() {
            if !out.is_empty() {
                out.push(if newline { '\n' } else { ' ' });
            }
        }
        out.push(c);
    }
    out
}

/// Decodes UTF-8 bytes and normalizes them.
pub fn normalize_bytes(bytes: &[u8]) -> Result<String, CorpusError> {
    match std::str::from_utf8(bytes) {
        Ok(s) => Ok(normalize(s)),
        Err(e) => Err(CorpusError::InvalidEncoding { offset: e.valid_up_to() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_ascii_is_unchanged() {
        assert_eq!(normalize("abc"), "abc");
    }

    #[test]
    fn whitespace_runs_collapse() {
        assert_eq!(normalize("a  b\t c"), "a b c");
        assert_eq!(normalize("  lead and trail \t "), "lead and trail");
    }

    #[test]
    fn newline_survives_collapse() {
        assert_eq!(normalize("one. \n\n  two."), "one.\ntwo.");
        assert_eq!(normalize("\n\nx\n"), "x");
    }

    #[test]
    fn control_characters_are_dropped() {
        assert_eq!(normalize("a\u{0007}b\u{0000}c"), "abc");
        // ZWJ is a format character, not a control character
        assert_eq!(normalize("पर\u{200d}यो"), "पर\u{200d}यो");
    }

    // Expected values frozen from Python's unicodedata.normalize("NFC", ...).
    #[test]
    fn devanagari_nukta_forms_match_reference_nfc() {
        assert_eq!(normalize("\u{928}\u{93c}"), "\u{929}");
        assert_eq!(normalize("\u{930}\u{93c}"), "\u{931}");
        assert_eq!(normalize("\u{933}\u{93c}"), "\u{934}");
        // U+0958 is a composition exclusion and decomposes under NFC
        assert_eq!(normalize("\u{958}"), "\u{915}\u{93c}");
        assert_eq!(normalize("\u{958}\u{93e}"), "\u{915}\u{93c}\u{93e}");
        assert_eq!(normalize("e\u{301}"), "\u{e9}");
    }

    #[test]
    fn invalid_utf8_names_offset() {
        let err = normalize_bytes(b"ab\xffcd").unwrap_err();
        assert!(matches!(err, CorpusError::InvalidEncoding { offset: 2 }));
        assert_eq!(normalize_bytes("  ok ".as_bytes()).unwrap(), "ok");
    }

    #[test]
    fn normalize_is_idempotent_on_samples() {
        for s in ["a\t\tb", " क  ख।\n\n ग ", "x\u{0301}y", ""] {
            let once = normalize(s);
            assert_eq!(normalize(&once), once);
        }
    }
}
