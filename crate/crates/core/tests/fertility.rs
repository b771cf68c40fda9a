mod common;

use std::fs;

use forge_core::attnmap::TensorMeta;
use forge_core::fertility::{
    align_tokens_to_words, fertility_stats, FertilityAccumulator, FertilityRecord, TokenOffsets, WordSpan,
};
use proptest::prelude::*;

fn fixture_records() -> Vec<FertilityRecord> {
    fs::read_to_string(common::fixture("fertility.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// Interval containment by linear scan over every word.
fn oracle(text: &str, toks: &TokenOffsets) -> Option<Vec<WordSpan>> {
    let chars: Vec<char> = text.chars().collect();
    let mut words: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let s = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        words.push((s, i));
    }
    let mut owner = Vec::new();
    for &(s, e) in &toks.offsets {
        let anchor = (s..e).find(|&p| !chars[p].is_whitespace());
        let w = match anchor {
            Some(p) => words.iter().position(|&(ws, we)| ws <= p && p < we)?,
            None => words.iter().position(|&(_, we)| we > s).unwrap_or(words.len().checked_sub(1)?),
        };
        owner.push(w);
    }
    let mut spans = Vec::new();
    for (w, &(ws, we)) in words.iter().enumerate() {
        let idx: Vec<usize> = (0..owner.len()).filter(|&t| owner[t] == w).collect();
        let (&first, &last) = (idx.first()?, idx.last()?);
        if last + 1 - first != idx.len() {
            return None;
        }
        spans.push(WordSpan { word: chars[ws..we].iter().collect(), tok_start: first, tok_end: last + 1 });
    }
    let contiguous = spans.windows(2).all(|p| p[0].tok_end == p[1].tok_start)
        && spans.first().is_some_and(|s| s.tok_start == 0)
        && spans.last().is_some_and(|s| s.tok_end == owner.len());
    contiguous.then_some(spans)
}

#[test]
fn fixture_fertility_totals() {
    let report = fertility_stats(&fixture_records());
    assert_eq!((report.total_tokens, report.total_words), (28, 13));
    assert_eq!(report.fertility, Some(28.0 / 13.0));
    assert_eq!(report.by_lang["ne"].fertility, 17.0 / 8.0);
    assert_eq!(report.by_lang["en"].fertility, 11.0 / 5.0);
    assert!(report.skipped.is_empty());
}

#[test]
fn fixture_alignment_matches_sidecars() {
    for r in fixture_records().iter().filter(|r| r.lang.as_deref() == Some("ne")) {
        let meta: TensorMeta = serde_json::from_str(
            &fs::read_to_string(common::fixture(&format!("attn/{}.meta.json", r.id.as_ref().unwrap()))).unwrap(),
        )
        .unwrap();
        let spans = align_tokens_to_words(&r.text, &r.tokens).unwrap();
        assert_eq!(spans, meta.words);
        assert_eq!(Some(spans), oracle(&r.text, &r.tokens));
    }
}

#[test]
fn sharded_accumulation_equals_single_pass() {
    let recs = fixture_records();
    let mut a = FertilityAccumulator::new();
    recs[..1].iter().for_each(|r| a.add(r));
    let mut b = FertilityAccumulator::new();
    recs[1..].iter().for_each(|r| b.add(r));
    a.merge(b);
    assert_eq!(a.finish(), fertility_stats(&recs));
}

fn tokenized_text() -> impl Strategy<Value = (String, TokenOffsets)> {
    let word = prop_oneof![Just("नेपाल"), Just("पुर्‍याउन"), Just("छ।"), Just("river"), Just("a"), Just("संवत्‌को"),];
    let gap = prop_oneof![Just(" "), Just("  "), Just("\n")];
    (prop::collection::vec((word, gap), 1..8), any::<u64>(), any::<bool>()).prop_map(|(parts, seed, bos)| {
        let text: String = parts.iter().map(|(w, g)| format!("{w}{g}")).collect::<String>();
        let text = text.trim_end().to_owned();
        let n = text.chars().count();
        let mut cuts: Vec<usize> =
            (1..n).filter(|i| (seed.rotate_left(*i as u32) ^ (*i as u64 * 31)).is_multiple_of(3)).collect();
        cuts.insert(0, 0);
        cuts.push(n);
        let mut tokens = Vec::new();
        let mut offsets = Vec::new();
        if bos {
            tokens.push("<s>".to_owned());
            offsets.push((0, 0));
        }
        let chars: Vec<char> = text.chars().collect();
        for w in cuts.windows(2) {
            tokens.push(chars[w[0]..w[1]].iter().collect());
            offsets.push((w[0], w[1]));
        }
        (text, TokenOffsets { tokens, offsets })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn alignment_agrees_with_containment_oracle((text, toks) in tokenized_text()) {
        let got = align_tokens_to_words(&text, &toks).ok();
        prop_assert_eq!(got, oracle(&text, &toks));
    }

    #[test]
    fn token_count_is_conserved((text, toks) in tokenized_text()) {
        if let Ok(spans) = align_tokens_to_words(&text, &toks) {
            let covered: usize = spans.iter().map(|s| s.tok_end - s.tok_start).sum();
            prop_assert_eq!(covered, toks.tokens.len());
        }
    }
}
