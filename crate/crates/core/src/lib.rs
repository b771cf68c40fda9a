//! Data preparation and analysis toolkit for adapting a pretrained language
//! model to Nepali: corpus construction, chrF++ round-trip filtering,
//! bilingual corpus formatting, token fertility, attention pooling and
//! benchmark reporting.

pub mod attnmap;
pub mod corpus;
pub mod evalkit;
pub mod fertility;
pub mod interleave;
pub mod jsonl;
pub mod quality;
