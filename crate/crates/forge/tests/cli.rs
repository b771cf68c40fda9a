use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn forge<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_forge"))
        .args(args)
        .env("FORGE_LOG", "warn")
        .env_remove("FORGE_CONFIG")
        .output()
        .expect("forge runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn lines(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&forge(["--help"])), 0);
    assert_eq!(code(&forge(["--version"])), 0);
    assert_eq!(code(&forge(["frobnicate"])), 1);
    assert_eq!(code(&forge(["validate", "--in", p(&fixture("pairs.jsonl")), "--bogus"])), 1);
    assert_eq!(code(&forge(["validate"])), 1);
    assert_eq!(code(&forge(["validate", "--in", "/definitely/not/here.jsonl"])), 2);
    assert_eq!(code(&forge(["attn", "pool", "--in", "/definitely/not/here.atnt"])), 2);
}

#[test]
fn errors_are_json_log_lines() {
    let out = forge(["validate", "--in", "/definitely/not/here.jsonl"]);
    let stderr = String::from_utf8(out.stderr).unwrap();
    let last: Value = serde_json::from_str(stderr.lines().last().unwrap()).unwrap();
    assert_eq!(last["level"], "ERROR");
    assert!(last["fields"]["message"].as_str().unwrap().contains("here.jsonl"));
}

#[test]
fn validate_summary() {
    let v = json(&forge(["validate", "--in", p(&fixture("pairs.jsonl"))]));
    assert_eq!(v["total"], 5);
    assert_eq!(v["loaded"], 5);
    assert_eq!(v["aligned"], 3);
    assert_eq!(v["unaligned"], 2);
}

#[test]
fn malformed_lines_follow_the_failure_ratio() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("pairs.jsonl");
    let mut text = fs::read_to_string(fixture("pairs.jsonl")).unwrap();
    text.push_str("{not json\n");
    fs::write(&input, text).unwrap();

    // One bad line in six is above the 1% default.
    assert_eq!(code(&forge(["validate", "--in", p(&input)])), 1);
    let v = json(&forge(["validate", "--in", p(&input), "--max-failure-ratio", "0.2"]));
    assert_eq!(v["failed"], 1);
    assert_eq!(v["loaded"], 5);
    assert_eq!(code(&forge(["validate", "--in", p(&input), "--max-failure-ratio", "0.2", "--strict"])), 1);
}

#[test]
fn segment_documents() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("docs.jsonl");
    fs::write(
        &input,
        "{\"id\":\"d1\",\"lang\":\"ne\",\"text\":\"नेपाल सुन्दर छ। हिमाल अग्लो छ।\"}\n\
         {\"id\":\"d2\",\"lang\":\"ne\",\"text\":\"के तपाईं आउनुहुन्छ? हो!\"}\n",
    )
    .unwrap();
    let out = forge(["segment", "--lang", "ne", "--in", p(&input)]);
    assert_eq!(code(&out), 0);
    let docs = lines(&stdout(&out));
    assert_eq!(docs.len(), 2);
    let s = docs[0]["sentences"].as_array().unwrap();
    assert_eq!(s.len(), 2);
    assert_eq!(s[0]["text"], "नेपाल सुन्दर छ।");
    assert_eq!(s[0]["start"], 0);
    assert_eq!(s[0]["end"], 15);
    assert_eq!(docs[1]["sentences"].as_array().unwrap().len(), 2);

    // Documents tagged with another language are rejected.
    assert_eq!(code(&forge(["segment", "--lang", "en", "--in", p(&input)])), 1);
}

#[test]
fn chrf_matches_reference_implementation() {
    let dir = TempDir::new().unwrap();
    let (hyp, reference) = (dir.path().join("hyp.txt"), dir.path().join("ref.txt"));
    fs::write(&hyp, "the cat sat\n").unwrap();
    fs::write(&reference, "the cat sat down\n").unwrap();
    let v = json(&forge(["chrf", "--hyp", p(&hyp), "--ref", p(&reference)]));
    // sacrebleu CHRF(word_order=2, eps_smoothing=True): 68.24387633473341
    assert_eq!(v["chrfpp"].as_f64().unwrap(), 68.2439);
    assert_eq!(v["segments"], 1);

    fs::write(&reference, "a\nb\n").unwrap();
    assert_eq!(code(&forge(["chrf", "--hyp", p(&hyp), "--ref", p(&reference)])), 1);
}

#[test]
fn filter_and_report() {
    let dir = TempDir::new().unwrap();
    let (kept, report) = (dir.path().join("kept.jsonl"), dir.path().join("report.json"));
    let out = forge(["filter", "--in", p(&fixture("triplets.jsonl")), "--out", p(&kept), "--report", p(&report)]);
    assert_eq!(code(&out), 0);
    let kept = lines(&fs::read_to_string(&kept).unwrap());
    assert_eq!(kept.len(), 3);
    for t in &kept {
        assert!(t["chrfpp"].as_f64().unwrap() >= 50.0);
    }
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["total"], 6);
    assert_eq!(r["kept"], 3);
    assert_eq!(r["discard_reasons"]["missing_backtranslation"], 1);
    assert_eq!(r["discard_reasons"]["below_cutoff"], 2);
}

#[test]
fn config_precedence() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("stops.txt"), "Prof.\n").unwrap();
    let conf = dir.path().join("forge.conf");
    fs::write(&conf, "stoplist = stops.txt\nfilter.cutoff = 0\n").unwrap();
    let triplets = fixture("triplets.jsonl");
    let count = |out: Output| {
        assert_eq!(code(&out), 0);
        stdout(&out).lines().count()
    };

    assert_eq!(count(forge(["filter", "--in", p(&triplets)])), 3);
    assert_eq!(count(forge(["filter", "--config", p(&conf), "--in", p(&triplets)])), 5);
    assert_eq!(count(forge(["filter", "--config", p(&conf), "--cutoff", "50", "--in", p(&triplets)])), 3);
    let via_env = Command::new(env!("CARGO_BIN_EXE_forge"))
        .args(["filter", "--in", p(&triplets)])
        .env("FORGE_LOG", "warn")
        .env("FORGE_CONFIG", &conf)
        .output()
        .unwrap();
    assert_eq!(count(via_env), 5);

    // The relative stop-list lacks "Dr.", so the English side of the doctor pair splits too.
    let pairs = fixture("pairs.jsonl");
    let v = json(&forge(["validate", "--config", p(&conf), "--in", p(&pairs)]));
    assert_eq!(v["aligned"], 4);
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/abbreviations.txt");
    let v = json(&forge(["validate", "--config", p(&conf), "--stoplist", p(&shipped), "--in", p(&pairs)]));
    assert_eq!(v["aligned"], 3);

    fs::write(&conf, "filter.cutof = 10\n").unwrap();
    assert_eq!(code(&forge(["filter", "--config", p(&conf), "--in", p(&triplets)])), 1);
    assert_eq!(code(&forge(["filter", "--config", "/no/such.conf", "--in", p(&triplets)])), 2);
}

#[test]
fn shipped_config_is_valid() {
    let conf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/forge.conf");
    let v = json(&forge(["validate", "--config", p(&conf), "--in", p(&fixture("pairs.jsonl"))]));
    assert_eq!(v["aligned"], 3);
}

#[test]
fn translate_records() {
    let out = forge(["make-translate", "--in", p(&fixture("pairs.jsonl")), "--offset", "1", "--limit", "2"]);
    assert_eq!(code(&out), 0);
    let recs = lines(&stdout(&out));
    assert_eq!(recs.len(), 2);
    let prompt = recs[0]["prompt"].as_str().unwrap();
    assert!(prompt.starts_with("Translate the following English text to Nepali."));
    assert!(prompt.trim_end().ends_with("Nepali:"));
    assert!(!recs[0]["target"].as_str().unwrap().is_empty());

    let dir = TempDir::new().unwrap();
    let template = dir.path().join("t.txt");
    fs::write(&template, "EN: {src}\nNE:").unwrap();
    let out = forge(["make-translate", "--in", p(&fixture("pairs.jsonl")), "--template", p(&template), "--limit", "1"]);
    assert!(lines(&stdout(&out))[0]["prompt"].as_str().unwrap().starts_with("EN: "));
    fs::write(&template, "no placeholder").unwrap();
    assert_eq!(code(&forge(["make-translate", "--in", p(&fixture("pairs.jsonl")), "--template", p(&template)])), 1);
}

#[test]
fn bilingual_records_alternate() {
    let out = forge(["make-bilingual", "--in", p(&fixture("pairs.jsonl")), "--offset", "0"]);
    assert_eq!(code(&out), 0);
    let recs = lines(&stdout(&out));
    // Unaligned pairs are dropped.
    assert_eq!(recs.len(), 3);
    assert_eq!(recs[0]["lead_lang"], "ne");
    let text = recs[0]["text"].as_str().unwrap();
    assert!(text.starts_with("नेपालको"));
    assert!(text.contains("The precise origin"));

    let out = forge(["make-bilingual", "--in", p(&fixture("pairs.jsonl")), "--offset", "0", "--lead", "en"]);
    for r in lines(&stdout(&out)) {
        assert_eq!(r["lead_lang"], "en");
    }
    assert_eq!(code(&forge(["make-bilingual", "--in", p(&fixture("pairs.jsonl")), "--lead", "fr"])), 1);
}

#[test]
fn manifest_per_stage() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("c.jsonl");
    fs::write(&corpus, "{}\n{}\n{}\n").unwrap();
    for (stage, rank, params) in [
        ("pretrain_translate", 128, 335_000_000u64),
        ("pretrain_bilingual", 128, 335_000_000),
        ("finetune", 16, 41_000_000),
    ] {
        let v = json(&forge(["manifest", "--stage", stage, "--corpus", p(&corpus)]));
        assert_eq!(v["stage"], stage);
        assert_eq!(v["lora_rank"], rank);
        assert_eq!(v["approx_trainable_params"], params);
        assert_eq!(v["num_records"], 3);
        assert_eq!(v["quantization"], "4-bit");
    }
    assert_eq!(code(&forge(["manifest", "--stage", "warmup", "--corpus", p(&corpus)])), 1);
}

#[test]
fn fertility_totals() {
    let v = json(&forge(["fertility", "--in", p(&fixture("fertility.jsonl")), "--by-lang"]));
    assert_eq!(v["total_tokens"], 28);
    assert_eq!(v["total_words"], 13);
    assert_eq!(v["fertility"].as_f64().unwrap(), 28.0 / 13.0);
    assert_eq!(v["by_lang"]["ne"]["fertility"].as_f64().unwrap(), 17.0 / 8.0);
    assert_eq!(v["by_lang"]["en"]["fertility"].as_f64().unwrap(), 11.0 / 5.0);
}

fn assert_matrix(v: &Value, expected: &Value) {
    let (got, want) = (v.as_array().unwrap(), expected.as_array().unwrap());
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        for (a, b) in g.as_array().unwrap().iter().zip(w.as_array().unwrap()) {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn attention_pipeline() {
    let oracle: Value = serde_json::from_str(&fs::read_to_string(fixture("attn/oracle.json")).unwrap()).unwrap();
    let dir = TempDir::new().unwrap();
    let annotations = fixture("attn/annotations.jsonl");

    for mode in ["max", "mean"] {
        let pooled = json(&forge(["attn", "pool", "--in", p(&fixture("attn/s1.atnt")), "--mode", mode]));
        assert_eq!(pooled["pooling"], mode);
        assert_eq!(pooled["words"].as_array().unwrap().len(), 4);
        let c = json(&forge([
            "attn",
            "concept",
            "--annotations",
            p(&annotations),
            "--relation",
            "adj-noun",
            "--mode",
            mode,
        ]));
        assert_eq!(c["n_pairs"], 2);
        assert_matrix(&c["values"], &oracle[mode]["adj_noun"]);
    }

    // Several relations without --relation is ambiguous.
    assert_eq!(code(&forge(["attn", "concept", "--annotations", p(&annotations)])), 1);

    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for (path, rel) in [(&a, "adj-noun"), (&b, "subj-verb")] {
        let out = forge(["attn", "concept", "--annotations", p(&annotations), "--relation", rel, "--out", p(path)]);
        assert_eq!(code(&out), 0);
    }
    let prefix = dir.path().join("heat");
    assert_eq!(code(&forge(["attn", "render", "--in", p(&a), "--out", p(&prefix)])), 0);
    assert!(fs::read(dir.path().join("heat.ppm")).unwrap().starts_with(b"P6"));
    assert_eq!(fs::read_to_string(dir.path().join("heat.csv")).unwrap().lines().count(), 5);

    let r = json(&forge(["attn", "compare", "--a", p(&a), "--b", p(&b), "--top-k", "3"]));
    assert_eq!(r["top_a"].as_array().unwrap().len(), 3);
    let self_sim = json(&forge(["attn", "compare", "--a", p(&a), "--b", p(&a)]));
    assert!((self_sim["cosine"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn bench_report() {
    let out = forge(["report", "bench", "--in", p(&fixture("bench_scores.jsonl"))]);
    assert_eq!(code(&out), 0);
    let md = stdout(&out);
    assert!(md.contains("| ARC-Challenge | 0.3183 | 0.3797 | +19.29 |"));
    assert!(md.contains("| Mean % change |  |  | +9.54 |"));

    let out = forge(["report", "bench", "--in", p(&fixture("bench_scores.jsonl")), "--out", "csv", "--models", "base"]);
    let csv = stdout(&out);
    assert!(csv.lines().next().unwrap().starts_with("Benchmark,base 0-shot"));
}

#[test]
fn gen_report() {
    let out = forge(["report", "gen", "--in", p(&fixture("genscores.jsonl")), "--out", "csv"]);
    assert_eq!(code(&out), 0);
    let csv = stdout(&out);
    assert_eq!(csv.lines().filter(|l| l.starts_with("adapted,")).count(), 5);

    let dir = TempDir::new().unwrap();
    let input = dir.path().join("g.jsonl");
    let mut text = fs::read_to_string(fixture("genscores.jsonl")).unwrap();
    text.push_str("{\"id\":\"bad\",\"model\":\"base\",\"scores\":{\"correctness\":11}}\n");
    fs::write(&input, text).unwrap();
    assert_eq!(code(&forge(["report", "gen", "--in", p(&input)])), 1);
    assert_eq!(code(&forge(["report", "gen", "--in", p(&input), "--max-failure-ratio", "0.05"])), 0);
}

#[test]
fn outputs_are_deterministic() {
    let run = |args: &[&str]| {
        let out = forge(args);
        assert_eq!(code(&out), 0);
        out.stdout
    };
    let pairs = fixture("pairs.jsonl");
    let triplets = fixture("triplets.jsonl");
    for args in [
        vec!["make-bilingual", "--in", p(&pairs), "--offset", "0"],
        vec!["make-translate", "--in", p(&pairs), "--sample", "2", "--seed", "7"],
        vec!["filter", "--in", p(&triplets)],
        vec!["report", "gen", "--in", p(&fixture("genscores.jsonl"))],
    ] {
        let one = run(&[&["--jobs", "1"][..], &args].concat());
        let many = run(&[&["--jobs", "4"][..], &args].concat());
        assert_eq!(one, many, "{args:?}");
        assert_eq!(one, run(&args), "{args:?}");
    }
}
