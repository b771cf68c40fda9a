use std::io::Write;

use forge_core::evalkit::{bench_table, gen_score_stats, BenchScore, GenScoreRecord, DEFAULT_K};
use forge_core::jsonl::Records;

use super::intake;
use crate::cli::{Format, ReportCommand};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::io::{create_output, for_each_record, open_input};

fn emit(text: &str) -> CliResult {
    let mut out = create_output(None)?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn run(cfg: &Config, cmd: ReportCommand) -> CliResult {
    match cmd {
        ReportCommand::Bench { input, out, k, models } => {
            let k = cfg.pick(k, "report.k", DEFAULT_K)?;
            let models: Vec<String> = match models {
                Some(m) => m,
                None => cfg
                    .get::<String>("report.models")?
                    .map(|s| s.split(',').map(|m| m.trim().to_owned()).filter(|m| !m.is_empty()).collect())
                    .unwrap_or_default(),
            };
            let mut scores = Vec::new();
            for item in Records::<_, BenchScore>::new(open_input(&input)?) {
                scores.push(item.map_err(|e| CliError::from(e).context(input.display()))?.1);
            }
            let table = bench_table(&scores, k, &models)?;
            match out {
                Format::Md => emit(&table.to_markdown()),
                Format::Csv => emit(&table.to_csv()?),
            }
        }
        ReportCommand::Gen { input, out, leniency } => {
            let mut intake = intake(cfg, &leniency)?;
            let mut records = Vec::new();
            for_each_record(&input, &mut intake, |_, _, r: GenScoreRecord| {
                records.push(r);
                Ok(())
            })?;
            let report = gen_score_stats(&records);
            for r in &report.rejected {
                intake.reject(format!("record {}: {}", r.id, r.reason))?;
            }
            for _ in 0..records.len() - report.rejected.len() {
                intake.accept();
            }
            match out {
                Format::Md => emit(&report.to_markdown())?,
                Format::Csv => emit(&report.to_csv()?)?,
            }
            intake.finish("report gen")
        }
    }
}
