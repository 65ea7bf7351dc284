use std::fmt::Write;
use std::str::FromStr;

use super::{ClassMetrics, EvalReport, Rate};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
    Markdown,
}

#[derive(Debug, thiserror::Error)]
#[error("unknown report format `{0}` (expected text, json or markdown)")]
pub struct UnknownFormat(pub String);

impl FromStr for ReportFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Self::Text),
            "json" => Ok(Self::Json),
            "markdown" | "md" => Ok(Self::Markdown),
            _ => Err(UnknownFormat(s.to_string())),
        }
    }
}

/// Renders a report. JSON output parses back to an equal report.
pub fn render_report(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        ReportFormat::Text => text(report),
        ReportFormat::Markdown => markdown(report),
    }
}

fn pct(r: &Rate) -> String {
    format!("{:.2}%", r.value * 100.0)
}

fn flag(m: &ClassMetrics) -> &'static str {
    if m.undefined {
        " *"
    } else {
        ""
    }
}

fn footnote(report: &EvalReport) -> bool {
    report.task1.correct.undefined || report.task1.foil.undefined
}

fn text(r: &EvalReport) -> String {
    let t = &r.task1;
    let c = &t.confusion;
    let mut out = String::new();
    let scored = c.total();
    writeln!(out, "Task 1: caption classification ({scored} scored, {} skipped)", r.skipped.count).unwrap();
    writeln!(out, "{:<8} {:>9} {:>9} {:>9}", "Class", "Precision", "Recall", "F1").unwrap();
    for (name, m) in [("Correct", &t.correct), ("Foil", &t.foil)] {
        writeln!(out, "{:<8} {:>9.4} {:>9.4} {:>9.4}{}", name, m.precision, m.recall, m.f1, flag(m)).unwrap();
    }
    if footnote(r) {
        writeln!(out, "* undefined (empty class), reported as 0").unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "{:<8} {:>9} {:>9} {:>9}", "Accuracy", "Overall", "Correct", "Foil").unwrap();
    writeln!(
        out,
        "{:<8} {:>9} {:>9} {:>9}",
        "",
        pct(&t.overall_accuracy),
        pct(&t.correct_accuracy),
        pct(&t.foil_accuracy)
    )
    .unwrap();
    writeln!(out, "Confusion (foil positive): tp={} fp={} tn={} fn={}", c.tp, c.fp, c.tn, c.fn_).unwrap();
    writeln!(out).unwrap();
    for (name, rate) in [("Task 2: foil word detection", &r.task2), ("Task 3: foil word correction", &r.task3)] {
        writeln!(out, "{name:<29} {:>8}  ({}/{})", pct(rate), rate.hits, rate.total).unwrap();
    }
    if r.skipped.count > 0 {
        writeln!(out).unwrap();
        for (reason, n) in &r.skipped.reasons {
            writeln!(out, "Skipped ({reason}): {n}").unwrap();
        }
    }
    let p = &r.config_echo.pipeline;
    writeln!(out).unwrap();
    writeln!(out, "tau={} min_score={} similar_by={}", p.tau, p.min_score, p.similar_by).unwrap();
    out
}

fn markdown(r: &EvalReport) -> String {
    let t = &r.task1;
    let c = &t.confusion;
    let mut out = String::new();
    writeln!(out, "### Task 1: caption classification\n").unwrap();
    writeln!(out, "| Class | Precision | Recall | F1 |").unwrap();
    writeln!(out, "|---|---|---|---|").unwrap();
    for (name, m) in [("Correct", &t.correct), ("Foil", &t.foil)] {
        writeln!(out, "| {name}{} | {:.4} | {:.4} | {:.4} |", flag(m), m.precision, m.recall, m.f1).unwrap();
    }
    if footnote(r) {
        writeln!(out, "\n\\* undefined (empty class), reported as 0").unwrap();
    }
    writeln!(out, "\n| Overall | Correct | Foil |").unwrap();
    writeln!(out, "|---|---|---|").unwrap();
    writeln!(out, "| {} | {} | {} |", pct(&t.overall_accuracy), pct(&t.correct_accuracy), pct(&t.foil_accuracy))
        .unwrap();
    writeln!(out, "\nConfusion (foil positive): tp={} fp={} tn={} fn={}", c.tp, c.fp, c.tn, c.fn_).unwrap();
    writeln!(out, "\n### Tasks 2 and 3\n").unwrap();
    writeln!(out, "| Task | Accuracy | Hits | Denominator |").unwrap();
    writeln!(out, "|---|---|---|---|").unwrap();
    for (name, rate) in [("Foil word detection", &r.task2), ("Foil word correction", &r.task3)] {
        writeln!(out, "| {name} | {} | {} | {} |", pct(rate), rate.hits, rate.total).unwrap();
    }
    if r.skipped.count > 0 {
        writeln!(out, "\nSkipped: {}", r.skipped.count).unwrap();
        for (reason, n) in &r.skipped.reasons {
            writeln!(out, "- {reason}: {n}").unwrap();
        }
    }
    out
}
