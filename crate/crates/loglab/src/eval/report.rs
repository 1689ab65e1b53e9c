//! Human-readable rendering of evaluation reports.

use std::fmt::Write;

use super::EvaluationReport;

/// Markdown rendering mirroring the combination table, per-level table,
/// level-distance histogram and position-distance buckets.
pub fn render_markdown(title: &str, report: &EvaluationReport) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "# Evaluation report: {title}\n");
    let _ = writeln!(
        md,
        "Instances: {} (scored {}, not located {}, wrong syntax {}, missing {})\n",
        report.total_instances,
        report.scored_count,
        report.not_located_count,
        report.wrong_syntax_count,
        report.missing_predictions
    );

    md.push_str("## Component combinations\n\n");
    md.push_str("| Level | Position | Message | % | Count |\n");
    md.push_str("|---|---|---|---:|---:|\n");
    for row in &report.combination_rows {
        let _ = writeln!(
            md,
            "| {} | {} | {} | {:.2} | {} |",
            row.level.symbol(),
            row.position.symbol(),
            row.message.symbol(),
            row.percent,
            row.count
        );
    }
    let _ = writeln!(
        md,
        "| wrong syntax | | | {:.2} | {}/{} |\n",
        report.wrong_syntax_percent, report.wrong_syntax_count, report.total_instances
    );

    md.push_str("## Per-level breakdown\n\n");
    md.push_str("| Level | Instances | Level correct % | Fully correct % | Mean chars |\n");
    md.push_str("|---|---:|---:|---:|---:|\n");
    for row in &report.per_level {
        let _ = writeln!(
            md,
            "| {} | {} | {:.2} | {:.2} | {:.1} |",
            row.level, row.count, row.level_accuracy_percent, row.fully_correct_percent, row.mean_message_chars
        );
    }
    md.push('\n');

    md.push_str("## Level distance (0 = correct level)\n\n");
    md.push_str("| Distance | 0 | 1 | 2 | 3 | 4 | 5 |\n|---|---:|---:|---:|---:|---:|---:|\n");
    let h = &report.level_distance_histogram;
    let _ = writeln!(md, "| Count | {} | {} | {} | {} | {} | {} |\n", h[0], h[1], h[2], h[3], h[4], h[5]);

    md.push_str("## Position distance (input tokens)\n\n");
    md.push_str("| Exact | <=50 | <=100 | >100 |\n|---:|---:|---:|---:|\n");
    let b = &report.position_buckets;
    let _ = writeln!(md, "| {} | {} | {} | {} |\n", b.exact, b.within_50, b.within_100, b.beyond_100);

    let _ = writeln!(
        md,
        "Mean BLEU-4: {:.4} over all instances, {:.4} over located instances.",
        report.mean_bleu4, report.mean_bleu4_located
    );
    md
}

/// Side-by-side comparison of several evaluated prediction files.
pub fn render_comparison_markdown(entries: &[(String, EvaluationReport)]) -> String {
    let mut md = String::new();
    md.push_str("# Model comparison\n\n");
    md.push_str("| Metric |");
    for (name, _) in entries {
        let _ = write!(md, " {name} |");
    }
    md.push('\n');
    md.push_str("|---|");
    md.push_str(&"---:|".repeat(entries.len()));
    md.push('\n');

    let metric = |md: &mut String, label: &str, f: &dyn Fn(&EvaluationReport) -> String| {
        let _ = write!(md, "| {label} |");
        for (_, r) in entries {
            let _ = write!(md, " {} |", f(r));
        }
        md.push('\n');
    };

    metric(&mut md, "Instances", &|r| r.total_instances.to_string());
    metric(&mut md, "Level correct %", &|r| format!("{:.2}", r.combination_rows[0].percent));
    metric(&mut md, "Position correct %", &|r| format!("{:.2}", r.combination_rows[1].percent));
    metric(&mut md, "Message correct %", &|r| format!("{:.2}", r.combination_rows[2].percent));
    metric(&mut md, "Fully correct %", &|r| {
        format!("{:.2}", r.combination_rows.last().unwrap().percent)
    });
    metric(&mut md, "Wrong syntax %", &|r| format!("{:.2}", r.wrong_syntax_percent));
    metric(&mut md, "Mean BLEU-4", &|r| format!("{:.4}", r.mean_bleu4));
    md
}
