//! Acceptance suite. Runs without the default test harness so every
//! criterion prints exactly one PASS/FAIL line; the process exits
//! nonzero if any criterion fails.

mod common;

use std::collections::{HashMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::prelude::*;

use loglab::cli::{run_build, run_mine};
use loglab::config::RunConfig;
use loglab::baseline::{predict_all, BaselineKind};
use loglab::dataset::{
    build_all, build_ft, build_p1, count_sentinels, filter_methods, split, BuildOptions,
    DatasetInstance, Split, Task,
};
use loglab::eval::{aggregate, bleu::bleu4, reference_insertion, score, EvaluationOutcome, Mark};
use loglab::lexer;
use loglab::logstmt::{
    level_distance, locate_injected_statement, remove_log, reinsert, LogDetector, LogLevel,
    ALL_LEVELS,
};
use loglab::method::{count_tokens, syntax_check};

fn main() {
    let criteria: &[(&str, fn())] = &[
        ("dataset multiplicity", c1_dataset_multiplicity),
        ("filter boundaries", c2_filter_boundaries),
        ("removal round-trip", c3_removal_roundtrip),
        ("mask arithmetic", c4_mask_arithmetic),
        ("split ratios and grouping", c5_split),
        ("evaluator oracle equivalence", c6_evaluator_oracle),
        ("BLEU-4 oracle", c7_bleu_oracle),
        ("report consistency", c8_report_consistency),
        ("level-distance metric", c9_level_distance_metric),
        ("baseline validity", c10_baseline_validity),
        ("throughput", c11_throughput),
    ];

    let mut failed = 0usize;
    for (name, f) in criteria {
        let start = Instant::now();
        match catch_unwind(AssertUnwindSafe(f)) {
            Ok(()) => println!("[PASS] {name} ({} ms)", start.elapsed().as_millis()),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .map(String::as_str)
                    .or_else(|| e.downcast_ref::<&str>().copied())
                    .unwrap_or("panic");
                println!("[FAIL] {name}: {msg}");
                failed += 1;
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn det() -> LogDetector {
    LogDetector::default()
}

/// Methods with log counts {1,2,3} routed to both pools yield one
/// instance per log statement: 6 P2 and 6 FT.
fn c1_dataset_multiplicity() {
    let start = Instant::now();
    let mut records = Vec::new();
    for (i, n_logs) in [1usize, 2, 3].into_iter().enumerate() {
        let logs: Vec<(usize, String)> = (0..n_logs)
            .map(|k| (k + 1, common::log_stmt(common::LEVELS[k], 10 * i + k)))
            .collect();
        let src = common::method_source(&format!("multi{i}"), 4, &logs);
        records.push(common::record_of(&src, &format!("Multi{i}.java")));
    }
    let opts = BuildOptions { p2_share: None, ..Default::default() };
    let out = build_all(records, &opts).unwrap();
    assert_eq!(out.p2.len(), 6, "expected 6 P2 instances, got {}", out.p2.len());
    assert_eq!(out.ft.len(), 6, "expected 6 FT instances, got {}", out.ft.len());
    assert!(start.elapsed().as_secs() < 1, "multiplicity fixture took >= 1 s");
}

/// 9-token methods are dropped, 10 and 511 kept, 512 dropped.
fn c2_filter_boundaries() {
    for (n, kept) in [(9usize, false), (10, true), (511, true), (512, false)] {
        let m = common::record_with_token_count(n);
        assert_eq!(count_tokens(&m), n);
        let out = filter_methods(vec![m]);
        assert_eq!(out.len(), usize::from(kept), "filter wrong for {n}-token method");
    }
}

/// Over >= 500 (method, k) pairs — plain and guard-wrapped logs at
/// random slots — reinserting the removed statement reproduces the
/// original token text exactly.
fn c3_removal_roundtrip() {
    let start = Instant::now();
    let d = det();
    let mut rng = common::rng(11);
    let mut pairs = 0usize;
    let mut i = 0usize;
    while pairs < 500 {
        let n_stmts = rng.gen_range(2..=7);
        let n_logs = rng.gen_range(1..=3);
        let mut logs = Vec::new();
        for _ in 0..n_logs {
            let tag = rng.gen_range(0..1_000_000);
            let level = common::LEVELS[rng.gen_range(0..6)];
            let stmt = if rng.gen_bool(0.3) {
                format!(
                    "if (logger.is{}Enabled()) {{ {} }}",
                    capitalize(level),
                    common::log_stmt(level, tag)
                )
            } else {
                common::log_stmt(level, tag)
            };
            logs.push((rng.gen_range(0..=n_stmts), stmt));
        }
        let src = common::method_source(&format!("rt{i}"), n_stmts, &logs);
        let m = common::record_of(&src, &format!("Rt{i}.java"));
        let found = d.find_log_statements(&m);
        assert!(!found.is_empty(), "fixture {i} lost its log statements");
        for k in 0..found.len() {
            let (reduced, removed) = remove_log(&m, k, &d).unwrap();
            let restored = reinsert(&reduced, &removed);
            assert_eq!(
                lexer::render(&restored),
                m.normalized_text(),
                "round-trip mismatch for method {i}, k={k}"
            );
            pairs += 1;
        }
        i += 1;
    }
    assert!(start.elapsed().as_secs() < 10, "round-trip suite took >= 10 s");
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
        None => String::new(),
    }
}

/// 1,000 P1 instances: sentinel count == floor(0.15 * token count).
fn c4_mask_arithmetic() {
    let mut rng = common::rng(13);
    for i in 0..1000 {
        let n = rng.gen_range(10..=500);
        let m = common::record_with_token_count(n);
        let inst = build_p1(&m, 0.15, i).unwrap();
        let expected = (0.15 * n as f64).floor() as usize;
        assert_eq!(
            count_sentinels(&inst.input),
            expected,
            "mask count wrong for n={n}, seed={i}"
        );
    }
}

fn synthetic_instances(n_methods: usize, max_per_method: usize, rng: &mut impl Rng) -> Vec<DatasetInstance> {
    let mut out = Vec::new();
    for mi in 0..n_methods {
        let k = rng.gen_range(1..=max_per_method);
        for j in 0..k {
            out.push(DatasetInstance {
                instance_id: format!("FT-m{mi}-{j}"),
                task: Task::FT,
                method_id: format!("m{mi}"),
                removed_index: Some(j),
                input: String::new(),
                target: String::new(),
            });
        }
    }
    out
}

/// 100 single-instance methods split exactly 80/10/10; over fixtures
/// totalling > 10,000 instances no method_id ever straddles splits.
fn c5_split() {
    let mut rng = common::rng(17);
    let singles = synthetic_instances(100, 1, &mut rng);
    let a = split(&singles, [0.8, 0.1, 0.1], 7).unwrap();
    let mut counts: HashMap<Split, usize> = HashMap::new();
    for inst in &singles {
        *counts.entry(a.get(&inst.instance_id).unwrap()).or_default() += 1;
    }
    assert_eq!(counts[&Split::Train], 80);
    assert_eq!(counts[&Split::Eval], 10);
    assert_eq!(counts[&Split::Test], 10);

    let mut total = 0usize;
    let mut trial = 0u64;
    while total < 10_000 {
        let instances = synthetic_instances(rng.gen_range(3..60), 6, &mut rng);
        let assign = split(&instances, [0.8, 0.1, 0.1], trial).unwrap();
        let mut by_method: HashMap<&str, HashSet<Split>> = HashMap::new();
        for inst in &instances {
            by_method
                .entry(inst.method_id.as_str())
                .or_default()
                .insert(assign.get(&inst.instance_id).unwrap());
        }
        for (mid, splits) in by_method {
            assert_eq!(splits.len(), 1, "method {mid} straddles splits in trial {trial}");
        }
        total += instances.len();
        trial += 1;
    }
}

/// 200 (instance, prediction) pairs built by deliberate perturbation
/// with hand-derivable truth: level swap, anchor shift, message edit,
/// bracket deletion.
fn c6_evaluator_oracle() {
    let d = det();
    let mut rng = common::rng(19);
    for j in 0..200usize {
        let n_stmts = rng.gen_range(4..=8);
        let p = rng.gen_range(1..=n_stmts);
        let level = common::LEVELS[rng.gen_range(0..6)];
        let src = common::method_source(
            &format!("ev{j}"),
            n_stmts,
            &[(p, common::log_stmt(level, j))],
        );
        let m = common::record_of(&src, &format!("Ev{j}.java"));
        let ft = build_ft(&m, 0, &d).unwrap();
        let reference = reference_insertion(&ft, &d).unwrap();
        assert_eq!(reference.level, LogLevel::from_name(level).unwrap());

        match j % 4 {
            0 => {
                // Level swap: only the level identifier changes.
                let other = common::LEVELS[(common::LEVELS.iter().position(|l| *l == level).unwrap()
                    + 1 + rng.gen_range(0..5))
                    % 6];
                let pred = ft.target.replace(
                    &format!(" . {level} ( "),
                    &format!(" . {other} ( "),
                );
                let o = score(&ft, Some(&pred), &d).unwrap();
                let expected_dist = level_distance(
                    LogLevel::from_name(level).unwrap(),
                    LogLevel::from_name(other).unwrap(),
                );
                assert!(o.valid_syntax && o.located, "level swap must still locate (j={j})");
                assert!(!o.level_correct && o.position_correct && !o.message_correct, "j={j}");
                assert_eq!(o.level_distance, Some(expected_dist), "j={j}");
                assert_eq!(o.position_distance, Some(0), "j={j}");
            }
            1 => {
                // Anchor shift: same statement, s plain statements (4
                // tokens each) earlier.
                let s = rng.gen_range(1..=p);
                let shifted_anchor = reference.anchor - 4 * s;
                let input = lexer::tokenize(&ft.input).unwrap();
                let mut texts: Vec<String> = input.iter().map(|t| t.text.clone()).collect();
                texts.splice(shifted_anchor..shifted_anchor, reference.statement_texts.clone());
                let pred = lexer::render_texts(&texts);
                let o = score(&ft, Some(&pred), &d).unwrap();
                assert!(o.located, "shifted statement must locate (j={j})");
                assert!(o.level_correct && !o.position_correct && o.message_correct, "j={j}");
                assert_eq!(o.position_distance, Some(4 * s), "j={j}");
                assert_eq!(o.level_distance, Some(0), "j={j}");
            }
            2 => {
                // Message edit: string literal rewritten.
                let pred = ft
                    .target
                    .replace(&format!("\"msg{j} event\""), "\"completely different words\"");
                let o = score(&ft, Some(&pred), &d).unwrap();
                assert!(o.located, "message edit must still locate (j={j})");
                assert!(o.level_correct && o.position_correct && !o.message_correct, "j={j}");
                assert!(o.bleu4 > 0.0 && o.bleu4 < 1.0, "j={j}, bleu={}", o.bleu4);
            }
            _ => {
                // Bracket deletion: drop one closing parenthesis.
                let pred = ft.target.replacen(" ) ;", " ;", 1);
                let o = score(&ft, Some(&pred), &d).unwrap();
                assert!(!o.valid_syntax && !o.located, "j={j}");
                assert!(!o.level_correct && !o.position_correct && !o.message_correct, "j={j}");
                assert!(o.level_distance.is_none() && o.position_distance.is_none(), "j={j}");
            }
        }
    }
}

/// Independent brute-force BLEU-4: clipped n-gram precision by greedy
/// reference-gram consumption, epsilon smoothing, brevity penalty.
fn bleu_oracle(cand: &[String], refr: &[String]) -> f64 {
    if cand.is_empty() {
        return 0.0;
    }
    let mut log_sum = 0.0f64;
    for n in 1..=4usize {
        let p = if cand.len() < n {
            0.0
        } else {
            let ref_grams: Vec<&[String]> = refr.windows(n).collect();
            let mut used = vec![false; ref_grams.len()];
            let mut matched = 0usize;
            for gram in cand.windows(n) {
                for (ri, rgram) in ref_grams.iter().enumerate() {
                    if !used[ri] && *rgram == gram {
                        used[ri] = true;
                        matched += 1;
                        break;
                    }
                }
            }
            matched as f64 / (cand.len() - n + 1) as f64
        };
        log_sum += p.max(1e-9).ln();
    }
    let geo = (log_sum / 4.0).exp();
    let bp = if cand.len() < refr.len() {
        (1.0 - refr.len() as f64 / cand.len() as f64).exp()
    } else {
        1.0
    };
    (bp * geo).clamp(0.0, 1.0)
}

/// Worked example within 1e-9 of the closed form, and agreement with
/// the brute-force oracle on 50 random token-sequence pairs.
fn c7_bleu_oracle() {
    let cand: Vec<String> = "the cat sat on a mat".split(' ').map(String::from).collect();
    let refr: Vec<String> = "the cat sat on a rug".split(' ').map(String::from).collect();
    let closed = (5.0f64 / 6.0 * 4.0 / 5.0 * 3.0 / 4.0 * 2.0 / 3.0).powf(0.25);
    assert!((bleu4(&cand, &refr) - closed).abs() < 1e-9, "worked example mismatch");
    assert!((bleu_oracle(&cand, &refr) - closed).abs() < 1e-9, "oracle rejects worked example");

    let vocab = ["log", ".", "info", "(", ")", ";", "\"x\"", "a", "b", ","];
    let mut rng = common::rng(23);
    for i in 0..50 {
        fn seq(vocab: &[&str], len: usize, rng: &mut impl Rng) -> Vec<String> {
            (0..len).map(|_| vocab[rng.gen_range(0..vocab.len())].to_string()).collect()
        }
        let c_len = rng.gen_range(1..15);
        let c = seq(&vocab, c_len, &mut rng);
        let r_len = rng.gen_range(1..15);
        let r = seq(&vocab, r_len, &mut rng);
        let ours = bleu4(&c, &r);
        let oracle = bleu_oracle(&c, &r);
        assert!(
            (ours - oracle).abs() < 1e-9,
            "pair {i}: impl {ours} vs oracle {oracle} for {c:?} / {r:?}"
        );
    }
}

fn random_outcome(i: usize, rng: &mut impl Rng) -> EvaluationOutcome {
    let ref_level = ALL_LEVELS[rng.gen_range(0..6)];
    let missing = rng.gen_bool(0.05);
    let valid_syntax = !missing && rng.gen_bool(0.9);
    let located = valid_syntax && rng.gen_bool(0.9);
    let level_correct = located && rng.gen_bool(0.6);
    let position_correct = located && rng.gen_bool(0.5);
    let message_correct = located && rng.gen_bool(0.2);
    let pred_level = located.then(|| {
        if level_correct {
            ref_level
        } else {
            loop {
                let l = ALL_LEVELS[rng.gen_range(0..6)];
                if l != ref_level {
                    break l;
                }
            }
        }
    });
    EvaluationOutcome {
        instance_id: format!("i{i}"),
        missing,
        valid_syntax,
        located,
        level_correct,
        position_correct,
        message_correct,
        level_distance: pred_level.map(|p| level_distance(p, ref_level)),
        position_distance: located.then(|| if position_correct { 0 } else { rng.gen_range(1..400) }),
        bleu4: if message_correct { 1.0 } else { rng.gen_range(0.0..0.9) },
        pred_level,
        ref_level,
        message_chars: rng.gen_range(10..80),
    }
}

/// Monotone-row property over a 10,000-instance fuzz, and the
/// level-distance histogram's bin 0 equals the level-correct count.
fn c8_report_consistency() {
    let mut rng = common::rng(29);
    let outcomes: Vec<EvaluationOutcome> =
        (0..10_000).map(|i| random_outcome(i, &mut rng)).collect();
    let report = aggregate(&outcomes);

    let row = |l, p, m| {
        report
            .combination_rows
            .iter()
            .find(|r| r.level == l && r.position == p && r.message == m)
            .unwrap()
    };
    let level_any = row(Mark::Yes, Mark::Any, Mark::Any);
    let level_pos =
        row(Mark::Yes, Mark::Yes, Mark::No).count + row(Mark::Yes, Mark::Yes, Mark::Yes).count;
    let all = row(Mark::Yes, Mark::Yes, Mark::Yes);
    assert!(level_any.count >= level_pos, "P(level) < P(level & position)");
    assert!(level_pos >= all.count, "P(level & position) < P(all)");
    assert!(level_any.percent >= all.percent);

    let level_correct_total = outcomes.iter().filter(|o| o.level_correct).count();
    assert_eq!(
        report.level_distance_histogram[0], level_correct_total,
        "histogram bin 0 must equal the level-correct count"
    );
}

/// Exhaustive 6x6 metric check: symmetry, zero-iff-equal, triangle
/// inequality, and distance(Trace, Fatal) == 5.
fn c9_level_distance_metric() {
    for a in ALL_LEVELS {
        for b in ALL_LEVELS {
            let d = level_distance(a, b);
            assert!(d <= 5);
            assert_eq!(d, level_distance(b, a), "symmetry fails for {a:?},{b:?}");
            assert_eq!(d == 0, a == b, "zero-iff-equal fails for {a:?},{b:?}");
            for c in ALL_LEVELS {
                assert!(
                    level_distance(a, c) <= d + level_distance(b, c),
                    "triangle fails for {a:?},{b:?},{c:?}"
                );
            }
        }
    }
    assert_eq!(level_distance(LogLevel::Trace, LogLevel::Fatal), 5);
}

/// Both baselines produce syntactically valid, locatable predictions on
/// all of a 1,000-instance fixture.
fn c10_baseline_validity() {
    let d = det();
    let mut rng = common::rng(31);
    let mut instances = Vec::new();
    for i in 0..1000usize {
        let n_stmts = rng.gen_range(2..=7);
        let level = common::LEVELS[rng.gen_range(0..6)];
        let logs = vec![(rng.gen_range(0..=n_stmts), common::log_stmt(level, i))];
        let src = common::method_source(&format!("bv{i}"), n_stmts, &logs);
        let m = common::record_of(&src, &format!("Bv{i}.java"));
        instances.push(build_ft(&m, 0, &d).unwrap());
    }
    let train: Vec<&DatasetInstance> = instances.iter().take(200).collect();
    for kind in [BaselineKind::Heuristic, BaselineKind::Retrieval] {
        let preds = predict_all(kind, &instances, &train, &d).unwrap();
        assert_eq!(preds.len(), instances.len());
        for ((id, text), inst) in preds.iter().zip(&instances) {
            assert!(syntax_check(text), "{kind:?} emitted invalid syntax for {id}");
            let input = lexer::tokenize(&inst.input).unwrap();
            assert!(
                locate_injected_statement(&input, text, &d).is_some(),
                "{kind:?} prediction for {id} cannot be located"
            );
        }
    }
}

/// mine + build over a 10,000-method synthetic corpus in < 60 s.
fn c11_throughput() {
    let dir = tempfile::tempdir().unwrap();
    let roots = dir.path().join("corpus");
    let mut rng = common::rng(37);
    let mut methods = 0usize;
    for r in 0..10 {
        methods += common::write_repo(&roots, &format!("repo{r}"), 10, 100, 2, &mut rng);
    }
    assert_eq!(methods, 10_000);

    let cfg = RunConfig {
        roots: vec![roots],
        methods_file: dir.path().join("methods.jsonl"),
        data_dir: dir.path().join("data"),
        ..Default::default()
    };
    let start = Instant::now();
    let summary = run_mine(&cfg).unwrap();
    assert_eq!(summary.methods, 10_000, "miner lost methods");
    let stats = run_build(&cfg).unwrap();
    assert!(stats.ft_instances > 0 && stats.p1_instances > 0);
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "mine + build took {:.1} s (soft bound 60 s)",
        elapsed.as_secs_f64()
    );
}
