use std::fs;
use std::path::Path;

use clap::Parser;
use glossrole::cli::{headword_of, is_circular, run, Cli, EXIT_FATAL, EXIT_OK, EXIT_PARTIAL};
use glossrole::corpus::read_corpus;
use glossrole::data::EXAMPLES_JSONL;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["glossrole"];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(argv).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(cli, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn label_examples_with_trace() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.jsonl", EXAMPLES_JSONL);
    let output = dir.path().join("out.jsonl");
    let out_s = output.to_str().unwrap();
    let (code, _, err) = invoke(&["label", "--input", &input, "--output", out_s, "--trace"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let labeled = read_corpus(&fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(labeled.records.len(), 15);
    assert!(labeled.records.iter().all(|r| r.predicted.is_some() && r.gold.is_some()));
    let trace = fs::read_to_string(format!("{out_s}.trace.jsonl")).unwrap();
    assert_eq!(trace.lines().count(), 15);
    assert!(trace.contains("\"divergence\""));

    let first = fs::read(&output).unwrap();
    invoke(&["label", "--input", &input, "--output", out_s]);
    assert_eq!(fs::read(&output).unwrap(), first);
}

#[test]
fn label_to_stdout_and_partial_records() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{}{}\nnot json\n",
        EXAMPLES_JSONL.lines().next().unwrap(),
        "\n{\"id\":\"no_tree\",\"pos\":\"noun\",\"gloss\":\"a thing\"}"
    );
    let input = write(dir.path(), "in.jsonl", &text);
    let (code, out, err) = invoke(&["label", "--input", &input]);
    assert_eq!(code, EXIT_PARTIAL);
    assert_eq!(out.lines().count(), 2);
    assert!(err.contains("line 3"));
    assert!(err.contains("no_tree: record has no parse tree"));
}

#[test]
fn empty_input_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "empty.jsonl", "");
    let (code, _, err) = invoke(&["label", "--input", &input]);
    assert_eq!(code, EXIT_FATAL);
    assert!(err.contains("zero records"));
}

#[test]
fn missing_lexicon_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.jsonl", EXAMPLES_JSONL);
    let (code, _, err) = invoke(&["label", "--input", &input, "--noun-lexicon", "/nonexistent/nouns.txt"]);
    assert_eq!(code, EXIT_FATAL);
    assert!(err.contains("nouns.txt"));
}

#[test]
fn external_resources_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let record = r#"{"id":"pup","pos":"noun","gloss":"a kind of young dog","tree":"(NP (NP (DT a) (NN kind)) (PP (IN of) (NP (JJ young) (NN dog))))","instance":false}"#;
    let input = write(dir.path(), "in.jsonl", record);
    let index = write(
        dir.path(),
        "index.noun",
        "  1 header line\ndog n 1 0 1 0 02084071\nkind n 1 0 1 0 05839024\n",
    );
    let config = write(dir.path(), "cfg.toml", "accessory_determiner_phrases = [\"a kind of\"]\n");
    let (code, out, err) = invoke(&["label", "--input", &input, "--noun-lexicon", &index, "--config", &config]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(
        out.contains(r#"{accessory_determiner|a kind of} {differentia_quality|young} {supertype|dog}"#),
        "{out}"
    );

    let bad = write(dir.path(), "bad.toml", "unknown_key = 1\n");
    let (code, _, _) = invoke(&["label", "--input", &input, "--config", &bad]);
    assert_eq!(code, EXIT_FATAL);
}

#[test]
fn stats_table() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.jsonl", EXAMPLES_JSONL);
    let (code, out, _) = invoke(&["stats", "--input", &input]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("Pattern"));
    assert!(lines[1].starts_with("(supertype) (differentia event)"));
    assert!(lines.last().unwrap().starts_with("Total"));
    assert!(lines.last().unwrap().contains("15"));

    let (code, _, err) = invoke(&["stats", "--input", &input, "--annotations", "predicted"]);
    assert_eq!(code, EXIT_FATAL);
    assert!(err.contains("no annotations"));
}

#[test]
fn eval_strict_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.jsonl", EXAMPLES_JSONL);
    let labeled = dir.path().join("labeled.jsonl");
    invoke(&["label", "--input", &input, "--output", labeled.to_str().unwrap()]);
    let labeled = labeled.to_str().unwrap();

    let (code, out, _) = invoke(&["eval", "--input", labeled]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("supertype accuracy: 1.000000"));
    assert!(out.contains("definitions: 15"));

    // One supertype wrong out of two: accuracy 0.5.
    let two = concat!(
        r#"{"id":"a","pos":"noun","gloss":"x y","instance":false,"gold":"{supertype|x} {differentia_quality|y}","predicted":"{supertype|x} {differentia_quality|y}"}"#,
        "\n",
        r#"{"id":"b","pos":"noun","gloss":"x y","instance":false,"gold":"{supertype|x} {differentia_quality|y}","predicted":"{differentia_quality|x} {supertype|y}"}"#,
        "\n"
    );
    let two = write(dir.path(), "two.jsonl", two);
    assert_eq!(invoke(&["eval", "--input", &two]).0, EXIT_OK);
    assert_eq!(invoke(&["eval", "--input", &two, "--strict"]).0, EXIT_FATAL);
    assert_eq!(invoke(&["eval", "--input", &two, "--strict", "--threshold", "0.5"]).0, EXIT_OK);
    let cfg = write(dir.path(), "t.toml", "supertype_threshold = 0.4\n");
    assert_eq!(invoke(&["eval", "--input", &two, "--strict", "--config", &cfg]).0, EXIT_OK);
}

#[test]
fn eval_alignment_error_names_records() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.jsonl", EXAMPLES_JSONL);
    let (code, _, err) = invoke(&["eval", "--input", &input]);
    assert_eq!(code, EXIT_FATAL);
    assert!(err.contains("footwear (no prediction)"));

    let shuffled: String = EXAMPLES_JSONL.lines().rev().map(|l| format!("{l}\n")).collect();
    let other = write(dir.path(), "rev.jsonl", &shuffled);
    let (code, _, err) = invoke(&["eval", "--input", &input, "--predicted", &other]);
    assert_eq!(code, EXIT_FATAL);
    assert!(err.contains("footwear"), "{err}");
}

#[test]
fn lint_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.jsonl", EXAMPLES_JSONL);
    let (code, out, _) = invoke(&["lint", "--input", &input]);
    assert_eq!(code, EXIT_PARTIAL);
    assert!(out.contains("Tertiary_period\till_formed"));

    let clean = EXAMPLES_JSONL
        .lines()
        .filter(|l| l.contains("\"baseball_coach\"") || l.contains("\"roadhog\""))
        .collect::<Vec<_>>()
        .join("\n");
    let clean = write(dir.path(), "clean.jsonl", &clean);
    let (code, out, _) = invoke(&["lint", "--input", &clean]);
    assert_eq!((code, out.as_str()), (EXIT_OK, ""));

    let circular = r#"{"id":"coach.n.01","pos":"noun","gloss":"a coach of a team","tree":"(NP (NP (DT a) (NN coach)) (PP (IN of) (NP (DT a) (NN team))))","instance":false}"#;
    let circular = write(dir.path(), "circ.jsonl", circular);
    let (code, out, _) = invoke(&["lint", "--input", &circular]);
    assert_eq!(code, EXIT_PARTIAL);
    assert!(out.contains("coach.n.01\tcircular"));
}

#[test]
fn lint_reports_content_residue() {
    let dir = tempfile::tempdir().unwrap();
    let rec = r#"{"id":"x","pos":"noun","gloss":"a coach of baseball players","tree":"(NP (NP (DT a) (NN coach)) (PP (IN of) (NP (NN baseball) (NNS players))))","instance":false,"gold":"a {supertype|coach} of baseball players"}"#;
    let input = write(dir.path(), "in.jsonl", rec);
    let (code, out, _) = invoke(&["lint", "--input", &input]);
    assert_eq!(code, EXIT_PARTIAL);
    assert!(out.contains("\"baseball\" outside every role"));
    assert!(!out.contains("\"of\""));
}

#[test]
fn headwords() {
    assert_eq!(headword_of("master_of_ceremonies.n.01"), "master of ceremonies");
    assert_eq!(headword_of("dart%2:38:00::"), "dart");
    assert!(is_circular("water_faucet", "a water faucet (for baths)"));
    assert!(!is_circular("water_faucet", "a faucet for drawing water"));
    assert!(!is_circular("coach", "a bus (coach)"));
}
