//! Replays the checked-in fuzz corpus through the same decoders the fuzz
//! targets exercise, so regressions surface without a fuzzing toolchain.

use std::fs;
use std::path::PathBuf;

use circint::circular::CircularScenario;
use circint::deployment::Deployment;
use circint::experiments::ExperimentConfig;
use circint::gamma::{format_term_set, parse_term_set};

fn corpus(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> =
        fs::read_dir(&dir).unwrap_or_else(|e| panic!("{}: {e}", dir.display())).map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty(), "empty corpus for {target}");
    files.into_iter().map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())).collect()
}

#[test]
fn term_sets() {
    let mut accepted = 0;
    for (name, data) in corpus("term_set") {
        if let Ok(terms) = parse_term_set(std::str::from_utf8(&data).unwrap()) {
            assert_eq!(parse_term_set(&format_term_set(&terms)).unwrap(), terms, "{name}");
            accepted += 1;
        }
    }
    assert_eq!(accepted, 3);
}

#[test]
fn deployments() {
    for (name, data) in corpus("deployment_text") {
        let dep = Deployment::from_text(std::str::from_utf8(&data).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!dep.is_empty());
        assert_eq!(Deployment::from_text(&dep.to_text().unwrap()).unwrap().stations(), dep.stations());
    }
}

#[test]
fn scenarios() {
    for (name, data) in corpus("scenario") {
        let (which, rest) = data.split_first().unwrap();
        let text = std::str::from_utf8(rest).unwrap();
        let s = if which & 1 == 0 { CircularScenario::from_toml(text) } else { CircularScenario::from_json(text) }
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(s, circint::experiments::reference_scenario());
    }
}

#[test]
fn experiment_configs() {
    for (name, data) in corpus("experiment_config") {
        let c =
            ExperimentConfig::from_toml(std::str::from_utf8(&data).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
    }
}
