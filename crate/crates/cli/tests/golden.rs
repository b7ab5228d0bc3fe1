//! Report and SVG bytes for every fixture scenario are pinned under
//! `tests/golden`. Set `NILFIX_UPDATE_GOLDEN=1` to rewrite them.

use std::path::{Path, PathBuf};

use nilfix_cli::{run_file, Command, Settings};

fn scenarios() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut v: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    v.sort();
    v
}

fn check(path: &Path, actual: &str, mismatches: &mut Vec<String>) {
    if std::env::var_os("NILFIX_UPDATE_GOLDEN").is_some() {
        std::fs::write(path, actual).unwrap();
        return;
    }
    match std::fs::read_to_string(path) {
        Ok(expected) if expected == actual => {}
        Ok(_) => mismatches.push(format!("{} differs", path.display())),
        Err(e) => mismatches.push(format!("{}: {e}", path.display())),
    }
}

#[test]
fn reports_match_golden_files() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut mismatches = Vec::new();
    let all = scenarios();
    assert!(all.len() >= 10);
    for s in all {
        let out = run_file(&s, &Command::Run, &Settings::default());
        let stem = s.file_stem().unwrap().to_string_lossy().to_string();
        check(&golden.join(format!("{stem}.json")), &out.report_text(), &mut mismatches);
        for (p, svg) in &out.svgs {
            check(&golden.join(p.file_name().unwrap()), svg, &mut mismatches);
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}
