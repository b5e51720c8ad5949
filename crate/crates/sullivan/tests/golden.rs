//! Byte-for-byte comparison of every corpus command's JSON output.
//! Run with `UPDATE_GOLDEN=1` to rewrite the files.

use std::path::PathBuf;

use sullivan::cli;
use sullivan::corpus::ENTRIES;

fn file_name(key: &str, args: &[&str]) -> String {
    let mut s = key.to_string();
    for a in args {
        s.push('_');
        s.push_str(&a.trim_start_matches('-').replace(['=', '.'], "-"));
    }
    s.push_str(".json");
    s
}

#[test]
fn corpus_outputs_match_golden_files() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    if update {
        std::fs::create_dir_all(&dir).unwrap();
    }
    let mut mismatches = Vec::new();
    for e in ENTRIES {
        for c in e.checks {
            let out = cli::run(c.command_line(e.key));
            assert_eq!(out.code, 0, "{} {:?}: {}", e.key, c.args, out.stderr);
            let again = cli::run(c.command_line(e.key));
            assert_eq!(out.stdout, again.stdout, "{} {:?} is not deterministic", e.key, c.args);
            let path = dir.join(file_name(e.key, c.args));
            if update {
                std::fs::write(&path, &out.stdout).unwrap();
                continue;
            }
            match std::fs::read_to_string(&path) {
                Ok(want) if want == out.stdout => {}
                Ok(_) => mismatches.push(format!("{} differs", path.display())),
                Err(_) => mismatches.push(format!("{} is missing", path.display())),
            }
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}
