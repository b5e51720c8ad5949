use sullivan::cli;
use sullivan::corpus::ENTRIES;
use sullivan::dsl;

#[test]
fn every_document_round_trips() {
    for e in ENTRIES {
        let doc = dsl::parse(e.document).unwrap_or_else(|d| panic!("{}: {d}", e.key));
        let printed = doc.to_string();
        assert_eq!(dsl::parse(&printed).unwrap(), doc, "{}", e.key);
        assert_eq!(printed, e.document, "{} is not in canonical form", e.key);
    }
}

#[test]
fn expected_fragments_hold() {
    let mut failures = Vec::new();
    for e in ENTRIES {
        for c in e.checks.iter().filter(|c| !c.contested) {
            let args = c.command_line(e.key);
            let out = cli::run(&args);
            if out.code != 0 {
                failures.push(format!("{}: exit {}: {}", args.join(" "), out.code, out.stderr));
                continue;
            }
            let json = out.json();
            for x in c.expect {
                if let Err(m) = x.check(&json) {
                    failures.push(format!("{}: {m}", args.join(" ")));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn corpus_keys_are_unique() {
    let mut keys: Vec<&str> = ENTRIES.iter().map(|e| e.key).collect();
    keys.sort_unstable();
    keys.dedup();
    assert_eq!(keys.len(), ENTRIES.len());
    assert_eq!(ENTRIES.len(), 11);
}
