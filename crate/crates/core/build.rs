//! Refuses to build when an ORACLE corpus entry's block file does not name
//! the oracle that produced it.

use std::path::Path;

fn main() {
    let corpus = Path::new("corpus");
    let manifest_path = corpus.join("manifest.json");
    println!("cargo:rerun-if-changed={}", manifest_path.display());
    println!("cargo:rerun-if-changed={}", corpus.join("blocks").display());

    let text = std::fs::read_to_string(&manifest_path)
        .unwrap_or_else(|e| panic!("{}: {e}", manifest_path.display()));
    let manifest: serde_json::Value =
        serde_json::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", manifest_path.display()));
    let entries = manifest["entries"]
        .as_array()
        .expect("manifest.entries is a list");

    for entry in entries {
        let id = entry["id"].as_str().unwrap_or("<no id>");
        let Some(oracle) = entry["provenance"].get("ORACLE") else {
            continue;
        };
        assert!(
            oracle.as_str().is_some_and(|s| !s.trim().is_empty()),
            "corpus entry `{id}`: ORACLE provenance must describe the oracle"
        );
        let rel = entry["block_file"]
            .as_str()
            .unwrap_or_else(|| panic!("corpus entry `{id}`: ORACLE entry without block_file"));
        let path = corpus.join(rel);
        println!("cargo:rerun-if-changed={}", path.display());
        let block: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display())),
        )
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let notes = block["notes"].as_str().unwrap_or("");
        assert!(
            notes.contains("provenance: ORACLE") && notes.contains("oracle:"),
            "{}: ORACLE data must carry a provenance header naming the oracle in `notes`",
            path.display()
        );
    }
}
