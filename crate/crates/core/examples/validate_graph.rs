//! Parses every graph in the shipped corpus and prints its diagnostics.

use std::path::Path;

use flowgame::graphlang::check_source;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/graphs");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .chain(std::fs::read_dir(dir.join("invalid")).unwrap())
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "fg"))
        .collect();
    paths.sort();
    for path in paths {
        let src = std::fs::read_to_string(&path).unwrap();
        let diags = check_source(&src);
        let shown = path.strip_prefix(&dir).unwrap().display().to_string();
        if diags.is_empty() {
            println!("{shown}: ok");
        }
        for d in diags {
            println!("{}", d.render(&shown));
        }
    }
}
