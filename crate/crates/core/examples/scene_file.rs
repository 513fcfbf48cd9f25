//! Builds the standard layout in code, writes it as a scene file and reports
//! its content hash.

use std::path::Path;

use flowgame::scene::{SceneConfig, SceneFile};

fn main() {
    let file = SceneFile::standard_layout(SceneConfig::default()).unwrap().with_standard_scripts("../graphs");
    let base = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/scenes");
    println!("{}", file.to_json());
    println!("paired: {}", file.is_paired());
    println!("graphs: {:?}", file.graph_paths());
    println!("content hash: {}", file.content_hash(&base).unwrap());
}
