//! Runs the six Iris/Wine/Zoo experiment cells and prints a comparison table.
//!
//! `cargo run --release --example table1 -- [seed]`

use std::path::PathBuf;

use netclass::bench::{evaluate, Comparison, ExperimentSpec};
use netclass::dataset::{load_csv, ColumnRef, LoadOptions};
use netclass::netbuild::{ConstructionConfig, Method};

fn main() -> netclass::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(42);
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let zoo_load = LoadOptions {
        ignore: vec![ColumnRef::Name("animal_name".into())],
        ..LoadOptions::new(ColumnRef::Name("type".into()))
    };
    let cells = [
        (
            "Iris",
            "iris.csv",
            LoadOptions::new(ColumnRef::Name("class".into())),
            [1, 2],
        ),
        (
            "Wine",
            "wine.csv",
            LoadOptions::new(ColumnRef::Index(0)),
            [1, 1],
        ),
        ("Zoo", "zoo.csv", zoo_load, [1, 1]),
    ];
    let mut reports = Vec::new();
    for (name, file, load, ks) in cells {
        let path = data.join(file);
        let d = load_csv(&path, &load)?;
        for (method, k) in [Method::KnnEpsilonRadius, Method::AttributeMeta]
            .into_iter()
            .zip(ks)
        {
            let spec = ExperimentSpec::new(
                name,
                &path,
                load.clone(),
                ConstructionConfig::new(method, k),
                seed,
            );
            let r = evaluate(&d, &spec)?;
            eprintln!(
                "{name} {method} ({k}): {} in {:.2}s",
                r.accuracy_cell(),
                r.wall_time_secs
            );
            reports.push(r);
        }
    }
    print!("{}", Comparison::from_reports(reports).to_markdown());
    Ok(())
}
