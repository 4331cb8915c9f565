//! End-to-end augmentation of a TUDataset directory.
//!
//! cargo run --example gmixup_pipeline [-- <dir> <name>]
//!
//! Without arguments a small two-class dataset is generated in a temporary
//! directory first.

use gmixup::mixup::sample_graph;
use gmixup::pipeline::{run, Mode, PipelineConfig};
use gmixup::tudataset::save_tu_dataset;
use gmixup::{Dataset, StepGraphon};

fn demo_dataset(dir: &std::path::Path) -> gmixup::Result<()> {
    let sparse = StepGraphon::constant(3, 0.1)?;
    let dense = StepGraphon::from_fn(3, |x, y| 0.7 - 0.3 * (x + y) / 2.0)?;
    let graphs = (0..200)
        .map(|i| {
            let w = if i % 2 == 0 { &sparse } else { &dense };
            sample_graph(w, 15 + i % 10, i as u64).map(|g| g.with_label(i % 2))
        })
        .collect::<Result<_, _>>()?;
    save_tu_dataset(&Dataset::new("DEMO", graphs, 2)?, dir, "DEMO")
}

fn main() -> gmixup::Result<()> {
    env_logger::init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let tmp = std::env::temp_dir().join("gmixup-demo");
    let (dir, name) = match args.as_slice() {
        [dir, name] => (dir.into(), name.clone()),
        _ => {
            demo_dataset(&tmp)?;
            (tmp.clone(), "DEMO".to_string())
        }
    };
    let config = PipelineConfig {
        dataset: Some(dir),
        name,
        mode: Mode::Batch,
        batch_size: 64,
        seed: 7,
        output: Some(tmp.join("out")),
        ..Default::default()
    };
    println!("{}", serde_json::to_string_pretty(&config)?);
    let out = run(&config)?;
    let synthetic = out.soft_labels.as_ref().map_or(0, |s| s.iter().filter(|r| !r.contains(&1.0)).count());
    println!(
        "{} graphs written to {} ({} with mixed labels)",
        out.len(),
        tmp.join("out").display(),
        synthetic
    );
    Ok(())
}
