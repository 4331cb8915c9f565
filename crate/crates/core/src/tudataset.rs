//! Reader and writer for the TUDataset text layout.
//!
//! A dataset `NAME` in directory `root` consists of:
//!
//! - `NAME_A.txt`: one `i, j` line per directed edge, 1-based global node ids
//! - `NAME_graph_indicator.txt`: 1-based graph id of every node
//! - `NAME_graph_labels.txt`: one integer label per graph
//! - `NAME_node_attributes.txt` (optional): comma-separated floats per node
//! - `NAME_soft_labels.txt` (optional sidecar): comma-separated class
//!   probabilities per graph
//!
//! Floats are written in shortest round-trip form, so a save/load cycle
//! reproduces every feature bit-for-bit.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{Dataset, Graph};

fn file_path(root: &Path, name: &str, suffix: &str) -> PathBuf {
    root.join(format!("{name}_{suffix}.txt"))
}

/// Non-empty trimmed lines with their 1-based line numbers.
fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path.to_path_buf())
        } else {
            Error::io(path, e)
        }
    })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if !trimmed.is_empty() {
            out.push((i + 1, trimmed.to_string()));
        }
    }
    Ok(out)
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn parse_fields<T: std::str::FromStr>(path: &Path, line: usize, text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|f| {
            let f = f.trim();
            f.parse::<T>()
                .map_err(|_| parse_err(path, line, format!("cannot parse {f:?}")))
        })
        .collect()
}

fn parse_float_rows(path: &Path) -> Result<Vec<(usize, Vec<f64>)>> {
    read_lines(path)?
        .into_iter()
        .map(|(line, text)| Ok((line, parse_fields::<f64>(path, line, &text)?)))
        .collect()
}

/// Loads dataset `name` from directory `root`.
pub fn load_tu_dataset(root: impl AsRef<Path>, name: &str) -> Result<Dataset> {
    let root = root.as_ref();
    let a_path = file_path(root, name, "A");
    let ind_path = file_path(root, name, "graph_indicator");
    let lab_path = file_path(root, name, "graph_labels");

    let indicator: Vec<(usize, usize)> = read_lines(&ind_path)?
        .into_iter()
        .map(|(line, text)| {
            let id: usize = text
                .parse()
                .map_err(|_| parse_err(&ind_path, line, format!("bad graph id {text:?}")))?;
            if id == 0 {
                return Err(parse_err(&ind_path, line, "graph ids are 1-based"));
            }
            Ok((line, id - 1))
        })
        .collect::<Result<_>>()?;

    let raw_labels: Vec<i64> = read_lines(&lab_path)?
        .into_iter()
        .map(|(line, text)| {
            text.parse()
                .map_err(|_| parse_err(&lab_path, line, format!("bad label {text:?}")))
        })
        .collect::<Result<_>>()?;
    let num_graphs = raw_labels.len();
    if num_graphs == 0 {
        return Err(Error::InvalidDataset(format!("{name} has no graphs")));
    }

    // global node -> (graph, local id)
    let mut local = Vec::with_capacity(indicator.len());
    let mut sizes = vec![0usize; num_graphs];
    for &(line, gid) in &indicator {
        if gid >= num_graphs {
            return Err(parse_err(
                &ind_path,
                line,
                format!("graph id {} but only {num_graphs} labels", gid + 1),
            ));
        }
        local.push((gid, sizes[gid]));
        sizes[gid] += 1;
    }
    if let Some(g) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::InvalidDataset(format!("graph {} has no nodes", g + 1)));
    }

    let mut edge_sets: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); num_graphs];
    for (line, text) in read_lines(&a_path)? {
        let ids = parse_fields::<usize>(&a_path, line, &text)?;
        let [a, b] = ids[..] else {
            return Err(parse_err(&a_path, line, "expected two node ids"));
        };
        if a == b {
            return Err(parse_err(&a_path, line, format!("self-loop on node {a}")));
        }
        let lookup = |v: usize| {
            (v >= 1)
                .then(|| local.get(v - 1).copied())
                .flatten()
                .ok_or_else(|| parse_err(&a_path, line, format!("node {v} not in graph indicator")))
        };
        let (ga, la) = lookup(a)?;
        let (gb, lb) = lookup(b)?;
        if ga != gb {
            return Err(parse_err(
                &a_path,
                line,
                format!("edge joins graphs {} and {}", ga + 1, gb + 1),
            ));
        }
        edge_sets[ga].insert((la.min(lb), la.max(lb)));
    }

    let attr_path = file_path(root, name, "node_attributes");
    let attributes = if attr_path.exists() {
        let rows = parse_float_rows(&attr_path)?;
        if rows.len() != indicator.len() {
            return Err(Error::InvalidDataset(format!(
                "{} attribute rows for {} nodes",
                rows.len(),
                indicator.len()
            )));
        }
        let d = rows[0].1.len();
        if let Some((line, _)) = rows.iter().find(|(_, r)| r.len() != d) {
            return Err(parse_err(&attr_path, *line, format!("expected {d} attributes")));
        }
        Some((d, rows.into_iter().map(|(_, r)| r).collect::<Vec<_>>()))
    } else {
        None
    };

    let label_values: Vec<i64> = raw_labels
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let dense: BTreeMap<i64, usize> = label_values
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();

    let mut graphs = Vec::with_capacity(num_graphs);
    let mut offset_rows: Vec<Vec<usize>> = vec![Vec::new(); num_graphs];
    for (global, &(gid, _)) in local.iter().enumerate() {
        offset_rows[gid].push(global);
    }
    for (gid, edges) in edge_sets.into_iter().enumerate() {
        let mut g = Graph::from_sorted_unchecked(sizes[gid], edges.into_iter().collect());
        let features = match &attributes {
            Some((d, rows)) => DMatrix::from_fn(sizes[gid], *d, |r, c| rows[offset_rows[gid][r]][c]),
            None => DMatrix::from_element(sizes[gid], 1, 1.0),
        };
        g.set_features(Some(features));
        g.set_label(Some(dense[&raw_labels[gid]]));
        graphs.push(g);
    }

    let soft_path = file_path(root, name, "soft_labels");
    let soft_labels = if soft_path.exists() {
        Some(
            parse_float_rows(&soft_path)?
                .into_iter()
                .map(|(_, r)| r)
                .collect(),
        )
    } else {
        None
    };

    let ds = Dataset {
        name: name.to_string(),
        graphs,
        num_classes: label_values.len(),
        label_values,
        soft_labels,
        features_synthesized: attributes.is_none(),
    };
    ds.validate()?;
    Ok(ds)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_row(out: &mut impl Write, row: impl Iterator<Item = f64>) -> std::io::Result<()> {
    let text: Vec<String> = row.map(|v| v.to_string()).collect();
    writeln!(out, "{}", text.join(", "))
}

/// Writes `dataset` as `name` into `root`, creating the directory if needed.
pub fn save_tu_dataset(dataset: &Dataset, root: impl AsRef<Path>, name: &str) -> Result<()> {
    let root = root.as_ref();
    if dataset.is_empty() {
        return Err(Error::InvalidDataset("cannot save an empty dataset".into()));
    }
    dataset.validate()?;
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;

    let write_all = |path: &Path, f: &dyn Fn(&mut BufWriter<File>) -> std::io::Result<()>| {
        let mut out = create(path)?;
        f(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(path, e))
    };

    write_all(&file_path(root, name, "A"), &|out| {
        let mut offset = 1;
        for g in &dataset.graphs {
            for &(a, b) in g.edges() {
                writeln!(out, "{}, {}", a + offset, b + offset)?;
                writeln!(out, "{}, {}", b + offset, a + offset)?;
            }
            offset += g.node_count();
        }
        Ok(())
    })?;

    write_all(&file_path(root, name, "graph_indicator"), &|out| {
        for (i, g) in dataset.graphs.iter().enumerate() {
            for _ in 0..g.node_count() {
                writeln!(out, "{}", i + 1)?;
            }
        }
        Ok(())
    })?;

    write_all(&file_path(root, name, "graph_labels"), &|out| {
        for g in &dataset.graphs {
            let c = g.label().expect("validated");
            writeln!(out, "{}", dataset.label_values[c])?;
        }
        Ok(())
    })?;

    let has_features = dataset.graphs.iter().all(|g| g.features().is_some());
    if has_features && !dataset.features_synthesized {
        write_all(&file_path(root, name, "node_attributes"), &|out| {
            for g in &dataset.graphs {
                let f = g.features().expect("checked");
                for row in f.row_iter() {
                    write_row(out, row.iter().copied())?;
                }
            }
            Ok(())
        })?;
    }

    if let Some(soft) = &dataset.soft_labels {
        write_all(&file_path(root, name, "soft_labels"), &|out| {
            for row in soft {
                write_row(out, row.iter().copied())?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, suffix: &str, body: &str) {
        fs::write(file_path(dir, name, suffix), body).unwrap();
    }

    fn minimal(dir: &Path) {
        write(dir, "M", "A", "1, 2\n2, 1\n");
        write(dir, "M", "graph_indicator", "1\n1\n2\n");
        write(dir, "M", "graph_labels", "1\n-1\n");
    }

    #[test]
    fn minimal_parse() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        let ds = load_tu_dataset(dir.path(), "M").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.graphs[0].node_count(), 2);
        assert_eq!(ds.graphs[0].edges(), &[(0, 1)]);
        assert_eq!(ds.graphs[1].node_count(), 1);
        assert_eq!(ds.graphs[1].edge_count(), 0);
        assert_eq!(ds.label_values, vec![-1, 1]);
        assert_eq!(ds.graphs[0].label(), Some(1));
        assert!(ds.features_synthesized);
        assert_eq!(ds.graphs[0].feature_dim(), Some(1));
    }

    #[test]
    fn single_direction_edges_are_accepted() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        write(dir.path(), "M", "A", "2, 1\n");
        let ds = load_tu_dataset(dir.path(), "M").unwrap();
        assert_eq!(ds.graphs[0].edges(), &[(0, 1)]);
    }

    #[test]
    fn self_loop_rejected_with_line_number() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        write(dir.path(), "M", "A", "1, 2\n2, 2\n");
        match load_tu_dataset(dir.path(), "M") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_node_and_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        write(dir.path(), "M", "A", "1, 4\n");
        assert!(matches!(
            load_tu_dataset(dir.path(), "M"),
            Err(Error::Parse { line: 1, .. })
        ));
        fs::remove_file(file_path(dir.path(), "M", "graph_labels")).unwrap();
        assert!(matches!(
            load_tu_dataset(dir.path(), "M"),
            Err(Error::MissingFile(_))
        ));
    }

    #[test]
    fn round_trip_minimal() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        let ds = load_tu_dataset(dir.path(), "M").unwrap();
        let out = tempfile::tempdir().unwrap();
        save_tu_dataset(&ds, out.path(), "M").unwrap();
        assert!(!file_path(out.path(), "M", "node_attributes").exists());
        assert_eq!(load_tu_dataset(out.path(), "M").unwrap(), ds);
    }

    #[test]
    fn round_trip_features_bit_exact_and_soft_labels() {
        let f = DMatrix::from_row_slice(3, 2, &[0.1, 1.0 / 3.0, -2.5e-300, 7.0, f64::MAX, 1e-7]);
        let g = Graph::path(3).with_features(f).unwrap().with_label(0);
        let h = Graph::complete(2)
            .with_features(DMatrix::from_element(2, 2, 0.2))
            .unwrap()
            .with_label(1);
        let mut ds = Dataset::new("F", vec![g, h], 2).unwrap();
        ds.soft_labels = Some(vec![vec![1.0, 0.0], vec![0.15, 0.85]]);
        let dir = tempfile::tempdir().unwrap();
        save_tu_dataset(&ds, dir.path(), "F").unwrap();
        let back = load_tu_dataset(dir.path(), "F").unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn empty_dataset_cannot_be_saved() {
        let ds = Dataset::new("E", vec![], 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        assert!(save_tu_dataset(&ds, dir.path(), "E").is_err());
    }
}
