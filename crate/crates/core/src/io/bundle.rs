//! Dataset bundles on disk: a directory with `edges.tsv`, `features.tsv` or
//! `features.bin`, `labels.tsv`, `meta.txt` and optional `split-<name>.tsv`.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::gnn::Matrix;
use crate::graph::{Graph, Labels, Split};

const FEATURE_MAGIC: &[u8; 8] = b"GERNFEAT";

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetBundle {
    pub name: String,
    pub graph: Graph,
    pub features: Matrix<f32>,
    pub labels: Labels,
    pub splits: BTreeMap<String, Split>,
    /// Free-form `key=value` metadata; `name`, `n`, `c` and `d0` are
    /// rewritten from the data on save.
    pub meta: BTreeMap<String, String>,
}

impl DatasetBundle {
    pub fn new(name: String, graph: Graph, features: Matrix<f32>, labels: Labels) -> Result<Self> {
        let n = graph.node_count();
        if features.rows() != n {
            return Err(Error::ShapeMismatch(format!(
                "features have {} rows, graph has {n} nodes",
                features.rows()
            )));
        }
        if !features.is_finite() {
            return Err(Error::ShapeMismatch(
                "features contain non-finite values".into(),
            ));
        }
        labels.check_len(n)?;
        Ok(Self {
            name,
            graph,
            features,
            labels,
            splits: BTreeMap::new(),
            meta: BTreeMap::new(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Keep only the largest connected component instead of failing.
    pub largest_component: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub self_loops: usize,
    pub duplicates: usize,
    pub dropped_nodes: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FeatureFormat {
    #[default]
    Text,
    Binary,
}

impl std::str::FromStr for FeatureFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "tsv" => Ok(Self::Text),
            "binary" | "bin" => Ok(Self::Binary),
            other => Err(Error::InvalidParameter(format!(
                "unknown feature format {other:?}"
            ))),
        }
    }
}

fn require(path: PathBuf) -> Result<PathBuf> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(Error::MissingFile(path))
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn data_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push((i + 1, trimmed.to_string()));
    }
    Ok(out)
}

pub fn read_meta(path: &Path) -> Result<BTreeMap<String, String>> {
    let mut meta = BTreeMap::new();
    for (line, text) in data_lines(path)? {
        let (k, v) = text
            .split_once('=')
            .ok_or_else(|| parse_err(path, line, "expected key=value"))?;
        meta.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(meta)
}

pub fn read_edges(path: &Path) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    for (line, text) in data_lines(path)? {
        let mut fields = text.split_whitespace();
        let mut next = || -> Result<usize> {
            let f = fields
                .next()
                .ok_or_else(|| parse_err(path, line, "expected two node ids"))?;
            f.parse()
                .map_err(|_| parse_err(path, line, format!("bad node id {f:?}")))
        };
        let (u, v) = (next()?, next()?);
        edges.push((u, v));
    }
    Ok(edges)
}

pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    data_lines(path)?
        .into_iter()
        .map(|(line, text)| {
            text.parse()
                .map_err(|_| parse_err(path, line, format!("bad label {text:?}")))
        })
        .collect()
}

pub fn read_features_text(path: &Path) -> Result<Matrix<f32>> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line, text) in data_lines(path)? {
        let before = data.len();
        for f in text.split_whitespace() {
            let v: f32 = f
                .parse()
                .map_err(|_| parse_err(path, line, format!("bad feature value {f:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(path, line, "non-finite feature value"));
            }
            data.push(v);
        }
        let width = data.len() - before;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(parse_err(
                    path,
                    line,
                    format!("expected {c} values, found {width}"),
                ));
            }
            _ => {}
        }
        rows += 1;
    }
    Matrix::from_vec(rows, cols.unwrap_or(0), data)
}

pub fn read_features_binary(path: &Path) -> Result<Matrix<f32>> {
    let mut input = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != FEATURE_MAGIC {
        return Err(parse_err(path, 0, "bad feature file magic"));
    }
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let len = rows
        .checked_mul(cols)
        .ok_or_else(|| parse_err(path, 0, "feature dims overflow"))?;
    let mut raw = Vec::new();
    input.read_to_end(&mut raw)?;
    if raw.len() != len * 4 {
        return Err(parse_err(
            path,
            0,
            format!("{} payload bytes for a {rows}x{cols} matrix", raw.len()),
        ));
    }
    let data: Vec<f32> = raw
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    if data.iter().any(|v| !v.is_finite()) {
        return Err(parse_err(path, 0, "non-finite feature value"));
    }
    Matrix::from_vec(rows, cols, data)
}

pub fn read_split(path: &Path, n: usize) -> Result<Split> {
    let mut split = Split::default();
    for (line, text) in data_lines(path)? {
        let mut fields = text.split_whitespace();
        let node: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| parse_err(path, line, "expected a node id"))?;
        match fields.next() {
            Some("train") => split.train.push(node),
            Some("validation") => split.validation.push(node),
            Some("test") => split.test.push(node),
            other => {
                return Err(parse_err(
                    path,
                    line,
                    format!("unknown split part {other:?}"),
                ))
            }
        }
    }
    split.validate(n)?;
    Ok(split)
}

pub fn load_bundle(dir: &Path, opts: LoadOptions) -> Result<(DatasetBundle, LoadReport)> {
    let meta_path = require(dir.join("meta.txt"))?;
    let edges_path = require(dir.join("edges.tsv"))?;
    let labels_path = require(dir.join("labels.tsv"))?;
    let binary = dir.join("features.bin").is_file();
    let features_path = if binary {
        dir.join("features.bin")
    } else {
        require(dir.join("features.tsv"))?
    };
    let meta = read_meta(&meta_path)?;
    let edges = read_edges(&edges_path)?;
    let labels = read_labels(&labels_path)?;
    let features = if binary {
        read_features_binary(&features_path)?
    } else {
        read_features_text(&features_path)?
    };
    let n = match meta.get("n") {
        Some(s) => s
            .parse()
            .map_err(|_| parse_err(&dir.join("meta.txt"), 0, format!("bad n {s:?}")))?,
        None => labels.len(),
    };
    if labels.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: labels.len(),
        });
    }
    if features.rows() != n {
        return Err(Error::ShapeMismatch(format!(
            "features have {} rows, bundle has {n} nodes",
            features.rows()
        )));
    }
    let labels = match meta.get("c").and_then(|c| c.parse().ok()) {
        Some(c) => Labels::new(labels, c)?,
        None => Labels::infer(labels)?,
    };
    let mut splits = BTreeMap::new();
    let mut entries: Vec<_> = fs::read_dir(dir)?.collect::<std::io::Result<_>>()?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let file = entry.file_name().to_string_lossy().into_owned();
        if let Some(name) = file
            .strip_prefix("split-")
            .and_then(|f| f.strip_suffix(".tsv"))
        {
            splits.insert(name.to_string(), read_split(&entry.path(), n)?);
        }
    }

    let (full, built) = Graph::build_unchecked(n, &edges)?;
    if built.self_loops > 0 {
        log::warn!("dropped {} self-loops", built.self_loops);
    }
    let mut report = LoadReport {
        self_loops: built.self_loops,
        duplicates: built.duplicates,
        dropped_nodes: 0,
    };
    let components = full.component_count();
    let name = meta
        .get("name")
        .cloned()
        .unwrap_or_else(|| "unnamed".into());
    let mut bundle = if components <= 1 {
        DatasetBundle::new(name, full, features, labels)?
    } else if opts.largest_component {
        let keep = full.largest_component();
        report.dropped_nodes = n - keep.len();
        log::warn!(
            "graph has {components} components; keeping the largest ({} of {n} nodes)",
            keep.len()
        );
        let mut remap = vec![usize::MAX; n];
        for (i, &v) in keep.iter().enumerate() {
            remap[v] = i;
        }
        let graph = full.induced(&keep)?;
        let labels = Labels::new(
            keep.iter().map(|&v| labels.get(v)).collect(),
            labels.class_count(),
        )?;
        let features = features.gather_rows(&keep);
        let sub = |nodes: &[usize]| -> Vec<usize> {
            nodes
                .iter()
                .filter(|&&v| remap[v] != usize::MAX)
                .map(|&v| remap[v])
                .collect()
        };
        for split in splits.values_mut() {
            *split = Split {
                train: sub(&split.train),
                validation: sub(&split.validation),
                test: sub(&split.test),
            };
        }
        DatasetBundle::new(name, graph, features, labels)?
    } else {
        return Err(Error::DisconnectedGraph { components });
    };
    bundle.splits = splits;
    bundle.meta = meta;
    Ok((bundle, report))
}

pub fn write_edges(path: &Path, edges: &[(usize, usize)]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for &(u, v) in edges {
        writeln!(out, "{u}\t{v}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for v in labels {
        writeln!(out, "{v}")?;
    }
    out.flush()?;
    Ok(())
}

/// Shortest round-trip decimal form, so text files reload bit-exactly.
pub fn write_features_text(path: &Path, x: &Matrix<f32>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for r in 0..x.rows() {
        let row = x.row(r);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.write_all(b"\t")?;
            }
            write!(out, "{v}")?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_features_binary(path: &Path, x: &Matrix<f32>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(FEATURE_MAGIC)?;
    out.write_all(&(x.rows() as u64).to_le_bytes())?;
    out.write_all(&(x.cols() as u64).to_le_bytes())?;
    for v in x.data() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_meta(path: &Path, meta: &BTreeMap<String, String>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (k, v) in meta {
        writeln!(out, "{k}={v}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_split(path: &Path, split: &Split) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (part, nodes) in [
        ("train", &split.train),
        ("validation", &split.validation),
        ("test", &split.test),
    ] {
        for v in nodes {
            writeln!(out, "{v}\t{part}")?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn save_bundle(bundle: &DatasetBundle, dir: &Path, format: FeatureFormat) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut meta = bundle.meta.clone();
    meta.insert("name".into(), bundle.name.clone());
    meta.insert("n".into(), bundle.node_count().to_string());
    meta.insert("c".into(), bundle.labels.class_count().to_string());
    meta.insert("d0".into(), bundle.features.cols().to_string());
    write_meta(&dir.join("meta.txt"), &meta)?;
    write_edges(&dir.join("edges.tsv"), bundle.graph.edges())?;
    write_labels(&dir.join("labels.tsv"), bundle.labels.values())?;
    let (keep, stale) = match format {
        FeatureFormat::Text => ("features.tsv", "features.bin"),
        FeatureFormat::Binary => ("features.bin", "features.tsv"),
    };
    if dir.join(stale).exists() {
        fs::remove_file(dir.join(stale))?;
    }
    match format {
        FeatureFormat::Text => write_features_text(&dir.join(keep), &bundle.features)?,
        FeatureFormat::Binary => write_features_binary(&dir.join(keep), &bundle.features)?,
    }
    for (name, split) in &bundle.splits {
        write_split(&dir.join(format!("split-{name}.tsv")), split)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::synth::synth_clique_chain;
    use crate::rng::RngStream;

    fn write(dir: &Path, file: &str, text: &str) {
        fs::write(dir.join(file), text).unwrap();
    }

    fn minimal(dir: &Path) {
        write(dir, "meta.txt", "name=tiny\nn=3\nc=2\nd0=2\n");
        write(dir, "edges.tsv", "# u v\n0\t1\n1\t2\n");
        write(dir, "features.tsv", "1\t0\n0\t1\n0.5\t0.5\n");
        write(dir, "labels.tsv", "0\n0\n1\n");
    }

    #[test]
    fn minimal_bundle() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        let (b, report) = load_bundle(dir.path(), LoadOptions::default()).unwrap();
        assert_eq!((b.graph.node_count(), b.graph.edge_count()), (3, 2));
        assert_eq!(b.features.shape(), (3, 2));
        assert_eq!(b.labels.values(), &[0, 0, 1]);
        assert_eq!(report, LoadReport::default());
    }

    #[test]
    fn self_loop_dropped_and_directed_pairs_merged() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        write(dir.path(), "edges.tsv", "0 1\n1 0\n1 2\n2 2\n");
        let (b, report) = load_bundle(dir.path(), LoadOptions::default()).unwrap();
        assert_eq!(b.graph.edge_count(), 2);
        assert_eq!(report.self_loops, 1);
        assert_eq!(report.duplicates, 1);
    }

    #[test]
    fn feature_rows_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        write(dir.path(), "features.tsv", "1\t0\n0\t1\n");
        let err = load_bundle(dir.path(), LoadOptions::default()).unwrap_err();
        assert!(
            matches!(&err, Error::ShapeMismatch(m) if m.contains('2') && m.contains('3')),
            "{err}"
        );
    }

    #[test]
    fn parse_error_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        write(dir.path(), "edges.tsv", "0\t1\n\n1\tx\n");
        match load_bundle(dir.path(), LoadOptions::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        fs::remove_file(dir.path().join("labels.tsv")).unwrap();
        assert!(matches!(
            load_bundle(dir.path(), LoadOptions::default()),
            Err(Error::MissingFile(_))
        ));
    }

    #[test]
    fn disconnected_and_largest_component() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "meta.txt", "n=5\nc=2\n");
        write(dir.path(), "edges.tsv", "0 1\n1 2\n3 4\n");
        write(dir.path(), "features.tsv", "0\n1\n2\n3\n4\n");
        write(dir.path(), "labels.tsv", "0\n1\n0\n1\n0\n");
        write(
            dir.path(),
            "split-a.tsv",
            "0\ttrain\n3\ttest\n2\tvalidation\n",
        );
        assert!(matches!(
            load_bundle(dir.path(), LoadOptions::default()),
            Err(Error::DisconnectedGraph { components: 2 })
        ));
        let (b, report) = load_bundle(
            dir.path(),
            LoadOptions {
                largest_component: true,
            },
        )
        .unwrap();
        assert_eq!(b.node_count(), 3);
        assert_eq!(report.dropped_nodes, 2);
        assert_eq!(b.features.data(), &[0.0, 1.0, 2.0]);
        assert_eq!(b.splits["a"].test, Vec::<usize>::new());
        assert_eq!(b.splits["a"].validation, vec![2]);
    }

    #[test]
    fn round_trips() {
        let mut b = synth_clique_chain(3, 4, &mut RngStream::from_seed(5).rng()).unwrap();
        b.splits.insert(
            "fixed".into(),
            Split::new(vec![0, 4, 8], vec![1], vec![2, 3], 12).unwrap(),
        );
        for format in [FeatureFormat::Text, FeatureFormat::Binary] {
            let dir = tempfile::tempdir().unwrap();
            save_bundle(&b, dir.path(), format).unwrap();
            let (back, _) = load_bundle(dir.path(), LoadOptions::default()).unwrap();
            assert_eq!(back.graph, b.graph);
            assert_eq!(back.features, b.features);
            assert_eq!(back.labels, b.labels);
            assert_eq!(back.splits, b.splits);
            assert_eq!(back.name, b.name);
        }
    }

    #[test]
    fn binary_header() {
        let dir = tempfile::tempdir().unwrap();
        let x = Matrix::from_vec(2, 3, vec![1.0f32, 2.0, 3.0, 4.0, 5.0, 6.5]).unwrap();
        let path = dir.path().join("f.bin");
        write_features_binary(&path, &x).unwrap();
        let raw = fs::read(&path).unwrap();
        assert_eq!(&raw[..8], b"GERNFEAT");
        assert_eq!(u64::from_le_bytes(raw[8..16].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(raw[16..24].try_into().unwrap()), 3);
        assert_eq!(raw.len(), 24 + 24);
        assert_eq!(read_features_binary(&path).unwrap(), x);
    }

    #[cfg(unix)]
    #[test]
    fn read_only_target() {
        use std::os::unix::fs::PermissionsExt;
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("ro");
        fs::create_dir(&target).unwrap();
        fs::set_permissions(&target, fs::Permissions::from_mode(0o555)).unwrap();
        let b = synth_clique_chain(2, 3, &mut RngStream::from_seed(5).rng()).unwrap();
        let result = save_bundle(&b, &target, FeatureFormat::Text);
        // Root ignores directory permissions; only assert when they apply.
        if fs::File::create(target.join("probe")).is_err() {
            assert!(matches!(result, Err(Error::Io(_))));
        }
    }
}
