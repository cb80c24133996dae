//! Converter from the id-keyed `<name>.content` / `<name>.cites` pair used
//! by the common citation-network distributions into a bundle directory.
//!
//! `content`: one node per line, `id feature... label`, whitespace separated.
//! `cites`: one `cited citing` id pair per line. Direction is discarded and
//! pairs naming unknown ids are skipped.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use gern::gnn::Matrix;
use gern::io::{save_bundle, DatasetBundle, FeatureFormat};
use gern::{Error, Graph, Labels, Result};

#[derive(Clone, Copy, Debug, Default)]
pub struct ConvertOptions {
    /// Scale each feature row to sum to one (rows summing to zero are kept).
    pub row_normalize: bool,
    /// Keep only the largest connected component.
    pub largest_component: bool,
    pub format: FeatureFormat,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConvertReport {
    pub nodes: usize,
    pub edges: usize,
    pub skipped_citations: usize,
    pub dropped_nodes: usize,
    pub class_names: Vec<String>,
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

pub fn convert_citation_network(
    content: &Path,
    cites: &Path,
    name: &str,
    out_dir: &Path,
    opts: ConvertOptions,
) -> Result<ConvertReport> {
    for p in [content, cites] {
        if !p.is_file() {
            return Err(Error::MissingFile(p.to_path_buf()));
        }
    }
    let text = std::fs::read_to_string(content)?;
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut rows: Vec<Vec<f32>> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 2 {
            return Err(parse_err(content, i + 1, "expected id, features and label"));
        }
        let feats = fields[1..fields.len() - 1]
            .iter()
            .map(|f| {
                f.parse::<f32>()
                    .map_err(|_| parse_err(content, i + 1, format!("bad feature {f:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != feats.len() {
                return Err(parse_err(content, i + 1, "inconsistent feature count"));
            }
        }
        if ids.insert(fields[0].to_string(), rows.len()).is_some() {
            return Err(parse_err(
                content,
                i + 1,
                format!("duplicate id {}", fields[0]),
            ));
        }
        rows.push(feats);
        raw_labels.push(fields[fields.len() - 1].to_string());
    }
    let mut class_names: Vec<String> = raw_labels.clone();
    class_names.sort();
    class_names.dedup();
    let class_of: HashMap<&str, usize> = class_names
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let labels: Vec<usize> = raw_labels.iter().map(|c| class_of[c.as_str()]).collect();

    let n = rows.len();
    let mut edges = Vec::new();
    let mut skipped = 0;
    for (i, line) in std::fs::read_to_string(cites)?.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 2 {
            return Err(parse_err(cites, i + 1, "expected two ids"));
        }
        match (ids.get(fields[0]), ids.get(fields[1])) {
            (Some(&u), Some(&v)) => edges.push((u, v)),
            _ => skipped += 1,
        }
    }
    if skipped > 0 {
        log::warn!("skipped {skipped} citations naming unknown ids");
    }

    let d0 = rows.first().map_or(0, |r| r.len());
    let mut features = Matrix::from_vec(n, d0, rows.into_iter().flatten().collect())?;
    if opts.row_normalize {
        for r in 0..n {
            let row = features.row_mut(r);
            let sum: f32 = row.iter().sum();
            if sum != 0.0 {
                row.iter_mut().for_each(|v| *v /= sum);
            }
        }
    }

    let (graph, _) = Graph::build_unchecked(n, &edges)?;
    let keep: Vec<usize> = if opts.largest_component {
        graph.largest_component()
    } else {
        if graph.component_count() > 1 {
            return Err(Error::DisconnectedGraph {
                components: graph.component_count(),
            });
        }
        (0..n).collect()
    };
    let graph = if keep.len() == n {
        graph
    } else {
        graph.induced(&keep)?
    };
    let labels = Labels::new(
        keep.iter().map(|&v| labels[v]).collect(),
        class_names.len().max(2),
    )?;
    let features = if keep.len() == n {
        features
    } else {
        features.gather_rows(&keep)
    };
    let edge_count = graph.edge_count();
    let mut bundle = DatasetBundle::new(name.to_string(), graph, features, labels)?;
    let mut meta = BTreeMap::new();
    meta.insert("classes".into(), class_names.join(","));
    meta.insert("row_normalized".into(), opts.row_normalize.to_string());
    meta.insert("dropped_nodes".into(), (n - keep.len()).to_string());
    bundle.meta = meta;
    save_bundle(&bundle, out_dir, opts.format)?;
    Ok(ConvertReport {
        nodes: keep.len(),
        edges: edge_count,
        skipped_citations: skipped,
        dropped_nodes: n - keep.len(),
        class_names,
    })
}
