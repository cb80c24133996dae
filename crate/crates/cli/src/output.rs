use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Column-oriented result table written as CSV or as a JSON array of rows.
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    Value::Null => String::new(),
                    other => other.to_string(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .map(|c| c.to_string())
                        .zip(row.iter().cloned())
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Output directory plus the bookkeeping that ends up in `run.json`.
pub struct Run {
    dir: PathBuf,
    format: Format,
    command: String,
    seed: u64,
    threads: usize,
    start: Instant,
    config: Map<String, Value>,
    timings: Map<String, Value>,
    outputs: Vec<String>,
}

impl Run {
    pub fn new(dir: &Path, format: Format, command: &str, seed: u64) -> anyhow::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            command: command.to_string(),
            seed,
            threads: rayon::current_num_threads(),
            start: Instant::now(),
            config: Map::new(),
            timings: Map::new(),
            outputs: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn config(&mut self, key: &str, value: impl Serialize) {
        self.config.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable"),
        );
    }

    pub fn timing(&mut self, key: &str, seconds: f64) {
        self.timings.insert(key.to_string(), json!(seconds));
    }

    /// Path for an output file, recorded in `run.json`.
    pub fn path(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.dir.join(name)
    }

    /// Writes `table` as `<stem>.csv` or `<stem>.json` per the run format.
    pub fn table(&mut self, stem: &str, table: &Table) -> anyhow::Result<()> {
        match self.format {
            Format::Csv => {
                let path = self.path(&format!("{stem}.csv"));
                fs::write(path, table.csv())?;
            }
            Format::Json => {
                let path = self.path(&format!("{stem}.json"));
                fs::write(path, serde_json::to_string_pretty(&table.json())?)?;
            }
        }
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> anyhow::Result<()> {
        let path = self.path(name);
        fs::write(path, serde_json::to_string_pretty(value)?)?;
        Ok(())
    }

    pub fn finish(mut self) -> anyhow::Result<()> {
        self.timings.insert(
            "total_seconds".into(),
            json!(self.start.elapsed().as_secs_f64()),
        );
        self.outputs.push("run.json".into());
        let record = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "threads": self.threads,
            "args": std::env::args().collect::<Vec<_>>(),
            "config": self.config,
            "timings": self.timings,
            "outputs": self.outputs,
        });
        fs::write(
            self.dir.join("run.json"),
            serde_json::to_string_pretty(&record)?,
        )?;
        Ok(())
    }
}
