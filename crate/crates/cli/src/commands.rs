use std::fs;
use std::io::Write;
use std::time::Instant;

use anyhow::{bail, Context};
use gern::diagnostics::{oversmoothing_curve, oversquashing_experiment, DiagnosticRun};
use gern::gnn::{accuracy, cross_entropy_loss, load_checkpoint, save_checkpoint, NormAdj};
use gern::graph::cutsize;
use gern::io::{
    load_bundle, make_split, read_split, save_bundle, synth_clique_chain, synth_sbm, write_split,
    DatasetBundle, LoadOptions,
};
use gern::linearize::{dfs_linearize, path_cutsize, DfsStart};
use gern::resistance::{
    effective_resistance_exact, effective_resistance_mc, resistance_weighted_cutsize,
    ResistanceMatrix,
};
use gern::spanning::{compare_frequency_tables, edge_inclusion_frequencies, mean_abs_gap};
use gern::trainer::{config_entries, train_gern, TrainConfig};
use gern::wta::{wta_expected_mistakes, OrderMode};
use gern::{Error, RngStream, Split};
use serde_json::{json, Value};

use crate::convert::{convert_citation_network, ConvertOptions};
use crate::output::{Run, Table};
use crate::{
    BundleArgs, Cli, Command, ConvertArgs, DiagnosticsArgs, EvaluateArgs, LinearizeArgs, MetricArg,
    OrderArg, ResistanceArgs, ResistanceMethodArg, RstStatsArgs, SplitArgs, SynthArgs, SynthKind,
    TrainArgs, WtaArgs,
};

// Stream ids under the run seed.
const SPLIT_STREAM: u64 = 1_000;
const SAMPLING_STREAM: u64 = 1_001;
const COMPARE_STREAM: u64 = 1_002;
const SYNTH_STREAM: u64 = 1_003;

pub fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let seed = cli.seed.unwrap_or(0);
    let name = match &cli.command {
        Command::Train(_) => "train",
        Command::Evaluate(_) => "evaluate",
        Command::RstStats(_) => "rst-stats",
        Command::Resistance(_) => "resistance",
        Command::Linearize(_) => "linearize",
        Command::Wta(_) => "wta",
        Command::Diagnostics(_) => "diagnostics",
        Command::Synth(_) => "synth",
        Command::Convert(_) => "convert",
    };
    let mut run = Run::new(&cli.output_dir, cli.format, name, seed)?;
    match cli.command {
        Command::Train(a) => train(&mut run, *a, cli.seed),
        Command::Evaluate(a) => evaluate(&mut run, a, seed),
        Command::RstStats(a) => rst_stats(&mut run, a, seed),
        Command::Resistance(a) => resistance(&mut run, a, seed),
        Command::Linearize(a) => linearize(&mut run, a, seed),
        Command::Wta(a) => wta(&mut run, a, seed),
        Command::Diagnostics(a) => diagnostics(&mut run, a, seed),
        Command::Synth(a) => synth(&mut run, a, seed),
        Command::Convert(a) => convert(&mut run, a),
    }?;
    run.finish()
}

fn load(run: &mut Run, args: &BundleArgs) -> anyhow::Result<DatasetBundle> {
    let start = Instant::now();
    let (bundle, report) = load_bundle(
        &args.bundle,
        LoadOptions {
            largest_component: args.largest_component,
        },
    )
    .with_context(|| format!("loading bundle {}", args.bundle.display()))?;
    run.config("bundle", args.bundle.display().to_string());
    run.config("bundle_name", &bundle.name);
    run.config("nodes", bundle.node_count());
    run.config("edges", bundle.graph.edge_count());
    run.config("dropped_nodes", report.dropped_nodes);
    run.config("self_loops_dropped", report.self_loops);
    run.timing("load_seconds", start.elapsed().as_secs_f64());
    Ok(bundle)
}

fn resolve_split(
    run: &mut Run,
    b: &DatasetBundle,
    args: &SplitArgs,
    seed: u64,
) -> anyhow::Result<Split> {
    if let Some(name) = &args.split_name {
        run.config("split", format!("bundle:{name}"));
        return b
            .splits
            .get(name)
            .cloned()
            .with_context(|| format!("bundle has no split named {name:?}"));
    }
    if let Some(path) = &args.split_file {
        run.config("split", format!("file:{}", path.display()));
        return Ok(read_split(path, b.node_count())?);
    }
    run.config("split", args.split);
    run.config("val_size", args.val_size);
    Ok(make_split(
        &b.labels,
        args.split,
        args.val_size,
        &mut RngStream::new(seed, SPLIT_STREAM).rng(),
    )?)
}

fn train_config(a: &TrainArgs, seed: Option<u64>) -> anyhow::Result<TrainConfig> {
    let mut cfg = TrainConfig::default();
    if let Some(path) = &a.config {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        cfg.apply_kv(&text)?;
    }
    let overrides = [
        ("max_epochs", &a.max_epochs),
        ("hops", &a.hops),
        ("hidden", &a.hidden),
        ("pool_size", &a.pool_size),
        ("pool_kind", &a.pool_kind),
        ("generator", &a.generator),
        ("beta", &a.beta),
        ("lr", &a.lr),
        ("weight_decay", &a.weight_decay),
        ("lr_decay_factor", &a.lr_decay_factor),
        ("patience", &a.patience),
        ("lr_min", &a.lr_min),
        ("max_steps_per_lr", &a.max_steps_per_lr),
        ("dropout", &a.dropout),
        ("normalization", &a.normalization),
        ("val_every", &a.val_every),
        ("queue_bound", &a.queue_bound),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, |x| json!(x))
}

fn train(run: &mut Run, a: TrainArgs, seed: Option<u64>) -> anyhow::Result<()> {
    let cfg = train_config(&a, seed)?;
    let b = load(run, &a.bundle)?;
    let split = resolve_split(run, &b, &a.split, cfg.seed)?;
    for (k, v) in config_entries(&cfg) {
        run.config(&k, v);
    }
    write_split(&run.path("split.tsv"), &split)?;

    let start = Instant::now();
    let (model, history) = train_gern(&b.graph, &b.features, &b.labels, &split, &cfg)?;
    run.timing("train_seconds", start.elapsed().as_secs_f64());
    let epochs = history.records.len();
    let mean_epoch =
        history.records.iter().map(|r| r.epoch_seconds).sum::<f64>() / epochs.max(1) as f64;
    run.timing("mean_epoch_seconds", mean_epoch);
    run.timing("mean_step_seconds", history.mean_step_seconds());

    let mut table = Table::new(&[
        "epoch",
        "train_loss",
        "val_loss",
        "val_accuracy",
        "lr",
        "lr_level",
        "pool_index",
        "train_nodes",
        "train_edges",
        "step_seconds",
        "epoch_seconds",
    ]);
    for r in &history.records {
        table.push(vec![
            json!(r.epoch),
            json!(r.train_loss),
            opt(r.val_loss),
            opt(r.val_accuracy),
            json!(r.lr),
            json!(r.lr_level),
            json!(r.pool_index),
            json!(r.train_nodes),
            json!(r.train_edges),
            json!(r.step_seconds),
            json!(r.epoch_seconds),
        ]);
    }
    run.table("history", &table)?;

    let adj = NormAdj::new(&b.graph, cfg.normalization);
    let lp = model.predict_log_probs(&adj, &b.features)?;
    let score = |nodes: &[usize]| -> anyhow::Result<Value> {
        if nodes.is_empty() {
            return Ok(Value::Null);
        }
        Ok(json!(accuracy(&lp, &b.labels, nodes)?))
    };
    let metrics = json!({
        "train_accuracy": score(&split.train)?,
        "validation_accuracy": score(&split.validation)?,
        "test_accuracy": score(&split.test)?,
        "best_epoch": history.best_epoch,
        "best_validation_accuracy": history.best_val_accuracy,
        "validated_on_train": history.validated_on_train,
        "stop_reason": history.stop_reason.map(|s| format!("{s:?}")),
        "epochs": epochs,
        "max_train_edges": history.max_train_edges(),
        "mean_epoch_seconds": mean_epoch,
        "mean_step_seconds": history.mean_step_seconds(),
    });
    run.json("metrics.json", &metrics)?;
    save_checkpoint(&model, &run.path("model.ckpt"))?;
    println!("{}", serde_json::to_string(&metrics)?);
    Ok(())
}

fn evaluate(run: &mut Run, a: EvaluateArgs, seed: u64) -> anyhow::Result<()> {
    let b = load(run, &a.bundle)?;
    let split = resolve_split(run, &b, &a.split, seed)?;
    let model = load_checkpoint(&a.checkpoint)?;
    run.config("checkpoint", a.checkpoint.display().to_string());
    run.config("normalization", a.normalization.to_string());
    let start = Instant::now();
    let adj = NormAdj::new(&b.graph, a.normalization);
    let lp = model.predict_log_probs(&adj, &b.features)?;
    run.timing("inference_seconds", start.elapsed().as_secs_f64());
    let all: Vec<usize> = (0..b.node_count()).collect();
    let mut table = Table::new(&["subset", "nodes", "accuracy", "loss"]);
    for (name, nodes) in [
        ("train", &split.train),
        ("validation", &split.validation),
        ("test", &split.test),
        ("all", &all),
    ] {
        if nodes.is_empty() {
            table.push(vec![json!(name), json!(0), Value::Null, Value::Null]);
            continue;
        }
        table.push(vec![
            json!(name),
            json!(nodes.len()),
            json!(accuracy(&lp, &b.labels, nodes)?),
            json!(cross_entropy_loss(&lp, &b.labels, nodes)?),
        ]);
    }
    run.table("metrics", &table)?;
    if a.predictions {
        let mut preds = Table::new(&["node", "predicted", "label"]);
        for (v, p) in lp.argmax_rows().into_iter().enumerate() {
            preds.push(vec![json!(v), json!(p), json!(b.labels.get(v))]);
        }
        run.table("predictions", &preds)?;
    }
    Ok(())
}

/// Exact resistances, or `None` with a warning when the graph exceeds the
/// dense size cap.
fn exact_or_skip(b: &DatasetBundle) -> anyhow::Result<Option<ResistanceMatrix>> {
    match effective_resistance_exact(&b.graph) {
        Ok(r) => Ok(Some(r)),
        Err(Error::SizeCapExceeded { n, cap }) => {
            log::warn!("skipping exact resistance: {n} nodes exceed the dense cap of {cap}");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn rst_stats(run: &mut Run, a: RstStatsArgs, seed: u64) -> anyhow::Result<()> {
    let b = load(run, &a.bundle)?;
    run.config("generator", a.generator.to_string());
    run.config("trials", a.trials);
    let start = Instant::now();
    let table = edge_inclusion_frequencies(
        &b.graph,
        a.generator,
        a.trials,
        RngStream::new(seed, SAMPLING_STREAM),
    )?;
    run.timing("sampling_seconds", start.elapsed().as_secs_f64());
    let exact = if a.no_exact { None } else { exact_or_skip(&b)? };

    let mut out = Table::new(&["edge_u", "edge_v", "freq", "stderr", "r_exact"]);
    for (e, &(u, v)) in table.edges().iter().enumerate() {
        out.push(vec![
            json!(u),
            json!(v),
            json!(table.frequency(e)),
            json!(table.stderr(e)),
            opt(exact.as_ref().map(|r| r.edge_values()[e])),
        ]);
    }
    run.table("frequencies", &out)?;

    let mut summary = json!({
        "generator": a.generator.to_string(),
        "trials": a.trials,
        "edges": table.edges().len(),
        "mean_abs_gap_exact": exact.as_ref().map(|r| mean_abs_gap(&table, r.edge_values())).transpose()?,
    });
    if let Some(other) = a.compare {
        run.config("compare", other.to_string());
        let second = edge_inclusion_frequencies(
            &b.graph,
            other,
            a.trials,
            RngStream::new(seed, COMPARE_STREAM),
        )?;
        let cmp = compare_frequency_tables(&table, &second)?;
        summary["compare"] = json!({
            "generator": other.to_string(),
            "mean_abs_diff": cmp.mean_abs_diff,
            "ks_statistic": cmp.ks_statistic,
            "ks_pvalue": cmp.ks_pvalue,
            "mean_abs_gap_exact": exact.as_ref().map(|r| mean_abs_gap(&second, r.edge_values())).transpose()?,
        });
    }
    run.json("summary.json", &summary)?;
    Ok(())
}

fn resistance(run: &mut Run, a: ResistanceArgs, seed: u64) -> anyhow::Result<()> {
    let b = load(run, &a.bundle)?;
    let want_exact = matches!(
        a.method,
        ResistanceMethodArg::Exact | ResistanceMethodArg::Both
    );
    let want_mc = matches!(
        a.method,
        ResistanceMethodArg::Mc | ResistanceMethodArg::Both
    );
    let start = Instant::now();
    let exact = if want_exact {
        Some(effective_resistance_exact(&b.graph)?)
    } else {
        None
    };
    run.timing("exact_seconds", start.elapsed().as_secs_f64());
    let start = Instant::now();
    let mc = if want_mc {
        run.config("trees", a.trees);
        run.config("generator", a.generator.to_string());
        Some(effective_resistance_mc(
            &b.graph,
            a.trees,
            a.generator,
            RngStream::new(seed, SAMPLING_STREAM),
        )?)
    } else {
        None
    };
    run.timing("mc_seconds", start.elapsed().as_secs_f64());

    let mut table = Table::new(&["edge_u", "edge_v", "r_exact", "r_mc", "stderr"]);
    for (e, &(u, v)) in b.graph.edges().iter().enumerate() {
        table.push(vec![
            json!(u),
            json!(v),
            opt(exact.as_ref().map(|r| r.edge_values()[e])),
            opt(mc.as_ref().map(|r| r.edge_values()[e])),
            opt(mc.as_ref().and_then(|r| r.edge_stderr()).map(|s| s[e])),
        ]);
    }
    run.table("resistance", &table)?;
    let phi = |r: &Option<ResistanceMatrix>| -> anyhow::Result<Value> {
        Ok(match r {
            Some(r) => json!(resistance_weighted_cutsize(&b.graph, &b.labels, r)?),
            None => Value::Null,
        })
    };
    let summary = json!({
        "cutsize": cutsize(&b.graph, &b.labels)?,
        "phi_r_exact": phi(&exact)?,
        "phi_r_mc": phi(&mc)?,
    });
    run.json("summary.json", &summary)?;
    Ok(())
}

fn linearize(run: &mut Run, a: LinearizeArgs, seed: u64) -> anyhow::Result<()> {
    let b = load(run, &a.bundle)?;
    if a.count == 0 {
        bail!("--count must be at least 1");
    }
    run.config("generator", a.generator.to_string());
    run.config("count", a.count);
    run.config("start", a.start);
    let start_node = a.start.map_or(DfsStart::Random, DfsStart::Node);
    let mut tree_out = fs::File::create(run.path("tree.tsv"))?;
    let mut path_out = fs::File::create(run.path("path.tsv"))?;
    writeln!(tree_out, "# draw\tu\tv")?;
    writeln!(path_out, "# draw\tposition\tnode")?;
    let mut summary = Table::new(&["draw", "tree_cutsize", "path_cutsize"]);
    let base = RngStream::new(seed, SAMPLING_STREAM);
    let start = Instant::now();
    for draw in 0..a.count {
        let mut rng = base.child(draw as u64).rng();
        let tree = a.generator.sample(&b.graph, &mut rng)?;
        let path = dfs_linearize(&tree, start_node, &mut rng)?;
        for &(u, v) in tree.edges() {
            writeln!(tree_out, "{draw}\t{u}\t{v}")?;
        }
        for (i, &v) in path.order().iter().enumerate() {
            writeln!(path_out, "{draw}\t{i}\t{v}")?;
        }
        summary.push(vec![
            json!(draw),
            json!(tree.cutsize(b.labels.values())),
            json!(path_cutsize(&path, &b.labels)?),
        ]);
    }
    run.timing("sampling_seconds", start.elapsed().as_secs_f64());
    run.table("cutsizes", &summary)?;
    Ok(())
}

fn wta(run: &mut Run, a: WtaArgs, seed: u64) -> anyhow::Result<()> {
    let b = load(run, &a.bundle)?;
    let mode = match a.order {
        OrderArg::Random => OrderMode::Random,
        OrderArg::AdversarialStub => OrderMode::AdversarialStub,
    };
    run.config("trials", a.trials);
    run.config("order", format!("{mode:?}"));
    run.config("default_label", a.default_label);
    let start = Instant::now();
    let s = wta_expected_mistakes(
        &b.graph,
        &b.labels,
        a.trials,
        mode,
        a.default_label,
        RngStream::new(seed, SAMPLING_STREAM),
    )?;
    run.timing("games_seconds", start.elapsed().as_secs_f64());
    let mut per_trial = Table::new(&["trial", "mistakes"]);
    for (i, m) in s.per_trial.iter().enumerate() {
        per_trial.push(vec![json!(i), json!(m)]);
    }
    run.table("mistakes", &per_trial)?;

    let phi_r = exact_or_skip(&b)?
        .map(|r| resistance_weighted_cutsize(&b.graph, &b.labels, &r))
        .transpose()?;
    let n = b.node_count() as f64;
    let ratio = phi_r
        .filter(|&p| p > 0.0 && n > 1.0)
        .map(|p| s.mean / (p * n.ln()));
    let mut summary = Table::new(&[
        "trials",
        "mean",
        "stderr",
        "cutsize",
        "phi_r",
        "mean_over_phi_r_ln_n",
    ]);
    summary.push(vec![
        json!(a.trials),
        json!(s.mean),
        json!(s.stderr),
        json!(cutsize(&b.graph, &b.labels)?),
        opt(phi_r),
        opt(ratio),
    ]);
    run.table("summary", &summary)?;
    Ok(())
}

fn diagnostics(run: &mut Run, a: DiagnosticsArgs, seed: u64) -> anyhow::Result<()> {
    let b = load(run, &a.bundle)?;
    run.config("depths", &a.depths);
    run.config("width", a.width);
    run.config("trials", a.trials);
    run.config(
        "variants",
        a.variants.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    );
    let mut table = Table::new(&["metric", "variant", "depth", "mean", "stderr", "trials"]);
    let mut push = |metric: &str, runs: &[DiagnosticRun]| {
        for r in runs {
            table.push(vec![
                json!(metric),
                json!(r.variant.to_string()),
                json!(r.depth),
                json!(r.mean),
                json!(r.stderr),
                json!(r.trials),
            ]);
        }
    };
    if a.metric != MetricArg::Squashing {
        let start = Instant::now();
        let runs = oversmoothing_curve(
            &b.graph,
            &a.depths,
            a.width,
            a.trials,
            &a.variants,
            RngStream::new(seed, SAMPLING_STREAM),
        )?;
        run.timing("smoothing_seconds", start.elapsed().as_secs_f64());
        push("smoothing", &runs);
    }
    if a.metric != MetricArg::Smoothing {
        let start = Instant::now();
        let runs = oversquashing_experiment(
            &b.graph,
            &a.depths,
            a.width,
            a.trials,
            RngStream::new(seed, COMPARE_STREAM),
        )?;
        run.timing("squashing_seconds", start.elapsed().as_secs_f64());
        let kept: Vec<DiagnosticRun> = runs
            .into_iter()
            .filter(|r| a.variants.contains(&r.variant))
            .collect();
        push("squashing", &kept);
    }
    run.table("diagnostics", &table)?;
    Ok(())
}

fn synth(run: &mut Run, a: SynthArgs, seed: u64) -> anyhow::Result<()> {
    let mut rng = RngStream::new(seed, SYNTH_STREAM).rng();
    let mut b = match a.kind {
        SynthKind::CliqueChain => {
            run.config("generator", "clique-chain");
            run.config("cliques", a.cliques);
            run.config("size", a.size);
            synth_clique_chain(a.cliques, a.size, &mut rng)?
        }
        SynthKind::Sbm => {
            run.config("generator", "sbm");
            run.config("blocks", a.blocks);
            run.config("block_size", a.block_size);
            run.config("p_in", a.p_in);
            run.config("p_out", a.p_out);
            synth_sbm(a.blocks, a.block_size, a.p_in, a.p_out, &mut rng)?
        }
    };
    if let Some(name) = a.name {
        b.name = name;
    }
    if let Some(mode) = a.split {
        let split = make_split(
            &b.labels,
            mode,
            a.val_size,
            &mut RngStream::new(seed, SPLIT_STREAM).rng(),
        )?;
        run.config("split", mode);
        b.splits.insert(a.split_name.clone(), split);
    }
    b.meta.insert("seed".into(), seed.to_string());
    save_bundle(&b, run.dir(), a.feature_format)?;
    run.config("nodes", b.node_count());
    run.config("edges", b.graph.edge_count());
    Ok(())
}

fn convert(run: &mut Run, a: ConvertArgs) -> anyhow::Result<()> {
    let report = convert_citation_network(
        &a.content,
        &a.cites,
        &a.name,
        run.dir(),
        ConvertOptions {
            row_normalize: a.row_normalize,
            largest_component: a.largest_component,
            format: a.feature_format,
        },
    )?;
    run.config("content", a.content.display().to_string());
    run.config("cites", a.cites.display().to_string());
    run.config("row_normalize", a.row_normalize);
    run.config("largest_component", a.largest_component);
    run.config("nodes", report.nodes);
    run.config("edges", report.edges);
    run.config("skipped_citations", report.skipped_citations);
    run.config("dropped_nodes", report.dropped_nodes);
    run.config("classes", &report.class_names);
    Ok(())
}
