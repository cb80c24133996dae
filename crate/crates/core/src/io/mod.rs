//! Dataset bundles, synthetic generators and splits.

pub mod bundle;
pub mod split;
pub mod synth;

pub use bundle::{
    load_bundle, read_split, save_bundle, write_split, DatasetBundle, FeatureFormat, LoadOptions,
    LoadReport,
};
pub use split::{make_split, SplitMode, ValSize};
pub use synth::{clique_chain_edges, synth_clique_chain, synth_sbm};
