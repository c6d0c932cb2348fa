//! Orchestration and output: per-image analysis, corpus runs, tables,
//! feature files and SVG figures.

mod analyze;
mod corpus_run;
pub mod format;
pub mod io;
pub mod plots;
pub mod svg;
pub mod table;

pub use analyze::{
    analyze, analyze_document, analyze_set, write_outputs, AnalysisReport, AnalyzeConfig,
};
pub use corpus_run::{
    corpus_csv, corpus_run, load_feature_files, summary_csv, write_corpus, CorpusConfig,
    CorpusReport, SummaryRow,
};
pub use plots::{parse_plot_list, render_plots, Plot};
