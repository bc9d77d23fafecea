use std::collections::BTreeMap;
use std::error::Error;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sprawl_core::discretize::BinningPlan;
use sprawl_core::dtree::{render_ensemble, render_tree, EnsembleKind, TrainParams};
use sprawl_core::exec::Execution;
use sprawl_core::geo_ingest::{labels_from_table, load_regions, parse_csv, LabeledRegionSet};
use sprawl_core::label::TARGET_ATTRIBUTE;
use sprawl_core::mapviz::export_geojson;
use sprawl_core::rulemine::{frequent_itemsets_with, generate_rules, render_rules, AssociationRule};
use sprawl_core::sdss::{
    fingerprint, mine_rules, predict_sprawl, query_impact, read_bundle, train_bundle, write_bundle,
    TrainingConfig,
};
use sprawl_core::table::AttributeTable;
use sprawl_server::{AppState, BIND_ENV, DEFAULT_BIND};

type Result<T> = std::result::Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "sprawl", version, about = "Urban sprawl rule mining, classification and decision support")]
struct Cli {
    /// Run data-parallel loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct DataArgs {
    /// Attribute CSV files; several files are stacked with keys prefixed by the file stem.
    #[arg(long, required = true, num_args = 1..)]
    data: Vec<PathBuf>,
    #[arg(long, default_value = "FIPS")]
    key: String,
    #[arg(long, default_value = TARGET_ATTRIBUTE)]
    target: String,
    /// JSON binning plan.
    #[arg(long)]
    binning: Option<PathBuf>,
    #[arg(long, default_value_t = sprawl_core::rulemine::DEFAULT_MIN_SUPPORT)]
    min_support: f64,
    #[arg(long, default_value_t = sprawl_core::rulemine::DEFAULT_MIN_CONFIDENCE)]
    min_confidence: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Tree,
    Bagging,
    Boosting,
}

#[derive(clap::Args)]
struct GeoArgs {
    /// Polygon shapefile; the `.dbf` sidecar is found next to it unless given.
    #[arg(long)]
    shp: Option<PathBuf>,
    #[arg(long)]
    dbf: Option<PathBuf>,
    #[arg(long, default_value = "GEOID")]
    key_field: String,
    #[arg(long, default_value = "NAME")]
    name_field: String,
    /// Key column of the label CSVs.
    #[arg(long, default_value = "FIPS")]
    label_key: String,
    #[arg(long, default_value = TARGET_ATTRIBUTE)]
    label_target: String,
}

#[derive(Subcommand)]
enum Command {
    /// Mine association rules and print them one per line.
    MineRules {
        #[command(flatten)]
        data: Option<DataArgs>,
        /// Pre-tokenized transactions, one per line, tokens separated by whitespace.
        #[arg(long, conflicts_with = "data")]
        transactions: Option<PathBuf>,
        /// Also write the rule list as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Train a model bundle and print the tree text.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value = "bagging")]
        method: Method,
        #[arg(long, default_value_t = 10)]
        rounds: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        min_leaf: usize,
        #[arg(long)]
        max_depth: Option<usize>,
        /// Fraction of rows held out for pruning the single tree; 0 disables pruning.
        #[arg(long, default_value_t = 1.0 / 3.0)]
        holdout: f64,
        /// JSON object of attribute name to display units.
        #[arg(long)]
        units: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the HTTP/JSON API over a bundle.
    Serve {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, env = BIND_ENV, default_value = DEFAULT_BIND)]
        bind: SocketAddr,
        #[command(flatten)]
        geo: GeoArgs,
        /// Per-year label CSVs as `YEAR=PATH`.
        #[arg(long, requires = "shp")]
        labels: Vec<String>,
    },
    /// Classify one assignment given as `Attr=value` pairs.
    Predict {
        #[arg(long)]
        bundle: PathBuf,
        assignment: Vec<String>,
    },
    /// Ask what the rules say about `b` when `a` changes.
    Impact {
        #[arg(long)]
        bundle: PathBuf,
        a: String,
        b: String,
        /// Optional `A=value`.
        value: Option<String>,
    },
    /// Write one year's choropleth GeoJSON.
    ExportMap {
        #[arg(long)]
        year: i32,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        geo: GeoArgs,
    },
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

/// Returns the (possibly stacked) table and the fingerprint of the raw bytes.
fn load_table(args: &DataArgs) -> Result<(AttributeTable, String)> {
    let texts = args.data.iter().map(|p| read_text(p)).collect::<Result<Vec<_>>>()?;
    let tables = texts
        .iter()
        .zip(&args.data)
        .map(|(t, p)| {
            parse_csv(t, &args.key, Some(&args.target)).map_err(|e| format!("{}: {e}", p.display()).into())
        })
        .collect::<Result<Vec<_>>>()?;
    let bytes: Vec<&[u8]> = texts.iter().map(|t| t.as_bytes()).collect();
    let print = fingerprint(&bytes);
    if tables.len() == 1 {
        return Ok((tables.into_iter().next().expect("one table"), print));
    }
    let tags: Vec<String> = args
        .data
        .iter()
        .map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default())
        .collect();
    let parts: Vec<(&str, &AttributeTable)> = tags.iter().map(String::as_str).zip(&tables).collect();
    Ok((AttributeTable::stack(&parts)?, print))
}

fn load_plan(path: Option<&PathBuf>) -> Result<BinningPlan> {
    match path {
        Some(p) => Ok(serde_json::from_str(&read_text(p)?)?),
        None => Ok(BinningPlan::default()),
    }
}

fn write_rules_json(path: &Path, rules: &[AssociationRule]) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(rules)?)?;
    Ok(())
}

fn parse_pair(s: &str) -> Result<(String, f64)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected `name=value`, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

fn load_year(geo: &GeoArgs, year: i32, labels: &Path) -> Result<LabeledRegionSet> {
    let shp_path = geo.shp.as_ref().ok_or("--shp is required")?;
    let dbf_path = geo.dbf.clone().unwrap_or_else(|| shp_path.with_extension("dbf"));
    let shp = std::fs::read(shp_path).map_err(|e| format!("{}: {e}", shp_path.display()))?;
    let dbf = std::fs::read(&dbf_path).map_err(|e| format!("{}: {e}", dbf_path.display()))?;
    let table = parse_csv(&read_text(labels)?, &geo.label_key, Some(&geo.label_target))?;
    let labels = labels_from_table(&table, &geo.label_target)?;
    Ok(load_regions(&shp, &dbf, &geo.key_field, &geo.name_field, labels, year)?)
}

fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match cli.command {
        Command::MineRules { data, transactions, json } => {
            let rules = if let Some(path) = transactions {
                let tx: Vec<Vec<String>> = read_text(&path)?
                    .lines()
                    .filter(|l| !l.trim().is_empty())
                    .map(|l| l.split_whitespace().map(str::to_string).collect())
                    .collect();
                let (s, c) = data
                    .as_ref()
                    .map_or((sprawl_core::rulemine::DEFAULT_MIN_SUPPORT, sprawl_core::rulemine::DEFAULT_MIN_CONFIDENCE), |d| {
                        (d.min_support, d.min_confidence)
                    });
                generate_rules(&frequent_itemsets_with(&tx, s, exec)?, c)?
            } else {
                let data = data.ok_or("either --data or --transactions is required")?;
                let (table, _) = load_table(&data)?;
                let plan = load_plan(data.binning.as_ref())?;
                let mined = mine_rules(&table, &plan, &data.target, data.min_support, data.min_confidence, exec)?;
                for w in &mined.fitted.warnings {
                    log::warn!("{w:?}");
                }
                log::info!("{} transactions, {} frequent itemsets", mined.transactions, mined.itemsets.len());
                mined.rules
            };
            print!("{}", render_rules(&rules));
            if let Some(path) = json {
                write_rules_json(&path, &rules)?;
            }
        }
        Command::Train {
            data,
            method,
            rounds,
            seed,
            min_leaf,
            max_depth,
            holdout,
            units,
            out,
        } => {
            let (table, print) = load_table(&data)?;
            let units: BTreeMap<String, String> = match units {
                Some(p) => serde_json::from_str(&read_text(&p)?)?,
                None => BTreeMap::new(),
            };
            let cfg = TrainingConfig {
                target: data.target.clone(),
                method: match method {
                    Method::Tree => EnsembleKind::Single,
                    Method::Bagging => EnsembleKind::Bagging,
                    Method::Boosting => EnsembleKind::Boosting,
                },
                params: TrainParams {
                    min_leaf_instances: min_leaf,
                    max_depth,
                    pruning_holdout_fraction: holdout,
                    rounds,
                    seed,
                },
                binning: load_plan(data.binning.as_ref())?,
                min_support: data.min_support,
                min_confidence: data.min_confidence,
                units,
            };
            let output = train_bundle(&table, print, &cfg, exec)?;
            let bundle = &output.bundle;
            match (&bundle.ensemble, &bundle.single_tree) {
                (Some(e), _) if e.kind != EnsembleKind::Single => print!("{}", render_ensemble(e)),
                (_, Some(t)) => print!("{}", render_tree(t)),
                _ => {}
            }
            write_bundle(bundle, &out)?;
            log::info!("wrote {} ({} rules)", out.display(), bundle.rules.len());
        }
        Command::Serve { bundle, bind, geo, labels } => {
            let bundle = read_bundle(&bundle)?;
            let mut years = Vec::new();
            for spec in &labels {
                let (year, path) = spec
                    .split_once('=')
                    .ok_or_else(|| format!("expected `YEAR=PATH`, got `{spec}`"))?;
                let year: i32 = year.parse().map_err(|_| format!("bad year `{year}`"))?;
                years.push(load_year(&geo, year, Path::new(path))?);
            }
            let state = AppState::with_maps(bundle, &years)?;
            tokio::runtime::Runtime::new()?.block_on(sprawl_server::serve(state, bind))?;
        }
        Command::Predict { bundle, assignment } => {
            let bundle = read_bundle(&bundle)?;
            let assignment = assignment.iter().map(|s| parse_pair(s)).collect::<Result<BTreeMap<_, _>>>()?;
            println!("{}", serde_json::to_string_pretty(&predict_sprawl(&bundle, &assignment)?)?);
        }
        Command::Impact { bundle, a, b, value } => {
            let bundle = read_bundle(&bundle)?;
            let value = match value {
                Some(s) => {
                    let (name, v) = parse_pair(&s)?;
                    if name != a {
                        return Err(format!("value is for `{name}` but the subject is `{a}`").into());
                    }
                    Some(v)
                }
                None => None,
            };
            println!("{}", serde_json::to_string_pretty(&query_impact(&bundle, &a, &b, value)?)?);
        }
        Command::ExportMap { year, labels, out, geo } => {
            let regions = load_year(&geo, year, &labels)?;
            let doc = export_geojson(&regions)?;
            std::fs::write(&out, doc.to_geojson_string())?;
            log::info!("wrote {} features to {}", doc.features.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
