//! The `parthier` command line.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use parthier_core::matching::{match_shapes, sample_seed};
use parthier_core::random::randomize_with_exponent;
use parthier_core::{
    distance_transform, organization_distribution, sample, sign_decompose, solve, PartTree, RandomizedTree, SplitForest,
};

use crate::artifacts::{read_tree, MatchDoc, OrganizationsDoc, SampleDoc, TopologyDoc, TreeDoc};
use crate::config::{PipelineConfig, RhoSpec};
use crate::error::{Error, Result};
use crate::field_io::{read_field, write_field};
use crate::render::{render_field, render_part_sheet, save_png, SheetTile};
use crate::shape::ShapeInput;
use crate::{output_dir, read_json, write_json};

#[derive(Debug, Parser)]
#[command(name = "parthier", version, about = "Part hierarchies of binary shapes from a non-local phase field")]
pub struct Cli {
    /// Flat TOML file with pipeline settings; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the field ω of a shape file or synthetic shape.
    Solve(SolveArgs),
    /// Report the zero-level decomposition and split events of a field.
    Decompose(DecomposeArgs),
    /// Build the part tree of a field.
    Tree(TreeArgs),
    /// Draw re-organizations of a part tree.
    Sample(SampleArgs),
    /// List every organization of a part tree with its probability.
    Enumerate(EnumerateArgs),
    /// Match two part trees over sampled re-organizations.
    Match(MatchArgs),
    /// Render a field (level curves) or a tree or sample (part sheet) as PNG.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// A .pgm/.png file or a synthetic spec such as `disc:12` or `annulus:8,16`.
    pub input: String,
    /// A number, `sqrt`, or `<c>xsqrt` for c·√|Ω|.
    #[arg(long)]
    pub rho: Option<RhoSpec>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Output field file; the sidecar goes next to it.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    pub field: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    pub field: PathBuf,
    #[arg(long)]
    pub seed_min_frac: Option<f64>,
    #[arg(long)]
    pub part_min_frac: Option<f64>,
    #[arg(long)]
    pub no_adjacency_filter: bool,
    /// Keep every split (no size or adjacency filters).
    #[arg(long)]
    pub unfiltered: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    pub tree: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub num_samples: Option<usize>,
    #[arg(long)]
    pub exponent: Option<f64>,
    /// Output directory.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    pub tree: PathBuf,
    #[arg(long)]
    pub max_splits: Option<usize>,
    #[arg(long)]
    pub exponent: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    pub tree_a: PathBuf,
    pub tree_b: PathBuf,
    #[arg(long)]
    pub num_samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub sigma_area: Option<f64>,
    #[arg(long)]
    pub sigma_w: Option<f64>,
    #[arg(long)]
    pub exponent: Option<f64>,
    /// Do not let the two roots pair.
    #[arg(long)]
    pub no_root: bool,
    #[arg(long)]
    pub vertex_cap: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// A field file (.bin), a tree JSON or a sample JSON.
    pub artifact: PathBuf,
    /// Level curves per sign region (fields only).
    #[arg(long)]
    pub levels: Option<usize>,
    /// Output pixels per raster pixel.
    #[arg(long)]
    pub scale: Option<u32>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

/// Folds the flags that affect `config` into it; flags win over the file.
fn apply_flags(config: &mut PipelineConfig, command: &Command) {
    match command {
        Command::Solve(a) => {
            set(&mut config.rho, a.rho);
            set(&mut config.tol, a.tol);
            if a.max_iter.is_some() {
                config.max_iter = a.max_iter;
            }
        }
        Command::Tree(a) => {
            set(&mut config.seed_min_frac, a.seed_min_frac);
            set(&mut config.part_min_frac, a.part_min_frac);
            if a.no_adjacency_filter {
                config.adjacency_filter = false;
            }
        }
        Command::Sample(a) => {
            set(&mut config.base_seed, a.seed);
            set(&mut config.num_samples, a.num_samples);
            set(&mut config.exponent, a.exponent);
        }
        Command::Enumerate(a) => {
            set(&mut config.max_splits, a.max_splits);
            set(&mut config.exponent, a.exponent);
        }
        Command::Match(a) => {
            set(&mut config.num_samples, a.num_samples);
            set(&mut config.base_seed, a.seed);
            set(&mut config.tau, a.tau);
            set(&mut config.sigma_area, a.sigma_area);
            set(&mut config.sigma_w, a.sigma_w);
            set(&mut config.exponent, a.exponent);
            set(&mut config.vertex_cap, a.vertex_cap);
            if a.no_root {
                config.include_root = false;
            }
        }
        Command::Render(a) => {
            set(&mut config.levels, a.levels);
            set(&mut config.scale, a.scale);
        }
        Command::Decompose(_) => {}
    }
}

/// File stem without the artifact suffixes this tool appends.
fn base_stem(path: &Path) -> String {
    let name = path.file_name().map_or("artifact".into(), |n| n.to_string_lossy().into_owned());
    let mut stem = name.as_str();
    for suffix in [".bin", ".json", ".field", ".tree", ".topology", ".match"] {
        stem = stem.strip_suffix(suffix).unwrap_or(stem);
    }
    stem.to_string()
}

fn default_output(output: &Option<PathBuf>, name: String) -> PathBuf {
    output.clone().unwrap_or_else(|| output_dir().join(name))
}

fn randomized(tree: PartTree, config: &PipelineConfig) -> RandomizedTree {
    randomize_with_exponent(tree, config.exponent)
}

pub fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    apply_flags(&mut config, &cli.command);
    config.validate().map_err(Error::Usage)?;
    match &cli.command {
        Command::Solve(a) => cmd_solve(a, &config),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Tree(a) => cmd_tree(a, &config),
        Command::Sample(a) => cmd_sample(a, &config),
        Command::Enumerate(a) => cmd_enumerate(a, &config),
        Command::Match(a) => cmd_match(a, &config),
        Command::Render(a) => cmd_render(a, &config),
    }
}

fn cmd_solve(a: &SolveArgs, config: &PipelineConfig) -> Result<()> {
    let input = ShapeInput::parse(&a.input)?;
    let grid = input.load()?;
    let field = solve(&distance_transform(&grid), &config.solver_params()).map_err(Error::core("solve"))?;
    if field.rho_below_recommended() {
        eprintln!("warning: rho = {} is below sqrt(|Omega|) = {}", field.rho(), (grid.area() as f64).sqrt());
    }
    let out = default_output(&a.output, format!("{}.field.bin", input.stem()));
    write_field(&field, &out)?;
    println!(
        "area {} rho {} iterations {} residual {:e} -> {}",
        grid.area(),
        field.rho(),
        field.iterations(),
        field.residual(),
        out.display()
    );
    Ok(())
}

fn cmd_decompose(a: &DecomposeArgs) -> Result<()> {
    let field = read_field(&a.field)?;
    let regions = sign_decompose(&field).map_err(Error::core("decompose"))?;
    let forest = SplitForest::build(&field, &regions.0, &regions.1);
    let doc = TopologyDoc::of(&regions, &forest);
    let out = default_output(&a.output, format!("{}.topology.json", base_stem(&a.field)));
    write_json(&out, &doc)?;
    for (name, side) in [("positive", &doc.positive), ("negative", &doc.negative)] {
        let holes: Vec<usize> = side.iter().map(|c| c.holes).collect();
        let events: Vec<usize> = side.iter().map(|c| c.split_events.len()).collect();
        println!("{name}: {} components, holes {holes:?}, split events {events:?}", side.len());
    }
    println!("-> {}", out.display());
    Ok(())
}

fn cmd_tree(a: &TreeArgs, config: &PipelineConfig) -> Result<()> {
    let field = read_field(&a.field)?;
    let filters = if a.unfiltered { parthier_core::FilterConfig::disabled() } else { config.filter_config() };
    let tree = parthier_core::parts::build_part_tree(&field, filters).map_err(Error::core("tree"))?;
    let out = default_output(&a.output, format!("{}.tree.json", base_stem(&a.field)));
    write_json(&out, &TreeDoc::of(&tree))?;
    println!("{} nodes, {} leaves -> {}", tree.len(), tree.leaves().count(), out.display());
    Ok(())
}

fn cmd_sample(a: &SampleArgs, config: &PipelineConfig) -> Result<()> {
    let rtree = randomized(read_tree(&a.tree)?, config);
    let dir = a.output.clone().unwrap_or_else(output_dir);
    std::fs::create_dir_all(&dir).map_err(|source| Error::Io { path: dir.clone(), source })?;
    let stem = base_stem(&a.tree);
    for i in 0..config.num_samples {
        let s = sample(&rtree, sample_seed(config.base_seed, i));
        let out = dir.join(format!("{stem}.sample-{i:03}.json"));
        write_json(&out, &SampleDoc::of(&s))?;
        println!("{} lifts -> {}", s.lifted.len(), out.display());
    }
    Ok(())
}

fn cmd_enumerate(a: &EnumerateArgs, config: &PipelineConfig) -> Result<()> {
    let rtree = randomized(read_tree(&a.tree)?, config);
    let dist = organization_distribution(&rtree, config.max_splits).map_err(Error::core("enumerate"))?;
    let doc = OrganizationsDoc::of(&rtree, dist);
    let out = default_output(&a.output, format!("{}.organizations.json", base_stem(&a.tree)));
    write_json(&out, &doc)?;
    for o in &doc.organizations {
        println!("{:.6}  {}", o.probability, o.structure);
    }
    println!("-> {}", out.display());
    Ok(())
}

fn cmd_match(a: &MatchArgs, config: &PipelineConfig) -> Result<()> {
    let ra = randomized(read_tree(&a.tree_a)?, config);
    let rb = randomized(read_tree(&a.tree_b)?, config);
    let m = match_shapes(&ra, &rb, config.num_samples, config.base_seed, &config.match_config())
        .map_err(Error::core("match"))?;
    let mut doc = MatchDoc::of(&m);
    doc.tree_a = Some(a.tree_a.display().to_string());
    doc.tree_b = Some(a.tree_b.display().to_string());
    let out = default_output(&a.output, format!("{}__{}.match.json", base_stem(&a.tree_a), base_stem(&a.tree_b)));
    write_json(&out, &doc)?;
    for p in &doc.pairs {
        println!("{} <-> {}  {:.4}", p.a_id, p.b_id, p.similarity);
    }
    println!("score {:.6} -> {}", doc.score, out.display());
    Ok(())
}

fn cmd_render(a: &RenderArgs, config: &PipelineConfig) -> Result<()> {
    let out = default_output(&a.output, format!("{}.png", base_stem(&a.artifact)));
    let is_json = a.artifact.extension().is_some_and(|e| e == "json");
    let image = if !is_json {
        render_field(&read_field(&a.artifact)?, config.levels, config.scale)
    } else {
        let value: serde_json::Value = read_json(&a.artifact)?;
        let nodes = if value.get("draw_seed").is_some() {
            let doc: SampleDoc =
                serde_json::from_value(value).map_err(|e| Error::invalid(&a.artifact, e.to_string()))?;
            (doc.width, doc.height, doc.nodes)
        } else {
            let doc: TreeDoc = serde_json::from_value(value).map_err(|e| Error::invalid(&a.artifact, e.to_string()))?;
            doc.to_tree(&a.artifact)?;
            (doc.width, doc.height, doc.nodes)
        };
        sheet(&a.artifact, nodes, config.scale)?
    };
    save_png(&image, &out)?;
    println!("{}×{} -> {}", image.width(), image.height(), out.display());
    Ok(())
}

fn sheet(
    path: &Path,
    (w, h, nodes): (usize, usize, Vec<crate::artifacts::NodeDoc>),
    scale: u32,
) -> Result<image::RgbImage> {
    let decode =
        |runs: &[u32]| parthier_core::rle::decode(w * h, runs).map_err(|e| Error::invalid(path, e.to_string()));
    let mut sets = Vec::with_capacity(nodes.len());
    for n in &nodes {
        sets.push((decode(&n.seed_rle)?, decode(&n.part_rle)?));
    }
    let shape = sets.first().map(|s| s.1.clone()).unwrap_or_default();
    let tiles: Vec<SheetTile<'_>> = sets.iter().map(|(seed, part)| SheetTile { seed, part }).collect();
    Ok(render_part_sheet(w, h, &shape, &tiles, scale))
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
