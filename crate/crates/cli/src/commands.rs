use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use metamob::analysis::{analyze as run_analysis, AnalyzeOptions};
use metamob::io::{self as mio, ColumnMap, Format, Ingested};
use metamob::net::{build_network, randomize_trajectories, Neighborhood, WeightKind};
use metamob::sim::{run_simulation, Activation, SimConfig, World};
use metamob::{canonicalize_trajectories, Error, GridSpec, LocationId};
use serde::Serialize;
use serde_json::Value;

use crate::{AnalyzeArgs, BuildNetArgs, InputArgs, RandomizeArgs, SimulateArgs};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    /// Map a library error raised while handling input data.
    fn data(e: Error) -> Self {
        let code = match e {
            Error::Config { .. } => 1,
            Error::ZeroWeight => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }

    fn output(path: &Path, e: impl std::fmt::Display) -> Self {
        Failure::usage(format!("cannot write {}: {e}", path.display()))
    }
}

pub fn init_threads() -> Outcome {
    let Ok(raw) = std::env::var("METAMOB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("METAMOB_THREADS must be a non-negative integer, got `{raw}`")))?;
    metamob::par::init_threads(n);
    Ok(())
}

fn is_stdout(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn create(path: &Path) -> Outcome<Box<dyn Write>> {
    if is_stdout(path) {
        return Ok(Box::new(io::stdout().lock()));
    }
    let f = File::create(path).map_err(|e| Failure::output(path, e))?;
    Ok(Box::new(BufWriter::new(f)))
}

fn read_input(args: &InputArgs) -> Outcome<Ingested> {
    let format = match args.format.as_deref() {
        Some("csv") => Some(Format::Csv),
        Some(_) => Some(Format::Ndjson),
        None => None,
    };
    let map = match &args.map {
        Some(m) => m.parse::<ColumnMap>().map_err(Failure::data)?,
        None => ColumnMap::default(),
    };
    mio::read_events_path(&args.input, format, &map).map_err(|e| match e {
        Error::Io(io) => Failure {
            code: 2,
            message: format!("cannot read {}: {io}", args.input.display()),
        },
        Error::Parse { line, message } => Failure {
            code: 2,
            message: format!("{}:{line}: {message}", args.input.display()),
        },
        other => Failure::data(other),
    })
}

fn parse_grid(raw: Option<&str>) -> Outcome<Option<GridSpec>> {
    raw.map(GridSpec::parse).transpose().map_err(Failure::data)
}

fn parse_activation(raw: &str) -> Outcome<Activation> {
    if raw == "always" {
        return Ok(Activation::Always);
    }
    if let Some(path) = raw.strip_prefix("file:") {
        return Ok(Activation::File { path: path.into() });
    }
    if let Some(rest) = raw.strip_prefix("uniform:") {
        if let Some((lo, hi)) = rest.split_once(':') {
            if let (Ok(lo), Ok(hi)) = (lo.parse(), hi.parse()) {
                return Ok(Activation::PerAgentUniform { lo, hi });
            }
        }
    }
    Err(Failure::usage(format!(
        "invalid `activation`: expected always, uniform:LO:HI or file:PATH, got `{raw}`"
    )))
}

/// Read a run configuration: simulation fields plus an optional `output`.
fn load_run_config(path: &Path) -> Outcome<(SimConfig, Option<PathBuf>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("config {}: {e}", path.display())))?;
    let Some(obj) = value.as_object_mut() else {
        return Err(Failure::usage("config must be a JSON object"));
    };
    let output = match obj.remove("output") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => return Err(Failure::usage("invalid `output`: expected a path string")),
    };
    let cfg: SimConfig = serde_json::from_value(value)
        .map_err(|e| Failure::usage(format!("config {}: {e}", path.display())))?;
    Ok((cfg, output))
}

pub fn simulate(a: SimulateArgs) -> Outcome {
    let (mut cfg, cfg_out) = match &a.config {
        Some(p) => load_run_config(p)?,
        None => (SimConfig::default(), None),
    };
    if let Some(m) = &a.model {
        cfg.model = m.parse().map_err(Failure::data)?;
    }
    macro_rules! set {
        ($($field:ident = $flag:ident),*) => {$(
            if let Some(v) = a.$flag { cfg.$field = v; }
        )*};
    }
    set!(
        agents = agents,
        locations = locations,
        steps = steps,
        moves_per_activation = moves,
        rho = rho,
        gamma = gamma,
        epsilon = epsilon,
        jump_exponent = jump_exponent,
        seed = seed
    );
    if let Some(g) = parse_grid(a.grid.as_deref())? {
        cfg.grid = Some(g);
    }
    if let Some(act) = &a.activation {
        cfg.activation = parse_activation(act)?;
    }
    cfg.validate().map_err(Failure::data)?;
    let out_path = a.out.or(cfg_out).unwrap_or_else(|| PathBuf::from("-"));
    let out = run_simulation(cfg).map_err(Failure::data)?;
    let w = create(&out_path)?;
    mio::write_simulation(w, &out).map_err(|e| Failure::output(&out_path, e))?;
    if out.fall_through > 0 {
        eprintln!(
            "note: {} explore draws found every location visited and revisited instead",
            out.fall_through
        );
    }
    Ok(())
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn build_net(a: BuildNetArgs) -> Outcome {
    let weight: WeightKind = a.weight.parse().map_err(Failure::data)?;
    let ingested = read_input(&a.input)?;
    if ingested.events.is_empty() {
        eprintln!("warning: {} contains no events", a.input.input.display());
    }
    let trajs = canonicalize_trajectories(ingested.events);
    let net = build_network(&trajs, a.directed && !a.undirected);
    let edges = suffixed(&a.out, "_edges.csv");
    let nodes = suffixed(&a.out, "_nodes.csv");
    mio::write_edges_csv(create(&edges)?, &net).map_err(|e| Failure::output(&edges, e))?;
    mio::write_nodes_csv(create(&nodes)?, &net).map_err(|e| Failure::output(&nodes, e))?;
    let total: u64 = net.edge_weights(weight).iter().sum();
    println!("nodes {}", net.node_count());
    println!("edges {}", net.edge_count());
    println!("transitions {}", net.total_transitions());
    println!("total_weight_{} {total}", a.weight);
    Ok(())
}

pub fn analyze(a: AnalyzeArgs) -> Outcome {
    let weight: WeightKind = a.weight.parse().map_err(Failure::data)?;
    let neighborhood = match a.neighborhood.as_str() {
        "moore" => Neighborhood::Moore,
        "von-neumann" => Neighborhood::VonNeumann,
        other => {
            return Err(Failure::usage(format!(
                "invalid `neighborhood`: expected moore or von-neumann, got `{other}`"
            )))
        }
    };
    if !(a.top_fraction > 0.0 && a.top_fraction <= 1.0) {
        return Err(Failure::usage("invalid `top-fraction`: must lie in (0, 1]"));
    }
    if a.window == Some(0) {
        return Err(Failure::usage("invalid `window`: must be positive"));
    }
    let grid = parse_grid(a.grid.as_deref())?;
    let ingested = read_input(&a.input)?;
    let window = a
        .window
        .unwrap_or(if ingested.meta.is_some() { 1 } else { 86_400 });
    let trajs = canonicalize_trajectories(ingested.events);
    let net = match &a.net {
        Some(prefix) => {
            let open = |suffix: &str| {
                let p = suffixed(prefix, suffix);
                File::open(&p).map_err(|e| Failure {
                    code: 2,
                    message: format!("cannot read {}: {e}", p.display()),
                })
            };
            let net = mio::read_network(open("_nodes.csv")?, open("_edges.csv")?, a.directed)
                .map_err(Failure::data)?;
            Some(net)
        }
        None => None,
    };
    let opts = AnalyzeOptions {
        grid,
        window,
        weight,
        directed: a.directed,
        teleport_threshold: a.teleport_threshold,
        top_fraction: a.top_fraction,
        neighborhood,
    };
    let report = run_analysis(&trajs, net.as_ref(), &opts).map_err(Failure::data)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let json = report.to_json().map_err(|e| Failure {
        code: 3,
        message: e.to_string(),
    })?;
    let mut w = create(&a.report)?;
    writeln!(w, "{json}")
        .and_then(|_| w.flush())
        .map_err(|e| Failure::output(&a.report, e))?;

    let curve_target = match (&a.curves, is_stdout(&a.report)) {
        (Some(dir), _) => Some((dir.clone(), String::new())),
        (None, false) => {
            let dir = a.report.parent().map(Path::to_path_buf).unwrap_or_default();
            let stem = a.report.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Some((dir, format!("{stem}_")))
        }
        (None, true) => None,
    };
    if let Some((dir, prefix)) = curve_target {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(&dir).map_err(|e| Failure::output(&dir, e))?;
        }
        for (name, points) in &report.curves {
            let p = dir.join(format!("{prefix}{name}.csv"));
            mio::write_curve_csv(create(&p)?, points).map_err(|e| Failure::output(&p, e))?;
        }
    }
    Ok(())
}

/// The configuration recorded in a generated file's header.
fn header_config(meta: Option<&Value>) -> Option<SimConfig> {
    meta.and_then(|m| m.get("config"))
        .and_then(|c| serde_json::from_value(c.clone()).ok())
}

/// The location universe to draw from: an explicit grid, the world recorded
/// in the input header, or else every location seen in the input.
fn world_for(cfg: Option<&SimConfig>, grid: Option<GridSpec>, observed: &[LocationId]) -> Vec<LocationId> {
    match (grid, cfg) {
        (Some(g), _) => World::grid_world(g).all_ids(),
        (None, Some(cfg)) => World::from_config(cfg).all_ids(),
        (None, None) => observed.to_vec(),
    }
}

#[derive(Serialize)]
struct RandomizedMeta {
    tool: &'static str,
    version: &'static str,
    config: Option<SimConfig>,
    randomized: RandomizedFrom,
}

#[derive(Serialize)]
struct RandomizedFrom {
    seed: u64,
    world_size: usize,
}

pub fn randomize(a: RandomizeArgs) -> Outcome {
    let grid = parse_grid(a.grid.as_deref())?;
    let ingested = read_input(&a.input)?;
    if ingested.events.is_empty() {
        eprintln!("warning: {} contains no events", a.input.input.display());
    }
    let config = header_config(ingested.meta.as_ref());
    let trajs = canonicalize_trajectories(ingested.events);
    let world = world_for(config.as_ref(), grid, trajs.locations.ids());
    let shuffled = randomize_trajectories(&trajs, &world, a.seed).map_err(Failure::data)?;
    let meta = RandomizedMeta {
        tool: "metamob",
        version: mio::VERSION,
        config,
        randomized: RandomizedFrom {
            seed: a.seed,
            world_size: world.len(),
        },
    };
    let events = shuffled.to_events();
    let w = create(&a.out)?;
    mio::write_ndjson(w, Some(&meta), &events).map_err(|e| Failure::output(&a.out, e))?;
    Ok(())
}
