use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use kitaev_poisson::double_group::{AbelianDouble, DoubleGroup, PoissonDouble, Sl2c};
use kitaev_poisson::graph_moves::{apply_script_with_point, MoveError, MoveRecord};
use kitaev_poisson::kitaev_space::{Kitaev, PointFile};
use kitaev_poisson::poisson_lab::{
    all_pass, iso_report, report_json, run_property, sample_rng, CheckRecord, RunConfig, CATALOG, DEFAULT_FD_STEP,
    SAMPLE_RADIUS,
};
use kitaev_poisson::ribbon_graph::moves::apply_script;
use kitaev_poisson::ribbon_graph::reference;
use kitaev_poisson::ribbon_graph::{GraphError, RibbonGraph};

#[derive(Parser)]
#[command(name = "kpl", version, about = "Poisson-Kitaev lab on ciliated ribbon graphs")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// `sl2c` or `abelian:<n>`; defaults to the backend of the point file, else sl2c
    #[arg(long, global = true)]
    backend: Option<String>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Overrides every per-check tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Finite-difference step, strictly between 1e-8 and 1e-2
    #[arg(long = "fd-step", global = true, default_value_t = DEFAULT_FD_STEP, value_parser = fd_step)]
    fd_step: f64,
    /// Output file; standard output if absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a graph file and print its surface signature
    CheckGraph { graph: PathBuf },
    /// Run catalog checks and write a JSON report
    Verify {
        graph: PathBuf,
        /// A catalog name, a comma-separated list of names, or `all`
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Replay a move script on a graph and optionally on a point
    Transform {
        graph: PathBuf,
        script: PathBuf,
        #[arg(long, requires = "point_out")]
        point: Option<PathBuf>,
        #[arg(long)]
        point_out: Option<PathBuf>,
    },
    /// Check the decoupling map and its inverse at a point of a paired graph
    IsoRoundtrip {
        graph: PathBuf,
        point: PathBuf,
        /// Also write the image of the point
        #[arg(long)]
        image: Option<PathBuf>,
    },
    /// Print a built-in graph
    Reference {
        /// single_edge, square, theta, loop, torus, paired_square, paired_loop or paired_torus
        name: String,
    },
    /// Write a random point on a graph
    RandomPoint { graph: PathBuf },
    /// List the catalog
    List,
}

fn fd_step(s: &str) -> Result<f64, String> {
    let h: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if h > 1e-8 && h < 1e-2 {
        Ok(h)
    } else {
        Err(format!("{h} is outside (1e-8, 1e-2)"))
    }
}

/// Exit 2 for unusable input, 1 for a failed check or a rejected graph.
enum Fail {
    Input(anyhow::Error),
    Check(anyhow::Error),
}

impl From<anyhow::Error> for Fail {
    fn from(e: anyhow::Error) -> Self {
        Fail::Input(e)
    }
}

type Res<T> = Result<T, Fail>;

#[derive(Clone, Copy)]
enum Backend {
    Sl2c,
    Abelian(usize),
}

fn parse_backend(s: &str) -> anyhow::Result<Backend> {
    if s == "sl2c" {
        return Ok(Backend::Sl2c);
    }
    let n = s
        .strip_prefix("abelian:")
        .and_then(|n| n.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| anyhow!("unknown backend {s}; expected sl2c or abelian:<n>"))?;
    Ok(Backend::Abelian(n))
}

macro_rules! with_backend {
    ($b:expr, |$pd:ident| $body:expr) => {
        match $b {
            Backend::Sl2c => {
                let $pd = PoissonDouble::new(Sl2c::new()).map_err(|e| Fail::Input(e.into()))?;
                $body
            }
            Backend::Abelian(n) => {
                let $pd = PoissonDouble::new(AbelianDouble::new(n)).map_err(|e| Fail::Input(e.into()))?;
                $body
            }
        }
    };
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_graph(path: &Path) -> Res<RibbonGraph> {
    RibbonGraph::from_json(&read(path)?).map_err(|e| match e {
        GraphError::Parse(_) => Fail::Input(anyhow!("{}: {e}", path.display())),
        e => Fail::Check(anyhow!("{}: {e}", path.display())),
    })
}

fn load_point_file(path: &Path) -> Res<PointFile> {
    Ok(serde_json::from_str(&read(path)?).with_context(|| format!("{}: malformed point file", path.display()))?)
}

/// The flag wins if given; it must then agree with the point file.
fn backend_for(opts: &Opts, file: Option<&PointFile>) -> Res<Backend> {
    match (&opts.backend, file) {
        (Some(b), Some(f)) if *b != f.backend => {
            Err(Fail::Input(anyhow!("--backend {b} disagrees with point file backend {}", f.backend)))
        }
        (Some(b), _) => Ok(parse_backend(b)?),
        (None, Some(f)) => Ok(parse_backend(&f.backend)?),
        (None, None) => Ok(Backend::Sl2c),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Res<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("cannot write {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn config(opts: &Opts) -> RunConfig {
    RunConfig { samples: opts.samples as usize, seed: opts.seed, h: opts.fd_step, tol: opts.tol }
}

/// JSON goes to `--out` or standard output; the summary goes wherever the JSON does not.
fn finish_report(opts: &Opts, records: &[CheckRecord]) -> Res<ExitCode> {
    let lines: Vec<String> = records
        .iter()
        .map(|r| {
            let status = if r.skipped { "SKIP" } else if r.pass { "PASS" } else { "FAIL" };
            let note = r.note.as_deref().map(|n| format!("  ({n})")).unwrap_or_default();
            format!("{status} {:<30} {:<14} residual {:.3e}  tol {:.0e}{note}", r.name, r.graph, r.max_residual, r.tolerance)
        })
        .collect();
    emit(&opts.out, &report_json(records))?;
    for l in &lines {
        if opts.out.is_some() {
            println!("{l}");
        } else {
            eprintln!("{l}");
        }
    }
    Ok(if all_pass(records) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn check_graph(path: &Path) -> Res<ExitCode> {
    let g = match load_graph(path) {
        Ok(g) => g,
        Err(Fail::Check(e)) => {
            println!("invalid: {e:#}");
            return Ok(ExitCode::from(1));
        }
        Err(e) => return Err(e),
    };
    println!("valid: {} vertices, {} edges, {} faces", g.vertices().len(), g.num_edges(), g.faces().len());
    let (genus, _) = g.surface_signature(&[0]).map_err(|e| Fail::Check(e.into()))?;
    println!("genus {genus}");
    let sites = g.sites();
    if !sites.is_empty() {
        let faces: Vec<usize> = sites.iter().map(|s| s.1).collect();
        let (gs, b) = g.surface_signature(&faces).map_err(|e| Fail::Check(e.into()))?;
        println!("signature with site faces as annuli: genus {gs}, {b} boundary components");
    }
    println!("paired: {}", if g.is_paired() { "yes" } else { "no" });
    Ok(ExitCode::SUCCESS)
}

fn suite_names(suite: &str) -> Res<Vec<&'static str>> {
    if suite == "all" {
        return Ok(CATALOG.iter().map(|c| c.0).collect());
    }
    suite
        .split(',')
        .map(|s| {
            CATALOG
                .iter()
                .find(|c| c.0 == s.trim())
                .map(|c| c.0)
                .ok_or_else(|| Fail::Input(anyhow!("unknown suite {s}; `kpl list` shows the catalog")))
        })
        .collect()
}

fn verify<G: DoubleGroup>(pd: &PoissonDouble<G>, opts: &Opts, graph: &Path, names: &[&str]) -> Res<ExitCode> {
    let g = load_graph(graph)?;
    let gname = graph.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let cfg = config(opts);
    let records = names
        .iter()
        .map(|n| run_property(pd, n, &g, &gname, &cfg).map_err(|e| Fail::Input(e.into())))
        .collect::<Res<Vec<_>>>()?;
    finish_report(opts, &records)
}

fn transform(opts: &Opts, graph: &Path, script: &Path, point: Option<&Path>, point_out: Option<&Path>) -> Res<ExitCode> {
    let g = load_graph(graph)?;
    let moves: Vec<MoveRecord> = serde_json::from_str(&read(script)?)
        .with_context(|| format!("{}: malformed move script", script.display()))?;
    let Some(point) = point else {
        let (h, _) = apply_script(&g, &moves).map_err(|(i, e)| Fail::Check(anyhow!("step {i}: {e}")))?;
        emit(&opts.out, &h.to_json())?;
        return Ok(ExitCode::SUCCESS);
    };
    let file = load_point_file(point)?;
    let replay = |e: MoveError| match e {
        MoveError::Replay { step, source } => Fail::Check(anyhow!("step {step}: {source}")),
        e => Fail::Check(e.into()),
    };
    let (h, q) = with_backend!(backend_for(opts, Some(&file))?, |pd| {
        let p = file.to_point(&pd.group, &g).map_err(|e| Fail::Input(e.into()))?;
        let (h, q, _) = apply_script_with_point(&pd.group, &g, &moves, &p).map_err(replay)?;
        let q = PointFile::from_point(&pd.group, &h, &q);
        (h, q)
    });
    emit(&opts.out, &h.to_json())?;
    emit(&point_out.map(Path::to_path_buf), &serde_json::to_string_pretty(&q).map_err(anyhow::Error::from)?)?;
    Ok(ExitCode::SUCCESS)
}

fn iso_roundtrip(opts: &Opts, graph: &Path, point: &Path, image: Option<&Path>) -> Res<ExitCode> {
    let g = load_graph(graph)?;
    if !g.is_paired() {
        let site = g.sites().first().map(|&(v, f)| format!("[\"{}\", \"{}\"]", g.vertices()[v].id, g.faces()[f].id));
        let hint = site.unwrap_or_else(|| "[\"<vertex>\", \"<face>\"]".into());
        return Err(Fail::Check(anyhow!(
            "graph is not paired; pair it first with `kpl transform {} <script>` where the script is [{{\"kind\": \"pair\", \"sites\": [{hint}]}}]",
            graph.display()
        )));
    }
    let file = load_point_file(point)?;
    let gname = graph.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let cfg = config(opts);
    with_backend!(backend_for(opts, Some(&file))?, |pd| {
        let p = file.to_point(&pd.group, &g).map_err(|e| Fail::Input(e.into()))?;
        let records = iso_report(&pd, &g, &gname, &p, &cfg).map_err(|e| Fail::Check(e.into()))?;
        if let Some(path) = image {
            let d = kitaev_poisson::decoupling_iso::Decoupling::new(&g).map_err(|e| Fail::Check(e.into()))?;
            let q = d.phi(&pd.group, &p).map_err(|e| Fail::Check(e.into()))?;
            let text = serde_json::to_string_pretty(&PointFile::from_point(&pd.group, &g, &q)).map_err(anyhow::Error::from)?;
            emit(&Some(path.to_path_buf()), &text)?;
        }
        finish_report(opts, &records)
    })
}

fn random_point(opts: &Opts, graph: &Path) -> Res<ExitCode> {
    let g = load_graph(graph)?;
    let text = with_backend!(backend_for(opts, None)?, |pd| {
        let p = Kitaev::new(&pd.group, &g).random_point(&mut sample_rng(opts.seed, 0), SAMPLE_RADIUS);
        serde_json::to_string_pretty(&PointFile::from_point(&pd.group, &g, &p)).map_err(anyhow::Error::from)?
    });
    emit(&opts.out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Res<ExitCode> {
    let opts = &cli.opts;
    match &cli.cmd {
        Cmd::CheckGraph { graph } => check_graph(graph),
        Cmd::Verify { graph, suite } => {
            let names = suite_names(suite)?;
            with_backend!(backend_for(opts, None)?, |pd| verify(&pd, opts, graph, &names))
        }
        Cmd::Transform { graph, script, point, point_out } => {
            transform(opts, graph, script, point.as_deref(), point_out.as_deref())
        }
        Cmd::IsoRoundtrip { graph, point, image } => iso_roundtrip(opts, graph, point, image.as_deref()),
        Cmd::Reference { name } => {
            let g = reference::by_name(name).ok_or_else(|| Fail::Input(anyhow!("no built-in graph {name}")))?;
            emit(&opts.out, &g.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::RandomPoint { graph } => random_point(opts, graph),
        Cmd::List => {
            for (name, statement, _) in CATALOG {
                println!("{name:<30} {statement}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Fail::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Fail::Check(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
