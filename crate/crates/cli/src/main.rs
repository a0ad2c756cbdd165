use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use drumkit::geometry::BaseTriangle;
use drumkit::tiling::BoundaryCondition;
use drumkit_cli::config::{RunConfig, Settings};
use drumkit_cli::{commands, Outcome, USAGE};

#[derive(Parser)]
#[command(name = "drumkit", version, about = "Isospectral drums: certificates, transplantations, realizations and spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the catalog of pairs.
    List {
        id: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run the combinatorial checks on a pair, or on `all`.
    Verify {
        target: String,
        #[arg(long)]
        json: bool,
    },
    /// Print a transplantation matrix.
    Transplant {
        pair: String,
        #[arg(long, default_value = "dirichlet")]
        bc: BoundaryCondition,
        /// Seed as `right_tile,left_label`.
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        complement: bool,
        #[arg(long)]
        json: bool,
    },
    /// Lay both domains out in the plane and write an SVG.
    Realize {
        pair: String,
        /// `a1,a2,a3[,scale]` in radians, `deg` suffix for degrees.
        #[arg(long)]
        tri: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        allow_cone: bool,
    },
    /// Compare finite-element spectra of the two domains.
    Spectrum(SpectrumArgs),
    /// Compare spectra and point measures at the special points.
    Homophonic(SpectrumArgs),
}

#[derive(Args)]
struct SpectrumArgs {
    pair: Option<String>,
    #[arg(long)]
    tri: Option<String>,
    #[arg(long)]
    bc: Option<BoundaryCondition>,
    #[arg(short = 'r', long)]
    level: Option<u32>,
    #[arg(short = 'N', long)]
    count: Option<usize>,
    /// Largest accepted relative eigenvalue gap.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    solver_tol: Option<f64>,
    #[arg(long)]
    measure_tol: Option<f64>,
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    homophonic: bool,
    #[arg(long)]
    allow_cone: bool,
    /// `key=value` file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

impl SpectrumArgs {
    fn settings(self, homophonic: bool) -> Result<(Settings, Option<PathBuf>), String> {
        let flags = Settings {
            pair: self.pair,
            triangle: self.tri,
            bc: self.bc,
            level: self.level,
            count: self.count,
            tolerance: self.tol,
            solver_tolerance: self.solver_tol,
            measure_tolerance: self.measure_tol,
            clusters: self.clusters,
            homophonic: (self.homophonic || homophonic).then_some(true),
            allow_cone: self.allow_cone.then_some(true),
            output: self.output,
            svg: self.svg,
        };
        let file = match &self.config {
            Some(p) => Settings::load(p)?,
            None => Settings::default(),
        };
        Ok((flags.or(file), self.config))
    }
}

fn emit(outcome: &Outcome, json: bool, output: Option<&PathBuf>) -> Result<(), String> {
    let body = match (&outcome.text, json) {
        (Some(text), false) => text.clone(),
        _ => serde_json::to_string_pretty(&outcome.report).expect("serializable") + "\n",
    };
    match output {
        Some(p) => std::fs::write(p, body).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn run(cli: Cli) -> Result<i32, String> {
    let outcome = match cli.command {
        Command::List { id, json } => {
            let o = commands::list(id.as_deref());
            emit(&o, json, None)?;
            o
        }
        Command::Verify { target, json } => {
            let o = commands::verify(&target);
            emit(&o, json || o.code == USAGE, None)?;
            o
        }
        Command::Transplant { pair, bc, seed, complement, json } => {
            let seed = match seed {
                Some(s) => {
                    let parts: Vec<&str> = s.split(',').collect();
                    let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad seed `{s}`"));
                    match parts.as_slice() {
                        [a, b] => Some((parse(a)?, parse(b)?)),
                        _ => return Err(format!("seed must be `right_tile,left_label`, got `{s}`")),
                    }
                }
                None => None,
            };
            let o = commands::transplant(&pair, bc, seed, complement);
            emit(&o, json || o.code != 0, None)?;
            o
        }
        Command::Realize { pair, tri, output, allow_cone } => {
            let tri = tri.map(|t| t.parse::<BaseTriangle<f64>>()).transpose().map_err(|e| e.to_string())?;
            let o = commands::realize_cmd(&pair, tri, allow_cone);
            if let (Some(path), Some(svg)) = (&output, &o.text) {
                std::fs::write(path, svg).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            emit(&o, true, None)?;
            o
        }
        Command::Spectrum(args) => spectral(args, false)?,
        Command::Homophonic(args) => spectral(args, true)?,
    };
    Ok(outcome.code)
}

fn spectral(args: SpectrumArgs, homophonic: bool) -> Result<Outcome, String> {
    let (settings, _) = args.settings(homophonic)?;
    let cfg = RunConfig::resolve(settings)?;
    let o = commands::spectrum(&cfg);
    emit(&o, true, cfg.output.as_ref())?;
    if let (Some(path), Some(svg)) = (&cfg.svg, &o.text) {
        std::fs::write(path, svg).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(o)
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("DRUMKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(message) => {
            eprintln!("drumkit: {message}");
            ExitCode::from(USAGE as u8)
        }
    }
}

