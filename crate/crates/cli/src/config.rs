//! Run configuration from flags and `key=value` files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use drumkit::geometry::{warped_triangle, BaseTriangle};
use drumkit::spectral::DEFAULT_TOLERANCE;
use drumkit::tiling::BoundaryCondition;

/// Settings for a spectral comparison. Absent fields fall back to the
/// defaults in [`RunConfig::resolve`].
#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub pair: Option<String>,
    pub triangle: Option<String>,
    pub bc: Option<BoundaryCondition>,
    pub level: Option<u32>,
    pub count: Option<usize>,
    pub tolerance: Option<f64>,
    pub solver_tolerance: Option<f64>,
    pub measure_tolerance: Option<f64>,
    pub clusters: Option<usize>,
    pub homophonic: Option<bool>,
    pub allow_cone: Option<bool>,
    pub output: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl Settings {
    /// Fields set in `self` win over those in `fallback`.
    pub fn or(self, fallback: Settings) -> Settings {
        Settings {
            pair: self.pair.or(fallback.pair),
            triangle: self.triangle.or(fallback.triangle),
            bc: self.bc.or(fallback.bc),
            level: self.level.or(fallback.level),
            count: self.count.or(fallback.count),
            tolerance: self.tolerance.or(fallback.tolerance),
            solver_tolerance: self.solver_tolerance.or(fallback.solver_tolerance),
            measure_tolerance: self.measure_tolerance.or(fallback.measure_tolerance),
            clusters: self.clusters.or(fallback.clusters),
            homophonic: self.homophonic.or(fallback.homophonic),
            allow_cone: self.allow_cone.or(fallback.allow_cone),
            output: self.output.or(fallback.output),
            svg: self.svg.or(fallback.svg),
        }
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Settings, String> {
        let mut map = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", no + 1))?;
            map.insert(k.trim().replace('-', "_"), v.trim().to_string());
        }
        let mut s = Settings::default();
        for (k, v) in map {
            let num_err = |_: std::num::ParseIntError| format!("bad value `{v}` for {k}");
            let float_err = |_: std::num::ParseFloatError| format!("bad value `{v}` for {k}");
            match k.as_str() {
                "pair" => s.pair = Some(v),
                "tri" | "triangle" => s.triangle = Some(v),
                "bc" => s.bc = Some(v.parse().map_err(|_| format!("bad boundary condition `{v}`"))?),
                "level" | "r" => s.level = Some(v.parse().map_err(num_err)?),
                "count" | "n" => s.count = Some(v.parse().map_err(num_err)?),
                "tol" | "tolerance" => s.tolerance = Some(v.parse().map_err(float_err)?),
                "solver_tol" => s.solver_tolerance = Some(v.parse().map_err(float_err)?),
                "measure_tol" => s.measure_tolerance = Some(v.parse().map_err(float_err)?),
                "clusters" => s.clusters = Some(v.parse().map_err(num_err)?),
                "homophonic" => s.homophonic = Some(v.parse().map_err(|_| format!("bad flag `{v}`"))?),
                "allow_cone" => s.allow_cone = Some(v.parse().map_err(|_| format!("bad flag `{v}`"))?),
                "out" | "output" => s.output = Some(v.into()),
                "svg" => s.svg = Some(v.into()),
                other => return Err(format!("unknown key `{other}`")),
            }
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Settings, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Settings::parse(&text)
    }
}

/// A validated spectral run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub pair: String,
    pub triangle: BaseTriangle<f64>,
    pub bc: BoundaryCondition,
    pub level: u32,
    pub count: usize,
    pub tolerance: f64,
    pub solver_tolerance: f64,
    pub measure_tolerance: f64,
    pub clusters: usize,
    pub homophonic: bool,
    pub allow_cone: bool,
    pub output: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl RunConfig {
    /// Fills defaults: the pair's tabulated warp (equilateral if none),
    /// Dirichlet, level 3, 20 eigenvalues, gap tolerance 1e-8.
    pub fn resolve(s: Settings) -> Result<RunConfig, String> {
        let pair = s.pair.ok_or("no pair given")?;
        let pair = drumkit::catalog::find(&pair).map_err(|e| e.to_string())?.id.clone();
        let triangle = match s.triangle {
            Some(t) => t.parse().map_err(|e: drumkit::Error| e.to_string())?,
            None => warped_triangle(&pair).unwrap_or_else(|| BaseTriangle::equilateral(1.0)),
        };
        let level = s.level.unwrap_or(3);
        let count = s.count.unwrap_or(20);
        if count == 0 {
            return Err("eigenvalue count must be positive".into());
        }
        if level > 8 {
            return Err("refinement level above 8 is not supported".into());
        }
        let positive = |x: f64, what: &str| if x > 0.0 { Ok(x) } else { Err(format!("{what} must be positive")) };
        Ok(RunConfig {
            pair,
            triangle,
            bc: s.bc.unwrap_or(BoundaryCondition::Dirichlet),
            level,
            count,
            tolerance: positive(s.tolerance.unwrap_or(1e-8), "tolerance")?,
            solver_tolerance: positive(s.solver_tolerance.unwrap_or(DEFAULT_TOLERANCE), "solver tolerance")?,
            measure_tolerance: positive(s.measure_tolerance.unwrap_or(1e-6), "measure tolerance")?,
            clusters: s.clusters.unwrap_or(10),
            homophonic: s.homophonic.unwrap_or(false),
            allow_cone: s.allow_cone.unwrap_or(false),
            output: s.output,
            svg: s.svg,
        })
    }
}
