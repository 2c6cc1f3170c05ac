//! Experiment configuration: command-line flags layered over an optional
//! TOML file.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("conflicting matrix sources: {0}")]
    ConflictingSources(String),
    #[error("no matrix source given (use --matrix or --generator)")]
    MissingSource,
    #[error("invalid value for {key}: {msg}")]
    Invalid { key: &'static str, msg: String },
    #[error("cannot read config file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config file {path}: {source}")]
    Toml { path: PathBuf, source: toml::de::Error },
    #[error(transparent)]
    Args(#[from] clap::Error),
}

fn invalid(key: &'static str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key, msg: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorName {
    Laplacian2d,
    Convdiff2d,
    Bidiag1,
    Bidiag2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RhsMode {
    /// Read from `--rhs-file`.
    File,
    /// `b = A x` with `x` uniform in [-1, 1].
    Axrandom,
    /// `b` uniform in [-1, 1].
    Random,
    /// The vector that comes with the generator.
    Generator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolySeed {
    Random,
    Rhs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MatrixSource {
    File { path: PathBuf },
    Generator(GeneratorSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum GeneratorSpec {
    Laplacian2d { grid_n: usize },
    Convdiff2d { grid_n: usize, epsilon: f64 },
    Bidiag1,
    Bidiag2,
}

impl GeneratorSpec {
    pub fn supplies_rhs(&self) -> bool {
        matches!(self, Self::Laplacian2d { .. } | Self::Convdiff2d { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum DegreeChoice {
    None,
    Fixed { degree: usize },
    Auto { cap: usize },
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub matrix: MatrixSource,
    pub rhs: RhsMode,
    pub rhs_file: Option<PathBuf>,
    pub seed: u64,
    pub degree: DegreeChoice,
    pub poly_seed: PolySeed,
    pub ilu: bool,
    pub ilu_shift: Option<f64>,
    pub restart: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    /// Defaults for everything except the matrix source.
    pub fn new(matrix: MatrixSource) -> Self {
        let rhs = match &matrix {
            MatrixSource::Generator(g) if g.supplies_rhs() => RhsMode::Generator,
            _ => RhsMode::Axrandom,
        };
        Self {
            matrix,
            rhs,
            rhs_file: None,
            seed: 0,
            degree: DegreeChoice::None,
            poly_seed: PolySeed::Random,
            ilu: false,
            ilu_shift: None,
            restart: 50,
            tol: 1e-8,
            max_iters: 200_000,
            output: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(invalid("tol", format!("{} is not in (0, 1)", self.tol)));
        }
        if self.restart == 0 {
            return Err(invalid("restart", "must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(invalid("max-iters", "must be at least 1"));
        }
        match (&self.rhs, &self.rhs_file) {
            (RhsMode::File, None) => return Err(invalid("rhs", "--rhs file needs --rhs-file")),
            (RhsMode::File, Some(_)) | (_, None) => {}
            (_, Some(_)) => return Err(invalid("rhs-file", "only used with --rhs file")),
        }
        if self.rhs == RhsMode::Generator {
            let ok = matches!(&self.matrix, MatrixSource::Generator(g) if g.supplies_rhs());
            if !ok {
                return Err(invalid("rhs", "this matrix source has no generator right-hand side"));
            }
        }
        if let Some(s) = self.ilu_shift {
            if !self.ilu {
                return Err(invalid("ilu-shift", "only used with --ilu"));
            }
            if !(s.is_finite() && s != 0.0) {
                return Err(invalid("ilu-shift", "must be finite and nonzero"));
            }
        }
        if let MatrixSource::Generator(GeneratorSpec::Laplacian2d { grid_n } | GeneratorSpec::Convdiff2d { grid_n, .. }) =
            &self.matrix
        {
            if *grid_n < 2 {
                return Err(invalid("grid-n", "must be at least 2"));
            }
        }
        if let MatrixSource::Generator(GeneratorSpec::Convdiff2d { epsilon, .. }) = &self.matrix {
            if !(*epsilon > 0.0 && epsilon.is_finite()) {
                return Err(invalid("epsilon", "must be positive"));
            }
        }
        Ok(())
    }
}

/// Polynomial degree as written on the command line or in the file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeArg {
    None,
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for DegreeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Self::None),
            "auto" => Ok(Self::Auto),
            _ => s
                .parse()
                .map(Self::Fixed)
                .map_err(|_| format!("expected a non-negative integer, `auto` or `none`, got `{s}`")),
        }
    }
}

impl<'de> Deserialize<'de> for DegreeArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Self::Fixed(n)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Options of the `run` subcommand. Every field is optional so that values
/// from `--config` can fill the gaps.
#[derive(Debug, Clone, Default, Parser, Deserialize)]
#[command(name = "polygmres run", about = "Solve one system and write the convergence history")]
#[serde(deny_unknown_fields)]
pub struct RunArgs {
    /// TOML file with any of the options below (flags take precedence).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Matrix Market file (coordinate, real or integer).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub generator: Option<GeneratorName>,
    /// Grid points per side for laplacian2d / convdiff2d.
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Diffusion coefficient for convdiff2d.
    #[arg(long)]
    pub epsilon: Option<f64>,

    #[arg(long, value_enum)]
    pub rhs: Option<RhsMode>,
    /// Whitespace-separated values, `%` or `#` starts a comment.
    #[arg(long)]
    pub rhs_file: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,

    /// Polynomial degree: a number, `auto` or `none`.
    #[arg(long)]
    pub degree: Option<DegreeArg>,
    /// Upper bound for `--degree auto`.
    #[arg(long)]
    pub degree_cap: Option<usize>,
    /// Seed vector for the polynomial.
    #[arg(long, value_enum)]
    pub poly_seed: Option<PolySeed>,

    /// Left-precondition with ILU(0).
    #[arg(long, action = clap::ArgAction::SetTrue)]
    #[serde(default, deserialize_with = "some_bool")]
    pub ilu: Option<bool>,
    /// Replace zero ILU pivots by this value instead of failing.
    #[arg(long)]
    pub ilu_shift: Option<f64>,
    /// GMRES restart length m.
    #[arg(long)]
    pub restart: Option<usize>,
    /// Relative residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Maximum total inner iterations.
    #[arg(long)]
    pub max_iters: Option<usize>,

    /// Output prefix: writes PREFIX.history.{csv,jsonl} and PREFIX.summary.json.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

fn some_bool<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<bool>, D::Error> {
    bool::deserialize(d).map(Some)
}

impl RunArgs {
    /// `--ilu` is a plain switch on the command line; absent means "not given".
    fn normalize_flags(mut self) -> Self {
        if self.ilu == Some(false) {
            self.ilu = None;
        }
        self
    }

    /// Fields set here win over `base`, except that a matrix source given
    /// here replaces the whole source of `base`, generator parameters included.
    fn over(self, base: RunArgs) -> RunArgs {
        let own_source = self.matrix.is_some() || self.generator.is_some();
        let (matrix, generator, base_grid, base_eps) = if own_source {
            (self.matrix, self.generator, None, None)
        } else {
            (base.matrix, base.generator, base.grid_n, base.epsilon)
        };
        RunArgs {
            config: self.config,
            matrix,
            generator,
            grid_n: self.grid_n.or(base_grid),
            epsilon: self.epsilon.or(base_eps),
            rhs: self.rhs.or(base.rhs),
            rhs_file: self.rhs_file.or(base.rhs_file),
            seed: self.seed.or(base.seed),
            degree: self.degree.or(base.degree),
            degree_cap: self.degree_cap.or(base.degree_cap),
            poly_seed: self.poly_seed.or(base.poly_seed),
            ilu: self.ilu.or(base.ilu),
            ilu_shift: self.ilu_shift.or(base.ilu_shift),
            restart: self.restart.or(base.restart),
            tol: self.tol.or(base.tol),
            max_iters: self.max_iters.or(base.max_iters),
            output: self.output.or(base.output),
            format: self.format.or(base.format),
        }
    }

    fn check_single_source(&self, origin: &str) -> Result<(), ConfigError> {
        if self.matrix.is_some() && self.generator.is_some() {
            return Err(ConfigError::ConflictingSources(format!(
                "both a matrix file and a generator given {origin}"
            )));
        }
        Ok(())
    }

    /// Merges the config file (if any) and resolves defaults.
    pub fn resolve(self) -> Result<ExperimentConfig, ConfigError> {
        let flags = self.normalize_flags();
        flags.check_single_source("on the command line")?;
        let merged = match &flags.config {
            Some(path) => {
                let file = load_file(path)?;
                file.check_single_source(&format!("in {}", path.display()))?;
                flags.over(file)
            }
            None => flags,
        };
        merged.into_config()
    }

    fn into_config(self) -> Result<ExperimentConfig, ConfigError> {
        let matrix = match (self.matrix, self.generator) {
            (Some(path), None) => {
                if self.grid_n.is_some() || self.epsilon.is_some() {
                    return Err(invalid("grid-n", "generator parameters given with a matrix file"));
                }
                MatrixSource::File { path }
            }
            (None, Some(g)) => MatrixSource::Generator(generator_spec(g, self.grid_n, self.epsilon)?),
            (None, None) => return Err(ConfigError::MissingSource),
            (Some(_), Some(_)) => unreachable!("checked per layer"),
        };
        let mut cfg = ExperimentConfig::new(matrix);
        if let Some(r) = self.rhs {
            cfg.rhs = r;
        }
        cfg.rhs_file = self.rhs_file;
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        let cap = self.degree_cap.unwrap_or(20);
        if self.degree_cap.is_some() && self.degree != Some(DegreeArg::Auto) {
            return Err(invalid("degree-cap", "only used with --degree auto"));
        }
        cfg.degree = match self.degree.unwrap_or(DegreeArg::None) {
            DegreeArg::None | DegreeArg::Fixed(0) => DegreeChoice::None,
            DegreeArg::Fixed(d) => DegreeChoice::Fixed { degree: d },
            DegreeArg::Auto => DegreeChoice::Auto { cap },
        };
        cfg.poly_seed = self.poly_seed.unwrap_or(cfg.poly_seed);
        cfg.ilu = self.ilu.unwrap_or(false);
        cfg.ilu_shift = self.ilu_shift;
        cfg.restart = self.restart.unwrap_or(cfg.restart);
        cfg.tol = self.tol.unwrap_or(cfg.tol);
        cfg.max_iters = self.max_iters.unwrap_or(cfg.max_iters);
        cfg.output = self.output;
        cfg.format = self.format.unwrap_or(cfg.format);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn generator_spec(g: GeneratorName, grid_n: Option<usize>, epsilon: Option<f64>) -> Result<GeneratorSpec, ConfigError> {
    let need_grid = || grid_n.ok_or_else(|| invalid("grid-n", format!("required for {g:?}").to_lowercase()));
    let spec = match g {
        GeneratorName::Laplacian2d => GeneratorSpec::Laplacian2d { grid_n: need_grid()? },
        GeneratorName::Convdiff2d => GeneratorSpec::Convdiff2d {
            grid_n: need_grid()?,
            epsilon: epsilon.ok_or_else(|| invalid("epsilon", "required for convdiff2d"))?,
        },
        GeneratorName::Bidiag1 => GeneratorSpec::Bidiag1,
        GeneratorName::Bidiag2 => GeneratorSpec::Bidiag2,
    };
    let takes_grid = matches!(g, GeneratorName::Laplacian2d | GeneratorName::Convdiff2d);
    if !takes_grid && grid_n.is_some() {
        return Err(invalid("grid-n", format!("{g:?} has a fixed size").to_lowercase()));
    }
    if g != GeneratorName::Convdiff2d && epsilon.is_some() {
        return Err(invalid("epsilon", "only used with convdiff2d"));
    }
    Ok(spec)
}

fn load_file(path: &Path) -> Result<RunArgs, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
    toml::from_str(&text).map_err(|source| ConfigError::Toml { path: path.into(), source })
}

/// Parses `run` arguments (program name first) and merges `--config`.
pub fn parse_config<I, T>(argv: I) -> Result<ExperimentConfig, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    RunArgs::try_parse_from(argv)?.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<ExperimentConfig, ConfigError> {
        parse_config(std::iter::once("run").chain(args.iter().copied()))
    }

    #[test]
    fn defaults_with_matrix_file() {
        let c = parse(&["--matrix", "a.mtx"]).unwrap();
        assert_eq!(c.restart, 50);
        assert_eq!(c.tol, 1e-8);
        assert_eq!(c.seed, 0);
        assert_eq!(c.degree, DegreeChoice::None);
        assert_eq!(c.rhs, RhsMode::Axrandom);
        assert_eq!(c.max_iters, 200_000);
        assert!(!c.ilu);
    }

    #[test]
    fn generator_rhs_is_default_when_available() {
        let c = parse(&["--generator", "laplacian2d", "--grid-n", "5"]).unwrap();
        assert_eq!(c.rhs, RhsMode::Generator);
        let c = parse(&["--generator", "bidiag1"]).unwrap();
        assert_eq!(c.rhs, RhsMode::Axrandom);
    }

    #[test]
    fn degree_forms() {
        let c = parse(&["--matrix", "a", "--degree", "auto", "--degree-cap", "20"]).unwrap();
        assert_eq!(c.degree, DegreeChoice::Auto { cap: 20 });
        let c = parse(&["--matrix", "a", "--degree", "7"]).unwrap();
        assert_eq!(c.degree, DegreeChoice::Fixed { degree: 7 });
        let c = parse(&["--matrix", "a", "--degree", "0"]).unwrap();
        assert_eq!(c.degree, DegreeChoice::None);
        assert!(parse(&["--matrix", "a", "--degree", "x"]).is_err());
        assert!(parse(&["--matrix", "a", "--degree", "3", "--degree-cap", "5"]).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(parse(&["--matrix", "a", "--generator", "bidiag1"]), Err(ConfigError::ConflictingSources(_))));
        assert!(matches!(parse(&[]), Err(ConfigError::MissingSource)));
        assert!(parse(&["--matrix", "a", "--tol", "1"]).is_err());
        assert!(parse(&["--matrix", "a", "--tol", "abc"]).is_err());
        assert!(parse(&["--matrix", "a", "--restart", "0"]).is_err());
        assert!(parse(&["--matrix", "a", "--rhs", "file"]).is_err());
        assert!(parse(&["--matrix", "a", "--rhs", "generator"]).is_err());
        assert!(parse(&["--generator", "laplacian2d"]).is_err());
        assert!(parse(&["--generator", "convdiff2d", "--grid-n", "8"]).is_err());
        assert!(parse(&["--generator", "bidiag2", "--grid-n", "8"]).is_err());
        assert!(parse(&["--matrix", "a", "--ilu-shift", "1e-3"]).is_err());
    }
}
