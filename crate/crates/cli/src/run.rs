//! Runs one configured experiment and renders its reports.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use polygmres::gmres::ResidualKind;
use polygmres::sparse::{
    bidiag1, bidiag2, gen_convdiff2d, gen_laplacian2d, gen_laplacian_rhs, read_matrix_market_file,
};
use polygmres::{
    auto_degree, build_poly, cost_report, ilu0_factor, ilu0_factor_shifted, solve, CostCounters,
    CostReport, CsrMatrix, GmresConfig, GmresResult, Ilu0Factors, LeftPreconditioned, LinearOperator,
    PolyCoefficients, SeedMode, XorShift64Star,
};
use serde::Serialize;

use crate::config::{DegreeChoice, ExperimentConfig, GeneratorSpec, MatrixSource, OutputFormat, PolySeed, RhsMode};

/// Builds the matrix and, when the generator has one, its right-hand side.
pub fn generate(spec: &GeneratorSpec) -> Result<(CsrMatrix, Option<Vec<f64>>)> {
    Ok(match *spec {
        GeneratorSpec::Laplacian2d { grid_n } => (gen_laplacian2d(grid_n)?, Some(gen_laplacian_rhs(grid_n)?)),
        GeneratorSpec::Convdiff2d { grid_n, epsilon } => {
            let (a, b) = gen_convdiff2d(grid_n, epsilon)?;
            (a, Some(b))
        }
        GeneratorSpec::Bidiag1 => (bidiag1(), None),
        GeneratorSpec::Bidiag2 => (bidiag2(), None),
    })
}

/// Reads whitespace-separated values; `%` or `#` comments out the rest of a line.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let data = line.split(['%', '#']).next().unwrap_or("");
        for tok in data.split_whitespace() {
            let v: f64 = tok
                .parse()
                .with_context(|| format!("{}:{}: bad number `{tok}`", path.display(), lineno + 1))?;
            out.push(v);
        }
    }
    Ok(out)
}

pub fn write_vector<W: Write>(v: &[f64], mut out: W) -> std::io::Result<()> {
    for x in v {
        writeln!(out, "{x:e}")?;
    }
    out.flush()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryRow {
    pub iter: usize,
    pub relres: f64,
    pub spmvs: u64,
    pub dots: u64,
    pub scalar_dots: u64,
    /// `implicit` for the Givens estimate, `true` for the residual at exit.
    pub kind: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixInfo {
    pub n: usize,
    pub nnz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IluInfo {
    pub nnz: usize,
    pub shifted_pivots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyInfo {
    pub degree: usize,
    /// `fixed` or `auto`.
    pub selection: &'static str,
    pub cap: Option<usize>,
    /// `random` or `rhs`.
    pub seed_vector: &'static str,
    pub seed_norm: f64,
    pub setup_spmvs: u64,
    pub setup_dots: u64,
    /// Monomial coefficients `y_1 .. y_{deg+1}`.
    pub coefficients: Vec<f64>,
    /// The same values in shortest round-trip scientific notation.
    pub coefficients_sci: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterTotals {
    pub spmvs: u64,
    pub dots: u64,
    pub scalar_dots: u64,
    pub vector_updates: u64,
    pub prec_applies: u64,
    pub residual_norms: u64,
}

impl From<CostCounters> for CounterTotals {
    fn from(c: CostCounters) -> Self {
        Self {
            spmvs: c.spmvs,
            dots: c.dots,
            scalar_dots: c.scalar_dots,
            vector_updates: c.vector_updates,
            prec_applies: c.prec_applies,
            residual_norms: c.residual_norms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReportJson {
    pub global_syncs: u64,
    pub neighbor_exchanges: u64,
    pub spmvs_per_sync: f64,
    pub ca_sync_interval_spmvs: u64,
    pub projected_ca_syncs: u64,
}

impl From<&CostReport> for CostReportJson {
    fn from(r: &CostReport) -> Self {
        Self {
            global_syncs: r.global_syncs,
            neighbor_exchanges: r.neighbor_exchanges,
            spmvs_per_sync: r.spmvs_per_sync,
            ca_sync_interval_spmvs: r.ca_sync_interval_spmvs,
            projected_ca_syncs: r.projected_ca_syncs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub converged: bool,
    pub breakdown: bool,
    pub iterations: usize,
    pub cycles: usize,
    pub recoveries: usize,
    pub residual_checks: usize,
    /// True relative residual of the system GMRES saw (left-preconditioned with ILU).
    pub final_relres: f64,
    /// `||b - A x|| / ||b||`, not counted.
    pub unpreconditioned_relres: f64,
    pub matrix: MatrixInfo,
    pub ilu: Option<IluInfo>,
    pub polynomial: Option<PolyInfo>,
    pub counters: CounterTotals,
    pub cost_report: CostReportJson,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub summary: Summary,
    pub history: Vec<HistoryRow>,
    pub x: Vec<f64>,
}

impl Report {
    /// 0 when converged, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.summary.converged {
            0
        } else {
            2
        }
    }

    pub fn history_csv(&self) -> String {
        let mut s = String::from("iter,relres,spmvs,dots,scalar_dots\n");
        for r in &self.history {
            s.push_str(&format!("{},{:e},{},{},{}\n", r.iter, r.relres, r.spmvs, r.dots, r.scalar_dots));
        }
        s
    }

    pub fn history_jsonl(&self) -> String {
        let mut s = String::new();
        for r in &self.history {
            s.push_str(&serde_json::to_string(r).expect("history rows serialize"));
            s.push('\n');
        }
        s
    }

    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        s.push('\n');
        s
    }

    /// Paths of the history and summary files for an output prefix.
    pub fn output_paths(prefix: &Path, format: OutputFormat) -> (PathBuf, PathBuf) {
        let ext = match format {
            OutputFormat::Csv => "history.csv",
            OutputFormat::Jsonl => "history.jsonl",
        };
        let with = |suffix: &str| {
            let mut p = prefix.as_os_str().to_owned();
            p.push(".");
            p.push(suffix);
            PathBuf::from(p)
        };
        (with(ext), with("summary.json"))
    }

    pub fn write_files(&self, prefix: &Path, format: OutputFormat) -> Result<(PathBuf, PathBuf)> {
        let (hist, summ) = Self::output_paths(prefix, format);
        let body = match format {
            OutputFormat::Csv => self.history_csv(),
            OutputFormat::Jsonl => self.history_jsonl(),
        };
        write_text(&hist, &body)?;
        write_text(&summ, &self.summary_json())?;
        Ok((hist, summ))
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(f);
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .with_context(|| format!("writing {}", path.display()))
}

fn load_problem(cfg: &ExperimentConfig, rng: &mut XorShift64Star) -> Result<(CsrMatrix, Vec<f64>)> {
    let (a, generated_rhs) = match &cfg.matrix {
        MatrixSource::File { path } => {
            let a = read_matrix_market_file(path).with_context(|| format!("loading matrix {}", path.display()))?;
            (a, None)
        }
        MatrixSource::Generator(spec) => generate(spec)?,
    };
    if !a.is_square() {
        bail!("matrix is {}x{}, GMRES needs a square matrix", a.nrows(), a.ncols());
    }
    let n = a.nrows();
    let b = match cfg.rhs {
        RhsMode::Generator => generated_rhs.context("generator has no right-hand side")?,
        RhsMode::File => {
            let path = cfg.rhs_file.as_ref().context("--rhs file needs --rhs-file")?;
            let b = read_vector(path)?;
            if b.len() != n {
                bail!("{} has {} values, matrix has {n} rows", path.display(), b.len());
            }
            b
        }
        RhsMode::Random => rng.symmetric_vector(n),
        RhsMode::Axrandom => {
            let x = rng.symmetric_vector(n);
            a.spmv(&x)?
        }
    };
    Ok((a, b))
}

/// Runs the experiment and, when `cfg.output` is set, writes the report files.
///
/// The operator stack is: ILU(0) left preconditioning (optional), then the
/// polynomial built on that operator (optional), then GMRES. Polynomial setup
/// is charged to the same counters as the solve.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let mut rng = XorShift64Star::new(cfg.seed);
    let (a, b) = load_problem(cfg, &mut rng)?;
    let n = a.nrows();
    let mut counters = CostCounters::new();

    let factors: Option<Ilu0Factors> = if cfg.ilu {
        let f = match cfg.ilu_shift {
            Some(s) => ilu0_factor_shifted(&a, s),
            None => ilu0_factor(&a),
        };
        Some(f.context("ILU(0) factorization")?)
    } else {
        None
    };
    let left = factors.as_ref().map(|f| LeftPreconditioned::new(&a, f));
    let op: &dyn LinearOperator = match &left {
        Some(l) => l,
        None => &a,
    };
    let rhs = match &left {
        Some(l) => l.precondition(&b, &mut counters),
        None => b.clone(),
    };

    let before_setup = counters;
    let poly: Option<(PolyCoefficients, &'static str, Option<usize>)> = match cfg.degree {
        DegreeChoice::None => None,
        DegreeChoice::Fixed { degree } | DegreeChoice::Auto { cap: degree } => {
            let (v0, mode) = match cfg.poly_seed {
                PolySeed::Random => (rng.symmetric_vector(n), SeedMode::Random { seed: cfg.seed }),
                PolySeed::Rhs => (rhs.clone(), SeedMode::Rhs),
            };
            let p = if let DegreeChoice::Auto { cap } = cfg.degree {
                (auto_degree(op, &v0, cap, &mut counters), "auto", Some(cap))
            } else {
                let p = build_poly(op, &v0, degree, &mut counters)
                    .with_context(|| format!("building the degree-{degree} polynomial"))?;
                (p, "fixed", None)
            };
            Some((p.0.with_seed_mode(mode), p.1, p.2))
        }
    };
    let setup = counters - before_setup;

    let gcfg = GmresConfig { restart: cfg.restart, tol: cfg.tol, max_iters: cfg.max_iters, record_history: true };
    let result = solve(op, &rhs, None, poly.as_ref().map(|p| &p.0), &gcfg, &mut counters)?;

    let summary = summarize(cfg, &a, &b, factors.as_ref(), poly.as_ref(), setup, &result);
    let history = result
        .history
        .iter()
        .map(|h| HistoryRow {
            iter: h.iteration,
            relres: h.relres,
            spmvs: h.spmvs,
            dots: h.dots,
            scalar_dots: h.scalar_dots,
            kind: match h.kind {
                ResidualKind::Implicit => "implicit",
                ResidualKind::True => "true",
            },
        })
        .collect();
    let report = Report { summary, history, x: result.x };
    if let Some(prefix) = &cfg.output {
        report.write_files(prefix, cfg.format)?;
    }
    Ok(report)
}

fn summarize(
    cfg: &ExperimentConfig,
    a: &CsrMatrix,
    b: &[f64],
    factors: Option<&Ilu0Factors>,
    poly: Option<&(PolyCoefficients, &'static str, Option<usize>)>,
    setup: CostCounters,
    r: &GmresResult,
) -> Summary {
    let ax = a.spmv(&r.x).expect("solution has the matrix dimension");
    let res: f64 = b.iter().zip(&ax).map(|(bi, ai)| (bi - ai) * (bi - ai)).sum::<f64>().sqrt();
    let bn: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let unprec = if bn == 0.0 { 0.0 } else { res / bn };

    let degree = poly.map_or(0, |p| p.0.degree());
    let polynomial = poly.map(|(p, selection, cap)| PolyInfo {
        degree: p.degree(),
        selection,
        cap: *cap,
        seed_vector: match cfg.poly_seed {
            PolySeed::Random => "random",
            PolySeed::Rhs => "rhs",
        },
        seed_norm: p.seed_norm,
        setup_spmvs: setup.spmvs,
        setup_dots: setup.dots,
        coefficients: p.coeffs().to_vec(),
        coefficients_sci: p.coeffs().iter().map(|c| format!("{c:e}")).collect(),
    });
    Summary {
        converged: r.converged,
        breakdown: r.breakdown,
        iterations: r.iterations,
        cycles: r.cycles,
        recoveries: r.recoveries,
        residual_checks: r.residual_checks,
        final_relres: r.final_relres,
        unpreconditioned_relres: unprec,
        matrix: MatrixInfo { n: a.nrows(), nnz: a.nnz() },
        ilu: factors.map(|f| IluInfo { nnz: f.nnz(), shifted_pivots: f.shifted_pivots() }),
        polynomial,
        counters: r.counters.into(),
        cost_report: (&cost_report(&r.counters, degree, cfg.restart)).into(),
        config: cfg.clone(),
    }
}
