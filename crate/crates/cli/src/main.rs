use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser};
use polygmres::sparse::write_matrix_market;
use polygmres_cli::config::GeneratorName;
use polygmres_cli::{generate, run_experiment, write_vector, Report, RunArgs};

#[derive(Parser)]
#[command(name = "polygmres", version, about = "GMRES with a minimum-residual polynomial preconditioner")]
enum Cli {
    /// Solve one system and write the convergence history and summary.
    Run(RunArgs),
    /// Write a generated test matrix in Matrix Market format.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    generator: GeneratorName,
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Matrix Market output file.
    #[arg(long)]
    output: PathBuf,
    /// Also write the generator's right-hand side, one value per line.
    #[arg(long)]
    rhs_output: Option<PathBuf>,
}

fn run(args: RunArgs) -> Result<u8> {
    let cfg = args.resolve()?;
    let report = run_experiment(&cfg)?;
    let s = &report.summary;
    eprintln!(
        "{} after {} iterations, relres {:e}, spmvs {}, dots {}",
        if s.converged { "converged" } else { "not converged" },
        s.iterations,
        s.final_relres,
        s.counters.spmvs,
        s.counters.dots
    );
    match &cfg.output {
        Some(prefix) => {
            let (h, j) = Report::output_paths(prefix, cfg.format);
            eprintln!("wrote {} and {}", h.display(), j.display());
        }
        None => print!("{}", report.summary_json()),
    }
    Ok(report.exit_code())
}

fn gen(args: GenerateArgs) -> Result<u8> {
    let cfg = RunArgs {
        generator: Some(args.generator),
        grid_n: args.grid_n,
        epsilon: args.epsilon,
        ..Default::default()
    }
    .resolve()?;
    let polygmres_cli::MatrixSource::Generator(spec) = cfg.matrix else { unreachable!() };
    let (a, b) = generate(&spec)?;
    let f = File::create(&args.output).with_context(|| format!("creating {}", args.output.display()))?;
    write_matrix_market(&a, BufWriter::new(f))?;
    if let Some(path) = args.rhs_output {
        let b = b.context("this generator has no right-hand side")?;
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_vector(&b, BufWriter::new(f))?;
    }
    Ok(0)
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for non-convergence
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match cli {
        Cli::Run(a) => run(a),
        Cli::Generate(a) => gen(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
