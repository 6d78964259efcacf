use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nullcone::analyzer::{CertifyOptions, Evidence, Verdict};
use nullcone_cli::input::{parse_simples, parse_vector, read_quiver};
use nullcone_cli::*;

#[derive(Parser)]
#[command(name = "nullcone", version, about = "Semi-invariants of Dynkin quivers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Input {
    /// Quiver file: a `vertices n` line, then `arrow t h` lines.
    #[arg(long, conflicts_with = "preset")]
    quiver: Option<PathBuf>,
    #[arg(long)]
    preset: Option<Preset>,
    #[arg(long, default_value_t = 1)]
    n: i64,
    #[arg(long, default_value_t = 1)]
    m: i64,
    /// Dimension vector, e.g. `2,4,7,4,3,2,1,3`.
    #[arg(long)]
    dim: Option<String>,
    /// 1-based indices of the perpendicular simples, e.g. `2,4`.
    #[arg(long)]
    simples: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generic decomposition and perpendicular simples.
    Decompose(Input),
    /// Components of the zero set and reducedness.
    Nullcone(Input),
    /// The b-function family of the selected semi-invariants.
    Bfunction(Input),
    /// Rational singularities verdict.
    Singularities {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4)]
        box_bound: i64,
        #[arg(long, default_value_t = 40)]
        depth_bound: usize,
        /// Write the certificate here when one is found.
        #[arg(long)]
        save_certificate: Option<PathBuf>,
    },
    /// Hom and Ext between indecomposables (`--dim V --with W`), or the whole table.
    Hom {
        #[command(flatten)]
        input: Input,
        #[arg(long, requires = "dim")]
        with: Option<String>,
    },
    /// Re-check a certificate or a saved singularities report.
    VerifyCertificate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn request(input: &Input) -> anyhow::Result<Request> {
    let mut req = match (&input.quiver, input.preset) {
        (Some(path), _) => Request { quiver: read_quiver(path)?, alpha: None, simples: None },
        (None, Some(p)) => p.request(input.n, input.m),
        (None, None) => anyhow::bail!(nullcone::Error::InvalidInput("give --quiver FILE or --preset NAME".into())),
    };
    if let Some(d) = &input.dim {
        req.alpha = Some(parse_vector(d)?);
    }
    if let Some(s) = &input.simples {
        req.simples = Some(parse_simples(s)?);
    }
    Ok(req)
}

fn emit<T: serde::Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> anyhow::Result<()> {
    match format {
        Format::Json => println!("{}", to_json(value)?),
        Format::Text => print!("{}", text()),
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.cmd {
        Cmd::Decompose(input) => {
            let req = request(&input)?;
            let r = cmd_decompose(&req)?;
            emit(input.format, &r, || text_decompose(&req.quiver, &r))
        }
        Cmd::Nullcone(input) => {
            let req = request(&input)?;
            let r = cmd_nullcone(&req)?;
            emit(input.format, &r, || text_nullcone(&req.quiver, &r))
        }
        Cmd::Bfunction(input) => {
            let req = request(&input)?;
            let r = cmd_bfunction(&req)?;
            emit(input.format, &r, || format!("{}\n", r.rendered))
        }
        Cmd::Singularities { input, box_bound, depth_bound, save_certificate } => {
            let req = request(&input)?;
            let opts = CertifyOptions { box_bound, depth_bound, ..CertifyOptions::default() };
            let r = cmd_singularities(&req, opts)?;
            if let (Some(path), Verdict::RationalSingularities(Evidence::Certificate(c))) = (&save_certificate, &r.report.verdict) {
                fs::write(path, to_json(c)?)?;
            }
            emit(input.format, &r, || text_singularities(&r))
        }
        Cmd::Hom { input, with } => {
            let req = request(&input)?;
            let pair = match (&req.alpha, with) {
                (Some(v), Some(w)) => Some((v.clone(), parse_vector(&w)?)),
                _ => None,
            };
            let r = cmd_hom(&req.quiver, pair)?;
            emit(input.format, &r, || text_hom(&r))
        }
        Cmd::VerifyCertificate { file, format } => {
            let r = cmd_verify(&fs::read_to_string(&file)?)?;
            emit(format, &r, || match &r.error {
                None => format!("certificate ok: {} nodes, depth {}\n", r.nodes, r.depth),
                Some(e) => format!("certificate rejected: {e}\n"),
            })?;
            if !r.ok {
                anyhow::bail!("certificate rejected");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
