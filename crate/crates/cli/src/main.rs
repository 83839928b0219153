use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use dgbar_cli::commands::{
    cmd_bar, cmd_fiber, cmd_gen_deligne, cmd_kml, cmd_twisted, cmd_validate, parse_list, parse_range, BarOptions,
    CliError, FiberOptions, TwistedOptions,
};
use dgbar_cli::report::Report;

#[derive(Parser)]
#[command(name = "dgbar", version, about = "Bar constructions, twisted complexes and comodules over finite DGAs")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check the DGA axioms and any stored augmentations.
    Validate { file: PathBuf },
    /// Bar complex cohomology of a DGA.
    Bar {
        file: PathBuf,
        #[arg(long)]
        aug1: Option<String>,
        #[arg(long)]
        aug2: Option<String>,
        /// Index window `a..b`, inclusive (default `0..maxlen`).
        #[arg(long)]
        window: Option<String>,
        #[arg(long, default_value_t = 3)]
        maxlen: usize,
        /// Degrees to report, e.g. `0,1` or `-1..1`.
        #[arg(long)]
        cohomology: Option<String>,
        /// Use the reduced bar instead of the simplicial one.
        #[arg(long)]
        reduced: bool,
        /// Compare with the reduced bar on these window widths.
        #[arg(long)]
        compare: Option<String>,
        /// Split by weight up to this bound.
        #[arg(long)]
        weights: Option<u32>,
        /// Also check the coalgebra axioms.
        #[arg(long)]
        coalgebra: bool,
        /// Print cocycle representatives (reduced bar only).
        #[arg(long)]
        representatives: bool,
    },
    /// The complexes `K_{m,l}` over the dual numbers.
    Kml {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        l: usize,
    },
    /// Check a twisted complex over a DGA.
    Twisted {
        dga: PathBuf,
        spec: PathBuf,
        #[arg(long)]
        aug: Option<String>,
        /// Check that ψ∘φ returns the same twisted complex.
        #[arg(long)]
        roundtrip: bool,
        /// Compare End(M) with comodule endomorphisms up to this length.
        #[arg(long)]
        hom: Option<usize>,
    },
    /// Fiber product of `A1 -> A12 <- A2`.
    Fiber {
        a1: PathBuf,
        a2: PathBuf,
        a12: PathBuf,
        #[arg(long, default_value = "u1")]
        u1: String,
        #[arg(long, default_value = "u2")]
        u2: String,
        /// Check the comparison copath for this augmentation of A12.
        #[arg(long)]
        copath: Option<String>,
        #[arg(long, default_value_t = 3)]
        width: usize,
        /// Write the fiber product as a DGA file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the finite Deligne surrogate as a DGA file.
    GenDeligne {
        #[arg(long)]
        ext_degree: usize,
        #[arg(long)]
        max_weight: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(p: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn write(p: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))
}

fn run(cli: Cli) -> anyhow::Result<Report> {
    let r = match cli.command {
        Command::Validate { file } => cmd_validate(&read(&file)?)?,
        Command::Bar { file, aug1, aug2, window, maxlen, cohomology, reduced, compare, weights, coalgebra, representatives } => {
            let degrees = match cohomology {
                Some(s) if s.contains("..") => {
                    let (a, b) = parse_range(&s)?;
                    (a..=b).collect()
                }
                Some(s) => s
                    .split(',')
                    .map(|x| x.trim().parse().map_err(|_| CliError::Usage(format!("bad degree list {s:?}"))))
                    .collect::<Result<_, _>>()?,
                None => Vec::new(),
            };
            let o = BarOptions {
                aug1,
                aug2,
                window: window.as_deref().map(parse_range).transpose()?,
                max_length: maxlen,
                degrees,
                reduced,
                compare: compare.as_deref().map(parse_list).transpose()?.unwrap_or_default(),
                weights,
                coalgebra,
                representatives,
            };
            cmd_bar(&read(&file)?, &o)?
        }
        Command::Kml { m, l } => cmd_kml(m, l)?,
        Command::Twisted { dga, spec, aug, roundtrip, hom } => {
            cmd_twisted(&read(&dga)?, &read(&spec)?, &TwistedOptions { aug, roundtrip, hom })?
        }
        Command::Fiber { a1, a2, a12, u1, u2, copath, width, out } => {
            let (r, fp) = cmd_fiber(&read(&a1)?, &read(&a2)?, &read(&a12)?, &FiberOptions { u1, u2, copath, width })?;
            if let (Some(p), Some(f)) = (out, fp) {
                write(&p, &f.to_toml().map_err(CliError::from)?)?;
            }
            r
        }
        Command::GenDeligne { ext_degree, max_weight, out } => {
            let (r, f) = cmd_gen_deligne(ext_degree, max_weight)?;
            let text = f.to_toml().map_err(CliError::from)?;
            match out {
                Some(p) => write(&p, &text)?,
                None => {
                    let _ = std::io::stdout().lock().write_all(text.as_bytes());
                    return Ok(Report { checks: r.checks, ..Report::new("gen-deligne") });
                }
            }
            r
        }
    };
    Ok(r)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let quiet = matches!(&cli.command, Command::GenDeligne { out: None, .. });
    match run(cli) {
        Ok(r) => {
            if !quiet {
                let text = match format {
                    Format::Text => r.to_text(),
                    Format::Json => r.to_json() + "\n",
                };
                // A closed pipe is not an error worth reporting.
                let _ = std::io::stdout().lock().write_all(text.as_bytes());
            }
            if r.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
