use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use eisrank_core::cache::CACHE_ENV;
use eisrank_core::modsym::{Direct, EisensteinOptions, HeckeSource, DEFAULT_DIM_CAP};
use eisrank_core::report::{render_csv_row, render_json_line, RankField, CSV_HEADER};
use eisrank_core::{
    analyze_with, level_square_dims_with, render, render_entries, run_selfcheck, scan_each,
    AnalyzeOptions, Error, Format, MatrixCache, ScanEntry, SelfcheckOptions,
};

#[derive(Parser, Debug)]
#[command(
    name = "eisrank",
    version,
    about = "Eisenstein ideal rank and zeta element analyses at prime level"
)]
struct Cli {
    /// Directory for cached Hecke matrices.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,

    /// Largest cuspidal dimension attempted.
    #[arg(long, global = true, default_value_t = DEFAULT_DIM_CAP)]
    dim_cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze one level.
    Analyze {
        #[arg(long = "N")]
        n: u64,
        #[arg(long)]
        p: u64,
        /// Starting p-adic precision exponent.
        #[arg(long)]
        precision: Option<u32>,
        /// Skip the rank computation.
        #[arg(long)]
        ord_only: bool,
        #[arg(long, default_value = "json")]
        format: Format,
        /// Include wall-clock timings in the output.
        #[arg(long)]
        timings: bool,
        /// Leave ℓ = p out of the Hecke prime budget.
        #[arg(long)]
        exclude_p: bool,
    },
    /// Analyze every prime N ≡ 1 mod p in a range.
    Scan {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n_min: u64,
        #[arg(long)]
        n_max: u64,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        ord_only: bool,
        #[arg(long, default_value = "csv")]
        format: Format,
        #[arg(long)]
        exclude_p: bool,
    },
    /// Eisenstein dimension of plus cuspidal symbols at level N².
    LevelSquare {
        #[arg(long = "N")]
        n: u64,
        #[arg(long)]
        p: u64,
        /// Comma-separated Hecke primes, all of which are used.
        #[arg(long, value_delimiter = ',')]
        hecke_primes: Option<Vec<u64>>,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Run the invariant suites.
    Selfcheck {
        #[arg(long, default_value = "table")]
        format: Format,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) => e.kind().exit_code() as u8,
        None => 1,
    }
}

const VIOLATION: u8 = 5;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn source(cache: &Option<MatrixCache>) -> &dyn HeckeSource {
    match cache {
        Some(c) => c,
        None => &Direct,
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let cache = MatrixCache::from_option_or_env(cli.cache_dir.clone())
        .context("opening the cache directory")?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Analyze {
            n,
            p,
            precision,
            ord_only,
            format,
            timings,
            exclude_p,
        } => {
            let opts = AnalyzeOptions {
                precision,
                ord_only,
                timings,
                eisenstein: EisensteinOptions {
                    exclude_p,
                    dim_cap: cli.dim_cap,
                    ..Default::default()
                },
            };
            let report = analyze_with(n, p, &opts, source(&cache))?;
            out.write_all(render(&report, format).as_bytes())?;
            if let RankField::Failed(f) = &report.r {
                eprintln!("error: rank computation failed: {}", f.message);
                return Ok(f.kind.exit_code() as u8);
            }
            Ok(if report.all_ok() { 0 } else { VIOLATION })
        }
        Command::Scan {
            p,
            n_min,
            n_max,
            jobs,
            ord_only,
            format,
            exclude_p,
        } => {
            if let Some(j) = jobs {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(j.max(1))
                    .build_global()
                    .context("configuring the worker pool")?;
            }
            let opts = AnalyzeOptions {
                ord_only,
                eisenstein: EisensteinOptions {
                    exclude_p,
                    dim_cap: cli.dim_cap,
                    ..Default::default()
                },
                ..Default::default()
            };
            let mut code = 0u8;
            let mut note = |e: &ScanEntry| match e {
                Ok(r) if !r.all_ok() => code = VIOLATION,
                Ok(r) => {
                    if let RankField::Failed(f) = &r.r {
                        code = code.max(f.kind.exit_code() as u8);
                    }
                }
                Err(f) => code = code.max(f.error.kind.exit_code() as u8),
            };
            match format {
                Format::Table => {
                    let mut all = Vec::new();
                    scan_each(p, n_min, n_max, &opts, source(&cache), |e| {
                        note(e);
                        all.push(e.clone());
                    })?;
                    out.write_all(render_entries(&all, Format::Table).as_bytes())?;
                }
                Format::Csv | Format::Json => {
                    if format == Format::Csv {
                        writeln!(out, "{CSV_HEADER}")?;
                    }
                    let mut io_err = None;
                    scan_each(p, n_min, n_max, &opts, source(&cache), |e| {
                        note(e);
                        let line = if format == Format::Csv {
                            render_csv_row(e)
                        } else {
                            render_json_line(e)
                        };
                        if let Err(err) = writeln!(out, "{line}").and_then(|_| out.flush()) {
                            io_err.get_or_insert(err);
                        }
                    })?;
                    if let Some(e) = io_err {
                        return Err(e.into());
                    }
                }
            }
            Ok(code)
        }
        Command::LevelSquare {
            n,
            p,
            hecke_primes,
            format,
        } => {
            let opts = EisensteinOptions {
                hecke_primes,
                dim_cap: cli.dim_cap,
                ..Default::default()
            };
            let dims = level_square_dims_with(n, p, &opts, source(&cache))?;
            match format {
                Format::Json => {
                    let mut v = serde_json::to_value(&dims)?;
                    v["matches_prediction"] = dims.matches_prediction().into();
                    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
                }
                Format::Csv => {
                    writeln!(
                        out,
                        "N,p,r,dim_E,old_part,new_count,predicted_new_count,primes,stabilized"
                    )?;
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{}",
                        dims.n,
                        dims.p,
                        dims.r,
                        dims.dim_e,
                        dims.old_part,
                        dims.new_count,
                        dims.predicted_new_count,
                        join(&dims.primes_used, ";"),
                        dims.stabilized
                    )?;
                }
                Format::Table => {
                    writeln!(out, "level            {}²", dims.n)?;
                    writeln!(out, "p                {}", dims.p)?;
                    writeln!(out, "r                {}", dims.r)?;
                    writeln!(out, "cuspidal dim     {}", dims.cuspidal_dim)?;
                    writeln!(out, "dim_E            {}", dims.dim_e)?;
                    writeln!(out, "old part         {}", dims.old_part)?;
                    writeln!(out, "new count        {}", dims.new_count)?;
                    writeln!(out, "predicted new    {}", dims.predicted_new_count)?;
                    writeln!(out, "hecke primes     {}", join(&dims.primes_used, ","))?;
                    writeln!(out, "dims per prime   {}", join(&dims.dims, ","))?;
                    writeln!(out, "stabilized       {}", dims.stabilized)?;
                }
            }
            Ok(if dims.stabilized && !dims.matches_prediction() {
                VIOLATION
            } else {
                0
            })
        }
        Command::Selfcheck { format, seed } => {
            let report = run_selfcheck(&SelfcheckOptions {
                seed,
                ..Default::default()
            });
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
                _ => {
                    for c in &report.checks {
                        writeln!(
                            out,
                            "{:<4} {:<40} {:>6} cases {:>8} ms {}",
                            if c.passed { "ok" } else { "FAIL" },
                            c.name,
                            c.cases,
                            c.elapsed_ms,
                            c.detail
                        )?;
                    }
                }
            }
            Ok(if report.all_passed() { 0 } else { VIOLATION })
        }
    }
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}
