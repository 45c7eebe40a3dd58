use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use bientropy::asymptotes::{
    fermat_crossing, fermat_sum, mersenne_sum, not_prime_probability, periodic_composites,
};
use bientropy::density_lab::{
    adjusted_log_fit, adjusted_log_shift_fit, banded_proportions, class_means, figure1_grid,
    fit_quadratic, interaction_grid, monte_carlo, number_records, rank_range, trientropy_density,
    tribien_cubics, Scorer, Widths, BAND_THRESHOLDS, DEFAULT_SEED,
};
use bientropy::primality::{count_primes_below, pi_of, sieve, PI_POWERS_OF_TWO};
use bientropy::report;
use bientropy::{bien_of_integer, trien_of_integer, trientropy, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "bientropy", version, about = "BiEntropy, TriEntropy and prime density experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// Population size: numbers 0..LIMIT
    #[arg(long, global = true)]
    limit: Option<u64>,
    /// Binary width
    #[arg(long, global = true)]
    bits: Option<usize>,
    /// Trinary width (odd)
    #[arg(long, global = true)]
    trits: Option<usize>,
    /// Exponent applied to each level's entropy
    #[arg(long, global = true)]
    power: Option<u32>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; defaults to $BIENTROPY_OUT_DIR/<subcommand>.<ext>, else stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "BIENTROPY_OUT_DIR", hide_env_values = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (results do not depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Recompute fixtures that take minutes instead of using tabulated values
    #[arg(long, global = true)]
    slow: bool,
}

#[derive(Subcommand, Clone, Debug)]
enum Command {
    /// Entropy of a single number
    Score {
        #[arg(long)]
        x: u64,
        #[arg(long, value_enum, default_value_t = Kind::Bien)]
        kind: Kind,
        /// Decimal places printed
        #[arg(long, default_value_t = 2)]
        precision: usize,
    },
    /// 16x16 BiEntropy grid of the 8-bit numbers
    Grid,
    /// Prime proportions per BiEntropy band
    Table1,
    /// Mean BiEntropy per class
    Table2,
    /// Primes per BiEntropy-ordered segment
    Table3 {
        #[arg(long, default_value_t = 8)]
        segments: usize,
    },
    /// Quadratic and adjusted-log fits to prime density
    Fit,
    /// Random sample ranked by BiEntropy
    Montecarlo,
    /// TriEntropy-ranked prime density with a cubic fit
    Tridensity,
    /// BiEntropy by TriEntropy segment grid
    Interaction,
    /// TriBiEntropy cubics at several population sizes
    Cubics {
        #[arg(long, value_delimiter = ',', default_values_t = [16u64, 64, 256, 1024, 2048, 4096, 8192, 16384])]
        checkpoints: Vec<u64>,
    },
    /// Composites with identical binary halves
    Appendix1,
    /// Expected Fermat prime count
    Fermat {
        #[arg(long, default_value_t = 20)]
        terms: u64,
    },
    /// Expected Mersenne prime count
    Mersenne {
        #[arg(long, default_value_t = 20)]
        terms: u64,
    },
    /// Share of strings ruled out by all-ones or a zero derivative
    Notprime,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Bien,
    Trien,
    Tribien,
}

/// Fully resolved parameters of one run.
#[derive(Clone, Debug, Serialize)]
struct RunConfig {
    subcommand: &'static str,
    limit: u64,
    bits: usize,
    trits: usize,
    power: u32,
    seed: u64,
    samples: usize,
    format: Format,
    out: Option<PathBuf>,
    slow: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    terms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checkpoints: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    segments: Option<usize>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Cap(String),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceCap { .. } => Failure::Cap(e.to_string()),
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => Failure::Other(e.into()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

type Outcome<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Score { .. } => "score",
        Command::Grid => "grid",
        Command::Table1 => "table1",
        Command::Table2 => "table2",
        Command::Table3 { .. } => "table3",
        Command::Fit => "fit",
        Command::Montecarlo => "montecarlo",
        Command::Tridensity => "tridensity",
        Command::Interaction => "interaction",
        Command::Cubics { .. } => "cubics",
        Command::Appendix1 => "appendix1",
        Command::Fermat { .. } => "fermat",
        Command::Mersenne { .. } => "mersenne",
        Command::Notprime => "notprime",
    }
}

fn resolve(cmd: &Command, c: &Common) -> Outcome<RunConfig> {
    let subcommand = name(cmd);
    let (limit, bits, trits, power) = match cmd {
        Command::Montecarlo => (1u64 << 32, 32, 9, 10),
        Command::Tridensity => (19_683, 15, 9, 1),
        Command::Notprime => (256, 8, 9, 1),
        _ => (256, 8, 9, 1),
    };
    let limit = c.limit.unwrap_or(limit);
    let bits = c.bits.unwrap_or(bits);
    let format = c.format.unwrap_or(match cmd {
        Command::Grid => Format::Svg,
        _ => Format::Csv,
    });
    let svg_ok = matches!(cmd, Command::Grid | Command::Interaction);
    if format == Format::Svg && !svg_ok {
        return Err(usage(format!("{subcommand} has no svg output")));
    }
    let trits = c.trits.unwrap_or(trits);
    if trits < 3 || trits.is_multiple_of(2) {
        return Err(usage(format!("--trits must be odd and at least 3, got {trits}")));
    }
    let power = c.power.unwrap_or(power);
    if power == 0 {
        return Err(usage("--power must be at least 1"));
    }
    if c.threads == Some(0) {
        return Err(usage("--threads must be at least 1"));
    }
    Ok(RunConfig {
        subcommand,
        limit,
        bits,
        trits,
        power,
        seed: c.seed.unwrap_or(DEFAULT_SEED),
        samples: c.samples.unwrap_or(10_000),
        format,
        out: c.out.clone(),
        slow: c.slow,
        x: match cmd {
            Command::Score { x, .. } => Some(*x),
            _ => None,
        },
        terms: match cmd {
            Command::Fermat { terms } | Command::Mersenne { terms } => Some(*terms),
            _ => None,
        },
        checkpoints: match cmd {
            Command::Cubics { checkpoints } => Some(checkpoints.clone()),
            _ => None,
        },
        segments: match cmd {
            Command::Table3 { segments } => Some(*segments),
            _ => None,
        },
    })
}

fn json<T: Serialize>(cfg: &RunConfig, report: &T) -> Outcome<String> {
    Ok(report::json_report(cfg, report)?)
}

fn no_svg(cfg: &RunConfig) -> Outcome<String> {
    Err(usage(format!("{} has no svg output", cfg.subcommand)))
}

fn render(cmd: &Command, cfg: &RunConfig) -> Outcome<String> {
    let widths = Widths::new(cfg.bits, cfg.trits);
    match cmd {
        Command::Score { x, kind, precision } => {
            let v = match kind {
                Kind::Bien => bien_of_integer(*x, cfg.bits, cfg.power)?,
                Kind::Trien => trien_of_integer(*x, cfg.trits)?,
                Kind::Tribien => trientropy::tribien(*x, cfg.bits, cfg.trits, cfg.power)?,
            };
            match cfg.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Score {
                        x: u64,
                        kind: Kind,
                        value: f64,
                    }
                    json(cfg, &Score { x: *x, kind: *kind, value: v })
                }
                _ => Ok(format!("{v:.precision$}\n")),
            }
        }
        Command::Grid => {
            let grid = figure1_grid();
            match cfg.format {
                Format::Svg => Ok(report::figure1_svg(&grid)),
                Format::Csv => Ok(report::figure1_csv(&grid)?),
                Format::Json => json(cfg, &grid),
            }
        }
        Command::Table1 => {
            let records = number_records(cfg.limit, cfg.bits, cfg.power, None)?;
            let bands = banded_proportions(&records, &BAND_THRESHOLDS)?;
            match cfg.format {
                Format::Csv => Ok(report::table1_csv(&bands)?),
                Format::Json => json(cfg, &bands),
                Format::Svg => no_svg(cfg),
            }
        }
        Command::Table2 => {
            let records = number_records(cfg.limit, cfg.bits, cfg.power, None)?;
            let stats = class_means(&records);
            match cfg.format {
                Format::Csv => Ok(report::table2_csv(&stats)?),
                Format::Json => json(cfg, &stats),
                Format::Svg => no_svg(cfg),
            }
        }
        Command::Table3 { segments } => {
            let ranked = rank_range(cfg.limit, Scorer::Bien { power: cfg.power }, widths)?;
            let segs = ranked.segments(*segments)?;
            match cfg.format {
                Format::Csv => Ok(report::table3_csv(&segs)?),
                Format::Json => json(cfg, &segs),
                Format::Svg => no_svg(cfg),
            }
        }
        Command::Fit => {
            let ranked = rank_range(cfg.limit, Scorer::Bien { power: cfg.power }, widths)?;
            let ranked_series = ranked.cumulative_series();
            let quadratic = fit_quadratic(&ranked_series)?;
            let table = sieve(cfg.limit + 1)?;
            let natural: Vec<f64> = (1..=cfg.limit)
                .map(|x| pi_of(x, &table).map(|p| p as f64))
                .collect::<Result<_, _>>()?;
            let log = adjusted_log_fit(&natural)?;
            let shift = adjusted_log_shift_fit(&natural)?;
            match cfg.format {
                Format::Csv => Ok(report::fit_csv(
                    &[("quadratic", &quadratic), ("adjusted_log", &log), ("log_shift", &shift)],
                    &[&ranked_series, &natural, &natural],
                )?),
                Format::Json => {
                    #[derive(Serialize)]
                    struct Fits {
                        total_prime_bien: f64,
                        quadratic: bientropy::density_lab::Moments,
                        quadratic_coefficients: Vec<f64>,
                        adjusted_log: bientropy::density_lab::Moments,
                        adjusted_log_scale: f64,
                        log_shift: bientropy::density_lab::Moments,
                    }
                    let total_prime_bien = ranked
                        .entries
                        .iter()
                        .filter(|e| e.is_prime)
                        .map(|e| e.score)
                        .sum();
                    json(
                        cfg,
                        &Fits {
                            total_prime_bien,
                            quadratic: quadratic.moments(),
                            quadratic_coefficients: quadratic.coefficients.clone(),
                            adjusted_log: log.moments(),
                            adjusted_log_scale: log.coefficients[0],
                            log_shift: shift.moments(),
                        },
                    )
                }
                Format::Svg => no_svg(cfg),
            }
        }
        Command::Montecarlo => {
            let mc = monte_carlo(cfg.samples, cfg.bits, cfg.power, cfg.seed)?;
            if cfg.slow {
                let counted = count_primes_below(1u64 << cfg.bits);
                let fixture = PI_POWERS_OF_TWO[cfg.bits];
                if counted != fixture {
                    return Err(Failure::Other(anyhow::anyhow!(
                        "sieve counted {counted} primes below 2^{}, fixture says {fixture}",
                        cfg.bits
                    )));
                }
            }
            match cfg.format {
                Format::Csv => Ok(report::monte_carlo_csv(&mc)?),
                Format::Json => json(cfg, &mc),
                Format::Svg => no_svg(cfg),
            }
        }
        Command::Tridensity => {
            let d = trientropy_density(cfg.limit)?;
            match cfg.format {
                Format::Csv => Ok(report::fit_csv(
                    &[("trien", &d.fit)],
                    &[&d.ranked.cumulative_series()],
                )?),
                Format::Json => json(cfg, &d),
                Format::Svg => no_svg(cfg),
            }
        }
        Command::Interaction => {
            let g = interaction_grid(cfg.limit, widths)?;
            match cfg.format {
                Format::Csv => Ok(report::interaction_csv(&g)?),
                Format::Json => json(cfg, &g),
                Format::Svg => Ok(report::interaction_svg(&g)),
            }
        }
        Command::Cubics { checkpoints } => {
            let rows = tribien_cubics(checkpoints, cfg.trits, cfg.power)?;
            match cfg.format {
                Format::Csv => Ok(report::cubics_csv(&rows)?),
                Format::Json => json(cfg, &rows),
                Format::Svg => no_svg(cfg),
            }
        }
        Command::Appendix1 => {
            let rows = periodic_composites(cfg.limit, cfg.bits)?;
            match cfg.format {
                Format::Csv => Ok(report::appendix1_csv(&rows)?),
                Format::Json => json(cfg, &rows),
                Format::Svg => no_svg(cfg),
            }
        }
        Command::Fermat { terms } => {
            let rows = fermat_sum(*terms)?;
            match cfg.format {
                Format::Csv => Ok(report::asymptote_csv(&rows)?),
                Format::Json => {
                    #[derive(Serialize)]
                    struct Fermat {
                        rows: Vec<bientropy::asymptotes::AsymptoteRow>,
                        sixth_expected_at: u64,
                        seventh_expected_at: u64,
                    }
                    json(
                        cfg,
                        &Fermat {
                            rows,
                            sixth_expected_at: fermat_crossing(6.0)?,
                            seventh_expected_at: fermat_crossing(7.0)?,
                        },
                    )
                }
                Format::Svg => no_svg(cfg),
            }
        }
        Command::Mersenne { terms } => {
            let rows = mersenne_sum(*terms)?;
            match cfg.format {
                Format::Csv => Ok(report::asymptote_csv(&rows)?),
                Format::Json => json(cfg, &rows),
                Format::Svg => no_svg(cfg),
            }
        }
        Command::Notprime => {
            let b = not_prime_probability(cfg.bits)?;
            match cfg.format {
                Format::Csv => Ok(report::not_prime_csv(&b)?),
                Format::Json => json(cfg, &b),
                Format::Svg => no_svg(cfg),
            }
        }
    }
}

fn emit(cfg: &RunConfig, out_dir: Option<&PathBuf>, body: &str) -> anyhow::Result<()> {
    let path = match (&cfg.out, out_dir) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(dir.join(format!("{}.{}", cfg.subcommand, cfg.format.ext()))),
        (None, None) => None,
    };
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)
                    .with_context(|| format!("creating {}", parent.display()))?;
            }
            fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
        }
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome<()> {
    let cfg = resolve(&cli.command, &cli.common)?;
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let body = render(&cli.command, &cfg)?;
    emit(&cfg, cli.common.out_dir.as_ref(), &body)?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
