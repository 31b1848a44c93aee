use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dae_singular::report::{
    cmd_classify, cmd_portrait, cmd_scan, cmd_simulate, parse_system_file, CommandError,
    CommandOutput,
};

/// Singular points and codimension-one bifurcations of quasilinear DAEs.
#[derive(Parser)]
#[command(name = "dae-singular", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every special point at one parameter value.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Parameter value; defaults to the file setting, else 0.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
    },
    /// Detect bifurcation events over a parameter range.
    Scan {
        #[command(flatten)]
        common: Common,
        /// Parameter range `a:b`.
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        alpha_range: Option<(f64, f64)>,
        /// Number of parameter samples (at least 8).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Render an SVG phase portrait.
    Portrait {
        #[command(flatten)]
        common: Common,
        /// Parameter value; defaults to the file setting, else 0.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
    },
    /// Integrate one orbit and split it at the singular set.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Parameter value; defaults to the file setting, else 0.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Initial point `x` or `x,y`.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        from: Point,
        /// Time bound; for planar systems this is desingularized time and a
        /// negative value integrates backward.
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        tmax: f64,
    },
}

#[derive(Args)]
struct Common {
    /// System file.
    file: PathBuf,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `a:b`, got `{s}`"))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| format!("`{}`: {e}", t.trim()))
    };
    Ok((num(a)?, num(b)?))
}

#[derive(Clone)]
struct Point(Vec<f64>);

fn parse_point(s: &str) -> Result<Point, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("`{}`: {e}", t.trim()))
        })
        .collect::<Result<_, _>>()
        .map(Point)
}

fn run(cli: Cli) -> Result<(CommandOutput, Option<PathBuf>), CommandError> {
    let common = match &cli.command {
        Command::Classify { common, .. }
        | Command::Scan { common, .. }
        | Command::Portrait { common, .. }
        | Command::Simulate { common, .. } => common,
    };
    let src = std::fs::read_to_string(&common.file)
        .map_err(|e| CommandError::Input(format!("{}: {e}", common.file.display())))?;
    let file = parse_system_file(&src)
        .map_err(|e| CommandError::Input(format!("{}: {e}", common.file.display())))?;
    let out = match &cli.command {
        Command::Classify { alpha, .. } => cmd_classify(&file, *alpha)?,
        Command::Scan {
            alpha_range,
            samples,
            ..
        } => cmd_scan(&file, *alpha_range, *samples)?,
        Command::Portrait { alpha, .. } => cmd_portrait(&file, *alpha)?,
        Command::Simulate {
            alpha, from, tmax, ..
        } => cmd_simulate(&file, *alpha, &from.0, *tmax)?,
    };
    Ok((out, common.out.clone()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, path)) => {
            if let Some(path) = path {
                if let Err(e) = std::fs::write(&path, &out.text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", out.text);
            }
            if out.exit_code == 4 {
                eprintln!("warning: events were found but none is generic");
            }
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
