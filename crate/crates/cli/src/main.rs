use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;
use subshift_cli::{run, CliError, Command, Format, RunConfig, SourceKind};

/// Labeled-space, AF-core, trace and K-theory checks for minimal subshifts.
#[derive(Debug, Parser)]
#[command(name = "subshift", version)]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for artifacts.
    #[arg(long, global = true, env = "SUBSHIFT_OUT_DIR")]
    out_dir: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    kind: Option<SourceKind>,

    /// Substitution rules such as 0:01,1:10.
    #[arg(long, global = true)]
    rules: Option<String>,

    /// Fixed-point seed b.a.
    #[arg(long, global = true)]
    seed: Option<String>,

    #[arg(long, global = true)]
    power: Option<usize>,

    /// Comma-separated Morse blocks.
    #[arg(long, global = true, value_delimiter = ',')]
    blocks: Option<Vec<String>>,

    #[arg(long, global = true)]
    cycle: Option<bool>,

    /// Period of an explicit periodic point.
    #[arg(long, global = true)]
    pattern: Option<String>,

    /// Window half-width for the language.
    #[arg(long, global = true)]
    window: Option<usize>,

    /// Window half-width for empirical frequencies.
    #[arg(long, global = true)]
    scan: Option<usize>,

    /// Language depth.
    #[arg(long, global = true)]
    depth: Option<usize>,

    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    formats: Option<Vec<Format>>,

    #[command(subcommand)]
    command: Command,
}

impl Cli {
    fn config(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = &self.$f { c.$f = v.clone(); } )* };
        }
        set!(out_dir, kind, rules, seed, power, blocks, cycle, pattern, window, scan, depth, formats);
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = cli.config().and_then(|c| run(cli.command, &c));
    match outcome {
        Ok(o) => {
            let line = json!({
                "command": o.command,
                "verdict": if o.pass { "pass" } else { "fail" },
                "failure": o.detail,
            });
            println!("{line}");
            ExitCode::from(o.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
