mod args;
mod commands;
mod manifest;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;

use args::Cli;
use commands::{execute, CliError, CliResult};
use manifest::{digest, versions, OutputRecord, RunManifest, Timing, MANIFEST_VERSION};

const EXIT_OK: u8 = 0;
const EXIT_CLAIM: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn run(cli: Cli) -> CliResult<u8> {
    if let Some(path) = &cli.replay {
        return replay(path, cli.out.clone());
    }
    Ok(run_once(&cli)?.exit_code as u8)
}

fn run_once(cli: &Cli) -> CliResult<RunManifest> {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64());
    let clock = Instant::now();
    let subcommand = cli.command.ok_or_else(|| CliError::Config("no subcommand given".into()))?;
    let format = cli.format.unwrap_or_default();
    let outcome = execute(cli)?;
    let text = output::render(&outcome.json, outcome.table.as_ref(), format)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    match &cli.out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    let exit_code = if outcome.ok { EXIT_OK } else { EXIT_CLAIM } as i32;
    let manifest = RunManifest {
        manifest_version: MANIFEST_VERSION,
        subcommand,
        args: cli.clone(),
        resolved: outcome.resolved,
        seed: outcome.seed,
        versions: versions(),
        timing: Timing { started_unix_secs: started, elapsed_secs: clock.elapsed().as_secs_f64() },
        outputs: vec![OutputRecord {
            path: cli.out.as_ref().map(|p| p.display().to_string()),
            format,
            bytes: text.len(),
            sha256: digest(&text),
        }],
        warnings: outcome.warnings,
        exit_code,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("serialisable");
    match &cli.out {
        Some(path) => {
            let mp = manifest_path(path);
            std::fs::write(&mp, json + "\n")
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", mp.display())))?;
        }
        None => eprintln!("{json}"),
    }
    Ok(manifest)
}

fn replay(path: &Path, out: Option<PathBuf>) -> CliResult<u8> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let recorded: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("invalid manifest: {e}")))?;
    let mut args = recorded.args.clone();
    args.replay = None;
    args.out = out;
    let fresh = run_once(&args)?;
    let (old, new) = (&recorded.outputs[0].sha256, &fresh.outputs[0].sha256);
    if old == new {
        eprintln!("replay: output matches manifest ({new})");
        Ok(fresh.exit_code as u8)
    } else {
        eprintln!("replay: output differs from manifest ({old} recorded, {new} now)");
        Ok(EXIT_CLAIM)
    }
}

