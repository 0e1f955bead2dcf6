use anyhow::Result;
use clap::Parser;
use wavekit_cli::{configure_jobs, resolve_config, run, Cli, OUT_ENV};

fn main() -> Result<()> {
    let cli = Cli::parse();
    configure_jobs(cli.command.args().jobs);
    let env_out = std::env::var_os(OUT_ENV).map(Into::into);
    let cfg = resolve_config(&cli.command, env_out)?;
    let manifest = run(&cli.command, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&manifest.results)?);
    eprintln!(
        "{} files written to {} ({:.2} s)",
        manifest.files.len() + 1,
        cfg.out_dir.as_deref().unwrap_or(std::path::Path::new(".")).display(),
        manifest.wall_clock_seconds
    );
    Ok(())
}
