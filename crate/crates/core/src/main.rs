use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mgfem::cli::{exit_code, load_config, run};

#[derive(Parser)]
#[command(name = "mgfem", version, about = "Geometric multigrid finite element solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the problem described by a configuration file.
    Run {
        config: PathBuf,
        /// Linear algebra backend: reference or threaded.
        #[arg(long)]
        backend: Option<String>,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a VTK snapshot every N steps; 0 writes none.
        #[arg(long)]
        snapshot_stride: Option<usize>,
        /// Full-size cavity: Re 1000, 32x32x64 mesh, 40 000 steps of 1e-4.
        #[arg(long)]
        paper_scale: bool,
    },
}

fn main() -> ExitCode {
    let Command::Run {
        config,
        backend,
        out,
        snapshot_stride,
        paper_scale,
    } = Cli::parse().command;
    let result = load_config(&config).and_then(|mut cfg| {
        if let Some(b) = backend {
            cfg.backend = b;
        }
        if let Some(o) = out {
            cfg.out_dir = o;
        }
        if let Some(s) = snapshot_stride {
            cfg.snapshot_stride = s;
        }
        if paper_scale {
            cfg.apply_paper_scale();
        }
        run(&cfg)
    });
    match result {
        Ok(summary) => {
            println!("{}: {} steps", summary.problem.name(), summary.steps);
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mgfem: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
