use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use evlab::catalog::catalog_entries;
use evlab::par;
use evlab::report::{output_root, run_scenario};
use evlab::scenario::load_scenario;

#[derive(Parser)]
#[command(name = "evlab", version, about = "Solvers and audits for degenerate parabolic-hyperbolic conservation laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenario files (in parallel).
    Run {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Output root (overrides EVLAB_OUTPUT_ROOT and the scenario setting).
        #[arg(long)]
        output_root: Option<PathBuf>,
    },
    /// List the built-in problems and their parameters.
    ListCatalog,
    /// Parse and validate scenario files without running them.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::ListCatalog => {
            for e in catalog_entries() {
                let documented: Vec<String> = e.documented.iter().map(|a| a.to_string()).collect();
                println!("{}  {}", e.name, e.summary);
                println!("    assumptions: {}", documented.join(" "));
                for p in &e.params {
                    println!("    {} = {} in [{}, {}]  {}", p.name, p.default, p.min, p.max, p.doc);
                }
            }
            ExitCode::SUCCESS
        }
        Command::Validate { files } => {
            let mut ok = true;
            for f in &files {
                match load_scenario(f).and_then(|s| s.spec().map(|_| s)) {
                    Ok(s) => println!("{}: ok ({} on {})", f.display(), s.experiment.name(), s.problem),
                    Err(e) => {
                        ok = false;
                        eprintln!("{}: {e}", f.display());
                    }
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Command::Run { files, output_root: root } => {
            let scenarios: Vec<_> = files.iter().map(|f| load_scenario(f)).collect();
            let mut parsed = Vec::new();
            for (f, s) in files.iter().zip(scenarios) {
                match s {
                    Ok(s) => parsed.push(s),
                    Err(e) => {
                        eprintln!("{}: {e}", f.display());
                        return ExitCode::from(2);
                    }
                }
            }
            let results = par::parallel_map(&parsed, |s| run_scenario(s, &output_root(s, root.as_deref())));
            let mut code = ExitCode::SUCCESS;
            for (s, r) in parsed.iter().zip(results) {
                match r {
                    Ok(out) => {
                        println!("{}: {} ({})", s.id, out.verdict, out.dir.display());
                        if !out.passed() {
                            code = ExitCode::from(1);
                        }
                    }
                    Err(e) => {
                        eprintln!("{}: error: {e}", s.id);
                        code = ExitCode::from(2);
                    }
                }
            }
            code
        }
    }
}
