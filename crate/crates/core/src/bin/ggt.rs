//! `ggt`: command-line front end for the workbench.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ggt_core::cli::{
    self, load_instance, parse_kind, parse_replay, render_json, render_text, replay, replay_docs, report_value,
    Instance, Section,
};
use ggt_core::fixtures;
use ggt_core::limits::Budget;
use ggt_core::morphism::Kind;
use ggt_core::{GgtError, Result};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(name = "ggt", version, about = "Finite workbench for operator semigroups and T-spaces")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Replace every enumeration cap with N (GGT_BUDGET does the same).
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Theorem id, subset name or structure check, depending on the command.
    #[arg(long, global = true)]
    which: Option<String>,
    /// end, aut, monoid or group.
    #[arg(long, global = true)]
    kind: Option<String>,
    /// Write a replay document for every witness in the report into this directory.
    #[arg(long, global = true)]
    witness_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generated set, quasi-space and T-space checks.
    Space { instance: PathBuf },
    /// Enumerate endomorphisms of the space.
    End { instance: PathBuf },
    /// Enumerate automorphisms of the space.
    Aut { instance: PathBuf },
    /// Closed families and the Galois correspondence over the base.
    Galois { instance: PathBuf },
    /// Meet and join closure of the families.
    Lattice { instance: PathBuf },
    /// Subbasis topologies and theorem clauses.
    Topology { instance: PathBuf },
    /// Continuity, injectivity and homeomorphism checks on the topospace block.
    Topospace { instance: PathBuf },
    /// Monoid action round trip.
    Dynsys { instance: PathBuf },
    /// Duality, transitivity, normality, quotients, chains and transcendence.
    Structure { instance: PathBuf },
    /// Every applicable check.
    VerifyAll { instance: PathBuf },
    /// Print or write the built-in instances.
    Fixtures {
        /// Directory to write NAME.json files into; prints to stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute a witness from a replay document.
    Replay { witness: PathBuf },
}

fn resolve_path(p: &Path) -> PathBuf {
    if !p.exists() {
        let with_ext = p.with_extension("json");
        if with_ext.exists() {
            return with_ext;
        }
    }
    p.to_path_buf()
}

fn budget(args: &Args) -> Result<Budget> {
    match args.budget {
        Some(n) => Ok(Budget::uniform(n)),
        None => Budget::from_env(),
    }
}

fn kind(args: &Args) -> Result<Option<Kind>> {
    args.kind.as_deref().map(parse_kind).transpose()
}

fn emit(args: &Args, name: &str, inst: &Instance, sections: &[Section]) -> Result<i32> {
    let v = report_value(name, sections);
    match args.format {
        Format::Text => print!("{}", render_text(&v)),
        Format::Json => print!("{}", render_json(&v)),
    }
    if let Some(dir) = &args.witness_dir {
        std::fs::create_dir_all(dir).map_err(|source| GgtError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        for (i, doc) in replay_docs(inst, sections).iter().enumerate() {
            let path = dir.join(format!("witness-{i}.json"));
            let text = serde_json::to_string_pretty(doc).expect("json") + "\n";
            std::fs::write(&path, text).map_err(|source| GgtError::Io {
                path: path.display().to_string(),
                source,
            })?;
        }
    }
    Ok(cli::exit_status(sections))
}

fn run(args: &Args) -> Result<i32> {
    let b = budget(args)?;
    let k = kind(args)?;
    let which = args.which.as_deref();
    let with_instance = |p: &PathBuf, f: &dyn Fn(&Instance) -> Result<Vec<Section>>| -> Result<i32> {
        let path = resolve_path(p);
        let inst = load_instance(&path)?;
        let sections = f(&inst)?;
        let name = if inst.doc.name.is_empty() {
            path.display().to_string()
        } else {
            inst.doc.name.clone()
        };
        emit(args, &name, &inst, &sections)
    };
    match &args.command {
        Command::Space { instance } => with_instance(instance, &|i| Ok(vec![cli::space_section(i, which, &b)?])),
        Command::End { instance } => with_instance(instance, &|i| Ok(vec![cli::morphisms_section(i, Kind::End, &b)?])),
        Command::Aut { instance } => with_instance(instance, &|i| Ok(vec![cli::morphisms_section(i, Kind::Aut, &b)?])),
        Command::Galois { instance } => with_instance(instance, &|i| Ok(vec![cli::galois_section(i, k, &b)?])),
        Command::Lattice { instance } => with_instance(instance, &|i| Ok(vec![cli::lattice_section(i, &b)?])),
        Command::Topology { instance } => with_instance(instance, &|i| Ok(vec![cli::topology_section(i, which, &b)?])),
        Command::Topospace { instance } => with_instance(instance, &|i| Ok(vec![cli::topospace_section(i, &b)?])),
        Command::Dynsys { instance } => with_instance(instance, &|i| Ok(vec![cli::dynsys_section(i, &b)?])),
        Command::Structure { instance } => {
            with_instance(instance, &|i| Ok(vec![cli::structure_section(i, which, k, &b)?]))
        }
        Command::VerifyAll { instance } => with_instance(instance, &|i| Ok(cli::verify_all(i, &b))),
        Command::Fixtures { out } => {
            for doc in fixtures::all() {
                let text = serde_json::to_string_pretty(&doc).expect("json") + "\n";
                match out {
                    Some(dir) => {
                        std::fs::create_dir_all(dir).map_err(|source| GgtError::Io {
                            path: dir.display().to_string(),
                            source,
                        })?;
                        let path = dir.join(format!("{}.json", doc.name));
                        std::fs::write(&path, text).map_err(|source| GgtError::Io {
                            path: path.display().to_string(),
                            source,
                        })?;
                    }
                    None => print!("{text}"),
                }
            }
            Ok(0)
        }
        Command::Replay { witness } => {
            let text = std::fs::read_to_string(witness).map_err(|source| GgtError::Io {
                path: witness.display().to_string(),
                source,
            })?;
            let doc = parse_replay(&text)?;
            let reproduced = replay(&doc)?;
            println!("{}", if reproduced { "reproduced" } else { "not reproduced" });
            Ok(if reproduced { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("ggt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
