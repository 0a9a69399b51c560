mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Stable marriage: optimal matchings, rotations, and every stable matching.
#[derive(Debug, Parser)]
#[command(name = "rotaposet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the man- or woman-optimal stable matching.
    Solve {
        /// Instance file, or `-` for stdin.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SideArg::Man)]
        side: SideArg,
    },
    /// Print every rotation and the predecessor digraph.
    Rotations {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Append operation counts.
        #[arg(long)]
        stats: bool,
        /// Compare with the list-labelling construction, both variants.
        #[arg(long)]
        gi_compare: bool,
    },
    /// List every stable matching through the closed sets of rotations.
    Lattice {
        input: PathBuf,
        /// Stop after this many matchings (exit code 3 when more exist).
        #[arg(long)]
        max_output: Option<usize>,
        /// Cross-check the count against brute-force enumeration.
        #[arg(long)]
        oracle: bool,
        /// Run the brute-force check even on large instances.
        #[arg(long)]
        force: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write the instance, the rotation digraph or the lattice in another
    /// format.
    Export {
        input: PathBuf,
        #[arg(long, value_enum)]
        what: ExportWhat,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Generate an instance.
    Gen {
        #[arg(long, value_enum, default_value_t = KindArg::Random)]
        kind: KindArg,
        /// Agents per side (random).
        #[arg(long)]
        n: Option<usize>,
        /// Probability that a pair is mutually acceptable (random).
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        /// Number of independent blocks (exponential).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a matching for blocking pairs.
    Verify {
        input: PathBuf,
        /// Matching file with `m<i> -- w<j>` lines, or `-` for stdin.
        matching: PathBuf,
    },
    /// Time the digraph construction on random complete instances; CSV out.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [50, 100, 200, 400, 800])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        seeds: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Man,
    Woman,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportWhat {
    Instance,
    Rotations,
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Random,
    Exponential,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { input, side } => commands::solve(&input, side == SideArg::Woman),
        Command::Rotations {
            input,
            format,
            stats,
            gi_compare,
        } => commands::rotations(&input, format, stats, gi_compare),
        Command::Lattice {
            input,
            max_output,
            oracle,
            force,
            format,
        } => commands::lattice(&input, max_output, oracle, force, format),
        Command::Export {
            input,
            what,
            format,
        } => commands::export(&input, what, format),
        Command::Gen {
            kind,
            n,
            density,
            k,
            seed,
        } => commands::gen(kind, n, density, k, seed),
        Command::Verify { input, matching } => commands::verify(&input, &matching),
        Command::Bench { sizes, seeds } => commands::bench(&sizes, seeds),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            print!("{}", e.stdout);
            if !e.message.is_empty() {
                eprintln!("{}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}
