use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use s5wd::broadcast::VerifyMode;
use s5wd::decide::FrameClass;

#[derive(Debug, Parser)]
#[command(
    name = "s5wd",
    version,
    about = "Epistemic logic S5WD_n: models, frames, systems and broadcast environments"
)]
pub struct Cli {
    /// Output format on standard output.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct FormulaArgs {
    /// Formula in the concrete syntax, e.g. "[1]p -> <2>q".
    #[arg(long)]
    pub formula: String,

    /// Accept the `S` (somebody knows) operator.
    #[arg(long)]
    pub allow_s: bool,

    /// Accept the `D` (distributed knowledge) operator.
    #[arg(long)]
    pub allow_d: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a formula and print its canonical form and measures.
    Parse {
        #[command(flatten)]
        formula: FormulaArgs,
        /// Number of agents; unbounded when omitted.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Evaluate a formula at one world, or at every world of a model.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        world: Option<String>,
        #[command(flatten)]
        formula: FormulaArgs,
    },
    /// Load a model or frame and report its shape.
    ValidateModel {
        #[arg(long, alias = "frame")]
        model: PathBuf,
    },
    /// Report the equivalence, D, I and WD properties and connectedness.
    FrameProps {
        #[arg(long)]
        frame: PathBuf,
    },
    /// List the connected components.
    Components {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Search for an isomorphism between two frames or models.
    Iso {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Compare valuations as well.
        #[arg(long)]
        models: bool,
    },
    /// Check that a world map is a p-morphism.
    Pmorph {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        map: PathBuf,
        /// Require atoms to agree along the map.
        #[arg(long)]
        models: bool,
    },
    /// Build a global state system whose frame maps onto the given frame.
    #[command(visible_alias = "from-frame")]
    ToSystem {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, value_enum)]
        kind: SystemKind,
        /// Write the system JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the map from system states to frame worlds here.
        #[arg(long)]
        emit_map: Option<PathBuf>,
    },
    /// Build the model of a (possibly interpreted) global state system.
    FMap {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unpack a weakly directed frame into a directed frame with identity intersection.
    Unpack {
        #[arg(long)]
        frame: PathBuf,
        /// Coordinate range; defaults to the largest cluster size.
        #[arg(long)]
        x_size: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        emit_map: Option<PathBuf>,
    },
    /// Filtrate a model through the subformula closure of a formula.
    Filtrate {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        formula: FormulaArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        emit_map: Option<PathBuf>,
    },
    /// Decide satisfiability or validity by bounded model search.
    Decide {
        #[command(flatten)]
        formula: FormulaArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        mode: DecideMode,
        #[arg(long)]
        max_worlds: usize,
        #[arg(long, value_parser = parse_class, default_value = "ewd")]
        class: FrameClass,
        /// Cap on (frame, valuation) pairs visited.
        #[arg(long)]
        max_models: Option<u64>,
        /// Write the witness model here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Broadcast environments.
    Broadcast {
        #[command(subcommand)]
        command: BroadcastCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum BroadcastCommand {
    /// Generate the trace frame of an environment and verify its decomposition.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Environment JSON.
    #[arg(long, conflicts_with = "card_game", required_unless_present = "card_game")]
    pub env: Option<PathBuf>,
    /// Built-in card game, e.g. deck=4,hand=2,modeling=simple.
    #[arg(long)]
    pub card_game: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
    /// Decomposition check; defaults to hypercube for homogeneous environments, full otherwise.
    #[arg(long, value_parser = parse_verify)]
    pub verify: Option<VerifyMode>,
    /// Write the trace model here.
    #[arg(long)]
    pub emit_frame: Option<PathBuf>,
    /// Write the environment JSON here.
    #[arg(long)]
    pub emit_env: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemKind {
    Full,
    Hypercube,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecideMode {
    Sat,
    Valid,
}

fn parse_class(s: &str) -> Result<FrameClass, String> {
    s.parse().map_err(|e: s5wd::Error| e.to_string())
}

fn parse_verify(s: &str) -> Result<VerifyMode, String> {
    s.parse().map_err(|e: s5wd::Error| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn env_and_card_game_are_exclusive() {
        let both = [
            "s5wd",
            "broadcast",
            "simulate",
            "--env",
            "e.json",
            "--card-game",
            "deck=2,hand=1",
        ];
        assert!(Cli::try_parse_from(both).is_err());
        assert!(Cli::try_parse_from(["s5wd", "broadcast", "simulate"]).is_err());
    }

    #[test]
    fn from_frame_is_an_alias() {
        let cli = Cli::try_parse_from(["s5wd", "from-frame", "--frame", "f.json", "--kind", "full"]).unwrap();
        assert!(matches!(
            cli.command,
            Command::ToSystem {
                kind: SystemKind::Full,
                ..
            }
        ));
    }
}
