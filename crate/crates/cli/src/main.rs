//! `hyperlang`: batch front end for hyperautomata, hypergrammars and the
//! realizability constructions.

mod commands;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::{code, CliError};

#[derive(Debug, Parser)]
#[command(name = "hyperlang", version, about = "Hyperlanguage toolkit: NFH, CFHG, realizability")]
struct Cli {
    /// Print one JSON object instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hyperautomaton queries.
    #[command(subcommand)]
    Nfh(NfhCommand),
    /// Compile an NFH whose hyperlanguage is exactly {L}.
    #[command(subcommand)]
    Realize(RealizeCommand),
    /// Hypergrammar queries.
    #[command(subcommand)]
    Cfhg(CfhgCommand),
    /// PCP reduction gadgets.
    #[command(subcommand)]
    Pcp(PcpCommand),
}

#[derive(Debug, Subcommand)]
enum NfhCommand {
    /// Is the finite language in the hyperlanguage?
    Member { nfh: PathBuf, lang: PathBuf },
    /// Every accepted non-empty subset of the words up to a length.
    Probe {
        nfh: PathBuf,
        #[arg(long)]
        max_len: usize,
    },
}

#[derive(Debug, Args)]
struct OutArg {
    /// Output file; standard output when absent.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CapArgs {
    /// Largest automaton determinized while counting successors.
    #[arg(long, default_value_t = 12)]
    max_determinize: usize,
    /// Largest number of simple-path words.
    #[arg(long, default_value_t = 8)]
    max_minimal_words: usize,
    /// Largest total number of simple cycles.
    #[arg(long, default_value_t = 8)]
    max_cycles: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Route {
    /// Polynomial construction on the automaton itself.
    Fast,
    /// Through the successor relation and the partial-order construction.
    Relation,
}

#[derive(Debug, Subcommand)]
enum RealizeCommand {
    /// From a finite list of words.
    Finite {
        lang: PathBuf,
        /// Alphabet symbols separated by spaces; defaults to the symbols used.
        #[arg(long)]
        alphabet: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// From a first word and a two-track successor automaton.
    Ordered {
        successor: PathBuf,
        /// First word of the chain (`eps` for the empty word).
        #[arg(long)]
        first: String,
        /// Length bound of the functionality check.
        #[arg(long, default_value_t = 6)]
        check_len: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// From a DFA of a prefix-closed language.
    PrefixClosed {
        dfa: PathBuf,
        #[arg(long, value_enum, default_value_t = Route::Fast)]
        route: Route,
        #[command(flatten)]
        caps: CapArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// From any DFA.
    Regular {
        dfa: PathBuf,
        #[command(flatten)]
        caps: CapArgs,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Leaf {
    Auto,
    Fast,
    Slow,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Join {
    /// A vertex starts with `#` only if every exit does.
    Intersection,
    /// A vertex starts with `#` if some exit does.
    Union,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Order {
    Tarjan,
    Kahn,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[arg(long, value_enum, default_value_t = Join::Intersection)]
    join: Join,
    #[arg(long, value_enum, default_value_t = Order::Tarjan)]
    order: Order,
}

#[derive(Debug, Subcommand)]
enum CfhgCommand {
    /// Is the hyperlanguage empty?
    Empty { cfhg: PathBuf },
    /// Is the finite language in the hyperlanguage?
    MemberFinite {
        cfhg: PathBuf,
        lang: PathBuf,
        #[arg(long, value_enum, default_value_t = Leaf::Auto)]
        leaf: Leaf,
    },
    /// Is some language inside L(A) in the hyperlanguage?
    MemberRegular { cfhg: PathBuf, nfa: PathBuf },
    /// Left and right ranks of every rule-graph vertex.
    Ranks {
        cfhg: PathBuf,
        #[command(flatten)]
        rank: RankArgs,
    },
    /// Does every adjacent pair satisfy R ⊆ L?
    IsRanked {
        cfhg: PathBuf,
        #[command(flatten)]
        rank: RankArgs,
    },
}

#[derive(Debug, Subcommand)]
enum PcpCommand {
    /// The two-variable universal grammar, empty iff the instance is unsolvable.
    EncodeForall {
        pcp: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// The ranked three-variable grammar with prefix E E A.
    EncodeEa {
        pcp: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { code::USAGE } else { code::TRUE });
        }
    };
    let json = cli.json;
    let (name, result) = commands::run(cli.command);
    let mut stdout = std::io::stdout().lock();
    match result {
        Ok(report) => {
            let text = if json { report.json_line(name) } else { report.text };
            let _ = stdout.write_all(text.as_bytes());
            ExitCode::from(report.code)
        }
        Err(e) => {
            if json {
                let _ = stdout.write_all(commands::error_json(name, &e).as_bytes());
            }
            match (&e, json) {
                // The verdict line carries the reason.
                (CliError::Undecidable(reason), false) => {
                    let _ = writeln!(stdout, "UNDECIDABLE: {reason}");
                }
                _ => eprintln!("hyperlang: {e}"),
            }
            ExitCode::from(e.code())
        }
    }
}
