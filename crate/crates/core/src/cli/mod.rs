//! Command-line front end: argument parsing, file loading, dispatch and exit codes.
//!
//! Exit codes: `0` success, `1` syntax, validation or usage errors, `2` violated
//! preconditions, `3` exhausted budgets.

pub mod format;

use std::fmt::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cantor::Partition;
use crate::constructions;
use crate::error::{Error, Result};
use crate::finrel::{self, IndexRelation};
use crate::homeo;
use crate::towers::{self, RelationTower, Side};

use format::{
    format_clopen, format_prefix_map, format_relation, format_relation_set, format_tower,
};

#[derive(Parser, Debug)]
#[command(
    name = "roelcke",
    version,
    about = "Exact computations on closed relations of the Cantor space"
)]
struct Cli {
    /// Write the result to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Relations on finite index sets.
    #[command(subcommand)]
    Rel(RelCommand),
    /// Prefix-exchange maps.
    #[command(subcommand)]
    Homeo(HomeoCommand),
    /// Relation towers.
    #[command(subcommand)]
    Tower(TowerCommand),
    /// A map whose trace at the partition is the given relation.
    Realize {
        relation: PathBuf,
        #[command(flatten)]
        at: PartitionArg,
    },
    /// Maps f, g with traces R, S and f ∘ g with trace RS.
    RealizePair {
        r: PathBuf,
        s: PathBuf,
        #[command(flatten)]
        at: PartitionArg,
    },
    /// Maps u, v fixing the blocks with f = u⁻¹ ∘ g ∘ v.
    CosetWitness {
        f: PathBuf,
        g: PathBuf,
        #[command(flatten)]
        at: PartitionArg,
    },
    /// One realizing map per relation in E0 of the partition.
    Net {
        #[command(flatten)]
        at: PartitionArg,
        #[arg(long)]
        count_only: bool,
    },
    /// Maps f, g near R, S whose composite is near RS at the given level.
    Cluster {
        r: PathBuf,
        s: PathBuf,
        #[arg(long)]
        level: usize,
    },
    #[command(subcommand)]
    Witness(WitnessCommand),
}

#[derive(Subcommand, Debug)]
enum RelCommand {
    Compose {
        r: PathBuf,
        s: PathBuf,
    },
    Transpose {
        r: PathBuf,
    },
    Classify {
        r: PathBuf,
    },
    Enum {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        count_only: bool,
    },
    Closure {
        set: PathBuf,
        #[arg(long, default_value_t = finrel::DEFAULT_CLOSURE_CAP)]
        cap: usize,
    },
    GreatestIdem {
        set: PathBuf,
    },
    Invariants {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        count_only: bool,
    },
}

#[derive(Subcommand, Debug)]
enum HomeoCommand {
    Compose {
        f: PathBuf,
        g: PathBuf,
    },
    Invert {
        f: PathBuf,
    },
    Trace {
        f: PathBuf,
        #[command(flatten)]
        at: PartitionArg,
    },
    Image {
        f: PathBuf,
        clopen: PathBuf,
    },
    Stab {
        f: PathBuf,
        #[command(flatten)]
        at: PartitionArg,
    },
    Supdist {
        f: PathBuf,
        g: PathBuf,
    },
    Mapclopen {
        p: PathBuf,
        q: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum TowerCommand {
    Trace {
        t: PathBuf,
        #[command(flatten)]
        at: PartitionArg,
    },
    Involute {
        t: PathBuf,
    },
    Compose {
        r: PathBuf,
        s: PathBuf,
        #[arg(long, default_value_t = towers::MAX_LEVEL)]
        budget: usize,
    },
    Translate {
        g: PathBuf,
        t: PathBuf,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
    },
    SameNbhd {
        r: PathBuf,
        s: PathBuf,
        #[command(flatten)]
        at: PartitionArg,
    },
    Hausdorff {
        r: PathBuf,
        s: PathBuf,
        #[arg(long)]
        level: usize,
    },
    Check {
        t: PathBuf,
        #[arg(long)]
        level: usize,
    },
}

#[derive(Subcommand, Debug)]
enum WitnessCommand {
    /// A map carrying U1 into V1 and U2 into V2.
    DenseOrbit {
        u1: PathBuf,
        u2: PathBuf,
        v1: PathBuf,
        v2: PathBuf,
    },
    /// h and g = h ∘ f ∘ h⁻¹ with g(U) = V.
    Conjugation { f: PathBuf, u: PathBuf, v: PathBuf },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Args, Debug)]
struct PartitionArg {
    /// The level partition into cylinders of length n.
    #[arg(long, conflicts_with = "partition")]
    level: Option<usize>,
    /// A partition document.
    #[arg(long)]
    partition: Option<PathBuf>,
}

impl PartitionArg {
    fn resolve(&self) -> Result<Partition> {
        match (&self.partition, self.level) {
            (Some(path), _) => format::parse_partition(&read(path)?).map_err(|e| in_file(path, e)),
            (None, Some(n)) => Partition::level(n),
            (None, None) => Err(Error::Validation(
                "one of --level or --partition is required".into(),
            )),
        }
    }
}

/// Result of one invocation: exit code and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Syntax { .. } | Error::Validation(_) | Error::Internal(_) => 1,
        Error::Precondition(_) => 2,
        Error::Budget(_) => 3,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))
}

fn relation(path: &Path) -> Result<IndexRelation> {
    format::parse_relation(&read(path)?).map_err(|e| in_file(path, e))
}

fn prefix_map(path: &Path) -> Result<homeo::PrefixMap> {
    format::parse_prefix_map(&read(path)?).map_err(|e| in_file(path, e))
}

fn clopen(path: &Path) -> Result<crate::cantor::ClopenSet> {
    format::parse_clopen(&read(path)?).map_err(|e| in_file(path, e))
}

fn tower(path: &Path) -> Result<RelationTower> {
    format::parse_tower(&read(path)?).map_err(|e| in_file(path, e))
}

fn in_file(path: &Path, err: Error) -> Error {
    match err {
        Error::Syntax { line, msg } => Error::Syntax {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        Error::Validation(msg) => Error::Validation(format!("{}: {msg}", path.display())),
        other => other,
    }
}

/// A tower in text form, converting translates of clopen towers first.
fn tower_text(t: &RelationTower) -> Result<String> {
    if let Some(text) = format_tower(t) {
        return Ok(text);
    }
    match t.clopen_form()? {
        Some(c) => Ok(format_tower(&c).expect("clopen tower")),
        None => Err(Error::Validation(
            "result has no closed-form text representation".into(),
        )),
    }
}

fn join(docs: impl IntoIterator<Item = String>) -> String {
    docs.into_iter().collect::<Vec<_>>().join("\n")
}

fn bool_line(b: bool) -> String {
    format!("{b}\n")
}

fn run_rel(cmd: &RelCommand) -> Result<String> {
    Ok(match cmd {
        RelCommand::Compose { r, s } => format_relation(&relation(r)?.compose(&relation(s)?)?),
        RelCommand::Transpose { r } => format_relation(&relation(r)?.transpose()),
        RelCommand::Classify { r } => {
            let c = relation(r)?.classify();
            format!(
                "e0 {}\nsymmetric {}\nreflexive {}\nidempotent {}\nequivalence {}\n",
                c.is_e0, c.is_symmetric, c.contains_diagonal, c.is_idempotent, c.is_equivalence
            )
        }
        RelCommand::Enum { size, count_only } => {
            let all = finrel::enumerate_e0(*size)?;
            if *count_only {
                format!("{}\n", all.len())
            } else {
                format_relation_set(&all)
            }
        }
        RelCommand::Closure { set, cap } => {
            let gens = format::parse_relation_set(&read(set)?).map_err(|e| in_file(set, e))?;
            let mut closed = finrel::closure(&gens, *cap)?;
            closed.sort();
            format_relation_set(&closed)
        }
        RelCommand::GreatestIdem { set } => {
            let set = format::parse_relation_set(&read(set)?).map_err(|e| in_file(set, e))?;
            match finrel::greatest_delta_element(&set)? {
                Some(r) => format_relation(&r),
                None => "none\n".to_string(),
            }
        }
        RelCommand::Invariants { size, count_only } => {
            let all = finrel::invariant_under_symmetric_group(*size)?;
            if *count_only {
                format!("{}\n", all.len())
            } else {
                format_relation_set(&all)
            }
        }
    })
}

fn run_homeo(cmd: &HomeoCommand) -> Result<String> {
    Ok(match cmd {
        HomeoCommand::Compose { f, g } => {
            format_prefix_map(&prefix_map(f)?.compose(&prefix_map(g)?)?)
        }
        HomeoCommand::Invert { f } => format_prefix_map(&prefix_map(f)?.invert()),
        HomeoCommand::Trace { f, at } => {
            let f = prefix_map(f)?;
            match (&at.partition, at.level) {
                (None, Some(n)) => format_relation(&f.level_trace(n)?),
                _ => format_relation(&f.trace(&at.resolve()?)?),
            }
        }
        HomeoCommand::Image { f, clopen: c } => {
            format_clopen(&prefix_map(f)?.image_clopen(&clopen(c)?)?)
        }
        HomeoCommand::Stab { f, at } => bool_line(prefix_map(f)?.in_stabilizer(&at.resolve()?)?),
        HomeoCommand::Supdist { f, g } => {
            format!("{}\n", prefix_map(f)?.sup_distance(&prefix_map(g)?))
        }
        HomeoCommand::Mapclopen { p, q } => {
            let (p, q) = (clopen(p)?, clopen(q)?);
            let mut out = String::from("rules\n");
            for (d, r) in homeo::map_clopen(p.cylinders(), q.cylinders())? {
                writeln!(out, "{d} -> {r}").unwrap();
            }
            out
        }
    })
}

fn run_tower(cmd: &TowerCommand) -> Result<String> {
    Ok(match cmd {
        TowerCommand::Trace { t, at } => {
            let t = tower(t)?;
            match (&at.partition, at.level) {
                (None, Some(n)) => format_relation(&t.trace(n)?),
                _ => format_relation(&t.trace_at(&at.resolve()?)?),
            }
        }
        TowerCommand::Involute { t } => tower_text(&tower(t)?.involute())?,
        TowerCommand::Compose { r, s, budget } => {
            tower_text(&tower(r)?.product(&tower(s)?, *budget)?)?
        }
        TowerCommand::Translate { g, t, side } => {
            let side = match side {
                SideArg::Left => Side::Left,
                SideArg::Right => Side::Right,
            };
            tower_text(&tower(t)?.translate(&prefix_map(g)?, side)?)?
        }
        TowerCommand::SameNbhd { r, s, at } => bool_line(towers::same_neighborhood(
            &tower(r)?,
            &tower(s)?,
            &at.resolve()?,
        )?),
        TowerCommand::Hausdorff { r, s, level } => {
            let (lower, upper) = towers::hausdorff_bounds(&tower(r)?, &tower(s)?, *level)?;
            format!("lower {lower}\nupper {upper}\n")
        }
        TowerCommand::Check { t, level } => {
            let report = towers::check_coherence(&tower(t)?, *level)?;
            match report.failure {
                None => format!("coherent up to {}\n", report.checked_up_to),
                Some(f) => {
                    return Err(Error::Validation(format!(
                        "incoherent at level {}: {}",
                        f.level, f.reason
                    )))
                }
            }
        }
    })
}

fn run_command(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Rel(c) => run_rel(c),
        Command::Homeo(c) => run_homeo(c),
        Command::Tower(c) => run_tower(c),
        Command::Realize { relation: r, at } => Ok(format_prefix_map(&constructions::realize(
            &at.resolve()?,
            &relation(r)?,
        )?)),
        Command::RealizePair { r, s, at } => {
            let (f, g) =
                constructions::joint_realize(&at.resolve()?, &relation(r)?, &relation(s)?)?;
            Ok(join([format_prefix_map(&f), format_prefix_map(&g)]))
        }
        Command::CosetWitness { f, g, at } => {
            let cert = constructions::double_coset_witness(
                &at.resolve()?,
                &prefix_map(f)?,
                &prefix_map(g)?,
            )?;
            Ok(join([
                format_prefix_map(&cert.u),
                format_prefix_map(&cert.v),
            ]))
        }
        Command::Net { at, count_only } => {
            let net = constructions::roelcke_net(&at.resolve()?)?;
            if *count_only {
                Ok(format!("{}\n", net.len()))
            } else {
                Ok(join(net.iter().map(format_prefix_map)))
            }
        }
        Command::Cluster { r, s, level } => {
            let cert = constructions::cluster_witness(&tower(r)?, &tower(s)?, *level)?;
            Ok(format!(
                "refinement {}\n\n{}",
                cert.refinement_level,
                join([format_prefix_map(&cert.f), format_prefix_map(&cert.g)])
            ))
        }
        Command::Witness(WitnessCommand::DenseOrbit { u1, u2, v1, v2 }) => {
            Ok(format_prefix_map(&constructions::dense_orbit_witness(
                &clopen(u1)?,
                &clopen(u2)?,
                &clopen(v1)?,
                &clopen(v2)?,
            )?))
        }
        Command::Witness(WitnessCommand::Conjugation { f, u, v }) => {
            let (h, g) =
                constructions::conjugation_witness(&prefix_map(f)?, &clopen(u)?, &clopen(v)?)?;
            Ok(join([format_prefix_map(&h), format_prefix_map(&g)]))
        }
    }
}

/// Runs one invocation. `args` includes the program name. With `--out`, the
/// result goes to the file and standard output stays empty.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let result = run_command(&cli.command).and_then(|text| match &cli.out {
        Some(path) => std::fs::write(path, &text)
            .map(|_| String::new())
            .map_err(|e| Error::Validation(format!("cannot write {}: {e}", path.display()))),
        None => Ok(text),
    });
    match result {
        Ok(stdout) => Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
