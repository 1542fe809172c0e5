use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use matchkit::abelian::coset_structure;
use matchkit::error::{Error, Result};
use matchkit::gfq::FieldTower;
use matchkit::harness::{self, RunConfig};
use matchkit::intersectfam::{self, IntersectionVariant};
use matchkit::json::{self as wire, TowerWire};
use matchkit::matchgrp;
use matchkit::matchlin::{self, BasisMatchMode, BasisSeq, PsiPhiMode, SubspaceMatchVerdict};
use matchkit::report::{self, Format};

#[derive(Parser)]
#[command(name = "matchkit", version, about = "Matchings in abelian groups and field extensions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Matchings between subsets of a finite abelian group
    #[command(subcommand)]
    Group(GroupCmd),
    /// Matchings between subspaces of F_{q^n}
    #[command(subcommand)]
    Lin(LinCmd),
    /// Subfields, primitive subspaces and partitions of F_{q^n}
    #[command(subcommand)]
    Field(FieldCmd),
    /// Intersection families and free transversals
    #[command(subcommand)]
    Fam(FamCmd),
    /// Evidence sweeps for open problems
    #[command(subcommand)]
    Conjecture(ConjectureCmd),
    /// Operations on emitted reports
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Maximum matching, deficiency and coset obstructions
    Match(InputArg),
}

#[derive(Subcommand)]
enum LinCmd {
    /// Is an ordered basis of A matched to some basis of B
    BasisMatch {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, value_enum, default_value_t = ModeArg::ExhaustiveJ)]
        mode: ModeArg,
    },
    /// Is every basis of A matched to a basis of B
    SubspaceMatch {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        budget: u64,
        #[arg(long, default_value_t = matchlin::DEFAULT_SAMPLE_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    ExhaustiveJ,
    Rado,
}

#[derive(Subcommand)]
enum FieldCmd {
    /// Largest proper subfield degree and largest primitive subspace
    PhiPsi {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long, value_enum, default_value_t = PsiPhiArg::Exhaustive)]
        mode: PsiPhiArg,
    },
    /// Partition of F_{q^n} built from primitive and subfield parts
    Partition {
        #[command(flatten)]
        tower: TowerArgs,
        /// Part dimensions for the primitive subspace, e.g. 1,1,1
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
    },
    /// Largest subspace meeting each member of a family trivially
    MaxTrivialIntersector(InputArg),
}

#[derive(Clone, Copy, ValueEnum)]
enum PsiPhiArg {
    Greedy,
    Exhaustive,
}

#[derive(Args)]
struct TowerArgs {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    /// Tower JSON: {"p", "r", "n", "base_modulus"?, "top_modulus"?}
    #[arg(long, conflicts_with_all = ["q", "n"])]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct InputArg {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FamilyKindArg {
    #[arg(long)]
    sets: bool,
    #[arg(long)]
    subspaces: bool,
}

#[derive(Subcommand)]
enum FamCmd {
    /// Check the intersection property
    Check {
        #[command(flatten)]
        kind: FamilyKindArg,
        #[command(flatten)]
        input: InputArg,
        /// Shifted bound #∩ <= m - 1 - #J (sets only)
        #[arg(long)]
        weak: bool,
    },
    /// Extend to m members keeping the intersection property
    Extend {
        #[command(flatten)]
        kind: FamilyKindArg,
        #[command(flatten)]
        input: InputArg,
    },
    /// Free transversal or a violating index set
    Transversal(InputArg),
    /// Dual basis adapted to a hyperplane family
    DualBasis(InputArg),
}

#[derive(Args)]
struct HarnessArgs {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    /// Tower JSON instead of --q/--n
    #[arg(long, conflicts_with_all = ["q", "n"])]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ordered-basis budget per subspace
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    budget: u64,
    #[arg(long, default_value = "1e4", value_parser = parse_count)]
    pair_cap: u64,
    #[arg(long, default_value = "65536", value_parser = parse_count)]
    subspace_cap: u64,
    /// Write the JSON report here; a text summary goes to stdout
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: Format,
}

#[derive(Subcommand)]
enum ConjectureCmd {
    /// Compare M(A,B) with dim A - D(A,B) over subspace pairs
    LinearDeficiency {
        #[command(flatten)]
        args: HarnessArgs,
        /// Restrict to these dimensions
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
    },
    /// Largest subspace avoiding a divisor-indexed family
    DivisorFamily {
        #[command(flatten)]
        args: HarnessArgs,
        #[arg(long, default_value_t = 8)]
        trials: u64,
    },
}

#[derive(Subcommand)]
enum ReportCmd {
    /// Recompute every case of a JSON report
    Verify(InputArg),
}

fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if !(f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f <= u64::MAX as f64) {
        return Err(format!("not a non-negative integer: {s}"));
    }
    Ok(f as u64)
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// `q = p^r` with `p` prime.
fn split_prime_power(q: u64) -> Result<(u64, u32)> {
    let p = (2..=q)
        .take_while(|d| d.saturating_mul(*d) <= q)
        .find(|d| q.is_multiple_of(*d))
        .unwrap_or(q);
    if q < 2 {
        return Err(Error::Precondition(format!("q = {q} is not a prime power")));
    }
    let (mut rest, mut r) = (q, 0u32);
    while rest % p == 0 {
        rest /= p;
        r += 1;
    }
    if rest != 1 {
        return Err(Error::Precondition(format!("q = {q} is not a prime power")));
    }
    Ok((p, r))
}

fn tower_from(q: Option<u64>, n: Option<usize>, input: &Option<PathBuf>) -> Result<FieldTower> {
    match (input, q, n) {
        (Some(path), _, _) => wire::parse_tower(&read(path)?),
        (None, Some(q), Some(n)) => {
            let (p, r) = split_prime_power(q)?;
            FieldTower::new(p, r, n)
        }
        _ => Err(Error::Precondition("give --q and --n, or --input".into())),
    }
}

enum Outcome {
    Done(String),
    Incomplete(String),
}

fn emit(v: Value) -> Outcome {
    Outcome::Done(report::to_json(&v))
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Group(GroupCmd::Match(inp)) => {
            let (g, a, b) = wire::parse_group_pair(&read(&inp.input)?)?;
            let graph = matchgrp::build_match_graph(&a, &b)?;
            let d = matchgrp::deficiency(&a, &b)?;
            let cosets = matchgrp::coset_free_sufficiency(&a, &b)?;
            let coset = match coset_structure(&a, &b) {
                Ok(c) => c,
                Err(Error::Precondition(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(emit(json!({
                "group": wire::GroupWire::of(&g),
                "perfect": d.m == a.len(),
                "deficiency": d,
                "edges": graph.adjacency().iter().map(Vec::len).sum::<usize>(),
                "coset_obstructions": cosets,
                "sumset_coset_structure": coset.map(|c| json!({ "subgroup": c.subgroup.to_vec(), "rep": c.rep })),
            })))
        }
        Command::Lin(LinCmd::BasisMatch { input, mode }) => {
            let (t, basis, b) = wire::parse_basis_pair(&read(&input.input)?)?;
            let seq = BasisSeq::new(&t, basis)?;
            let mode = match mode {
                ModeArg::ExhaustiveJ => BasisMatchMode::ExhaustiveJ,
                ModeArg::Rado => BasisMatchMode::Rado,
            };
            let r = matchlin::check_basis_matched(&t, &seq, &b, mode)?;
            Ok(emit(json!({ "tower": TowerWire::of(&t), "report": r })))
        }
        Command::Lin(LinCmd::SubspaceMatch { input, budget, seed }) => {
            let (t, a, b) = wire::parse_subspace_pair(&read(&input.input)?)?;
            let verdict = matchlin::subspace_matched(&t, &a, &b, budget as u128, seed)?;
            let obstructions = matchlin::translate_obstructions(&t, &a, &b)?;
            let out = report::to_json(&json!({
                "tower": TowerWire::of(&t),
                "verdict": verdict,
                "translate_obstructions": obstructions,
            }));
            Ok(match verdict {
                SubspaceMatchVerdict::Unknown { .. } => Outcome::Incomplete(out),
                _ => Outcome::Done(out),
            })
        }
        Command::Field(FieldCmd::PhiPsi { tower, mode }) => {
            let t = tower_from(tower.q, tower.n, &tower.input)?;
            let mode = match mode {
                PsiPhiArg::Greedy => PsiPhiMode::Greedy,
                PsiPhiArg::Exhaustive => PsiPhiMode::Exhaustive,
            };
            let r = matchlin::psi_phi(&t, mode)?;
            Ok(emit(json!({ "tower": TowerWire::of(&t), "report": r })))
        }
        Command::Field(FieldCmd::Partition { tower, dims }) => {
            let t = tower_from(tower.q, tower.n, &tower.input)?;
            let plan = matchlin::build_partition(&t, dims.as_deref())?;
            Ok(emit(json!({ "tower": TowerWire::of(&t), "plan": plan })))
        }
        Command::Field(FieldCmd::MaxTrivialIntersector(inp)) => {
            let fam = wire::parse_subspace_family(&read(&inp.input)?)?;
            let r = matchlin::max_trivial_intersector(&fam.family)?;
            Ok(emit(json!(r)))
        }
        Command::Fam(FamCmd::Check { kind, input, weak }) => {
            let text = read(&input.input)?;
            let violator = if kind.sets {
                let fam = wire::parse_set_family(&text)?;
                let variant = if weak { IntersectionVariant::Weak } else { IntersectionVariant::Strict };
                intersectfam::check_set_intersection_property(&fam, variant)?
            } else {
                if weak {
                    return Err(Error::Precondition("--weak applies to set families only".into()));
                }
                let fam = wire::parse_subspace_family(&text)?;
                let m = family_m(&fam)?;
                intersectfam::check_dimension_intersection_property(&fam.family, m)?
            };
            Ok(emit(json!({ "holds": violator.is_none(), "violator": violator })))
        }
        Command::Fam(FamCmd::Extend { kind, input }) => {
            let text = read(&input.input)?;
            if kind.sets {
                let fam = wire::parse_set_family(&text)?;
                let out = intersectfam::extend_set_family(&fam)?;
                Ok(emit(json!(wire::set_family_to_wire(&out))))
            } else {
                let fam = wire::parse_subspace_family(&text)?;
                let m = family_m(&fam)?;
                let out = intersectfam::extend_dimension_family(&fam.field, fam.dim, &fam.family, m)?;
                let members: Vec<_> = out.members().iter().map(|s| s.basis().to_vec()).collect();
                Ok(emit(json!({
                    "p": fam.field.p(),
                    "r": fam.field.r(),
                    "dim": fam.dim,
                    "m": m,
                    "members": members,
                })))
            }
        }
        Command::Fam(FamCmd::Transversal(inp)) => {
            let fam = wire::parse_subspace_family(&read(&inp.input)?)?;
            let r = intersectfam::free_transversal(&fam.field, fam.dim, &fam.family)?;
            Ok(emit(json!(r)))
        }
        Command::Fam(FamCmd::DualBasis(inp)) => {
            let fam = wire::parse_subspace_family(&read(&inp.input)?)?;
            let r = intersectfam::dual_basis_pipeline(&fam.field, fam.dim, &fam.family)?;
            Ok(emit(json!(r)))
        }
        Command::Conjecture(ConjectureCmd::LinearDeficiency { args, dims }) => {
            let t = tower_from(args.q, args.n, &args.input)?;
            let cfg = config(&args, 0);
            let run = harness::conjecture_linear_deficiency(&t, dims.as_deref(), &cfg)?;
            finish(&args, &run, run.complete)
        }
        Command::Conjecture(ConjectureCmd::DivisorFamily { args, trials }) => {
            let t = tower_from(args.q, args.n, &args.input)?;
            let cfg = config(&args, trials);
            let run = harness::question_divisor_family(&t, &cfg)?;
            finish(&args, &run, run.complete)
        }
        Command::Report(ReportCmd::Verify(inp)) => {
            let text = read(&inp.input)?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            let checked = match v.get("command").and_then(Value::as_str) {
                Some("linear-deficiency") => {
                    harness::verify_linear_deficiency_run(&report::parse_linear_deficiency_run(&text)?)?
                }
                Some("divisor-family") => harness::verify_divisor_family_run(&report::parse_divisor_family_run(&text)?)?,
                _ => return Err(Error::Parse("not a matchkit harness report".into())),
            };
            Ok(emit(json!({ "verified": true, "cases": checked })))
        }
    }
}

fn family_m(fam: &wire::ParsedSubspaceFamily) -> Result<usize> {
    match (fam.m, fam.family.members().first()) {
        (Some(m), _) => Ok(m),
        (None, Some(s)) => Ok(s.dim() + 1),
        (None, None) => Err(Error::Precondition("empty family needs an explicit \"m\"".into())),
    }
}

fn config(args: &HarnessArgs, trials: u64) -> RunConfig {
    RunConfig {
        seed: args.seed,
        basis_budget: args.budget,
        pair_cap: args.pair_cap,
        subspace_cap: args.subspace_cap,
        trials,
    }
}

fn finish<R: report::Report>(args: &HarnessArgs, run: &R, complete: bool) -> Result<Outcome> {
    let body = match &args.json {
        Some(path) => {
            fs::write(path, report::to_json(run)).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            report::report_emit(run, Format::Text)
        }
        None => report::report_emit(run, args.format),
    };
    Ok(if complete { Outcome::Done(body) } else { Outcome::Incomplete(body) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Done(s)) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Ok(Outcome::Incomplete(s)) => {
            print!("{s}");
            ExitCode::from(3)
        }
        Err(e) => {
            let code = match e {
                Error::CapExceeded(_) => 3,
                Error::InternalTheoremViolation(_) => 1,
                _ => 2,
            };
            eprintln!("{}", json!({ "error": e.code(), "message": e.to_string() }));
            ExitCode::from(code)
        }
    }
}
