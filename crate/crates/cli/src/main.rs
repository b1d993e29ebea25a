//! popmatch: stable, popular, dominant, and strongly dominant matchings.
//!
//! Every report ends with a single `result:` line. Exit codes: 0 for
//! affirmative answers and successful constructions, 1 for negative answers
//! (not popular, no matching exists), 2 for usage or input errors, 3 when an
//! enumeration budget is exceeded.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use popmatch::dominant::{approx_max_weight_popular, strongly_dominant};
use popmatch::error::Error;
use popmatch::gadgets::{
    self, build_gadget, exemplar_matchings, matching_to_assignment, parse_cnf, Assignment,
    GadgetVariant,
};
use popmatch::instance::{Instance, Matching, Side};
use popmatch::io;
use popmatch::oracle::{self, OracleBudget};
use popmatch::stable::{gale_shapley, irving, is_stable};
use popmatch::treewidth::{
    find_tree_decomposition, is_locally_popular, make_dichotomic, min_cost_popular_tw_checked,
};
use popmatch::verify::{
    find_unit_witness, find_witness, is_dominant_structural, is_popular_structural,
    is_strongly_dominant, verify_witness,
};

#[derive(Parser)]
#[command(name = "popmatch", version, about = "Popular matching toolkit")]
struct Cli {
    /// Print only the final `result:` line.
    #[arg(long, global = true)]
    quiet: bool,
    /// Seed for randomized corpus generation (reserved: every current
    /// subcommand is deterministic).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Enable internal cross-checks in the treewidth solver.
    #[arg(long, global = true)]
    assert_internal: bool,
    /// Worker threads for oracle vote comparisons.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Property checks for a given matching.
    Check {
        #[command(subcommand)]
        what: CheckCmd,
    },
    /// Matching solvers.
    Solve {
        #[command(subcommand)]
        what: SolveCmd,
    },
    /// Witness (dual certificate) operations.
    Witness {
        #[command(subcommand)]
        what: WitnessCmd,
    },
    /// Exhaustive ground-truth computations on small instances.
    Oracle {
        #[command(subcommand)]
        what: OracleCmd,
    },
    /// Hardness-instance generators and assignment encodings.
    Gadget {
        #[command(subcommand)]
        what: GadgetCmd,
    },
    /// Tree decomposition utilities.
    Treewidth {
        #[command(subcommand)]
        what: TreewidthCmd,
    },
}

#[derive(Args)]
struct InstArg {
    /// Instance file.
    #[arg(short = 'i', long = "instance")]
    instance: PathBuf,
}

#[derive(Args)]
struct MatchingArg {
    /// Matching file (`match <id> <id>` lines).
    #[arg(short = 'm', long = "matching")]
    matching: PathBuf,
}

#[derive(Subcommand)]
enum CheckCmd {
    Stable {
        #[command(flatten)]
        inst: InstArg,
        #[command(flatten)]
        matching: MatchingArg,
    },
    Popular {
        #[command(flatten)]
        inst: InstArg,
        #[command(flatten)]
        matching: MatchingArg,
    },
    Dominant {
        #[command(flatten)]
        inst: InstArg,
        #[command(flatten)]
        matching: MatchingArg,
    },
    StronglyDominant {
        #[command(flatten)]
        inst: InstArg,
        #[command(flatten)]
        matching: MatchingArg,
    },
    LocallyPopular {
        #[command(flatten)]
        inst: InstArg,
        #[command(flatten)]
        matching: MatchingArg,
        /// Separator nodes, comma separated (may be empty).
        #[arg(long, default_value = "")]
        separator: String,
        /// Component nodes, comma separated.
        #[arg(long)]
        component: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    A,
    B,
}

#[derive(Subcommand)]
enum SolveCmd {
    /// Gale-Shapley proposer-optimal stable matching (bipartite).
    Stable {
        #[command(flatten)]
        inst: InstArg,
        #[arg(long, value_enum, default_value_t = SideArg::A)]
        side: SideArg,
    },
    /// Irving's algorithm for stable roommates.
    RoommatesStable {
        #[command(flatten)]
        inst: InstArg,
    },
    /// Linear-time strongly dominant matching via the bidirected graph.
    StronglyDominant {
        #[command(flatten)]
        inst: InstArg,
    },
    /// Minimum-cost popular matching by treewidth dynamic programming.
    MinCostPopular {
        #[command(flatten)]
        inst: InstArg,
        /// Tree decomposition file; computed by min-fill when absent.
        #[arg(long)]
        td: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        width_cap: usize,
    },
    /// 1/2-approximate max-weight popular matching (desk scale: the
    /// dominant side uses oracle enumeration).
    ApproxMaxWeight {
        #[command(flatten)]
        inst: InstArg,
    },
}

#[derive(Subcommand)]
enum WitnessCmd {
    /// Rational witness via LP feasibility (bipartite).
    Find {
        #[command(flatten)]
        inst: InstArg,
        #[command(flatten)]
        matching: MatchingArg,
    },
    /// {0, +1, -1} witness of a popular matching (bipartite).
    FindUnit {
        #[command(flatten)]
        inst: InstArg,
        #[command(flatten)]
        matching: MatchingArg,
    },
    /// Check a witness file against a matching.
    Verify {
        #[command(flatten)]
        inst: InstArg,
        #[command(flatten)]
        matching: MatchingArg,
        #[arg(short = 'w', long = "witness")]
        witness: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    MinCostPopular,
    MaxWeightPopular,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Classify every matching (stable/popular/dominant/strongly dominant).
    Classify {
        #[command(flatten)]
        inst: InstArg,
        /// Print every popular matching.
        #[arg(long)]
        list_popular: bool,
    },
    /// Optimal popular matching for an objective.
    Optimize {
        #[command(flatten)]
        inst: InstArg,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
    },
    /// Popular matching with forced/forbidden edges and nodes.
    Pmffe {
        #[command(flatten)]
        inst: InstArg,
        /// Forced edges `u,v` (repeatable).
        #[arg(long = "force-edge")]
        force_edges: Vec<String>,
        /// Forbidden edges `u,v` (repeatable).
        #[arg(long = "forbid-edge")]
        forbid_edges: Vec<String>,
        /// Nodes that must be matched (repeatable).
        #[arg(long = "force-node")]
        force_nodes: Vec<String>,
        /// Nodes that must stay unmatched (repeatable).
        #[arg(long = "forbid-node")]
        forbid_nodes: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    G,
    G0,
    Gprime,
    H,
}

#[derive(Subcommand)]
enum GadgetCmd {
    /// Build the hardness instance for a positive 3-CNF formula.
    Build {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::G)]
        variant: VariantArg,
        /// Write the instance here instead of stdout.
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Encode a 1-in-3 satisfying assignment as a popular matching.
    Encode {
        #[arg(long)]
        formula: PathBuf,
        /// Comma-separated indices of the true variables.
        #[arg(long)]
        assign: String,
        #[arg(long)]
        out_matching: Option<PathBuf>,
        #[arg(long)]
        out_witness: Option<PathBuf>,
    },
    /// Decode a popular matching back into an assignment.
    Decode {
        #[arg(long)]
        formula: PathBuf,
        #[command(flatten)]
        matching: MatchingArg,
    },
    /// Print the worked stable/dominant matchings S, S', M*.
    Exemplars {
        #[arg(long)]
        formula: PathBuf,
    },
}

#[derive(Subcommand)]
enum TreewidthCmd {
    /// Compute a tree decomposition by min-fill (exact fallback on small
    /// instances).
    Decompose {
        #[command(flatten)]
        inst: InstArg,
        #[arg(long, default_value_t = 3)]
        width_cap: usize,
    },
    /// Root and split a decomposition into dichotomic form.
    Dichotomic {
        #[command(flatten)]
        inst: InstArg,
        #[arg(long)]
        td: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        width_cap: usize,
    },
}

struct Report {
    exit: u8,
    body: String,
    result: String,
}

impl Report {
    fn yes(result: impl Into<String>) -> Report {
        Report {
            exit: 0,
            body: String::new(),
            result: result.into(),
        }
    }

    fn no(result: impl Into<String>) -> Report {
        Report {
            exit: 1,
            body: String::new(),
            result: result.into(),
        }
    }

    fn with_body(mut self, body: String) -> Report {
        self.body = body;
        self
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let quiet = cli.quiet;
    match run(cli) {
        Ok(report) => {
            if !quiet && !report.body.is_empty() {
                print!("{}", report.body);
            }
            println!("result: {}", report.result);
            ExitCode::from(report.exit)
        }
        Err(e) => {
            let code = match e {
                Error::BudgetExceeded(_) => 3,
                _ => 2,
            };
            eprintln!("error: {e}");
            println!("result: error {e}");
            ExitCode::from(code)
        }
    }
}

fn load_instance(path: &PathBuf) -> Result<Instance, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))?;
    io::parse_instance(&text)
}

fn load_matching(inst: &Instance, path: &PathBuf) -> Result<Matching, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))?;
    let pairs = io::parse_matching_file(&text)?;
    io::resolve_matching(inst, &pairs)
}

fn parse_node_list(inst: &Instance, list: &str) -> Result<Vec<usize>, Error> {
    let mut out = Vec::new();
    for tok in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        out.push(
            inst.node(tok)
                .ok_or_else(|| Error::Precondition(format!("unknown node `{tok}`")))?,
        );
    }
    Ok(out)
}

fn parse_edge(inst: &Instance, spec: &str) -> Result<(usize, usize), Error> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err(Error::Precondition(format!(
            "edge spec `{spec}` must be `u,v`"
        )));
    };
    let u = inst
        .node(a)
        .ok_or_else(|| Error::Precondition(format!("unknown node `{a}`")))?;
    let v = inst
        .node(b)
        .ok_or_else(|| Error::Precondition(format!("unknown node `{b}`")))?;
    if !inst.is_edge(u, v) {
        return Err(Error::Precondition(format!("({a},{b}) is not an edge")));
    }
    Ok((u, v))
}

fn matching_body(inst: &Instance, m: &Matching) -> String {
    io::write_matching(inst, m)
}

fn matching_result(inst: &Instance, m: &Matching, what: &str) -> String {
    format!(
        "{what} size={} cost={}",
        m.len(),
        io::format_rational(&inst.matching_cost(m))
    )
}

fn run(cli: Cli) -> Result<Report, Error> {
    let budget = OracleBudget::default();
    let _ = cli.seed;
    match cli.command {
        Command::Check { what } => run_check(what),
        Command::Solve { what } => run_solve(what, cli.assert_internal, &budget),
        Command::Witness { what } => run_witness(what),
        Command::Oracle { what } => run_oracle(what, cli.jobs, &budget),
        Command::Gadget { what } => run_gadget(what),
        Command::Treewidth { what } => run_treewidth(what),
    }
}

fn run_check(cmd: CheckCmd) -> Result<Report, Error> {
    match cmd {
        CheckCmd::Stable { inst, matching } => {
            let inst = load_instance(&inst.instance)?;
            let m = load_matching(&inst, &matching.matching)?;
            if is_stable(&inst, &m) {
                Ok(Report::yes("stable"))
            } else {
                let lg = popmatch::label_edges(&inst, &m);
                let mut body = String::new();
                for (u, v, label) in lg.kept_edges(&inst) {
                    if label.is_plus_plus() {
                        let _ = writeln!(
                            body,
                            "violation blocking-edge: {} {}",
                            inst.name(u),
                            inst.name(v)
                        );
                        break;
                    }
                }
                Ok(Report::no("not-stable").with_body(body))
            }
        }
        CheckCmd::Popular { inst, matching } => {
            let inst = load_instance(&inst.instance)?;
            let m = load_matching(&inst, &matching.matching)?;
            let cert = is_popular_structural(&inst, &m);
            if cert.verdict {
                Ok(Report::yes("popular"))
            } else {
                let body = format!("{}\n", cert.describe(&inst).unwrap());
                Ok(Report::no("not-popular").with_body(body))
            }
        }
        CheckCmd::Dominant { inst, matching } => {
            let inst = load_instance(&inst.instance)?;
            let m = load_matching(&inst, &matching.matching)?;
            let cert = is_dominant_structural(&inst, &m)?;
            if cert.verdict {
                Ok(Report::yes("dominant"))
            } else {
                let body = format!("{}\n", cert.describe(&inst).unwrap());
                Ok(Report::no("not-dominant").with_body(body))
            }
        }
        CheckCmd::StronglyDominant { inst, matching } => {
            let inst = load_instance(&inst.instance)?;
            let m = load_matching(&inst, &matching.matching)?;
            match is_strongly_dominant(&inst, &m) {
                Some((l, r)) => {
                    let names = |v: &[usize]| {
                        v.iter()
                            .map(|&u| inst.name(u))
                            .collect::<Vec<_>>()
                            .join(" ")
                    };
                    let body = format!("partition L: {}\npartition R: {}\n", names(&l), names(&r));
                    Ok(Report::yes("strongly-dominant").with_body(body))
                }
                None => Ok(Report::no("not-strongly-dominant")
                    .with_body("no partition satisfies the four conditions\n".into())),
            }
        }
        CheckCmd::LocallyPopular {
            inst,
            matching,
            separator,
            component,
        } => {
            let inst = load_instance(&inst.instance)?;
            let m = load_matching(&inst, &matching.matching)?;
            let s = parse_node_list(&inst, &separator)?;
            let x = parse_node_list(&inst, &component)?;
            let cert = is_locally_popular(&inst, &s, &x, &m)?;
            if cert.verdict {
                Ok(Report::yes("locally-popular"))
            } else {
                let body = format!("{}\n", cert.describe(&inst).unwrap());
                Ok(Report::no("not-locally-popular").with_body(body))
            }
        }
    }
}

fn run_solve(cmd: SolveCmd, assert_internal: bool, budget: &OracleBudget) -> Result<Report, Error> {
    match cmd {
        SolveCmd::Stable { inst, side } => {
            let inst = load_instance(&inst.instance)?;
            let side = match side {
                SideArg::A => Side::A,
                SideArg::B => Side::B,
            };
            let m = gale_shapley(&inst, side)?;
            Ok(Report::yes(matching_result(&inst, &m, "matching"))
                .with_body(matching_body(&inst, &m)))
        }
        SolveCmd::RoommatesStable { inst } => {
            let inst = load_instance(&inst.instance)?;
            match irving(&inst) {
                Some(m) => Ok(Report::yes(matching_result(&inst, &m, "matching"))
                    .with_body(matching_body(&inst, &m))),
                None => Ok(Report::no("no-stable-matching")),
            }
        }
        SolveCmd::StronglyDominant { inst } => {
            let inst = load_instance(&inst.instance)?;
            match strongly_dominant(&inst)? {
                Some((m, w)) => {
                    let mut body = matching_body(&inst, &m);
                    body.push_str(&io::write_witness(&inst, &w));
                    Ok(Report::yes(matching_result(&inst, &m, "matching")).with_body(body))
                }
                None => Ok(Report::no("no-strongly-dominant-matching")),
            }
        }
        SolveCmd::MinCostPopular {
            inst,
            td,
            width_cap,
        } => {
            let inst = load_instance(&inst.instance)?;
            let decomposition = match td {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        Error::Precondition(format!("cannot read {}: {e}", path.display()))
                    })?;
                    io::parse_td_file(&text, &inst)?
                }
                None => find_tree_decomposition(&inst, width_cap)?,
            };
            let dtd = make_dichotomic(&decomposition);
            match min_cost_popular_tw_checked(&inst, &dtd, assert_internal)? {
                Some((m, cost)) => {
                    let result = format!(
                        "matching size={} cost={}",
                        m.len(),
                        io::format_rational(&cost)
                    );
                    Ok(Report::yes(result).with_body(matching_body(&inst, &m)))
                }
                None => Ok(Report::no("no-popular-matching")),
            }
        }
        SolveCmd::ApproxMaxWeight { inst } => {
            let inst = load_instance(&inst.instance)?;
            let m = approx_max_weight_popular(&inst, budget)?;
            Ok(Report::yes(matching_result(&inst, &m, "matching"))
                .with_body(matching_body(&inst, &m)))
        }
    }
}

fn run_witness(cmd: WitnessCmd) -> Result<Report, Error> {
    match cmd {
        WitnessCmd::Find { inst, matching } => {
            let inst = load_instance(&inst.instance)?;
            let m = load_matching(&inst, &matching.matching)?;
            match find_witness(&inst, &m)? {
                Some(w) => Ok(Report::yes("witness-found").with_body(io::write_witness(&inst, &w))),
                None => Ok(Report::no("no-witness").with_body(
                    "the covering system is infeasible: matching is not popular\n".into(),
                )),
            }
        }
        WitnessCmd::FindUnit { inst, matching } => {
            let inst = load_instance(&inst.instance)?;
            let m = load_matching(&inst, &matching.matching)?;
            match find_unit_witness(&inst, &m) {
                Ok(w) => Ok(Report::yes("witness-found").with_body(io::write_witness(&inst, &w))),
                Err(Error::Precondition(_)) => Ok(Report::no("no-witness")
                    .with_body("unit witness search exhausted: matching is not popular\n".into())),
                Err(e) => Err(e),
            }
        }
        WitnessCmd::Verify {
            inst,
            matching,
            witness,
        } => {
            let inst = load_instance(&inst.instance)?;
            let m = load_matching(&inst, &matching.matching)?;
            let text = std::fs::read_to_string(&witness).map_err(|e| {
                Error::Precondition(format!("cannot read {}: {e}", witness.display()))
            })?;
            let map = io::parse_witness_file(&text)?;
            let w = io::resolve_witness(&inst, &map)?;
            if verify_witness(&inst, &m, &w) {
                Ok(Report::yes("witness-valid"))
            } else {
                Ok(Report::no("witness-invalid"))
            }
        }
    }
}

fn run_oracle(cmd: OracleCmd, jobs: usize, budget: &OracleBudget) -> Result<Report, Error> {
    match cmd {
        OracleCmd::Classify { inst, list_popular } => {
            let inst = load_instance(&inst.instance)?;
            let cls = oracle::classify_with_jobs(&inst, budget, jobs.max(1))?;
            let mut body = String::new();
            if list_popular {
                for (i, m) in cls.matchings.iter().enumerate() {
                    if cls.popular[i] {
                        let edges: Vec<String> = m
                            .edge_names(&inst)
                            .iter()
                            .map(|(a, b)| format!("{a}-{b}"))
                            .collect();
                        let _ = writeln!(
                            body,
                            "popular: [{}] stable={} dominant={} strongly-dominant={}",
                            edges.join(" "),
                            cls.stable[i],
                            cls.dominant[i],
                            cls.strongly_dominant[i]
                        );
                    }
                }
            }
            let count = |v: &[bool]| v.iter().filter(|&&b| b).count();
            let result = format!(
                "matchings={} stable={} popular={} dominant={} strongly-dominant={}",
                cls.matchings.len(),
                count(&cls.stable),
                count(&cls.popular),
                count(&cls.dominant),
                count(&cls.strongly_dominant)
            );
            Ok(Report::yes(result).with_body(body))
        }
        OracleCmd::Optimize { inst, objective } => {
            let inst = load_instance(&inst.instance)?;
            let objective = match objective {
                ObjectiveArg::MinCostPopular => oracle::Objective::MinCostPopular,
                ObjectiveArg::MaxWeightPopular => oracle::Objective::MaxWeightPopular,
            };
            match oracle::optimize(&inst, objective, budget)? {
                Some((m, cost)) => {
                    let result = format!(
                        "matching size={} cost={}",
                        m.len(),
                        io::format_rational(&cost)
                    );
                    Ok(Report::yes(result).with_body(matching_body(&inst, &m)))
                }
                None => Ok(Report::no("no-popular-matching")),
            }
        }
        OracleCmd::Pmffe {
            inst,
            force_edges,
            forbid_edges,
            force_nodes,
            forbid_nodes,
        } => {
            let inst = load_instance(&inst.instance)?;
            let e1: Vec<(usize, usize)> = force_edges
                .iter()
                .map(|s| parse_edge(&inst, s))
                .collect::<Result<_, _>>()?;
            let e0: Vec<(usize, usize)> = forbid_edges
                .iter()
                .map(|s| parse_edge(&inst, s))
                .collect::<Result<_, _>>()?;
            let u1 = parse_node_list(&inst, &force_nodes.join(","))?;
            let u0 = parse_node_list(&inst, &forbid_nodes.join(","))?;
            match oracle::pmffe(&inst, &e0, &e1, &u0, &u1, budget)? {
                Some(m) => Ok(Report::yes(matching_result(&inst, &m, "matching"))
                    .with_body(matching_body(&inst, &m))),
                None => Ok(Report::no("none")
                    .with_body("no popular matching satisfies the constraints\n".into())),
            }
        }
    }
}

fn load_formula(path: &PathBuf) -> Result<gadgets::PositiveCnf, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))?;
    parse_cnf(&text)
}

fn run_gadget(cmd: GadgetCmd) -> Result<Report, Error> {
    match cmd {
        GadgetCmd::Build {
            formula,
            variant,
            out,
        } => {
            let phi = load_formula(&formula)?;
            let variant = match variant {
                VariantArg::G => GadgetVariant::G,
                VariantArg::G0 => GadgetVariant::G0,
                VariantArg::Gprime => GadgetVariant::GPrime,
                VariantArg::H => GadgetVariant::H,
            };
            let inst = build_gadget(&phi, variant)?;
            let text = io::write_instance(&inst);
            let result = format!("nodes={} edges={}", inst.len(), inst.edges().len());
            match out {
                Some(path) => {
                    std::fs::write(&path, &text).map_err(|e| {
                        Error::Precondition(format!("cannot write {}: {e}", path.display()))
                    })?;
                    Ok(Report::yes(result))
                }
                None => Ok(Report::yes(result).with_body(text)),
            }
        }
        GadgetCmd::Encode {
            formula,
            assign,
            out_matching,
            out_witness,
        } => {
            let phi = load_formula(&formula)?;
            let mut values = vec![false; phi.num_vars];
            for tok in assign.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let var: usize = tok
                    .parse()
                    .map_err(|_| Error::Precondition(format!("bad variable index `{tok}`")))?;
                if var == 0 || var > phi.num_vars {
                    return Err(Error::Precondition(format!("variable {var} out of range")));
                }
                values[var - 1] = true;
            }
            let assignment = Assignment { values };
            let (m, w) = gadgets::assignment_to_matching(&phi, &assignment)?;
            let inst = build_gadget(&phi, GadgetVariant::G)?;
            let m_text = io::write_matching(&inst, &m);
            let w_text = io::write_witness(&inst, &w);
            if let Some(path) = &out_matching {
                std::fs::write(path, &m_text).map_err(|e| {
                    Error::Precondition(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            if let Some(path) = &out_witness {
                std::fs::write(path, &w_text).map_err(|e| {
                    Error::Precondition(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            let body = format!("# matching\n{m_text}# witness\n{w_text}");
            Ok(Report::yes(format!("encoded assignment={assign}")).with_body(body))
        }
        GadgetCmd::Decode { formula, matching } => {
            let phi = load_formula(&formula)?;
            let inst = build_gadget(&phi, GadgetVariant::G)?;
            let m = load_matching(&inst, &matching.matching)?;
            let assignment = matching_to_assignment(&phi, &inst, &m)?;
            let trues: Vec<String> = (1..=phi.num_vars)
                .filter(|&r| assignment.truth(r))
                .map(|r| r.to_string())
                .collect();
            Ok(Report::yes(format!("assignment={}", trues.join(","))))
        }
        GadgetCmd::Exemplars { formula } => {
            let phi = load_formula(&formula)?;
            let (inst, ex) = exemplar_matchings(&phi)?;
            let mut body = String::new();
            body.push_str("# S (proposer-optimal stable)\n");
            body.push_str(&io::write_matching(&inst, &ex.s));
            body.push_str("# S' (receiver-optimal stable)\n");
            body.push_str(&io::write_matching(&inst, &ex.s_prime));
            body.push_str("# M* (dominant)\n");
            body.push_str(&io::write_matching(&inst, &ex.m_star));
            body.push_str("# witness of M*\n");
            body.push_str(&io::write_witness(&inst, &ex.m_star_witness));
            let result = format!(
                "s-size={} s-prime-size={} m-star-size={}",
                ex.s.len(),
                ex.s_prime.len(),
                ex.m_star.len()
            );
            Ok(Report::yes(result).with_body(body))
        }
    }
}

fn run_treewidth(cmd: TreewidthCmd) -> Result<Report, Error> {
    match cmd {
        TreewidthCmd::Decompose { inst, width_cap } => {
            let inst = load_instance(&inst.instance)?;
            let td = find_tree_decomposition(&inst, width_cap)?;
            let body = io::write_td(&td, &inst);
            let result = format!("width={} bags={}", td.width(), td.bags().len());
            Ok(Report::yes(result).with_body(body))
        }
        TreewidthCmd::Dichotomic {
            inst,
            td,
            width_cap,
        } => {
            let inst = load_instance(&inst.instance)?;
            let base = match td {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        Error::Precondition(format!("cannot read {}: {e}", path.display()))
                    })?;
                    io::parse_td_file(&text, &inst)?
                }
                None => find_tree_decomposition(&inst, width_cap)?,
            };
            let d = make_dichotomic(&base);
            let mut body = String::new();
            for (i, bag) in d.bags.iter().enumerate() {
                let mut names: Vec<&str> = bag.iter().map(|&u| inst.name(u)).collect();
                names.sort();
                let _ = writeln!(body, "bag {i}: {}", names.join(" "));
            }
            for (i, succ) in d.successor.iter().enumerate() {
                if let Some(s) = succ {
                    let _ = writeln!(body, "tedge {i} {s}");
                }
            }
            let _ = writeln!(body, "# root: {}", d.root);
            let max_indegree = d.predecessors.iter().map(Vec::len).max().unwrap_or(0);
            let result = format!(
                "bags={} root={} max-indegree={max_indegree}",
                d.bags.len(),
                d.root
            );
            Ok(Report::yes(result).with_body(body))
        }
    }
}
