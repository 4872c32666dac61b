use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;
use trielim::{
    catalog, census, cliqueweb, cliqueweb_bell, cut_polytope_facets, emit_record, enumerate_facets,
    fix_observables, hypermetric, hypermetric_bell, immm22, includes_chsh, parse_points, parse_records,
    pure_hypermetric_bell, support_reduce, tightness_report, triangular_eliminate, Budget, CensusOptions, CgIneq,
    CliqueWebParams, CutIneq, EdgeVector, Format, GroupMode, Inclusion, InclusionBudget, Inequality, NodeId, Record,
    WeightVector, CATALOG,
};

mod json;

#[derive(Parser)]
#[command(name = "trielim", version, about = "Tight Bell inequalities from cut polytope facets")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Record,
    CgMatrix,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Record => Format::Record,
            OutFormat::CgMatrix => Format::CgMatrix,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Hypermetric,
    HypermetricBell,
    PureHypermetric,
    Cliqueweb,
    CliquewebBell,
    Immm22,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Full,
    Party,
}

#[derive(Clone, Copy, ValueEnum)]
enum Repr {
    Cut,
    Cg,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a member of a family.
    Generate {
        family: Family,
        /// Alice weights (hypermetric families), comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alice: Vec<i64>,
        /// Bob weights (hypermetric families), comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        bob: Vec<i64>,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum, default_value = "record")]
        format: OutFormat,
    },
    /// Triangular elimination of complete-graph inequalities.
    Te {
        input: Option<PathBuf>,
        /// Drop observables without coefficients afterwards.
        #[arg(long)]
        reduce: bool,
    },
    /// Convert between cut and Collins–Gisin coordinates.
    Convert {
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        to: Repr,
        #[arg(long, value_enum, default_value = "record")]
        format: OutFormat,
    },
    /// Validity and facet report; exits 1 unless every input is a facet.
    Check { input: Option<PathBuf> },
    /// Group inequalities into equivalence classes.
    Classify {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "party")]
        mode: Mode,
        /// Leaf budget of the canonical search.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Classes of eliminated facets of CUT(K_n).
    Census {
        n: usize,
        #[arg(long, num_args = 0..=1, default_value_t = true, default_missing_value = "true", action = clap::ArgAction::Set)]
        allow_x_outside: bool,
        #[arg(long, num_args = 0..=1, default_value_t = true, default_missing_value = "true", action = clap::ArgAction::Set)]
        allow_empty_party: bool,
        #[arg(long, num_args = 0..=1, default_value_t = true, default_missing_value = "true", action = clap::ArgAction::Set)]
        drop_nonfacets: bool,
        #[arg(long, default_value_t = 8)]
        spot_checks: usize,
        #[arg(long)]
        long_running: bool,
    },
    /// Facets of CUT(K_n), or of the hull of a points file.
    Hull {
        n: Option<usize>,
        #[arg(long, conflicts_with = "n")]
        points: Option<PathBuf>,
        #[arg(long)]
        long_running: bool,
    },
    /// Fix observables to deterministic outcomes, e.g. `A3=0 B1=1`.
    Fix {
        /// Optional input file followed by assignments.
        #[arg(required = true, value_name = "[FILE] NODE=VALUE")]
        args: Vec<String>,
    },
    /// Search for a fixing that leaves CHSH; exits 1 when none is found.
    IncludesChsh {
        input: Option<PathBuf>,
        /// Maximum number of residual inequalities examined.
        #[arg(long)]
        budget: Option<u64>,
        /// Try all fixings up to this many observables, only zeros above.
        #[arg(long, default_value_t = 12)]
        exhaustive_limit: usize,
    },
    /// Print a named inequality, or list the names.
    Catalog {
        name: Option<String>,
        #[arg(long, value_enum, default_value = "record")]
        format: OutFormat,
    },
}

fn read_input(path: &Option<PathBuf>) -> anyhow::Result<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        }
    }
}

fn records(path: &Option<PathBuf>) -> anyhow::Result<Vec<Record>> {
    let text = read_input(path)?;
    let recs = parse_records(&text)?;
    if recs.is_empty() {
        bail!("no inequality in input");
    }
    Ok(recs)
}

fn as_cg(ineq: &Inequality) -> anyhow::Result<CgIneq> {
    Ok(ineq.to_cg()?)
}

fn print_ineqs(cli_json: bool, list: Vec<Record>, format: Format) -> anyhow::Result<()> {
    if cli_json {
        let values: Vec<Value> = list.iter().map(|r| json::ineq(&r.ineq)).collect();
        let out = if values.len() == 1 { values.into_iter().next().expect("one") } else { Value::Array(values) };
        println!("{}", serde_json::to_string_pretty(&out)?);
        return Ok(());
    }
    let texts: Vec<String> = list.iter().map(|r| emit_record(r, format)).collect::<Result<_, _>>()?;
    print!("{}", texts.join("\n"));
    Ok(())
}

fn need(v: Option<usize>, name: &str) -> anyhow::Result<usize> {
    v.with_context(|| format!("--{name} is required for this family"))
}

fn parse_assignment(s: &str) -> anyhow::Result<(NodeId, u8)> {
    let (node, value) = s.split_once('=').with_context(|| format!("`{s}` is not of the form NODE=VALUE"))?;
    let node = NodeId::parse(node.trim()).with_context(|| format!("`{node}` is not an observable"))?;
    let value: u8 = value.trim().parse().with_context(|| format!("`{value}` is not 0 or 1"))?;
    Ok((node, value))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let json_out = cli.json;
    match cli.command {
        Command::Generate { family, alice, bob, l, s, t, r, m, format } => {
            let weights = || WeightVector::new(alice.clone(), bob.clone());
            let cw = || -> anyhow::Result<CliqueWebParams> {
                Ok(CliqueWebParams::new(need(s, "s")?, need(t, "t")?, need(r, "r")?)?)
            };
            let ineq: Inequality = match family {
                Family::Hypermetric => hypermetric(&weights())?.into(),
                Family::HypermetricBell => hypermetric_bell(&weights())?.into(),
                Family::PureHypermetric => pure_hypermetric_bell(need(l, "l")?, need(s, "s")?, need(t, "t")?)?.into(),
                Family::Cliqueweb => cliqueweb(cw()?)?.into(),
                Family::CliquewebBell => cliqueweb_bell(cw()?)?.into(),
                Family::Immm22 => immm22(need(m, "m")?)?.into(),
            };
            print_ineqs(json_out, vec![ineq.into()], format.into())?;
        }
        Command::Te { input, reduce } => {
            let mut out = Vec::new();
            for rec in records(&input)? {
                let mut te = triangular_eliminate(&rec.ineq.to_cut())?;
                if reduce {
                    te = support_reduce(&te).ineq;
                }
                out.push(Record { ineq: te.into(), name: rec.name, note: rec.note });
            }
            print_ineqs(json_out, out, Format::Record)?;
        }
        Command::Convert { input, to, format } => {
            let mut out = Vec::new();
            for rec in records(&input)? {
                let ineq: Inequality = match to {
                    Repr::Cut => rec.ineq.to_cut().into(),
                    Repr::Cg => as_cg(&rec.ineq)?.into(),
                };
                out.push(Record { ineq, name: rec.name, note: rec.note });
            }
            print_ineqs(json_out, out, format.into())?;
        }
        Command::Check { input } => {
            let recs = records(&input)?;
            let mut all_facets = true;
            let mut values = Vec::new();
            for (k, rec) in recs.iter().enumerate() {
                let f = rec.ineq.to_cut();
                let v = trielim::is_valid(&f)?;
                let t = if v.valid { Some(tightness_report(&f)?) } else { None };
                all_facets &= t.as_ref().is_some_and(|t| t.is_facet);
                if json_out {
                    values.push(json::check(&f, &v, t.as_ref()));
                    continue;
                }
                let label = rec.name.clone().unwrap_or_else(|| format!("#{}", k + 1));
                match &t {
                    Some(t) => println!(
                        "{label}: valid, max {}, roots {}, face dim {} of {}, {}",
                        trielim::scalar::format_rat(&v.max_value),
                        t.root_count,
                        t.face_dim,
                        t.polytope_dim,
                        if t.is_facet { "facet" } else { "not a facet" }
                    ),
                    None => {
                        let w = v.witness.map(|c| c.members(f.graph())).unwrap_or_default();
                        let w: Vec<String> = w.iter().map(ToString::to_string).collect();
                        println!(
                            "{label}: violated, max {} at cut {{{}}}",
                            trielim::scalar::format_rat(&v.max_value),
                            w.join(", ")
                        );
                    }
                }
            }
            if json_out {
                let out = if values.len() == 1 { values.remove(0) } else { Value::Array(values) };
                println!("{}", serde_json::to_string_pretty(&out)?);
            }
            if !all_facets {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Classify { input, mode, budget } => {
            let list: Vec<CutIneq> = records(&input)?.iter().map(|r| r.ineq.to_cut()).collect();
            let (group, name) = match mode {
                Mode::Full => (GroupMode::Full, "full"),
                Mode::Party => (GroupMode::Party, "party"),
            };
            let mut b = Budget::default();
            if let Some(leaves) = budget {
                b.max_leaves = leaves;
            }
            let classes = trielim::classify_with(&list, group, &b)?;
            if json_out {
                println!("{}", serde_json::to_string_pretty(&json::classes(name, &classes))?);
            } else {
                println!("{} classes ({name} mode)", classes.len());
                for (k, c) in classes.iter().enumerate() {
                    let members: Vec<String> = c.members.iter().map(|m| (m + 1).to_string()).collect();
                    println!("class {}: members {}", k + 1, members.join(" "));
                    println!("  {}", c.representative);
                }
            }
        }
        Command::Census { n, allow_x_outside, allow_empty_party, drop_nonfacets, spot_checks, long_running } => {
            let opts = CensusOptions {
                allow_x_outside,
                allow_empty_party,
                drop_nonfacets,
                spot_checks,
                long_running,
                ..CensusOptions::default()
            };
            let rep = census(n, &opts)?;
            if json_out {
                println!("{}", serde_json::to_string_pretty(&json::census(&rep))?);
            } else {
                println!(
                    "n = {n}: {} classes from {} facet classes, {} labellings, {} non-facets dropped",
                    rep.count(),
                    rep.facet_classes,
                    rep.labellings,
                    rep.dropped_nonfacets
                );
                let failed = rep.spot_checks.iter().filter(|s| !s.distinct).count();
                println!("spot checks: {} pairs, {failed} unexpected equivalences", rep.spot_checks.len());
                for (k, c) in rep.classes.iter().enumerate() {
                    let (a, b) = c.cg.support_reduced_scenario();
                    println!("\nclass {} ({a}, {b}), {} labellings", k + 1, c.members);
                    let rec = Record { ineq: c.cg.clone().into(), name: None, note: None };
                    print!("{}", emit_record(&rec, Format::CgMatrix)?);
                }
            }
        }
        Command::Hull { n, points, long_running } => {
            if let Some(p) = points {
                let pts = parse_points(&read_input(&Some(p))?)?;
                let h = enumerate_facets(&pts.into_iter().map(EdgeVector).collect::<Vec<_>>())?;
                if json_out {
                    println!("{}", serde_json::to_string_pretty(&json::hull(&h))?);
                } else {
                    println!("{} facets, dimension {}, {} points", h.inequalities.len(), h.dimension, h.vertex_count);
                    for s in &h.inequalities {
                        let c: Vec<String> = s.coeffs.iter().map(ToString::to_string).collect();
                        println!("{} <= {}", c.join(" "), s.rhs);
                    }
                }
            } else {
                let n = n.context("give n or --points")?;
                let h = cut_polytope_facets(n, long_running)?;
                if json_out {
                    println!("{}", serde_json::to_string_pretty(&json::cut_hull(&h))?);
                } else {
                    let sizes: Vec<String> = h.classes.iter().map(|c| c.count().to_string()).collect();
                    println!("CUT(K_{n}): {} facets in {} classes (sizes {})", h.facets.len(), h.classes.len(), sizes.join(", "));
                    for c in &h.classes {
                        println!("  {}", c.representative);
                    }
                }
            }
        }
        Command::Fix { args } => {
            let (input, assignments) = match args.split_first() {
                Some((first, rest)) if !first.contains('=') => (Some(PathBuf::from(first)), rest),
                _ => (None, &args[..]),
            };
            let fixes = assignments.iter().map(|a| parse_assignment(a)).collect::<anyhow::Result<Vec<_>>>()?;
            let mut out = Vec::new();
            for rec in records(&input)? {
                let fixed = fix_observables(&as_cg(&rec.ineq)?, &fixes)?;
                out.push(Record { ineq: fixed.into(), name: rec.name, note: rec.note });
            }
            print_ineqs(json_out, out, Format::Record)?;
        }
        Command::IncludesChsh { input, budget, exhaustive_limit } => {
            let mut b = InclusionBudget { exhaustive_limit, ..InclusionBudget::default() };
            if let Some(max) = budget {
                b.max_checks = max;
            }
            let mut found_all = true;
            let mut values = Vec::new();
            for (k, rec) in records(&input)?.iter().enumerate() {
                let result = includes_chsh(&as_cg(&rec.ineq)?, &b)?;
                found_all &= matches!(result, Inclusion::Found(_));
                if json_out {
                    values.push(json::inclusion(&result));
                    continue;
                }
                let label = rec.name.clone().unwrap_or_else(|| format!("#{}", k + 1));
                match &result {
                    Inclusion::Found(cert) => {
                        let kept: Vec<String> = cert.kept.iter().map(ToString::to_string).collect();
                        let fixes: Vec<String> = cert.fixes.iter().map(|(v, x)| format!("{v}={x}")).collect();
                        println!("{label}: includes CHSH, keep {} fix {}", kept.join(" "), fixes.join(" "));
                    }
                    Inclusion::NotFound => println!("{label}: no fixing gives CHSH"),
                    Inclusion::Unknown => println!("{label}: unknown, search truncated"),
                }
            }
            if json_out {
                let out = if values.len() == 1 { values.remove(0) } else { Value::Array(values) };
                println!("{}", serde_json::to_string_pretty(&out)?);
            }
            if !found_all {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Catalog { name, format } => match name {
            None => {
                if json_out {
                    println!("{}", serde_json::to_string_pretty(&CATALOG)?);
                } else {
                    for n in CATALOG {
                        println!("{n}");
                    }
                }
            }
            Some(name) => {
                let ineq = catalog(&name)?;
                let rec = Record { ineq, name: Some(name), note: None };
                print_ineqs(json_out, vec![rec], format.into())?;
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

trait ReducedScenario {
    fn support_reduced_scenario(&self) -> (usize, usize);
}

impl ReducedScenario for CgIneq {
    fn support_reduced_scenario(&self) -> (usize, usize) {
        let r = support_reduce(self).ineq;
        (r.m_a(), r.m_b())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
