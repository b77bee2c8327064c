//! `treelogic`: batch front end for the tree-logic workbench.
//!
//! Exit codes: 0 success / SAT, 1 UNSAT or NO_MODEL or a false check,
//! 2 usage error, 3 timeout.

use std::fs;
use std::io::Read;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use treelogic_core::formula::{classify, parse, pretty, Formula, Signature};
use treelogic_core::normalize::{to_nf_c2, to_nf_fo2};
use treelogic_core::oracle::{self, OracleVerdict};
use treelogic_core::semantics::model_check_sentence;
use treelogic_core::translate::translate;
use treelogic_core::tree::Tree;
use treelogic_core::verdict::{Outcome, SearchMode};
use treelogic_core::{c2_bounds, fo2_bounds, sat_c2, sat_fo2bin, Bounds, C2Bounds};

#[derive(Parser)]
#[command(name = "treelogic", version, about = "Decision procedures for two-variable logics on trees")]
struct Cli {
    /// Emit machine-readable JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized suites; fixed default keeps runs reproducible.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker count; accepted for interface stability, execution is serial
    /// and output is identical for any value.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FormulaArgs {
    /// Formula as an s-expression, or @PATH to read it from a file.
    #[arg(long)]
    formula: String,
    /// Unary predicate symbols, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "")]
    unary: Vec<String>,
    /// Free binary predicate symbols, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "")]
    binary: Vec<String>,
    /// Signature file in the `unary: ...` / `binary: ...` format;
    /// overrides --unary/--binary.
    #[arg(long)]
    sig_file: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and report its canonical form and logic class.
    Parse(FormulaArgs),
    /// Bring a sentence to solver normal form.
    Nf {
        #[command(flatten)]
        formula: FormulaArgs,
        /// Target form: "fo2" or "c2".
        #[arg(long)]
        logic: String,
    },
    /// Evaluate a sentence on a tree.
    Check {
        #[command(flatten)]
        formula: FormulaArgs,
        /// Tree file path.
        #[arg(long)]
        tree: String,
    },
    /// Decide satisfiability of an FO² sentence with free binary symbols.
    SatFo2 {
        #[command(flatten)]
        formula: FormulaArgs,
        #[arg(long)]
        max_depth: Option<u64>,
        #[arg(long)]
        max_degree: Option<u64>,
        #[arg(long)]
        max_fset: Option<u64>,
        /// Write the witness tree here on SAT.
        #[arg(long)]
        witness_out: Option<String>,
    },
    /// Decide satisfiability of a C² sentence over the navigational signature.
    SatC2 {
        #[command(flatten)]
        formula: FormulaArgs,
        #[arg(long)]
        max_depth: Option<u64>,
        #[arg(long)]
        max_degree: Option<u64>,
        /// Write the witness tree here on SAT.
        #[arg(long)]
        witness_out: Option<String>,
    },
    /// Rewrite counting quantifiers away over the navigational signature.
    Translate {
        #[command(flatten)]
        formula: FormulaArgs,
        /// Verify pointwise equivalence on all trees up to this many nodes.
        #[arg(long)]
        check_upto: Option<usize>,
    },
    /// Brute-force satisfiability by exhaustive enumeration.
    Oracle {
        #[command(flatten)]
        formula: FormulaArgs,
        #[arg(long)]
        max_nodes: usize,
        /// Cap on enumerated labelings per frame.
        #[arg(long, default_value_t = 1 << 22)]
        budget: u64,
    },
    /// Differential suite: random sentences and trees, type-based evaluation
    /// against direct evaluation.
    Diff {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 6)]
        max_nodes: usize,
    },
    /// Greedily remove subtrees from a model while it keeps satisfying
    /// the sentence.
    Shrink {
        #[command(flatten)]
        formula: FormulaArgs,
        #[arg(long)]
        tree: String,
        /// Write the shrunk tree here.
        #[arg(long)]
        out: Option<String>,
    },
    /// Print the search bounds a sentence induces, as exact integers.
    Bounds(FormulaArgs),
}

fn read_input(spec: &str) -> Result<String> {
    if let Some(path) = spec.strip_prefix('@') {
        if path == "-" {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            Ok(buf)
        } else {
            fs::read_to_string(path).with_context(|| format!("reading {}", path))
        }
    } else {
        Ok(spec.to_string())
    }
}

fn load_formula(args: &FormulaArgs) -> Result<(Formula, Signature)> {
    let sig = match &args.sig_file {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path))?;
            Signature::parse(&text).map_err(|e| anyhow!("bad signature: {}", e))?
        }
        None => {
            let clean = |v: &[String]| -> Vec<String> {
                v.iter().filter(|s| !s.is_empty()).cloned().collect()
            };
            Signature::new(clean(&args.unary), clean(&args.binary))
                .map_err(|e| anyhow!("bad signature: {}", e))?
        }
    };
    let text = read_input(&args.formula)?;
    let f = parse(&text, &sig).map_err(|e| anyhow!("bad formula: {}", e))?;
    Ok((f, sig))
}

fn load_tree(path: &str) -> Result<Tree> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path))?;
    Tree::load(&text).map_err(|e| anyhow!("bad tree file {}: {}", path, e))
}

fn deadline_from_env() -> Option<Instant> {
    let secs: u64 = std::env::var("TREELOGIC_TIMEOUT_SECS").ok()?.parse().ok()?;
    Some(Instant::now() + Duration::from_secs(secs))
}

/// Drop the subtree rooted at `v`, renumbering the preorder.
fn without_subtree(t: &Tree, v: usize) -> Result<Tree> {
    let keep: Vec<usize> = t
        .nodes()
        .filter(|&w| w != v && !t.is_strict_ancestor(v, w))
        .collect();
    let index = |w: usize| keep.iter().position(|&k| k == w);
    let parents: Vec<Option<usize>> = keep
        .iter()
        .map(|&w| t.parent(w).and_then(index))
        .collect();
    let mut out = Tree::new(parents)?;
    for (new, &old) in keep.iter().enumerate() {
        out.set_labels(new, t.labels(old).clone());
    }
    for (rel, pairs) in t.edges() {
        for &(a, b) in pairs {
            if let (Some(a), Some(b)) = (index(a), index(b)) {
                out.add_edge(rel.clone(), a, b);
            }
        }
    }
    Ok(out)
}

/// 0 on SAT, 1 otherwise; prints the shared verdict shape.
fn report_verdict(
    json: bool,
    outcome: &Outcome,
    detail: serde_json::Value,
    witness_out: &Option<String>,
) -> Result<ExitCode> {
    let (label, code) = match outcome {
        Outcome::Sat(_) => ("SAT", ExitCode::from(0)),
        Outcome::UnsatProved => ("UNSAT", ExitCode::from(1)),
        Outcome::UnsatWithinBounds => ("UNSAT_WITHIN_BOUNDS", ExitCode::from(1)),
        Outcome::Timeout => ("TIMEOUT", ExitCode::from(3)),
    };
    let witness = match outcome {
        Outcome::Sat(t) => Some(t.save()),
        _ => None,
    };
    if let (Some(path), Some(text)) = (witness_out, &witness) {
        fs::write(path, text).with_context(|| format!("writing {}", path))?;
    }
    if json {
        println!(
            "{}",
            json!({ "verdict": label, "witness": witness, "bounds": detail })
        );
    } else {
        println!("{}", label);
        if let Some(text) = witness {
            print!("{}", text);
        }
    }
    Ok(code)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Parse(args) => {
            let (f, _) = load_formula(&args)?;
            let class = format!("{:?}", classify(&f));
            if cli.json {
                println!("{}", json!({ "formula": pretty(&f), "class": class }));
            } else {
                println!("{}", pretty(&f));
                println!("class: {}", class);
            }
            Ok(ExitCode::from(0))
        }
        Command::Nf { formula, logic } => {
            let (f, sig) = load_formula(&formula)?;
            let (nf_text, out_sig, m) = match logic.as_str() {
                "fo2" => {
                    let nf = to_nf_fo2(&f, &sig).map_err(|e| anyhow!("{}", e))?;
                    (pretty(&nf.to_formula()), nf.sig.clone(), nf.m())
                }
                "c2" => {
                    let nf = to_nf_c2(&f, &sig).map_err(|e| anyhow!("{}", e))?;
                    (pretty(&nf.to_formula()), nf.sig.clone(), nf.m())
                }
                other => bail!("unknown logic {:?} (expected fo2 or c2)", other),
            };
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "normal_form": nf_text,
                        "signature": out_sig.save(),
                        "conjuncts": m,
                    })
                );
            } else {
                println!("{}", nf_text);
                println!("conjuncts: {}", m);
                print!("{}", out_sig.save());
            }
            Ok(ExitCode::from(0))
        }
        Command::Check { formula, tree } => {
            let (f, _) = load_formula(&formula)?;
            let t = load_tree(&tree)?;
            let holds = model_check_sentence(&t, &f).map_err(|e| anyhow!("{}", e))?;
            if cli.json {
                println!("{}", json!({ "holds": holds }));
            } else {
                println!("{}", holds);
            }
            Ok(ExitCode::from(if holds { 0 } else { 1 }))
        }
        Command::SatFo2 { formula, max_depth, max_degree, max_fset, witness_out } => {
            let (f, sig) = load_formula(&formula)?;
            let nf = to_nf_fo2(&f, &sig).map_err(|e| anyhow!("{}", e))?;
            let sound = fo2_bounds(&nf);
            let bounds = match (max_depth, max_degree, max_fset) {
                (None, None, None) => sound,
                (d, g, s) => Bounds::bounded(
                    d.unwrap_or(sound.max_depth),
                    g.unwrap_or(sound.max_degree),
                    s.unwrap_or(sound.max_fset),
                ),
            };
            let v = sat_fo2bin(&nf, &bounds, deadline_from_env());
            let detail = json!({
                "max_depth": v.bounds_used.max_depth,
                "max_degree": v.bounds_used.max_degree,
                "max_fset": v.bounds_used.max_fset,
                "mode": format!("{:?}", v.bounds_used.mode),
            });
            report_verdict(cli.json, &v.outcome, detail, &witness_out)
        }
        Command::SatC2 { formula, max_depth, max_degree, witness_out } => {
            let (f, sig) = load_formula(&formula)?;
            let nf = to_nf_c2(&f, &sig).map_err(|e| anyhow!("{}", e))?;
            let bounds = match (max_depth, max_degree) {
                (None, None) => c2_bounds(&nf),
                (d, g) => {
                    let sound = c2_bounds(&nf);
                    let pick = |x: Option<u64>, fallback: &num_bigint::BigUint| match x {
                        Some(n) => n.into(),
                        None => fallback.clone(),
                    };
                    C2Bounds {
                        max_depth: pick(d, &sound.max_depth),
                        max_degree: pick(g, &sound.max_degree),
                        mode: SearchMode::Bounded,
                    }
                }
            };
            let v = sat_c2(&nf, &bounds, deadline_from_env());
            let detail = json!({
                "max_depth": v.bounds_used.max_depth.to_string(),
                "max_degree": v.bounds_used.max_degree.to_string(),
                "mode": format!("{:?}", v.bounds_used.mode),
            });
            report_verdict(cli.json, &v.outcome, detail, &witness_out)
        }
        Command::Translate { formula, check_upto } => {
            let (f, _) = load_formula(&formula)?;
            let out = translate(&f).map_err(|e| anyhow!("{}", e))?;
            let mut checked = None;
            if let Some(n) = check_upto {
                let sig = Signature::empty();
                let ok = oracle::equivalent_on_trees(&f, &out, &sig, n, 1 << 22)
                    .map_err(|e| anyhow!("{}", e))?;
                if !ok {
                    bail!("translation disagrees with the input on a tree of <= {} nodes", n);
                }
                checked = Some(n);
            }
            if cli.json {
                println!(
                    "{}",
                    json!({ "translated": pretty(&out), "checked_upto": checked })
                );
            } else {
                println!("{}", pretty(&out));
                if let Some(n) = checked {
                    println!("equivalent on all trees up to {} nodes", n);
                }
            }
            Ok(ExitCode::from(0))
        }
        Command::Oracle { formula, max_nodes, budget } => {
            let (f, sig) = load_formula(&formula)?;
            let verdict = oracle::oracle_sat(&f, &sig, max_nodes, budget)
                .map_err(|e| anyhow!("{}", e))?;
            match verdict {
                OracleVerdict::Sat(t) => {
                    if cli.json {
                        println!("{}", json!({ "verdict": "SAT", "witness": t.save() }));
                    } else {
                        println!("SAT");
                        print!("{}", t.save());
                    }
                    Ok(ExitCode::from(0))
                }
                OracleVerdict::NoModelUpTo(n) => {
                    if cli.json {
                        println!("{}", json!({ "verdict": "NO_MODEL", "max_nodes": n }));
                    } else {
                        println!("NO_MODEL up to {} nodes", n);
                    }
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Diff { suite, cases, max_nodes } => {
            if suite != "all" && suite != "types" {
                bail!("unknown suite {:?} (expected all or types)", suite);
            }
            let sig = Signature::new(["A", "B"], Vec::<String>::new()).unwrap();
            let report = oracle::differential_nf_c2(
                cli.seed,
                cases,
                &sig,
                max_nodes,
                2,
                3,
                |t, phi| treelogic_core::check_via_types(t, phi),
            )
            .map_err(|e| anyhow!("{}", e))?;
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "cases": report.cases,
                        "disagreements": report.disagreements,
                    })
                );
            } else {
                println!(
                    "{} cases, {} disagreements",
                    report.cases,
                    report.disagreements.len()
                );
                for line in &report.disagreements {
                    println!("  {}", line);
                }
            }
            Ok(ExitCode::from(if report.clean() { 0 } else { 1 }))
        }
        Command::Shrink { formula, tree, out } => {
            let (f, _) = load_formula(&formula)?;
            let mut t = load_tree(&tree)?;
            if !model_check_sentence(&t, &f).map_err(|e| anyhow!("{}", e))? {
                bail!("the given tree does not satisfy the formula");
            }
            loop {
                let mut progressed = false;
                for v in t.nodes().filter(|&v| v != t.root()) {
                    let candidate = without_subtree(&t, v)?;
                    if model_check_sentence(&candidate, &f).map_err(|e| anyhow!("{}", e))? {
                        t = candidate;
                        progressed = true;
                        break;
                    }
                }
                if !progressed {
                    break;
                }
            }
            if let Some(path) = &out {
                fs::write(path, t.save()).with_context(|| format!("writing {}", path))?;
            }
            if cli.json {
                println!("{}", json!({ "nodes": t.len(), "tree": t.save() }));
            } else {
                println!("shrunk to {} nodes", t.len());
                print!("{}", t.save());
            }
            Ok(ExitCode::from(0))
        }
        Command::Bounds(args) => {
            let (f, sig) = load_formula(&args)?;
            let mut report = serde_json::Map::new();
            let mut lines = Vec::new();
            if let Ok(nf) = to_nf_fo2(&f, &sig) {
                let b = fo2_bounds(&nf);
                let fw = treelogic_core::bound_f(&nf);
                let fs_ = treelogic_core::bound_fset(&nf);
                report.insert("fo2_witness_bound".into(), json!(fw.to_string()));
                report.insert("fo2_fset_bound".into(), json!(fs_.to_string()));
                report.insert("fo2_max_depth".into(), json!(b.max_depth.to_string()));
                report.insert("fo2_max_degree".into(), json!(b.max_degree.to_string()));
                lines.push(format!("fo2 witness bound: {}", fw));
                lines.push(format!("fo2 free-witness set bound: {}", fs_));
                lines.push(format!("fo2 max depth: {}", b.max_depth));
                lines.push(format!("fo2 max degree: {}", b.max_degree));
            }
            if let Ok(nf) = to_nf_c2(&f, &sig) {
                let b = c2_bounds(&nf);
                report.insert("c2_max_depth".into(), json!(b.max_depth.to_string()));
                report.insert("c2_max_degree".into(), json!(b.max_degree.to_string()));
                lines.push(format!("c2 max depth: {}", b.max_depth));
                lines.push(format!("c2 max degree: {}", b.max_degree));
            }
            if report.is_empty() {
                bail!("the sentence fits neither solver normal form");
            }
            if cli.json {
                println!("{}", serde_json::Value::Object(report));
            } else {
                for line in lines {
                    println!("{}", line);
                }
            }
            Ok(ExitCode::from(0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}
