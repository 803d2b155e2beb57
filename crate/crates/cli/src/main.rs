//! `tck` — command-line workbench for the Toeplitz algebra of a directed
//! graph: structural graph reports, truncated Fock-space matrix models,
//! relation and faithfulness verification, core norms, expectations,
//! partitions of unity, and the power-partial-isometry toolbox.
//!
//! Exit codes: 0 all checks pass, 1 a finding failed, 2 usage or input
//! error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use tck_core::analysis::{
    self, cross_check_core_norm, faithfulness_verdict, independence_rank, partition_residual,
    CoreElement, Tolerances,
};
use tck_core::fock::{TckFamily, TruncatedFockRep};
use tck_core::graph::Simplicity;
use tck_core::ppi::{
    self, is_power_partial_isometry, module_rep, parse_matrix_any, sequence_rep, truncated_shift,
    verify_ppi_rep, TruncatedSequence,
};
use tck_core::staralg::{parse_poly, write_poly};
use tck_core::words::WordLiteral;
use tck_core::{DirectedGraph, VerificationReport, Word};

#[derive(Parser)]
#[command(name = "tck", version, about = "Workbench for graph Toeplitz algebras")]
struct Cli {
    /// Seed for randomized property suites (reserved; the subcommands
    /// below are deterministic)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Tolerance for exact-relation residuals
    #[arg(long, global = true, default_value_t = 1e-10)]
    relation_tol: f64,

    /// Threshold for rank / nonvanishing checks
    #[arg(long, global = true, default_value_t = 1e-8)]
    rank_tol: f64,

    /// Tolerance for comparisons of independently computed norms
    #[arg(long, global = true, default_value_t = 1e-8)]
    norm_tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Structural report: sinks, sources, transitivity, omega set,
    /// compact-ideal support, simplicity verdict
    GraphInfo {
        /// Graph file
        graph: PathBuf,
    },
    /// Build the truncated Fock representation and export its matrices
    FockBuild {
        /// Graph file
        graph: PathBuf,
        /// Truncation depth N >= 1
        #[arg(short = 'N', long)]
        depth: usize,
        /// Output directory for basis.txt and the matrix files
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Check the family relations and the faithfulness criterion for an
    /// exported representation
    Verify {
        /// Directory produced by fock-build
        rep_dir: PathBuf,
        /// Graph file
        #[arg(long)]
        graph: PathBuf,
    },
    /// Core norm of a gauge-invariant polynomial, optionally cross-checked
    /// against the matrix model
    Norm {
        /// Polynomial file
        poly: PathBuf,
        /// Graph file
        #[arg(long)]
        graph: PathBuf,
        /// Also compare against the Fock matrix norm at this depth
        #[arg(long, value_name = "N")]
        cross_check: Option<usize>,
    },
    /// Apply an expectation and print the canonical polynomial
    Expect {
        /// Polynomial file
        poly: PathBuf,
        /// Graph file
        #[arg(long)]
        graph: PathBuf,
        /// Which expectation to apply
        #[arg(long, value_enum)]
        mode: ExpectMode,
    },
    /// Partition-of-unity residual and per-projection ranks for a finite
    /// word set containing the identity
    Partition {
        /// Graph file
        graph: PathBuf,
        /// Truncation depth N
        #[arg(short = 'N', long)]
        depth: usize,
        /// Word literals separated by `;` (repeatable); include `@` for
        /// the identity, e.g. --set '@;f;f,f'
        #[arg(long, required = true)]
        set: Vec<String>,
    },
    /// Linear independence of the spanning monomials at finite degree
    Independence {
        /// Graph file
        graph: PathBuf,
        /// Maximal path length of the monomials
        #[arg(short, long)]
        degree: usize,
        /// Truncation depth N
        #[arg(short = 'N', long)]
        depth: usize,
    },
    /// Power-partial-isometry toolbox
    Ppi {
        #[command(subcommand)]
        command: PpiCommand,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ExpectMode {
    /// Keep terms with |mu| = |nu|
    Gauge,
    /// Keep terms with mu = nu
    Free,
}

#[derive(Subcommand)]
enum PpiCommand {
    /// Check the power-partial-isometry property and the representation
    /// relations generated by the matrix
    Check {
        /// Matrix file (dense or sparse text format)
        matrix: PathBuf,
        /// Highest power to test (default: the matrix dimension)
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Print the truncated shift J_n in dense text format
    Shift {
        n: usize,
        /// Write to a file instead of stdout
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Represent an eventually constant sequence through the matrix:
    /// prints the algebra image, and the module image when supported
    Represent {
        /// Matrix file (dense or sparse text format)
        matrix: PathBuf,
        /// Head entries, `;`-separated, each `re` or `re,im`
        #[arg(long, default_value = "")]
        head: String,
        /// Constant tail value, `re` or `re,im`
        #[arg(long, default_value = "0")]
        tail: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tols = Tolerances {
        relation: cli.relation_tol,
        rank: cli.rank_tol,
        norm_cmp: cli.norm_tol,
    };
    match run(&cli, &tols) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn load_graph(path: &Path) -> Result<Arc<DirectedGraph>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading graph file {}", path.display()))?;
    let g = DirectedGraph::parse(&text)
        .with_context(|| format!("parsing graph file {}", path.display()))?;
    Ok(Arc::new(g))
}

fn emit_report(report: &VerificationReport, format: Format) {
    match format {
        Format::Text => print!("{}", report.render_text()),
        Format::Json => println!("{}", report.to_json()),
    }
}

fn run(cli: &Cli, tols: &Tolerances) -> Result<bool> {
    match &cli.command {
        Command::GraphInfo { graph } => {
            let g = load_graph(graph)?;
            cmd_graph_info(&g, cli.format);
            Ok(true)
        }
        Command::FockBuild { graph, depth, out } => {
            let g = load_graph(graph)?;
            let rep = TruncatedFockRep::build(&g, *depth)?;
            rep.export(out)?;
            println!(
                "exported depth-{} representation of dimension {} to {}",
                rep.depth(),
                rep.dim(),
                out.display()
            );
            Ok(true)
        }
        Command::Verify { rep_dir, graph } => {
            let g = load_graph(graph)?;
            let fam = TckFamily::import(&g, rep_dir)?;
            let relations = fam.verify(tols.relation)?;
            emit_report(&relations, cli.format);
            if !relations.passed() {
                return Ok(false);
            }
            let faithful = faithfulness_verdict(&fam, tols)?;
            emit_report(&faithful, cli.format);
            Ok(faithful.passed())
        }
        Command::Norm {
            poly,
            graph,
            cross_check,
        } => {
            let g = load_graph(graph)?;
            let text = std::fs::read_to_string(poly)
                .with_context(|| format!("reading polynomial file {}", poly.display()))?;
            let p = parse_poly(&g, &text)?;
            let r = CoreElement::new(p)?;
            let value = analysis::core_norm(&r)?;
            println!("core norm: {value}");
            if let Some(depth) = cross_check {
                let report = cross_check_core_norm(&r, *depth, tols)?;
                emit_report(&report, cli.format);
                return Ok(report.passed());
            }
            Ok(true)
        }
        Command::Expect { poly, graph, mode } => {
            let g = load_graph(graph)?;
            let text = std::fs::read_to_string(poly)
                .with_context(|| format!("reading polynomial file {}", poly.display()))?;
            let p = parse_poly(&g, &text)?;
            let out = match mode {
                ExpectMode::Gauge => p.gauge_expect(),
                ExpectMode::Free => p.free_expect(),
            };
            print!("{}", write_poly(&out));
            Ok(true)
        }
        Command::Partition { graph, depth, set } => {
            let g = load_graph(graph)?;
            let rep = TruncatedFockRep::build(&g, *depth)?;
            let family = parse_word_set(set)?;
            let residual = partition_residual(&rep, &family)?;
            let mut findings = vec![tck_core::Finding::residual(
                "partition_of_unity_residual",
                residual,
                0.0,
                format!("{} words, depth {}", family.len(), depth),
            )];
            for s in &family {
                let q = rep.partition_projection(&family, s)?;
                let rank = q.nnz() as f64;
                // informational row: value carries the rank, never fails
                findings.push(tck_core::Finding::residual(
                    format!("projection_rank[{s}]"),
                    rank,
                    rank,
                    "rank of the diagonal projection",
                ));
            }
            let report = VerificationReport::new(findings);
            emit_report(&report, cli.format);
            Ok(report.passed())
        }
        Command::Independence {
            graph,
            degree,
            depth,
        } => {
            let g = load_graph(graph)?;
            let report = independence_rank(&g, *degree, *depth, tols)?;
            emit_report(&report, cli.format);
            Ok(report.passed())
        }
        Command::Ppi { command } => run_ppi(command, cli.format, tols),
    }
}

fn cmd_graph_info(g: &Arc<DirectedGraph>, format: Format) {
    let fmt_set = |it: &mut dyn Iterator<Item = String>| -> String {
        let v: Vec<String> = it.collect();
        if v.is_empty() {
            "(none)".into()
        } else {
            v.join(" ")
        }
    };
    let (transitive, witness) = g.is_transitive();
    let verdict = g.simplicity_verdict();
    let verdict_str = match verdict.verdict {
        Simplicity::Simple => "simple",
        Simplicity::NotSimple => "not simple",
        Simplicity::NotApplicable => "not applicable",
    };
    match format {
        Format::Text => {
            println!("vertices: {}", g.vertex_count());
            println!("edges: {}", g.edge_count());
            println!(
                "sinks: {}",
                fmt_set(&mut g.sinks().iter().map(ToString::to_string))
            );
            println!(
                "sources: {}",
                fmt_set(&mut g.sources().iter().map(ToString::to_string))
            );
            println!(
                "omega vertices: {}",
                fmt_set(&mut g.omega_vertices().map(ToString::to_string))
            );
            println!(
                "compact-ideal support: {}",
                fmt_set(&mut g.compact_ideal_support().iter().map(ToString::to_string))
            );
            match witness {
                None => println!("transitive: yes"),
                Some((v, w)) => println!("transitive: no (({v},{w}) not joined)"),
            }
            println!("simplicity: {verdict_str}");
            for reason in &verdict.reasons {
                println!("  - {reason}");
            }
        }
        Format::Json => {
            let value = serde_json::json!({
                "vertices": g.vertices().map(ToString::to_string).collect::<Vec<_>>(),
                "edges": g.edge_ids().map(ToString::to_string).collect::<Vec<_>>(),
                "sinks": g.sinks().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "sources": g.sources().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "omega": g.omega_vertices().map(ToString::to_string).collect::<Vec<_>>(),
                "compact_ideal_support": g
                    .compact_ideal_support()
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>(),
                "transitive": transitive,
                "transitivity_witness": witness.map(|(v, w)| vec![v.to_string(), w.to_string()]),
                "simplicity": verdict_str,
                "reasons": verdict.reasons,
            });
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        }
    }
}

fn parse_word_set(args: &[String]) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for arg in args {
        for part in arg.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let lit = WordLiteral::parse(part)?;
            let word = lit.word();
            if !out.contains(&word) {
                out.push(word);
            }
        }
    }
    if out.is_empty() {
        return Err(anyhow!("the word set is empty"));
    }
    Ok(out)
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let t = text.trim();
    let (re, im) = match t.split_once(',') {
        Some((re, im)) => (re.trim(), im.trim()),
        None => (t, "0"),
    };
    Ok(Complex64::new(
        re.parse::<f64>()
            .map_err(|_| anyhow!("bad float `{re}` in `{text}`"))?,
        im.parse::<f64>()
            .map_err(|_| anyhow!("bad float `{im}` in `{text}`"))?,
    ))
}

fn parse_sequence(head: &str, tail: &str) -> Result<TruncatedSequence> {
    let mut entries = Vec::new();
    for part in head.split(';') {
        let part = part.trim();
        if !part.is_empty() {
            entries.push(parse_complex(part)?);
        }
    }
    Ok(TruncatedSequence::new(entries, parse_complex(tail)?))
}

fn run_ppi(command: &PpiCommand, format: Format, tols: &Tolerances) -> Result<bool> {
    match command {
        PpiCommand::Check { matrix, kmax } => {
            let text = std::fs::read_to_string(matrix)
                .with_context(|| format!("reading matrix file {}", matrix.display()))?;
            let v = parse_matrix_any(&text)?;
            let kmax = kmax.unwrap_or(v.nrows());
            let ppi_report = is_power_partial_isometry(&v, kmax, tols.relation)?;
            emit_report(&ppi_report, format);
            let rep_report = verify_ppi_rep(&v, tols.relation)?;
            emit_report(&rep_report, format);
            Ok(ppi_report.passed() && rep_report.passed())
        }
        PpiCommand::Shift { n, out } => {
            let j = truncated_shift(*n)?;
            let text = ppi::write_dense(&j);
            match out {
                Some(path) => std::fs::write(path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        PpiCommand::Represent { matrix, head, tail } => {
            let text = std::fs::read_to_string(matrix)
                .with_context(|| format!("reading matrix file {}", matrix.display()))?;
            let v = parse_matrix_any(&text)?;
            let a = parse_sequence(head, tail)?;
            let pi = sequence_rep(&v, &a, tols.relation)?;
            println!("# algebra image");
            print!("{}", ppi::write_dense(&pi));
            if a.in_shift_module() {
                let psi = module_rep(&v, &a, tols.relation)?;
                println!("# module image");
                print!("{}", ppi::write_dense(&psi));
            } else {
                println!("# sequence is nonzero at index 0: no module image");
            }
            Ok(true)
        }
    }
}
