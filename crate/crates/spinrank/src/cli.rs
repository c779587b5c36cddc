//! Command-line front end: partition-function evaluation, connection-rank
//! windows, lattice identities, algebra checks, and the invariant checker.
//!
//! Exit codes: 0 success (or consistent verdict), 1 violation found by
//! `check`, 2 input error, 3 resource guard.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::characterize::{
    run_characterization, CheckConfig, CheckReport, InvariantSource, Verdict,
};
use crate::connection::{build_submatrix, exact_rank, generate_family, necessity_check};
use crate::error::{Error, Result};
use crate::io;
use crate::marked::{b_element, MarkedGraph};
use crate::matrix::ScalarMatrix;
use crate::multigraph::Multigraph;
use crate::partition::{
    enumerate_partitions, falling_factorial, moebius_matrix, mu_row, p_matrix, partition_index_map,
    verify_diagonalization, zeta_matrix, LatticeMatrix,
};
use crate::scalar::GaussianRational;
use crate::spin::{min_degree_order, partition_function, partition_function_ordered};

/// Identity and convolution sweeps walk Bell(k)^2 pairs.
const MAX_ALGEBRA_MARKS: usize = 6;

#[derive(Parser)]
#[command(
    name = "spinrank",
    version,
    about = "Exact spin-model partition functions, connection-matrix rank windows, and partition-lattice identities"
)]
struct Cli {
    /// Cap the worker thread pool (RAYON_NUM_THREADS is honored otherwise).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the partition function of a graph under a spin matrix.
    Eval {
        /// Graph JSON file.
        #[arg(long)]
        graph: PathBuf,
        /// Spin-matrix JSON file.
        #[arg(long)]
        matrix: PathBuf,
        /// Vertex elimination order: `greedy` or a comma-separated
        /// permutation like `3,1,2`. Omit for direct summation.
        #[arg(long)]
        order: Option<String>,
    },
    /// Exact rank of a finite window of the k-th connection matrix.
    Rank {
        #[command(flatten)]
        source: SourceArgs,
        /// Mark count.
        #[arg(long)]
        k: usize,
        /// Vertex bound for family members.
        #[arg(long, default_value_t = 2)]
        max_vertices: usize,
        /// Total edge-multiplicity bound for family members.
        #[arg(long, default_value_t = 2)]
        max_edges: usize,
    },
    /// Partition-lattice matrices and the diagonalization identity.
    Lattice {
        /// Ground-set size.
        #[arg(long)]
        n: usize,
        /// Scalar literal for the indeterminate, e.g. `3` or `1/2`.
        #[arg(long, default_value = "1")]
        x: String,
    },
    /// Semigroup-algebra identities at a given mark count.
    Algebra {
        #[arg(long)]
        k: usize,
    },
    /// Test an invariant against the finitely checkable conditions.
    Check {
        #[command(flatten)]
        source: SourceArgs,
        /// Probe mark counts up to this bound.
        #[arg(long, default_value_t = 2)]
        max_k: usize,
        /// Vertex bound for probe graphs and families.
        #[arg(long, default_value_t = 2)]
        max_vertices: usize,
        /// Total edge-multiplicity bound for probe graphs.
        #[arg(long, default_value_t = 2)]
        max_edges: usize,
        /// Number of sampled multiplicativity pairs.
        #[arg(long, default_value_t = 8)]
        pairs: usize,
        /// Seed for all sampling.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Emit the full report as canonical JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Spin-matrix JSON file defining the invariant.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Invariant-table JSON file (canonical key to scalar literal).
    #[arg(long)]
    table: Option<PathBuf>,
}

impl SourceArgs {
    fn load(&self) -> Result<InvariantSource> {
        match (&self.matrix, &self.table) {
            (Some(path), None) => Ok(InvariantSource::from_spin(io::load_spin_matrix(path)?)),
            (None, Some(path)) => InvariantSource::from_table(io::load_table(path)?),
            _ => Err(Error::InvalidInput(
                "exactly one of --matrix or --table is required".into(),
            )),
        }
    }
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // ignore failure if a pool already exists (tests, repeated calls)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_resource_guard() {
                3
            } else {
                2
            }
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Eval {
            graph,
            matrix,
            order,
        } => cmd_eval(&graph, &matrix, order.as_deref()),
        Command::Rank {
            source,
            k,
            max_vertices,
            max_edges,
        } => cmd_rank(&source, k, max_vertices, max_edges),
        Command::Lattice { n, x } => cmd_lattice(n, &x),
        Command::Algebra { k } => cmd_algebra(k),
        Command::Check {
            source,
            max_k,
            max_vertices,
            max_edges,
            pairs,
            seed,
            json,
        } => cmd_check(
            &source,
            CheckConfig {
                max_k,
                max_vertices,
                max_edges,
                pairs,
                seed,
            },
            json,
        ),
    }
}

fn parse_order(text: &str, graph: &Multigraph) -> Result<Vec<usize>> {
    if text == "greedy" {
        return Ok(min_degree_order(graph));
    }
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad vertex id `{part}` in --order")))
        })
        .collect()
}

fn cmd_eval(graph_path: &Path, matrix_path: &Path, order: Option<&str>) -> Result<i32> {
    let graph = io::load_graph(graph_path)?;
    let matrix = io::load_spin_matrix(matrix_path)?;
    let value = match order {
        None => partition_function(&matrix, &graph)?,
        Some(text) => {
            let order = parse_order(text, &graph)?;
            partition_function_ordered(&matrix, &graph, &order)?
        }
    };
    println!("{value}");
    Ok(0)
}

fn cmd_rank(source: &SourceArgs, k: usize, max_vertices: usize, max_edges: usize) -> Result<i32> {
    let f = source.load()?;
    let family = generate_family(k, max_vertices, max_edges)?;
    let window = build_submatrix(&f, &family)?;
    let rank = exact_rank(&window.matrix);
    let mut output = json!({
        "family_size": family.len(),
        "rank": rank,
    });
    if let InvariantSource::Spin(a) = &f {
        let report = necessity_check(a, &family)?;
        output["bound_nk"] = json!(u64::try_from(report.bound).unwrap_or(u64::MAX));
        output["factorization_ok"] = json!(report.factorization_ok);
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&output).expect("serializable")
    );
    Ok(0)
}

fn matrix_to_json(matrix: &ScalarMatrix) -> serde_json::Value {
    let rows: Vec<Vec<String>> = (0..matrix.rows())
        .map(|r| {
            (0..matrix.cols())
                .map(|c| matrix[(r, c)].to_string())
                .collect()
        })
        .collect();
    json!(rows)
}

fn lattice_to_json(lattice: &LatticeMatrix) -> serde_json::Value {
    matrix_to_json(&lattice.matrix)
}

fn cmd_lattice(n: usize, x_text: &str) -> Result<i32> {
    let x: GaussianRational = x_text.parse()?;
    let zeta = zeta_matrix(n)?;
    let moebius = moebius_matrix(n)?;
    let p = p_matrix(n, &x)?;
    let det = p.matrix.determinant()?;
    let diag = verify_diagonalization(n, &x)?;
    let order: Vec<String> = zeta.partitions.iter().map(|p| p.rgs_string()).collect();
    let diag_json = match diag.first_mismatch {
        None => json!({ "pass": diag.pass }),
        Some(m) => json!({
            "pass": diag.pass,
            "first_mismatch": {
                "row": m.row_partition,
                "col": m.col_partition,
                "got": m.got.to_string(),
                "expected": m.expected.to_string(),
            }
        }),
    };
    let output = json!({
        "n": n,
        "x": x.to_string(),
        "order": order,
        "zeta": lattice_to_json(&zeta),
        "moebius": lattice_to_json(&moebius),
        "p_matrix": lattice_to_json(&p),
        "det_p": det.to_string(),
        "diagonalization": diag_json,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&output).expect("serializable")
    );
    Ok(0)
}

fn cmd_algebra(k: usize) -> Result<i32> {
    if k > MAX_ALGEBRA_MARKS {
        return Err(Error::SizeGuard {
            what: "algebra check mark count",
            got: k as u128,
            limit: MAX_ALGEBRA_MARKS as u128,
        });
    }
    let b = b_element(k)?;
    let b_idempotent = b.product(&b)? == b;

    let parts = enumerate_partitions(k)?;
    let index = partition_index_map(&parts);
    let mut join_law = true;
    for p in &parts {
        for q in &parts {
            let glued = MarkedGraph::edgeless_from_partition(p)
                .glue(&MarkedGraph::edgeless_from_partition(q))?;
            let expected = MarkedGraph::edgeless_from_partition(&p.join(q)?);
            if glued.canonical_key()? != expected.canonical_key()? {
                join_law = false;
            }
        }
    }

    let mu = mu_row(k)?;
    let mut convolution = vec![0i64; parts.len()];
    for (pi, p) in parts.iter().enumerate() {
        for (qi, q) in parts.iter().enumerate() {
            let r = index[p.join(q)?.rgs()];
            convolution[r] += mu[pi] * mu[qi];
        }
    }
    let convolution_ok = convolution == mu;

    // the weighted block-count sums reproduce the falling factorial
    let x = GaussianRational::from_int(k as i64 + 2);
    let mut weighted = GaussianRational::zero();
    for (pi, p) in parts.iter().enumerate() {
        weighted += &(&GaussianRational::from_int(mu[pi]) * &x.pow(p.block_count() as i64)?);
    }
    let falling_ok = weighted == falling_factorial(&x, k);

    let output = json!({
        "k": k,
        "partition_count": parts.len(),
        "b_terms": b.term_count(),
        "b_idempotent": b_idempotent,
        "join_law": join_law,
        "convolution": convolution_ok,
        "falling_factorial": falling_ok,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&output).expect("serializable")
    );
    Ok(
        if b_idempotent && join_law && convolution_ok && falling_ok {
            0
        } else {
            1
        },
    )
}

fn render_text_report(report: &CheckReport) -> String {
    let mut lines = Vec::new();
    lines.push(format!("source: {}", report.source));
    lines.push(format!("f(empty) = {}", report.f_empty));
    match &report.f_k1 {
        Some(v) => lines.push(format!("f(K_1) = {v}")),
        None => lines.push("f(K_1): not evaluated".into()),
    }
    lines.push(format!(
        "multiplicativity pairs checked: {}",
        report.multiplicativity_pairs_checked
    ));
    for level in &report.moebius_levels {
        lines.push(format!(
            "moebius residuals at k={}: {} graphs",
            level.k, level.graphs_checked
        ));
    }
    for row in &report.rank_growth {
        let mut line = format!(
            "rank window k={}: family={} rank={}",
            row.k, row.family_size, row.rank
        );
        if let Some(bound) = row.bound {
            line.push_str(&format!(" bound={bound}"));
        }
        if let Some(ok) = row.factorization_ok {
            line.push_str(&format!(
                " factorization={}",
                if ok { "ok" } else { "FAILED" }
            ));
        }
        lines.push(line);
    }
    for note in &report.notes {
        lines.push(format!("note: {note}"));
    }
    match &report.verdict {
        Verdict::ConsistentUpTo { config } => lines.push(format!(
            "verdict: consistent up to (max_k={}, max_vertices={}, max_edges={}, pairs={}, seed={})",
            config.max_k, config.max_vertices, config.max_edges, config.pairs, config.seed
        )),
        Verdict::Violation { witness } => {
            let detail = serde_json::to_string(witness).expect("serializable");
            lines.push(format!("verdict: VIOLATION {detail}"));
        }
    }
    lines.join("\n")
}

fn cmd_check(source: &SourceArgs, config: CheckConfig, json_output: bool) -> Result<i32> {
    let f = source.load()?;
    let report = run_characterization(&f, &config)?;
    if json_output {
        let value = serde_json::to_value(&report).expect("serializable");
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("serializable")
        );
    } else {
        println!("{}", render_text_report(&report));
    }
    Ok(if report.verdict.is_violation() { 1 } else { 0 })
}
