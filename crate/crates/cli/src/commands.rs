use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use qdsfm::apps::{
    argmax_labels, build_pagerank_instance, build_ssl_instance, cheeger_sweep_with,
    classification_error, generate_synthetic_hypergraph, ingest_tabular_dataset,
    pagerank_residual, Hypergraph, LabeledDataset, Schema, SyntheticParams,
};
use qdsfm::format::{GraphFile, InstanceFile, LabelsFile, SolutionFile};
use qdsfm::projection::{project, ProjectionMethod, ProjectionParams};
use qdsfm::solver::{ap_solve, rcd_solve, MethodChoice, SolveResult, SolverConfig};
use qdsfm::ProblemInstance;
use serde::Serialize;

use crate::output::{read_json, write_compare, write_json, write_trace, CompareRow};
use crate::{
    Algorithm, Budget, Cli, Command, CompareArgs, Method, PagerankArgs, ProjectArgs, SolveArgs,
    SslArgs,
};

const EXIT_OK: u8 = 0;
const EXIT_BUDGET: u8 = 2;

pub fn run(cli: &Cli) -> Result<u8> {
    if cli.threads == 0 {
        bail!("--threads must be at least 1");
    }
    match &cli.command {
        Command::Solve(args) => solve(cli, args),
        Command::Project(args) => project_cmd(args),
        Command::Ssl(args) => ssl(cli, args),
        Command::Pagerank(args) => pagerank(cli, args),
        Command::Compare(args) => compare(cli, args),
    }
}

fn exit_code(converged: bool) -> u8 {
    if converged {
        EXIT_OK
    } else {
        EXIT_BUDGET
    }
}

fn load_instance(path: &Path) -> Result<ProblemInstance> {
    let file: InstanceFile = read_json(path)?;
    file.to_instance()
        .with_context(|| format!("invalid instance {}", path.display()))
}

fn solver_config(
    cli: &Cli,
    budget: &Budget,
    algorithm: Algorithm,
    num_atoms: usize,
    seed: u64,
) -> Result<SolverConfig> {
    let max_time = match budget.max_seconds {
        Some(s) if !(s >= 0.0 && s.is_finite()) => bail!("--max-seconds must be a nonnegative number"),
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    let default_iters = match algorithm {
        Algorithm::Rcd => 1000 * num_atoms.max(1) as u64,
        Algorithm::Ap => 1000,
    };
    Ok(SolverConfig {
        seed,
        max_iters: budget.max_iters.unwrap_or(default_iters),
        max_time,
        target_gap: Some(budget.target_gap),
        stride: budget.stride,
        method: budget.method.into(),
        delta: budget.delta,
        max_projection_iters: None,
        threads: cli.threads,
    })
}

fn run_solver(
    algorithm: Algorithm,
    instance: &ProblemInstance,
    config: &SolverConfig,
) -> Result<SolveResult> {
    let result = match algorithm {
        Algorithm::Rcd => rcd_solve(instance, config),
        Algorithm::Ap => ap_solve(instance, config),
    };
    result.map_err(|e| anyhow!(e))
}

fn solve(cli: &Cli, args: &SolveArgs) -> Result<u8> {
    let instance = load_instance(&args.instance)?;
    let config = solver_config(cli, &args.budget, args.algorithm, instance.num_atoms(), cli.seed)?;
    let result = run_solver(args.algorithm, &instance, &config)?;
    log::info!(
        "{} finished: {} iterations, gap {:e}, {:.3}s",
        args.algorithm,
        result.iterations,
        result.gap,
        result.seconds
    );
    if let Some(path) = &args.trace {
        write_trace(path, &result.trace)?;
    }
    let solution = SolutionFile {
        x: result.x.clone(),
        gap: result.gap,
        iters: result.iterations,
        converged: result.converged,
    };
    write_json(args.solution.as_deref(), &solution)?;
    Ok(exit_code(result.converged))
}

#[derive(Debug, Serialize)]
struct ProjectOutput {
    members: Vec<usize>,
    y: Vec<f64>,
    phi: f64,
    objective: f64,
    certificate: f64,
    iterations: usize,
    status: qdsfm::projection::ProjectionStatus,
}

fn project_cmd(args: &ProjectArgs) -> Result<u8> {
    let instance = load_instance(&args.instance)?;
    let atom = instance.atoms().get(args.atom).ok_or_else(|| {
        anyhow!(
            "atom {} out of range; the instance has {} atoms",
            args.atom,
            instance.num_atoms()
        )
    })?;
    let w = instance.w();
    let a = instance.a();
    let target = match &args.target {
        Some(t) => t.clone(),
        None => atom.members().iter().map(|&i| 2.0 * w.get(i) * a[i]).collect(),
    };
    let wtilde = match &args.wtilde {
        Some(t) => t.clone(),
        None => atom.members().iter().map(|&i| 1.0 / w.get(i)).collect(),
    };
    let method = match args.method {
        Method::Auto if atom.is_cut() => ProjectionMethod::Exact,
        Method::Auto | Method::Mnp => ProjectionMethod::Mnp,
        Method::Fw => ProjectionMethod::Fw,
        Method::Exact => ProjectionMethod::Exact,
    };
    let params = ProjectionParams {
        delta: args.delta,
        max_major: args.max_iters,
        method,
    };
    let p = project(atom, &wtilde, &target, &params)
        .map_err(|e| anyhow!(e))
        .with_context(|| format!("projecting onto atom {}", args.atom))?;
    let converged = p.converged();
    write_json(
        args.output.as_deref(),
        &ProjectOutput {
            members: atom.members().to_vec(),
            y: p.point.y,
            phi: p.point.phi,
            objective: p.objective,
            certificate: p.certificate,
            iterations: p.iterations,
            status: p.status,
        },
    )?;
    Ok(exit_code(converged))
}

/// One labeled hypergraph to classify.
struct SslProblem {
    hypergraph: Hypergraph,
    labels: LabeledDataset,
    truth: Option<Vec<usize>>,
}

#[derive(Debug, Serialize)]
struct SslRun {
    seed: u64,
    classification_error: Option<f64>,
    c_value: Option<f64>,
    gap: f64,
    iters: u64,
    converged: bool,
    seconds: f64,
    labels: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scores: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize)]
struct SslSummary {
    median_classification_error: Option<f64>,
    median_c_value: Option<f64>,
    runs: Vec<SslRun>,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

fn load_ssl_problem(args: &SslArgs, seed: u64) -> Result<SslProblem> {
    if args.synthetic {
        let p = generate_synthetic_hypergraph(&SyntheticParams {
            n: args.n,
            within_per_cluster: args.within,
            across: args.across,
            edge_size: args.edge_size,
            labeled_per_cluster: args.labeled,
            seed,
        })?;
        return Ok(SslProblem {
            hypergraph: p.hypergraph,
            labels: p.labels,
            truth: Some(p.truth),
        });
    }
    let labels_path = args
        .labels
        .as_deref()
        .ok_or_else(|| anyhow!("--labels is required without --synthetic"))?;
    let labels_file: LabelsFile = read_json(labels_path)?;
    if let Some(path) = &args.hypergraph {
        let hypergraph: Hypergraph = read_json(path)?;
        hypergraph
            .validate()
            .with_context(|| format!("invalid hypergraph {}", path.display()))?;
        let labels = labels_file.to_dataset(hypergraph.n)?;
        return Ok(SslProblem {
            hypergraph,
            labels,
            truth: None,
        });
    }
    let (Some(data), Some(schema_path)) = (&args.dataset, &args.schema) else {
        bail!("pass --synthetic, --hypergraph or --dataset with --schema");
    };
    let schema: Schema = read_json(schema_path)?;
    let mut reader =
        csv::Reader::from_path(data).with_context(|| format!("reading {}", data.display()))?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|r| r.iter().map(str::to_string).collect::<Vec<_>>()))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let hypergraph = ingest_tabular_dataset(&header, &rows, &schema, args.binning.into())?;
    log::info!(
        "ingested {} rows into {} hyperedges ({} incidences)",
        hypergraph.n,
        hypergraph.len(),
        hypergraph.total_incidence()
    );
    let labels = labels_file.to_dataset(hypergraph.n)?;
    let truth = match &args.truth_column {
        None => None,
        Some(name) => {
            let col = header
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| anyhow!("truth column '{name}' not found"))?;
            let values: Vec<String> = rows
                .iter()
                .map(|r| r.get(col).map(|s| s.trim().to_string()).unwrap_or_default())
                .collect();
            let classes: BTreeMap<&str, usize> = {
                let mut distinct: Vec<&str> = values.iter().map(String::as_str).collect();
                distinct.sort_unstable();
                distinct.dedup();
                distinct.into_iter().enumerate().map(|(k, v)| (v, k)).collect()
            };
            Some(values.iter().map(|v| classes[v.as_str()]).collect())
        }
    };
    Ok(SslProblem {
        hypergraph,
        labels,
        truth,
    })
}

fn ssl(cli: &Cli, args: &SslArgs) -> Result<u8> {
    if args.repeat == 0 {
        bail!("--repeat must be at least 1");
    }
    if args.repeat > 1 && !args.synthetic {
        bail!("--repeat needs --synthetic");
    }
    let mut runs = Vec::new();
    for offset in 0..args.repeat {
        let seed = cli.seed.wrapping_add(offset);
        let problem = load_ssl_problem(args, seed)?;
        let first = offset == 0;
        runs.push(ssl_run(cli, args, &problem, seed, first)?);
    }
    let converged = runs.iter().all(|r| r.converged);
    if args.repeat == 1 {
        write_json(args.output.as_deref(), &runs[0])?;
    } else {
        let summary = SslSummary {
            median_classification_error: median(
                runs.iter().filter_map(|r| r.classification_error).collect(),
            ),
            median_c_value: median(runs.iter().filter_map(|r| r.c_value).collect()),
            runs,
        };
        write_json(args.output.as_deref(), &summary)?;
    }
    Ok(exit_code(converged))
}

fn ssl_run(cli: &Cli, args: &SslArgs, problem: &SslProblem, seed: u64, first: bool) -> Result<SslRun> {
    let hg = &problem.hypergraph;
    let k_classes = problem.labels.num_classes;
    // two classes are separated by the sweep on the class-0 scores
    let solved_classes = if k_classes == 2 { 1 } else { k_classes };
    let mut scores = Vec::with_capacity(solved_classes);
    let mut gap: f64 = 0.0;
    let mut iters = 0;
    let mut seconds = 0.0;
    let mut converged = true;
    let mut sweep_inputs = None;
    for k in 0..solved_classes {
        let (instance, transform) =
            build_ssl_instance(hg, &problem.labels, k, args.beta, args.normalization.into())?;
        if first && k == 0 {
            if let Some(path) = &args.write_instance {
                write_json(Some(path), &InstanceFile::from_instance(&instance)?)?;
            }
        }
        let config = solver_config(cli, &args.budget, args.algorithm, instance.num_atoms(), seed)?;
        let result = run_solver(args.algorithm, &instance, &config)?;
        if first && k == 0 {
            if let Some(path) = &args.trace {
                write_trace(path, &result.trace)?;
            }
        }
        gap = gap.max(result.gap);
        iters += result.iterations;
        seconds += result.seconds;
        converged &= result.converged;
        if k == 0 {
            sweep_inputs = Some((transform.w().diag().to_vec(), transform.original(&result.x)));
        }
        scores.push(transform.scores(&result.x));
    }

    let (labels, c_value) = if k_classes == 2 {
        let (w, x) = sweep_inputs.expect("class 0 solved");
        let cut = cheeger_sweep_with(hg, &w, &x, args.balance.into());
        (cut.labels(), Some(cut.value))
    } else {
        (argmax_labels(&scores), None)
    };
    let classification_error = problem
        .truth
        .as_ref()
        .map(|t| classification_error(&labels, t));
    Ok(SslRun {
        seed,
        classification_error,
        c_value,
        gap,
        iters,
        converged,
        seconds,
        labels,
        scores: (k_classes > 2).then_some(scores),
    })
}

#[derive(Debug, Serialize)]
struct PagerankOutput {
    p: Vec<f64>,
    residual: f64,
    gap: f64,
    iters: u64,
    converged: bool,
}

fn pagerank(cli: &Cli, args: &PagerankArgs) -> Result<u8> {
    let file: GraphFile = read_json(&args.graph)?;
    let graph = file.graph();
    let s = file.teleport();
    let (instance, transform) = build_pagerank_instance(&graph, args.alpha, &s)?;
    let config = solver_config(cli, &args.budget, args.algorithm, instance.num_atoms(), cli.seed)?;
    let result = run_solver(args.algorithm, &instance, &config)?;
    if let Some(path) = &args.trace {
        write_trace(path, &result.trace)?;
    }
    let p = transform.pagerank(&result.x);
    let residual = pagerank_residual(&graph, args.alpha, &s, &p);
    write_json(
        args.output.as_deref(),
        &PagerankOutput {
            p,
            residual,
            gap: result.gap,
            iters: result.iterations,
            converged: result.converged,
        },
    )?;
    Ok(exit_code(result.converged))
}

fn parse_pair(spec: &str) -> Result<(Algorithm, MethodChoice)> {
    let (alg, method) = spec.split_once('+').unwrap_or((spec, "auto"));
    let algorithm = match alg.trim().to_ascii_lowercase().as_str() {
        "rcd" => Algorithm::Rcd,
        "ap" => Algorithm::Ap,
        other => bail!("unknown algorithm '{other}' in '{spec}'"),
    };
    let method: MethodChoice = method.trim().parse().map_err(|e| anyhow!("{e} in '{spec}'"))?;
    Ok((algorithm, method))
}

fn compare(cli: &Cli, args: &CompareArgs) -> Result<u8> {
    let instance = load_instance(&args.instance)?;
    let num_atoms = instance.num_atoms().max(1) as u64;
    let pairs = args
        .methods
        .iter()
        .map(|s| parse_pair(s).map(|p| (s.trim().to_string(), p)))
        .collect::<Result<Vec<_>>>()?;
    if pairs.is_empty() {
        bail!("--methods is empty");
    }
    let max_time = match args.max_seconds {
        Some(s) if !(s >= 0.0 && s.is_finite()) => bail!("--max-seconds must be a nonnegative number"),
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    let budget = args.max_iters.unwrap_or(100 * num_atoms);
    let stride = args.stride.unwrap_or(num_atoms).max(1);

    // iteration counts are reported in projections so RCD and AP line up
    let mut results = Vec::new();
    for (label, (algorithm, method)) in &pairs {
        let (max_iters, run_stride, scale) = match algorithm {
            Algorithm::Rcd => (budget, stride, 1),
            Algorithm::Ap => (budget / num_atoms, (stride / num_atoms).max(1), num_atoms),
        };
        let config = SolverConfig {
            seed: cli.seed,
            max_iters,
            max_time,
            target_gap: Some(args.target_gap),
            stride: Some(run_stride),
            method: *method,
            threads: cli.threads,
            ..SolverConfig::default()
        };
        let result = run_solver(*algorithm, &instance, &config)
            .with_context(|| format!("running {label}"))?;
        log::info!("{label}: gap {:e} after {:.3}s", result.gap, result.seconds);
        results.push((label.clone(), scale, result));
    }
    let rows: Vec<CompareRow<'_>> = results
        .iter()
        .flat_map(|(label, scale, result)| {
            result.trace.iter().map(move |r| CompareRow {
                method: label,
                iter: r.iter * scale,
                seconds: r.seconds,
                gap: r.gap,
            })
        })
        .collect();
    match &args.output {
        Some(path) => write_compare(
            std::fs::File::create(path).with_context(|| format!("writing {}", path.display()))?,
            &rows,
        )?,
        None => write_compare(std::io::stdout().lock(), &rows)?,
    }
    Ok(EXIT_OK)
}
