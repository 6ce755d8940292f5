//! Command-line front end: validate documents, run workflows on the
//! simulated grid, and run the aeroelastic demo.
//!
//! Exit codes: 0 success, 1 validation error, 2 runtime/placement failure,
//! 3 non-convergence.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gridvpe::demo::{convergence_csv, run_demo_case, sig9, DemoMode, DemoResult};
use gridvpe::infrastructure::load_catalog;
use gridvpe::runtime::{
    demo_library, simulate, trace_metrics, CaseSetup, ExecutionTrace, FailureInjection, RunStatus,
    SimRun,
};
use gridvpe::vpe::{create_vpe, load_vpe_spec};
use gridvpe::workflow::load_workflow;
use gridvpe::{aeroelastic, defaults};

const EXIT_VALIDATION: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_DIVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "gridvpe", version, about = "Grid VPE simulator and aeroelastic demo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a catalog, workflow or vpe document.
    Validate {
        #[arg(value_enum)]
        kind: DocKind,
        file: PathBuf,
    },
    /// Bind workflows to VPEs and simulate them on the catalog.
    Run {
        #[arg(long)]
        catalog: PathBuf,
        /// VPE spec files; paired positionally with --workflow.
        #[arg(long = "vpe", required = true)]
        vpes: Vec<PathBuf>,
        /// Workflow files; paired positionally with --vpe.
        #[arg(long = "workflow", required = true)]
        workflows: Vec<PathBuf>,
        /// Crash injection "component@iteration" or "vpe/component@iteration";
        /// without a vpe prefix it targets the first run.
        #[arg(long)]
        fail: Option<String>,
        /// Output trace file (JSON lines: events, then one metrics object per run).
        #[arg(long)]
        trace: PathBuf,
    },
    /// Run the bundled demo application.
    Demo {
        #[command(subcommand)]
        which: DemoCommand,
    },
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Coupled static-aeroelastic wing analysis.
    Aeroelastic {
        /// One of cruise, pullup, pushdown.
        #[arg(long)]
        case: String,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Output directory for the convergence CSV and summary.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DocKind {
    Catalog,
    Workflow,
    Vpe,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(name = "in-process")]
    InProcess,
    #[value(name = "on-grid")]
    OnGrid,
}

fn main() -> ExitCode {
    // bad command lines are validation errors (exit 1), not clap's default 2
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    match cli.command {
        Command::Validate { kind, file } => cmd_validate(kind, &file),
        Command::Run {
            catalog,
            vpes,
            workflows,
            fail,
            trace,
        } => cmd_run(&catalog, &vpes, &workflows, fail.as_deref(), &trace),
        Command::Demo {
            which: DemoCommand::Aeroelastic { case, mode, out },
        } => cmd_demo(&case, mode, &out),
    }
}

fn read(path: &Path) -> Result<String, ExitCode> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_VALIDATION)
    })
}

fn cmd_validate(kind: DocKind, file: &Path) -> ExitCode {
    let text = match read(file) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let outcome: Result<(), String> = match kind {
        DocKind::Catalog => load_catalog(&text).map(|_| ()).map_err(|e| e.to_string()),
        DocKind::Workflow => load_workflow(&text)
            .and_then(|wf| wf.validate_dataflow().map(|_| ()))
            .map_err(|e| e.to_string()),
        DocKind::Vpe => load_vpe_spec(&text).map(|_| ()).map_err(|e| e.to_string()),
    };
    match outcome {
        Ok(()) => {
            println!("OK");
            ExitCode::SUCCESS
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn parse_fail_spec(spec: &str, first_vpe: &str) -> Result<FailureInjection, String> {
    let (vpe, rest) = match spec.split_once('/') {
        Some((vpe, rest)) => (vpe.to_string(), rest),
        None => (first_vpe.to_string(), spec),
    };
    let (component, iteration) = rest
        .split_once('@')
        .ok_or_else(|| format!("bad --fail spec {spec:?}: expected component@iteration"))?;
    let iteration: u32 = iteration
        .parse()
        .map_err(|_| format!("bad --fail iteration in {spec:?}"))?;
    Ok(FailureInjection {
        vpe,
        component: component.to_string(),
        iteration,
    })
}

fn cmd_run(
    catalog_path: &Path,
    vpe_paths: &[PathBuf],
    workflow_paths: &[PathBuf],
    fail: Option<&str>,
    trace_path: &Path,
) -> ExitCode {
    if vpe_paths.len() != workflow_paths.len() {
        eprintln!(
            "error: {} --vpe and {} --workflow arguments; they pair one to one",
            vpe_paths.len(),
            workflow_paths.len()
        );
        return ExitCode::from(EXIT_VALIDATION);
    }
    let catalog_text = match read(catalog_path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let catalog = match load_catalog(&catalog_text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let mut runs = Vec::new();
    for (vpe_path, wf_path) in vpe_paths.iter().zip(workflow_paths) {
        let vpe_text = match read(vpe_path) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let wf_text = match read(wf_path) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let built = load_vpe_spec(&vpe_text)
            .map_err(|e| e.to_string())
            .and_then(|spec| create_vpe(&catalog, &spec).map_err(|e| e.to_string()))
            .and_then(|vpe| {
                let wf = load_workflow(&wf_text).map_err(|e| e.to_string())?;
                wf.validate_dataflow().map_err(|e| e.to_string())?;
                let bound = wf.bind(&vpe).map_err(|e| e.to_string())?;
                Ok(SimRun {
                    workflow: bound,
                    vpe,
                })
            });
        match built {
            Ok(run) => runs.push(run),
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(EXIT_VALIDATION);
            }
        }
    }
    let failures = match fail {
        Some(spec) => match parse_fail_spec(spec, &runs[0].vpe.name) {
            Ok(f) => vec![f],
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(EXIT_VALIDATION);
            }
        },
        None => Vec::new(),
    };

    // workflows running the demo components get the default cruise setup
    let config = defaults::demo_aero_config();
    let case = config.case("cruise").expect("embedded cruise case");
    let fc = aeroelastic::flight_condition(case, &config.wing).expect("cruise condition resolves");
    let library = demo_library(&CaseSetup {
        wing: config.wing.clone(),
        dynamic_pressure_pa: fc.dynamic_pressure_pa,
        alpha: aeroelastic::AlphaMode::Trim {
            cl_target: fc.cl_target,
        },
        relaxation: 0.5,
    });

    let traces = match simulate(&runs, &catalog, &library, &failures) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    if let Err(e) = fs::write(trace_path, render_trace_file(&traces)) {
        eprintln!("error: cannot write {}: {e}", trace_path.display());
        return ExitCode::from(EXIT_RUNTIME);
    }
    let mut worst = ExitCode::SUCCESS;
    for trace in &traces {
        let m = trace_metrics(trace);
        println!(
            "vpe {} workflow {}: status {} makespan_s {} total_transfer_s {} tasks {} iterations {}",
            trace.vpe,
            trace.workflow,
            status_str(trace.status),
            sig9(m.makespan_s),
            sig9(m.total_transfer_s),
            m.task_count,
            m.iterations
        );
        if let Some(reason) = &trace.failure {
            eprintln!("vpe {}: {reason}", trace.vpe);
        }
    }
    if traces.iter().any(|t| t.status == RunStatus::Failed) {
        worst = ExitCode::from(EXIT_RUNTIME);
    } else if traces.iter().any(|t| t.status == RunStatus::Diverged) {
        worst = ExitCode::from(EXIT_DIVERGED);
    }
    worst
}

fn status_str(status: RunStatus) -> &'static str {
    match status {
        RunStatus::Completed => "completed",
        RunStatus::Failed => "failed",
        RunStatus::Diverged => "diverged",
    }
}

/// Events of all runs merged in trace order, followed by one metrics object
/// per run in run order.
fn render_trace_file(traces: &[ExecutionTrace]) -> String {
    let mut events: Vec<_> = traces.iter().flat_map(|t| t.events.iter()).collect();
    events.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("event serializes"));
        out.push('\n');
    }
    for trace in traces {
        let m = trace_metrics(trace);
        out.push_str(&format!(
            "{{\"vpe\":{},\"status\":\"{}\",\"makespan_s\":{},\"total_transfer_s\":{},\"task_count\":{},\"iterations\":{}}}\n",
            serde_json::to_string(&trace.vpe).expect("string serializes"),
            status_str(trace.status),
            sig9(m.makespan_s),
            sig9(m.total_transfer_s),
            m.task_count,
            m.iterations
        ));
    }
    out
}

fn cmd_demo(case: &str, mode: ModeArg, out_dir: &Path) -> ExitCode {
    let mode = match mode {
        ModeArg::InProcess => DemoMode::InProcess,
        ModeArg::OnGrid => DemoMode::OnGrid,
    };
    let result = match run_demo_case(case, mode) {
        Ok(r) => r,
        Err(gridvpe::demo::DemoError::UnknownCase(c)) => {
            eprintln!("error: unknown case {c:?}");
            return ExitCode::from(EXIT_VALIDATION);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    if let Err(e) = fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return ExitCode::from(EXIT_RUNTIME);
    }
    let csv_path = out_dir.join(format!("{case}_convergence.csv"));
    if let Err(e) = fs::write(&csv_path, convergence_csv(&result.rows)) {
        eprintln!("error: cannot write {}: {e}", csv_path.display());
        return ExitCode::from(EXIT_RUNTIME);
    }
    let summary_path = out_dir.join(format!("{case}_summary.json"));
    if let Err(e) = fs::write(&summary_path, render_summary(&result)) {
        eprintln!("error: cannot write {}: {e}", summary_path.display());
        return ExitCode::from(EXIT_RUNTIME);
    }
    if let Some(trace) = &result.trace {
        let trace_path = out_dir.join(format!("{case}_trace.jsonl"));
        if let Err(e) = fs::write(&trace_path, render_trace_file(std::slice::from_ref(trace))) {
            eprintln!("error: cannot write {}: {e}", trace_path.display());
            return ExitCode::from(EXIT_RUNTIME);
        }
    }
    println!(
        "case {} mode {}: {} in {} iterations, alpha_deg {}, tip_twist_deg {}, tip_deflection_m {}",
        result.case,
        match result.mode {
            DemoMode::InProcess => "in-process",
            DemoMode::OnGrid => "on-grid",
        },
        if result.converged { "converged" } else { "diverged" },
        result.iterations,
        sig9(result.alpha_root_rad.to_degrees()),
        sig9(result.tip_twist_rad().to_degrees()),
        sig9(result.tip_deflection_m()),
    );
    if result.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_DIVERGED)
    }
}

fn render_summary(result: &DemoResult) -> String {
    format!(
        "{{\"case\":\"{}\",\"mode\":\"{}\",\"status\":\"{}\",\"iterations\":{},\"alpha_root_deg\":{},\"tip_twist_deg\":{},\"tip_deflection_m\":{}}}\n",
        result.case,
        match result.mode {
            DemoMode::InProcess => "in-process",
            DemoMode::OnGrid => "on-grid",
        },
        if result.converged { "converged" } else { "diverged" },
        result.iterations,
        sig9(result.alpha_root_rad.to_degrees()),
        sig9(result.tip_twist_rad().to_degrees()),
        sig9(result.tip_deflection_m()),
    )
}
