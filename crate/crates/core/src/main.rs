use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use knotstrata::chord::{
    boundary, boundary_chain, enumerate_cells, example1_equation, example2_equations,
    homology_table, principal_part_five_cells, principal_part_two_cells, verify_cycle,
};
use knotstrata::cocycle::{evaluate, ClassId, Evaluation};
use knotstrata::gauss::{evaluate_formula, formula_by_name, parse_formula, parse_gauss, project_to_diagram};
use knotstrata::io::{read_curve, write_results, FamilyJson, RunConfig, RunRecord};
use knotstrata::scenarios::SCENARIOS;
use knotstrata::{selftest, Error, Result};

#[derive(Parser)]
#[command(name = "knotstrata", version, about = "Evaluate finite-type cohomology classes of knot spaces on families of knots")]
struct Cli {
    /// Run configuration (JSON); defaults apply to missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count stratum intersections of a family and report the class value.
    EvalCocycle {
        #[arg(long)]
        class: ClassId,
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        /// Directory for result.json, events.jsonl and summary.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate an arrow-diagram formula on a Gauss code.
    EvalInvariant {
        /// `v2`, `v3`, a formula file, or formula text.
        #[arg(long)]
        formula: String,
        #[arg(long)]
        gauss: PathBuf,
    },
    /// Gauss diagrams of curves.
    Diagram {
        #[command(subcommand)]
        cmd: DiagramCmd,
    },
    /// Check the chord-diagram chain complex of a given complexity.
    VerifyChains {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=3))]
        p: u8,
    },
    /// Named families.
    Scenario {
        #[command(subcommand)]
        cmd: ScenarioCmd,
    },
    /// Run the acceptance suite.
    Selftest,
}

#[derive(Subcommand)]
enum DiagramCmd {
    /// Print the Gauss code of a curve's projection.
    Extract {
        #[arg(long)]
        curve: PathBuf,
    },
}

#[derive(Subcommand)]
enum ScenarioCmd {
    /// Evaluate a scenario against its class.
    Run {
        name: String,
        /// Scenario parameters as JSON.
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    List,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn report(ev: &Evaluation, input: &str) {
    println!("class {}, n = {}, {input}", ev.class, ev.n);
    for s in &ev.strata {
        println!(
            "  {}: {} events, multiplicity {}, signed {}",
            s.name,
            s.events.len(),
            s.total(),
            s.count_signed
        );
    }
    let parts: Vec<String> = ev.strata.iter().map(|s| format!("{}={}", s.name, s.total())).collect();
    println!("value mod 2 = {}", ev.total_mod2);
    println!("|value|={} ({})", ev.total_signed.abs(), parts.join(", "));
    let d = &ev.diagnostics;
    if d.frames > 0 {
        println!(
            "  frames {}, triple points {}, tangencies {}, alignments {}",
            d.frames, d.triple_points, d.tangencies, d.alignments
        );
    }
    if let Some(cc) = &d.cross_check {
        let counts: Vec<String> = cc.counts.iter().map(|(n, c)| format!("{n}={c}")).collect();
        println!(
            "  Newton cross-check: {} ({})",
            if cc.agree { "agrees" } else { "DISAGREES" },
            counts.join(", ")
        );
    }
}

fn run_eval(spec: &FamilyJson, class: ClassId, n: Option<usize>, cfg: &RunConfig, out: Option<&Path>) -> Result<()> {
    let fam = spec.build()?;
    if let Some(n) = n {
        if fam.cycle.n() != n {
            return Err(Error::Dimension(format!(
                "--n {n} but the family lives in ℝ^{}",
                fam.cycle.n()
            )));
        }
    }
    let ev = evaluate(class, fam.cycle.as_ref(), &cfg.eval)?;
    report(&ev, &spec.describe());
    let rec = RunRecord::new(spec, cfg, ev)?;
    if let Some(dir) = out.or(cfg.out_dir.as_deref()) {
        let paths = write_results(&rec, dir)?;
        println!("wrote {}", paths.record.display());
    }
    println!("input hash {}", rec.input_hash);
    Ok(())
}

fn verify_chains(p: usize) -> Result<bool> {
    let mut ok = true;
    if p == 1 {
        let (chord, star) = example1_equation();
        let holds = boundary(&chord) == star;
        println!("∂({chord}) = {} : {}", boundary(&chord), if holds { "ok" } else { "FAILED" });
        ok &= holds;
    }
    if p == 2 {
        let eqs = example2_equations();
        let good = eqs.iter().filter(|(c, b)| boundary(c) == *b).count();
        println!("complexity-2 boundary equations: {good}/{} reproduced", eqs.len());
        ok &= good == eqs.len();
    }
    if p == 3 {
        for (name, chain) in [("two-cell", principal_part_two_cells()), ("five-cell", principal_part_five_cells())] {
            let c = verify_cycle(&chain);
            println!("{name} principal part is a cycle: {c}");
            ok &= c;
        }
    }
    let cells = enumerate_cells(p, None)?;
    let bad = cells.iter().filter(|c| !boundary_chain(&boundary(c)).is_zero()).count();
    println!("∂∂ = 0 on all {} cells: {}", cells.len(), bad == 0);
    ok &= bad == 0;
    for row in homology_table(p)? {
        println!("  degree {:>2}: {:>4} cells, homology rank {}", row.degree, row.cells, row.rank);
    }
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool> {
    knotstrata::init_threads();
    let cfg = load_config(cli.config.as_deref())?;
    match cli.cmd {
        Cmd::EvalCocycle { class, family, n, out } => {
            let text = std::fs::read_to_string(&family)?;
            let spec: FamilyJson = serde_json::from_str(&text)?;
            run_eval(&spec, class, n, &cfg, out.as_deref())?;
            Ok(true)
        }
        Cmd::EvalInvariant { formula, gauss } => {
            let f = match Path::new(&formula).is_file() {
                true => parse_formula(&std::fs::read_to_string(&formula)?)?,
                false => formula_by_name(&formula)?,
            };
            let g = parse_gauss(&std::fs::read_to_string(&gauss)?)?;
            println!("{}", evaluate_formula(&f, &g)?);
            Ok(true)
        }
        Cmd::Diagram { cmd: DiagramCmd::Extract { curve } } => {
            let c = read_curve(&curve)?;
            println!("{}", project_to_diagram(&c)?);
            Ok(true)
        }
        Cmd::VerifyChains { p } => verify_chains(p as usize),
        Cmd::Scenario { cmd: ScenarioCmd::List } => {
            for s in SCENARIOS {
                println!("{s}");
            }
            Ok(true)
        }
        Cmd::Scenario { cmd: ScenarioCmd::Run { name, params, out } } => {
            let params = match params {
                Some(p) => serde_json::from_str(&p)?,
                None => serde_json::Value::Null,
            };
            let spec = FamilyJson::Scenario { scenario: name, params };
            let class = spec.build()?.class.expect("scenarios carry a class");
            run_eval(&spec, class, None, &cfg, out.as_deref())?;
            Ok(true)
        }
        Cmd::Selftest => {
            let results = selftest::run_all();
            for r in &results {
                println!("{r}");
            }
            Ok(results.iter().all(|r| r.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
