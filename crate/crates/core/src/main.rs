use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cbtc_sim::exec::Execution;
use cbtc_sim::export::{self, Format};
use cbtc_sim::harness::{self, ExperimentConfig};
use cbtc_sim::network::{
    connected_components, generate_random, max_power_graph, EdgeLabel, EdgeSet, Topology,
    TopologyJson,
};
use cbtc_sim::optimizations::{run_pipeline, OptStack, RemovalThreshold};
use cbtc_sim::reconfig::{self, BeaconPolicy, ReconfigConfig};
use cbtc_sim::{Error, Result};

#[derive(Parser)]
#[command(
    name = "cbtc",
    version,
    about = "Cone-based topology control simulator"
)]
struct Cli {
    /// Experiment config JSON; command-line flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random topology as JSON.
    Generate {
        #[command(flatten)]
        net: NetworkArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run CBTC and the selected optimizations on one topology.
    Run {
        #[command(flatten)]
        net: NetworkArgs,
        #[command(flatten)]
        pipe: PipelineArgs,
        /// Edge-set output format.
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Write the removal log CSV here.
        #[arg(long)]
        removal_log: Option<PathBuf>,
    },
    /// Reproduce the degree/radius table.
    Table1 {
        #[arg(long)]
        networks: Option<usize>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        growth: Option<f64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Per-network values as CSV.
        #[arg(long)]
        raw: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
    /// Check the counterexample constructions.
    Counterexample {
        #[arg(value_enum)]
        which: Construction,
        /// Write annotated DOT renderings into this directory.
        #[arg(long)]
        dot_dir: Option<PathBuf>,
    },
    /// Simulate beacons and reconfiguration over a timeline of changes.
    Reconfig {
        /// Timeline JSON (array of fail/move/add/loss events).
        timeline: PathBuf,
        #[command(flatten)]
        net: NetworkArgs,
        #[command(flatten)]
        pipe: PipelineArgs,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long, value_enum, default_value = "correct")]
        policy: Policy,
        /// Loss probability outside loss windows.
        #[arg(long, default_value_t = 0.0)]
        loss: f64,
        #[arg(long, default_value_t = 0.0)]
        duplicate: f64,
        /// JSON-lines trace output.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Final edge set as CSV.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Render a topology or one of its edge sets.
    Export {
        #[command(flatten)]
        net: NetworkArgs,
        #[command(flatten)]
        pipe: PipelineArgs,
        /// Edge set: g-r, n-alpha, e-alpha, n-alpha-s, e-alpha-s, e-alpha-minus, e-alpha-nr, final.
        #[arg(long, default_value = "final")]
        set: String,
        #[arg(long)]
        format: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Example1,
    Disconnect,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Correct,
    Shrunk,
}

#[derive(Args)]
struct NetworkArgs {
    /// Read the topology from JSON instead of generating one.
    #[arg(long)]
    topology: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    height: Option<f64>,
    #[arg(long)]
    range: Option<f64>,
    /// Power growth factor of the discovery schedule.
    #[arg(long)]
    growth: Option<f64>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Cone angle: radians, `<k>deg`, or a fraction of pi such as `5pi/6`.
    #[arg(long, default_value = "5pi/6", value_parser = parse_angle)]
    alpha: f64,
    /// Optimizations: shrink-back, asym, pairwise (repeat or join with `,`).
    #[arg(long = "opt", value_delimiter = ',')]
    opt: Vec<String>,
    #[arg(long, value_enum, default_value = "per-node")]
    threshold: Threshold,
}

#[derive(Clone, Copy, ValueEnum)]
enum Threshold {
    PerNode,
    Global,
}

impl PipelineArgs {
    fn stack(&self) -> Result<OptStack> {
        if self.opt.is_empty() {
            return Ok(OptStack::BASIC);
        }
        self.opt.join("+").parse()
    }

    fn threshold(&self) -> RemovalThreshold {
        match self.threshold {
            Threshold::PerNode => RemovalThreshold::PerNode,
            Threshold::Global => RemovalThreshold::Global,
        }
    }
}

fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let s = s
        .trim()
        .to_ascii_lowercase()
        .replace(['*', ' '], "")
        .replace('π', "pi");
    let bad = || format!("cannot parse angle '{s}'");
    if let Some(deg) = s.strip_suffix("deg") {
        return deg.parse::<f64>().map(f64::to_radians).map_err(|_| bad());
    }
    if let Some(i) = s.find("pi") {
        let num = match &s[..i] {
            "" => 1.0,
            k => k.parse::<f64>().map_err(|_| bad())?,
        };
        let den = match &s[i + 2..] {
            "" => 1.0,
            rest => rest
                .strip_prefix('/')
                .and_then(|d| d.parse::<f64>().ok())
                .ok_or_else(bad)?,
        };
        return Ok(num * PI / den);
    }
    s.parse().map_err(|_| bad())
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => Ok(serde_json::from_str(&fs::read_to_string(p)?)?),
        None => Ok(ExperimentConfig::default()),
    }
}

fn apply_network_args(cfg: &mut ExperimentConfig, a: &NetworkArgs) {
    if let Some(s) = a.seed {
        cfg.base_seed = s;
    }
    if let Some(n) = a.nodes {
        cfg.node_count = n;
    }
    if let Some(w) = a.width {
        cfg.bounds[0] = w;
    }
    if let Some(h) = a.height {
        cfg.bounds[1] = h;
    }
    if let Some(r) = a.range {
        cfg.model.max_range = r;
    }
    if let Some(g) = a.growth {
        cfg.model.growth_factor = g;
    }
}

fn topology(cfg: &ExperimentConfig, a: &NetworkArgs) -> Result<Topology> {
    cfg.model.validate()?;
    match &a.topology {
        Some(p) => {
            let json: TopologyJson = serde_json::from_str(&fs::read_to_string(p)?)?;
            Topology::from_json(&json, cfg.model)
        }
        None => generate_random(cfg.base_seed, cfg.node_count, cfg.bounds(), cfg.model),
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_edges(t: &Topology, e: &EdgeSet, format: Format, out: Option<&Path>) -> Result<()> {
    let mut w = sink(out)?;
    match format {
        Format::Csv => export::edge_set_csv(t, e, &mut w)?,
        Format::Dot => w.write_all(export::edge_set_dot(t, e, &BTreeMap::new())?.as_bytes())?,
        Format::Svg => w.write_all(export::edge_set_svg(t, e)?.as_bytes())?,
        Format::Json => {
            return Err(Error::Usage(
                "json exports topologies only; use csv, dot or svg for edge sets".into(),
            ))
        }
    }
    w.flush()?;
    Ok(())
}

fn components(e: &EdgeSet) -> Result<usize> {
    Ok(connected_components(e)?.len())
}

/// `Ok(true)` on success, `Ok(false)` when a checked claim failed.
fn dispatch(cli: Cli) -> Result<bool> {
    let mut cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Generate { net, out } => {
            apply_network_args(&mut cfg, &net);
            let t = topology(&cfg, &net)?;
            let mut w = sink(out.as_deref())?;
            w.write_all(export::topology_json(&t)?.as_bytes())?;
            w.flush()?;
        }
        Command::Run {
            net,
            pipe,
            format,
            out,
            removal_log,
        } => {
            apply_network_args(&mut cfg, &net);
            let format: Format = format.parse()?;
            let t = topology(&cfg, &net)?;
            let r = run_pipeline(&t, pipe.alpha, pipe.stack()?, pipe.threshold())?;
            let e = r.final_edges();
            eprintln!(
                "{}: {} nodes, {} edges, {} component(s) (G_R: {})",
                r.stack,
                t.len(),
                e.edge_count(),
                components(e)?,
                components(&max_power_graph(&t))?
            );
            write_edges(&t, e, format, out.as_deref())?;
            if let Some(p) = removal_log {
                export::removal_log_csv(&r.removal_log, File::create(p)?)?;
            }
        }
        Command::Table1 {
            networks,
            nodes,
            seed,
            growth,
            out,
            raw,
            sequential,
        } => {
            if let Some(n) = networks {
                cfg.network_count = n;
            }
            if let Some(n) = nodes {
                cfg.node_count = n;
            }
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            if let Some(g) = growth {
                cfg.model.growth_factor = g;
            }
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::default()
            };
            let rows = harness::run_table1_with(&cfg, exec)?;
            harness::write_table1_csv(&rows, sink(out.as_deref())?)?;
            if let Some(p) = raw {
                harness::write_raw_csv(&rows, File::create(p)?)?;
            }
        }
        Command::Counterexample { which, dot_dir } => {
            let mut report = harness::CounterexampleReport::default();
            match which {
                Construction::Example1 => {
                    harness::example1_checks(&mut report, cfg.model.max_range)?
                }
                Construction::Disconnect => {
                    harness::disconnect_checks(&mut report, cfg.model.max_range)?
                }
            }
            for c in &report.checks {
                println!(
                    "{} {} eps={:.6} alpha={:.6} {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.construction,
                    c.epsilon,
                    c.alpha,
                    c.claim
                );
            }
            if let Some(dir) = dot_dir {
                fs::create_dir_all(&dir)?;
                for (stem, dot) in &report.renderings {
                    fs::write(dir.join(format!("{stem}.dot")), dot)?;
                }
            }
            return Ok(report.all_passed());
        }
        Command::Reconfig {
            timeline,
            net,
            pipe,
            horizon,
            policy,
            loss,
            duplicate,
            trace,
            out,
        } => {
            apply_network_args(&mut cfg, &net);
            let t = topology(&cfg, &net)?;
            let events = reconfig::read_timeline(&fs::read_to_string(&timeline)?)?;
            let rc = ReconfigConfig {
                base_loss: loss,
                duplicate_probability: duplicate,
                seed: cfg.base_seed,
                policy: match policy {
                    Policy::Correct => BeaconPolicy::Correct,
                    Policy::Shrunk => BeaconPolicy::ShrunkPower,
                },
                threshold: pipe.threshold(),
                ..ReconfigConfig::default()
            };
            let last = events.iter().map(|e| e.time()).fold(0.0, f64::max);
            let horizon = horizon.unwrap_or(last + 10.0 * rc.tau());
            let outcome =
                reconfig::run_reconfig_sim(&t, pipe.alpha, pipe.stack()?, &events, horizon, rc)?;
            if let Some(p) = trace {
                reconfig::write_trace_jsonl(&outcome.trace, BufWriter::new(File::create(p)?))?;
            }
            if let Some(p) = out {
                export::edge_set_csv(
                    &outcome.final_topology,
                    &outcome.final_edges,
                    File::create(p)?,
                )?;
            }
            let got = components(&outcome.final_edges)?;
            let want = components(&max_power_graph(&outcome.final_topology))?;
            println!(
                "horizon={horizon} nodes={} edges={} components={got} g_r_components={want}",
                outcome.final_topology.len(),
                outcome.final_edges.edge_count()
            );
            return Ok(got == want);
        }
        Command::Export {
            net,
            pipe,
            set,
            format,
            out,
        } => {
            apply_network_args(&mut cfg, &net);
            let format: Format = format.parse()?;
            let t = topology(&cfg, &net)?;
            if format == Format::Json {
                let mut w = sink(out.as_deref())?;
                w.write_all(export::topology_json(&t)?.as_bytes())?;
                w.flush()?;
                return Ok(true);
            }
            if set == "g-r" {
                write_edges(&t, &max_power_graph(&t), format, out.as_deref())?;
                return Ok(true);
            }
            let r = run_pipeline(&t, pipe.alpha, pipe.stack()?, pipe.threshold())?;
            let e = match set.as_str() {
                "final" => Some(r.final_edges()),
                "n-alpha" => r.edge_set(EdgeLabel::NAlpha),
                "e-alpha" => r.edge_set(EdgeLabel::EAlpha),
                "n-alpha-s" => r.edge_set(EdgeLabel::NAlphaShrunk),
                "e-alpha-s" => r.edge_set(EdgeLabel::EAlphaShrunk),
                "e-alpha-minus" => r.edge_set(EdgeLabel::EAlphaMinus),
                "e-alpha-nr" => r.edge_set(EdgeLabel::EAlphaNonRedundant),
                other => return Err(Error::Usage(format!("unknown edge set '{other}'"))),
            }
            .ok_or_else(|| {
                Error::Usage(format!(
                    "edge set '{set}' is not produced by stack {}",
                    r.stack
                ))
            })?;
            write_edges(&t, e, format, out.as_deref())?;
        }
    }
    Ok(true)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_)
        | Error::Domain(_)
        | Error::OutOfRange(_)
        | Error::GuaranteeViolation { .. }
        | Error::DegenerateGeometry(_)
        | Error::InconclusiveStabilization(_)
        | Error::Json(_) => 2,
        Error::Pipeline { source, .. } => exit_code(source),
        _ => 1,
    }
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
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("cbtc: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("5pi/6").unwrap(), 5.0 * PI / 6.0);
        assert_eq!(parse_angle("2*pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("90deg").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
        assert!(parse_angle("pi/x").is_err());
        assert!(parse_angle("abc").is_err());
    }
}
