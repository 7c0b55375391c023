use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mvlab::dominance::{
    ecdf, fsd_test, mvc_test, necessary_screen, quadratic_dominance_test, ssd_test, tsd_test, DominanceVerdict,
    Order,
};
use mvlab::empirical::{
    build_deciles, cross_decile_analysis, load_returns, write_agreement_csv, write_agreement_markdown,
    write_decile_stats_csv, write_decile_stats_markdown,
};
use mvlab::simulation::{self, markdown_table, run_scenario, ScenarioReport, PAPER_SCALE};
use mvlab::utility::{approx_table_grid, approx_table_utilities, round_half_away, standard_panel, UtilityFamily, UtilitySpec};
use mvlab::{DiscreteLottery, Error, ErrorClass, Result};

mod manifest;

use manifest::RunManifest;

/// Scenario grid shipped with the tool (desk scale).
const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

#[derive(Parser, Debug)]
#[command(name = "mvlab", version, about = "Stochastic dominance and mean-variance agreement studies")]
struct Cli {
    /// Master seed (overrides the config file's top-level seed)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (or directory for `deciles`); stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Md,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Rule {
    Fsd,
    Ssd,
    Tsd,
    Mvc,
    Quad,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare two discrete lotteries given as `value,probability` CSV files
    Compare {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Rule::Fsd, Rule::Ssd, Rule::Tsd, Rule::Mvc, Rule::Quad])]
        rules: Vec<Rule>,
    },
    /// Utility values against their quadratic approximation around zero
    ApproxTable {
        /// Utility family (power, log, negexp, negpower); default is the classic three
        #[arg(long, requires = "param")]
        utility: Option<String>,
        #[arg(long)]
        param: Option<f64>,
        /// `start:stop:step` or a comma-separated list of returns
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Decimal places in the output
        #[arg(long, default_value_t = 4)]
        decimals: i32,
    },
    /// Run Monte Carlo scenarios from a TOML configuration
    Simulate {
        /// Scenario file; the shipped desk-scale grid when absent
        #[arg(long)]
        config: Option<PathBuf>,
        /// Run at the published scale instead of desk scale
        #[arg(long)]
        paper_scale: bool,
        /// Worker threads (results do not depend on this)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Skewness deciles and cross-decile agreement for a returns panel
    Deciles {
        returns: PathBuf,
        #[arg(long, default_value_t = 10)]
        deciles: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Compare { .. } => "compare",
            Command::ApproxTable { .. } => "approx-table",
            Command::Simulate { .. } => "simulate",
            Command::Deciles { .. } => "deciles",
        }
    }
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Usage => 2,
        ErrorClass::Ingestion => 3,
        ErrorClass::Generation => 4,
        ErrorClass::Domain => 5,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Compare { first, second, rules } => cmd_compare(cli, first, second, rules),
        Command::ApproxTable {
            utility,
            param,
            grid,
            decimals,
        } => cmd_approx_table(cli, utility.as_deref(), *param, grid.as_deref(), *decimals),
        Command::Simulate {
            config,
            paper_scale,
            threads,
        } => cmd_simulate(cli, config.as_deref(), *paper_scale, *threads),
        Command::Deciles { returns, deciles } => cmd_deciles(cli, returns, *deciles),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes a header and rows as CSV or Markdown, preceded by the manifest.
fn emit_table(out: &mut dyn Write, format: Format, manifest: &RunManifest, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    match format {
        Format::Csv => {
            manifest.write_comments(out, "# ")?;
            let mut w = csv::Writer::from_writer(&mut *out);
            let err = |e: csv::Error| Error::Io(io::Error::other(e.to_string()));
            w.write_record(header).map_err(err)?;
            for r in rows {
                w.write_record(r).map_err(err)?;
            }
            w.flush()?;
        }
        Format::Md => {
            manifest.write_comments(out, "- ")?;
            writeln!(out)?;
            markdown_table(header, rows, out)?;
        }
    }
    Ok(())
}

fn verdict_row(rule: &str, v: &DominanceVerdict) -> Vec<String> {
    vec![
        rule.to_string(),
        v.relation.to_string(),
        v.strict.to_string(),
        v.witness.map(|w| format!("{w}")).unwrap_or_default(),
    ]
}

fn cmd_compare(cli: &Cli, first: &Path, second: &Path, rules: &[Rule]) -> Result<()> {
    let a = DiscreteLottery::from_csv_path(first)?;
    let b = DiscreteLottery::from_csv_path(second)?;
    let (f, g) = (ecdf(&a), ecdf(&b));
    let mut rows = Vec::new();
    for rule in rules {
        let (name, verdict) = match rule {
            Rule::Fsd => ("fsd", fsd_test(&f, &g)),
            Rule::Ssd => ("ssd", ssd_test(&f, &g)),
            Rule::Tsd => ("tsd", tsd_test(&f, &g)),
            Rule::Mvc => ("mvc", mvc_test(&a.moments(), &b.moments())),
            Rule::Quad => ("quad", quadratic_dominance_test(&f, &g)?),
        };
        rows.push(verdict_row(name, &verdict));
    }
    for (label, order) in [("screen1", Order::First), ("screen2", Order::Second), ("screen3", Order::Third)] {
        for (direction, x, y) in [("first_over_second", &f, &g), ("second_over_first", &g, &f)] {
            let violated = necessary_screen(x, y, order);
            let status = if violated.is_empty() { "passed" } else { "violated" };
            let detail: Vec<&str> = violated.iter().map(|c| c.describe()).collect();
            rows.push(vec![
                format!("{label}:{direction}"),
                status.to_string(),
                String::new(),
                detail.join("; "),
            ]);
        }
    }
    let manifest = RunManifest::new(cli.command.name(), cli.seed, cli.out.as_deref())
        .with_input(first)
        .with_input(second);
    let header = ["rule", "verdict", "strict", "witness"].map(String::from);
    let mut out = open_output(cli.out.as_deref())?;
    emit_table(&mut *out, cli.format, &manifest, &header, &rows)?;
    out.flush()?;
    Ok(())
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Usage(format!("grid '{spec}' is neither start:stop:step nor a comma list"));
    if spec.contains(':') {
        let parts: Vec<f64> = spec
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        // integer stepping avoids accumulated drift; rounding drops float noise
        Ok((0..=n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect())
    } else {
        spec.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect()
    }
}

fn cmd_approx_table(cli: &Cli, utility: Option<&str>, param: Option<f64>, grid: Option<&str>, decimals: i32) -> Result<()> {
    let utilities: Vec<UtilitySpec> = match (utility, param) {
        (Some(name), Some(a)) => {
            let family: UtilityFamily = name.parse().map_err(|e: Error| Error::Usage(e.to_string()))?;
            vec![UtilitySpec::new(family, a).map_err(|e| Error::Usage(e.to_string()))?]
        }
        (None, None) => approx_table_utilities().to_vec(),
        _ => return Err(Error::Usage("--utility and --param go together".into())),
    };
    let grid = match grid {
        Some(g) => parse_grid(g)?,
        None => approx_table_grid(),
    };
    let tables = utilities
        .iter()
        .map(|u| u.approx_table(&grid))
        .collect::<Result<Vec<_>>>()?;
    let mut header = vec!["z".to_string()];
    for u in &utilities {
        header.push(format!("U[{}]", u.id()));
        header.push(format!("Q[{}]", u.id()));
    }
    let fmt = |x: f64| format!("{:.*}", decimals.max(0) as usize, round_half_away(x, decimals));
    let rows: Vec<Vec<String>> = grid
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let mut row = vec![format!("{z}")];
            for t in &tables {
                row.push(fmt(t[i].utility));
                row.push(fmt(t[i].approx));
            }
            row
        })
        .collect();
    let manifest = RunManifest::new(cli.command.name(), cli.seed, cli.out.as_deref());
    let mut out = open_output(cli.out.as_deref())?;
    emit_table(&mut *out, cli.format, &manifest, &header, &rows)?;
    out.flush()?;
    Ok(())
}

fn simulate_reports(config: &simulation::SimulationConfig) -> Result<Vec<ScenarioReport>> {
    let panel = standard_panel();
    config
        .scenarios
        .iter()
        .map(|spec| {
            log::info!("running scenario '{}'", spec.id);
            run_scenario(spec, &panel)
        })
        .collect()
}

fn cmd_simulate(cli: &Cli, config_path: Option<&Path>, paper_scale: bool, threads: Option<usize>) -> Result<()> {
    let mut config = match config_path {
        Some(p) => simulation::read_config(p)?,
        None => simulation::parse_config(DEFAULT_CONFIG)?,
    };
    if let Some(seed) = cli.seed {
        config = config.with_seed(seed);
    }
    if paper_scale {
        config = config.with_scale(PAPER_SCALE);
    }
    let reports = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Usage(e.to_string()))?
            .install(|| simulate_reports(&config))?,
        None => simulate_reports(&config)?,
    };
    let mut manifest = RunManifest::new(cli.command.name(), Some(config.seed), cli.out.as_deref());
    manifest = match config_path {
        Some(p) => manifest.with_config(p),
        None => manifest.with_config(Path::new("<built-in default>")),
    };
    if paper_scale {
        manifest = manifest.with_entry("scale", "paper");
    }
    let mut out = open_output(cli.out.as_deref())?;
    let entries = manifest.entries();
    match cli.format {
        Format::Csv => simulation::write_csv(&reports, &entries, &mut out)?,
        Format::Md => simulation::write_markdown(&reports, &entries, &mut out)?,
    }
    out.flush()?;
    let mut diagnostics = 0;
    for r in &reports {
        let worst = r
            .results
            .iter()
            .min_by(|a, b| a.success_pct.total_cmp(&b.success_pct))
            .expect("non-empty panel");
        eprintln!(
            "{:<24} pairs={:<5} regenerations={:<6} lowest={} {:.1}%",
            r.spec.id,
            r.n_pairs_run,
            r.n_regenerations,
            worst.utility.id(),
            worst.success_pct
        );
        for d in &r.diagnostics {
            diagnostics += 1;
            eprintln!(
                "  diagnostic: pair {} disagrees under {} (E1={:.6e}, E2={:.6e})",
                d.pair_index,
                d.utility.id(),
                d.expected_1,
                d.expected_2
            );
        }
    }
    if diagnostics > 0 {
        eprintln!("{diagnostics} disagreements under symmetric families");
    }
    Ok(())
}

fn cmd_deciles(cli: &Cli, returns: &Path, deciles: usize) -> Result<()> {
    let table = load_returns(returns)?;
    let assignment = build_deciles(&table, deciles)?;
    let agreement = cross_decile_analysis(&assignment, &table, &standard_panel())?;
    let manifest = RunManifest::new(cli.command.name(), cli.seed, cli.out.as_deref())
        .with_input(returns)
        .with_entry("deciles", &deciles.to_string());
    let ext = match cli.format {
        Format::Csv => "csv",
        Format::Md => "md",
    };
    let write_both = |stats: &mut dyn Write, agree: &mut dyn Write| -> Result<()> {
        match cli.format {
            Format::Csv => {
                manifest.write_comments(stats, "# ")?;
                write_decile_stats_csv(&assignment, &mut *stats)?;
                manifest.write_comments(agree, "# ")?;
                write_agreement_csv(&agreement, &mut *agree)?;
            }
            Format::Md => {
                manifest.write_comments(stats, "- ")?;
                writeln!(stats)?;
                write_decile_stats_markdown(&assignment, &mut *stats)?;
                manifest.write_comments(agree, "- ")?;
                writeln!(agree)?;
                write_agreement_markdown(&agreement, &mut *agree)?;
            }
        }
        Ok(())
    };
    match cli.out.as_deref() {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let mut stats = BufWriter::new(File::create(dir.join(format!("decile_stats.{ext}")))?);
            let mut agree = BufWriter::new(File::create(dir.join(format!("agreement.{ext}")))?);
            write_both(&mut stats, &mut agree)?;
            stats.flush()?;
            agree.flush()?;
        }
        None => {
            let mut stats = Vec::new();
            let mut agree = Vec::new();
            write_both(&mut stats, &mut agree)?;
            let mut out = io::stdout().lock();
            out.write_all(&stats)?;
            writeln!(out)?;
            out.write_all(&agree)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_specs() {
        assert_eq!(parse_grid("0").unwrap(), vec![0.0]);
        assert_eq!(parse_grid("-0.1, 0.2").unwrap(), vec![-0.1, 0.2]);
        let g = parse_grid("-0.6:1.0:0.1").unwrap();
        assert_eq!(g.len(), 17);
        assert_eq!(g[6], 0.0);
        assert_eq!(g[16], 1.0);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [ErrorClass::Usage, ErrorClass::Ingestion, ErrorClass::Generation, ErrorClass::Domain].map(exit_code);
        for (i, a) in codes.iter().enumerate() {
            assert_ne!(*a, 0);
            for b in &codes[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn default_config_parses() {
        let cfg = simulation::parse_config(DEFAULT_CONFIG).unwrap();
        assert_eq!(cfg.scenarios.len(), 15);
    }
}
