use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use isac_sim::config::{parse_comb_list, parse_scs_list, AllocScenario, RawConfig, SensingScenario, TableScenario};
use isac_sim::output::{self, fmt_sig};
use isac_sim::table::run_ambiguity_table;
use isac_sim::{presets, run_allocation, simulate};

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NO_DETECTION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "isac-sim",
    version,
    about = "PRS/DMRS bistatic sensing and PRS/PDSCH allocation runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the `seed` key of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate, propagate and estimate one frame.
    Simulate {
        /// Config file path or preset name.
        config: String,
    },
    /// Print the ghost spacing for each subcarrier spacing and comb.
    AmbiguityTable {
        /// Subcarrier spacings in kHz, e.g. `15,120`.
        #[arg(long)]
        scs: Option<String>,
        /// PRS comb sizes, e.g. `2,4`.
        #[arg(long)]
        comb: Option<String>,
        /// Config file path or preset name supplying `table.*` keys.
        #[arg(long)]
        config: Option<String>,
    },
    /// Split PRBs and slots between communication and sensing.
    Allocate {
        /// Config file path or preset name.
        config: String,
    },
}

enum Failure {
    Io(String),
    Config(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => EXIT_IO,
            Failure::Config(_) => EXIT_CONFIG,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn load(source: &str, seed: Option<u64>) -> Result<RawConfig, Failure> {
    let path = Path::new(source);
    let text = if path.exists() {
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{source}: {e}")))?
    } else if let Some(text) = presets::lookup(source) {
        text.to_string()
    } else {
        return Err(Failure::Io(format!("{source}: no such file or preset")));
    };
    let mut raw = RawConfig::parse(&text).map_err(|e| Failure::Config(format!("{source}: {e}")))?;
    if let Some(seed) = seed {
        raw.set("seed", seed.to_string());
    }
    Ok(raw)
}

fn write(dir: &Path, files: &[(&str, String)]) -> Result<(), Failure> {
    output::write_files(dir, files).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))
}

fn simulate(cli: &Cli, source: &str) -> Result<u8, Failure> {
    let scenario =
        SensingScenario::from_raw(load(source, cli.seed)?).map_err(|e| Failure::Config(format!("{source}: {e}")))?;
    if !cli.quiet {
        for w in &scenario.warnings {
            eprintln!("warning: {w}");
        }
    }
    let report = simulate::run_sensing(&scenario).map_err(config_err)?;
    write(&cli.out, &output::sensing_files(&report, scenario.numerology.fc_hz()))?;
    if report.detections.is_empty() {
        if !cli.quiet {
            eprintln!("no detections above threshold");
        }
        return Ok(EXIT_NO_DETECTION);
    }
    if !cli.quiet {
        println!("{} ({} detections)", report.algorithm, report.detections.len());
        for d in &report.detections {
            println!(
                "  range {} m, velocity {} m/s, peak {}",
                fmt_sig(d.bistatic_range_m),
                fmt_sig(d.velocity_mps),
                fmt_sig(d.peak_magnitude)
            );
        }
    }
    Ok(0)
}

fn ambiguity_table(cli: &Cli, scs: Option<&str>, comb: Option<&str>, config: Option<&str>) -> Result<u8, Failure> {
    let mut scenario = match config {
        Some(source) => {
            let raw = load(source, None)?;
            TableScenario::from_raw(raw).map_err(|e| Failure::Config(format!("{source}: {e}")))?
        }
        None => TableScenario::default(),
    };
    if let Some(s) = scs {
        scenario.scs_khz = parse_scs_list(s).map_err(|e| Failure::Config(format!("--scs: {e}")))?;
    }
    if let Some(c) = comb {
        scenario.combs = parse_comb_list(c).map_err(|e| Failure::Config(format!("--comb: {e}")))?;
    }
    let table = run_ambiguity_table(&scenario).map_err(config_err)?;
    let text = output::ambiguity_table_txt(&table);
    write(&cli.out, &[("ambiguity_table.csv", text.clone())])?;
    if !cli.quiet {
        print!("{text}");
    }
    Ok(0)
}

fn allocate(cli: &Cli, source: &str) -> Result<u8, Failure> {
    let scenario =
        AllocScenario::from_raw(load(source, cli.seed)?).map_err(|e| Failure::Config(format!("{source}: {e}")))?;
    let report = run_allocation(&scenario).map_err(config_err)?;
    let mut files = vec![("optimum.txt", output::optimum_txt(&report.plan))];
    if let Some(surface) = &report.surface {
        files.push(("surface.csv", output::surface_csv(surface)));
    }
    write(&cli.out, &files)?;
    if !cli.quiet {
        print!("{}", files[0].1);
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { config } => simulate(&cli, config),
        Command::AmbiguityTable { scs, comb, config } => {
            ambiguity_table(&cli, scs.as_deref(), comb.as_deref(), config.as_deref())
        }
        Command::Allocate { config } => allocate(&cli, config),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            match &f {
                Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Config(m) => eprintln!("config error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
