use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sgn_cli::commands::{cmd_bench, cmd_converge, cmd_run, Bench, Overrides};
use sgn_cli::output::out_dir;
use sgn_cli::{CliError, Config};
use sgn_core::fem::Family;

#[derive(Parser)]
#[command(name = "sgn", version, about = "Serre-Green-Naghdi finite element solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Manufactured-solution refinement study.
    Converge {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma separated element counts, e.g. 80,160,320,640.
        #[arg(long, value_delimiter = ',')]
        elements: Option<Vec<usize>>,
        #[command(flatten)]
        common: Common,
    },
    /// Benchmarks: shoal35, wall, beach50, revere, runup-sweep.
    Bench {
        name: String,
        /// Amplitude (relative amplitude A/b0 for revere).
        amplitude: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    dx: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long, value_parser = parse_family)]
    family_h: Option<Family>,
    #[arg(long, value_parser = parse_family)]
    family_u: Option<Family>,
    #[arg(long, value_enum)]
    lumping: Option<Switch>,
    /// Repeat the run with adaptive RKF45 and report the difference.
    #[arg(long)]
    verify_rkf: bool,
    /// With `bench wall`: also run the mirrored head-on collision.
    #[arg(long)]
    collision_check: bool,
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: sgn_core::SgnError| e.to_string())
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            dt: self.dt,
            dx: self.dx,
            t_end: self.t_end,
            family_h: self.family_h,
            family_u: self.family_u,
            lumping: self.lumping.map(|s| matches!(s, Switch::On)),
            verify_rkf: self.verify_rkf,
            collision_check: self.collision_check,
        }
    }

    fn init_threads(&self) -> Result<(), CliError> {
        if let Some(k) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global()
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, common } => {
            common.init_threads()?;
            let cfg = Config::load(&config)?;
            let out = out_dir(common.out.as_deref(), cfg.out.as_deref());
            cmd_run(&cfg, &common.overrides(), &out)?;
            println!("outputs written to {}", out.display());
        }
        Command::Converge {
            config,
            elements,
            common,
        } => {
            common.init_threads()?;
            let cfg = config.as_deref().map(Config::load).transpose()?;
            let out = out_dir(common.out.as_deref(), cfg.as_ref().and_then(|c| c.out.as_deref()));
            cmd_converge(cfg.as_ref(), &common.overrides(), elements, &out)?;
            println!("table written to {}", out.join("table.csv").display());
        }
        Command::Bench { name, amplitude, common } => {
            common.init_threads()?;
            let bench: Bench = name.parse()?;
            let out = out_dir(common.out.as_deref(), None);
            cmd_bench(bench, amplitude, &common.overrides(), &out)?;
            println!("outputs written to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
