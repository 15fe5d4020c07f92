use clap::{Parser, Subcommand};
use qalg::cli_report::{
    emit_report, parse_config, probe_ordering, probe_rows_csv, run_suites, specfun_eval, Format, GridSpec, SuiteName,
    ToolkitConfig,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qalg", version, about = "Residual checks for the scaling-limit sl2 algebra")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite and emit a report
    Verify {
        /// specfun, rmatrix, evalrep, riemann, freefield, ordering or all
        suite: String,
        #[arg(long, allow_negative_numbers = true)]
        hbar: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        eta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        #[arg(long)]
        trunc: Option<usize>,
        /// per-check gate override, NAME=F (repeatable)
        #[arg(long = "tol")]
        tol: Vec<String>,
        /// sweep grid A:B:N
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = ["json", "csv"])]
        format: Option<String>,
        /// key=value config file; flags override it
        #[arg(long)]
        config: Option<PathBuf>,
        /// record wall-clock time per check
        #[arg(long)]
        timing: bool,
    },
    /// Parameter scans
    Probe {
        #[command(subcommand)]
        what: ProbeCmd,
    },
    /// Evaluate special functions
    Specfun {
        #[command(subcommand)]
        what: SpecfunCmd,
    },
}

#[derive(Subcommand)]
enum ProbeCmd {
    /// sup|phi_hat| and resummation agreement over an (hbar, eta) grid
    Ordering {
        #[arg(long = "hbar-range", default_value = "0.1:0.5:5")]
        hbar_range: String,
        #[arg(long = "eta-range", default_value = "0.4:1.0:4")]
        eta_range: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SpecfunCmd {
    Eval {
        /// gamma, gamma2 or b22
        #[arg(long = "fn")]
        func: String,
        /// gamma: re [im]; gamma2: x_re x_im w1 w2; b22: x w1 w2
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        args: Vec<f64>,
    },
}

fn run(cli: Cli) -> qalg::Result<bool> {
    match cli.cmd {
        Cmd::Verify { suite, hbar, eta, c, trunc, tol, grid, out, format, config, timing } => {
            let suite: SuiteName = suite.parse()?;
            let mut cfg = match config {
                Some(path) => parse_config(&path)?,
                None => ToolkitConfig::default(),
            };
            if let Some(v) = hbar {
                cfg.hbar = v;
            }
            if let Some(v) = eta {
                cfg.eta = v;
            }
            if c.is_some() {
                cfg.c = c;
            }
            if let Some(v) = trunc {
                cfg.trunc = v;
            }
            for t in &tol {
                cfg.set_tol(t)?;
            }
            if let Some(g) = grid {
                cfg.grid = g.parse()?;
            }
            if out.is_some() {
                cfg.out_path = out;
            }
            if let Some(f) = format {
                cfg.format = f.parse::<Format>()?;
            }
            cfg.timing |= timing;
            cfg.validate()?;
            let reports = run_suites(suite, &cfg)?;
            emit_report(&reports, &cfg)?;
            Ok(reports.iter().all(|r| r.overall_pass))
        }
        Cmd::Probe { what: ProbeCmd::Ordering { hbar_range, eta_range, out } } => {
            let h: GridSpec = hbar_range.parse()?;
            let e: GridSpec = eta_range.parse()?;
            let text = probe_rows_csv(&probe_ordering(h, e));
            match out {
                Some(p) => std::fs::write(&p, text).map_err(|e| qalg::QalgError::Io(e.to_string()))?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Cmd::Specfun { what: SpecfunCmd::Eval { func, args } } => {
            let v = specfun_eval(&func, &args)?;
            println!("{:.16e} {:+.16e}i", v.re, v.im);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ qalg::QalgError::Config(_)) => {
            eprintln!("qalg: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("qalg: {e}");
            ExitCode::from(1)
        }
    }
}
