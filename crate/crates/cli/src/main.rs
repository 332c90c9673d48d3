mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pmeflights::analytic::{
    barenblatt_cf, barenblatt_constants, barenblatt_density, epd_density, m_from_n,
    pme_source_solution, EpdParams, FlightLaw, ModelParams,
};
use pmeflights::checks::{run_check, CheckOptions, CHECKS};
use pmeflights::flights::{flight_density, sample_flights, sample_sde_batch, telegraph_density, FlightSpec};
use pmeflights::fracepd::{fracepd_cf, fracepd_density, FracEpdParams};
use pmeflights::levy::{cauchy_density, sample_isotropic_stable_batch, StableIndex};
use pmeflights::pmefd::{grid_points, pme_evolve, source_on_grid, GridSpec};
use pmeflights::pseudo::{airy_kernel, compose_epd_pseudo, pseudo_kernel, rods_kernel};
use pmeflights::quad::OscillatoryQuadratureSpec;
use pmeflights::{rng, Error};
use serde_json::json;

use output::{emit, Cell, Format, Table};

/// Porous medium equation, random flights, EPD and pseudoprocess kernels.
#[derive(Parser, Debug)]
#[command(name = "pmeflights", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for Monte-Carlo batches. Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// key=value file mirroring the long flags; flags on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Barenblatt exponents and constants.
    Constants {
        #[arg(long, default_value_t = 2.0)]
        m: f64,
        #[arg(long, default_value_t = 1)]
        d: usize,
    },
    /// A density along the first axis on `nx` evenly spaced points.
    Density(DensityArgs),
    /// Characteristic function along the first axis.
    Cf(CfArgs),
    /// Endpoints of random flights.
    SimulateFlight(FlightArgs),
    /// Endpoints of the nonlinear Euler-Maruyama diffusion.
    SimulateSde {
        #[arg(long, default_value_t = 2.0)]
        m: f64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long = "N", alias = "samples", default_value_t = 10_000)]
        count: usize,
    },
    /// Isotropic stable vectors by subordinated Brownian motion.
    SimulateStable {
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long = "N", alias = "samples", default_value_t = 10_000)]
        count: usize,
    },
    /// Run a named check, or `all`.
    Verify(VerifyArgs),
    /// Evolve the source solution with the finite-volume scheme.
    PmeEvolve {
        #[arg(long, default_value_t = 2.0)]
        m: f64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Half-width (d = 1) or outer radius of the domain.
        #[arg(long, default_value_t = 5.0)]
        l: f64,
        #[arg(long, default_value_t = 500)]
        nx: usize,
        #[arg(long, default_value_t = 1.0)]
        t0: f64,
        #[arg(long, default_value_t = 2.0)]
        t1: f64,
        #[arg(long, default_value_t = 0.9)]
        cfl: f64,
    },
    /// Order-n heat-type kernel.
    Kernel {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[command(flatten)]
        grid: XGrid,
    },
    /// Order-n kernel composed with the 1-d EPD weight.
    Compose {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1.5)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[command(flatten)]
        grid: XGrid,
    },
}

#[derive(Args, Debug)]
struct XGrid {
    #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
    xmin: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    xmax: f64,
    #[arg(long, default_value_t = 81)]
    nx: usize,
}

impl XGrid {
    fn points(&self) -> Result<Vec<f64>, Error> {
        if self.nx == 0 || !(self.xmin <= self.xmax) {
            return Err(Error::Domain(format!(
                "need nx >= 1 and xmin <= xmax, got nx={} [{}, {}]",
                self.nx, self.xmin, self.xmax
            )));
        }
        if self.nx == 1 {
            return Ok(vec![self.xmin]);
        }
        let h = (self.xmax - self.xmin) / (self.nx - 1) as f64;
        Ok((0..self.nx).map(|i| self.xmin + i as f64 * h).collect())
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum DensityKind {
    Barenblatt,
    Source,
    Epd,
    Telegraph,
    Flight,
    Fracepd,
    Cauchy,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[arg(long, value_enum, default_value = "barenblatt")]
    kind: DensityKind,
    #[arg(long, default_value_t = 2.0)]
    m: f64,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 2.0)]
    nu: f64,
    /// Direction changes, for telegraph and flight densities.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, value_parser = parse_law, default_value = "f2")]
    law: FlightLaw,
    #[command(flatten)]
    grid: XGrid,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum CfKind {
    Barenblatt,
    Fracepd,
}

#[derive(Args, Debug)]
struct CfArgs {
    #[arg(long, value_enum, default_value = "barenblatt")]
    kind: CfKind,
    #[arg(long, default_value_t = 2.0)]
    m: f64,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 2.0)]
    nu: f64,
    #[arg(long, default_value_t = 10.0)]
    ximax: f64,
    #[arg(long, default_value_t = 101)]
    nxi: usize,
}

#[derive(Args, Debug)]
struct FlightArgs {
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, value_parser = parse_law, default_value = "f1")]
    law: FlightLaw,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Use the time-rescaled flight whose law is the Barenblatt density at `t`.
    #[arg(long)]
    rescaled: bool,
    #[arg(long = "N", alias = "samples", default_value_t = 10_000)]
    count: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Check name, or `all`.
    check: String,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = parse_law)]
    law: Option<FlightLaw>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long = "N", alias = "samples")]
    count: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    nx: Option<usize>,
}

fn parse_law(s: &str) -> Result<FlightLaw, String> {
    s.parse()
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_)
            | Error::Pole(_)
            | Error::InvalidSpec(_)
            | Error::Cfl { .. }
            | Error::NonUniformGrid(_)
            | Error::OutsideSupport(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

/// Appends `--key value` for every config entry whose flag is not already
/// on the command line.
fn merge_config(mut argv: Vec<String>) -> Result<Vec<String>, String> {
    let Some(pos) = argv.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(argv);
    };
    let path = match argv[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => argv.get(pos + 1).cloned().ok_or("--config needs a path")?,
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", lineno + 1))?;
        let flag = format!("--{}", key.trim());
        let given = argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if !given {
            argv.push(format!("{flag}={}", value.trim()));
        }
    }
    Ok(argv)
}

fn main() -> ExitCode {
    let argv = match merge_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rng::configure_threads(threads) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok((text, passed)) => {
            if let Err(e) = emit(&text, cli.out.as_deref()) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let seed = cli.seed;
    let table = match &cli.command {
        Command::Constants { m, d } => {
            let p = ModelParams::new(*m, *d)?;
            let k = barenblatt_constants(&p);
            let mut t = Table::new("constants", json!({ "m": m, "d": d }), None, &["m", "d", "alpha", "beta", "B", "C"]);
            t.rows.push(vec![Cell::F(*m), Cell::U(*d as u64), Cell::F(k.alpha), Cell::F(k.beta), Cell::F(k.b), Cell::F(k.c)]);
            if cli.format == Format::Json {
                let doc = json!({ "m": m, "d": d, "alpha": k.alpha, "beta": k.beta, "B": k.b, "C": k.c });
                return Ok((output::pretty(&doc), true));
            }
            t
        }
        Command::Density(a) => density(a)?,
        Command::Cf(a) => cf(a)?,
        Command::SimulateFlight(a) => {
            let spec = if a.rescaled {
                let m = m_from_n(a.d, a.n, a.law).ok_or_else(|| {
                    Failure::Usage(format!("no PME exponent for d={}, n={}, law {:?}", a.d, a.n, a.law))
                })?;
                FlightSpec::rescaled(a.n, a.law, &ModelParams::new(m, a.d)?, a.t)?
            } else {
                FlightSpec::new(a.n, a.d, a.law, a.c, a.t)?
            };
            let batch = sample_flights(&spec, a.count, seed)?;
            let params = json!({ "spec": spec, "rescaled": a.rescaled, "count": a.count });
            samples_table("simulate-flight", params, seed, &batch.positions, a.d)
        }
        Command::SimulateSde { m, d, t, steps, count } => {
            let p = ModelParams::new(*m, *d)?;
            let batch = sample_sde_batch(&p, *t, *steps, *count, seed)?;
            let params = json!({ "m": m, "d": d, "t": t, "steps": steps, "count": count });
            samples_table("simulate-sde", params, seed, &batch.positions, *d)
        }
        Command::SimulateStable { nu, d, t, count } => {
            let xs = sample_isotropic_stable_batch(StableIndex::new(*nu)?, *d, *t, *count, seed)?;
            let params = json!({ "nu": nu, "d": d, "t": t, "count": count });
            samples_table("simulate-stable", params, seed, &xs, *d)
        }
        Command::Verify(a) => return verify(a, seed, cli.format),
        Command::PmeEvolve { m, d, l, nx, t0, t1, cfl } => {
            let p = ModelParams::new(*m, *d)?;
            let g = GridSpec::new(*l, *nx, *t0, *t1, *cfl)?;
            let res = pme_evolve(&source_on_grid(&p, &g, *t0), &p, &g)?;
            let exact = source_on_grid(&p, &g, *t1);
            let params = json!({
                "m": m, "d": d, "l": l, "nx": nx, "t0": t0, "t1": t1, "cfl": cfl,
                "steps": res.steps, "initial_mass": res.initial_mass,
                "final_mass": res.final_mass, "clipped_mass": res.clipped_mass,
            });
            let mut t = Table::new("pme-evolve", params, None, &["x", "u", "exact"]);
            for ((x, u), e) in grid_points(*d, &g).iter().zip(&res.u).zip(&exact) {
                t.rows.push(vec![Cell::F(*x), Cell::F(*u), Cell::F(*e)]);
            }
            t
        }
        Command::Kernel { n, t, grid } => {
            let closed: Option<fn(f64, f64) -> pmeflights::Result<f64>> = match n {
                2 => Some(rods_kernel),
                3 => Some(airy_kernel),
                _ => None,
            };
            let mut cols = vec!["x", "value", "error"];
            if closed.is_some() {
                cols.push("closed_form");
            }
            let mut tab = Table::new("kernel", json!({ "n": n, "t": t }), None, &cols);
            for x in grid.points()? {
                let e = pseudo_kernel(x, *t, *n)?;
                let mut row = vec![Cell::F(x), Cell::F(e.value), Cell::F(e.error)];
                if let Some(f) = closed {
                    row.push(Cell::F(f(x, *t)?));
                }
                tab.rows.push(row);
            }
            tab
        }
        Command::Compose { n, t, lambda, c, grid } => {
            let params = json!({ "n": n, "t": t, "lambda": lambda, "c": c });
            let mut tab = Table::new("compose", params, None, &["x", "value", "error"]);
            for x in grid.points()? {
                let e = compose_epd_pseudo(x, *t, *lambda, *c, *n)?;
                tab.rows.push(vec![Cell::F(x), Cell::F(e.value), Cell::F(e.error)]);
            }
            tab
        }
    };
    Ok((table.render(cli.format), true))
}

fn samples_table(command: &'static str, params: serde_json::Value, seed: u64, xs: &[Vec<f64>], d: usize) -> Table {
    let mut cols = vec!["sample".to_string(), "seed".to_string()];
    cols.extend((1..=d).map(|k| format!("x{k}")));
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new(command, params, Some(seed), &col_refs);
    for (i, x) in xs.iter().enumerate() {
        let mut row = vec![Cell::U(i as u64), Cell::U(seed)];
        row.extend(x.iter().map(|v| Cell::F(*v)));
        t.rows.push(row);
    }
    t
}

fn on_axis(x: f64, d: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[0] = x;
    v
}

fn density(a: &DensityArgs) -> Result<Table, Failure> {
    let params = json!({
        "kind": format!("{:?}", a.kind).to_lowercase(), "m": a.m, "d": a.d, "t": a.t,
        "gamma": a.gamma, "c": a.c, "nu": a.nu, "n": a.n, "law": a.law,
    });
    if a.d == 0 {
        return Err(Failure::Usage("dimension must be at least 1".into()));
    }
    let mut tab = Table::new("density", params, None, &["x", "density"]);
    let quad = OscillatoryQuadratureSpec::default();
    for x in a.grid.points()? {
        let pt = on_axis(x, a.d);
        let v = match a.kind {
            DensityKind::Barenblatt => barenblatt_density(&pt, a.t, &ModelParams::new(a.m, a.d)?)?,
            DensityKind::Source => pme_source_solution(&pt, a.t, &ModelParams::new(a.m, a.d)?)?,
            DensityKind::Epd => epd_density(&pt, a.t, &EpdParams::new(a.gamma, a.c, a.d)?)?,
            DensityKind::Telegraph => telegraph_density(x, a.t, a.n, a.c)?,
            DensityKind::Flight => flight_density(&pt, &FlightSpec::new(a.n, a.d, a.law, a.c, a.t)?)?,
            DensityKind::Fracepd => {
                fracepd_density(&pt, a.t, &FracEpdParams::new(a.nu, a.gamma, a.c, a.d)?, &quad)?.value
            }
            DensityKind::Cauchy => cauchy_density(&pt, a.t, a.d)?,
        };
        tab.rows.push(vec![Cell::F(x), Cell::F(v)]);
    }
    Ok(tab)
}

fn cf(a: &CfArgs) -> Result<Table, Failure> {
    if a.nxi < 2 || !(a.ximax > 0.0) {
        return Err(Failure::Usage(format!("need nxi >= 2 and ximax > 0, got {} {}", a.nxi, a.ximax)));
    }
    let params = json!({
        "kind": format!("{:?}", a.kind).to_lowercase(), "m": a.m, "d": a.d, "t": a.t,
        "gamma": a.gamma, "c": a.c, "nu": a.nu,
    });
    let mut tab = Table::new("cf", params, None, &["xi", "cf"]);
    for i in 0..a.nxi {
        let xi = a.ximax * i as f64 / (a.nxi - 1) as f64;
        let v = match a.kind {
            CfKind::Barenblatt => barenblatt_cf(&on_axis(xi, a.d.max(1)), a.t, &ModelParams::new(a.m, a.d)?)?,
            CfKind::Fracepd => {
                fracepd_cf(&on_axis(xi, a.d.max(1)), a.t, &FracEpdParams::new(a.nu, a.gamma, a.c, a.d)?)?
            }
        };
        tab.rows.push(vec![Cell::F(xi), Cell::F(v)]);
    }
    Ok(tab)
}

fn verify(a: &VerifyArgs, seed: u64, format: Format) -> Result<(String, bool), Failure> {
    let opts = CheckOptions {
        m: a.m,
        d: a.d,
        n: a.n,
        law: a.law,
        t: a.t,
        nu: a.nu,
        gamma: a.gamma,
        samples: a.count,
        steps: a.steps,
        nx: a.nx,
        seed,
    };
    let names: Vec<&str> = if a.check == "all" {
        CHECKS.iter().map(|c| c.0).collect()
    } else {
        vec![a.check.as_str()]
    };
    let mut all = Vec::new();
    for name in names {
        all.extend(run_check(name, &opts)?);
    }
    let passed = all.iter().all(|r| r.pass);
    Ok((output::reports(&all, format), passed))
}
