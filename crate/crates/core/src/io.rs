//! Run configuration, CSV output and the command-line driver.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cases::{build_case, convergence_study, self_convergence_study, CaseName, CaseSpec, ConvergenceTable, ErrorReport};
use crate::error::{Error, Result};
use crate::integrator::DtRule;
use crate::mesh::{FieldPair, Grid, Mode, SchemeConfig, VesselGeometry};

pub const MIN_CELLS: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: CaseName,
    pub n_cells: usize,
    pub mode: Mode,
    pub cf: f64,
    /// Empty means the case defaults.
    pub snapshots: Vec<f64>,
    pub t_end: Option<f64>,
    pub out_dir: PathBuf,
    pub dt_rule: Option<DtRule>,
}

impl RunConfig {
    pub fn new(case: CaseName, n_cells: usize) -> Self {
        RunConfig {
            case,
            n_cells,
            mode: Mode::WellBalanced,
            cf: 0.0,
            snapshots: Vec::new(),
            t_end: None,
            out_dir: PathBuf::from("."),
            dt_rule: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cells < MIN_CELLS {
            return Err(Error::Usage(format!("--cells must be at least {MIN_CELLS}, got {}", self.n_cells)));
        }
        if let Some(t) = self.t_end {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Usage(format!("invalid end time {t}")));
            }
        }
        if self.snapshots.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::Usage("snapshot times must be finite and >= 0".into()));
        }
        Ok(())
    }

    pub fn case_spec(&self) -> Result<CaseSpec> {
        build_case(self.case, self.cf)
    }

    /// End time: explicit, else the latest snapshot, else the case default.
    pub fn resolved_t_end(&self, spec: &CaseSpec) -> f64 {
        self.t_end
            .or_else(|| self.snapshots.iter().copied().reduce(f64::max))
            .unwrap_or(spec.t_end)
    }

    pub fn resolved_snapshots(&self, spec: &CaseSpec) -> Vec<f64> {
        let t_end = self.resolved_t_end(spec);
        let mut s = if self.snapshots.is_empty() {
            spec.snapshots.iter().copied().filter(|&t| t <= t_end).collect()
        } else {
            self.snapshots.clone()
        };
        if !s.contains(&t_end) {
            s.push(t_end);
        }
        s.sort_by(f64::total_cmp);
        s.dedup();
        s
    }
}

/// One row of a snapshot file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotRow {
    pub x: f64,
    pub a: f64,
    pub q: f64,
    pub r: f64,
    pub u: f64,
    pub a0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRecord {
    /// `key = value` header entries.
    pub meta: Vec<(String, String)>,
    pub rows: Vec<SnapshotRow>,
}

pub const SNAPSHOT_COLUMNS: &str = "x,A,Q,R,u,A0";

impl SnapshotRecord {
    pub fn from_state(state: &FieldPair, grid: &Grid, geom: &VesselGeometry, meta: Vec<(String, String)>) -> Self {
        let rows = grid
            .interior()
            .map(|i| {
                let (a, q) = (state.a[i], state.q[i]);
                SnapshotRow {
                    x: grid.storage_x(i),
                    a,
                    q,
                    r: (a / std::f64::consts::PI).sqrt(),
                    u: q / a,
                    a0: geom.a0[i],
                }
            })
            .collect();
        SnapshotRecord { meta, rows }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k} = {v}");
        }
        let _ = writeln!(s, "{SNAPSHOT_COLUMNS}");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.x, r.a, r.q, r.r, r.u, r.a0
            );
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut meta = Vec::new();
        let mut rows = Vec::new();
        let mut seen_header = false;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    meta.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            if !seen_header {
                if line != SNAPSHOT_COLUMNS {
                    return Err(Error::Config(format!("unexpected snapshot header '{line}'")));
                }
                seen_header = true;
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("line {}: {e}", ln + 1)))?;
            if vals.len() != 6 {
                return Err(Error::Config(format!("line {}: expected 6 columns, got {}", ln + 1, vals.len())));
            }
            rows.push(SnapshotRow {
                x: vals[0],
                a: vals[1],
                q: vals[2],
                r: vals[3],
                u: vals[4],
                a0: vals[5],
            });
        }
        Ok(SnapshotRecord { meta, rows })
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn write_snapshot(record: &SnapshotRecord, path: &Path) -> Result<()> {
    write_file(path, &record.to_csv())
}

pub fn read_snapshot(path: &Path) -> Result<SnapshotRecord> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SnapshotRecord::parse(&text)
}

fn fmt_order(o: Option<f64>) -> String {
    o.map(|v| format!("{v:.2}")).unwrap_or_default()
}

pub fn convergence_csv(table: &ConvergenceTable) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# case = {}", table.case);
    let _ = writeln!(s, "# t = {}", table.t);
    let _ = writeln!(s, "# dt_rule = {}", table.dt_rule);
    let _ = writeln!(s, "N,L1_A,order_A,L1_Q,order_Q");
    for r in &table.rows {
        let _ = writeln!(
            s,
            "{},{:.4e},{},{:.4e},{}",
            r.n_cells,
            r.l1_a,
            fmt_order(r.order_a),
            r.l1_q,
            fmt_order(r.order_q)
        );
    }
    s
}

pub fn write_convergence_table(table: &ConvergenceTable, path: &Path) -> Result<()> {
    if table.rows.len() < 2 {
        return Err(Error::Usage("a convergence table needs at least two levels".into()));
    }
    write_file(path, &convergence_csv(table))
}

pub fn snapshot_file_name(case: CaseName, n: usize, mode: Mode, t: f64) -> String {
    format!("{case}_N{n}_{mode}_t{t}.csv")
}

fn snapshot_meta(cfg: &RunConfig, spec: &CaseSpec, t: f64) -> Vec<(String, String)> {
    vec![
        ("case".into(), spec.name.to_string()),
        ("N".into(), cfg.n_cells.to_string()),
        ("t".into(), format!("{t}")),
        ("mode".into(), cfg.mode.to_string()),
        ("scheme".into(), "WENO5 finite difference, global LF split, SSP-RK3".into()),
        ("precision".into(), "double".into()),
        ("k".into(), format!("{}", spec.k)),
        ("rho".into(), format!("{}", spec.rho)),
        ("cf".into(), format!("{}", cfg.cf)),
    ]
}

/// Runs a case and returns the snapshot records at the resolved output times.
pub fn run_case(cfg: &RunConfig) -> Result<Vec<(f64, SnapshotRecord)>> {
    cfg.validate()?;
    let spec = cfg.case_spec()?;
    let config = SchemeConfig::with_mode(cfg.mode);
    let (mut solver, init) = spec.setup(cfg.n_cells, &config)?;
    if let Some(rule) = cfg.dt_rule {
        solver.dt_rule = rule;
    }
    let t_end = cfg.resolved_t_end(&spec);
    let times = cfg.resolved_snapshots(&spec);
    let mut out = Vec::new();
    solver.run_until(&init, 0.0, t_end, &times, |t, s| {
        let rec = SnapshotRecord::from_state(s, &solver.grid, &solver.geom, snapshot_meta(cfg, &spec, t));
        out.push((t, rec));
        Ok(())
    })?;
    Ok(out)
}

/// Result of the at-rest check.
#[derive(Debug, Clone, PartialEq)]
pub struct WbReport {
    pub mode: Mode,
    pub t: f64,
    pub steps: usize,
    pub errors: ErrorReport,
}

pub fn verify_well_balance(n_cells: usize, t_end: f64, mode: Mode) -> Result<(WbReport, SnapshotRecord)> {
    let spec = build_case(CaseName::EternalRest, 0.0)?;
    let (solver, init) = spec.setup(n_cells, &SchemeConfig::with_mode(mode))?;
    let out = solver.run_until(&init, 0.0, t_end, &[], |_, _| Ok(()))?;
    let errors = crate::cases::exact_error_report(&spec, &solver.grid, &out.state, out.t)
        .ok_or_else(|| Error::Internal("eternal rest has an exact solution".into()))?;
    let mut cfg = RunConfig::new(CaseName::EternalRest, n_cells);
    cfg.mode = mode;
    let rec = SnapshotRecord::from_state(&out.state, &solver.grid, &solver.geom, snapshot_meta(&cfg, &spec, out.t));
    Ok((
        WbReport {
            mode,
            t: out.t,
            steps: out.steps,
            errors,
        },
        rec,
    ))
}

#[derive(Debug, Parser)]
#[command(name = "bloodflow", version, about = "Well-balanced WENO solver for 1D arterial blood flow")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a benchmark and write CSV snapshots.
    Run(RunArgs),
    /// Grid-convergence study against the exact solution.
    Converge(ConvergeArgs),
    /// Check that the aneurism rest state is preserved.
    VerifyWb(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub case: String,
    #[arg(long)]
    pub cells: usize,
    #[arg(long, default_value = "wb")]
    pub mode: String,
    #[arg(long, default_value_t = 0.0)]
    pub cf: f64,
    /// Comma-separated output times.
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Vec<f64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub tend: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long, default_value = "wave")]
    pub case: String,
    #[arg(long, value_delimiter = ',', default_value = "25,50,100,200,400,800,1600")]
    pub levels: Vec<usize>,
    #[arg(long, default_value_t = 0.004)]
    pub time: f64,
    #[arg(long, default_value = "wb")]
    pub mode: String,
    /// `exact` (wave case only) or `self` (successive levels).
    #[arg(long, default_value = "exact")]
    pub reference: String,
    /// Bump shape of the wave case: `sine` or `gaussian`.
    #[arg(long, default_value = "sine")]
    pub profile: String,
    /// Directory for `convergence.csv`; stdout only if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    pub cells: usize,
    #[arg(long, default_value_t = 5.0)]
    pub tend: f64,
    #[arg(long, default_value = "wb")]
    pub mode: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    pub fn to_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::new(self.case.parse()?, self.cells);
        cfg.mode = self.mode.parse()?;
        cfg.cf = self.cf;
        cfg.snapshots = self.snapshots.clone();
        cfg.t_end = self.tend;
        cfg.out_dir = self.out.clone();
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `argv` (program name first) into a [`RunConfig`] for `run`.
pub fn parse_cli<I, T>(argv: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Usage(e.to_string()))?;
    match cli.command {
        Command::Run(a) => a.to_config(),
        _ => Err(Error::Usage("not a run command".into())),
    }
}

fn execute(cli: Cli, stdout: &mut dyn std::io::Write) -> Result<()> {
    let io_err = |e: std::io::Error| Error::io("<stdout>", e);
    match cli.command {
        Command::Run(args) => {
            let cfg = args.to_config()?;
            for (t, rec) in run_case(&cfg)? {
                let path = cfg.out_dir.join(snapshot_file_name(cfg.case, cfg.n_cells, cfg.mode, t));
                write_snapshot(&rec, &path)?;
                writeln!(stdout, "wrote {}", path.display()).map_err(io_err)?;
            }
        }
        Command::Converge(args) => {
            let case: CaseName = args.case.parse()?;
            if args.levels.iter().any(|&n| n < MIN_CELLS) {
                return Err(Error::Usage(format!("levels must be at least {MIN_CELLS}")));
            }
            let spec = build_case(case, 0.0)?.with_wave_profile(args.profile.parse()?);
            let config = SchemeConfig::with_mode(args.mode.parse()?);
            let table = match args.reference.as_str() {
                "exact" => {
                    if case != CaseName::Wave {
                        return Err(Error::Usage(format!("case {case} has no exact solution, use --reference self")));
                    }
                    convergence_study(&spec, &args.levels, args.time, &config)?
                }
                "self" => self_convergence_study(&spec, &args.levels, args.time, &config)?,
                other => return Err(Error::Usage(format!("unknown reference '{other}' (expected exact or self)"))),
            };
            let csv = convergence_csv(&table);
            stdout.write_all(csv.as_bytes()).map_err(io_err)?;
            if let Some(dir) = args.out {
                write_convergence_table(&table, &dir.join("convergence.csv"))?;
            }
        }
        Command::VerifyWb(args) => {
            if args.cells < MIN_CELLS {
                return Err(Error::Usage(format!("--cells must be at least {MIN_CELLS}")));
            }
            let mode: Mode = args.mode.parse()?;
            let (rep, rec) = verify_well_balance(args.cells, args.tend, mode)?;
            let e = &rep.errors;
            writeln!(
                stdout,
                "mode={} N={} t={} steps={}\nL1_A={:.3e} Linf_A={:.3e} L1_Q={:.3e} Linf_Q={:.3e}",
                rep.mode, e.n_cells, rep.t, rep.steps, e.a.l1, e.a.linf, e.q.l1, e.q.linf
            )
            .map_err(io_err)?;
            if let Some(dir) = args.out {
                let path = dir.join(snapshot_file_name(CaseName::EternalRest, args.cells, mode, rep.t));
                write_snapshot(&rec, &path)?;
            }
        }
    }
    Ok(())
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
