use std::path::{Path, PathBuf};
use std::time::Instant;

use sfa_core::band::{
    extract_band, inst_phase, merge_band, phase_difference, plv, weighted_reconstruct, BandCenter,
    BandComponent,
};
use sfa_core::io::{self, RunManifest};
use sfa_core::metrics::relative_rmse;
use sfa_core::solver::SolverConfig;
use sfa_core::synth::{example1_preset, example3_preset, gen_example1, gen_example3};
use sfa_core::tvd::tvd;
use sfa_core::{solve, spectrum, FrequencyGrid, ProblemKind, SfaError, Signal};

use crate::{
    AnalyzeArgs, BandArgs, Center, Cli, CliError, Command, GridKind, Mode, PhasediffArgs, Preset,
    SynthArgs, TvdArgs,
};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<()> {
    let started = Instant::now();
    let mut manifest = RunManifest {
        command: String::new(),
        args: std::env::args().skip(1).collect(),
        inputs: Vec::new(),
        outputs: Vec::new(),
        config: None,
        threads: rayon::current_num_threads(),
        wall_clock_s: 0.0,
        info: None,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let (manifest_path, outcome) = match &cli.command {
        Command::Synth(a) => ("synth", sibling(&a.out), synth(a, &mut manifest)),
        Command::Analyze(a) => ("analyze", a.out.join("manifest.json"), analyze(a, &mut manifest)),
        Command::Band(a) => ("band", sibling(&a.out), band(a, &mut manifest)),
        Command::Phasediff(a) => ("phasediff", sibling(&a.out), phasediff(a, &mut manifest)),
        Command::Tvd(a) => ("tvd", sibling(&a.out), tvd_cmd(a, &mut manifest)),
    }
    .pipe(|(name, path, r)| {
        manifest.command = name.to_string();
        (path, r)
    });
    // Usage/config/input failures produce no outputs and no manifest.
    if outcome.is_ok() || matches!(outcome, Err(CliError::NotConverged(_))) {
        manifest.wall_clock_s = started.elapsed().as_secs_f64();
        manifest.write(&manifest_path)?;
    }
    outcome
}

trait Pipe: Sized {
    fn pipe<R>(self, f: impl FnOnce(Self) -> R) -> R {
        f(self)
    }
}
impl<T> Pipe for T {}

fn sibling(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn show(p: &Path) -> String {
    p.display().to_string()
}

fn synth(a: &SynthArgs, m: &mut RunManifest) -> Result<()> {
    let (signal, names, columns) = match a.preset {
        Preset::Example1 => {
            if a.seed.is_some() {
                return Err(CliError::Usage("example1 has no noise; --seed does not apply".into()));
            }
            let js = gen_example1()?;
            let names = (1..=js.components.len()).map(|i| format!("x{i}")).collect();
            (js.signal, names, js.components)
        }
        Preset::Example3 => {
            let e = gen_example3(a.seed.unwrap_or(example3_preset().default_seed))?;
            (e.y, vec!["r".to_string()], vec![e.truth.into_samples()])
        }
    };
    io::write_signal_csv(&a.out, &signal)?;
    m.outputs.push(show(&a.out));
    if let Some(path) = &a.truth {
        let mut text = format!("n,{}\n", names.join(","));
        for n in 0..signal.len() {
            let row: Vec<String> = columns.iter().map(|c| io::fmt_real(c[n])).collect();
            text.push_str(&format!("{n},{}\n", row.join(",")));
        }
        io::write_text(path, &text)?;
        m.outputs.push(show(path));
    }
    Ok(())
}

struct Plan {
    cfg: SolverConfig,
    grid: FrequencyGrid,
    problem: ProblemKind,
}

fn plan(a: &AnalyzeArgs, x: &Signal) -> Result<Plan> {
    let (mut cfg, mut k, mut problem) = (SolverConfig::default(), x.len(), ProblemKind::P0);
    match a.preset {
        Some(Preset::Example1) => {
            let p = example1_preset();
            (cfg, k) = (p.solver, p.grid_size);
        }
        Some(Preset::Example3) => {
            let p = example3_preset();
            (cfg, k, problem) = (p.solver, p.grid_size, ProblemKind::P1);
        }
        None => {}
    }
    if let Some(path) = &a.config {
        cfg = SolverConfig::from_json(&io::read_text(path)?).map_err(|e| match e {
            SfaError::Json(j) => SfaError::Config {
                field: "config",
                reason: format!("{}: {j}", path.display()),
            },
            other => other,
        })?;
    }
    cfg.validate()?;
    if let Some(mode) = a.mode {
        problem = match mode {
            Mode::P0 => ProblemKind::P0,
            Mode::P1 => ProblemKind::P1,
        };
    }
    let k = a.freqs.unwrap_or(k);
    let grid = match a.grid.unwrap_or(GridKind::Half) {
        GridKind::Half => FrequencyGrid::half(k),
        GridKind::Full => FrequencyGrid::full(k),
    }?;
    Ok(Plan { cfg, grid, problem })
}

fn analyze(a: &AnalyzeArgs, m: &mut RunManifest) -> Result<()> {
    let x = io::read_signal_csv(&a.input)?;
    m.inputs.push(show(&a.input));
    if let Some(c) = &a.config {
        m.inputs.push(show(c));
    }
    let plan = plan(a, &x)?;
    m.config = Some(plan.cfg.clone());
    let report = solve(&x, &plan.grid, &plan.cfg, plan.problem)?;
    let d = &report.decomposition;
    for p in io::write_decomposition(&a.out, d, x.sample_rate())? {
        m.outputs.push(show(&p));
    }
    let spec_path = a.out.join("spectrum.csv");
    io::write_text(&spec_path, &io::spectrum_csv(&spectrum(d), &d.grid))?;
    let trace_path = a.out.join("trace.csv");
    io::write_text(&trace_path, &io::trace_csv(&report.trace))?;
    m.outputs.extend([show(&spec_path), show(&trace_path)]);
    m.info = d.info.clone();
    match &d.info {
        Some(info) if !info.converged => Err(CliError::NotConverged(format!(
            "no convergence after {} iterations: primal residual {:.3e} (target {:.3e}), last relative change {:.3e}",
            info.iterations,
            info.primal_residual,
            plan.cfg.tol_primal * ((d.len() * d.num_freqs()) as f64).sqrt(),
            report.trace.last().map_or(f64::NAN, |r| r.relative_change),
        ))),
        _ => Ok(()),
    }
}

fn parse_indices(s: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
    if parts.is_empty() {
        return Err(CliError::Usage("--indices is empty".into()));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| CliError::Usage(format!("--indices: {p:?} is not an index")))
        })
        .collect()
}

fn is_contiguous(s: &[usize]) -> bool {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.windows(2).all(|w| w[1] == w[0] + 1)
}

fn band(a: &BandArgs, m: &mut RunManifest) -> Result<()> {
    let indices = match (&a.indices, a.band_lo, a.band_hi) {
        (Some(s), _, _) => Some(parse_indices(s)?),
        (None, Some(lo), Some(hi)) if lo <= hi => Some((lo..=hi).collect()),
        (None, Some(lo), Some(hi)) => {
            return Err(CliError::Usage(format!("--band-lo {lo} exceeds --band-hi {hi}")))
        }
        _ => None,
    };
    if indices.is_none() && a.weights.is_none() {
        return Err(CliError::Usage("give --indices, --band-lo/--band-hi or --weights".into()));
    }
    let (d, meta) = io::read_decomposition(&a.decomp)?;
    m.inputs.push(show(&a.decomp));
    let bc = match (indices, &a.weights) {
        (Some(s), _) if is_contiguous(&s) => {
            let center = match a.center {
                Center::Grid if s.len() % 2 == 1 => BandCenter::GridPoint,
                _ => BandCenter::Midpoint,
            };
            merge_band(&d, &s, center)?
        }
        (Some(s), _) => extract_band(&d, &s)?,
        (None, Some(path)) => {
            let text = io::read_text(path)?;
            let h = text
                .lines()
                .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
                .map(|l| {
                    l.trim()
                        .parse::<f64>()
                        .map_err(|_| SfaError::Parse(format!("{}: bad weight {l:?}", path.display())))
                })
                .collect::<std::result::Result<Vec<f64>, _>>()?;
            m.inputs.push(show(path));
            let samples = weighted_reconstruct(&d, &h)?;
            let total: f64 = h.iter().map(|w| w.abs()).sum();
            let center_omega = if total > 0.0 {
                h.iter().enumerate().map(|(k, w)| w.abs() * d.grid.omega(k)).sum::<f64>() / total
            } else {
                0.0
            };
            BandComponent {
                samples,
                center_omega,
                am: None,
                bm: None,
                grid_indices: (0..h.len()).filter(|&k| h[k] != 0.0).collect(),
            }
        }
        (None, None) => unreachable!(),
    };
    let phase = if bc.am.is_some() { Some(inst_phase(&bc)?) } else { None };
    io::write_text(&a.out, &io::band_csv(&bc, phase.as_ref(), meta.sample_rate))?;
    m.outputs.push(show(&a.out));
    if let Some(path) = &a.truth {
        let truth = read_column(path, a.truth_column.as_deref())?;
        if truth.len() != bc.samples.len() {
            return Err(SfaError::LengthMismatch {
                expected: bc.samples.len(),
                got: truth.len(),
            }
            .into());
        }
        m.inputs.push(show(path));
        println!("relative_rmse={}", relative_rmse(&bc.samples, &truth));
    }
    Ok(())
}

fn read_column(path: &Path, name: Option<&str>) -> Result<Vec<f64>> {
    let text = io::read_text(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| SfaError::Parse(format!("{}: {e}", path.display())))?
        .clone();
    let col = match name {
        Some(n) => headers.iter().position(|h| h == n),
        None => headers.iter().position(|h| h != "n"),
    }
    .ok_or_else(|| SfaError::Parse(format!("{}: column not found", path.display())))?;
    reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| SfaError::Parse(format!("{}: {e}", path.display())))?;
            r.get(col)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| SfaError::Parse(format!("{}: bad value", path.display())).into())
        })
        .collect()
}

fn phasediff(a: &PhasediffArgs, m: &mut RunManifest) -> Result<()> {
    let (p1, rate) = io::parse_band_phase(&io::read_text(&a.band1)?)
        .map_err(|e| SfaError::Parse(format!("{}: {e}", a.band1.display())))?;
    let (p2, _) = io::parse_band_phase(&io::read_text(&a.band2)?)
        .map_err(|e| SfaError::Parse(format!("{}: {e}", a.band2.display())))?;
    m.inputs.extend([show(&a.band1), show(&a.band2)]);
    let delta = phase_difference(&p1, &p2)?;
    let lock = plv(&delta, a.plv_window)?;
    io::write_text(&a.out, &io::phasediff_csv(&delta, &lock, rate))?;
    m.outputs.push(show(&a.out));
    Ok(())
}

fn tvd_cmd(a: &TvdArgs, m: &mut RunManifest) -> Result<()> {
    if !(a.lam.is_finite() && a.lam >= 0.0) {
        return Err(SfaError::Config {
            field: "lam",
            reason: format!("must be nonnegative and finite, got {}", a.lam),
        }
        .into());
    }
    let x = io::read_signal_csv(&a.input)?;
    m.inputs.push(show(&a.input));
    let y = Signal::with_rate(tvd(x.samples(), a.lam), x.sample_rate())?;
    io::write_signal_csv(&a.out, &y)?;
    m.outputs.push(show(&a.out));
    Ok(())
}
