//! The `spl` command line: argument parsing, dispatch and report emission.
//!
//! Every command writes its tables, plots and a `manifest.json` under
//! `--out-dir` (falling back to `SPL_OUT_DIR`) and prints a short summary.
//! Exit codes: 0 on success, 2 for invalid input, 3 for numerical failure.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::disk::{negative_form_even, radial_partition_data, spectral_flow_odd};
use crate::io::{fmt_num, versions, OutputDir, RunConfig, RunManifest, SvgPlot, Table};
use crate::partition::{orient_interfaces, DomainShape, Partition};
use crate::plap::{assemble_plap, extract_nodal_partition, solve_eigs};
use crate::rect::{dtn_negative_profile_22, rect_spectral_position, solve_gamma_pair, AspectRatio};
use crate::search::rect::SlitGrid;
use crate::search::{disk_cut_search, rect_cut_search, DiskSearchOptions, RectSearchOptions, SearchReport};
use crate::variation::{arc_polynomial_basis, criticality, dtn_form_matrix, groundstate_data, hadamard_check, Family};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "spl", version, about = "Spectra of partition Laplacians on rectangles and disks")]
pub struct Cli {
    /// Directory receiving every output file.
    #[arg(long, env = "SPL_OUT_DIR", default_value = "spl-out", global = true)]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Solve the γ-system of the cross partition and sample the negative DtN profile.
    RectGamma {
        /// Aspect ratio, a decimal or a fraction such as 3/2.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Chebyshev samples per interface arc.
        #[arg(long, default_value_t = 33)]
        samples: usize,
    },
    /// Eigenvalue and spectral position of a rectangle mode.
    RectSpec {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, num_args = 2, value_names = ["M", "N"], default_values_t = [2u64, 2])]
        mode: Vec<u64>,
    },
    /// Energy, deficiency and negative directions of the radial k-partition.
    DiskRadial {
        #[arg(long)]
        k: usize,
    },
    /// Lowest eigenpairs of the partition Laplacian of a configured partition.
    PlapEig {
        #[arg(long)]
        config: PathBuf,
        /// Nodes per block direction (default: grid.n).
        #[arg(long)]
        n: Option<usize>,
        /// Eigenpairs to compute (default: grid.count).
        #[arg(long)]
        count: Option<usize>,
        /// 1-based eigenpair whose nodal set is extracted (default: the last).
        #[arg(long)]
        nodal: Option<usize>,
    },
    /// Gram matrix and index of the DtN form on a polynomial arc basis.
    HessianIndex {
        #[arg(long)]
        config: PathBuf,
        /// Basis functions per arc (default: basis.per_arc).
        #[arg(long)]
        basis: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Shape-derivative formulas against finite differences.
    HadCheck {
        /// rect-width, disk-dilation or cross-shear.
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1)]
        order: u8,
        #[arg(long, default_value_t = 12)]
        n: usize,
    },
    /// Search for a candidate minimal partition.
    CutSearch(CutSearchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    Disk,
    Rect,
}

#[derive(Debug, Args, Serialize)]
pub struct CutSearchArgs {
    #[arg(long, value_enum)]
    pub geometry: Geometry,
    /// Spectral-element nodes per block direction.
    #[arg(long)]
    pub n: Option<usize>,
    /// Acceptance tolerance of the matching residual.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Rectangle aspect ratio.
    #[arg(long, default_value_t = 1.5)]
    pub alpha: f64,
    /// Repeat on a refined grid and report the shift.
    #[arg(long)]
    pub refine: bool,
    /// Nodes per block of the full-disk check.
    #[arg(long)]
    pub plap_n: Option<usize>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            if matches!(e.kind(), ErrorKind::InvalidSubcommand | ErrorKind::MissingSubcommand) {
                eprintln!("\n{}", Cli::command().render_help());
            }
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// What a command hands back to the dispatcher.
struct Outcome {
    lines: Vec<String>,
    config: Option<serde_json::Value>,
    tolerances: Vec<(&'static str, f64)>,
}

impl Outcome {
    fn lines(lines: Vec<String>) -> Self {
        Outcome { lines, config: None, tolerances: Vec::new() }
    }
}

/// Runs a parsed command and writes its outputs; returns the summary lines.
pub fn execute(cli: &Cli) -> Result<Vec<String>> {
    let start = Instant::now();
    let mut out = OutputDir::create(&cli.out_dir)?;
    let outcome = match &cli.command {
        Command::RectGamma { alpha, samples } => rect_gamma(parse_alpha(alpha)?, *samples, &mut out)?,
        Command::RectSpec { alpha, mode } => rect_spec(parse_alpha(alpha)?, mode[0], mode[1], &mut out)?,
        Command::DiskRadial { k } => disk_radial(*k, &mut out)?,
        Command::PlapEig { config, n, count, nodal } => plap_eig(config, *n, *count, *nodal, &mut out)?,
        Command::HessianIndex { config, basis, n } => hessian_index(config, *basis, *n, &mut out)?,
        Command::HadCheck { family, order, n } => had_check(family, *order, *n, &mut out)?,
        Command::CutSearch(args) => cut_search(args, &mut out)?,
    };
    let arguments = serde_json::to_value(&cli.command).unwrap_or_default();
    let name = arguments.as_object().and_then(|m| m.keys().next().cloned()).unwrap_or_default();
    let manifest = RunManifest {
        command: name,
        arguments,
        config: outcome.config,
        versions: versions(),
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: Vec::new(),
        tolerances: outcome.tolerances.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
    };
    let path = out.finish(manifest)?;
    let mut lines = outcome.lines;
    lines.push(format!("manifest: {}", path.display()));
    Ok(lines)
}

/// `1.5`, `3/2` or any positive decimal; fractions keep comparisons exact.
pub fn parse_alpha(s: &str) -> Result<AspectRatio> {
    let bad = || Error::Domain(format!("cannot read aspect ratio '{s}'"));
    let ar = match s.split_once('/') {
        Some((p, q)) => {
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            let q: u64 = q.trim().parse().map_err(|_| bad())?;
            if p == 0 || q == 0 {
                return Err(bad());
            }
            AspectRatio::rational(p, q)
        }
        None => {
            let a: f64 = s.trim().parse().map_err(|_| bad())?;
            if !(a.is_finite() && a > 0.0) {
                return Err(bad());
            }
            AspectRatio::real(a)
        }
    };
    Ok(ar)
}

fn rect_gamma(ar: AspectRatio, samples: usize, out: &mut OutputDir) -> Result<Outcome> {
    let g = solve_gamma_pair(ar)?;
    let prof = dtn_negative_profile_22(ar, samples)?;
    out.csv(
        "gamma.csv",
        &Table::key_values([
            ("alpha", g.alpha.into()),
            ("gamma1", g.gamma1.into()),
            ("gamma2", g.gamma2.into()),
            ("sigma_bar", g.sigma_bar.into()),
            ("constraint_residual", g.constraint_residual.into()),
            ("matching_residual", g.matching_residual.into()),
        ]),
    )?;
    let mut profile = Table::new(&["arc", "t", "x", "y", "value"]);
    let mut plot = SvgPlot::for_domain(&prof.partition.domain);
    for (arc, s) in prof.field.arcs.iter().enumerate() {
        let seg = prof.partition.interfaces[arc].geometry;
        let pts: Vec<[f64; 2]> = s.t.iter().map(|&t| seg.point(t)).collect();
        for ((&t, &v), p) in s.t.iter().zip(&s.values).zip(&pts) {
            profile.push(vec![arc.into(), t.into(), p[0].into(), p[1].into(), v.into()]);
        }
        // Runs of constant sign, red for positive and blue for negative.
        let mut i = 0;
        while i + 1 < pts.len() {
            let positive = s.values[i] + s.values[i + 1] >= 0.0;
            let mut j = i + 1;
            while j + 1 < pts.len() && (s.values[j] + s.values[j + 1] >= 0.0) == positive {
                j += 1;
            }
            plot.polyline(&pts[i..=j], if positive { "red" } else { "blue" }, 4.0, false);
            i = j;
        }
    }
    out.csv("profile.csv", &profile)?;
    let mut arms = Table::new(&["arc", "kind", "sign_at_boundary", "sign_at_center", "zero_from_boundary"]);
    for a in &prof.arms {
        let zero = a.zero_from_boundary.map(Into::into).unwrap_or_else(|| "".into());
        arms.push(vec![a.arc.into(), format!("{:?}", a.kind).to_lowercase().into(), a.sign_at_boundary.into(), a.sign_at_center.into(), zero]);
    }
    out.csv("arms.csv", &arms)?;
    out.svg("sign_sketch.svg", &plot)?;
    Ok(Outcome::lines(vec![
        format!("gamma1 = {}, gamma2 = {}", fmt_num(g.gamma1), fmt_num(g.gamma2)),
        format!("sigma_bar = {}", fmt_num(g.sigma_bar)),
        format!("residuals: constraint {:.3e}, matching {:.3e}", g.constraint_residual, g.matching_residual),
    ]))
}

fn rect_spec(ar: AspectRatio, m: u64, n: u64, out: &mut OutputDir) -> Result<Outcome> {
    let lambda = crate::rect::rect_eigenvalue(m, n, ar)?;
    let pos = rect_spectral_position(m, n, ar)?;
    let domains = (m * n) as usize;
    let sharp = pos.position == domains;
    out.csv(
        "spec.csv",
        &Table::key_values([
            ("alpha", ar.alpha().into()),
            ("m", (m as usize).into()),
            ("n", (n as usize).into()),
            ("eigenvalue", lambda.into()),
            ("position", pos.position.into()),
            ("multiplicity", pos.multiplicity.into()),
            ("nodal_domains", domains.into()),
            ("deficiency", (pos.position as i64 - domains as i64).into()),
            ("courant_sharp", if sharp { "true" } else { "false" }.into()),
        ]),
    )?;
    Ok(Outcome::lines(vec![
        format!("lambda_{m},{n} = {}, position {}, multiplicity {}", fmt_num(lambda), pos.position, pos.multiplicity),
        format!("courant sharp: {sharp} (deficiency {})", pos.position as i64 - domains as i64),
    ]))
}

fn disk_radial(k: usize, out: &mut OutputDir) -> Result<Outcome> {
    let d = radial_partition_data(k)?;
    let mut rows: Vec<(&str, crate::io::Cell)> = vec![
        ("k", k.into()),
        ("energy", d.energy.into()),
        ("position", d.position.into()),
        ("multiplicity", d.multiplicity.into()),
        ("deficiency", d.deficiency.into()),
    ];
    let mut lines = vec![format!("k = {k}: energy {}, position {}, deficiency {}", fmt_num(d.energy), d.position, d.deficiency)];
    if let Some(a) = d.matched_order {
        rows.push(("matched_order", a.into()));
        lines.push(format!("matched order alpha = {}", fmt_num(a)));
    }
    if k >= 6 && k.is_multiple_of(2) {
        let f = negative_form_even(k)?;
        rows.push(("negative_form", f.into()));
        lines.push(format!("even negative form = {}", fmt_num(f)));
    } else if k >= 7 {
        let s = spectral_flow_odd(k)?;
        rows.extend([
            ("negative_form", s.form.into()),
            ("flow_alpha", s.alpha.into()),
            ("flow_sigma", s.sigma.into()),
            ("node_ratio_spread", s.node_ratio_spread.into()),
            ("endpoint_residual", s.endpoint_residual.into()),
        ]);
        let mut nodes = Table::new(&["node", "theta", "value"]);
        for (i, v) in s.node_values.iter().enumerate() {
            nodes.push(vec![(i + 1).into(), (std::f64::consts::TAU * (i + 1) as f64 / k as f64).into(), (*v).into()]);
        }
        out.csv("flow_nodes.csv", &nodes)?;
        lines.push(format!("odd negative form = {}, node ratio spread {:.3e}", fmt_num(s.form), s.node_ratio_spread));
    }
    out.csv("radial.csv", &Table::key_values(rows))?;
    Ok(Outcome::lines(lines))
}

fn partition_plot(p: &Partition, nodal: &[Vec<[f64; 2]>]) -> SvgPlot {
    let mut plot = SvgPlot::for_domain(&p.domain);
    for a in &p.interfaces {
        plot.polyline(&[a.geometry.start, a.geometry.end], "red", 3.0, true);
    }
    for l in nodal {
        plot.polyline(l, "blue", 2.0, false);
    }
    plot
}

fn config_value(cfg: &RunConfig) -> Option<serde_json::Value> {
    serde_json::to_value(cfg).ok()
}

fn plap_eig(config: &Path, n: Option<usize>, count: Option<usize>, nodal: Option<usize>, out: &mut OutputDir) -> Result<Outcome> {
    let cfg = RunConfig::load(config)?;
    let p = cfg.partition()?;
    let n = n.unwrap_or(cfg.grid.n);
    let count = count.unwrap_or(cfg.grid.count);
    let op = assemble_plap(&p, n)?;
    let res = solve_eigs(&op, count)?;
    let tol = cfg.tolerances.eigen_residual;
    let mut spectrum = Table::new(&["index", "eigenvalue", "residual", "position"]);
    let mut lines = Vec::new();
    for (i, (pair, &pos)) in res.pairs.iter().zip(&res.positions).enumerate() {
        if pair.residual > tol * (1.0 + pair.value.abs()) {
            return Err(Error::Numerical(format!("eigenpair {} has residual {:.3e} above {tol:e}", i + 1, pair.residual)));
        }
        spectrum.push(vec![(i + 1).into(), pair.value.into(), pair.residual.into(), pos.into()]);
        lines.push(format!("{}, {}, position {}", i + 1, fmt_num(pair.value), pos));
    }
    out.csv("spectrum.csv", &spectrum)?;
    let pick = nodal.unwrap_or(res.pairs.len());
    if pick == 0 || pick > res.pairs.len() {
        return Err(Error::Domain(format!("nodal index {pick} outside 1..={}", res.pairs.len())));
    }
    let nodal = extract_nodal_partition(&res.pairs[pick - 1].vector, &op)?;
    let mut domains = Table::new(&["domain", "rayleigh_quotient", "samples"]);
    for (i, (l, s)) in nodal.domain_lambdas.iter().zip(&nodal.domain_sizes).enumerate() {
        domains.push(vec![i.into(), (*l).into(), (*s).into()]);
    }
    out.csv("nodal_domains.csv", &domains)?;
    out.csv("nodal_lines.csv", &Table::polylines(&nodal.polylines))?;
    out.svg("nodal.svg", &partition_plot(&p, &nodal.polylines))?;
    lines.push(format!("eigenpair {pick}: {} nodal domains", nodal.domain_count));
    Ok(Outcome { lines, config: config_value(&cfg), tolerances: vec![("eigen_residual", tol)] })
}

fn hessian_index(config: &Path, basis: Option<usize>, n: Option<usize>, out: &mut OutputDir) -> Result<Outcome> {
    let cfg = RunConfig::load(config)?;
    let p = cfg.partition()?;
    let n = n.unwrap_or(cfg.grid.n);
    let per_arc = basis.unwrap_or(cfg.basis.per_arc);
    let frame = orient_interfaces(&p, &cfg.orientation_rule(&p))?;
    let gs = groundstate_data(&p, n)?;
    let crit = criticality(&p, &gs)?;
    if crit.residual > cfg.tolerances.not_critical {
        return Err(Error::NotCritical(crit.residual));
    }
    let fields = arc_polynomial_basis(&p, per_arc, cfg.basis.samples)?;
    let rep = dtn_form_matrix(&p, &frame, &gs, &fields, n)?;
    let m = rep.matrix.len();
    let header: Vec<String> = (0..m).map(|j| format!("c{j}")).collect();
    let mut gram = Table { header, rows: Vec::with_capacity(m) };
    for row in &rep.matrix {
        gram.push(row.iter().map(|&v| v.into()).collect());
    }
    out.csv("gram.csv", &gram)?;
    let mut eig = Table::new(&["index", "eigenvalue"]);
    for (i, v) in rep.eigenvalues.iter().enumerate() {
        eig.push(vec![i.into(), (*v).into()]);
    }
    out.csv("form_eigenvalues.csv", &eig)?;
    out.csv(
        "index.csv",
        &Table::key_values([
            ("basis_size", rep.basis_size.into()),
            ("constrained_size", rep.constrained_size.into()),
            ("n_minus", rep.n_minus.into()),
            ("n_zero", rep.n_zero.into()),
            ("moment_residual", rep.moment_residual.into()),
            ("criticality_residual", crit.residual.into()),
        ]),
    )?;
    Ok(Outcome {
        lines: vec![
            format!("index {} (nullity {}) on {} of {} basis fields", rep.n_minus, rep.n_zero, rep.constrained_size, rep.basis_size),
            format!("criticality residual {:.3e}, moment residual {:.3e}", crit.residual, rep.moment_residual),
        ],
        config: config_value(&cfg),
        tolerances: vec![("not_critical", cfg.tolerances.not_critical), ("form_zero", crate::tolerances::FORM_ZERO)],
    })
}

fn had_check(family: &str, order: u8, n: usize, out: &mut OutputDir) -> Result<Outcome> {
    let rep = hadamard_check(Family::parse(family)?, order, n)?;
    let mut t = Table::new(&["label", "formula", "finite_difference", "fd_error", "reference", "formula_vs_fd"]);
    let mut lines = Vec::new();
    for c in &rep.checks {
        let reference = c.reference.map(Into::into).unwrap_or_else(|| "".into());
        t.push(vec![c.label.clone().into(), c.formula.into(), c.finite_difference.into(), c.fd_error.into(), reference, c.formula_vs_fd().into()]);
        lines.push(format!("{}: formula {}, fd {}, relative gap {:.3e}", c.label, fmt_num(c.formula), fmt_num(c.finite_difference), c.formula_vs_fd()));
    }
    out.csv("had_check.csv", &t)?;
    out.json("had_check.json", &rep)?;
    Ok(Outcome { lines, config: None, tolerances: vec![("fd_step", crate::tolerances::FD_STEPS[0])] })
}

fn cut_search(args: &CutSearchArgs, out: &mut OutputDir) -> Result<Outcome> {
    let (report, shape): (SearchReport, DomainShape) = match args.geometry {
        Geometry::Disk => {
            let d = DiskSearchOptions::default();
            let opts = DiskSearchOptions {
                n: args.n.unwrap_or(d.n),
                tol: args.tol.unwrap_or(d.tol),
                plap_n: args.plap_n.unwrap_or(d.plap_n),
                refine: args.refine,
                ..d
            };
            (disk_cut_search(&opts)?, DomainShape::Disk)
        }
        Geometry::Rect => {
            let d = RectSearchOptions::default();
            let opts = RectSearchOptions {
                alpha: args.alpha,
                grid: args.n.map(SlitGrid::new).unwrap_or(d.grid),
                tol: args.tol.unwrap_or(d.tol),
                refine: args.refine,
                ..d
            };
            (rect_cut_search(&opts)?, DomainShape::Rectangle { alpha: args.alpha })
        }
    };
    out.json("cut_search.json", &report)?;
    let cuts: Vec<Vec<[f64; 2]>> = report.cuts.iter().map(|c| c.to_vec()).collect();
    out.csv("cuts.csv", &Table::polylines(&cuts))?;
    out.csv("nodal_lines.csv", &Table::polylines(&report.nodal_lines))?;
    let np = report.landscape.first().map_or(0, |l| l.parameters.len());
    let mut header: Vec<String> = (0..np).map(|i| format!("p{i}")).collect();
    header.extend(["residual".into(), "energy".into()]);
    let mut land = Table { header, rows: Vec::new() };
    for l in &report.landscape {
        let mut row: Vec<crate::io::Cell> = l.parameters.iter().map(|&v| v.into()).collect();
        row.extend([l.residual.into(), l.energy.into()]);
        land.push(row);
    }
    out.csv("landscape.csv", &land)?;
    let mut plot = SvgPlot::for_domain(&shape);
    for c in &cuts {
        plot.polyline(c, "red", 3.0, true);
    }
    for l in &report.nodal_lines {
        plot.polyline(l, "blue", 2.0, false);
    }
    out.svg("cut_search.svg", &plot)?;
    let params: Vec<String> = report.parameters.iter().map(|(k, v)| format!("{k} = {}", fmt_num(*v))).collect();
    let mut lines = vec![
        format!("{}: {}", report.geometry, params.join(", ")),
        format!("energy {}, residual {:.3e}, position {}, domains {}", fmt_num(report.energy), report.residual, report.position, report.domains),
        format!("reference ({}) {}", report.reference_label, fmt_num(report.reference_energy)),
    ];
    lines.extend(report.notes.iter().cloned());
    Ok(Outcome { lines, config: None, tolerances: vec![("search_tol", report.tolerance)] })
}
