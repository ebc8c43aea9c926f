//! `explode`: batch front-end for cohomology, duality, Stokes and
//! orientation computations on tropical charts and their covers.
//!
//! Exit status is 0 when a command ran and its check held (or nothing was
//! checked), 1 on unreadable or invalid input, and 2 when a check was
//! refuted.

mod input;

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use explode_core::cech::{family_h1_check, pd_symmetry_check, refinement_manifest, total_betti, FamilyProjection};
use explode_core::chart::ChartSignature;
use explode_core::format::{parse_chart_spec, parse_fan, parse_manifest, parse_named_matrices, print_manifest};
use explode_core::forms::{adjunction_check, pairing_matrix, parse_form, stokes_check, CoordinateProjection, QuadratureOptions};
use explode_core::lattice::{IntegerMatrix, QMatrix};
use explode_core::orientation::{associativity_check, fiber_product, normal_bundle_sign, parity_sign, swap_sign};
use explode_core::Error;

use input::{directives, index_list, locate, read, required};

#[derive(Parser)]
#[command(name = "explode", version, about = "Cohomology and integration on tropical charts")]
struct Cli {
    /// Tolerance for numeric comparisons.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tolerance: f64,
    /// Cap on adaptive quadrature refinement depth.
    #[arg(long, global = true, default_value_t = 20)]
    max_depth: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Betti numbers of a cover manifest.
    Cohomology { manifest: PathBuf },
    /// Compares compactly supported Betti numbers with the reversed ordinary ones.
    PdCheck { manifest: PathBuf },
    /// Prints the refinement manifest of a fan file.
    Refine {
        fan: PathBuf,
        /// Torus rank of every chart; defaults to the fan dimension.
        #[arg(long)]
        base_m: Option<usize>,
    },
    /// Compares the integral of dω with the boundary integral of ω.
    Stokes {
        /// File with `chart:`, optional `boundary:` and the form expression.
        form: PathBuf,
        /// Chart spec such as "n=0 m=1; 1 >= 0"; overrides the file.
        #[arg(long)]
        chart: Option<String>,
        /// Boundary coordinate x_j <= 0 (0-based); overrides the file.
        #[arg(long)]
        boundary: Option<usize>,
    },
    /// Numeric pairing matrix between degree-j classes and compact classes.
    Pair { chart: String, degree: usize },
    /// Orientation signs of the fiber product of maps `f` and `g`.
    Orient { maps: PathBuf },
    /// Fiber-integration adjunction or family H^1 count.
    FiberCheck { file: PathBuf },
}

enum Outcome {
    Verified,
    Refuted,
}

impl Outcome {
    fn from(ok: bool) -> Self {
        if ok {
            Outcome::Verified
        } else {
            Outcome::Refuted
        }
    }
}

struct Out {
    format: Format,
    lines: Vec<String>,
}

impl Out {
    fn kv(&mut self, key: &str, value: impl Display) {
        let line = match self.format {
            Format::Text => format!("{:<22}{value}", format!("{key}:")),
            Format::Machine => format!("{} {value}", key.replace(' ', "_")),
        };
        self.lines.push(line);
    }

    fn raw(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn verdict(&mut self, ok: bool) {
        self.kv("status", if ok { "verified" } else { "refuted" });
    }
}

fn num(x: f64) -> String {
    format!("{x:.9}")
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn load_manifest(path: &Path) -> anyhow::Result<explode_core::cech::CoverManifest> {
    parse_manifest(&read(path)?).map_err(|e| locate(e, &display(path), 1, 1))
}

fn chart_from(spec: &str, path: &str, line: usize, col: usize) -> anyhow::Result<ChartSignature> {
    parse_chart_spec(spec).map_err(|e| locate(e, path, line, col))
}

fn cohomology(path: &Path, out: &mut Out) -> anyhow::Result<Outcome> {
    let table = total_betti(&load_manifest(path)?)?;
    if out.format == Format::Text {
        out.raw(table.to_string().trim_end());
    } else {
        out.kv("dimension", table.dimension);
    }
    out.raw(table.machine().trim_end());
    Ok(Outcome::Verified)
}

fn pd_check(path: &Path, out: &mut Out) -> anyhow::Result<Outcome> {
    let report = pd_symmetry_check(&load_manifest(path)?)?;
    if out.format == Format::Text {
        out.raw(report.table.to_string().trim_end());
    } else {
        out.kv("dimension", report.table.dimension);
        out.raw(report.table.machine().trim_end());
    }
    for j in &report.violations {
        out.kv("mismatch degree", j);
    }
    out.verdict(report.passed());
    Ok(Outcome::from(report.passed()))
}

fn refine(path: &Path, base_m: Option<usize>, out: &mut Out) -> anyhow::Result<Outcome> {
    let fan = parse_fan(&read(path)?).map_err(|e| locate(e, &display(path), 1, 1))?;
    let m = refinement_manifest(&fan, base_m.unwrap_or(fan.ambient_dim()))?;
    out.raw(print_manifest(&m).trim_end());
    Ok(Outcome::Verified)
}

fn stokes(
    path: &Path,
    chart: Option<&str>,
    boundary: Option<usize>,
    cli: &Cli,
    out: &mut Out,
) -> anyhow::Result<Outcome> {
    let p = display(path);
    let d = directives(&read(path)?, &p, &["chart", "boundary", "form"], Some("form"))?;
    let form = required(&d, "form", &p)?;
    let omega = parse_form(&form.value).map_err(|e| locate(e, &p, form.line, form.col))?;
    let sig = match chart {
        Some(spec) => parse_chart_spec(spec).map_err(|e| anyhow::anyhow!("--chart: {e}"))?,
        None => {
            let c = required(&d, "chart", &p)?;
            chart_from(&c.value, &p, c.line, c.col)?
        }
    };
    let boundary = match boundary {
        Some(j) => Some(j),
        None => index_list(d.get("boundary"), &p)?.first().copied(),
    };
    let opts = QuadratureOptions { max_depth: cli.max_depth, ..QuadratureOptions::default() };
    let report = stokes_check(&omega, &sig, boundary, &opts)?;
    out.kv("interior", num(report.interior.value));
    out.kv("boundary", num(report.boundary.value));
    out.kv("discrepancy", num(report.discrepancy));
    if report.hypothesis_violated() {
        let a = &report.admissibility;
        out.kv("integral vectors", if a.integral_vectors_ok() { "ok" } else { "failed" });
        out.kv("angular directions", if a.angular_directions_ok() { "ok" } else { "failed" });
        out.raw(format!("hypothesis violated: form is not admissible; discrepancy {} is expected", num(report.discrepancy)));
        return Ok(Outcome::Verified);
    }
    let ok = report.within(cli.tolerance);
    out.verdict(ok);
    Ok(Outcome::from(ok))
}

fn pair(spec: &str, degree: usize, cli: &Cli, out: &mut Out) -> anyhow::Result<Outcome> {
    let sig = parse_chart_spec(spec).map_err(|e| locate(e, "<chart>", 1, 1))?;
    let opts = QuadratureOptions { max_depth: cli.max_depth, ..QuadratureOptions::default() };
    let pm = pairing_matrix(&sig, degree, &opts)?;
    out.kv("rows", pm.rows.len());
    out.kv("cols", pm.cols.len());
    for row in &pm.entries {
        out.raw(format!("entry {}", row.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ")));
    }
    out.kv("rank", pm.rank(cli.tolerance));
    let ok = pm.is_nondegenerate(cli.tolerance) && pm.is_signed_unit(cli.tolerance);
    out.verdict(ok);
    Ok(Outcome::from(ok))
}

fn orient(path: &Path, out: &mut Out) -> anyhow::Result<Outcome> {
    let p = display(path);
    let maps = parse_named_matrices(&read(path)?).map_err(|e| locate(e, &p, 1, 1))?;
    let get = |k: &str| -> anyhow::Result<QMatrix> {
        maps.get(k)
            .map(IntegerMatrix::to_rational)
            .ok_or_else(|| anyhow::anyhow!("{p}: missing matrix `{k}`"))
    };
    let (f, g) = (get("f")?, get("g")?);
    if f.rows() != g.rows() {
        return Err(Error::ShapeError { expected: (f.rows(), g.cols()), found: (g.rows(), g.cols()) }.into());
    }
    let fp = fiber_product(&f, &g)?;
    let (a, b, c) = (f.cols(), g.cols(), f.rows());
    out.kv("fiber product dim", fp.dim());
    out.kv("orientation sign", fp.sign);
    let swap = swap_sign(&f, &g)?;
    let swap_expected = parity_sign(a.abs_diff(c) * b.abs_diff(c));
    out.kv("swap sign", swap);
    let normal = normal_bundle_sign(&f, &g)?;
    let normal_expected = parity_sign(b * c);
    out.kv("normal bundle sign", normal);
    let mut ok = swap == swap_expected && normal == normal_expected;
    if let (Ok(h), Ok(k)) = (get("h"), get("k")) {
        let assoc = associativity_check(&f, &g, &h, &k)?;
        out.kv("associative", assoc.passed());
        ok &= assoc.passed();
    }
    out.verdict(ok);
    Ok(Outcome::from(ok))
}

fn fiber_check(path: &Path, cli: &Cli, out: &mut Out) -> anyhow::Result<Outcome> {
    let p = display(path);
    let keys = ["total", "base", "keep_x", "keep_torus", "alpha", "theta", "exponents"];
    let d = directives(&read(path)?, &p, &keys, None)?;
    let total = required(&d, "total", &p)?;
    let total = chart_from(&total.value, &p, total.line, total.col)?;
    if let Some(e) = d.get("exponents") {
        let base = required(&d, "base", &p)?;
        let base = chart_from(&base.value, &p, base.line, base.col)?;
        let rows = explode_core::format::parse_rows(&e.value, e.line, &e.value).map_err(|err| locate(err, &p, 1, e.col))?;
        let exponents = if rows.is_empty() {
            IntegerMatrix::zeros(base.m(), total.m())
        } else {
            let cols = rows[0].len();
            IntegerMatrix::from_big_rows(rows, cols)
        };
        let r = family_h1_check(&base, &total, &FamilyProjection { exponents })?;
        out.kv("base h1", r.base);
        out.kv("fiber h1", r.fiber);
        out.kv("total h1", r.total);
        out.verdict(r.passed());
        return Ok(Outcome::from(r.passed()));
    }
    let proj = CoordinateProjection::new(total, index_list(d.get("keep_x"), &p)?, index_list(d.get("keep_torus"), &p)?)?;
    let form = |k: &str| -> anyhow::Result<_> {
        let f = required(&d, k, &p)?;
        parse_form(&f.value).map_err(|e| locate(e, &p, f.line, f.col))
    };
    let opts = QuadratureOptions { max_depth: cli.max_depth, ..QuadratureOptions::default() };
    let r = adjunction_check(&proj, &form("alpha")?, &form("theta")?, &opts)?;
    out.kv("base side", num(r.base_side.value));
    out.kv("total side", num(r.total_side.value));
    out.kv("discrepancy", num(r.discrepancy));
    let ok = r.within(cli.tolerance);
    out.verdict(ok);
    Ok(Outcome::from(ok))
}

fn run(cli: &Cli, out: &mut Out) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Cohomology { manifest } => cohomology(manifest, out),
        Command::PdCheck { manifest } => pd_check(manifest, out),
        Command::Refine { fan, base_m } => refine(fan, *base_m, out),
        Command::Stokes { form, chart, boundary } => stokes(form, chart.as_deref(), *boundary, cli, out),
        Command::Pair { chart, degree } => pair(chart, *degree, cli, out),
        Command::Orient { maps } => orient(maps, out),
        Command::FiberCheck { file } => fiber_check(file, cli, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Out { format: cli.format, lines: Vec::new() };
    let result = run(&cli, &mut out);
    for line in &out.lines {
        println!("{line}");
    }
    match result {
        Ok(Outcome::Verified) => ExitCode::SUCCESS,
        Ok(Outcome::Refuted) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
