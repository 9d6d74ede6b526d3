//! Command-line harness: runs the verification suites (algebra invariants,
//! classical-limit residual scans, quantization-diagram refinement, field
//! energy identities) and emits deterministic CSV or JSON tables.

use berezin::algebra::{QuantizationScheme, SymplecticSpace, WeylElement};
use berezin::field::{
    self, AlphaSide, FieldGrid, FieldState,
};
use berezin::limits::{Condition, QuantityKind, QuantityRef, ResidualRecord, ScanSummary};
use berezin::rep::{diagram_residual, rep_element, GridRep, QuadSpec, ShiftMode};
use berezin::{parse_hbars, positivity_certificate, ComplexStructure, TestFunction, C64};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::PathBuf;

const REPORT_MAGIC: &str = "# berezin-report-v1";

#[derive(Parser)]
#[command(name = "berezin", version, about = "Verification harness for Weyl quantization and classical limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// CCR/star-algebra invariants and positivity certificates.
    AlgebraCheck(CommonArgs),
    /// Classical-limit residual scan with decay-slope fits.
    LimitScan(LimitScanArgs),
    /// Quantization-diagram residual under grid refinement.
    RepVerify(CommonArgs),
    /// Field total-number and Hamiltonian identity checks.
    FieldEnergy(FieldEnergyArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Grid points (per axis); command-specific default when omitted.
    #[arg(long)]
    n: Option<usize>,
    /// Half-width / extent of the grid.
    #[arg(long, default_value_t = 10.0)]
    extent: f64,
    /// Mode count (algebra) or spatial dimension (fields).
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Mass parameter of the field model.
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Comma-separated hbar list in (0,1], strictly decreasing.
    #[arg(long)]
    hbars: Option<String>,
    /// RNG seed; fully determines random elements and states.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Clone)]
struct LimitScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Pair selection: `all`, or a comma list of kind1:kind2:condition
    /// (kinds: weyl|field|annihilator|creator|number; conditions:
    /// dirac|von_neumann).
    #[arg(long, default_value = "all")]
    pairs: String,
}

#[derive(Args, Clone)]
struct FieldEnergyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which field model to verify.
    #[arg(long, value_enum)]
    family: Family,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    KgMinkowski,
    KgRindler,
    Maxwell,
}

impl Family {
    fn label(self) -> &'static str {
        match self {
            Family::KgMinkowski => "kg-minkowski",
            Family::KgRindler => "kg-rindler",
            Family::Maxwell => "maxwell",
        }
    }
}

/// Assembled output table: meta key/values, a fixed column set, and rows of
/// preformatted strings.  Ordering is fixed, so output bytes are a pure
/// function of the config.
struct Report {
    command: &'static str,
    meta: Vec<(String, String)>,
    columns: &'static [&'static str],
    rows: Vec<Vec<String>>,
    all_pass: bool,
}

impl Report {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = String::new();
                let meta: Vec<String> =
                    self.meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
                out.push_str(&format!(
                    "{REPORT_MAGIC} command={} {} all_pass={}\n",
                    self.command,
                    meta.join(" "),
                    self.all_pass
                ));
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                use serde_json::{json, Map, Value};
                let mut meta = Map::new();
                meta.insert("schema".into(), Value::String("berezin-report-v1".into()));
                meta.insert("command".into(), Value::String(self.command.into()));
                meta.insert(
                    "version".into(),
                    Value::String(env!("CARGO_PKG_VERSION").into()),
                );
                for (k, v) in &self.meta {
                    meta.insert(k.clone(), Value::String(v.clone()));
                }
                meta.insert("all_pass".into(), Value::Bool(self.all_pass));
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = Map::new();
                        for (col, cell) in self.columns.iter().zip(row) {
                            obj.insert((*col).into(), Value::String(cell.clone()));
                        }
                        Value::Object(obj)
                    })
                    .collect();
                let mut doc = serde_json::to_string_pretty(&json!({
                    "meta": Value::Object(meta),
                    "rows": rows,
                }))
                .expect("json assembly");
                doc.push('\n');
                doc
            }
        }
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.12e}")
}

fn fmt_tf(f: &TestFunction) -> String {
    let cells: Vec<String> = f.coords().iter().map(|c| format!("{c:.6e}")).collect();
    format!("({})", cells.join(";"))
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::AlgebraCheck(args) => run_algebra_check(args),
        Command::LimitScan(args) => run_limit_scan(args),
        Command::RepVerify(args) => run_rep_verify(args),
        Command::FieldEnergy(args) => run_field_energy(args),
    };
    match result {
        Ok((report, args)) => {
            let rendered = report.render(args.format);
            if let Some(path) = &args.out {
                if let Err(e) = std::fs::write(path, rendered) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    std::process::exit(2);
                }
            } else {
                let mut stdout = std::io::stdout().lock();
                if stdout.write_all(rendered.as_bytes()).is_err() {
                    std::process::exit(2);
                }
            }
            std::process::exit(if report.all_pass { 0 } else { 1 });
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn hbars_or(args: &CommonArgs, default: &str) -> berezin::Result<Vec<f64>> {
    parse_hbars(args.hbars.as_deref().unwrap_or(default))
}

fn random_tf(rng: &mut ChaCha8Rng, half: usize) -> TestFunction {
    let coords: Vec<f64> = (0..2 * half).map(|_| rng.gen_range(-2.0..2.0)).collect();
    TestFunction::new(coords)
}

fn random_element(
    rng: &mut ChaCha8Rng,
    space: &SymplecticSpace,
    hbar: f64,
    max_terms: usize,
) -> WeylElement {
    let half = space.coord_len() / 2;
    let terms = rng.gen_range(1..=max_terms);
    let mut out = WeylElement::zero(space.clone(), hbar);
    for _ in 0..terms {
        let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        out = out
            .add(&WeylElement::generator(space.clone(), hbar, &random_tf(rng, half)).scale(z))
            .expect("same-space elements");
    }
    out
}

fn common_meta(args: &CommonArgs, hbars: &[f64], n: usize) -> Vec<(String, String)> {
    vec![
        ("n".into(), n.to_string()),
        ("extent".into(), fmt_f(args.extent)),
        ("dim".into(), args.dim.to_string()),
        ("mass".into(), fmt_f(args.mass)),
        (
            "hbars".into(),
            hbars.iter().map(|h| fmt_f(*h)).collect::<Vec<_>>().join(";"),
        ),
        ("seed".into(), args.seed.to_string()),
    ]
}

// ---------------------------------------------------------------------------
// algebra-check
// ---------------------------------------------------------------------------

fn run_algebra_check(args: &CommonArgs) -> berezin::Result<(Report, CommonArgs)> {
    let hbars = hbars_or(args, "1,0.5,0.1")?;
    let n_grid = args.n.unwrap_or(128);
    let space = SymplecticSpace::finite(args.dim);
    let j = ComplexStructure::standard(args.dim);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut rows = Vec::new();
    let mut all_pass = true;
    let push = |check: &str, samples: usize, worst: f64, threshold: f64, rows: &mut Vec<Vec<String>>| {
        let pass = worst <= threshold;
        rows.push(vec![
            check.into(),
            samples.to_string(),
            fmt_f(worst),
            fmt_f(threshold),
            pass.to_string(),
        ]);
        pass
    };

    // generator relation W(F)W(G) = e^{-i hbar sigma/2} W(F+G)
    let mut worst = 0.0f64;
    let mut samples = 0;
    for &hbar in &hbars {
        for _ in 0..70 {
            let f = random_tf(&mut rng, args.dim);
            let g = random_tf(&mut rng, args.dim);
            let lhs = WeylElement::generator(space.clone(), hbar, &f)
                .mul(&WeylElement::generator(space.clone(), hbar, &g))?;
            let phase = C64::new(0.0, -hbar * space.sigma(&f, &g)? / 2.0).exp();
            let rhs = WeylElement::generator(space.clone(), hbar, &f.add(&g)).scale(phase);
            worst = worst.max(lhs.max_coeff_diff(&rhs));
            samples += 1;
        }
    }
    all_pass &= push("generator_relation", samples, worst, 1e-14, &mut rows);

    // associativity and the star axioms on random multi-term elements
    let mut worst_assoc = 0.0f64;
    let mut worst_star = 0.0f64;
    let mut samples = 0;
    for &hbar in &hbars {
        for _ in 0..70 {
            let a = random_element(&mut rng, &space, hbar, 3);
            let b = random_element(&mut rng, &space, hbar, 3);
            let c = random_element(&mut rng, &space, hbar, 3);
            let ab_c = a.mul(&b)?.mul(&c)?;
            let a_bc = a.mul(&b.mul(&c)?)?;
            worst_assoc = worst_assoc.max(ab_c.max_coeff_diff(&a_bc));
            let star_prod = a.mul(&b)?.adjoint();
            let prod_star = b.adjoint().mul(&a.adjoint())?;
            worst_star = worst_star.max(star_prod.max_coeff_diff(&prod_star));
            worst_star = worst_star.max(a.adjoint().adjoint().max_coeff_diff(&a));
            samples += 1;
        }
    }
    all_pass &= push("associativity", samples, worst_assoc, 1e-14, &mut rows);
    all_pass &= push("star_axioms", samples, worst_star, 1e-14, &mut rows);

    // positivity certificate for Q^J(A* A) on random classical elements
    let classical = SymplecticSpace::finite(args.dim);
    let mut worst_margin = 0.0f64;
    let mut samples = 0;
    for &hbar in &hbars {
        for _ in 0..34 {
            let a = random_element(&mut rng, &classical, 0.0, 5);
            let report = positivity_certificate(&a, hbar, &j)?;
            // violation beyond the report's own tolerance
            let violation = (-report.min_eigenvalue - report.tolerance).max(0.0);
            worst_margin = worst_margin.max(violation);
            samples += 1;
        }
    }
    all_pass &= push("positivity_gram", samples, worst_margin, 0.0, &mut rows);

    // represented positivity spot check: strict-shift lattice elements
    let grid = GridRep::new(n_grid, args.extent)?;
    let j1 = ComplexStructure::standard(1);
    let space1 = SymplecticSpace::finite(1);
    let mut worst_rep = 0.0f64;
    let mut samples = 0;
    for &hbar in &hbars {
        for _ in 0..3 {
            let mut a = WeylElement::zero(space1.clone(), 0.0);
            for _ in 0..rng.gen_range(1..=3usize) {
                // lattice-compatible (a, b): integer cells and torus phases
                let cell = rng.gen_range(-3..=3i64) as f64 * grid.spacing() / hbar;
                let mode =
                    rng.gen_range(-3..=3i64) as f64 * std::f64::consts::PI / grid.extent();
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                a = a.add(
                    &WeylElement::generator(space1.clone(), 0.0, &TestFunction::finite(&[cell], &[mode]))
                        .scale(z),
                )?;
            }
            let prod = a.adjoint().mul(&a)?;
            let quantized = prod.quantize(hbar, QuantizationScheme::PositiveJ(&j1))?;
            let rep = rep_element(&grid, &quantized, ShiftMode::Strict)?;
            worst_rep = worst_rep.max((-rep.min_eigenvalue()).max(0.0));
            samples += 1;
        }
    }
    all_pass &= push("positivity_represented", samples, worst_rep, 1e-6, &mut rows);

    let report = Report {
        command: "algebra-check",
        meta: common_meta(args, &hbars, n_grid),
        columns: &["check", "samples", "worst", "threshold", "pass"],
        rows,
        all_pass,
    };
    Ok((report, args.clone()))
}

// ---------------------------------------------------------------------------
// limit-scan
// ---------------------------------------------------------------------------

fn all_pairs() -> Vec<(QuantityKind, QuantityKind, Condition)> {
    use Condition::*;
    use QuantityKind::*;
    vec![
        (Field, WeylGen, Dirac),
        (Field, Field, Dirac),
        (Annihilator, WeylGen, Dirac),
        (Annihilator, Field, Dirac),
        (Creator, WeylGen, Dirac),
        (Creator, Field, Dirac),
        (Creator, Annihilator, Dirac),
        (Number, WeylGen, Dirac),
        (Number, Field, Dirac),
        (Number, Annihilator, Dirac),
        (Number, Number, Dirac),
        (Field, WeylGen, VonNeumann),
        (Field, Field, VonNeumann),
        (Annihilator, WeylGen, VonNeumann),
        (Annihilator, Field, VonNeumann),
        (Creator, WeylGen, VonNeumann),
        (Creator, Field, VonNeumann),
        (Creator, Annihilator, VonNeumann),
    ]
}

fn parse_kind(s: &str) -> berezin::Result<QuantityKind> {
    use QuantityKind::*;
    Ok(match s {
        "weyl" => WeylGen,
        "field" => Field,
        "annihilator" => Annihilator,
        "creator" => Creator,
        "number" => Number,
        other => {
            return Err(berezin::Error::InvalidConfig(format!("unknown quantity kind `{other}`")))
        }
    })
}

fn parse_pairs(s: &str) -> berezin::Result<Vec<(QuantityKind, QuantityKind, Condition)>> {
    if s == "all" {
        return Ok(all_pairs());
    }
    let mut out = Vec::new();
    for token in s.split(',') {
        let parts: Vec<&str> = token.split(':').collect();
        if parts.len() != 3 {
            return Err(berezin::Error::InvalidConfig(format!(
                "pair `{token}` is not kind1:kind2:condition"
            )));
        }
        let condition = match parts[2] {
            "dirac" => Condition::Dirac,
            "von_neumann" => Condition::VonNeumann,
            other => {
                return Err(berezin::Error::InvalidConfig(format!("unknown condition `{other}`")))
            }
        };
        out.push((parse_kind(parts[0])?, parse_kind(parts[1])?, condition));
    }
    Ok(out)
}

fn quantity(kind: QuantityKind, f: TestFunction, j0: &ComplexStructure) -> QuantityRef {
    match kind {
        QuantityKind::WeylGen => QuantityRef::weyl(f),
        QuantityKind::Field => QuantityRef::field(f),
        QuantityKind::Annihilator => QuantityRef::annihilator(f, j0.clone()),
        QuantityKind::Creator => QuantityRef::creator(f, j0.clone()),
        QuantityKind::Number => QuantityRef::number(f, j0.clone()),
    }
}

fn residual_row(rec: &ResidualRecord) -> Vec<String> {
    vec![
        rec.kind1.label().into(),
        fmt_tf(&rec.f1),
        rec.kind2.label().into(),
        fmt_tf(&rec.f2),
        rec.condition.label().into(),
        fmt_f(rec.hbar),
        fmt_f(rec.value),
    ]
}

fn slope_row(s: &ScanSummary, f1: &TestFunction, f2: &TestFunction) -> Vec<String> {
    let value = match (s.exact, s.slope) {
        (true, _) => "exact".to_string(),
        (false, Some(v)) => fmt_f(v),
        (false, None) => "unfitted".to_string(),
    };
    vec![
        s.kind1.label().into(),
        fmt_tf(f1),
        s.kind2.label().into(),
        fmt_tf(f2),
        s.condition.label().into(),
        "slope".into(),
        value,
    ]
}

fn run_limit_scan(args: &LimitScanArgs) -> berezin::Result<(Report, CommonArgs)> {
    let common = &args.common;
    // five log-spaced points over [1e-3, 1e-1]
    let hbars = hbars_or(common, "1e-1,3.1622776601683794e-2,1e-2,3.1622776601683794e-3,1e-3")?;
    let kinds = parse_pairs(&args.pairs)?;
    let j = ComplexStructure::standard(1);
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let f1 = random_tf(&mut rng, 1);
    let f2 = random_tf(&mut rng, 1);
    let pairs: Vec<(QuantityRef, QuantityRef, Condition)> = kinds
        .iter()
        .map(|(k1, k2, cond)| (quantity(*k1, f1.clone(), &j), quantity(*k2, f2.clone(), &j), *cond))
        .collect();
    let table = berezin::limits::residual_scan(&pairs, &hbars, &j)?;

    let mut rows: Vec<Vec<String>> = table.records.iter().map(residual_row).collect();
    let mut all_pass = true;
    for summary in &table.summaries {
        rows.push(slope_row(summary, &f1, &f2));
        if !summary.exact {
            match summary.slope {
                Some(s) if (0.95..=1.05).contains(&s) => {}
                Some(_) => all_pass = false,
                // too few points for a fit: not a failure, just no slope row value
                None if hbars.len() < 5 => {}
                None => all_pass = false,
            }
        }
    }

    let mut meta = common_meta(common, &hbars, common.n.unwrap_or(0));
    meta.push(("pairs".into(), args.pairs.clone()));
    let report = Report {
        command: "limit-scan",
        meta,
        columns: &["pair_kind_1", "F_1", "pair_kind_2", "F_2", "condition", "hbar", "value"],
        rows,
        all_pass,
    };
    Ok((report, common.clone()))
}

// ---------------------------------------------------------------------------
// rep-verify
// ---------------------------------------------------------------------------

fn run_rep_verify(args: &CommonArgs) -> berezin::Result<(Report, CommonArgs)> {
    let hbars = hbars_or(args, "1")?;
    let hbar = hbars[0];
    let base = args.n.unwrap_or(128);
    let quad = QuadSpec::default();
    let (a, b) = (1.0, 0.0);
    let mut rows = Vec::new();
    let mut residuals = Vec::new();
    for level in 0..3 {
        let n = base << level;
        let grid = GridRep::new(n, args.extent)?;
        let rep = diagram_residual(&grid, hbar, a, b, &quad)?;
        residuals.push(rep.residual);
        rows.push(vec![
            "refinement".into(),
            n.to_string(),
            fmt_f(rep.residual),
            fmt_f(rep.roi_residual),
            String::new(),
        ]);
    }
    let monotone = residuals.windows(2).all(|w| w[1] < w[0]);
    let final_ok = *residuals.last().unwrap() < 1e-4;
    let all_pass = monotone && final_ok;
    rows.push(vec![
        "overall".into(),
        (base << 2).to_string(),
        fmt_f(*residuals.last().unwrap()),
        String::new(),
        all_pass.to_string(),
    ]);
    let report = Report {
        command: "rep-verify",
        meta: common_meta(args, &hbars, base),
        columns: &["check", "n", "residual", "roi_residual", "pass"],
        rows,
        all_pass,
    };
    Ok((report, args.clone()))
}

// ---------------------------------------------------------------------------
// field-energy
// ---------------------------------------------------------------------------

struct IdentityRow {
    identity: &'static str,
    basis: String,
    sum: f64,
    closed: f64,
    note: String,
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn run_field_energy(args: &FieldEnergyArgs) -> berezin::Result<(Report, CommonArgs)> {
    let common = &args.common;
    let hbars = hbars_or(common, "1")?;
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let mut identity_rows: Vec<IdentityRow> = Vec::new();
    let n;
    match args.family {
        Family::KgMinkowski => {
            if common.dim != 1 {
                return Err(berezin::Error::InvalidConfig(format!(
                    "kg-minkowski runs on a 1-d torus, got dim={}",
                    common.dim
                )));
            }
            n = common.n.unwrap_or(256);
            let grid = FieldGrid::torus(1, common.extent, n)?;
            let mu = field::build_mu_minkowski(&grid, common.mass)?;
            let fs = field::complex_structure_minkowski(&mu)?;
            let state = FieldState::scalar(
                field::random_band_limited(&grid, (n as i64 / 4).min(20), &mut rng)?,
                field::random_band_limited(&grid, (n as i64 / 4).min(20), &mut rng)?,
            )?;
            let l2 = field::fourier_l2_basis(&grid, n / 2 - 1)?;
            let closed_n = field::closed_form_total_number(&fs, &state)?;
            for (side, name) in [
                (AlphaSide::Momentum, "alpha-momentum"),
                (AlphaSide::Configuration, "alpha-configuration"),
            ] {
                let basis = field::alpha_basis(&fs, &l2, side)?;
                identity_rows.push(IdentityRow {
                    identity: "total_number",
                    basis: name.into(),
                    sum: field::total_number(&fs, &basis, &state)?,
                    closed: closed_n,
                    note: String::new(),
                });
            }
            identity_rows.push(IdentityRow {
                identity: "hamiltonian",
                basis: "fourier-l2".into(),
                sum: field::hamiltonian(&fs, &l2, &state)?,
                closed: field::closed_form_hamiltonian_minkowski(&grid, common.mass, &state)?,
                note: String::new(),
            });
        }
        Family::KgRindler => {
            if common.dim != 1 {
                return Err(berezin::Error::InvalidConfig(format!(
                    "kg-rindler runs on the 1-d half-line, got dim={}",
                    common.dim
                )));
            }
            n = common.n.unwrap_or(200);
            let grid = FieldGrid::half_line(common.extent, n)?;
            let m2 = field::build_mu_rindler_squared(&grid, common.mass, [0.0, 0.0])?;
            let mu = field::build_mu_rindler(&grid, common.mass, [0.0, 0.0])?;
            let fs = field::complex_structure_from_mu(&mu, 1)?;
            let l2 = field::sine_l2_basis(&grid, n)?;
            // smooth interior state from the low sine modes
            let mut pi = vec![0.0; n];
            let mut phi = vec![0.0; n];
            for e in l2.iter().take(12) {
                let (cp, cq) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                for i in 0..n {
                    pi[i] += cp * e[i];
                    phi[i] += cq * e[i];
                }
            }
            let state = FieldState::scalar(pi, phi)?;
            let closed_n = field::closed_form_total_number(&fs, &state)?;
            for (side, name) in [
                (AlphaSide::Momentum, "alpha-momentum"),
                (AlphaSide::Configuration, "alpha-configuration"),
            ] {
                let basis = field::alpha_basis(&fs, &l2, side)?;
                identity_rows.push(IdentityRow {
                    identity: "total_number",
                    basis: name.into(),
                    sum: field::total_number(&fs, &basis, &state)?,
                    closed: closed_n,
                    note: String::new(),
                });
            }
            identity_rows.push(IdentityRow {
                identity: "hamiltonian",
                basis: "sine-l2".into(),
                sum: field::hamiltonian(&fs, &l2, &state)?,
                closed: field::closed_form_hamiltonian_rindler(&m2, &state)?,
                note: String::new(),
            });
        }
        Family::Maxwell => {
            if common.dim != 3 && common.dim != 1 {
                return Err(berezin::Error::InvalidConfig(format!(
                    "maxwell runs on a 3-d torus, got dim={}",
                    common.dim
                )));
            }
            n = common.n.unwrap_or(24);
            let grid = FieldGrid::torus(3, common.extent, n)?;
            let mu = field::build_mu_maxwell(&grid)?;
            let fs = field::complex_structure_from_mu(&mu, 3)?;
            let band = 2i64;
            // raw band-limited input; auto-projected to the div-free subspace
            let raw_e = [
                field::random_band_limited(&grid, band, &mut rng)?,
                field::random_band_limited(&grid, band, &mut rng)?,
                field::random_band_limited(&grid, band, &mut rng)?,
            ];
            let raw_a = [
                field::random_band_limited(&grid, band, &mut rng)?,
                field::random_band_limited(&grid, band, &mut rng)?,
                field::random_band_limited(&grid, band, &mut rng)?,
            ];
            let mut e = field::helmholtz_project(&grid, &raw_e)?;
            let mut a = field::helmholtz_project(&grid, &raw_a)?;
            for comp in e.iter_mut().chain(a.iter_mut()) {
                let mean = comp.iter().sum::<f64>() / comp.len() as f64;
                for v in comp.iter_mut() {
                    *v -= mean;
                }
            }
            let note = "input state projected to the divergence-free subspace".to_string();
            let state = FieldState::vector(e, a)?;
            let l2 = field::divfree_l2_basis(&grid, band)?;
            let closed_n = field::closed_form_total_number(&fs, &state)?;
            let basis = field::alpha_basis(&fs, &l2, AlphaSide::Momentum)?;
            identity_rows.push(IdentityRow {
                identity: "total_number",
                basis: "alpha-momentum".into(),
                sum: field::total_number(&fs, &basis, &state)?,
                closed: closed_n,
                note: note.clone(),
            });
            identity_rows.push(IdentityRow {
                identity: "hamiltonian",
                basis: "divfree-l2".into(),
                sum: field::hamiltonian(&fs, &l2, &state)?,
                closed: field::closed_form_hamiltonian_maxwell(&grid, &state)?,
                note,
            });
        }
    }

    let threshold = 1e-8;
    let mut all_pass = true;
    let rows: Vec<Vec<String>> = identity_rows
        .iter()
        .map(|r| {
            let err = rel_err(r.sum, r.closed);
            let pass = err <= threshold;
            all_pass &= pass;
            vec![
                r.identity.into(),
                r.basis.clone(),
                fmt_f(r.sum),
                fmt_f(r.closed),
                fmt_f(err),
                fmt_f(threshold),
                pass.to_string(),
                r.note.clone(),
            ]
        })
        .collect();

    let mut meta = common_meta(common, &hbars, n);
    meta.push(("family".into(), args.family.label().into()));
    let report = Report {
        command: "field-energy",
        meta,
        columns: &[
            "identity", "basis", "value_sum", "value_closed", "rel_err", "threshold", "pass",
            "note",
        ],
        rows,
        all_pass,
    };
    Ok((report, common.clone()))
}
