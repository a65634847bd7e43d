use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hamcap::acceptance::{self, AcceptanceOptions};
use hamcap::capacity::{
    capacity_formula, class_family, default_family_level, existence_hamiltonian, orbit_rows_table, verify_existence,
    verify_sharpness, SweepOptions,
};
use hamcap::crosscheck::survey_orbits;
use hamcap::hamiltonians::ProductHamiltonian;
use hamcap::homology::{
    betti, claim6_dims, dim_rows_table, dim_table, morse_crit_table, morse_points_table, rsh_dims, sh_dims,
    t_map_rank, MorseFunction,
};
use hamcap::numeric::{rng_seed_from_env, sweep_table};
use hamcap::orbit_analysis::{action_spectrum, spectrum_table, OrbitKind};
use hamcap::report::{fmt_float, parse_extended, to_stable_json, to_value, CsvTable, OutputDir};
use hamcap::svg::hamiltonian_svg;
use hamcap::{Error, HomotopyClass, PhaseSpaceConfig};

#[derive(Parser)]
#[command(name = "hamcap", version, about = "Periodic orbits and relative capacities on the annulus times a torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct GeometryArgs {
    /// Annulus radius.
    #[arg(long = "R", default_value_t = 1.0, allow_negative_numbers = true)]
    radius: f64,
    /// Marked level, inside (-R, R).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    u: f64,
    /// Torus dimension.
    #[arg(long, default_value_t = 1)]
    n: usize,
}

impl GeometryArgs {
    fn config(&self) -> hamcap::Result<PhaseSpaceConfig> {
        PhaseSpaceConfig::new(self.radius, self.u, self.n)
    }

    fn query(&self) -> Value {
        json!({ "R": self.radius, "u": self.u, "n": self.n })
    }
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Family parameter; positive values give the outer-radial chart,
    /// negative values the three-chart Hamiltonian.
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    /// Marked infimum of the family.
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    /// JSON Hamiltonian to use instead of a built family.
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Directory for report files; a manifest.json lists them.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Clone, Copy)]
struct SweepArgs {
    /// Seeds per numeric sweep.
    #[arg(long, default_value_t = 1000)]
    seed_budget: usize,
}

impl SweepArgs {
    fn options(&self) -> SweepOptions {
        SweepOptions::new(self.seed_budget, rng_seed_from_env())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Table {
    Betti,
    MorseT,
    MorseMinusT,
    Sh,
    Rsh,
    TRank,
    Claim6,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the capacity formula.
    Capacity {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, allow_negative_numbers = true)]
        ell: i64,
        /// Action threshold; `-inf` and `inf` are accepted.
        #[arg(long, value_parser = extended, allow_hyphen_values = true, default_value = "-inf")]
        a: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Enumerate the periodic-orbit families and confirm them by shooting.
    Orbits {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, allow_negative_numbers = true)]
        ell: i64,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Action spectrum of a radial Hamiltonian.
    Spectrum {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, allow_negative_numbers = true)]
        ell: i64,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Certify that the capacity cannot be lowered.
    Sharpness {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, allow_negative_numbers = true)]
        ell: i64,
        #[arg(long, value_parser = extended, allow_hyphen_values = true, default_value = "-inf")]
        a: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Find an orbit with the guaranteed action.
    Exists {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, allow_negative_numbers = true)]
        ell: i64,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Betti numbers, Morse tables and homology dimension tables.
    Homology {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, value_enum)]
        table: Table,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        ell: i64,
        #[arg(long, value_parser = extended, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// SVG of a profile and its derivative with the tangent lines of the
    /// class slope.
    PlotProfile {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, allow_negative_numbers = true)]
        ell: i64,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the acceptance suite.
    Accept {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn extended(text: &str) -> Result<f64, String> {
    parse_extended(text).ok_or_else(|| format!("expected a number, -inf or inf, got {text:?}"))
}

enum Failure {
    Usage(String),
    Verification(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidGeometry(_)
            | Error::InfeasibleSpec(_)
            | Error::InvalidInterval(_)
            | Error::InvalidHypothesis(_)
            | Error::Parse(_) => Failure::Usage(e.to_string()),
            Error::VerificationFailure(_) => Failure::Verification(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

/// One report in up to three renderings.
struct Artifact {
    stem: &'static str,
    json: Value,
    csv: Option<CsvTable>,
    svg: Option<String>,
    summary: String,
}

impl Artifact {
    fn new(stem: &'static str, json: Value, summary: String) -> Self {
        Self {
            stem,
            json,
            csv: None,
            svg: None,
            summary,
        }
    }

    fn render(&self, format: Format) -> Result<String, Failure> {
        let missing = || Failure::Usage(format!("{} output is not available as {}", self.stem, format.extension()));
        match format {
            Format::Json => Ok(to_stable_json(&self.json)?),
            Format::Csv => Ok(self.csv.as_ref().ok_or_else(missing)?.to_csv()?),
            Format::Svg => self.svg.clone().ok_or_else(missing),
        }
    }
}

/// Summary to stdout; with `--output-dir` the report goes to a file, and
/// with only `--format` it goes to stdout instead of the summary.
fn emit(output: &OutputArgs, query: Value, artifacts: &[Artifact]) -> Result<(), Failure> {
    match (&output.output_dir, output.format) {
        (Some(dir), format) => {
            let mut out = OutputDir::create(dir)?;
            for a in artifacts {
                let format = format.unwrap_or(if a.svg.is_some() { Format::Svg } else { Format::Json });
                let name = format!("{}.{}", a.stem, format.extension());
                out.write(&name, &a.render(format)?, query.clone())?;
                println!("{}", a.summary);
            }
            out.finish()?;
        }
        (None, Some(format)) => {
            for a in artifacts {
                print!("{}", a.render(format)?);
            }
        }
        (None, None) => {
            for a in artifacts {
                println!("{}", a.summary);
            }
        }
    }
    Ok(())
}

fn hamiltonian(geometry: &GeometryArgs, ell: i64, family: &FamilyArgs, default_s: f64) -> hamcap::Result<ProductHamiltonian> {
    if let Some(path) = &family.hamiltonian {
        let text = fs::read_to_string(path)?;
        return Ok(serde_json::from_str(&text)?);
    }
    let g = geometry.config()?;
    let c = family.c.unwrap_or_else(|| default_family_level(&g, ell));
    existence_hamiltonian(&class_family(&g, ell, family.s.unwrap_or(default_s), c))
}

fn family_query(geometry: &GeometryArgs, ell: i64, family: &FamilyArgs, default_s: f64) -> Value {
    json!({
        "geometry": geometry.query(),
        "ell": ell,
        "s": family.s.unwrap_or(default_s),
        "c": family.c,
        "hamiltonian": family.hamiltonian.as_ref().map(|p| p.display().to_string()),
    })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Capacity { geometry, ell, a, output } => {
            let g = geometry.config()?;
            let result = capacity_formula(&g, ell, a);
            let query = json!({ "geometry": geometry.query(), "ell": ell, "a": fmt_float(a) });
            let mut artifact = Artifact::new("capacity", to_value(&result)?, fmt_float(result.value));
            let mut table = CsvTable::new(&["R", "u", "n", "ell", "a", "capacity"]);
            table.push(vec![
                fmt_float(g.radius()),
                fmt_float(g.marked_level()),
                g.torus_dim().to_string(),
                ell.to_string(),
                fmt_float(a),
                fmt_float(result.value),
            ]);
            artifact.csv = Some(table);
            emit(&output, query, &[artifact])?;
            Ok(true)
        }
        Command::Orbits { geometry, ell, family, sweep, output } => {
            let h = hamiltonian(&geometry, ell, &family, 4.0)?;
            let class = HomotopyClass::new(ell, h.geometry.torus_dim());
            let survey = survey_orbits(&h, &class, &sweep.options())?;
            let agrees = survey.cross_check.as_ref().is_none_or(|c| c.agrees());
            let mut lines: Vec<String> = survey
                .families
                .iter()
                .map(|f| {
                    format!(
                        "{:?} level {} action {} dimension {}",
                        f.kind,
                        fmt_float(f.level),
                        fmt_float(f.action),
                        f.dimension
                    )
                })
                .collect();
            lines.push(format!(
                "{} seeds, {} distinct orbits found numerically{}",
                survey.seeds,
                survey.clusters.len(),
                match &survey.cross_check {
                    Some(c) => format!(", cross-check {}", verdict(c.agrees())),
                    None => String::new(),
                }
            ));
            let mut families = Artifact::new("orbits", to_value(&survey)?, lines.join("\n"));
            families.csv = Some(spectrum_table(&survey.families));
            let mut runs = Artifact::new("sweep", to_value(&survey.clusters)?, String::new());
            runs.csv = Some(sweep_table(&survey.records));
            let query = family_query(&geometry, ell, &family, 4.0);
            if output.output_dir.is_some() {
                runs.summary = format!("sweep records: {}", survey.records.len());
                emit(&output, query, &[families, runs])?;
            } else {
                emit(&output, query, &[families])?;
            }
            Ok(agrees)
        }
        Command::Spectrum { geometry, ell, family, output } => {
            let h = hamiltonian(&geometry, ell, &family, 4.0)?;
            let class = HomotopyClass::new(ell, h.geometry.torus_dim());
            let spectrum = action_spectrum(&h, &class)?;
            let families = hamcap::orbit_analysis::enumerate_families(&h, &class)?;
            let summary = spectrum.actions().iter().map(|a| fmt_float(*a)).collect::<Vec<_>>().join("\n");
            let mut artifact = Artifact::new("spectrum", to_value(&spectrum)?, summary);
            artifact.csv = Some(spectrum_table(&families));
            emit(&output, family_query(&geometry, ell, &family, 4.0), &[artifact])?;
            Ok(true)
        }
        Command::Sharpness { geometry, ell, a, delta, sweep, output } => {
            let g = geometry.config()?;
            let report = verify_sharpness(&g, ell, a, delta, &sweep.options())?;
            let summary = format!(
                "{} capacity {}{}: {} analytic families, {} numeric convergences of {} seeds, {} with action >= a",
                verdict(report.pass),
                fmt_float(report.capacity_value),
                report
                    .marked_infimum
                    .map(|m| format!(", witness marked infimum {}", fmt_float(m)))
                    .unwrap_or_default(),
                report.analytic_families,
                report.numeric_converged,
                report.seeds,
                report.analytic_violations + report.numeric_violations
            );
            let mut artifact = Artifact::new("sharpness", to_value(&report)?, summary);
            artifact.csv = Some(orbit_rows_table(&report.orbit_table));
            let query = json!({ "geometry": geometry.query(), "ell": ell, "a": fmt_float(a), "delta": delta });
            emit(&output, query, &[artifact])?;
            Ok(report.pass)
        }
        Command::Exists { geometry, ell, family, sweep, output } => {
            let h = hamiltonian(&geometry, ell, &family, hamcap::capacity::WITNESS_S)?;
            let report = verify_existence(&h, ell, &sweep.options())?;
            let witness = match (&report.existence_witness, &report.numeric_witness) {
                (Some(w), _) => format!(
                    "{:?} family at level {} with action {}",
                    w.kind,
                    fmt_float(w.level),
                    fmt_float(w.action)
                ),
                (None, Some(w)) => format!("orbit at level {} with action {}", fmt_float(w.level), fmt_float(w.action)),
                (None, None) => "no orbit".into(),
            };
            let count = report
                .count_lower_bound
                .map(|c| format!(", at least {c} orbits after perturbation"))
                .unwrap_or_default();
            let summary = format!(
                "{} {witness}, bound c - u*ell = {}{count}",
                verdict(report.pass),
                fmt_float(report.action_bound)
            );
            let mut artifact = Artifact::new("exists", to_value(&report)?, summary);
            artifact.csv = Some(orbit_rows_table(&report.orbit_table));
            let query = family_query(&geometry, ell, &family, hamcap::capacity::WITNESS_S);
            emit(&output, query, &[artifact])?;
            Ok(report.pass)
        }
        Command::Homology { geometry, table, ell, a, c, output } => {
            let n = geometry.n;
            let query = json!({
                "geometry": geometry.query(),
                "ell": ell,
                "a": a.map(fmt_float),
                "c": c,
                "table": table.to_possible_value().map(|v| v.get_name().to_string()),
            });
            let need = |x: Option<f64>, flag: &str| x.ok_or_else(|| Failure::Usage(format!("--{flag} is required for this table")));
            let artifact = match table {
                Table::MorseT | Table::MorseMinusT => {
                    let function = if table == Table::MorseT { MorseFunction::FT } else { MorseFunction::FMinusT };
                    let t = morse_crit_table(function, n);
                    let summary = format!(
                        "{} critical points, index counts {:?}, min {}",
                        t.points.len(),
                        t.index_counts(),
                        fmt_float(t.min_value)
                    );
                    let mut artifact = Artifact::new("morse", to_value(&t)?, summary);
                    artifact.csv = Some(morse_points_table(&t));
                    artifact
                }
                _ => {
                    let rows = match table {
                        Table::Betti => {
                            let b = betti(n + 1);
                            dim_table(n, |k| Ok(b.get(k)))?
                        }
                        Table::Claim6 => dim_table(n, |k| Ok(claim6_dims(n, k)))?,
                        Table::Sh => {
                            let (g, a) = (geometry.config()?, need(a, "a")?);
                            dim_table(n, |k| sh_dims(&g, ell, a, k))?
                        }
                        Table::Rsh => {
                            let (g, a, c) = (geometry.config()?, need(a, "a")?, need(c, "c")?);
                            dim_table(n, |k| rsh_dims(&g, ell, a, c, k))?
                        }
                        Table::TRank => {
                            let (g, a, c) = (geometry.config()?, need(a, "a")?, need(c, "c")?);
                            dim_table(n, |k| t_map_rank(&g, ell, a, c, k))?
                        }
                        Table::MorseT | Table::MorseMinusT => unreachable!(),
                    };
                    let summary = rows.iter().map(|r| r.dim.to_string()).collect::<Vec<_>>().join(",");
                    let mut artifact = Artifact::new("homology", to_value(&rows)?, summary);
                    artifact.csv = Some(dim_rows_table(&rows));
                    artifact
                }
            };
            emit(&output, query, &[artifact])?;
            Ok(true)
        }
        Command::PlotProfile { geometry, ell, family, output } => {
            let h = hamiltonian(&geometry, ell, &family, 4.0)?;
            let title = format!("profile for class {ell}");
            let svg = hamiltonian_svg(&h, ell, &title)?;
            let class = HomotopyClass::new(ell, h.geometry.torus_dim());
            let families = hamcap::orbit_analysis::enumerate_families(&h, &class)?;
            let tangents = families.iter().filter(|f| f.kind != OrbitKind::Contractible).count();
            let mut artifact = Artifact::new(
                "profile",
                to_value(&h)?,
                format!("profile plot with {tangents} tangency families"),
            );
            artifact.svg = Some(svg);
            let output = OutputArgs {
                output_dir: output.output_dir,
                format: output.format.or(Some(Format::Svg)),
            };
            emit(&output, family_query(&geometry, ell, &family, 4.0), &[artifact])?;
            Ok(true)
        }
        Command::Accept { sweep, output } => {
            let opts = AcceptanceOptions {
                seeds: sweep.seed_budget,
                rng_seed: rng_seed_from_env(),
            };
            let mut pass = true;
            let mut outcomes = Vec::new();
            for criterion in 1..=7 {
                let o = match criterion {
                    1 => acceptance::criterion_1(&opts),
                    2 => acceptance::criterion_2(&opts),
                    3 => acceptance::criterion_3(&opts),
                    4 => acceptance::criterion_4(),
                    5 => acceptance::criterion_5(),
                    6 => acceptance::criterion_6(&opts),
                    _ => acceptance::criterion_7(),
                };
                if output.output_dir.is_some() || output.format.is_none() {
                    println!("{}", o.line());
                }
                pass &= o.pass;
                outcomes.push(o);
            }
            let mut table = CsvTable::new(&["criterion", "name", "pass", "seconds", "detail"]);
            for o in &outcomes {
                table.push(vec![
                    o.id.to_string(),
                    o.name.to_string(),
                    o.pass.to_string(),
                    format!("{:.1}", o.seconds),
                    o.detail.clone(),
                ]);
            }
            if output.output_dir.is_some() || output.format.is_some() {
                let mut artifact = Artifact::new("acceptance", to_value(&outcomes)?, verdict(pass).to_string());
                artifact.csv = Some(table);
                emit(&output, json!({ "seedBudget": sweep.seed_budget }), &[artifact])?;
            }
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) | Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
