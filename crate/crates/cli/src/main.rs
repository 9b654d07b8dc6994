//! `okdh`: command-line frontend for okdh-core.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use serde_json::Value;

use okdh_core::formats::{BodyExport, FiltrationSpec, ModelSpec};
use okdh_core::lattice::rational::{format_rational, int, to_decimal};
use okdh_core::measures::{self, Measure};
use okdh_core::okounkov::{self, ConcaveTransform, FilteredBody};
use okdh_core::restricted::{self, DivisorData};
use okdh_core::{Rational, ToricModel, WeightFiltration};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    VanishingNumbers,
    Measure,
    LimitMeasure,
    Converge,
    OkounkovBody,
    FilteredBody,
    RestrictedVolume,
    #[value(name = "verify-theorem5")]
    VerifyTheorem5,
}

impl Command {
    fn stem(self) -> &'static str {
        match self {
            Command::VanishingNumbers => "vanishing-numbers",
            Command::Measure => "measure",
            Command::LimitMeasure => "limit-measure",
            Command::Converge => "converge",
            Command::OkounkovBody => "okounkov-body",
            Command::FilteredBody => "filtered-body",
            Command::RestrictedVolume => "restricted-volume",
            Command::VerifyTheorem5 => "verify-theorem5",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

/// Exact filtered section rings on toric models.
#[derive(Debug, Parser)]
#[command(name = "okdh", version)]
struct RunConfig {
    command: Command,
    /// Model specification (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Filtration specification (JSON).
    #[arg(long)]
    filtration: Option<PathBuf>,
    /// Level m.
    #[arg(long)]
    m: Option<u64>,
    /// Comma-separated increasing levels.
    #[arg(long, value_delimiter = ',')]
    m_list: Vec<u64>,
    /// Number of grid steps on [0, a_max] for restricted-volume.
    #[arg(long, default_value_t = 20)]
    steps: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "csv")]
    format: Vec<Format>,
}

#[derive(Debug)]
enum CliError {
    Core(okdh_core::Error),
    Input(String),
    Io(PathBuf, std::io::Error),
}

impl From<okdh_core::Error> for CliError {
    fn from(e: okdh_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(s) => f.write_str(s),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn dec(r: &Rational) -> String {
    to_decimal(r, 20)
}

/// Reads a model or filtration file. Documents the CLI emits embed their inputs under `key`; those are
/// accepted too, so every emitted JSON can be fed back in.
fn read_spec(path: &Path, key: &str) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: invalid JSON: {e}", path.display())))?;
    Ok(match v.get(key) {
        Some(inner) => inner.clone(),
        None => v,
    })
}

fn decode<T: serde::de::DeserializeOwned>(path: &Path, v: Value) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

struct Inputs {
    model_spec: ModelSpec,
    model: Arc<ToricModel>,
    filtration: Option<(FiltrationSpec, WeightFiltration)>,
}

impl Inputs {
    fn load(cfg: &RunConfig) -> CliResult<Self> {
        let model_spec: ModelSpec = decode(&cfg.model, read_spec(&cfg.model, "model")?)?;
        let model = Arc::new(model_spec.to_model()?);
        let filtration = match &cfg.filtration {
            Some(path) => {
                let spec: FiltrationSpec = decode(path, read_spec(path, "filtration")?)?;
                let filt = spec.to_filtration(model.clone())?;
                Some((spec, filt))
            }
            None => None,
        };
        Ok(Self {
            model_spec,
            model,
            filtration,
        })
    }

    fn filtration(&self) -> CliResult<&WeightFiltration> {
        self.filtration
            .as_ref()
            .map(|f| &f.1)
            .ok_or_else(|| CliError::Input("--filtration is required for this command".into()))
    }

    /// JSON document embedding the inputs next to `payload`.
    fn document(&self, payload: Value) -> Value {
        let mut doc = serde_json::Map::new();
        doc.insert(
            "model".into(),
            serde_json::to_value(&self.model_spec).expect("serializable"),
        );
        if let Some((spec, _)) = &self.filtration {
            doc.insert(
                "filtration".into(),
                serde_json::to_value(spec).expect("serializable"),
            );
        }
        if let Value::Object(fields) = payload {
            doc.extend(fields);
        }
        Value::Object(doc)
    }
}

fn level(cfg: &RunConfig) -> CliResult<u64> {
    match cfg.m {
        Some(0) => Err(CliError::Input(
            "--m: value 0 is not a positive level".into(),
        )),
        Some(m) => Ok(m),
        None => Err(CliError::Input("--m is required for this command".into())),
    }
}

/// Artifacts of one run, keyed by format.
#[derive(Default)]
struct Artifacts {
    csv: Option<String>,
    json: Option<Value>,
    svg: Option<CliResult<String>>,
    summary: String,
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
}

fn atoms_json(atoms: &[(Rational, Rational)]) -> Value {
    atoms
        .iter()
        .map(|(t, w)| serde_json::json!({"t": format_rational(t), "mass": format_rational(w)}))
        .collect()
}

fn poly_json(p: &okdh_core::Polynomial) -> Value {
    p.coeffs().iter().map(format_rational).collect()
}

fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn vanishing_numbers(inputs: &Inputs, cfg: &RunConfig) -> CliResult<Artifacts> {
    let m = level(cfg)?;
    let vn = inputs.filtration()?.vanishing_numbers(m)?;
    let csv = csv_table(
        &["j", "a_j", "a_j_decimal"],
        vn.values
            .iter()
            .enumerate()
            .map(|(j, a)| vec![(j + 1).to_string(), format_rational(a), dec(a)]),
    );
    let json = inputs.document(serde_json::json!({
        "m": m,
        "vanishing_numbers": rationals(&vn.values),
        "mass_plus": format_rational(&vn.mass_plus()),
    }));
    Ok(Artifacts {
        summary: format!(
            "h0({m}) = {}, a_max = {}, a_min = {}",
            vn.len(),
            vn.a_max(),
            vn.a_min()
        ),
        csv: Some(csv),
        json: Some(json),
        svg: None,
    })
}

fn atom_table(atoms: &[(Rational, Rational)]) -> String {
    csv_table(
        &["t", "mass", "t_decimal", "mass_decimal"],
        atoms
            .iter()
            .map(|(t, w)| vec![format_rational(t), format_rational(w), dec(t), dec(w)]),
    )
}

fn measure(inputs: &Inputs, cfg: &RunConfig) -> CliResult<Artifacts> {
    let m = level(cfg)?;
    let nu = measures::nu_m(inputs.filtration()?, m)?;
    let e = nu.expectation();
    let json = inputs.document(serde_json::json!({
        "m": m,
        "atoms": atoms_json(nu.atoms()),
        "expectation": format_rational(&e),
    }));
    Ok(Artifacts {
        summary: format!("E(nu_{m}) = {e}"),
        csv: Some(atom_table(nu.atoms())),
        json: Some(json),
        svg: Some(svg::plot_measure(&nu.clone().into(), None).map_err(CliError::from)),
    })
}

fn limit_measure(inputs: &Inputs, cfg: &RunConfig) -> CliResult<Artifacts> {
    let filt = inputs.filtration()?;
    let nu = measures::limit_measure_nu(filt)?;
    let overlay = match cfg.m {
        Some(_) => Some(measures::nu_m(filt, level(cfg)?)?),
        None => None,
    };
    let mut rows: Vec<Vec<String>> = nu
        .breakpoints
        .windows(2)
        .zip(&nu.densities)
        .map(|(w, p)| {
            vec![
                "density".into(),
                format_rational(&w[0]),
                format_rational(&w[1]),
                p.to_string(),
            ]
        })
        .collect();
    rows.extend(nu.atoms.iter().map(|(t, w)| {
        vec![
            "atom".into(),
            format_rational(t),
            format_rational(t),
            format_rational(w),
        ]
    }));
    let e = nu.expectation();
    let json = inputs.document(serde_json::json!({
        "breakpoints": rationals(&nu.breakpoints),
        "densities": nu.densities.iter().map(poly_json).collect::<Vec<_>>(),
        "atoms": atoms_json(&nu.atoms),
        "expectation": format_rational(&e),
    }));
    let measure: Measure = nu.into();
    Ok(Artifacts {
        summary: format!("E(nu) = {e}"),
        csv: Some(csv_table(&["kind", "lo", "hi", "value"], rows)),
        json: Some(json),
        svg: Some(svg::plot_measure(&measure, overlay.as_ref()).map_err(CliError::from)),
    })
}

fn converge(inputs: &Inputs, cfg: &RunConfig) -> CliResult<Artifacts> {
    let rows = measures::convergence_sweep(inputs.filtration()?, &cfg.m_list)?;
    let csv = csv_table(
        &[
            "m",
            "E_nu_m",
            "E_nu_m_decimal",
            "kolmogorov",
            "kolmogorov_decimal",
        ],
        rows.iter().map(|r| {
            vec![
                r.m.to_string(),
                format_rational(&r.expectation),
                dec(&r.expectation),
                format_rational(&r.kolmogorov),
                dec(&r.kolmogorov),
            ]
        }),
    );
    let json = inputs.document(serde_json::json!({ "rows": rows }));
    let pts: Vec<(Rational, Rational)> = rows
        .iter()
        .map(|r| (int(r.m as i64), r.kolmogorov.clone()))
        .collect();
    let ((x0, x1), (_, y1)) = svg::bounds(&pts);
    let mut canvas = svg::Canvas::new((x0, x1), (Rational::default(), y1));
    canvas.polyline(&pts, "steelblue");
    for p in &pts {
        canvas.marker(p, "steelblue");
    }
    let last = rows.last().expect("nonempty sweep");
    Ok(Artifacts {
        summary: format!(
            "m = {}: E(nu_m) = {}, d_K = {}",
            last.m, last.expectation, last.kolmogorov
        ),
        csv: Some(csv),
        json: Some(json),
        svg: Some(Ok(canvas.finish("m", "Kolmogorov distance"))),
    })
}

fn body_artifacts(
    inputs: &Inputs,
    body: &okdh_core::RationalPolytope,
    svg: Option<CliResult<String>>,
    summary: String,
) -> Artifacts {
    let export = BodyExport::new(body);
    let csv = csv_table(
        &(0..body.dim())
            .map(|i| format!("x{}", i + 1))
            .collect::<Vec<_>>()
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>(),
        export.vertices.clone(),
    );
    let json = inputs.document(serde_json::json!({ "body": export }));
    Artifacts {
        summary,
        csv: Some(csv),
        json: Some(json),
        svg,
    }
}

fn okounkov_body(inputs: &Inputs) -> CliResult<Artifacts> {
    let body = okounkov::okounkov_body(&inputs.model);
    let svg = match body.dim() {
        1 => {
            let v = body.vertices();
            let pts: Vec<(Rational, Rational)> = v
                .iter()
                .map(|x| (x[0].clone(), Rational::default()))
                .collect();
            let ((x0, x1), _) = svg::bounds(&pts);
            let mut c = svg::Canvas::new((x0, x1), (int(-1), int(1)));
            c.polyline(&pts, "black");
            Ok(c.finish("x1", ""))
        }
        2 => {
            let pts = svg::ccw(body.vertices());
            let (xr, yr) = svg::bounds(&pts);
            let mut c = svg::Canvas::new(xr, yr);
            c.polygon(&pts, "steelblue");
            Ok(c.finish("x1", "x2"))
        }
        d => Err(CliError::Input(format!(
            "--format svg: bodies of dimension {d} cannot be drawn"
        ))),
    };
    let summary = format!(
        "{} vertices, volume {}",
        body.vertices().len(),
        body.volume()
    );
    Ok(body_artifacts(inputs, &body, Some(svg), summary))
}

fn filtered_body(inputs: &Inputs) -> CliResult<Artifacts> {
    let filt = inputs.filtration()?;
    let fb = FilteredBody::new(filt);
    let h = okounkov::slice_volume_function(filt)?;
    let volume = okounkov::filtered_body_volume(filt)?;
    let svg = match filt.dim() {
        1 => {
            let pts = svg::ccw(fb.body().vertices());
            let (xr, yr) = svg::bounds(&pts);
            let mut c = svg::Canvas::new(xr, yr);
            c.polygon(&pts, "steelblue");
            Ok(c.finish("x1", "G"))
        }
        2 => {
            let g = ConcaveTransform::new(filt);
            let outline = svg::ccw(g.domain().vertices());
            let (xr, yr) = svg::bounds(&outline);
            let mut c = svg::Canvas::new(xr, yr);
            c.polygon(&outline, "white");
            for t in fb.vertex_heights() {
                let level = g.superlevel_set(&t);
                if level.vertices().len() >= 3 {
                    c.polygon(&svg::ccw(level.vertices()), "steelblue");
                }
            }
            Ok(c.finish("x1", "x2"))
        }
        d => Err(CliError::Input(format!(
            "--format svg: domains of dimension {d} cannot be drawn"
        ))),
    };
    let mut a = body_artifacts(inputs, fb.body(), Some(svg), format!("volume {volume}"));
    a.csv = Some(csv_table(
        &["lo", "hi", "slice_volume"],
        h.breakpoints.windows(2).zip(&h.pieces).map(|(w, p)| {
            vec![
                format_rational(&w[0]),
                format_rational(&w[1]),
                p.to_string(),
            ]
        }),
    ));
    if let Some(Value::Object(doc)) = a.json.as_mut() {
        doc.insert("volume".into(), Value::String(format_rational(&volume)));
        doc.insert("slice_breakpoints".into(), rationals(&h.breakpoints).into());
        doc.insert(
            "slice_volumes".into(),
            h.pieces.iter().map(poly_json).collect(),
        );
    }
    Ok(a)
}

fn restricted_volume(inputs: &Inputs, cfg: &RunConfig) -> CliResult<Artifacts> {
    if cfg.steps == 0 {
        return Err(CliError::Input(
            "--steps: value 0 is not a positive step count".into(),
        ));
    }
    let div = DivisorData::from_filtration(inputs.filtration()?)?;
    let vol = restricted::volume_function(&div)?;
    let nu = measures::limit_measure_nu(div.filtration())?;
    let top = div.filtration().a_max_limit();
    let rows: Vec<[Rational; 4]> = (0..cfg.steps)
        .map(|k| {
            let t = &top * Rational::new(k.into(), cfg.steps.into());
            let r = restricted::restricted_volume(&div, &t)?;
            Ok([t.clone(), vol.eval(&t), r, nu.density_at(&t)])
        })
        .collect::<okdh_core::Result<_>>()?;
    let csv = csv_table(
        &[
            "t",
            "vol_L_minus_tE",
            "restricted_vol",
            "nu_density",
            "t_decimal",
            "vol_L_minus_tE_decimal",
            "restricted_vol_decimal",
            "nu_density_decimal",
        ],
        rows.iter().map(|r| {
            let mut row: Vec<String> = r.iter().map(format_rational).collect();
            row.extend(r.iter().map(dec));
            row
        }),
    );
    let json = inputs.document(serde_json::json!({
        "breakpoints": rationals(&vol.breakpoints),
        "vol_L_minus_tE": vol.pieces.iter().map(poly_json).collect::<Vec<_>>(),
        "restricted_vol": vol.restricted_pieces().iter().map(poly_json).collect::<Vec<_>>(),
        "rows": rows.iter().map(|r| rationals(r)).collect::<Vec<_>>(),
    }));
    Ok(Artifacts {
        summary: format!("a_max = {top}, Vol(L) = {}", vol.eval(&Rational::default())),
        csv: Some(csv),
        json: Some(json),
        svg: None,
    })
}

fn verify_theorem5(inputs: &Inputs) -> CliResult<Artifacts> {
    let div = DivisorData::from_filtration(inputs.filtration()?)?;
    let report = restricted::verify_theorem_5(&div)?;
    if !report.pass() {
        return Err(CliError::Core(okdh_core::Error::Invariant(format!(
            "limit measure does not match restricted volumes:\n{report}"
        ))));
    }
    let intervals: Vec<Value> = report
        .intervals
        .iter()
        .map(|c| {
            serde_json::json!({
                "lo": format_rational(&c.lo),
                "hi": format_rational(&c.hi),
                "nu_density": poly_json(&c.nu_density),
                "restricted_density": poly_json(&c.restricted_density),
                "pass": c.pass,
            })
        })
        .collect();
    let csv = csv_table(
        &["lo", "hi", "nu_density", "restricted_density", "pass"],
        report.intervals.iter().map(|c| {
            vec![
                format_rational(&c.lo),
                format_rational(&c.hi),
                c.nu_density.to_string(),
                c.restricted_density.to_string(),
                c.pass.to_string(),
            ]
        }),
    );
    let json = inputs.document(serde_json::json!({
        "intervals": intervals,
        "absolutely_continuous": report.absolutely_continuous,
        "differentiable": report.differentiable,
        "a_max_limit": format_rational(&report.a_max_limit),
        "big_threshold": format_rational(&report.big_threshold),
        "pass": report.pass(),
    }));
    Ok(Artifacts {
        summary: report.to_string(),
        csv: Some(csv),
        json: Some(json),
        svg: None,
    })
}

fn write(path: PathBuf, contents: &str) -> CliResult<PathBuf> {
    fs::write(&path, contents).map_err(|e| CliError::Io(path.clone(), e))?;
    Ok(path)
}

fn run(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let inputs = Inputs::load(cfg)?;
    let artifacts = match cfg.command {
        Command::VanishingNumbers => vanishing_numbers(&inputs, cfg)?,
        Command::Measure => measure(&inputs, cfg)?,
        Command::LimitMeasure => limit_measure(&inputs, cfg)?,
        Command::Converge => converge(&inputs, cfg)?,
        Command::OkounkovBody => okounkov_body(&inputs)?,
        Command::FilteredBody => filtered_body(&inputs)?,
        Command::RestrictedVolume => restricted_volume(&inputs, cfg)?,
        Command::VerifyTheorem5 => verify_theorem5(&inputs)?,
    };
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::Io(cfg.out.clone(), e))?;
    let mut formats = cfg.format.clone();
    formats.sort();
    formats.dedup();
    let stem = cfg.command.stem();
    let mut written = Vec::new();
    let Artifacts {
        csv,
        json,
        svg,
        summary,
    } = artifacts;
    let mut svg = svg;
    for f in formats {
        let path = cfg.out.join(format!(
            "{stem}.{}",
            match f {
                Format::Csv => "csv",
                Format::Json => "json",
                Format::Svg => "svg",
            }
        ));
        let contents = match f {
            Format::Csv => csv.clone(),
            Format::Json => json.as_ref().map(|v| {
                let mut s = serde_json::to_string_pretty(v).expect("serializable");
                s.push('\n');
                s
            }),
            Format::Svg => svg.take().transpose()?,
        };
        let contents = contents
            .ok_or_else(|| CliError::Input(format!("--format: {stem} has no {f:?} output")))?;
        written.push(write(path, &contents)?);
    }
    println!("{summary}");
    Ok(written)
}

fn configure_threads() -> CliResult<()> {
    let Some(raw) = std::env::var_os("OKDH_THREADS") else {
        return Ok(());
    };
    let raw = raw.to_string_lossy().into_owned();
    let n: usize = raw.parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Input(format!("OKDH_THREADS: {raw:?} is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(format!("OKDH_THREADS: {e}")))
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|()| run(&cfg));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let internal = matches!(&e, CliError::Core(c) if c.is_internal());
            ExitCode::from(if internal { 2 } else { 1 })
        }
    }
}
