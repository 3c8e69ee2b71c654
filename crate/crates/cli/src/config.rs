//! Flat `key: value` configuration files and per-experiment key tables.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use magnon_entangle::magnonics_de::MaterialFilm;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Experiment {
    Dynamics,
    ProtocolCurve,
    Benchmark,
    Directional,
    NvYig,
    Transient,
    ZetaVar,
    DistanceVar,
    Spectrum,
    Validate,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::Dynamics,
        Experiment::ProtocolCurve,
        Experiment::Benchmark,
        Experiment::Directional,
        Experiment::NvYig,
        Experiment::Transient,
        Experiment::ZetaVar,
        Experiment::DistanceVar,
        Experiment::Spectrum,
        Experiment::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Dynamics => "dynamics",
            Experiment::ProtocolCurve => "protocol-curve",
            Experiment::Benchmark => "benchmark",
            Experiment::Directional => "directional",
            Experiment::NvYig => "nv-yig",
            Experiment::Transient => "transient",
            Experiment::ZetaVar => "zeta-var",
            Experiment::DistanceVar => "distance-var",
            Experiment::Spectrum => "spectrum",
            Experiment::Validate => "validate",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    /// Scalar summaries default to JSON, data sweeps to CSV.
    pub fn default_format(self) -> Format {
        match self {
            Experiment::NvYig => Format::Json,
            _ => Format::Csv,
        }
    }

    pub fn keys(self) -> Vec<KeySpec> {
        key_table(self)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Bool(bool),
    Text(String),
    List(Vec<f64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(x) => write!(f, "{x}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(s) => f.write_str(s),
            Value::List(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(", "))
            }
        }
    }
}

/// Parses a raw value: booleans, numbers, comma-separated number lists,
/// otherwise text with optional surrounding quotes.
pub fn parse_value(raw: &str) -> Value {
    let raw = raw.trim();
    match raw {
        "true" => return Value::Bool(true),
        "false" => return Value::Bool(false),
        _ => {}
    }
    if let Ok(x) = raw.parse::<f64>() {
        return Value::Number(x);
    }
    if raw.contains(',') {
        let parsed: Result<Vec<f64>, _> = raw.split(',').map(|p| p.trim().parse::<f64>()).collect();
        if let Ok(xs) = parsed {
            return Value::List(xs);
        }
    }
    let unquoted = raw
        .strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(raw);
    Value::Text(unquoted.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Bounds {
    pub const fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub const fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
        }
    }

    pub const fn positive() -> Self {
        Self {
            lo: 0.0,
            hi: f64::INFINITY,
            lo_open: true,
            hi_open: true,
        }
    }

    pub const fn non_negative() -> Self {
        Self {
            lo: 0.0,
            hi: f64::INFINITY,
            lo_open: false,
            hi_open: true,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        if x.is_nan() {
            return false;
        }
        let lo_ok = if self.lo_open {
            x > self.lo
        } else {
            x >= self.lo
        };
        let hi_ok = if self.hi_open {
            x < self.hi
        } else {
            x <= self.hi
        };
        lo_ok && hi_ok
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    Float(Bounds),
    /// Absent unless given.
    OptFloat(Bounds),
    Int {
        min: usize,
        max: usize,
    },
    Choice(&'static [&'static str]),
    FloatList(Bounds),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Option<Value>,
    pub unit: &'static str,
    pub doc: &'static str,
}

fn float(
    name: &'static str,
    default: f64,
    b: Bounds,
    unit: &'static str,
    doc: &'static str,
) -> KeySpec {
    KeySpec {
        name,
        kind: Kind::Float(b),
        default: Some(Value::Number(default)),
        unit,
        doc,
    }
}

fn opt_float(name: &'static str, b: Bounds, unit: &'static str, doc: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind: Kind::OptFloat(b),
        default: None,
        unit,
        doc,
    }
}

fn int(name: &'static str, default: usize, min: usize, max: usize, doc: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind: Kind::Int { min, max },
        default: Some(Value::Number(default as f64)),
        unit: "count",
        doc,
    }
}

fn list(
    name: &'static str,
    default: &[f64],
    b: Bounds,
    unit: &'static str,
    doc: &'static str,
) -> KeySpec {
    KeySpec {
        name,
        kind: Kind::FloatList(b),
        default: Some(Value::List(default.to_vec())),
        unit,
        doc,
    }
}

fn choice(
    name: &'static str,
    default: &'static str,
    options: &'static [&'static str],
    doc: &'static str,
) -> KeySpec {
    KeySpec {
        name,
        kind: Kind::Choice(options),
        default: Some(Value::Text(default.to_string())),
        unit: "label",
        doc,
    }
}

const F_T: Bounds = Bounds::open(0.0, 1.0);
const UNIT_RATE: &str = "J_q";
const UNIT_TIME: &str = "1/J_q";
const DIMLESS: &str = "dimensionless";

fn key_table(exp: Experiment) -> Vec<KeySpec> {
    let f_threshold = || float("f_threshold", 0.95, F_T, DIMLESS, "fidelity threshold F_T");
    match exp {
        Experiment::Dynamics => vec![
            float(
                "j_over_omega",
                50.0,
                Bounds::positive(),
                DIMLESS,
                "J_q / Omega",
            ),
            float(
                "delta",
                0.0,
                Bounds::closed(-1e6, 1e6),
                UNIT_RATE,
                "detuning omega_q - omega_d",
            ),
            float(
                "phase",
                0.0,
                Bounds::closed(-1e6, 1e6),
                "rad",
                "k_q r_{2,1}",
            ),
            float("t_max", 10.0, Bounds::positive(), UNIT_TIME, "final time"),
            int("points", 201, 2, 1_000_000, "number of time samples"),
            opt_float("t1", Bounds::positive(), UNIT_TIME, "qubit lifetime"),
            opt_float(
                "t_phi",
                Bounds::positive(),
                UNIT_TIME,
                "qubit dephasing time",
            ),
        ],
        Experiment::ProtocolCurve => vec![
            f_threshold(),
            float(
                "zeta_min",
                0.02,
                Bounds::positive(),
                DIMLESS,
                "smallest zeta on the grid",
            ),
            opt_float(
                "zeta_max",
                Bounds::positive(),
                DIMLESS,
                "largest zeta; defaults to just below zeta_T",
            ),
            int("points", 40, 2, 100_000, "number of log-spaced zeta values"),
            opt_float("t1", Bounds::positive(), UNIT_TIME, "qubit lifetime"),
            opt_float(
                "t_phi",
                Bounds::positive(),
                UNIT_TIME,
                "qubit dephasing time",
            ),
        ],
        Experiment::Benchmark => vec![list(
            "f_thresholds",
            &[0.95, 0.97, 0.99],
            F_T,
            DIMLESS,
            "fidelity thresholds",
        )],
        Experiment::Directional => vec![
            f_threshold(),
            float(
                "jl_min",
                1e-5,
                Bounds::positive(),
                DIMLESS,
                "smallest j_l / j_r",
            ),
            float(
                "jl_max",
                1.0,
                Bounds::positive(),
                DIMLESS,
                "largest j_l / j_r",
            ),
            int(
                "jl_points",
                11,
                1,
                10_000,
                "number of log-spaced j_l / j_r values",
            ),
            float(
                "phase_max",
                2.0 * PI,
                Bounds::non_negative(),
                "rad",
                "largest phase_l",
            ),
            int(
                "phase_points",
                9,
                1,
                10_000,
                "number of phases in [0, phase_max]",
            ),
        ],
        Experiment::NvYig => {
            let t = MaterialFilm::table_one();
            vec![
                float(
                    "d0",
                    t.d0,
                    Bounds::positive(),
                    "rad/s",
                    "NV zero-field splitting",
                ),
                float(
                    "gamma_s",
                    t.gamma_s,
                    Bounds::positive(),
                    "1/(T s)",
                    "gyromagnetic ratio",
                ),
                float("d", t.d, Bounds::positive(), "m", "film thickness"),
                float(
                    "l_y",
                    t.l_y,
                    Bounds::positive(),
                    "m",
                    "film length along propagation",
                ),
                float(
                    "l_z",
                    t.l_z,
                    Bounds::positive(),
                    "m",
                    "film width along the field",
                ),
                float(
                    "d_ex",
                    t.d_ex,
                    Bounds::non_negative(),
                    "m^2",
                    "exchange stiffness",
                ),
                float(
                    "m_s",
                    t.m_s,
                    Bounds::positive(),
                    "A/m",
                    "saturation magnetization",
                ),
                float(
                    "d_nv",
                    t.d_nv,
                    Bounds::positive(),
                    "m",
                    "NV height above the film",
                ),
                float(
                    "mu0_h0",
                    t.mu0_h0,
                    Bounds::positive(),
                    "T",
                    "external field",
                ),
                float("tau_m", t.tau_m, Bounds::positive(), "s", "magnon lifetime"),
                choice("spin", "one", &["one", "half"], "emitter spin model"),
                f_threshold(),
                float(
                    "k_max_d",
                    10.0,
                    Bounds::positive(),
                    DIMLESS,
                    "largest |k| d on the dispersion grid",
                ),
                int(
                    "k_points",
                    201,
                    2,
                    100_000,
                    "wave numbers on [-k_max, k_max]",
                ),
            ]
        }
        Experiment::Transient => vec![
            list(
                "zetas",
                &[0.27, 0.22, 0.13],
                Bounds::positive(),
                DIMLESS,
                "drive parameters",
            ),
            float("t_max", 1000.0, Bounds::positive(), UNIT_TIME, "final time"),
            int("points", 201, 2, 1_000_000, "number of time samples"),
        ],
        Experiment::ZetaVar => vec![
            list(
                "f_thresholds",
                &[0.95, 0.97, 0.99],
                F_T,
                DIMLESS,
                "fidelity thresholds",
            ),
            float(
                "err_min",
                -0.5,
                Bounds::open(-1.0, f64::INFINITY),
                DIMLESS,
                "smallest relative error of zeta",
            ),
            float(
                "err_max",
                0.5,
                Bounds::open(-1.0, f64::INFINITY),
                DIMLESS,
                "largest relative error of zeta",
            ),
            int("points", 21, 1, 100_000, "number of relative errors"),
        ],
        Experiment::DistanceVar => vec![
            float("zeta", 0.27, Bounds::positive(), DIMLESS, "drive parameter"),
            f_threshold(),
            float(
                "phase_max",
                PI,
                Bounds::non_negative(),
                "rad",
                "largest k_q r_{2,1}",
            ),
            int(
                "points",
                101,
                1,
                100_000,
                "number of phases in [0, phase_max]",
            ),
        ],
        Experiment::Spectrum => vec![
            float(
                "r_min",
                0.5,
                Bounds::positive(),
                DIMLESS,
                "smallest R = J_q / (2 Omega)",
            ),
            float("r_max", 8.0, Bounds::positive(), DIMLESS, "largest R"),
            int(
                "points",
                151,
                1,
                100_000,
                "number of linearly spaced R values",
            ),
        ],
        Experiment::Validate => vec![int(
            "cases",
            20,
            1,
            10_000,
            "randomized cases per invariant",
        )],
    }
}

/// One `key: value` entry of a config document.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: Value,
    pub line: usize,
}

/// Splits a config document into entries. `#` starts a comment.
pub fn parse_document(text: &str) -> Result<Vec<Entry>, CliError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once(':') else {
            return Err(CliError::config(format!(
                "line {line}: expected `key: value`, got `{content}`"
            )));
        };
        let key = key.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(CliError::config(format!(
                "line {line}: invalid key `{key}`"
            )));
        }
        if value.trim().is_empty() {
            return Err(CliError::config(format!(
                "line {line}: key `{key}` has no value"
            )));
        }
        if let Some(first) = entries.iter().find(|e| e.key == key) {
            return Err(CliError::config(format!(
                "duplicate key `{key}` at lines {} and {line}",
                first.line
            )));
        }
        entries.push(Entry {
            key: key.to_string(),
            value: parse_value(value),
            line,
        });
    }
    Ok(entries)
}

/// Resolved, range-checked parameters of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub parameters: BTreeMap<String, Value>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn f64(&self, key: &str) -> f64 {
        match self.parameters.get(key) {
            Some(Value::Number(x)) => *x,
            other => panic!("parameter `{key}` is not a number: {other:?}"),
        }
    }

    pub fn opt_f64(&self, key: &str) -> Option<f64> {
        match self.parameters.get(key) {
            Some(Value::Number(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn usize(&self, key: &str) -> usize {
        self.f64(key) as usize
    }

    pub fn list(&self, key: &str) -> &[f64] {
        match self.parameters.get(key) {
            Some(Value::List(xs)) => xs,
            other => panic!("parameter `{key}` is not a list: {other:?}"),
        }
    }

    pub fn text(&self, key: &str) -> &str {
        match self.parameters.get(key) {
            Some(Value::Text(s)) => s,
            other => panic!("parameter `{key}` is not text: {other:?}"),
        }
    }

    pub fn unit(&self, key: &str) -> &'static str {
        self.experiment
            .keys()
            .into_iter()
            .find(|k| k.name == key)
            .map_or("", |k| k.unit)
    }
}

fn check_value(spec: &KeySpec, value: Value, origin: &str) -> Result<Value, CliError> {
    let name = spec.name;
    let bad = |msg: String| Err(CliError::config(format!("{origin}: key `{name}` {msg}")));
    match (&spec.kind, value) {
        (Kind::Float(b) | Kind::OptFloat(b), Value::Number(x)) => {
            if b.contains(x) {
                Ok(Value::Number(x))
            } else {
                bad(format!("= {x} is outside {b}"))
            }
        }
        (Kind::Int { min, max }, Value::Number(x)) => {
            if x.fract() == 0.0 && x >= *min as f64 && x <= *max as f64 {
                Ok(Value::Number(x))
            } else {
                bad(format!("= {x} must be an integer in [{min}, {max}]"))
            }
        }
        (Kind::FloatList(_), Value::Number(x)) => check_value(spec, Value::List(vec![x]), origin),
        (Kind::FloatList(b), Value::List(xs)) => match xs.iter().find(|x| !b.contains(**x)) {
            Some(x) => bad(format!("entry {x} is outside {b}")),
            None if xs.is_empty() => bad("needs at least one entry".into()),
            None => Ok(Value::List(xs)),
        },
        (Kind::Choice(options), Value::Text(s)) => {
            if options.contains(&s.as_str()) {
                Ok(Value::Text(s))
            } else {
                bad(format!("= `{s}` must be one of {options:?}"))
            }
        }
        (kind, v) => bad(format!("has the wrong type ({v:?} for {kind:?})")),
    }
}

/// Merges defaults, config-file entries and command-line overrides, in that
/// order of precedence.
pub fn resolve(
    experiment: Experiment,
    file: Option<(&Path, &[Entry])>,
    overrides: &[(String, Value)],
    output_path: Option<PathBuf>,
    format: Option<Format>,
) -> Result<RunConfig, CliError> {
    let specs = experiment.keys();
    let known = || specs.iter().map(|s| s.name).collect::<Vec<_>>().join(", ");
    let find = |key: &str| specs.iter().find(|s| s.name == key);

    let mut parameters = BTreeMap::new();
    for spec in &specs {
        if let Some(v) = &spec.default {
            parameters.insert(spec.name.to_string(), v.clone());
        }
    }
    if let Some((path, entries)) = file {
        for e in entries {
            let origin = format!("{}:{}", path.display(), e.line);
            let Some(spec) = find(&e.key) else {
                return Err(CliError::config(format!(
                    "{origin}: unknown key `{}` for `{experiment}` (known keys: {})",
                    e.key,
                    known()
                )));
            };
            parameters.insert(e.key.clone(), check_value(spec, e.value.clone(), &origin)?);
        }
    }
    for (key, value) in overrides {
        let Some(spec) = find(key) else {
            return Err(CliError::config(format!(
                "command line: unknown key `{key}` for `{experiment}` (known keys: {})",
                known()
            )));
        };
        parameters.insert(
            key.clone(),
            check_value(spec, value.clone(), "command line")?,
        );
    }
    Ok(RunConfig {
        experiment,
        parameters,
        output_path,
        format: format.unwrap_or(experiment.default_format()),
    })
}

/// Reads and resolves a config file for `experiment`.
pub fn load_config(
    path: &Path,
    experiment: Experiment,
    overrides: &[(String, Value)],
) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let entries = parse_document(&text)?;
    resolve(experiment, Some((path, &entries)), overrides, None, None)
}
