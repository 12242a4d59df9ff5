//! Scenario files: strict JSON with every violation reported at once.
//!
//! The document is walked as an untyped [`Value`] so that unknown keys,
//! wrong types and out-of-range numbers can all be collected before any
//! typed configuration is built.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use mpsolve_core::{
    Averaging, Complex64, Grid, HamiltonianSpec, PotentialSpec, RefreshPolicy, ScaleProfile,
    TabulatedPotential, Truncation,
};

use crate::CliError;

pub const DEFAULT_TRUNCATION: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleConfig {
    pub t0: f64,
    pub t1: f64,
    pub slices: usize,
    pub averaging: Averaging,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// Eigenstate `n` of the discretized `H(t0)`.
    Eigenstate(usize),
    /// Amplitudes read from a file, normalized on load.
    Amplitudes { path: PathBuf, values: Vec<Complex64> },
}

/// Which files `run` writes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Emit {
    pub energy: bool,
    pub coefficients: bool,
    pub summary: bool,
    pub state: bool,
}

impl Default for Emit {
    fn default() -> Self {
        Emit {
            energy: true,
            coefficients: true,
            summary: true,
            state: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub directory: Option<PathBuf>,
    pub emit: Emit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiracConfig {
    pub basis_size: usize,
    pub steps: usize,
    pub quadrature_steps: usize,
    /// Target states; empty means every retained state except the initial one.
    pub targets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub grid: Grid,
    pub hamiltonian: HamiltonianSpec,
    pub schedule: ScheduleConfig,
    pub truncation: Truncation,
    pub refresh: RefreshPolicy,
    pub initial: InitialState,
    /// Potential of an optional reference run sharing everything else.
    pub reference: Option<HamiltonianSpec>,
    pub outputs: OutputConfig,
    pub dirac: Option<DiracConfig>,
    /// SHA-256 of the scenario text.
    pub hash: String,
}

pub fn parse_scenario(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    parse_scenario_str(&text, base, &fallback)
}

/// Parses scenario text; relative file references resolve against `base`.
pub fn parse_scenario_str(
    text: &str,
    base: &Path,
    default_name: &str,
) -> Result<ScenarioConfig, CliError> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Validation(vec![format!("invalid JSON: {e}")]))?;
    let mut w = Walker {
        errors: Vec::new(),
        base: base.to_path_buf(),
    };
    let config = w.scenario(&doc, default_name, text);
    match config {
        Some(c) if w.errors.is_empty() => Ok(c),
        _ => {
            if w.errors.is_empty() {
                w.errors.push("invalid scenario".into());
            }
            Err(CliError::Validation(w.errors))
        }
    }
}

struct Walker {
    errors: Vec<String>,
    base: PathBuf,
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

impl Walker {
    fn fail(&mut self, path: &str, msg: impl Display) {
        self.errors.push(format!("{path}: {msg}"));
    }

    fn object<'a>(&mut self, v: &'a Value, path: &str, allowed: &[&str]) -> Option<&'a Map<String, Value>> {
        let Some(m) = v.as_object() else {
            self.fail(path, "expected an object");
            return None;
        };
        for key in m.keys() {
            if !allowed.contains(&key.as_str()) {
                self.fail(&join(path, key), "unknown key");
            }
        }
        Some(m)
    }

    fn number(&mut self, m: &Map<String, Value>, path: &str, key: &str, default: Option<f64>) -> Option<f64> {
        let p = join(path, key);
        match m.get(key) {
            None => {
                if default.is_none() {
                    self.fail(&p, "missing required field");
                }
                default
            }
            Some(v) => match v.as_f64() {
                Some(x) if x.is_finite() => Some(x),
                _ => {
                    self.fail(&p, "expected a finite number");
                    None
                }
            },
        }
    }

    fn positive(&mut self, m: &Map<String, Value>, path: &str, key: &str, default: Option<f64>) -> Option<f64> {
        let v = self.number(m, path, key, default)?;
        if v > 0.0 {
            Some(v)
        } else {
            self.fail(&join(path, key), format!("must be > 0 (got {v})"));
            None
        }
    }

    fn count(&mut self, m: &Map<String, Value>, path: &str, key: &str, default: Option<usize>, min: usize) -> Option<usize> {
        let p = join(path, key);
        let v = match m.get(key) {
            None => {
                if default.is_none() {
                    self.fail(&p, "missing required field");
                }
                return default;
            }
            Some(v) => v,
        };
        match v.as_u64() {
            Some(n) if n as usize >= min => Some(n as usize),
            Some(n) => {
                self.fail(&p, format!("must be at least {min} (got {n})"));
                None
            }
            None => {
                self.fail(&p, "expected a non-negative integer");
                None
            }
        }
    }

    fn string<'a>(&mut self, m: &'a Map<String, Value>, path: &str, key: &str) -> Option<&'a str> {
        match m.get(key) {
            None => None,
            Some(Value::String(s)) => Some(s),
            Some(_) => {
                self.fail(&join(path, key), "expected a string");
                None
            }
        }
    }

    fn numbers(&mut self, v: &Value, path: &str) -> Option<Vec<f64>> {
        let Some(items) = v.as_array() else {
            self.fail(path, "expected an array of numbers");
            return None;
        };
        let out: Option<Vec<f64>> = items.iter().map(|x| x.as_f64().filter(|x| x.is_finite())).collect();
        if out.is_none() {
            self.fail(path, "expected an array of finite numbers");
        }
        out
    }

    fn resolve(&self, file: &str) -> PathBuf {
        let p = Path::new(file);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    fn scenario(&mut self, doc: &Value, default_name: &str, text: &str) -> Option<ScenarioConfig> {
        let root = self.object(
            doc,
            "",
            &[
                "name", "description", "grid", "units", "potential", "schedule", "basis",
                "initial_state", "reference", "outputs", "dirac",
            ],
        )?;
        let name = self
            .string(root, "", "name")
            .unwrap_or(default_name)
            .to_string();
        self.string(root, "", "description");

        let grid = match root.get("grid") {
            None => Some(Grid::standard()),
            Some(v) => self.grid(v),
        };
        let (mass, hbar) = match root.get("units") {
            None => (Some(1.0), Some(1.0)),
            Some(v) => match self.object(v, "units", &["hbar", "mass"]) {
                Some(m) => (
                    self.positive(m, "units", "mass", Some(1.0)),
                    self.positive(m, "units", "hbar", Some(1.0)),
                ),
                None => (None, None),
            },
        };
        let potential = match root.get("potential") {
            None => {
                self.fail("potential", "missing required field");
                None
            }
            Some(v) => self.potential(v, "potential", grid.as_ref()),
        };
        let schedule = match root.get("schedule") {
            None => {
                self.fail("schedule", "missing required field");
                None
            }
            Some(v) => self.schedule(v),
        };
        let (truncation, refresh) = match root.get("basis") {
            None => (Some(Truncation::States(DEFAULT_TRUNCATION)), Some(RefreshPolicy::Cached)),
            Some(v) => self.basis(v, grid.as_ref()),
        };
        let initial = match root.get("initial_state") {
            None => Some(InitialState::Eigenstate(0)),
            Some(v) => self.initial(v, grid.as_ref()),
        };
        let reference = match root.get("reference") {
            None => None,
            Some(v) => match self.object(v, "reference", &["potential"]) {
                Some(m) => match m.get("potential") {
                    Some(p) => self.potential(p, "reference.potential", grid.as_ref()),
                    None => {
                        self.fail("reference.potential", "missing required field");
                        None
                    }
                },
                None => None,
            },
        };
        let outputs = match root.get("outputs") {
            None => Some(OutputConfig {
                directory: None,
                emit: Emit::default(),
            }),
            Some(v) => self.outputs(v),
        };
        let dirac = match root.get("dirac") {
            None => Some(None),
            Some(v) => self.dirac(v, grid.as_ref()).map(Some),
        };

        let (grid, mass, hbar, potential, schedule) = (grid?, mass?, hbar?, potential?, schedule?);
        let hamiltonian = match HamiltonianSpec::new(mass, hbar, potential) {
            Ok(h) => h,
            Err(e) => {
                self.fail("potential", e);
                return None;
            }
        };
        let reference = match reference {
            Some(p) => match hamiltonian.with_potential(p) {
                Ok(h) => Some(h),
                Err(e) => {
                    self.fail("reference.potential", e);
                    None
                }
            },
            None => None,
        };
        if let (Some(InitialState::Eigenstate(n)), Some(Some(d))) = (&initial, &dirac) {
            if *n >= d.basis_size {
                self.fail(
                    "dirac.basis_size",
                    format!("must exceed the initial eigenstate index {n}"),
                );
            }
            for &t in &d.targets {
                if t == *n {
                    self.fail("dirac.targets", format!("target {t} is the initial state"));
                } else if t >= d.basis_size {
                    self.fail("dirac.targets", format!("target {t} outside the basis"));
                }
            }
        }
        Some(ScenarioConfig {
            name,
            grid,
            hamiltonian,
            schedule,
            truncation: truncation?,
            refresh: refresh?,
            initial: initial?,
            reference,
            outputs: outputs?,
            dirac: dirac?,
            hash: hex::encode(Sha256::digest(text.as_bytes())),
        })
    }

    fn grid(&mut self, v: &Value) -> Option<Grid> {
        let m = self.object(v, "grid", &["x_min", "x_max", "points"])?;
        let d = Grid::standard();
        let x_min = self.number(m, "grid", "x_min", Some(d.x_min()));
        let x_max = self.number(m, "grid", "x_max", Some(d.x_max()));
        let points = self.count(m, "grid", "points", Some(d.points()), 3);
        let (x_min, x_max, points) = (x_min?, x_max?, points?);
        if x_min >= x_max {
            self.fail("grid.x_max", format!("must exceed x_min (got {x_min} >= {x_max})"));
            return None;
        }
        match Grid::new(x_min, x_max, points) {
            Ok(g) => Some(g),
            Err(e) => {
                self.fail("grid", e);
                None
            }
        }
    }

    fn potential(&mut self, v: &Value, path: &str, grid: Option<&Grid>) -> Option<PotentialSpec> {
        let kind = v.get("kind").and_then(Value::as_str).unwrap_or_default();
        match kind {
            "harmonic" => {
                let m = self.object(v, path, &["kind", "k"])?;
                Some(PotentialSpec::Harmonic {
                    k: self.positive(m, path, "k", Some(1.0))?,
                })
            }
            "scaled_harmonic" => {
                let m = self.object(v, path, &["kind", "k", "profile"])?;
                let k = self.positive(m, path, "k", Some(1.0));
                let profile = match m.get("profile") {
                    None => {
                        self.fail(&join(path, "profile"), "missing required field");
                        None
                    }
                    Some(p) => self.profile(p, &join(path, "profile")),
                };
                Some(PotentialSpec::ScaledHarmonic { k: k?, profile: profile? })
            }
            "tabulated" => {
                let m = self.object(v, path, &["kind", "file", "times", "values"])?;
                self.tabulated(m, path, grid)
            }
            _ => {
                self.fail(
                    &join(path, "kind"),
                    "expected one of harmonic, scaled_harmonic, tabulated",
                );
                None
            }
        }
    }

    fn profile(&mut self, v: &Value, path: &str) -> Option<ScaleProfile> {
        let kind = v.get("kind").and_then(Value::as_str).unwrap_or_default();
        let profile = match kind {
            "constant" => {
                let m = self.object(v, path, &["kind", "value"])?;
                ScaleProfile::Constant {
                    value: self.number(m, path, "value", None)?,
                }
            }
            "step" => {
                let m = self.object(v, path, &["kind", "eta", "t_on"])?;
                let eta = self.positive(m, path, "eta", None);
                let t_on = self.number(m, path, "t_on", Some(0.0));
                ScaleProfile::Step { eta: eta?, t_on: t_on? }
            }
            "pulse" => {
                let m = self.object(v, path, &["kind", "eta", "t_on", "t_off"])?;
                let eta = self.positive(m, path, "eta", None);
                let t_on = self.number(m, path, "t_on", None);
                let t_off = self.number(m, path, "t_off", None);
                let (t_on, t_off) = (t_on?, t_off?);
                if t_off <= t_on {
                    self.fail(&join(path, "t_off"), format!("must exceed t_on (got {t_off} <= {t_on})"));
                    return None;
                }
                ScaleProfile::Pulse { eta: eta?, t_on, t_off }
            }
            "sampled" => {
                let m = self.object(v, path, &["kind", "times", "values"])?;
                let times = match m.get("times") {
                    Some(t) => self.numbers(t, &join(path, "times")),
                    None => {
                        self.fail(&join(path, "times"), "missing required field");
                        None
                    }
                };
                let values = match m.get("values") {
                    Some(t) => self.numbers(t, &join(path, "values")),
                    None => {
                        self.fail(&join(path, "values"), "missing required field");
                        None
                    }
                };
                ScaleProfile::Sampled { times: times?, values: values? }
            }
            _ => {
                self.fail(&join(path, "kind"), "expected one of constant, step, pulse, sampled");
                return None;
            }
        };
        match profile.validate() {
            Ok(()) => Some(profile),
            Err(e) => {
                self.fail(path, e);
                None
            }
        }
    }

    fn tabulated(&mut self, m: &Map<String, Value>, path: &str, grid: Option<&Grid>) -> Option<PotentialSpec> {
        let inline = m.contains_key("times") || m.contains_key("values");
        let (table, table_path): (Map<String, Value>, String) = match (m.get("file"), inline) {
            (Some(_), true) => {
                self.fail(path, "give either file or inline times/values, not both");
                return None;
            }
            (Some(Value::String(f)), false) => {
                let file = self.resolve(f);
                let text = match std::fs::read_to_string(&file) {
                    Ok(t) => t,
                    Err(e) => {
                        self.fail(&join(path, "file"), format!("cannot read {}: {e}", file.display()));
                        return None;
                    }
                };
                let doc: Value = match serde_json::from_str(&text) {
                    Ok(d) => d,
                    Err(e) => {
                        self.fail(&join(path, "file"), format!("invalid JSON in {}: {e}", file.display()));
                        return None;
                    }
                };
                let fp = file.display().to_string();
                (self.object(&doc, &fp, &["times", "values"])?.clone(), fp)
            }
            (Some(_), false) => {
                self.fail(&join(path, "file"), "expected a string");
                return None;
            }
            (None, _) => (m.clone(), path.to_string()),
        };
        let times = match table.get("times") {
            Some(t) => self.numbers(t, &join(&table_path, "times")),
            None => {
                self.fail(&join(&table_path, "times"), "missing required field");
                None
            }
        };
        let rows = match table.get("values").and_then(Value::as_array) {
            Some(rows) => rows
                .iter()
                .enumerate()
                .map(|(i, r)| self.numbers(r, &format!("{}[{i}]", join(&table_path, "values"))))
                .collect::<Option<Vec<_>>>(),
            None => {
                self.fail(&join(&table_path, "values"), "expected an array of rows");
                None
            }
        };
        let grid = *grid?;
        match TabulatedPotential::new(grid, times?, rows?) {
            Ok(t) => Some(PotentialSpec::Tabulated(t)),
            Err(e) => {
                self.fail(&table_path, e);
                None
            }
        }
    }

    fn schedule(&mut self, v: &Value) -> Option<ScheduleConfig> {
        let m = self.object(v, "schedule", &["t0", "t1", "slices", "averaging"])?;
        let t0 = self.number(m, "schedule", "t0", Some(0.0));
        let t1 = self.number(m, "schedule", "t1", None);
        let slices = self.count(m, "schedule", "slices", None, 1);
        let averaging = match self.string(m, "schedule", "averaging") {
            None | Some("integral") => Some(Averaging::Integral),
            Some("midpoint_endpoint_mean") => Some(Averaging::MidpointEndpointMean),
            Some(other) => {
                self.fail(
                    "schedule.averaging",
                    format!("expected integral or midpoint_endpoint_mean (got {other})"),
                );
                None
            }
        };
        let (t0, t1) = (t0?, t1?);
        if t1 <= t0 {
            self.fail("schedule.t1", format!("must exceed t0 (got {t1} <= {t0})"));
            return None;
        }
        Some(ScheduleConfig {
            t0,
            t1,
            slices: slices?,
            averaging: averaging?,
        })
    }

    fn basis(&mut self, v: &Value, grid: Option<&Grid>) -> (Option<Truncation>, Option<RefreshPolicy>) {
        let Some(m) = self.object(v, "basis", &["truncation", "refresh"]) else {
            return (None, None);
        };
        let truncation = match m.get("truncation") {
            None => Some(Truncation::States(DEFAULT_TRUNCATION)),
            Some(Value::String(s)) if s == "full" => Some(Truncation::Full),
            Some(_) => self
                .count(m, "basis", "truncation", None, 1)
                .map(Truncation::States),
        };
        let truncation = match (truncation, grid) {
            (Some(Truncation::States(n)), Some(g)) if n > g.points() => {
                self.fail(
                    "basis.truncation",
                    format!("must not exceed grid.points = {} (got {n})", g.points()),
                );
                None
            }
            (t, _) => t,
        };
        let refresh = match self.string(m, "basis", "refresh") {
            None | Some("cached") => Some(RefreshPolicy::Cached),
            Some("per_slice") => Some(RefreshPolicy::PerSlice),
            Some(other) => {
                self.fail("basis.refresh", format!("expected cached or per_slice (got {other})"));
                None
            }
        };
        (truncation, refresh)
    }

    fn initial(&mut self, v: &Value, grid: Option<&Grid>) -> Option<InitialState> {
        let m = self.object(v, "initial_state", &["eigenstate", "amplitude_file"])?;
        match (m.contains_key("eigenstate"), m.get("amplitude_file")) {
            (true, Some(_)) => {
                self.fail("initial_state", "ambiguous initial state: give eigenstate or amplitude_file, not both");
                None
            }
            (false, None) => {
                self.fail("initial_state", "expected eigenstate or amplitude_file");
                None
            }
            (true, None) => {
                let n = self.count(m, "initial_state", "eigenstate", None, 0)?;
                if let Some(g) = grid {
                    if n >= g.points() {
                        self.fail("initial_state.eigenstate", format!("must be below grid.points = {}", g.points()));
                        return None;
                    }
                }
                Some(InitialState::Eigenstate(n))
            }
            (false, Some(file)) => {
                let Some(file) = file.as_str() else {
                    self.fail("initial_state.amplitude_file", "expected a string");
                    return None;
                };
                let path = self.resolve(file);
                let values = self.amplitude_file(&path, grid?)?;
                Some(InitialState::Amplitudes { path, values })
            }
        }
    }

    /// CSV with header `x,re,im` and one row per grid node.
    fn amplitude_file(&mut self, path: &Path, grid: &Grid) -> Option<Vec<Complex64>> {
        let key = "initial_state.amplitude_file";
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                self.fail(key, format!("cannot read {}: {e}", path.display()));
                return None;
            }
        };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some("x,re,im") {
            self.fail(key, "expected header x,re,im");
            return None;
        }
        let mut values = Vec::with_capacity(grid.points());
        for (i, line) in lines.enumerate() {
            let cols: Option<Vec<f64>> = line.split(',').map(|c| c.trim().parse().ok()).collect();
            match cols.as_deref() {
                Some(&[x, re, im]) if i < grid.points() && (x - grid.x(i)).abs() <= 1e-9 * (1.0 + x.abs()) => {
                    values.push(Complex64::new(re, im));
                }
                _ => {
                    self.fail(key, format!("row {} does not match grid node {i}", i + 2));
                    return None;
                }
            }
        }
        if values.len() != grid.points() {
            self.fail(key, format!("expected {} rows, found {}", grid.points(), values.len()));
            return None;
        }
        Some(values)
    }

    fn outputs(&mut self, v: &Value) -> Option<OutputConfig> {
        let m = self.object(v, "outputs", &["directory", "emit"])?;
        let directory = self.string(m, "outputs", "directory").map(PathBuf::from);
        let emit = match m.get("emit") {
            None => Some(Emit::default()),
            Some(list) => {
                let Some(items) = list.as_array() else {
                    self.fail("outputs.emit", "expected an array of names");
                    return None;
                };
                let mut seen = BTreeSet::new();
                let mut ok = true;
                for item in items {
                    match item.as_str() {
                        Some(s @ ("energy" | "coefficients" | "summary" | "state")) => {
                            seen.insert(s);
                        }
                        _ => {
                            self.fail(
                                "outputs.emit",
                                format!("unknown output {item}; expected energy, coefficients, summary, state"),
                            );
                            ok = false;
                        }
                    }
                }
                ok.then(|| Emit {
                    energy: seen.contains("energy"),
                    coefficients: seen.contains("coefficients"),
                    summary: seen.contains("summary"),
                    state: seen.contains("state"),
                })
            }
        };
        Some(OutputConfig { directory, emit: emit? })
    }

    fn dirac(&mut self, v: &Value, grid: Option<&Grid>) -> Option<DiracConfig> {
        let m = self.object(v, "dirac", &["basis_size", "steps", "quadrature_steps", "targets"])?;
        let basis_size = self.count(m, "dirac", "basis_size", Some(16), 2);
        let steps = self.count(m, "dirac", "steps", Some(1000), 1);
        let quadrature_steps = self.count(m, "dirac", "quadrature_steps", Some(10_000), 1);
        let targets = match m.get("targets") {
            None => Some(Vec::new()),
            Some(Value::Array(items)) => {
                let t: Option<Vec<usize>> = items.iter().map(|i| i.as_u64().map(|n| n as usize)).collect();
                if t.is_none() {
                    self.fail("dirac.targets", "expected an array of state indices");
                }
                t
            }
            Some(_) => {
                self.fail("dirac.targets", "expected an array of state indices");
                None
            }
        };
        let basis_size = basis_size?;
        if let Some(g) = grid {
            if basis_size > g.points() {
                self.fail("dirac.basis_size", format!("must not exceed grid.points = {}", g.points()));
                return None;
            }
        }
        Some(DiracConfig {
            basis_size,
            steps: steps?,
            quadrature_steps: quadrature_steps?,
            targets: targets?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ScenarioConfig, CliError> {
        parse_scenario_str(text, Path::new("."), "test")
    }

    fn violations(text: &str) -> Vec<String> {
        match parse(text) {
            Err(CliError::Validation(v)) => v,
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    const MINIMAL: &str = r#"{
        "potential": {"kind": "harmonic"},
        "schedule": {"t1": 1.0, "slices": 4}
    }"#;

    #[test]
    fn defaults() {
        let c = parse(MINIMAL).unwrap();
        assert_eq!(c.grid, Grid::standard());
        assert_eq!(c.hamiltonian.hbar(), 1.0);
        assert_eq!(c.hamiltonian.mass(), 1.0);
        assert_eq!(c.truncation, Truncation::States(64));
        assert_eq!(c.schedule.averaging, Averaging::Integral);
        assert_eq!(c.initial, InitialState::Eigenstate(0));
        assert_eq!(c.outputs.emit, Emit::default());
        assert_eq!(c.hash.len(), 64);
    }

    #[test]
    fn negative_eta_names_field() {
        let v = violations(
            r#"{"potential": {"kind": "scaled_harmonic", "profile": {"kind": "step", "eta": -1}},
                "schedule": {"t1": 1, "slices": 1}}"#,
        );
        assert_eq!(v, vec!["potential.profile.eta: must be > 0 (got -1)".to_string()]);
    }

    #[test]
    fn ambiguous_initial_state() {
        let v = violations(
            r#"{"potential": {"kind": "harmonic"}, "schedule": {"t1": 1, "slices": 1},
                "initial_state": {"eigenstate": 0, "amplitude_file": "psi.csv"}}"#,
        );
        assert!(v[0].contains("ambiguous initial state"), "{v:?}");
    }

    #[test]
    fn collects_every_violation() {
        let v = violations(
            r#"{"grid": {"points": 2, "x_mni": 0},
                "potential": {"kind": "scaled_harmonic", "profile": {"kind": "pulse", "eta": 0, "t_on": 1, "t_off": 2}},
                "schedule": {"t1": 1, "slices": 0},
                "colour": "red"}"#,
        );
        let joined = v.join("\n");
        for needle in [
            "colour: unknown key",
            "grid.x_mni: unknown key",
            "grid.points: must be at least 3 (got 2)",
            "potential.profile.eta: must be > 0 (got 0)",
            "schedule.slices: must be at least 1 (got 0)",
        ] {
            assert!(joined.contains(needle), "missing {needle:?} in\n{joined}");
        }
    }

    #[test]
    fn missing_amplitude_file() {
        let v = violations(
            r#"{"potential": {"kind": "harmonic"}, "schedule": {"t1": 1, "slices": 1},
                "initial_state": {"amplitude_file": "does-not-exist.csv"}}"#,
        );
        assert!(v[0].starts_with("initial_state.amplitude_file: cannot read"), "{v:?}");
    }

    #[test]
    fn truncation_forms() {
        let full = parse(
            r#"{"potential": {"kind": "harmonic"}, "schedule": {"t1": 1, "slices": 1},
                "basis": {"truncation": "full", "refresh": "per_slice"}}"#,
        )
        .unwrap();
        assert_eq!(full.truncation, Truncation::Full);
        assert_eq!(full.refresh, RefreshPolicy::PerSlice);
        let v = violations(
            r#"{"grid": {"points": 11}, "potential": {"kind": "harmonic"},
                "schedule": {"t1": 1, "slices": 1}, "basis": {"truncation": 12}}"#,
        );
        assert!(v[0].starts_with("basis.truncation"), "{v:?}");
    }

    #[test]
    fn inline_table_must_match_grid() {
        let v = violations(
            r#"{"grid": {"x_min": -1, "x_max": 1, "points": 3},
                "potential": {"kind": "tabulated", "times": [0, 1], "values": [[0, 0], [1, 1]]},
                "schedule": {"t1": 1, "slices": 1}}"#,
        );
        assert_eq!(v.len(), 1, "{v:?}");
        let ok = parse(
            r#"{"grid": {"x_min": -1, "x_max": 1, "points": 3},
                "potential": {"kind": "tabulated", "times": [0, 1], "values": [[0, 0, 0], [1, 1, 1]]},
                "schedule": {"t1": 1, "slices": 1}}"#,
        );
        assert!(ok.is_ok());
    }
}
