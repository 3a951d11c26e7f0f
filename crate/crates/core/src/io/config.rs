//! Sectioned `key = value` run configuration.
//!
//! ```text
//! # comment
//! [grid]
//! n_cells = 256
//! [solver]
//! epsilon = 0.01
//! scheme = imex2
//! ```
//!
//! Every key is optional. Parsing reports all syntax and semantic problems at
//! once, each with a line number or a field path.

use super::export::Format;
use crate::error::{Error, Result};
use crate::experiments::RunSpec;
use crate::grid::Grid;
use crate::init::{InitialData, RoughKind, RoughParams};
use crate::material::{Material, MaterialKind, Table, DEFAULT_RHO_FLOOR};
use crate::solver::{Scheme, SolverConfig, ThetaCoupling};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSection {
    pub a: f64,
    pub b: f64,
    pub n_cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MaterialChoice {
    Identity,
    Log1p,
    RationalSaturating,
    Tabulated { points: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialSection {
    pub kind: MaterialChoice,
    pub rho_floor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSection {
    pub epsilon: f64,
    /// `None`: `cfl_safety · h`.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub scheme: Scheme,
    pub coupling: ThetaCoupling,
    pub cfl_safety: f64,
    pub positivity_tol: f64,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub record_every: usize,
    pub directory: String,
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridSection,
    pub material: MaterialSection,
    pub solver: SolverSection,
    pub initial_data: InitialData,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SolverConfig::default();
        RunConfig {
            grid: GridSection {
                a: 0.0,
                b: 1.0,
                n_cells: 256,
            },
            material: MaterialSection {
                kind: MaterialChoice::Identity,
                rho_floor: DEFAULT_RHO_FLOOR,
            },
            solver: SolverSection {
                epsilon: s.epsilon,
                dt: None,
                t_end: s.t_end,
                scheme: s.scheme,
                coupling: s.coupling,
                cfl_safety: s.cfl_safety,
                positivity_tol: s.positivity_tol,
                newton_tol: s.newton_tol,
                newton_max_iters: s.newton_max_iters,
            },
            initial_data: InitialData::SmoothReference,
            output: OutputSection {
                record_every: 1,
                directory: "out".to_string(),
                formats: vec![Format::Csv],
            },
        }
    }
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.a, self.grid.b, self.grid.n_cells)
    }

    pub fn material(&self) -> Result<Material> {
        let kind = match &self.material.kind {
            MaterialChoice::Identity => MaterialKind::Identity,
            MaterialChoice::Log1p => MaterialKind::Log1p,
            MaterialChoice::RationalSaturating => MaterialKind::RationalSaturating,
            MaterialChoice::Tabulated { points } => MaterialKind::Tabulated(Table::from_points(
                points.iter().map(|p| p.0).collect(),
                points.iter().map(|p| p.1).collect(),
            )?),
        };
        Material::new(kind, self.material.rho_floor)
    }

    pub fn solver_config(&self, grid: &Grid) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            epsilon: s.epsilon,
            dt: s.dt.unwrap_or(s.cfl_safety * grid.h()),
            t_end: s.t_end,
            scheme: s.scheme,
            coupling: s.coupling,
            cfl_safety: s.cfl_safety,
            positivity_tol: s.positivity_tol,
            newton_tol: s.newton_tol,
            newton_max_iters: s.newton_max_iters,
            record_every: self.output.record_every,
        }
    }

    pub fn run_spec(&self) -> Result<RunSpec> {
        let grid = self.grid()?;
        let solver = self.solver_config(&grid);
        Ok(RunSpec::new(
            grid,
            self.material()?,
            solver,
            self.initial_data,
        ))
    }

    /// Semantic problems, as field-path messages.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let grid = match self.grid() {
            Ok(g) => Some(g),
            Err(e) => {
                out.push(format!("grid: {e}"));
                None
            }
        };
        if let Err(e) = self.material() {
            out.push(format!("material: {e}"));
        }
        let probe = grid.unwrap_or_else(|| Grid::unit(1).expect("unit grid"));
        out.extend(self.solver_config(&probe).problems(grid.as_ref()));
        if let Some(g) = &grid {
            if let Err(e) = self.initial_data.build(g) {
                out.push(format!("initial_data: {e}"));
            }
        }
        if self.output.formats.is_empty() {
            out.push("output.formats must name at least one format".into());
        }
        out
    }
}

/// Parse and validate a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut errors = Vec::new();
    let mut entries = Entries::read(text, &mut errors);
    let cfg = entries.build(&mut errors);
    entries.report_unused(&mut errors);
    if errors.is_empty() {
        errors.extend(cfg.problems());
    }
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(errors))
    }
}

const SECTIONS: [&str; 5] = ["grid", "material", "solver", "initial_data", "output"];

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

struct Entries {
    map: BTreeMap<(String, String), Entry>,
}

impl Entries {
    fn read(text: &str, errors: &mut Vec<String>) -> Self {
        let mut map: BTreeMap<(String, String), Entry> = BTreeMap::new();
        let mut section: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                match rest.strip_suffix(']') {
                    Some(name) if SECTIONS.contains(&name.trim()) => {
                        section = Some(name.trim().to_string())
                    }
                    Some(name) => {
                        errors.push(format!("line {line}: unknown section [{}]", name.trim()));
                        section = None;
                    }
                    None => errors.push(format!(
                        "line {line}: unterminated section header `{content}`"
                    )),
                }
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                errors.push(format!(
                    "line {line}: expected `key = value`, got `{content}`"
                ));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                errors.push(format!("line {line}: missing key before `=`"));
                continue;
            }
            let Some(sec) = &section else {
                errors.push(format!(
                    "line {line}: key `{key}` outside of a known section"
                ));
                continue;
            };
            let k = (sec.clone(), key.to_string());
            if let Some(prev) = map.get(&k) {
                errors.push(format!(
                    "line {line}: duplicate key `{key}` in [{sec}] (first set on line {})",
                    prev.line
                ));
                continue;
            }
            map.insert(
                k,
                Entry {
                    value: value.to_string(),
                    line,
                    used: false,
                },
            );
        }
        Entries { map }
    }

    fn raw(&mut self, sec: &str, key: &str) -> Option<(String, usize)> {
        let e = self.map.get_mut(&(sec.to_string(), key.to_string()))?;
        e.used = true;
        Some((e.value.clone(), e.line))
    }

    fn get<T: FromStr>(
        &mut self,
        sec: &str,
        key: &str,
        what: &str,
        errors: &mut Vec<String>,
    ) -> Option<T> {
        let (v, line) = self.raw(sec, key)?;
        match v.parse::<T>() {
            Ok(x) => Some(x),
            Err(_) => {
                errors.push(format!(
                    "line {line}: {sec}.{key}: expected {what}, got `{v}`"
                ));
                None
            }
        }
    }

    fn f64(&mut self, sec: &str, key: &str, default: f64, errors: &mut Vec<String>) -> f64 {
        self.get(sec, key, "a number", errors).unwrap_or(default)
    }

    fn usize(&mut self, sec: &str, key: &str, default: usize, errors: &mut Vec<String>) -> usize {
        self.get(sec, key, "a nonnegative integer", errors)
            .unwrap_or(default)
    }

    fn u64(&mut self, sec: &str, key: &str, default: u64, errors: &mut Vec<String>) -> u64 {
        self.get(sec, key, "a nonnegative integer", errors)
            .unwrap_or(default)
    }

    fn build(&mut self, errors: &mut Vec<String>) -> RunConfig {
        let d = RunConfig::default();
        let grid = GridSection {
            a: self.f64("grid", "a", d.grid.a, errors),
            b: self.f64("grid", "b", d.grid.b, errors),
            n_cells: self.usize("grid", "n_cells", d.grid.n_cells, errors),
        };

        let kind = match self.raw("material", "kind") {
            None => MaterialChoice::Identity,
            Some((v, line)) => match v.as_str() {
                "identity" => MaterialChoice::Identity,
                "log1p" => MaterialChoice::Log1p,
                "rational_saturating" => MaterialChoice::RationalSaturating,
                "tabulated" => MaterialChoice::Tabulated {
                    points: self.points(errors).unwrap_or_default(),
                },
                other => {
                    errors.push(format!(
                        "line {line}: material.kind: expected identity, log1p, rational_saturating or tabulated, got `{other}`"
                    ));
                    MaterialChoice::Identity
                }
            },
        };
        let material = MaterialSection {
            kind,
            rho_floor: self.f64("material", "rho_floor", d.material.rho_floor, errors),
        };

        let ds = &d.solver;
        let scheme = match self.raw("solver", "scheme") {
            None => ds.scheme,
            Some((v, line)) => Scheme::from_name(&v).unwrap_or_else(|| {
                errors.push(format!(
                    "line {line}: solver.scheme: expected imex1 or imex2, got `{v}`"
                ));
                ds.scheme
            }),
        };
        let coupling = match self.raw("solver", "coupling") {
            None => ds.coupling,
            Some((v, line)) => ThetaCoupling::from_name(&v).unwrap_or_else(|| {
                errors.push(format!(
                    "line {line}: solver.coupling: expected trapezoidal or lagged, got `{v}`"
                ));
                ds.coupling
            }),
        };
        let solver = SolverSection {
            epsilon: self.f64("solver", "epsilon", ds.epsilon, errors),
            dt: self.get("solver", "dt", "a number", errors),
            t_end: self.f64("solver", "t_end", ds.t_end, errors),
            scheme,
            coupling,
            cfl_safety: self.f64("solver", "cfl_safety", ds.cfl_safety, errors),
            positivity_tol: self.f64("solver", "positivity_tol", ds.positivity_tol, errors),
            newton_tol: self.f64("solver", "newton_tol", ds.newton_tol, errors),
            newton_max_iters: self.usize("solver", "newton_max_iters", ds.newton_max_iters, errors),
        };

        let initial_data = self.initial_data(errors);

        let formats = match self.raw("output", "formats") {
            None => d.output.formats.clone(),
            Some((v, line)) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .filter_map(|s| {
                    Format::from_name(s).or_else(|| {
                        errors.push(format!(
                            "line {line}: output.formats: unknown format `{s}` (csv, jsonl)"
                        ));
                        None
                    })
                })
                .collect(),
        };
        let output = OutputSection {
            record_every: self.usize("output", "record_every", d.output.record_every, errors),
            directory: self
                .raw("output", "directory")
                .map_or(d.output.directory.clone(), |(v, _)| v),
            formats,
        };
        RunConfig {
            grid,
            material,
            solver,
            initial_data,
            output,
        }
    }

    fn points(&mut self, errors: &mut Vec<String>) -> Option<Vec<(f64, f64)>> {
        let (v, line) = self.raw("material", "points")?;
        let mut out = Vec::new();
        for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let parsed = item
                .split_once(':')
                .and_then(|(x, f)| Some((x.trim().parse().ok()?, f.trim().parse().ok()?)));
            match parsed {
                Some(p) => out.push(p),
                None => {
                    errors.push(format!(
                        "line {line}: material.points: expected `xi:f`, got `{item}`"
                    ));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn initial_data(&mut self, errors: &mut Vec<String>) -> InitialData {
        const S: &str = "initial_data";
        let Some((kind, line)) = self.raw(S, "kind") else {
            return InitialData::SmoothReference;
        };
        let rough = |me: &mut Self, kind: RoughKind, errors: &mut Vec<String>| -> InitialData {
            InitialData::Rough(RoughParams {
                kind,
                theta_base: me.f64(S, "theta_base", 0.0, errors),
                velocity_plateau: me.f64(S, "velocity_plateau", 0.0, errors),
            })
        };
        match kind.as_str() {
            "smooth" => InitialData::SmoothReference,
            "zero" => InitialData::Zero,
            "equilibrium" => InitialData::Equilibrium {
                theta: self.f64(S, "theta", 1.0, errors),
            },
            "random_fourier" => InitialData::RandomFourier {
                seed: self.u64(S, "seed", 0, errors),
                modes: self.usize(S, "modes", 6, errors),
                theta_min: self.f64(S, "theta_min", 0.1, errors),
            },
            "step_strain" => {
                let k = RoughKind::StepStrain {
                    jump_at: self.f64(S, "jump_at", 0.5, errors),
                    left_slope: self.f64(S, "left_slope", 1.0, errors),
                };
                rough(self, k, errors)
            }
            "sawtooth_strain" => {
                let k = RoughKind::SawtoothStrain {
                    teeth: self.usize(S, "teeth", 4, errors),
                    amplitude: self.f64(S, "amplitude", 0.1, errors),
                };
                rough(self, k, errors)
            }
            "random_theta" => {
                let k = RoughKind::RandomL2Theta {
                    amplitude: self.f64(S, "amplitude", 1.0, errors),
                    seed: self.u64(S, "seed", 0, errors),
                };
                rough(self, k, errors)
            }
            other => {
                errors.push(format!(
                    "line {line}: initial_data.kind: unknown kind `{other}` (smooth, zero, equilibrium, random_fourier, step_strain, sawtooth_strain, random_theta)"
                ));
                InitialData::SmoothReference
            }
        }
    }

    fn report_unused(&self, errors: &mut Vec<String>) {
        let mut unused: Vec<_> = self.map.iter().filter(|(_, e)| !e.used).collect();
        unused.sort_by_key(|(_, e)| e.line);
        for ((sec, key), e) in unused {
            errors.push(format!("line {}: unknown key `{key}` in [{sec}]", e.line));
        }
    }
}

/// Canonical text form; `parse_config(&serialize_config(c)) == c`.
pub fn serialize_config(c: &RunConfig) -> String {
    let mut s = String::new();
    let kv = |s: &mut String, k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    s.push_str("[grid]\n");
    kv(&mut s, "a", num(c.grid.a));
    kv(&mut s, "b", num(c.grid.b));
    kv(&mut s, "n_cells", c.grid.n_cells.to_string());

    s.push_str("\n[material]\n");
    match &c.material.kind {
        MaterialChoice::Identity => kv(&mut s, "kind", "identity".into()),
        MaterialChoice::Log1p => kv(&mut s, "kind", "log1p".into()),
        MaterialChoice::RationalSaturating => kv(&mut s, "kind", "rational_saturating".into()),
        MaterialChoice::Tabulated { points } => {
            kv(&mut s, "kind", "tabulated".into());
            let p: Vec<String> = points
                .iter()
                .map(|(x, f)| format!("{}:{}", num(*x), num(*f)))
                .collect();
            kv(&mut s, "points", p.join(", "));
        }
    }
    kv(&mut s, "rho_floor", num(c.material.rho_floor));

    let o = &c.solver;
    s.push_str("\n[solver]\n");
    kv(&mut s, "epsilon", num(o.epsilon));
    if let Some(dt) = o.dt {
        kv(&mut s, "dt", num(dt));
    }
    kv(&mut s, "t_end", num(o.t_end));
    kv(&mut s, "scheme", o.scheme.name().into());
    kv(&mut s, "coupling", o.coupling.name().into());
    kv(&mut s, "cfl_safety", num(o.cfl_safety));
    kv(&mut s, "positivity_tol", num(o.positivity_tol));
    kv(&mut s, "newton_tol", num(o.newton_tol));
    kv(&mut s, "newton_max_iters", o.newton_max_iters.to_string());

    s.push_str("\n[initial_data]\n");
    let d = c.initial_data;
    match d {
        InitialData::SmoothReference => kv(&mut s, "kind", "smooth".into()),
        InitialData::Zero => kv(&mut s, "kind", "zero".into()),
        InitialData::Equilibrium { theta } => {
            kv(&mut s, "kind", "equilibrium".into());
            kv(&mut s, "theta", num(theta));
        }
        InitialData::RandomFourier {
            seed,
            modes,
            theta_min,
        } => {
            kv(&mut s, "kind", "random_fourier".into());
            kv(&mut s, "seed", seed.to_string());
            kv(&mut s, "modes", modes.to_string());
            kv(&mut s, "theta_min", num(theta_min));
        }
        InitialData::Rough(p) => {
            kv(&mut s, "kind", d.name().into());
            match p.kind {
                RoughKind::StepStrain {
                    jump_at,
                    left_slope,
                } => {
                    kv(&mut s, "jump_at", num(jump_at));
                    kv(&mut s, "left_slope", num(left_slope));
                }
                RoughKind::SawtoothStrain { teeth, amplitude } => {
                    kv(&mut s, "teeth", teeth.to_string());
                    kv(&mut s, "amplitude", num(amplitude));
                }
                RoughKind::RandomL2Theta { amplitude, seed } => {
                    kv(&mut s, "amplitude", num(amplitude));
                    kv(&mut s, "seed", seed.to_string());
                }
            }
            kv(&mut s, "theta_base", num(p.theta_base));
            kv(&mut s, "velocity_plateau", num(p.velocity_plateau));
        }
    }

    s.push_str("\n[output]\n");
    kv(&mut s, "record_every", c.output.record_every.to_string());
    kv(&mut s, "directory", c.output.directory.clone());
    let f: Vec<&str> = c.output.formats.iter().map(|f| f.name()).collect();
    kv(&mut s, "formats", f.join(", "));
    s
}

/// Shortest representation that parses back to the same value.
fn num(x: f64) -> String {
    format!("{x:?}")
}
