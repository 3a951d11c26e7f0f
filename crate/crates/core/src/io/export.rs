//! CSV and JSON Lines output. Floats are written as `{:.16e}`, which parses back
//! to the same `f64`.

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::experiments::{Report, Table};
use crate::grid::Grid;
use crate::solver::{State, Trajectory};
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "jsonl" => Some(Format::Jsonl),
            _ => None,
        }
    }
}

pub const DIAGNOSTICS_HEADER: &str = "t,E,int_Theta,min_Theta,max_Theta,y,int_Theta_x2,eps_diss,int_Theta_xx2,Theta_x2,Theta_xx2,eps_rate,mass_flux";
pub const SNAPSHOT_HEADER: &str = "t,x,v,u,theta";

fn e(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|err| Error::io(dir, err))?;
    }
    fs::write(path, text).map_err(|err| Error::io(path, err))
}

/// Header plus one row per record; `y` is left empty when it is undefined.
pub fn diagnostics_csv(records: &[DiagnosticsRecord]) -> String {
    let mut s = String::from(DIAGNOSTICS_HEADER);
    s.push('\n');
    for r in records {
        let y = r.hfunc.map(e).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{y},{},{},{},{},{},{},{}",
            e(r.t),
            e(r.energy),
            e(r.theta_mass),
            e(r.theta_min),
            e(r.theta_max),
            e(r.dissipation_accum),
            e(r.eps_dissipation_accum),
            e(r.theta_xx_accum),
            e(r.theta_x_sq),
            e(r.theta_xx_sq),
            e(r.eps_rate),
            e(r.mass_flux),
        );
    }
    s
}

pub fn write_diagnostics_csv(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    write_file(path, &diagnostics_csv(records))
}

pub fn snapshot_csv(state: &State, grid: &Grid) -> String {
    let mut s = String::from(SNAPSHOT_HEADER);
    s.push('\n');
    let (v, u, th) = (state.v.values(), state.u.values(), state.theta.values());
    for i in 0..grid.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            e(state.t),
            e(grid.x(i)),
            e(v[i]),
            e(u[i]),
            e(th[i])
        );
    }
    s
}

/// Columns of one snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
}

pub fn parse_snapshot_csv(text: &str) -> Result<Snapshot> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(SNAPSHOT_HEADER) {
        return Err(Error::Structural(format!(
            "snapshot must start with `{SNAPSHOT_HEADER}`"
        )));
    }
    let mut snap = Snapshot {
        t: f64::NAN,
        x: Vec::new(),
        v: Vec::new(),
        u: Vec::new(),
        theta: Vec::new(),
    };
    for (k, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| {
                Error::Structural(format!("snapshot line {}: bad number in `{line}`", k + 2))
            })?;
        if row.len() != 5 {
            return Err(Error::Structural(format!(
                "snapshot line {}: expected 5 columns, got {}",
                k + 2,
                row.len()
            )));
        }
        snap.t = row[0];
        snap.x.push(row[1]);
        snap.v.push(row[2]);
        snap.u.push(row[3]);
        snap.theta.push(row[4]);
    }
    Ok(snap)
}

pub fn read_snapshot_csv(path: &Path) -> Result<Snapshot> {
    let text = fs::read_to_string(path).map_err(|err| Error::io(path, err))?;
    parse_snapshot_csv(&text)
}

/// `snapshot_00000.csv`, `snapshot_00001.csv`, ... in `dir`, one per recorded state.
pub fn write_snapshots_csv(dir: &Path, traj: &Trajectory) -> Result<Vec<PathBuf>> {
    traj.states
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let p = dir.join(format!("snapshot_{k:05}.csv"));
            write_file(&p, &snapshot_csv(s, &traj.grid)).map(|_| p)
        })
        .collect()
}

#[derive(Serialize)]
struct SnapshotLine<'a> {
    t: f64,
    x: Vec<f64>,
    v: &'a [f64],
    u: &'a [f64],
    theta: &'a [f64],
}

/// One JSON object per recorded state.
pub fn snapshots_jsonl(traj: &Trajectory) -> String {
    let x = traj.grid.nodes();
    let mut s = String::new();
    for st in &traj.states {
        let line = SnapshotLine {
            t: st.t,
            x: x.clone(),
            v: st.v.values(),
            u: st.u.values(),
            theta: st.theta.values(),
        };
        s.push_str(&serde_json::to_string(&line).expect("finite floats serialize"));
        s.push('\n');
    }
    s
}

pub fn table_csv(table: &Table) -> String {
    let mut s = table.columns.join(",");
    s.push('\n');
    for row in &table.rows {
        s.push_str(&row.iter().map(|x| e(*x)).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|err| Error::Structural(format!("cannot serialize {}: {err}", path.display())))?;
    text.push('\n');
    write_file(path, &text)
}

/// `diagnostics.csv` plus snapshots in the requested formats.
pub fn write_trajectory(dir: &Path, traj: &Trajectory, formats: &[Format]) -> Result<Vec<PathBuf>> {
    let mut out = vec![dir.join("diagnostics.csv")];
    write_diagnostics_csv(&out[0], &traj.records)?;
    for f in formats {
        match f {
            Format::Csv => out.extend(write_snapshots_csv(&dir.join("snapshots"), traj)?),
            Format::Jsonl => {
                let p = dir.join("snapshots.jsonl");
                write_file(&p, &snapshots_jsonl(traj))?;
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// `report.json`, `summary.txt` and one `<table>.csv` per table.
pub fn write_report<R: Report + Serialize>(dir: &Path, report: &R) -> Result<Vec<PathBuf>> {
    let mut out = vec![dir.join("report.json"), dir.join("summary.txt")];
    write_json(&out[0], report)?;
    let mut summary = report.summary();
    let _ = writeln!(
        summary,
        "{}: {}",
        report.name(),
        if report.passed() { "PASS" } else { "FAIL" }
    );
    write_file(&out[1], &summary)?;
    for t in report.tables() {
        let p = dir.join(format!("{}.csv", t.name));
        write_file(&p, &table_csv(&t))?;
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::init::InitialData;
    use crate::material::Material;
    use crate::solver::SolverConfig;

    fn traj() -> Trajectory {
        let g = Grid::unit(8).unwrap();
        let s0 = InitialData::SmoothReference.build(&g).unwrap();
        let cfg = SolverConfig::for_grid(&g, 0.0, 0.25).with_record_every(2);
        crate::solver::run(&s0, &Material::identity(), &cfg, &g).unwrap()
    }

    #[test]
    fn diagnostics_header_only_when_empty() {
        assert_eq!(diagnostics_csv(&[]), format!("{DIAGNOSTICS_HEADER}\n"));
    }

    #[test]
    fn diagnostics_rows_round_trip() {
        let t = traj();
        let text = diagnostics_csv(&t.records);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), t.records.len() + 1);
        for (line, r) in lines[1..].iter().zip(&t.records) {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 13);
            assert_eq!(cols[1].parse::<f64>().unwrap(), r.energy);
            assert_eq!(cols[5].parse::<f64>().unwrap(), r.hfunc.unwrap());
        }
    }

    #[test]
    fn undefined_y_is_an_empty_field() {
        let mut r = traj().records[0];
        r.hfunc = None;
        let text = diagnostics_csv(&[r]);
        assert_eq!(text.lines().nth(1).unwrap().split(',').nth(5), Some(""));
    }

    #[test]
    fn snapshot_round_trip_is_exact() {
        let t = traj();
        let s = t.final_state();
        let back = parse_snapshot_csv(&snapshot_csv(s, &t.grid)).unwrap();
        assert_eq!(back.t, s.t);
        assert_eq!(back.x, t.grid.nodes());
        assert_eq!(
            (&back.v[..], &back.u[..], &back.theta[..]),
            (s.v.values(), s.u.values(), s.theta.values())
        );
    }

    #[test]
    fn jsonl_has_one_object_per_state() {
        let t = traj();
        let text = snapshots_jsonl(&t);
        assert_eq!(text.lines().count(), t.states.len());
        let v: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
        assert_eq!(v["theta"].as_array().unwrap().len(), 9);
    }

    #[test]
    fn unwritable_path_surfaces_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = write_diagnostics_csv(&blocker.join("sub").join("d.csv"), &[]).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("file"));
    }
}
