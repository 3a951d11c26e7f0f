//! Gnuplot scripts over the exported CSV files.

use crate::error::{Error, Result};
use std::fs;
use std::path::{Path, PathBuf};

/// Energy, temperature range and dissipation against time, from `diagnostics.csv`.
pub fn diagnostics_script(csv: &str, png: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 1200,800\n\
         set output '{png}'\n\
         set key autotitle columnhead\n\
         set multiplot layout 2,2\n\
         set xlabel 't'\n\
         plot '{csv}' using 1:2 with lines title 'E'\n\
         plot '{csv}' using 1:4 with lines title 'min Theta', '' using 1:5 with lines title 'max Theta'\n\
         plot '{csv}' using 1:7 with lines title 'int |Theta_x|^2', '' using 1:8 with lines title 'eps dissipation'\n\
         plot '{csv}' using 1:6 with lines title 'y'\n\
         unset multiplot\n"
    )
}

/// The fields `v`, `u`, `Θ` of one snapshot against `x`.
pub fn snapshot_script(csv: &str, png: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 1200,400\n\
         set output '{png}'\n\
         set multiplot layout 1,3\n\
         set xlabel 'x'\n\
         plot '{csv}' using 2:3 with lines title 'v'\n\
         plot '{csv}' using 2:4 with lines title 'u'\n\
         plot '{csv}' using 2:5 with lines title 'theta'\n\
         unset multiplot\n"
    )
}

/// Every column of a report table against its first column, log-log when
/// all values are positive.
pub fn table_script(csv: &str, png: &str, columns: &[String], log: bool) -> String {
    let mut s = format!(
        "set datafile separator ','\n\
         set terminal pngcairo size 900,600\n\
         set output '{png}'\n\
         set xlabel '{}'\n",
        columns.first().map_or("", String::as_str)
    );
    if log {
        s.push_str("set logscale xy\n");
    }
    let series: Vec<String> = (2..=columns.len())
        .map(|k| {
            format!(
                "'{csv}' using 1:{k} with linespoints title '{}'",
                columns[k - 1]
            )
        })
        .collect();
    s.push_str(&format!("plot {}\n", series.join(", ")));
    s
}

/// `plot_diagnostics.gp` and, when given, `plot_snapshot.gp` in `dir`.
pub fn write_plot_scripts(dir: &Path, snapshot: Option<&str>) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|err| Error::io(dir, err))?;
    let mut out = Vec::new();
    let mut put = |name: &str, text: String| -> Result<()> {
        let p = dir.join(name);
        fs::write(&p, text).map_err(|err| Error::io(&p, err))?;
        out.push(p);
        Ok(())
    };
    put(
        "plot_diagnostics.gp",
        diagnostics_script("diagnostics.csv", "diagnostics.png"),
    )?;
    if let Some(csv) = snapshot {
        put("plot_snapshot.gp", snapshot_script(csv, "snapshot.png"))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripts_reference_their_inputs() {
        let s = diagnostics_script("d.csv", "d.png");
        assert!(s.contains("'d.csv' using 1:2") && s.contains("set output 'd.png'"));
        assert!(snapshot_script("s.csv", "s.png").contains("using 2:5"));
        let cols = vec!["h".to_string(), "a".to_string(), "b".to_string()];
        let t = table_script("t.csv", "t.png", &cols, true);
        assert!(t.contains("using 1:3 with linespoints title 'b'") && t.contains("logscale"));
    }
}
