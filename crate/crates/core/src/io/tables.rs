use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::{
    CompareReport, ConvergenceReport, DispersionMetrics, GridDeviation, LedgerEntry, ProbeRecord, RunResult,
    Snapshot, StudyField,
};

/// Fixed scientific notation with 17 significant digits, which round-trips
/// every `f64`.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn table_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Table(format!("{other:?}")),
    }
}

fn write_rows<W: Write>(out: W, header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(header).map_err(table_err)?;
    for row in rows {
        w.write_record(&row).map_err(table_err)?;
    }
    w.flush()?;
    Ok(())
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

const PROBE_HEADER: [&str; 10] = [
    "t_hat",
    "t_hat_half",
    "T_front",
    "T_rear",
    "rho_front_half",
    "rho_rear_half",
    "p_front",
    "p_rear",
    "v_mid",
    "q0",
];

/// Probe table: the standard columns followed by `extra_columns`.
pub fn write_probes<W: Write>(out: W, records: &[ProbeRecord], extra_columns: &[String]) -> Result<()> {
    let mut header = strings(&PROBE_HEADER);
    header.extend(extra_columns.iter().cloned());
    let rows = records.iter().map(|r| {
        let mut row: Vec<String> = [
            r.t_hat,
            r.t_hat_half,
            r.t_front,
            r.t_rear,
            r.rho_front_half,
            r.rho_rear_half,
            r.p_front,
            r.p_rear,
            r.v_mid,
            r.q0,
        ]
        .iter()
        .map(|&x| format_value(x))
        .collect();
        row.extend(r.extra.iter().map(|&x| format_value(x)));
        row
    });
    write_rows(out, &header, rows)
}

/// One row per node and half node, ordered by position.
pub fn write_snapshot<W: Write>(out: W, snap: &Snapshot) -> Result<()> {
    let f = &snap.fields;
    let n = f.rho.len();
    let dx = 1.0 / n as f64;
    let header = strings(&["x_hat", "grid", "T", "rho", "p", "Pi", "v", "q"]);
    let empty = String::new;
    let rows = (0..=2 * n).map(|j| {
        let i = j / 2;
        if j % 2 == 0 {
            vec![
                format_value(i as f64 * dx),
                "node".to_string(),
                empty(),
                empty(),
                empty(),
                empty(),
                format_value(f.v[i]),
                format_value(f.q[i]),
            ]
        } else {
            vec![
                format_value((i as f64 + 0.5) * dx),
                "half".to_string(),
                format_value(f.t[i]),
                format_value(f.rho[i]),
                format_value(snap.p[i]),
                format_value(f.pi[i]),
                empty(),
                empty(),
            ]
        }
    });
    write_rows(out, &header, rows)
}

pub fn write_ledger<W: Write>(out: W, ledger: &[LedgerEntry]) -> Result<()> {
    let header = strings(&["step", "t_hat", "mass_drift", "injected_heat", "heat_residual"]);
    let rows = ledger.iter().map(|e| {
        vec![
            e.step.to_string(),
            format_value(e.t_hat),
            format_value(e.mass_drift),
            format_value(e.injected_heat),
            format_value(e.heat_residual),
        ]
    });
    write_rows(out, &header, rows)
}

/// `snapshot_<t>.csv` with the requested time written as given.
pub fn snapshot_file_name(requested: f64) -> String {
    format!("snapshot_{requested}.csv")
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path: PathBuf = dir.join(name);
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes `probes.csv`, `ledger.csv` and one file per snapshot into `dir`.
pub fn write_run(dir: &Path, run: &RunResult) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    write_probes(create(dir, "probes.csv")?, &run.probes, &run.extra_columns)?;
    written.push(dir.join("probes.csv"));
    write_ledger(create(dir, "ledger.csv")?, &run.ledger)?;
    written.push(dir.join("ledger.csv"));
    for snap in &run.snapshots {
        let name = snapshot_file_name(snap.requested);
        write_snapshot(create(dir, &name)?, snap)?;
        written.push(dir.join(name));
    }
    Ok(written)
}

/// Writes `errors.csv` and `orders.csv`. A field without a defined order is
/// written as `degenerate`.
pub fn write_convergence(dir: &Path, report: &ConvergenceReport) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut header = strings(&["cells", "dt"]);
    header.extend(StudyField::ALL.iter().map(|f| format!("err_{}", f.name())));
    let rows = report.levels.iter().map(|l| {
        let mut row = vec![l.cells.to_string(), format_value(l.dt)];
        row.extend(l.errors.iter().map(|&e| format_value(e)));
        row
    });
    write_rows(create(dir, "errors.csv")?, &header, rows)?;

    let rows = report.orders.iter().map(|o| {
        vec![
            o.field.name().to_string(),
            o.order.map_or_else(|| "degenerate".to_string(), format_value),
        ]
    });
    write_rows(create(dir, "orders.csv")?, &strings(&["field", "order"]), rows)
}

/// Writes `deviations.csv`.
pub fn write_grid_deviations(dir: &Path, deviations: &[GridDeviation]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let rows = deviations
        .iter()
        .map(|d| vec![d.cells.to_string(), d.field.name().to_string(), format_value(d.deviation)]);
    write_rows(
        create(dir, "deviations.csv")?,
        &strings(&["cells", "field", "deviation"]),
        rows,
    )
}

pub fn write_dispersion_metrics<W: Write>(out: W, rows: &[(&str, DispersionMetrics)]) -> Result<()> {
    let rows = rows.iter().map(|(name, m)| {
        vec![
            name.to_string(),
            format_value(m.max_undershoot),
            format_value(m.oscillation_energy),
        ]
    });
    write_rows(
        out,
        &strings(&["integrator", "max_undershoot", "oscillation_energy"]),
        rows,
    )
}

/// Writes `probes_splitting.csv`, `probes_rk4.csv` and
/// `dispersion_metrics.csv`.
pub fn write_study_compare(dir: &Path, report: &CompareReport) -> Result<()> {
    fs::create_dir_all(dir)?;
    for run in [&report.splitting, &report.rk4] {
        let name = format!("probes_{}.csv", run.integrator.name());
        write_probes(create(dir, &name)?, &run.probes, &run.extra_columns)?;
    }
    write_dispersion_metrics(
        create(dir, "dispersion_metrics.csv")?,
        &[
            ("splitting", report.splitting_metrics),
            ("rk4", report.rk4_metrics),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::SyncFields;

    fn record(x: f64) -> ProbeRecord {
        ProbeRecord {
            step: 3,
            t_hat: x,
            t_hat_half: x - 0.5,
            t_front: 1.0,
            t_rear: 1.0,
            rho_front_half: 0.5,
            rho_rear_half: 0.5,
            rho_rear: 0.5,
            p_front: 0.0,
            p_rear: 0.0,
            v_mid: -1e-300,
            q0: 0.0,
            extra: vec![2.5],
        }
    }

    #[test]
    fn values_round_trip_through_text() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, f64::MIN_POSITIVE, 0.0, -0.0] {
            let s = format_value(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_value(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn probe_table_layout() {
        let mut buf = Vec::new();
        write_probes(&mut buf, &[record(1.0), record(2.0)], &["T_node3".to_string()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(
            lines[0],
            "t_hat,t_hat_half,T_front,T_rear,rho_front_half,rho_rear_half,p_front,p_rear,v_mid,q0,T_node3"
        );
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[3], "");
        assert!(!text.contains('\r'));
        let fields: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(fields.len(), 11);
        assert_eq!(fields[1].parse::<f64>().unwrap(), 1.5);
        assert_eq!(fields[8], "-1.0000000000000000e-300");
    }

    #[test]
    fn snapshot_interleaves_nodes_and_cells() {
        let snap = Snapshot {
            requested: 0.5,
            t_hat: 0.5,
            step: 5,
            fields: SyncFields {
                rho: vec![1.0, 2.0],
                v: vec![0.0, 0.1, 0.0],
                t: vec![3.0, 4.0],
                q: vec![0.2, 0.3, 0.0],
                pi: vec![0.0, 0.0],
            },
            p: vec![5.0, 6.0],
        };
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &snap).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("0.0000000000000000e0,node,,,,,"));
        assert!(lines[2].starts_with("2.5000000000000000e-1,half,3.0"));
        assert!(lines[4].contains(",half,4.0"));
        assert!(lines[5].starts_with("1.0000000000000000e0,node"));
        assert_eq!(snapshot_file_name(0.25), "snapshot_0.25.csv");
        assert_eq!(snapshot_file_name(2.0), "snapshot_2.csv");
    }

    #[test]
    fn ledger_layout() {
        let mut buf = Vec::new();
        let e = LedgerEntry {
            step: 7,
            t_hat: 0.07,
            mass_drift: 0.0,
            injected_heat: 1e-6,
            heat_residual: -1e-20,
        };
        write_ledger(&mut buf, &[e]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("step,t_hat,mass_drift,injected_heat,heat_residual\n7,"));
    }
}
