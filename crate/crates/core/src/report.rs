//! Report emission: JSON documents, flat CSV tables for plotting, binary
//! grid files, and the recovery bundle.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::characterize::{BlowupReport, RecoveredSymbol};
use crate::error::Result;
use crate::grid::io::{write_grid_function, write_slabs};
use crate::grid::GridFunction;
use crate::operators::MembershipReport;
use crate::oscint::TraceRow;
use crate::spaces::NormReport;
use crate::symbols::{SeminormTable, SymbolTable};

/// Pretty JSON with a trailing newline; field order follows the types, so
/// equal reports give equal bytes.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn write_rows<W: Write>(w: W, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(&r)?;
    }
    out.flush()?;
    Ok(())
}

fn index(v: &[u32]) -> String {
    v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(";")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// `epsilon,value_re,value_im,delta`.
pub fn write_trace_csv<W: Write>(w: W, trace: &[TraceRow]) -> Result<()> {
    let rows = trace
        .iter()
        .map(|r| vec![r.epsilon.to_string(), r.value.re.to_string(), r.value.im.to_string(), opt(r.delta)])
        .collect();
    write_rows(w, &["epsilon", "value_re", "value_im", "delta"], rows)
}

/// `alpha,beta,norm,stable`, one row per entry with the fine-grid norm;
/// multi-indices are joined with `;`.
pub fn write_membership_csv<W: Write>(w: W, report: &MembershipReport) -> Result<()> {
    let rows = report
        .entries
        .iter()
        .map(|e| vec![index(&e.alpha), index(&e.beta), e.fine.to_string(), e.stable.to_string()])
        .collect();
    write_rows(w, &["alpha", "beta", "norm", "stable"], rows)
}

/// `j,weight,sup,weighted`: the dyadic band table of a norm report.
pub fn write_bands_csv<W: Write>(w: W, report: &NormReport) -> Result<()> {
    let rows = report
        .bands
        .iter()
        .map(|b| vec![b.j.to_string(), b.weight.to_string(), b.sup.to_string(), b.weighted.to_string()])
        .collect();
    write_rows(w, &["j", "weight", "sup", "weighted"], rows)
}

/// `n,value` for the coarse and fine grid of a refinement check.
pub fn write_refinement_csv<W: Write>(w: W, report: &NormReport) -> Result<()> {
    let rows = report
        .refinement
        .iter()
        .flat_map(|r| {
            [
                vec![r.coarse_n.to_string(), r.coarse_value.to_string()],
                vec![r.fine_n.to_string(), r.fine_value.to_string()],
            ]
        })
        .collect();
    write_rows(w, &["n", "value"], rows)
}

/// `alpha,beta,value,exponent,allowed,fits`.
pub fn write_seminorm_csv<W: Write>(w: W, table: &SeminormTable) -> Result<()> {
    let rows = table
        .entries
        .iter()
        .map(|e| {
            vec![
                index(&e.alpha),
                index(&e.beta),
                e.value.to_string(),
                opt(e.exponent),
                e.allowed.to_string(),
                e.fits.to_string(),
            ]
        })
        .collect();
    write_rows(w, &["alpha", "beta", "value", "exponent", "allowed", "fits"], rows)
}

/// `n,norm`.
pub fn write_blowup_csv<W: Write>(w: W, report: &BlowupReport) -> Result<()> {
    let rows = report.rows.iter().map(|r| vec![r.n.to_string(), r.norm.to_string()]).collect();
    write_rows(w, &["n", "norm"], rows)
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_grid_file(path: &Path, u: &GridFunction) -> Result<()> {
    let mut w = create(path)?;
    write_grid_function(&mut w, u)?;
    w.flush()?;
    Ok(())
}

/// Symbol table as one x-slab per frequency node.
pub fn write_symbol_file(path: &Path, table: &SymbolTable) -> Result<()> {
    let slabs = table.x_slabs();
    let refs: Vec<&[_]> = slabs.iter().map(|s| s.as_slice()).collect();
    let mut w = create(path)?;
    write_slabs(&mut w, table.grid(), false, &refs)?;
    w.flush()?;
    Ok(())
}

/// `symbol.bin`, `window.bin`, `diagnostics.json` and, with a class verdict,
/// `class_report.csv` under `dir`.
pub fn write_recovery_bundle(dir: &Path, r: &RecoveredSymbol) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_symbol_file(&dir.join("symbol.bin"), &r.table)?;
    write_grid_file(&dir.join("window.bin"), &r.window)?;
    write_json(&dir.join("diagnostics.json"), &r.diagnostics())?;
    if let Some(t) = &r.class_report {
        let mut w = create(&dir.join("class_report.csv"))?;
        write_seminorm_csv(&mut w, t)?;
        w.flush()?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct Metadata<'a> {
    command: &'a str,
    version: &'a str,
    unix_time: u64,
}

/// Run metadata kept apart from the reports so that those stay reproducible.
pub fn write_metadata(dir: &Path, command: &str) -> Result<()> {
    let unix_time = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    write_json(&dir.join("metadata.json"), &Metadata { command, version: env!("CARGO_PKG_VERSION"), unix_time })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::C64;

    fn text(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> String {
        let mut buf = Vec::new();
        f(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn trace_header_and_rows() {
        let empty = text(|b| write_trace_csv(b, &[]));
        assert_eq!(empty, "epsilon,value_re,value_im,delta\n");
        let rows = [
            TraceRow { epsilon: 0.4, value: C64::new(0.5, 0.0), delta: None },
            TraceRow { epsilon: 0.2, value: C64::new(0.7, -0.1), delta: Some(0.2) },
        ];
        let s = text(|b| write_trace_csv(b, &rows));
        assert_eq!(s.lines().nth(1), Some("0.4,0.5,0,"));
        assert_eq!(s.lines().nth(2), Some("0.2,0.7,-0.1,0.2"));
    }

    #[test]
    fn membership_header() {
        let report = MembershipReport {
            operator: "id".into(),
            params: crate::operators::MembershipParams { order: 0.0, rho: 1.0, mtilde: 0, budget: 0, q: 2.0 },
            coarse_grid: crate::grid::Grid::new(1, 8, 1.0).unwrap(),
            fine_grid: crate::grid::Grid::new(1, 16, 1.0).unwrap(),
            entries: vec![],
            verdict: true,
        };
        assert_eq!(text(|b| write_membership_csv(b, &report)), "alpha,beta,norm,stable\n");
    }
}
