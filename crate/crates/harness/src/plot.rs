//! Plot-ready CSV output. Rows are written in a fixed order so files are bit-stable.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use microsob_core::seminorm::WindowedSpectrum;
use microsob_core::wavefront::{OrderField, WavefrontSet};
use microsob_core::SpectralDistribution;

use crate::report::VerificationReport;

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x}")
    }
}

/// `(cell, center, direction, angle, ŝ, status, ...)`, one row per cell and direction.
pub fn write_order_heatmap(field: &OrderField, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "cell",
        "center",
        "direction",
        "angle",
        "order",
        "status",
        "slope",
        "residual",
        "shells",
    ])?;
    for row in field.rows() {
        w.write_record([
            row.cell.to_string(),
            row.center,
            row.direction.to_string(),
            num(row.angle),
            num(row.order),
            format!("{:?}", row.status).to_lowercase(),
            num(row.slope),
            num(row.residual),
            row.shells.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `(j, E_j, log2 E_j, log2(E_{j+1}/E_j))` over all shells of the unwindowed spectrum.
pub fn write_annulus_profile(u: &SpectralDistribution, path: &Path) -> Result<()> {
    let profile = WindowedSpectrum::from_spectrum(u).annulus_profile(None);
    let mut w = writer(path)?;
    w.write_record(["j", "energy", "log2_energy", "local_slope"])?;
    for j in profile.j_min..=profile.j_max() {
        let e = profile.energy(j);
        let slope = if j < profile.j_max() && e > 0.0 {
            (profile.energy(j + 1) / e).log2()
        } else {
            f64::NAN
        };
        w.write_record([j.to_string(), num(e), num(e.log2()), num(slope)])?;
    }
    w.flush()?;
    Ok(())
}

/// `(cell, center, direction, representative)` per member of `WF^r`; only the header when empty.
pub fn write_wavefront(wf: &WavefrontSet, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["r", "cell", "center", "direction", "representative"])?;
    let grid = wf.set.grid();
    for (cell, d) in wf.members() {
        let rep: Vec<String> = grid.representative(d).iter().map(|x| num(*x)).collect();
        let center: Vec<String> = wf.lattice.center(cell).iter().map(|x| num(*x)).collect();
        w.write_record([
            num(wf.r),
            cell.to_string(),
            center.join(" "),
            d.to_string(),
            rep.join(" "),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Every measured value of every check, long format.
pub fn write_ratio_table(report: &VerificationReport, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["section", "check", "verdict", "quantity", "value"])?;
    for (section, checks) in report.sections() {
        for c in checks {
            for (k, v) in &c.measured {
                w.write_record([section, &c.id, &c.verdict.to_string(), k, &num(*v)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, text: &str) -> Result<()> {
    let mut f =
        std::fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    f.write_all(text.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use microsob_core::wavefront::{estimate_wavefront, FitConfig};
    use microsob_core::{synthesize, CellLattice, GridSpec};

    use crate::corpus;

    fn read(path: &Path) -> Vec<Vec<String>> {
        let mut r = csv::Reader::from_path(path).unwrap();
        let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect()];
        rows.extend(
            r.records()
                .map(|rec| rec.unwrap().iter().map(String::from).collect()),
        );
        rows
    }

    #[test]
    fn empty_wavefront_gives_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(1, 1024).unwrap();
        let u = synthesize(&corpus::gaussian(), &g).unwrap();
        let wf =
            estimate_wavefront(&u, 1.0, &CellLattice::standard(1), &FitConfig::default()).unwrap();
        assert!(wf.is_empty());
        let path = dir.path().join("wf.csv");
        write_wavefront(&wf, &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "r,cell,center,direction,representative\n"
        );
    }

    #[test]
    fn delta_profile_has_unit_slope() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(1, 1024).unwrap();
        let u = synthesize(&corpus::delta(), &g).unwrap();
        let path = dir.path().join("profile.csv");
        write_annulus_profile(&u, &path).unwrap();
        let rows = read(&path);
        for row in &rows[2..rows.len() - 2] {
            let slope: f64 = row[3].parse().unwrap();
            assert!((slope - 1.0).abs() < 1e-9, "{row:?}");
        }
    }

    #[test]
    fn heaviside_heatmap_marks_the_jump_cell() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(1, 4096).unwrap();
        let u = synthesize(&corpus::heaviside(), &g).unwrap();
        let field =
            OrderField::compute(&u, &CellLattice::standard(1), &FitConfig::default()).unwrap();
        let path = dir.path().join("orders.csv");
        write_order_heatmap(&field, &path).unwrap();
        let rows = read(&path);
        for row in &rows[1..] {
            let cell: usize = row[0].parse().unwrap();
            if cell == 4 {
                assert_eq!(row[5], "fitted");
                assert!(
                    (row[4].parse::<f64>().unwrap() - 0.5).abs() < 0.15,
                    "{row:?}"
                );
            } else if cell == 0 || cell == 7 {
                assert_eq!(row[5], "smooth", "{row:?}");
            }
        }
    }
}
