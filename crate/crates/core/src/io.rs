//! CSV and JSON serialization of configurations, partitions and curves.

use crate::coverage::CoverageCurve;
use crate::error::{Error, Result};
use crate::geometry::Window;
use crate::interference::InterferenceCurve;
use crate::mnnr::{InteriorMask, Partition, Role};
use crate::pointproc::{Configuration, Point};
use crate::superposition::MarkedConfiguration;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// `x_km,y_km`, one atom per row. The window goes to a JSON sidecar.
pub fn write_configuration_csv<W: Write>(w: W, config: &Configuration) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x_km", "y_km"])?;
    for p in &config.atoms {
        out.write_record([p.x.to_string(), p.y.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_configuration_csv<R: Read>(r: R, window: Window<f64>) -> Result<Configuration> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x_km", "y_km"] {
        return Err(Error::Io(format!("expected header x_km,y_km, got {}", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut atoms = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Io(format!("bad number in row {:?}", rec)))
        };
        atoms.push(Point::new(num(0)?, num(1)?));
    }
    Configuration::new(atoms, window)
}

/// `atom_index,role,partner_index,interior`; partner `-1` for singles,
/// interior `1` for every atom when no mask is given.
pub fn write_partition_csv<W: Write>(w: W, partition: &Partition, mask: Option<&InteriorMask<f64>>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["atom_index", "role", "partner_index", "interior"])?;
    for i in 0..partition.n_atoms() {
        let role = match partition.role(i) {
            Role::Single => "single",
            Role::Paired => "paired",
        };
        let partner = partition.partner(i).map_or(-1, |j| j as i64);
        let interior = mask.is_none_or(|m| m.is_interior(i));
        out.write_record([i.to_string(), role.into(), partner.to_string(), u8::from(interior).to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// `r_km,value,stderr`; an absent stderr leaves the column empty.
pub fn write_curve_csv<W: Write>(w: W, grid: &[f64], values: &[f64], stderr: Option<&[f64]>) -> Result<()> {
    if values.len() != grid.len() || stderr.is_some_and(|s| s.len() != grid.len()) {
        return Err(Error::GridMismatch("curve columns differ in length".into()));
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["r_km", "value", "stderr"])?;
    for (k, (r, v)) in grid.iter().zip(values).enumerate() {
        out.write_record([r.to_string(), v.to_string(), opt(stderr.map(|s| s[k]))])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_interference_csv<W: Write>(w: W, curve: &InterferenceCurve) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["R_km", "mean_I1", "mean_I2", "stderr_I1", "stderr_I2"])?;
    for k in 0..curve.radii.len() {
        out.write_record([
            curve.radii[k].to_string(),
            curve.mean_i1[k].to_string(),
            curve.mean_i2[k].to_string(),
            curve.stderr_i1[k].to_string(),
            curve.stderr_i2[k].to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `x_km,y_km,role,parent_index`; parents and daughters share an index, singles carry `-1`.
pub fn write_marked_csv<W: Write>(w: W, m: &MarkedConfiguration) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x_km", "y_km", "role", "parent_index"])?;
    for p in &m.singles.atoms {
        out.write_record([p.x.to_string(), p.y.to_string(), "single".into(), "-1".into()])?;
    }
    for (j, (p, d)) in m.parents.atoms.iter().zip(&m.daughters).enumerate() {
        out.write_record([p.x.to_string(), p.y.to_string(), "parent".into(), j.to_string()])?;
        out.write_record([d.x.to_string(), d.y.to_string(), "daughter".into(), j.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// `T_linear,T_dB,coverage,stderr`; meta goes to a JSON sidecar.
pub fn write_coverage_csv<W: Write>(w: W, curve: &CoverageCurve) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["T_linear", "T_dB", "coverage", "stderr"])?;
    for (k, db) in curve.thresholds_db().iter().enumerate() {
        out.write_record([
            curve.thresholds[k].to_string(),
            db.to_string(),
            curve.values[k].to_string(),
            curve.stderr[k].to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Create `path` (and its parent directories) and hand a buffered writer to `f`.
pub fn write_file<P, F>(path: P, f: F) -> Result<()>
where
    P: AsRef<Path>,
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let path = path.as_ref();
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{CurveMeta, Method, Model, Association};
    use crate::mnnr::mnnr_partition;

    fn text<F: FnOnce(&mut Vec<u8>) -> Result<()>>(f: F) -> String {
        let mut buf = Vec::new();
        f(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn configuration_roundtrip() {
        let w = Window::centered_square(10.0).unwrap();
        let c = Configuration::new(vec![Point::new(0.1, -2.5), Point::new(1.0 / 3.0, 4.0)], w).unwrap();
        let s = text(|b| write_configuration_csv(b, &c));
        assert!(s.starts_with("x_km,y_km\n0.1,-2.5\n"));
        let back = read_configuration_csv(s.as_bytes(), w).unwrap();
        assert_eq!(back, c);
        assert!(read_configuration_csv("a,b\n1,2\n".as_bytes(), w).is_err());
    }

    #[test]
    fn partition_rows() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(5.0, 0.0)];
        let p = mnnr_partition(&pts).unwrap();
        let s = text(|b| write_partition_csv(b, &p, None));
        assert_eq!(s, "atom_index,role,partner_index,interior\n0,paired,1,1\n1,paired,0,1\n2,single,-1,1\n");
    }

    #[test]
    fn curves_and_coverage() {
        let s = text(|b| write_curve_csv(b, &[0.5, 1.0], &[0.2, 0.4], None));
        assert_eq!(s, "r_km,value,stderr\n0.5,0.2,\n1,0.4,\n");
        let mut buf = Vec::new();
        assert!(write_curve_csv(&mut buf, &[0.5], &[0.2, 0.4], None).is_err());
        let c = CoverageCurve {
            thresholds: vec![1.0, 10.0],
            values: vec![0.5, 0.1],
            stderr: vec![0.0, 0.0],
            meta: CurveMeta {
                model: Model::Baseline,
                association: Association::Closest,
                scheme: "none".into(),
                lambda: 0.25,
                beta: 4.0,
                p: 1.0,
                sigma2: 0.0,
                seed: None,
                reps: None,
                method: Method::Analytic,
            },
        };
        let s = text(|b| write_coverage_csv(b, &c));
        assert_eq!(s, "T_linear,T_dB,coverage,stderr\n1,0,0.5,0\n10,10,0.1,0\n");
        let j = text(|b| write_json(b, &c.meta));
        assert!(j.contains("\"rule\": \"closest\""));
    }
}
