use std::io::{Read, Write};

use crate::asymptotics::{ExpansionFit, PredictionReport};
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::solver::ContinuationResult;
use crate::spectrum::{IndicialRoots, SpectrumTable};

/// `x,u,p,y_p` rows of a solution profile.
pub fn write_solution_csv<W: Write>(w: W, x: &[f64], u: &[f64], p: f64, y_p: f64) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "u", "p", "y_p"])?;
    for (xi, ui) in x.iter().zip(u) {
        out.write_record([fmt_f64(*xi), fmt_f64(*ui), fmt_f64(p), fmt_f64(y_p)])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTable {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub p: f64,
    pub y_p: f64,
}

pub fn read_solution_csv<R: Read>(r: R) -> Result<SolutionTable> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "u", "p", "y_p"] {
        return Err(Error::Parse(format!("solution header must be x,u,p,y_p, got {}", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut t = SolutionTable {
        x: vec![],
        u: vec![],
        p: f64::NAN,
        y_p: f64::NAN,
    };
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |k: usize| -> Result<f64> {
            rec.get(k)
                .ok_or_else(|| Error::Parse(format!("line {}: missing column {}", line + 2, headers[k].to_string())))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", line + 2, &headers[k])))
        };
        let (x, u, p, y) = (field(0)?, field(1)?, field(2)?, field(3)?);
        if line == 0 {
            t.p = p;
            t.y_p = y;
        } else if p != t.p || y != t.y_p {
            return Err(Error::Parse(format!("line {}: p and y_p must be constant", line + 2)));
        }
        t.x.push(x);
        t.u.push(u);
    }
    if t.x.len() < 3 {
        return Err(Error::Parse("solution needs at least 3 rows".into()));
    }
    Ok(t)
}

/// `p,Y_p,residual,min_u,max_u` per continuation stage.
pub fn write_continuation_csv<W: Write>(w: W, r: &ContinuationResult) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["p", "Y_p", "residual", "min_u", "max_u"])?;
    for s in &r.stages {
        out.write_record([
            fmt_f64(s.p),
            fmt_f64(s.y_p),
            fmt_f64(s.residual),
            fmt_f64(s.u.min()),
            fmt_f64(s.u.max()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct FitRow<'a> {
    pub fit: &'a ExpansionFit,
    pub report: &'a PredictionReport,
}

/// `tip,gamma_hat,predicted,rel_dev,window,fit_error` rows; the window is
/// written as `lo:hi`.
pub fn write_fit_csv<W: Write>(w: W, rows: &[FitRow<'_>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["tip", "gamma_hat", "predicted", "rel_dev", "window", "fit_error"])?;
    for r in rows {
        out.write_record([
            r.fit.tip.label().to_string(),
            fmt_f64(r.fit.gamma_hat),
            fmt_f64(r.report.predicted),
            fmt_f64(r.report.rel_dev),
            format!("{}:{}", fmt_f64(r.fit.window.0), fmt_f64(r.fit.window.1)),
            fmt_f64(r.fit.fit_error),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Spectrum table joined with indicial roots by mode index.
pub fn write_spectrum_csv<W: Write>(w: W, table: &SpectrumTable, roots: &IndicialRoots) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["mode_index", "eigenvalue", "multiplicity", "nu_minus", "nu_plus"])?;
    for (j, e) in table.entries.iter().enumerate() {
        let pair = roots.roots.iter().find(|r| r.mode == j);
        let (m, p) = pair.map_or((String::new(), String::new()), |r| (fmt_f64(r.minus), fmt_f64(r.plus)));
        out.write_record([j.to_string(), fmt_f64(e.eigenvalue), e.multiplicity.to_string(), m, p])?;
    }
    out.flush()?;
    Ok(())
}
