//! CSV tables: parameter sweeps, the condensed `A_eq`, the self-check summary.

use std::io::Write;

use gradhom_core::homogenization::SweepRow;
use gradhom_core::selfcheck::SelfCheckReport;
use gradhom_core::tensor::{condensed_grad_matrix, grad_coordinate_labels};
use gradhom_core::GradElasticTensor;

pub const SWEEP_HEADER: [&str; 5] = ["lambda_ratio", "nu1", "a2_norm", "a4_norm", "a6_norm"];

/// Shortest decimal that reads back to the same `f64`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_sweep<W: Write>(w: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_HEADER)?;
    for r in rows {
        out.write_record([r.lambda_ratio, r.nu1, r.a2_norm, r.a4_norm, r.a6_norm].map(num))?;
    }
    out.flush()?;
    Ok(())
}

/// Square matrix with a header row and a label column naming the
/// coordinates `b_ijl`.
pub fn write_condensed<W: Write>(w: W, a: &GradElasticTensor) -> csv::Result<()> {
    let labels = grad_coordinate_labels(a.dim());
    let m = condensed_grad_matrix(a);
    let mut out = csv::Writer::from_writer(w);
    out.write_record(std::iter::once("coordinate".to_string()).chain(labels.iter().cloned()))?;
    for (i, l) in labels.iter().enumerate() {
        out.write_record(std::iter::once(l.clone()).chain((0..m.size()).map(|j| num(m.get(i, j)))))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_checks<W: Write>(w: W, r: &SelfCheckReport) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["check", "cases", "max_residual", "tolerance", "passed"])?;
    for c in &r.checks {
        out.write_record([
            c.name.to_string(),
            c.cases.to_string(),
            num(c.max_residual),
            num(c.tolerance),
            c.passed.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use gradhom_core::homogenization::ellipse_sweep;

    #[test]
    fn sweep_header_and_rows() {
        let rows = ellipse_sweep(&[0.5, 1.0], &[0.0], 1.0, 1.0).unwrap();
        let mut buf = Vec::new();
        write_sweep(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("lambda_ratio,nu1,a2_norm,a4_norm,a6_norm"));
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, -std::f64::consts::PI / 32.0, 1e-8, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }
}
