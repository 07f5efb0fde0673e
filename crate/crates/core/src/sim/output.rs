use std::io::{self, Write};

use super::{HistogramBin, SimulationResult};
use crate::stats::format_sig;

/// One row of the simulation summary CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    pub sigma: f64,
    pub replicates: usize,
    pub seed: u64,
    pub mean: f64,
    pub sd: f64,
    pub ks: Option<f64>,
}

impl SummaryRow {
    pub fn new(alpha: f64, beta: f64, sigma: f64, result: &SimulationResult) -> Self {
        Self {
            alpha,
            beta,
            tau: result.tau,
            sigma,
            replicates: result.replicates,
            seed: result.seed,
            mean: result.mean,
            sd: result.sd,
            ks: result.ks,
        }
    }
}

/// `alpha,beta,tau,sigma,R,seed,mean,sd,ks`; a missing KS value is left empty.
pub fn write_summary_csv<W: Write>(mut w: W, rows: &[SummaryRow]) -> io::Result<()> {
    writeln!(w, "alpha,beta,tau,sigma,R,seed,mean,sd,ks")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            format_sig(r.alpha, 6),
            format_sig(r.beta, 6),
            format_sig(r.tau, 6),
            format_sig(r.sigma, 6),
            r.replicates,
            r.seed,
            format_sig(r.mean, 6),
            format_sig(r.sd, 6),
            r.ks.map(|k| format_sig(k, 6)).unwrap_or_default(),
        )?;
    }
    Ok(())
}

/// One integer per line.
pub fn write_hitting_times<W: Write>(mut w: W, times: &[u32]) -> io::Result<()> {
    for t in times {
        writeln!(w, "{t}")?;
    }
    Ok(())
}

pub fn write_histogram_csv<W: Write>(mut w: W, bins: &[HistogramBin]) -> io::Result<()> {
    writeln!(w, "bin_left,bin_right,count")?;
    for b in bins {
        writeln!(
            w,
            "{},{},{}",
            format_sig(b.left, 6),
            format_sig(b.right, 6),
            b.count
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_layout() {
        let result = SimulationResult::from_hitting_times(vec![10, 12], 100.0, 7, 10_000);
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &[SummaryRow::new(4.0, 0.2, 20.0, &result)]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "alpha,beta,tau,sigma,R,seed,mean,sd,ks\n4,0.2,100,20,2,7,11,1.41421,\n"
        );
    }
}
