//! Pearson correlation, 2x2 chi-square and Holm step-down adjustment.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub n: usize,
    pub p_two_sided: f64,
}

/// Sample Pearson r with a two-sided p-value from Student's t on n-2 df.
/// A perfect correlation gets p = 0 directly.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::TooFewPoints(n));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let p = if 1.0 - r.abs() < 1e-15 {
        0.0
    } else {
        let df = (n - 2) as f64;
        let t = r * (df / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("positive df");
        (2.0 * dist.sf(t.abs())).min(1.0)
    };
    Ok(CorrelationResult { r, n, p_two_sided: p })
}

/// Rows: Scenario-1 status (successful, unsuccessful); columns: Scenario-4
/// status in the same order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable2x2 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl ContingencyTable2x2 {
    pub fn from_rows(rows: [[u64; 2]; 2]) -> Self {
        Self {
            a: rows[0][0],
            b: rows[0][1],
            c: rows[1][0],
            d: rows[1][1],
        }
    }

    pub fn rows(&self) -> [[u64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    pub fn transposed(&self) -> Self {
        Self {
            a: self.a,
            b: self.c,
            c: self.b,
            d: self.d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub chi2: f64,
    pub df: u32,
    pub p: f64,
    pub n: u64,
}

/// Pearson chi-square on 1 df, no continuity correction.
pub fn chi_square_2x2(t: &ContingencyTable2x2) -> Result<ChiSquareResult, StatsError> {
    let n = t.total();
    let margins = [t.a + t.b, t.c + t.d, t.a + t.c, t.b + t.d];
    if n == 0 || margins.contains(&0) {
        return Err(StatsError::ZeroMargin);
    }
    let det = t.a as f64 * t.d as f64 - t.b as f64 * t.c as f64;
    let denom: f64 = margins.iter().map(|&m| m as f64).product();
    let chi2 = n as f64 * det * det / denom;
    let p = ChiSquared::new(1.0).expect("1 df").sf(chi2);
    Ok(ChiSquareResult { chi2, df: 1, p, n })
}

/// Holm step-down adjustment, returned in input order.
pub fn stepdown_adjust(pvals: &[f64]) -> Result<Vec<f64>, StatsError> {
    if let Some(&p) = pvals.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(StatsError::OutOfRange(p));
    }
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].total_cmp(&pvals[b]));
    let mut out = vec![0.0; m];
    let mut running = 0.0f64;
    for (rank, &i) in order.iter().enumerate() {
        let adj = ((m - rank) as f64 * pvals[i]).min(1.0);
        running = running.max(adj);
        out[i] = running;
    }
    Ok(out)
}
