use std::collections::HashMap;

use crate::error::{Error, Result};

struct Contingency {
    n: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    /// Non-zero cells as `(row, col, count)`.
    cells: Vec<(usize, usize, usize)>,
}

fn relabel(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = HashMap::new();
    let dense = labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect();
    (dense, map.len())
}

fn contingency(a: &[usize], b: &[usize]) -> Contingency {
    let (a, ra) = relabel(a);
    let (b, rb) = relabel(b);
    let mut table: HashMap<(usize, usize), usize> = HashMap::new();
    let mut rows = vec![0; ra];
    let mut cols = vec![0; rb];
    for (&x, &y) in a.iter().zip(&b) {
        *table.entry((x, y)).or_insert(0) += 1;
        rows[x] += 1;
        cols[y] += 1;
    }
    let mut cells: Vec<_> = table.into_iter().map(|((x, y), c)| (x, y, c)).collect();
    cells.sort_unstable();
    Contingency {
        n: a.len(),
        rows,
        cols,
        cells,
    }
}

fn entropy(counts: &[usize], n: usize) -> f64 {
    let n = n as f64;
    counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

fn mi_from(ct: &Contingency) -> f64 {
    let n = ct.n as f64;
    let mi: f64 = ct
        .cells
        .iter()
        .map(|&(x, y, c)| {
            let c = c as f64;
            c / n * (c * n / (ct.rows[x] as f64 * ct.cols[y] as f64)).ln()
        })
        .sum();
    mi.max(0.0)
}

/// Mutual information (natural log) between two labelings.
pub fn mutual_information(pred: &[usize], truth: &[usize]) -> Result<f64> {
    check(pred, truth)?;
    let ct = contingency(pred, truth);
    Ok(mi_from(&ct))
}

fn check(pred: &[usize], truth: &[usize]) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch(format!(
            "labelings have lengths {} and {}",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::InvalidArgument("labelings must be non-empty".into()));
    }
    Ok(())
}

/// Expected mutual information under the hypergeometric model, with every
/// factorial taken in log space.
fn expected_mi(ct: &Contingency) -> f64 {
    let n = ct.n;
    let mut lnfact = vec![0.0; n + 1];
    for k in 1..=n {
        lnfact[k] = lnfact[k - 1] + (k as f64).ln();
    }
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in &ct.rows {
        for &b in &ct.cols {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            let fixed = lnfact[a] + lnfact[b] + lnfact[n - a] + lnfact[n - b] - lnfact[n];
            for nij in lo..=hi {
                let log_p = fixed - lnfact[nij] - lnfact[a - nij] - lnfact[b - nij] - lnfact[n + nij - a - b];
                let x = nij as f64;
                emi += x / nf * (nf * x / (a as f64 * b as f64)).ln() * log_p.exp();
            }
        }
    }
    emi
}

/// Adjusted mutual information with arithmetic-mean normalization.
///
/// Matches the usual library conventions: two single-cluster labelings score
/// 1, and the denominator is kept at least machine epsilon away from zero.
pub fn adjusted_mutual_information(pred: &[usize], truth: &[usize]) -> Result<f64> {
    check(pred, truth)?;
    let ct = contingency(pred, truth);
    let (r, c) = (ct.rows.len(), ct.cols.len());
    // with every row meeting exactly one column the partitions coincide
    // up to renaming; this also covers two single-cluster labelings
    if r == c && ct.cells.len() == r {
        return Ok(1.0);
    }
    let mi = mi_from(&ct);
    let emi = expected_mi(&ct);
    let h_pred = entropy(&ct.rows, ct.n);
    let h_truth = entropy(&ct.cols, ct.n);
    let normalizer = 0.5 * (h_pred + h_truth);
    let mut denom = normalizer - emi;
    denom = if denom < 0.0 {
        denom.min(-f64::EPSILON)
    } else {
        denom.max(f64::EPSILON)
    };
    Ok((mi - emi) / denom)
}
