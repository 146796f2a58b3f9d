use crate::discrete::{state_count, EventTrace};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coverage {
    /// Fraction of cells holding more than `tolerance` of the total dwell.
    pub fraction: f64,
    /// Smallest lag `L <= len / 2` with `cells[k + L] == cells[k]` for all `k`.
    pub period: Option<usize>,
}

/// Smallest exact repetition lag of `seq`, if it repeats at least twice.
pub fn sequence_period(seq: &[usize]) -> Option<usize> {
    (1..=seq.len() / 2).find(|&lag| seq[lag..].iter().zip(seq).all(|(a, b)| a == b))
}

/// Coverage of a weighted cell sequence over `n_cells` cells.
pub fn cell_coverage(cells: &[usize], weights: &[f64], n_cells: usize, tolerance: f64) -> Result<Coverage> {
    if cells.is_empty() || cells.len() != weights.len() {
        return Err(Error::Argument("need one weight per visited cell".into()));
    }
    let mut mass = vec![0.0; n_cells];
    for (&c, &w) in cells.iter().zip(weights) {
        mass[c] += w;
    }
    let total: f64 = mass.iter().sum();
    let visited = if total > 0.0 {
        mass.iter().filter(|&&m| m / total > tolerance).count()
    } else {
        0
    };
    Ok(Coverage {
        fraction: visited as f64 / n_cells as f64,
        period: sequence_period(cells),
    })
}

/// Coverage and periodicity of an event trace; cells are weighted by dwell.
pub fn coverage_and_period(trace: &EventTrace, tolerance: f64) -> Result<Coverage> {
    let n = state_count(trace.dims(), 1 << 28)?;
    let dwells: Vec<f64> = trace.events().iter().map(|e| e.dwell).collect();
    cell_coverage(&trace.cell_sequence(), &dwells, n, tolerance)
}

/// Coverage of a continuous trajectory in `[0,1)^d` on a grid with
/// `resolution` cells per axis; every point weighs the same.
pub fn trajectory_coverage(points: &[Vec<f64>], resolution: usize, tolerance: f64) -> Result<Coverage> {
    let d = points.first().map_or(0, Vec::len);
    if d == 0 || resolution == 0 {
        return Err(Error::Argument("need points and a positive resolution".into()));
    }
    let n = state_count(&vec![resolution; d], 1 << 28)?;
    let cells: Vec<usize> = points
        .iter()
        .map(|p| {
            p.iter().fold(0, |acc, &x| {
                let k = ((x.rem_euclid(1.0)) * resolution as f64) as usize;
                acc * resolution + k.min(resolution - 1)
            })
        })
        .collect();
    cell_coverage(&cells, &vec![1.0; cells.len()], n, tolerance)
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and
/// `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Argument("no samples".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    }))
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
