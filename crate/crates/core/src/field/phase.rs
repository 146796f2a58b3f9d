use crate::error::{Error, Result};

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Squared distance from `p` to the segment `[a, b]`.
fn segment_dist2(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut ab2 = 0.0;
    let mut ap_ab = 0.0;
    for i in 0..p.len() {
        let ab = b[i] - a[i];
        ab2 += ab * ab;
        ap_ab += (p[i] - a[i]) * ab;
    }
    if ab2 == 0.0 {
        return dist2(p, a);
    }
    let t = ap_ab / ab2;
    if t <= 0.0 {
        return dist2(p, a);
    }
    if t >= 1.0 {
        return dist2(p, b);
    }
    p.iter()
        .zip(a.iter().zip(b))
        .map(|(&pi, (&ai, &bi))| {
            let d = pi - (ai + t * (bi - ai));
            d * d
        })
        .sum()
}

/// Euclidean distance from `p` to the polyline through `line`.
pub fn point_polyline_distance(p: &[f64], line: &[Vec<f64>]) -> f64 {
    if line.len() == 1 {
        return dist2(p, &line[0]).sqrt();
    }
    line.windows(2)
        .map(|w| segment_dist2(p, &w[0], &w[1]))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Symmetric Hausdorff distance between the points of each trajectory and the
/// polyline through the other. Time is ignored, so two parametrizations of the
/// same curve are at distance ~0.
pub fn phase_curve_distance(traj_a: &[Vec<f64>], traj_b: &[Vec<f64>]) -> Result<f64> {
    if traj_a.is_empty() || traj_b.is_empty() {
        return Err(Error::Argument("trajectories must be non-empty".into()));
    }
    let one_way =
        |from: &[Vec<f64>], to: &[Vec<f64>]| from.iter().map(|p| point_polyline_distance(p, to)).fold(0.0, f64::max);
    Ok(one_way(traj_a, traj_b).max(one_way(traj_b, traj_a)))
}

/// Total length of the polyline through `traj`.
pub fn arc_length(traj: &[Vec<f64>]) -> f64 {
    traj.windows(2).map(|w| dist2(&w[0], &w[1]).sqrt()).sum()
}

/// Prefix of `traj` with arc length `length`, ending at an interpolated point
/// on the segment where that length is reached. The whole trajectory when it
/// is shorter.
pub fn truncate_arc_length(traj: &[Vec<f64>], length: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut walked = 0.0;
    for (k, p) in traj.iter().enumerate() {
        if k == 0 {
            out.push(p.clone());
            continue;
        }
        let prev = &traj[k - 1];
        let seg = dist2(prev, p).sqrt();
        if walked + seg >= length {
            let t = if seg > 0.0 { (length - walked) / seg } else { 0.0 };
            out.push(prev.iter().zip(p).map(|(a, b)| a + t * (b - a)).collect());
            return out;
        }
        walked += seg;
        out.push(p.clone());
    }
    out
}
