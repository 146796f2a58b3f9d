use std::path::Path;

use super::ising::{sigmoid, softplus, spin};
use crate::discrete::{log_sum_exp, DiscreteTarget};
use crate::error::{Error, Result};

/// `ln sigmoid(z)`.
fn log_sigmoid(z: f64) -> f64 {
    -softplus(-z)
}

/// How a categorical label column becomes `{-1, +1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Binarization {
    /// The first label seen in file order is -1, every other label +1.
    #[default]
    FirstClassVsRest,
    /// The named label is -1, every other label +1.
    ClassVsRest(String),
}

impl std::str::FromStr for Binarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "class0-vs-rest" | "first-vs-rest" => Ok(Self::FirstClassVsRest),
            _ => match s.strip_prefix("class:") {
                Some(label) if !label.is_empty() => Ok(Self::ClassVsRest(label.to_string())),
                _ => Err(Error::Config(format!(
                    "unknown binarization {s:?}; expected class0-vs-rest or class:<label>"
                ))),
            },
        }
    }
}

/// Posterior of logistic regression with weights in `{-1, +1}^n` under a
/// uniform prior: `ln p(theta) = sum_m ln sigmoid(y_m theta . x_m)`.
#[derive(Clone, Debug)]
pub struct LogRegTarget {
    examples: usize,
    params: usize,
    /// Row-major `examples x params`.
    x: Vec<f64>,
    y: Vec<f64>,
    dims: Vec<usize>,
}

impl LogRegTarget {
    pub fn new(x: Vec<f64>, y: Vec<f64>, params: usize) -> Result<Self> {
        if params == 0 {
            return Err(Error::Argument("need at least one parameter".into()));
        }
        if x.len() != y.len() * params {
            return Err(Error::Argument(format!(
                "design matrix has {} entries, expected {} x {params}",
                x.len(),
                y.len()
            )));
        }
        if let Some(v) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
            return Err(Error::Argument(format!("labels must be +-1, got {v}")));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("design matrix has non-finite entries".into()));
        }
        Ok(Self {
            examples: y.len(),
            params,
            x,
            y,
            dims: vec![2; params],
        })
    }

    /// Standardizes every feature column (population variance; constant
    /// columns become zero), then appends a bias column of ones.
    pub fn from_features(rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::Argument("ragged feature rows".into()));
        }
        let m = rows.len() as f64;
        let mut x = Vec::with_capacity(rows.len() * (k + 1));
        let stats: Vec<(f64, f64)> = (0..k)
            .map(|j| {
                let mean = rows.iter().map(|r| r[j]).sum::<f64>() / m;
                let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / m;
                (mean, var.sqrt())
            })
            .collect();
        for r in rows {
            for (v, &(mean, sd)) in r.iter().zip(&stats) {
                x.push(if sd > 0.0 { (v - mean) / sd } else { 0.0 });
            }
            x.push(1.0);
        }
        Self::new(x, y, k + 1)
    }

    pub fn examples(&self) -> usize {
        self.examples
    }

    pub fn params(&self) -> usize {
        self.params
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.x[m * self.params..(m + 1) * self.params]
    }

    pub fn labels(&self) -> &[f64] {
        &self.y
    }

    /// `y_m theta . x_m` for every example.
    fn margins(&self, state: &[usize]) -> Vec<f64> {
        (0..self.examples)
            .map(|m| {
                let dot: f64 = self.row(m).iter().zip(state).map(|(x, &s)| x * spin(s)).sum();
                self.y[m] * dot
            })
            .collect()
    }

    /// Log-likelihood with axis `axis` flipped, from cached margins.
    fn flipped_log_lik(&self, margins: &[f64], axis: usize, state: &[usize]) -> f64 {
        let t = spin(state[axis]);
        margins
            .iter()
            .enumerate()
            .map(|(m, z)| log_sigmoid(z - 2.0 * self.y[m] * t * self.x[m * self.params + axis]))
            .sum()
    }

    /// `p(theta_i = -1, rest) + p(theta_i = +1, rest)`.
    pub fn axis_sum(&self, axis: usize, state: &[usize]) -> f64 {
        self.log_axis_sum(axis, state).exp()
    }

    /// Fraction of examples whose predicted label under the sign of
    /// `weights . x` matches.
    pub fn accuracy(&self, weights: &[f64]) -> f64 {
        let hits = (0..self.examples)
            .filter(|&m| {
                let dot: f64 = self.row(m).iter().zip(weights).map(|(x, w)| x * w).sum();
                dot * self.y[m] > 0.0
            })
            .count();
        hits as f64 / self.examples as f64
    }
}

impl DiscreteTarget for LogRegTarget {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn log_mass(&self, state: &[usize]) -> f64 {
        self.margins(state).into_iter().map(log_sigmoid).sum()
    }

    fn log_axis_sum(&self, axis: usize, state: &[usize]) -> f64 {
        let margins = self.margins(state);
        let ll: f64 = margins.iter().copied().map(log_sigmoid).sum();
        log_sum_exp([ll, self.flipped_log_lik(&margins, axis, state)])
    }

    fn conditional(&self, axis: usize, state: &[usize]) -> f64 {
        let margins = self.margins(state);
        let ll: f64 = margins.iter().copied().map(log_sigmoid).sum();
        sigmoid(ll - self.flipped_log_lik(&margins, axis, state))
    }

    fn conditionals_into(&self, state: &[usize], out: &mut [f64]) {
        let margins = self.margins(state);
        let ll: f64 = margins.iter().copied().map(log_sigmoid).sum();
        for (j, o) in out.iter_mut().enumerate() {
            *o = sigmoid(ll - self.flipped_log_lik(&margins, j, state));
        }
    }

    fn axis_value(&self, _axis: usize, index: usize) -> f64 {
        spin(index)
    }
}

/// Reads a comma-separated file with a header row. Every column except
/// `label_column` must be numeric.
pub fn load_csv_dataset(path: impl AsRef<Path>, label_column: &str, rule: &Binarization) -> Result<LogRegTarget> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path.as_ref())
        .map_err(|e| Error::Ingestion {
            row: 0,
            message: e.to_string(),
        })?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Ingestion {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::Ingestion {
            row: 1,
            message: format!("no column named {label_column:?}"),
        })?;

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut first_label: Option<String> = None;
    for (k, record) in reader.records().enumerate() {
        // header is line 1
        let line = k + 2;
        let record = record.map_err(|e| Error::Ingestion {
            row: line,
            message: e.to_string(),
        })?;
        let mut features = Vec::with_capacity(headers.len() - 1);
        for (j, field) in record.iter().enumerate() {
            if j == label_idx {
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::Ingestion {
                row: line,
                message: format!("column {:?} is not numeric: {field:?}", &headers[j]),
            })?;
            features.push(v);
        }
        let label = record[label_idx].to_string();
        let negative = match rule {
            Binarization::FirstClassVsRest => first_label.get_or_insert_with(|| label.clone()) == &label,
            Binarization::ClassVsRest(c) => c == &label,
        };
        labels.push(if negative { -1.0 } else { 1.0 });
        rows.push(features);
    }
    if rows.is_empty() {
        return Err(Error::Ingestion {
            row: 2,
            message: "dataset has no rows".into(),
        });
    }
    LogRegTarget::from_features(&rows, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::unflatten;

    fn data_path(name: &str) -> std::path::PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
    }

    fn iris() -> LogRegTarget {
        load_csv_dataset(data_path("iris.csv"), "species", &Binarization::default()).unwrap()
    }

    /// Likelihood straight from the definition, no caching.
    fn brute_log_lik(t: &LogRegTarget, theta: &[f64]) -> f64 {
        (0..t.examples())
            .map(|m| {
                let z: f64 = t.row(m).iter().zip(theta).map(|(x, w)| x * w).sum();
                (1.0 / (1.0 + (-t.labels()[m] * z).exp())).ln()
            })
            .sum()
    }

    #[test]
    fn zero_design_is_flat() {
        let t = LogRegTarget::new(vec![0.0; 6], vec![1.0, -1.0, 1.0], 2).unwrap();
        for s in [[0, 0], [1, 0], [1, 1]] {
            for j in 0..2 {
                let ratio = (t.log_axis_sum(j, &s) - t.log_mass(&s)).exp();
                assert!((ratio - 2.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn single_example() {
        let t = LogRegTarget::new(vec![1.0], vec![1.0], 1).unwrap();
        let up = 1.0 / (1.0 + (-1f64).exp());
        let down = 1.0 / (1.0 + 1f64.exp());
        assert!((t.axis_sum(0, &[1]) - (up + down)).abs() < 1e-15);
        assert!((t.conditional(0, &[1]) - up / (up + down)).abs() < 1e-15);
        assert!((t.conditional(0, &[0]) - down / (up + down)).abs() < 1e-15);
    }

    #[test]
    fn toy_csv_standardizes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.csv");
        std::fs::write(&path, "f,label\n0,A\n2,B\n").unwrap();
        let t = load_csv_dataset(&path, "label", &Binarization::default()).unwrap();
        assert_eq!(t.params(), 2);
        assert_eq!(t.row(0), &[-1.0, 1.0]);
        assert_eq!(t.row(1), &[1.0, 1.0]);
        assert_eq!(t.labels(), &[-1.0, 1.0]);
        let named = load_csv_dataset(&path, "label", &"class:B".parse().unwrap()).unwrap();
        assert_eq!(named.labels(), &[1.0, -1.0]);
    }

    #[test]
    fn ingestion_errors_carry_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "f,label\n0,A\nx,B\n").unwrap();
        assert!(matches!(
            load_csv_dataset(&path, "label", &Binarization::default()),
            Err(Error::Ingestion { row: 3, .. })
        ));
        assert!(matches!(
            load_csv_dataset(&path, "class", &Binarization::default()),
            Err(Error::Ingestion { row: 1, .. })
        ));
        assert!(load_csv_dataset(dir.path().join("none.csv"), "label", &Binarization::default()).is_err());
        assert!("nonsense".parse::<Binarization>().is_err());
    }

    #[test]
    fn dataset_shapes() {
        let t = iris();
        assert_eq!((t.examples(), t.params()), (150, 5));
        assert_eq!(t.labels().iter().filter(|&&y| y < 0.0).count(), 50);
        let w = load_csv_dataset(data_path("wine.csv"), "class", &Binarization::default()).unwrap();
        assert_eq!((w.examples(), w.params()), (178, 14));
        assert_eq!(w.labels().iter().filter(|&&y| y < 0.0).count(), 59);
    }

    #[test]
    fn iris_axis_sums_match_direct_evaluation() {
        let t = iris();
        let ones = vec![1; 5];
        let theta = vec![1.0; 5];
        let ll = brute_log_lik(&t, &theta);
        assert!((t.log_mass(&ones) - ll).abs() < 1e-12 * ll.abs().max(1.0));
        let mut cond = vec![0.0; 5];
        t.conditionals_into(&ones, &mut cond);
        for i in 0..5 {
            let mut flipped = theta.clone();
            flipped[i] = -1.0;
            let lf = brute_log_lik(&t, &flipped);
            let brute = ll.exp() + lf.exp();
            let fast = t.axis_sum(i, &ones);
            assert!(((fast - brute) / brute).abs() < 1e-12, "axis {i}: {fast} vs {brute}");
            let q = ll.exp() / brute;
            assert!((cond[i] - q).abs() < 1e-12);
            assert!((t.conditional(i, &ones) - q).abs() < 1e-12);
        }
    }

    #[test]
    fn every_iris_state_axis_sum_matches_brute_force() {
        let t = iris();
        let mut s = vec![0; 5];
        for k in 0..32 {
            unflatten(t.dims(), k, &mut s);
            for j in 0..5 {
                let default = crate::discrete::log_sum_exp([0, 1].map(|v| {
                    let mut p = s.clone();
                    p[j] = v;
                    t.log_mass(&p)
                }));
                let fast = t.log_axis_sum(j, &s);
                assert!((fast - default).abs() < 1e-10 * fast.abs().max(1.0));
            }
        }
    }

    #[test]
    fn joint_sign_flip_symmetry() {
        let t = iris();
        let flipped_y: Vec<f64> = t.labels().iter().map(|y| -y).collect();
        let mirror = LogRegTarget::new(t.x.clone(), flipped_y, t.params()).unwrap();
        let mut s = vec![0; 5];
        for k in 0..32 {
            unflatten(t.dims(), k, &mut s);
            let neg: Vec<usize> = s.iter().map(|&v| 1 - v).collect();
            assert!((t.log_mass(&s) - mirror.log_mass(&neg)).abs() < 1e-10);
        }
    }
}
