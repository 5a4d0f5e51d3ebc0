//! Dense brute-force reference formulas.
//!
//! Everything here works on fully materialized rows and visits every one of
//! the `k` dimensions; it shares no arithmetic with the sparse engine or the
//! metric expansions so it can be used to check them.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Default cap on the number of elements [`densify`] will allocate.
pub const DEFAULT_DENSE_CAP: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseMatrix {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }
}

pub fn densify(m: &CsrMatrix) -> Result<DenseMatrix> {
    densify_with_cap(m, DEFAULT_DENSE_CAP)
}

pub fn densify_with_cap(m: &CsrMatrix, cap: usize) -> Result<DenseMatrix> {
    let total = m.n_rows().checked_mul(m.n_cols());
    match total {
        Some(t) if t <= cap => {}
        _ => {
            return Err(Error::SizeOverflow {
                rows: m.n_rows(),
                cols: m.n_cols(),
                cap,
            })
        }
    }
    let mut d = DenseMatrix::zeros(m.n_rows(), m.n_cols());
    for (r, c, v) in m.triplets() {
        d.data[r * m.n_cols() + c] = v;
    }
    Ok(d)
}

/// Converts back to CSR, dropping zeros.
pub fn sparsify(d: &DenseMatrix) -> CsrMatrix {
    let rows: Vec<&[f64]> = (0..d.n_rows).map(|i| d.row(i)).collect();
    CsrMatrix::from_dense_rows(d.n_cols, &rows).expect("dense rows are well formed")
}

fn require_non_negative(name: &str, a: &[f64], b: &[f64]) -> Result<()> {
    if a.iter().chain(b).any(|&v| v < 0.0) {
        return Err(Error::Domain(format!("{name} requires non-negative input")));
    }
    Ok(())
}

/// Distance convention for bounded similarities with an undefined ratio:
/// two empty rows are identical, anything else is maximally distant.
fn undefined_ratio(a: &[f64], b: &[f64]) -> f64 {
    let empty = |v: &[f64]| v.iter().all(|&x| x == 0.0);
    if empty(a) && empty(b) {
        0.0
    } else {
        1.0
    }
}

fn xlogx_over(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (x / y).ln()
    }
}

/// Evaluates the unexpanded formula of `metric` between two dense rows.
pub fn oracle_distance(a: &[f64], b: &[f64], metric: &str, p: Option<f64>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let k = a.len();
    let kf = k as f64;
    let pairs = || a.iter().zip(b).map(|(&x, &y)| (x, y));

    let d = match metric.to_ascii_lowercase().as_str() {
        "correlation" => {
            let ma = a.iter().sum::<f64>() / kf;
            let mb = b.iter().sum::<f64>() / kf;
            let cov: f64 = pairs().map(|(x, y)| (x - ma) * (y - mb)).sum();
            let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
            let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
            let qa: f64 = a.iter().map(|x| x * x).sum();
            let qb: f64 = b.iter().map(|y| y * y).sum();
            if va <= 1e-12 * qa || vb <= 1e-12 * qb {
                undefined_ratio(a, b)
            } else {
                1.0 - cov / (va.sqrt() * vb.sqrt())
            }
        }
        "cosine" => {
            let xy: f64 = pairs().map(|(x, y)| x * y).sum();
            let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb = b.iter().map(|y| y * y).sum::<f64>().sqrt();
            if na == 0.0 || nb == 0.0 {
                undefined_ratio(a, b)
            } else {
                1.0 - xy / (na * nb)
            }
        }
        "dice" => {
            let xy: f64 = pairs().map(|(x, y)| x * y).sum();
            let den: f64 = a.iter().map(|x| x * x).sum::<f64>() + b.iter().map(|y| y * y).sum::<f64>();
            if den == 0.0 {
                0.0
            } else {
                1.0 - 2.0 * xy / den
            }
        }
        "dot" => pairs().map(|(x, y)| x * y).sum(),
        "euclidean" => pairs().map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
        "hellinger" => {
            require_non_negative("hellinger", a, b)?;
            let s: f64 = pairs()
                .map(|(x, y)| {
                    let d = x.sqrt() - y.sqrt();
                    d * d
                })
                .sum();
            s.sqrt() / 2f64.sqrt()
        }
        "jaccard" => {
            let xy: f64 = pairs().map(|(x, y)| x * y).sum();
            let den: f64 =
                a.iter().map(|x| x * x).sum::<f64>() + b.iter().map(|y| y * y).sum::<f64>() - xy;
            if den == 0.0 {
                0.0
            } else {
                1.0 - xy / den
            }
        }
        "kl" => {
            require_non_negative("kl", a, b)?;
            let mut total = 0.0;
            for (x, y) in pairs() {
                if x > 0.0 {
                    if y == 0.0 {
                        return Err(Error::Domain(
                            "kl divergence is infinite where b = 0 and a > 0".into(),
                        ));
                    }
                    total += x * (x / y).ln();
                }
            }
            total
        }
        "russelrao" => {
            if k == 0 {
                0.0
            } else {
                let xy: f64 = pairs().map(|(x, y)| x * y).sum();
                (kf - xy) / kf
            }
        }
        "canberra" => pairs()
            .map(|(x, y)| {
                let den = x.abs() + y.abs();
                if den == 0.0 {
                    0.0
                } else {
                    (x - y).abs() / den
                }
            })
            .sum(),
        "chebyshev" => pairs().map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
        "hamming" => {
            if k == 0 {
                0.0
            } else {
                pairs().filter(|(x, y)| x != y).count() as f64 / kf
            }
        }
        "jensenshannon" => {
            require_non_negative("jensenshannon", a, b)?;
            let s: f64 = pairs()
                .map(|(x, y)| {
                    let mu = (x + y) / 2.0;
                    xlogx_over(x, mu) + xlogx_over(y, mu)
                })
                .sum();
            (s.max(0.0) / 2.0).sqrt()
        }
        "manhattan" => pairs().map(|(x, y)| (x - y).abs()).sum(),
        "minkowski" => {
            let p = p.ok_or(Error::MissingParam {
                metric: "minkowski",
                param: "p",
            })?;
            if p.is_nan() || p < 1.0 || p.is_infinite() {
                return Err(Error::InvalidParam(format!("minkowski p = {p} must be >= 1")));
            }
            pairs()
                .map(|(x, y)| (x - y).abs().powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
        }
        other => return Err(Error::UnknownMetric(other.to_string())),
    };
    Ok(d)
}

/// All-pairs oracle distances as a row-major `a.n_rows x b.n_rows` vector.
pub fn oracle_pairwise(
    a: &DenseMatrix,
    b: &DenseMatrix,
    metric: &str,
    p: Option<f64>,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(a.n_rows * b.n_rows);
    for i in 0..a.n_rows {
        for j in 0..b.n_rows {
            out.push(oracle_distance(a.row(i), b.row(j), metric, p)?);
        }
    }
    Ok(out)
}

/// Dense fold `reduce(..., product(a[c], b[c]))` over every column, starting
/// from `identity`.
pub fn oracle_semiring_dense(
    a: &[f64],
    b: &[f64],
    product: impl Fn(f64, f64) -> f64,
    reduce: impl Fn(f64, f64) -> f64,
    identity: f64,
) -> f64 {
    a.iter()
        .zip(b)
        .fold(identity, |acc, (&x, &y)| reduce(acc, product(x, y)))
}

/// Min-plus product of rows: `min over c of a[c] + b[c]`, where zero
/// entries are absent edges. Absent everywhere gives `+inf`.
pub fn oracle_min_plus(a: &DenseMatrix, b: &DenseMatrix) -> Vec<f64> {
    let mut out = vec![f64::INFINITY; a.n_rows * b.n_rows];
    for i in 0..a.n_rows {
        for j in 0..b.n_rows {
            let mut best = f64::INFINITY;
            for c in 0..a.n_cols {
                let (x, y) = (a.get(i, c), b.get(j, c));
                if x != 0.0 && y != 0.0 && x + y < best {
                    best = x + y;
                }
            }
            out[i * b.n_rows + j] = best;
        }
    }
    out
}
