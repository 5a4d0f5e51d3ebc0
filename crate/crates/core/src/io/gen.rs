//! Seeded synthetic sparse matrices with controllable degree distributions.

use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DegreeDist {
    /// Every row has exactly `d` nonzeros (capped at `n_cols`).
    Uniform(usize),
    /// Degrees drawn from a Zipf law on `1..=max_deg` with exponent `s`.
    Zipf { s: f64, max_deg: usize },
    /// Each column is present independently with probability `p`.
    Density(f64),
}

impl DegreeDist {
    /// Expected row degree, ignoring the `n_cols` cap.
    pub fn expected_degree(&self, n_cols: usize) -> f64 {
        match *self {
            DegreeDist::Uniform(d) => d.min(n_cols) as f64,
            DegreeDist::Zipf { s, max_deg } => {
                let (mut num, mut den) = (0.0, 0.0);
                for k in 1..=max_deg {
                    let w = (k as f64).powf(-s);
                    num += k.min(n_cols) as f64 * w;
                    den += w;
                }
                num / den
            }
            DegreeDist::Density(p) => p * n_cols as f64,
        }
    }
}

impl FromStr for DegreeDist {
    type Err = Error;

    /// `uniform:D`, `zipf:S:MAX_DEG` or `density:P`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidSpec(format!("cannot parse degree distribution `{s}`"));
        match parts.as_slice() {
            ["uniform", d] => Ok(DegreeDist::Uniform(d.parse().map_err(|_| bad())?)),
            ["zipf", e, m] => Ok(DegreeDist::Zipf {
                s: e.parse().map_err(|_| bad())?,
                max_deg: m.parse().map_err(|_| bad())?,
            }),
            ["density", p] => Ok(DegreeDist::Density(p.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValueDist {
    /// Uniform on `(0, 1]`.
    #[default]
    Uniform01,
    /// Positive log-scaled term weights times an inverse-frequency factor,
    /// rows scaled to unit L2 norm.
    TfIdf,
    /// All ones.
    Binary,
}

impl FromStr for ValueDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" | "uniform01" => Ok(ValueDist::Uniform01),
            "tfidf" | "tf-idf" => Ok(ValueDist::TfIdf),
            "binary" => Ok(ValueDist::Binary),
            other => Err(Error::InvalidSpec(format!("unknown value distribution `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n_rows: usize,
    pub n_cols: usize,
    pub degrees: DegreeDist,
    pub values: ValueDist,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        match self.degrees {
            DegreeDist::Zipf { s, max_deg } => {
                if s.is_nan() || s <= 0.0 || s.is_infinite() {
                    return Err(Error::InvalidSpec(format!("zipf exponent {s} must be > 0")));
                }
                if max_deg == 0 {
                    return Err(Error::InvalidSpec("zipf max degree must be >= 1".into()));
                }
            }
            DegreeDist::Density(p) => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidSpec(format!("density {p} must lie in [0, 1]")));
                }
            }
            DegreeDist::Uniform(_) => {}
        }
        if self.n_cols == 0 && self.expected_nonzero() {
            return Err(Error::InvalidSpec("rows need at least one column".into()));
        }
        Ok(())
    }

    fn expected_nonzero(&self) -> bool {
        !matches!(self.degrees, DegreeDist::Uniform(0) | DegreeDist::Density(0.0))
    }
}

/// Builds a canonical matrix from `spec`; identical seeds give identical
/// matrices.
pub fn generate(spec: &GenSpec) -> Result<CsrMatrix> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_cols = spec.n_cols;

    let zipf = match spec.degrees {
        DegreeDist::Zipf { s, max_deg } => Some(
            Zipf::new(max_deg as f64, s).map_err(|e| Error::InvalidSpec(e.to_string()))?,
        ),
        _ => None,
    };
    let binomial = match spec.degrees {
        DegreeDist::Density(p) if n_cols > 0 => {
            Some(Binomial::new(n_cols as u64, p).map_err(|e| Error::InvalidSpec(e.to_string()))?)
        }
        _ => None,
    };

    let mut indptr = Vec::with_capacity(spec.n_rows + 1);
    let mut indices = Vec::new();
    let mut values = Vec::new();
    indptr.push(0);

    for _ in 0..spec.n_rows {
        let degree = match spec.degrees {
            DegreeDist::Uniform(d) => d,
            DegreeDist::Zipf { .. } => zipf.as_ref().map(|z| z.sample(&mut rng) as usize).unwrap_or(0),
            DegreeDist::Density(_) => binomial.as_ref().map(|b| b.sample(&mut rng) as usize).unwrap_or(0),
        }
        .min(n_cols);

        let mut cols = sample(&mut rng, n_cols, degree).into_vec();
        cols.sort_unstable();

        let start = values.len();
        for &c in &cols {
            let v = match spec.values {
                ValueDist::Uniform01 => 1.0 - rng.random::<f64>(),
                ValueDist::Binary => 1.0,
                ValueDist::TfIdf => {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    let tf = 1.0 + (-u.ln() / 0.5f64.ln().abs()).floor();
                    let idf = 1.0 + (n_cols as f64 / (1.0 + c as f64)).ln();
                    (1.0 + tf.ln()) * idf
                }
            };
            values.push(v);
        }
        if spec.values == ValueDist::TfIdf && !cols.is_empty() {
            let norm = values[start..].iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in &mut values[start..] {
                *v /= norm;
            }
        }
        indices.extend(cols);
        indptr.push(indices.len());
    }

    Ok(CsrMatrix::from_canonical_parts(
        spec.n_rows,
        n_cols,
        indptr,
        indices,
        values,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::degree_stats;

    fn spec(n_rows: usize, n_cols: usize, degrees: DegreeDist, seed: u64) -> GenSpec {
        GenSpec {
            n_rows,
            n_cols,
            degrees,
            values: ValueDist::Uniform01,
            seed,
        }
    }

    #[test]
    fn uniform_zero_is_empty() {
        let m = generate(&spec(50, 20, DegreeDist::Uniform(0), 1)).unwrap();
        assert_eq!(m.nnz(), 0);
        assert_eq!(m.n_rows(), 50);
    }

    #[test]
    fn zipf_is_deterministic() {
        let s = spec(1000, 2000, DegreeDist::Zipf { s: 1.1, max_deg: 500 }, 7);
        assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
        let other = GenSpec { seed: 8, ..s.clone() };
        assert_ne!(generate(&s).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn uniform_degree_nnz() {
        let m = generate(&spec(10_000, 10_000, DegreeDist::Uniform(50), 3)).unwrap();
        // Recount from the raw rows rather than trusting nnz().
        let recount: usize = (0..m.n_rows()).map(|r| m.row(r).0.len()).sum();
        assert_eq!(recount, 500_000);
        assert_eq!(m.nnz(), recount);
        let s = degree_stats(&m);
        assert_eq!((s.min, s.max), (50, 50));
    }

    #[test]
    fn parses_degree_specs() {
        assert_eq!("uniform:5".parse::<DegreeDist>().unwrap(), DegreeDist::Uniform(5));
        assert_eq!(
            "zipf:1.1:500".parse::<DegreeDist>().unwrap(),
            DegreeDist::Zipf { s: 1.1, max_deg: 500 }
        );
        assert_eq!("density:0.25".parse::<DegreeDist>().unwrap(), DegreeDist::Density(0.25));
        assert!("zipf:1.1".parse::<DegreeDist>().is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&spec(5, 5, DegreeDist::Zipf { s: 0.0, max_deg: 5 }, 1)).is_err());
        assert!(generate(&spec(5, 5, DegreeDist::Density(1.5), 1)).is_err());
        assert!(generate(&spec(5, 0, DegreeDist::Uniform(3), 1)).is_err());
    }

    #[test]
    fn tfidf_rows_are_unit_norm_and_positive() {
        let s = GenSpec {
            values: ValueDist::TfIdf,
            ..spec(200, 300, DegreeDist::Uniform(10), 5)
        };
        let m = generate(&s).unwrap();
        assert!(m.values().iter().all(|&v| v > 0.0));
        for r in 0..m.n_rows() {
            let n: f64 = m.row(r).1.iter().map(|v| v * v).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }
}
