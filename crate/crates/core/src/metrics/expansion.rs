use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MetricSpec;
use crate::error::{Error, Result};
use crate::output::DistanceOutput;
use crate::sparse::{NormKind, NormVector};

/// Radicands down to `-RADICAND_TOL * scale` are treated as rounding error
/// and clamped to zero; anything lower is a domain error.
pub const RADICAND_TOL: f64 = 1e-9;

/// Element-wise combination of a dot product with row norms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expansion {
    /// `1 - (k<x,y> - s(x)s(y)) / sqrt((k q(x) - s(x)^2)(k q(y) - s(y)^2))`
    Correlation,
    /// `1 - <x,y> / (|x|_2 |y|_2)`
    Cosine,
    /// `1 - 2<x,y> / (|x|_0 + |y|_0)`
    Dice,
    /// `1 - <x,y> / (|x|_0 + |y|_0 - <x,y>)`
    Jaccard,
    /// `sqrt(|x|_2^2 - 2<x,y> + |y|_2^2)`
    Euclidean,
    /// `sqrt((|x|_1 + |y|_1 - 2<sqrt x, sqrt y>) / 2)`
    Hellinger,
    /// `(k - <x,y>) / k`
    RusselRao,
}

impl Expansion {
    /// Norm kinds this expansion reads, in the order `apply` expects them.
    pub fn norms(self) -> &'static [NormKind] {
        match self {
            Expansion::Correlation => &[NormKind::Sum, NormKind::L2Squared],
            Expansion::Cosine => &[NormKind::L2],
            Expansion::Dice | Expansion::Jaccard => &[NormKind::L0],
            Expansion::Euclidean => &[NormKind::L2Squared],
            Expansion::Hellinger => &[NormKind::L1],
            Expansion::RusselRao => &[],
        }
    }

    /// Distance for one cell. `na`/`nb` hold the norms listed by
    /// [`Expansion::norms`] for the two rows.
    #[inline]
    pub fn apply(self, dot: f64, na: &[f64], nb: &[f64], k: usize) -> Result<f64> {
        let kf = k as f64;
        Ok(match self {
            Expansion::Correlation => {
                let (sa, qa) = (na[0], na[1]);
                let (sb, qb) = (nb[0], nb[1]);
                let va = kf * qa - sa * sa;
                let vb = kf * qb - sb * sb;
                if va <= 1e-12 * kf * qa || vb <= 1e-12 * kf * qb {
                    undefined_ratio(qa == 0.0 && qb == 0.0)
                } else {
                    1.0 - (kf * dot - sa * sb) / (va.sqrt() * vb.sqrt())
                }
            }
            Expansion::Cosine => {
                let den = na[0] * nb[0];
                if den == 0.0 {
                    undefined_ratio(na[0] == 0.0 && nb[0] == 0.0)
                } else {
                    1.0 - dot / den
                }
            }
            Expansion::Dice => {
                let den = na[0] + nb[0];
                if den == 0.0 {
                    0.0
                } else {
                    1.0 - 2.0 * dot / den
                }
            }
            Expansion::Jaccard => {
                let den = na[0] + nb[0] - dot;
                if den == 0.0 {
                    0.0
                } else {
                    1.0 - dot / den
                }
            }
            Expansion::Euclidean => {
                let r = na[0] - 2.0 * dot + nb[0];
                clamped_sqrt(r, na[0] + nb[0], "euclidean")?
            }
            Expansion::Hellinger => {
                let r = na[0] + nb[0] - 2.0 * dot;
                clamped_sqrt(r, na[0] + nb[0], "hellinger")? / 2f64.sqrt()
            }
            Expansion::RusselRao => {
                if k == 0 {
                    0.0
                } else {
                    (kf - dot) / kf
                }
            }
        })
    }
}

#[inline]
fn undefined_ratio(both_empty: bool) -> f64 {
    if both_empty {
        0.0
    } else {
        1.0
    }
}

#[inline]
pub(crate) fn clamped_sqrt(r: f64, scale: f64, what: &str) -> Result<f64> {
    if r >= 0.0 {
        return Ok(r.sqrt());
    }
    if r >= -RADICAND_TOL * scale.abs().max(1.0) {
        return Ok(0.0);
    }
    Err(Error::Domain(format!(
        "{what}: negative radicand {r:e} beyond rounding tolerance"
    )))
}

fn find_norm(norms: &[NormVector], kind: NormKind) -> Result<&NormVector> {
    norms
        .iter()
        .find(|n| n.kind == kind)
        .ok_or_else(|| Error::InvalidParam(format!("expansion needs {kind:?} norms")))
}

/// Applies the spec's expansion to every cell of `dots`.
///
/// Pure element-wise transform; `norms_a`/`norms_b` must contain at least
/// the kinds listed by [`Expansion::norms`], with lengths matching the
/// output shape. Specs without an expansion pass `dots` through unchanged.
pub fn expansion_apply(
    dots: &DistanceOutput,
    norms_a: &[NormVector],
    norms_b: &[NormVector],
    spec: &MetricSpec,
    n_cols: usize,
) -> Result<DistanceOutput> {
    let Some(exp) = spec.expansion else {
        return Ok(dots.clone());
    };
    let kinds = exp.norms();
    let na: Vec<&NormVector> = kinds
        .iter()
        .map(|&k| find_norm(norms_a, k))
        .collect::<Result<_>>()?;
    let nb: Vec<&NormVector> = kinds
        .iter()
        .map(|&k| find_norm(norms_b, k))
        .collect::<Result<_>>()?;
    let (m, n) = (dots.rows(), dots.cols());
    if na.iter().any(|v| v.len() != m) || nb.iter().any(|v| v.len() != n) {
        return Err(Error::LengthMismatch(format!(
            "norm vectors do not match a {m}x{n} output"
        )));
    }

    let mut out = DistanceOutput::filled(m, n, 0.0);
    if n == 0 {
        return Ok(out);
    }
    out.as_mut_slice()
        .par_chunks_mut(n)
        .enumerate()
        .try_for_each(|(i, row)| -> Result<()> {
            let mut a_vals = [0.0; 2];
            let mut b_vals = [0.0; 2];
            for (slot, v) in na.iter().enumerate() {
                a_vals[slot] = v.get(i);
            }
            for (j, cell) in row.iter_mut().enumerate() {
                for (slot, v) in nb.iter().enumerate() {
                    b_vals[slot] = v.get(j);
                }
                *cell = exp.apply(
                    dots.get(i, j),
                    &a_vals[..kinds.len()],
                    &b_vals[..kinds.len()],
                    n_cols,
                )?;
            }
            Ok(())
        })?;
    Ok(out)
}
