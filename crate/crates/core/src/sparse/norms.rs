use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    /// Number of stored nonzeros.
    L0,
    /// Sum of absolute values.
    L1,
    L2,
    L2Squared,
    /// Signed sum of values (needed by the correlation expansion).
    Sum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormVector {
    pub kind: NormKind,
    pub values: Vec<f64>,
}

impl NormVector {
    #[inline]
    pub fn get(&self, row: usize) -> f64 {
        self.values[row]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Row-wise reduction of `m` into one norm per row. Empty rows give 0.
pub fn row_norms(m: &CsrMatrix, kind: NormKind) -> NormVector {
    let values = (0..m.n_rows())
        .into_par_iter()
        .map(|r| {
            let (_, vals) = m.row(r);
            match kind {
                NormKind::L0 => vals.len() as f64,
                NormKind::L1 => vals.iter().map(|v| v.abs()).sum(),
                NormKind::L2 => vals.iter().map(|v| v * v).sum::<f64>().sqrt(),
                NormKind::L2Squared => vals.iter().map(|v| v * v).sum(),
                NormKind::Sum => vals.iter().sum(),
            }
        })
        .collect();
    NormVector { kind, values }
}
