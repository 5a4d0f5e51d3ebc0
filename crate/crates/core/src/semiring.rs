//! Semirings over `f64`: a product monoid applied per column and a reduce
//! monoid that folds the products of one row pair into a single value.

use std::fmt;
use std::sync::Arc;

pub type BinaryFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// The per-column product `⊗(a, b)`.
#[derive(Clone)]
pub enum ProductOp {
    /// `a * b`
    Mul,
    /// `a + b` (tropical semirings)
    Add,
    /// `|a - b|`
    AbsDiff,
    /// `|a - b|^p`
    AbsDiffPow(f64),
    /// `|a - b| / (|a| + |b|)`, with `0/0 = 0`
    Canberra,
    /// `1` when `a != b`, else `0`
    NotEqual,
    /// `a ln(a/m) + b ln(b/m)` with `m = (a + b) / 2` and `0 ln 0 = 0`
    JensenShannon,
    /// `a ln(a/b)`, defined as 0 whenever either side is zero
    KlTerm,
    /// `sqrt(a) * sqrt(b)`
    SqrtMul,
    /// `1` when both sides are nonzero, else `0`
    BothNonzero,
    Custom(BinaryFn),
}

/// The associative, commutative reduction `⊕`.
#[derive(Clone)]
pub enum ReduceOp {
    Sum,
    Max,
    Min,
    Custom(BinaryFn),
}

impl ProductOp {
    #[inline]
    pub fn apply(&self, a: f64, b: f64) -> f64 {
        match self {
            ProductOp::Mul => a * b,
            ProductOp::Add => a + b,
            ProductOp::AbsDiff => abs_diff(a, b),
            ProductOp::AbsDiffPow(p) => abs_diff(a, b).powf(*p),
            ProductOp::Canberra => canberra(a, b),
            ProductOp::NotEqual => not_equal(a, b),
            ProductOp::JensenShannon => jensen_shannon(a, b),
            ProductOp::KlTerm => kl_term(a, b),
            ProductOp::SqrtMul => a.sqrt() * b.sqrt(),
            ProductOp::BothNonzero => both_nonzero(a, b),
            ProductOp::Custom(f) => f(a, b),
        }
    }
}

impl ReduceOp {
    #[inline]
    pub fn apply(&self, acc: f64, v: f64) -> f64 {
        match self {
            ReduceOp::Sum => acc + v,
            ReduceOp::Max => acc.max(v),
            ReduceOp::Min => acc.min(v),
            ReduceOp::Custom(f) => f(acc, v),
        }
    }
}

#[inline]
pub(crate) fn abs_diff(a: f64, b: f64) -> f64 {
    (a - b).abs()
}

#[inline]
pub(crate) fn canberra(a: f64, b: f64) -> f64 {
    let den = a.abs() + b.abs();
    if den == 0.0 {
        0.0
    } else {
        (a - b).abs() / den
    }
}

#[inline]
pub(crate) fn not_equal(a: f64, b: f64) -> f64 {
    if a != b {
        1.0
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn jensen_shannon(a: f64, b: f64) -> f64 {
    let mu = 0.5 * (a + b);
    let ta = if a > 0.0 { a * (a / mu).ln() } else { 0.0 };
    let tb = if b > 0.0 { b * (b / mu).ln() } else { 0.0 };
    ta + tb
}

#[inline]
pub(crate) fn kl_term(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * (a / b).ln()
    }
}

#[inline]
pub(crate) fn both_nonzero(a: f64, b: f64) -> f64 {
    if a != 0.0 && b != 0.0 {
        1.0
    } else {
        0.0
    }
}

impl fmt::Debug for ProductOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductOp::Mul => f.write_str("Mul"),
            ProductOp::Add => f.write_str("Add"),
            ProductOp::AbsDiff => f.write_str("AbsDiff"),
            ProductOp::AbsDiffPow(p) => write!(f, "AbsDiffPow({p})"),
            ProductOp::Canberra => f.write_str("Canberra"),
            ProductOp::NotEqual => f.write_str("NotEqual"),
            ProductOp::JensenShannon => f.write_str("JensenShannon"),
            ProductOp::KlTerm => f.write_str("KlTerm"),
            ProductOp::SqrtMul => f.write_str("SqrtMul"),
            ProductOp::BothNonzero => f.write_str("BothNonzero"),
            ProductOp::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl fmt::Debug for ReduceOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReduceOp::Sum => f.write_str("Sum"),
            ReduceOp::Max => f.write_str("Max"),
            ReduceOp::Min => f.write_str("Min"),
            ReduceOp::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A semiring `({⊕, id⊕}, {⊗, id⊗})` plus the annihilation flag that
/// decides how many passes the engine needs.
///
/// When `annihilating` is set, columns stored in only one of the two rows
/// contribute nothing, so only the intersection of nonzero columns is
/// visited. Otherwise the product is a non-annihilating monoid with
/// identity 0 and must be applied over the full union of nonzero columns.
#[derive(Clone, Debug)]
pub struct Semiring {
    pub product: ProductOp,
    pub product_identity: f64,
    pub reduce: ReduceOp,
    pub reduce_identity: f64,
    pub annihilating: bool,
}

impl Semiring {
    /// `({+, 0}, {×, 1})`, the ordinary inner product.
    pub fn dot_product() -> Self {
        Semiring {
            product: ProductOp::Mul,
            product_identity: 1.0,
            reduce: ReduceOp::Sum,
            reduce_identity: 0.0,
            annihilating: true,
        }
    }

    /// `({min, +inf}, {+, 0})`. Structurally absent entries stand for `+inf`
    /// (no edge), which annihilates under `+` into the reduce identity.
    pub fn tropical_min_plus() -> Self {
        Semiring {
            product: ProductOp::Add,
            product_identity: 0.0,
            reduce: ReduceOp::Min,
            reduce_identity: f64::INFINITY,
            annihilating: true,
        }
    }

    /// `({max, -inf}, {+, 0})`.
    pub fn tropical_max_plus() -> Self {
        Semiring {
            product: ProductOp::Add,
            product_identity: 0.0,
            reduce: ReduceOp::Max,
            reduce_identity: f64::NEG_INFINITY,
            annihilating: true,
        }
    }

    /// A non-annihilating product (identity 0) reduced with `+`.
    pub fn namm_sum(product: ProductOp) -> Self {
        Semiring {
            product,
            product_identity: 0.0,
            reduce: ReduceOp::Sum,
            reduce_identity: 0.0,
            annihilating: false,
        }
    }

    /// A non-annihilating product reduced with `max` (identity 0).
    pub fn namm_max(product: ProductOp) -> Self {
        Semiring {
            product,
            product_identity: 0.0,
            reduce: ReduceOp::Max,
            reduce_identity: 0.0,
            annihilating: false,
        }
    }

    /// Intersection-only product reduced with `+`.
    pub fn annihilating_sum(product: ProductOp) -> Self {
        Semiring {
            product,
            product_identity: 1.0,
            reduce: ReduceOp::Sum,
            reduce_identity: 0.0,
            annihilating: true,
        }
    }

    /// Number of engine passes needed for the full result.
    pub fn passes(&self) -> u8 {
        if self.annihilating {
            1
        } else {
            2
        }
    }

    #[inline]
    pub fn product(&self, a: f64, b: f64) -> f64 {
        self.product.apply(a, b)
    }

    #[inline]
    pub fn reduce(&self, acc: f64, v: f64) -> f64 {
        self.reduce.apply(acc, v)
    }
}
