//! Open-addressing accumulator used to hold one sparse row during the
//! load-balanced scan when the dense form would be too large.

/// Reserved key marking an empty slot.
pub const EMPTY_SLOT: usize = usize::MAX;

/// 32-bit Murmur3 finalizer.
#[inline]
pub fn murmur_fmix32(mut h: u32) -> u32 {
    h ^= h >> 16;
    h = h.wrapping_mul(0x85eb_ca6b);
    h ^= h >> 13;
    h = h.wrapping_mul(0xc2b2_ae35);
    h ^= h >> 16;
    h
}

#[inline]
fn hash_column(col: usize) -> u32 {
    let c = col as u64;
    murmur_fmix32((c ^ (c >> 32)) as u32)
}

/// Fixed-capacity map from column id to value with linear probing.
///
/// Capacity never grows; callers keep the entry count within the load
/// budget (see [`super::plan_chunks`]).
#[derive(Clone, Debug)]
pub struct HashAccumulator {
    keys: Vec<usize>,
    values: Vec<f64>,
    len: usize,
}

impl HashAccumulator {
    pub fn with_capacity(capacity: usize) -> Self {
        assert!(capacity >= 1, "hash accumulator needs at least one slot");
        HashAccumulator {
            keys: vec![EMPTY_SLOT; capacity],
            values: vec![0.0; capacity],
            len: 0,
        }
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.keys.len()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Maps the 32-bit hash onto `0..capacity` with a multiply-shift.
    #[inline]
    fn home(&self, col: usize) -> usize {
        ((hash_column(col) as u64 * self.keys.len() as u64) >> 32) as usize
    }

    pub fn clear(&mut self) {
        if self.len > 0 {
            self.keys.fill(EMPTY_SLOT);
            self.len = 0;
        }
    }

    /// Inserts or overwrites `col`. Panics when the table is full.
    pub fn insert(&mut self, col: usize, value: f64) {
        debug_assert_ne!(col, EMPTY_SLOT);
        let cap = self.keys.len();
        let mut slot = self.home(col);
        for _ in 0..cap {
            let k = self.keys[slot];
            if k == EMPTY_SLOT {
                self.keys[slot] = col;
                self.values[slot] = value;
                self.len += 1;
                return;
            }
            if k == col {
                self.values[slot] = value;
                return;
            }
            slot += 1;
            if slot == cap {
                slot = 0;
            }
        }
        panic!("hash accumulator overflow: {} slots in use", self.len);
    }

    /// Clears the table and loads `(cols[i], vals[i])` pairs.
    pub fn build(&mut self, cols: &[usize], vals: &[f64]) {
        self.clear();
        for (&c, &v) in cols.iter().zip(vals) {
            self.insert(c, v);
        }
    }

    /// Looks up `col`; the scan stops at the first empty slot.
    #[inline]
    pub fn probe(&self, col: usize) -> Option<f64> {
        let cap = self.keys.len();
        let mut slot = self.home(col);
        for _ in 0..cap {
            let k = self.keys[slot];
            if k == col {
                return Some(self.values[slot]);
            }
            if k == EMPTY_SLOT {
                return None;
            }
            slot += 1;
            if slot == cap {
                slot = 0;
            }
        }
        None
    }
}
