//! Row layouts and the id-to-value mapping.
//!
//! Every column is first generated as a sequence of value ids in
//! `[0, ndv)`, then each id is mapped to a concrete value. The mapping is
//! strictly increasing in the id, so per-group extrema and distinct counts
//! can be computed on ids.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::spec::{prefix_width, ColumnSpec, Layout, LengthLaw, ValueType};
use crate::truth::Scalar;

/// Relative width of the value jitter in the clustered layout.
const CLUSTER_JITTER: f64 = 0.1;

/// SplitMix64 finalizer; a cheap deterministic per-id hash.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Value ids per row; `None` marks a null.
pub fn generate_ids(spec: &ColumnSpec) -> Vec<Option<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rows = spec.rows;
    let ndv = spec.ndv_true;
    let sorted = |i: u64| ((u128::from(i) * u128::from(ndv)) / u128::from(rows)) as u64;

    let ids: Vec<u64> = match spec.layout {
        Layout::Uniform => (0..rows).map(|_| rng.random_range(0..ndv)).collect(),
        Layout::Sorted => (0..rows).map(sorted).collect(),
        Layout::Partitioned { partitions } => {
            let parts = u64::from(partitions).min(rows);
            let mut blocks: Vec<Vec<u64>> = (0..parts)
                .map(|p| {
                    let (start, end) = (p * rows / parts, (p + 1) * rows / parts);
                    let mut block: Vec<u64> = (start..end).map(sorted).collect();
                    block.shuffle(&mut rng);
                    block
                })
                .collect();
            blocks.shuffle(&mut rng);
            blocks.concat()
        }
        Layout::Clustered => {
            let per_group = ndv as f64 * spec.row_group_rows.min(rows) as f64 / rows as f64;
            let jitter = (CLUSTER_JITTER * per_group).round() as i64;
            (0..rows)
                .map(|i| {
                    let offset = if jitter > 0 { rng.random_range(-jitter..=jitter) } else { 0 };
                    (sorted(i) as i64 + offset).clamp(0, ndv as i64 - 1) as u64
                })
                .collect()
        }
        Layout::Skewed { s } => {
            let zipf = Zipf::new(ndv as f64, s).expect("validated zipf parameters");
            let mut rank_to_id: Vec<u64> = (0..ndv).collect();
            rank_to_id.shuffle(&mut rng);
            (0..rows).map(|_| rank_to_id[zipf.sample(&mut rng) as usize - 1]).collect()
        }
    };

    if spec.null_fraction == 0.0 {
        return ids.into_iter().map(Some).collect();
    }
    ids.into_iter().map(|id| (!rng.random_bool(spec.null_fraction)).then_some(id)).collect()
}

/// Maps ids to concrete values for one column.
#[derive(Debug, Clone)]
pub struct ValueMap {
    value_type: ValueType,
    seed: u64,
    width: u32,
}

impl ValueMap {
    pub fn new(spec: &ColumnSpec) -> Self {
        Self { value_type: spec.value_type, seed: spec.seed, width: prefix_width(spec.ndv_true) }
    }

    pub fn int(&self, id: u64) -> i64 {
        let ValueType::Int64 { base, stride } = self.value_type else { unreachable!("int() on a non-integer column") };
        let jitter = if stride > 1 { mix(id ^ self.seed) % stride } else { 0 };
        base + (id * stride + jitter) as i64
    }

    pub fn double(&self, id: u64) -> f64 {
        id as f64 * 0.25
    }

    pub fn string_len(&self, id: u64) -> usize {
        let ValueType::String { length } = self.value_type else { unreachable!("string_len() on a non-string column") };
        match length {
            LengthLaw::Fixed { len } => len as usize,
            LengthLaw::Uniform { min, max } => {
                let min = min.max(self.width);
                (min + (mix(id ^ self.seed.rotate_left(17)) % u64::from(max - min + 1)) as u32) as usize
            }
        }
    }

    /// Fixed-width base-26 prefix of the id, then lowercase filler.
    pub fn string(&self, id: u64) -> String {
        let len = self.string_len(id);
        let mut out = vec![b'a'; len];
        let mut rest = id;
        for slot in out[..self.width as usize].iter_mut().rev() {
            *slot = b'A' + (rest % 26) as u8;
            rest /= 26;
        }
        let mut h = mix(id ^ self.seed);
        for (i, slot) in out[self.width as usize..].iter_mut().enumerate() {
            if i % 8 == 0 && i > 0 {
                h = mix(h);
            }
            *slot = b'a' + ((h >> ((i % 8) * 8)) as u8 % 26);
        }
        String::from_utf8(out).expect("ascii")
    }

    pub fn byte_len(&self, id: u64) -> usize {
        match self.value_type {
            ValueType::Int64 { .. } | ValueType::Double => 8,
            ValueType::String { .. } => self.string_len(id),
        }
    }

    pub fn scalar(&self, id: u64) -> Scalar {
        match self.value_type {
            ValueType::Int64 { .. } => Scalar::Int(self.int(id)),
            ValueType::Double => Scalar::Float(self.double(id)),
            ValueType::String { .. } => Scalar::Str(self.string(id)),
        }
    }
}
