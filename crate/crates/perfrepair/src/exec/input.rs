//! Program inputs and the seeded input generator used for invariant
//! refinement and for the falsification side of patch checking.

use crate::lang::{eval_const_expr, Expr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Concrete input for one run: values for the program's parameters plus the
/// finite `input()` stream.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProgramInput {
    pub scalars: BTreeMap<String, i64>,
    pub arrays: BTreeMap<String, Vec<i64>>,
    pub stream: Vec<i64>,
}

#[derive(Debug, Clone)]
pub enum ScalarDomain {
    /// Inclusive range, enumerated exhaustively when small enough.
    Range(i64, i64),
    /// Derived from earlier scalars and `streamLen`.
    Formula(Expr),
}

#[derive(Debug, Clone)]
pub struct ArrayDomain {
    /// Length formula over the scalar parameters and `streamLen`.
    pub len: Expr,
    /// Inclusive element range.
    pub values: (i64, i64),
}

/// Input-domain description for one program. Scalars are ordered; a formula
/// may reference any scalar defined before it.
#[derive(Debug, Clone, Default)]
pub struct GeneratorSpec {
    pub scalars: Vec<(String, ScalarDomain)>,
    pub arrays: Vec<(String, ArrayDomain)>,
    pub stream_len: (u32, u32),
    pub stream_values: (i64, i64),
}

impl GeneratorSpec {
    /// Produces up to `count` inputs, deterministically from `seed`.
    ///
    /// If the product of all ranged-scalar domain sizes (times the stream
    /// length range) fits within `count`, those are enumerated exhaustively
    /// in lexicographic order; otherwise they are sampled. Array contents and
    /// stream values are always sampled.
    pub fn generate(&self, seed: u64, count: usize) -> Vec<ProgramInput> {
        if count == 0 {
            return Vec::new();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ranges: Vec<(usize, i64, i64)> = self
            .scalars
            .iter()
            .enumerate()
            .filter_map(|(i, (_, d))| match d {
                ScalarDomain::Range(lo, hi) => Some((i, *lo, *hi)),
                ScalarDomain::Formula(_) => None,
            })
            .collect();
        let stream_range = (self.stream_len.0 as i64, self.stream_len.1 as i64);

        let mut combo_count: u128 = (stream_range.1 - stream_range.0 + 1).max(1) as u128;
        for (_, lo, hi) in &ranges {
            combo_count = combo_count.saturating_mul((hi - lo + 1).max(1) as u128);
        }
        let exhaustive = combo_count <= count as u128;
        let n = if exhaustive { combo_count as usize } else { count };

        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let (ranged_vals, stream_len) = if exhaustive {
                // Mixed-radix decode of k, last axis fastest.
                let mut rem = k as u128;
                let mut axes: Vec<i64> = Vec::with_capacity(ranges.len() + 1);
                let mut dims: Vec<(i64, i64)> = ranges.iter().map(|&(_, lo, hi)| (lo, hi)).collect();
                dims.push(stream_range);
                for (lo, hi) in dims.iter().rev() {
                    let size = (hi - lo + 1) as u128;
                    axes.push(lo + (rem % size) as i64);
                    rem /= size;
                }
                axes.reverse();
                let stream_len = axes.pop().unwrap();
                (axes, stream_len)
            } else {
                let vals = ranges.iter().map(|&(_, lo, hi)| rng.gen_range(lo..=hi)).collect();
                (vals, rng.gen_range(stream_range.0..=stream_range.1))
            };

            let stream: Vec<i64> = (0..stream_len)
                .map(|_| rng.gen_range(self.stream_values.0..=self.stream_values.1))
                .collect();

            let mut env: BTreeMap<String, i64> = BTreeMap::new();
            env.insert("streamLen".to_string(), stream.len() as i64);
            let mut ranged_iter = ranged_vals.into_iter();
            let mut scalars = BTreeMap::new();
            let mut ok = true;
            for (name, dom) in &self.scalars {
                let v = match dom {
                    ScalarDomain::Range(..) => ranged_iter.next().unwrap(),
                    ScalarDomain::Formula(e) => match eval_const_expr(e, &env) {
                        Ok(v) => v,
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    },
                };
                env.insert(name.clone(), v);
                scalars.insert(name.clone(), v);
            }
            if !ok {
                continue;
            }
            let mut arrays = BTreeMap::new();
            for (name, dom) in &self.arrays {
                let len = match eval_const_expr(&dom.len, &env) {
                    Ok(l) if l >= 0 => l as usize,
                    _ => {
                        ok = false;
                        break;
                    }
                };
                let data: Vec<i64> =
                    (0..len).map(|_| rng.gen_range(dom.values.0..=dom.values.1)).collect();
                arrays.insert(name.clone(), data);
            }
            if !ok {
                continue;
            }
            out.push(ProgramInput { scalars, arrays, stream });
        }
        out
    }
}
