//! Deterministic pairwise summation.
//!
//! The summation tree depends only on the input length, so serial and
//! parallel evaluation give bit-identical results.

const LEAF: usize = 128;
const PARALLEL_CUTOFF: usize = 1 << 15;

/// Pairwise sum of `f(x)` over `items`.
pub fn tree_sum_by<T: Sync, F>(items: &[T], f: &F) -> f64
where
    F: Fn(&T) -> f64 + Sync,
{
    if items.len() <= LEAF {
        let mut acc = 0.0;
        for x in items {
            acc += f(x);
        }
        return acc;
    }
    let mid = split_point(items.len());
    let (left, right) = items.split_at(mid);
    let (a, b) = if items.len() >= PARALLEL_CUTOFF {
        rayon::join(|| tree_sum_by(left, f), || tree_sum_by(right, f))
    } else {
        (tree_sum_by(left, f), tree_sum_by(right, f))
    };
    a + b
}

pub fn tree_sum(values: &[f64]) -> f64 {
    tree_sum_by(values, &|x: &f64| *x)
}

/// Left half gets the largest multiple of `LEAF` not exceeding half the length.
fn split_point(len: usize) -> usize {
    let half = len / 2;
    let aligned = half - half % LEAF;
    if aligned == 0 {
        half
    } else {
        aligned
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn serial_reference(values: &[f64]) -> f64 {
        if values.len() <= LEAF {
            return values.iter().fold(0.0, |a, x| a + x);
        }
        let (l, r) = values.split_at(split_point(values.len()));
        serial_reference(l) + serial_reference(r)
    }

    #[test]
    fn parallel_matches_serial_tree_bitwise() {
        let values: Vec<f64> = (0..200_000).map(|k| ((k as f64) * 0.37).sin() * 1e-3 + 1.0 / (k + 1) as f64).collect();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let par = pool.install(|| tree_sum(&values));
        assert_eq!(par.to_bits(), serial_reference(&values).to_bits());
        assert_eq!(par.to_bits(), tree_sum(&values).to_bits());
    }

    #[test]
    fn pairwise_beats_naive_on_harmonic_tail() {
        let n = 1_000_000;
        let values: Vec<f64> = (0..n).map(|_| 0.1).collect();
        let exact = 0.1 * n as f64;
        let naive: f64 = values.iter().sum();
        assert!((tree_sum(&values) - exact).abs() <= (naive - exact).abs());
    }

    proptest! {
        #[test]
        fn tree_sum_is_close_to_exact(values in prop::collection::vec(-1e3f64..1e3, 0..2000)) {
            let s = tree_sum(&values);
            let exact: f64 = values.iter().sum();
            let scale: f64 = values.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
            prop_assert!((s - exact).abs() <= 1e-12 * scale);
        }
    }
}
