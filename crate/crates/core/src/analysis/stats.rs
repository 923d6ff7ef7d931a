//! Robust summaries and the paired signed-rank test.

use super::AnalysisError;
use crate::acquisition::normal_cdf;

/// Largest number of non-zero differences for which the exact null
/// distribution is used.
pub const EXACT_MAX_N: usize = 12;

/// Median, averaging the two middle values for even lengths.
pub fn median(values: &[f64]) -> Result<f64, AnalysisError> {
    if values.is_empty() {
        return Err(AnalysisError::InvalidArgument("median of an empty sample".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(AnalysisError::InvalidArgument("NaN in sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Median and unscaled median absolute deviation from the median.
pub fn median_mad(values: &[f64]) -> Result<(f64, f64), AnalysisError> {
    let m = median(values)?;
    let dev: Vec<f64> = values.iter().map(|v| (v - m).abs()).collect();
    Ok((m, median(&dev)?))
}

/// Linearly interpolated quantile, `q` in [0, 1].
pub fn quantile(values: &[f64], q: f64) -> Result<f64, AnalysisError> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return Err(AnalysisError::InvalidArgument(format!(
            "quantile {q} of {} values",
            values.len()
        )));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Ok(v[lo] + (pos - lo as f64) * (v[hi] - v[lo]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// One-sided p-value for H1: `a` tends to be smaller than `b`.
    pub p: f64,
    /// Sum of the ranks of positive differences `a - b`.
    pub w_plus: f64,
    /// Number of non-zero differences.
    pub n_eff: usize,
    pub exact: bool,
    /// Every difference was zero; `p` is 1.
    pub degenerate: bool,
}

/// Average ranks (1-based) of `values`, with ties sharing their mean rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// One-sided paired Wilcoxon signed-rank test of H1: `a < b`.
///
/// Zero differences are dropped and tied magnitudes get average ranks. Up to
/// [`EXACT_MAX_N`] remaining pairs the exact null distribution of `W+` is
/// used; beyond that a normal approximation with tie and continuity
/// corrections.
pub fn wilcoxon_one_sided(a: &[f64], b: &[f64]) -> Result<WilcoxonResult, AnalysisError> {
    if a.len() != b.len() || a.is_empty() {
        return Err(AnalysisError::InvalidArgument(format!(
            "paired samples of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(AnalysisError::InvalidArgument("non-finite sample value".into()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            p: 1.0,
            w_plus: 0.0,
            n_eff: 0,
            exact: true,
            degenerate: true,
        });
    }
    let mags: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&mags);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();

    let (p, exact) = if n <= EXACT_MAX_N {
        (exact_lower_tail(&ranks, w_plus), true)
    } else {
        (normal_lower_tail(&mags, &ranks, w_plus), false)
    };
    Ok(WilcoxonResult {
        p: p.clamp(f64::MIN_POSITIVE, 1.0),
        w_plus,
        n_eff: n,
        exact,
        degenerate: false,
    })
}

/// `P(W+ <= w)` under random signs, counting subsets of doubled (integer) ranks.
fn exact_lower_tail(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0f64; total + 1];
    counts[0] = 1.0;
    for &r in &doubled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let limit = (2.0 * w).round() as usize;
    let hits: f64 = counts[..=limit.min(total)].iter().sum();
    hits / 2f64.powi(ranks.len() as i32)
}

fn normal_lower_tail(mags: &[f64], ranks: &[f64], w: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = mags.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    normal_cdf((w - mean + 0.5) / var.sqrt())
}

/// Holm step-down procedure; returns rejection flags in input order.
pub fn holm_bonferroni(pvals: &[f64], alpha: f64) -> Result<Vec<bool>, AnalysisError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(AnalysisError::InvalidArgument(format!("alpha {alpha} outside (0, 1)")));
    }
    if pvals.iter().any(|p| p.is_nan()) {
        return Err(AnalysisError::InvalidArgument("NaN p-value".into()));
    }
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| pvals[i].total_cmp(&pvals[j]).then(i.cmp(&j)));
    let mut reject = vec![false; m];
    for (rank, &i) in order.iter().enumerate() {
        if pvals[i] <= alpha / (m - rank) as f64 {
            reject[i] = true;
        } else {
            break;
        }
    }
    Ok(reject)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    /// P(W+ <= observed) by listing all 2^n sign patterns.
    fn brute_force(ranks: &[f64], w: f64) -> f64 {
        let n = ranks.len();
        let mut hits = 0u64;
        for mask in 0u64..(1 << n) {
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if s <= w + 1e-9 {
                hits += 1;
            }
        }
        hits as f64 / (1u64 << n) as f64
    }

    #[test]
    fn median_mad_examples() {
        assert_eq!(median_mad(&[1.0, 2.0, 3.0]).unwrap(), (2.0, 1.0));
        assert_eq!(median_mad(&[7.5]).unwrap(), (7.5, 0.0));
        assert_eq!(median_mad(&[1.0, 1.0, 1.0, 9.0]).unwrap(), (1.0, 0.0));
        assert!(median_mad(&[]).is_err());
    }

    #[test]
    fn quantile_interpolates() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile(&v, 0.0).unwrap(), 1.0);
        assert_eq!(quantile(&v, 1.0).unwrap(), 4.0);
        assert_eq!(quantile(&v, 0.25).unwrap(), 1.75);
        assert_eq!(quantile(&v, 0.5).unwrap(), 2.5);
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn equal_samples_are_degenerate() {
        let r = wilcoxon_one_sided(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!(r.p, 1.0);
        assert!(r.degenerate);
    }

    #[test]
    fn uniformly_better_five() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [2.0, 4.0, 6.0, 8.0, 10.0];
        let r = wilcoxon_one_sided(&a, &b).unwrap();
        assert_eq!(r.p, 1.0 / 32.0);
        assert!(r.exact);
        assert_eq!(wilcoxon_one_sided(&b, &a).unwrap().p, 1.0);
    }

    #[test]
    fn mixed_signs_match_enumeration() {
        let a = [0.5, 2.0, 1.0, 4.0, 0.1, 3.0, 2.5, 0.7];
        let b = [1.0, 1.5, 3.0, 2.0, 0.9, 3.3, 2.0, 2.7];
        let r = wilcoxon_one_sided(&a, &b).unwrap();
        let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let ranks = average_ranks(&d.iter().map(|v| v.abs()).collect::<Vec<_>>());
        let w: f64 = d.iter().zip(&ranks).filter(|(x, _)| **x > 0.0).map(|(_, r)| r).sum();
        assert_eq!(r.w_plus, w);
        assert!((r.p - brute_force(&ranks, w)).abs() < 1e-12);
    }

    #[test]
    fn exact_matches_enumeration_with_ties() {
        let mut rng = crate::rng::substream(17, "wilcoxon-test", &[]);
        for _ in 0..200 {
            let n = rng.random_range(1..=11);
            // Coarse values force tied magnitudes and zero differences.
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(0..6) as f64).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(0..6) as f64).collect();
            let r = wilcoxon_one_sided(&a, &b).unwrap();
            let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).filter(|v| *v != 0.0).collect();
            if d.is_empty() {
                assert!(r.degenerate);
                continue;
            }
            let ranks = average_ranks(&d.iter().map(|v| v.abs()).collect::<Vec<_>>());
            assert!((r.p - brute_force(&ranks, r.w_plus)).abs() < 1e-12);
        }
    }

    #[test]
    fn approximation_close_to_exact_at_twelve() {
        let mut rng = crate::rng::substream(5, "wilcoxon-approx", &[]);
        for _ in 0..50 {
            let a: Vec<f64> = (0..12).map(|_| rng.random::<f64>()).collect();
            let b: Vec<f64> = (0..12).map(|_| rng.random::<f64>() + 0.1).collect();
            let r = wilcoxon_one_sided(&a, &b).unwrap();
            assert!(r.exact);
            let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
            let mags: Vec<f64> = d.iter().map(|v| v.abs()).collect();
            let ranks = average_ranks(&mags);
            let approx = normal_lower_tail(&mags, &ranks, r.w_plus);
            assert!((approx - r.p).abs() < 0.02, "{approx} vs {}", r.p);
        }
    }

    #[test]
    fn large_samples_use_normal_approximation() {
        let a: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..30).map(|i| i as f64 + 1.0 + (i % 3) as f64).collect();
        let r = wilcoxon_one_sided(&a, &b).unwrap();
        assert!(!r.exact);
        assert!(r.p < 1e-5);
    }

    #[test]
    fn holm_examples() {
        assert_eq!(holm_bonferroni(&[0.01], 0.05).unwrap(), vec![true]);
        assert_eq!(holm_bonferroni(&[1.0, 1.0, 1.0], 0.05).unwrap(), vec![false; 3]);
        // Thresholds 0.05/3, 0.05/2, 0.05/1.
        assert_eq!(holm_bonferroni(&[0.01, 0.02, 0.04], 0.05).unwrap(), vec![true, true, true]);
        assert_eq!(holm_bonferroni(&[0.04, 0.01, 0.03], 0.05).unwrap(), vec![false, true, false]);
        assert!(holm_bonferroni(&[0.1], 0.0).is_err());
    }

    proptest! {
        #[test]
        fn holm_monotone_in_alpha(
            p in proptest::collection::vec(0.0f64..1.0, 1..10),
            a1 in 0.001f64..0.5,
            extra in 0.0f64..0.4,
        ) {
            let lo = holm_bonferroni(&p, a1).unwrap();
            let hi = holm_bonferroni(&p, a1 + extra).unwrap();
            for (l, h) in lo.iter().zip(&hi) {
                prop_assert!(!l | h);
            }
        }
    }
}
