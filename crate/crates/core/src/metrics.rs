//! Confusion-matrix metrics and McNemar's paired test.
//!
//! Label 1 (demented) is the positive class throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Conventional significance level for [`McNemarResult::is_significant`].
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// The matrix seen with label 0 as the positive class.
    pub fn transposed(&self) -> Self {
        Self {
            tp: self.tn,
            tn: self.tp,
            fp: self.fn_,
            fn_: self.fp,
        }
    }
}

fn check_labels(name: &str, v: &[u8]) -> Result<()> {
    match v.iter().find(|&&x| x > 1) {
        Some(x) => Err(Error::invalid(format!(
            "{name} contains non-binary value {x}"
        ))),
        None => Ok(()),
    }
}

pub fn confusion(predictions: &[u8], labels: &[u8]) -> Result<ConfusionMatrix> {
    if predictions.is_empty() || predictions.len() != labels.len() {
        return Err(Error::invalid(format!(
            "need equal non-empty prediction and label lists, got {} and {}",
            predictions.len(),
            labels.len()
        )));
    }
    check_labels("predictions", predictions)?;
    check_labels("labels", labels)?;
    let mut cm = ConfusionMatrix::default();
    for (&p, &y) in predictions.iter().zip(labels) {
        match (p, y) {
            (1, 1) => cm.tp += 1,
            (0, 0) => cm.tn += 1,
            (1, 0) => cm.fp += 1,
            _ => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// Accuracy, recall, precision and F1. A metric whose denominator is zero is
/// reported as 0 with its `*_degenerate` flag set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    pub recall_degenerate: bool,
    pub precision_degenerate: bool,
    pub f1_degenerate: bool,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::invalid("confusion matrix is empty"));
    }
    let accuracy = (cm.tp + cm.tn) as f64 / total as f64;
    let (recall, recall_degenerate) = ratio(cm.tp, cm.tp + cm.fn_);
    let (precision, precision_degenerate) = ratio(cm.tp, cm.tp + cm.fp);
    let (f1, f1_degenerate) = if recall + precision == 0.0 {
        (0.0, true)
    } else {
        (2.0 * recall * precision / (recall + precision), false)
    };
    Ok(MetricsReport {
        accuracy,
        recall,
        precision,
        f1,
        recall_degenerate,
        precision_degenerate,
        f1_degenerate,
    })
}

/// McNemar's test with the continuity-corrected chi-square statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McNemarResult {
    /// Samples model A got wrong and model B got right.
    pub b: u64,
    /// Samples model A got right and model B got wrong.
    pub c: u64,
    pub chi_square: f64,
    pub p_value: f64,
    /// `b + c == 0`: the models never disagree on correctness.
    pub no_discordance: bool,
}

impl McNemarResult {
    pub fn is_significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// `chi2 = max(|b - c| - 1, 0)^2 / (b + c)`, `p = erfc(sqrt(chi2 / 2))`.
pub fn mcnemar_from_counts(b: u64, c: u64) -> McNemarResult {
    if b + c == 0 {
        return McNemarResult {
            b,
            c,
            chi_square: 0.0,
            p_value: 1.0,
            no_discordance: true,
        };
    }
    let diff = (b.abs_diff(c) as f64 - 1.0).max(0.0);
    let chi_square = diff * diff / (b + c) as f64;
    McNemarResult {
        b,
        c,
        chi_square,
        p_value: chi2_df1_sf(chi_square),
        no_discordance: false,
    }
}

pub fn mcnemar(preds_a: &[u8], preds_b: &[u8], labels: &[u8]) -> Result<McNemarResult> {
    if labels.is_empty() || preds_a.len() != labels.len() || preds_b.len() != labels.len() {
        return Err(Error::invalid(format!(
            "need three equal non-empty lists, got {}, {} and {}",
            preds_a.len(),
            preds_b.len(),
            labels.len()
        )));
    }
    check_labels("preds_a", preds_a)?;
    check_labels("preds_b", preds_b)?;
    check_labels("labels", labels)?;
    let (mut b, mut c) = (0, 0);
    for ((&pa, &pb), &y) in preds_a.iter().zip(preds_b).zip(labels) {
        match (pa == y, pb == y) {
            (false, true) => b += 1,
            (true, false) => c += 1,
            _ => {}
        }
    }
    Ok(mcnemar_from_counts(b, c))
}

/// Survival function of the chi-square distribution with one degree of freedom.
pub fn chi2_df1_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    erfc((x / 2.0).sqrt())
}

/// Complementary error function, accurate to about 1e-15 relative.
///
/// Uses the all-positive series `erf(x) = 2/sqrt(pi) e^{-x^2} sum 2^n x^{2n+1} / (2n+1)!!`
/// below 2.5 and a Lentz-evaluated continued fraction above.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    let two_over_sqrt_pi = std::f64::consts::FRAC_2_SQRT_PI;
    if x < 2.5 {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term > sum * 1e-17 {
            n += 1.0;
            term *= 2.0 * x2 / (2.0 * n + 1.0);
            sum += term;
        }
        return 1.0 - two_over_sqrt_pi * (-x2).exp() * sum;
    }
    // erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        d = if d.abs() < tiny { tiny } else { d };
        c = x + a / c;
        c = if c.abs() < tiny { tiny } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (f * std::f64::consts::PI.sqrt())
}

/// Formats `v` with six significant digits.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v:.5}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    if !(-4..6).contains(&magnitude) {
        return format!("{v:.5e}");
    }
    let mut decimals = (5 - magnitude).max(0) as usize;
    let rounded: f64 = format!("{v:.decimals$}").parse().unwrap_or(v);
    // rounding can carry into a new leading digit (9.999996 -> 10.0000)
    if rounded.abs().log10().floor() as i32 > magnitude && decimals > 0 {
        decimals -= 1;
    }
    format!("{v:.decimals$}")
}

/// Flat `key=value` report of a confusion matrix and its metrics.
pub fn metrics_document(cm: &ConfusionMatrix, m: &MetricsReport) -> String {
    format!(
        "accuracy={}\nrecall={}\nprecision={}\nf1={}\ntp={}\ntn={}\nfp={}\nfn={}\n\
         recall_degenerate={}\nprecision_degenerate={}\nf1_degenerate={}\n",
        sig6(m.accuracy),
        sig6(m.recall),
        sig6(m.precision),
        sig6(m.f1),
        cm.tp,
        cm.tn,
        cm.fp,
        cm.fn_,
        m.recall_degenerate,
        m.precision_degenerate,
        m.f1_degenerate,
    )
}

/// Flat `key=value` McNemar report.
pub fn mcnemar_document(r: &McNemarResult, alpha: f64) -> String {
    format!(
        "test=mcnemar_continuity_corrected_chi2\nb={}\nc={}\nchi_square={}\np_value={}\n\
         alpha={}\nsignificant={}\nno_discordance={}\n",
        r.b,
        r.c,
        sig6(r.chi_square),
        sig6(r.p_value),
        sig6(alpha),
        r.is_significant(alpha),
        r.no_discordance,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cm(tp: u64, fn_: u64, tn: u64, fp: u64) -> ConfusionMatrix {
        ConfusionMatrix { tp, tn, fp, fn_ }
    }

    fn r3(v: f64) -> f64 {
        (v * 1000.0).round() / 1000.0
    }

    #[test]
    fn confusion_from_hybrid_test_outcome() {
        // 100 normals (95 right), 100 demented (98 right)
        let mut labels = vec![0u8; 100];
        labels.extend(vec![1u8; 100]);
        let mut preds = vec![0u8; 95];
        preds.extend(vec![1u8; 5]);
        preds.extend(vec![1u8; 98]);
        preds.extend(vec![0u8; 2]);
        assert_eq!(confusion(&preds, &labels).unwrap(), cm(98, 2, 95, 5));
    }

    #[test]
    fn confusion_edge_cases() {
        let y = [0, 1, 1, 0, 1];
        let c = confusion(&y, &y).unwrap();
        assert_eq!((c.fp, c.fn_), (0, 0));
        let c = confusion(&[1, 1, 1], &[0, 0, 0]).unwrap();
        assert_eq!(c, cm(0, 0, 0, 3));
        assert!(confusion(&[], &[]).is_err());
        assert!(confusion(&[0], &[0, 1]).is_err());
        assert!(confusion(&[2], &[0]).is_err());
    }

    #[test]
    fn published_rows_at_three_decimals() {
        let h = metrics(&cm(98, 2, 95, 5)).unwrap();
        assert_eq!(
            [r3(h.accuracy), r3(h.recall), r3(h.precision), r3(h.f1)],
            [0.965, 0.980, 0.951, 0.966]
        );
        let c = metrics(&cm(91, 9, 89, 11)).unwrap();
        assert_eq!(
            [r3(c.accuracy), r3(c.recall), r3(c.precision), r3(c.f1)],
            [0.900, 0.910, 0.892, 0.901]
        );
    }

    #[test]
    fn degenerate_precision() {
        let m = metrics(&cm(0, 4, 6, 0)).unwrap();
        assert_eq!(m.precision, 0.0);
        assert!(m.precision_degenerate && m.f1_degenerate && !m.recall_degenerate);
        assert!(metrics(&ConfusionMatrix::default()).is_err());
    }

    #[test]
    fn all_positive_on_balanced_set() {
        let m = metrics(&confusion(&[1; 10], &[0, 1, 0, 1, 0, 1, 0, 1, 0, 1]).unwrap()).unwrap();
        assert_eq!((m.recall, m.precision), (1.0, 0.5));
    }

    #[test]
    fn mcnemar_examples() {
        let r = mcnemar_from_counts(10, 2);
        assert!((r.chi_square - 49.0 / 12.0).abs() < 1e-12);
        assert!((r.p_value - 0.0433).abs() < 1e-3);
        let r = mcnemar_from_counts(5, 5);
        assert_eq!((r.chi_square, r.p_value), (0.0, 1.0));
        let p = [0, 1, 1, 0];
        let r = mcnemar(&p, &p, &[0, 1, 0, 1]).unwrap();
        assert!(r.no_discordance && r.p_value == 1.0 && r.b == 0 && r.c == 0);
        assert!(mcnemar(&[0], &[0, 1], &[0]).is_err());
    }

    #[test]
    fn mcnemar_counts_from_predictions() {
        let labels = [1, 1, 0, 0, 1];
        let a = [0, 1, 1, 0, 1]; // wrong on 0 and 2
        let b = [1, 0, 0, 0, 1]; // wrong on 1
        let r = mcnemar(&a, &b, &labels).unwrap();
        assert_eq!((r.b, r.c), (2, 1));
    }

    #[test]
    fn erfc_reference_points() {
        let cases = [
            (0.0, 1.0),
            (0.5, 0.479_500_122_186_953_5),
            (1.0, 0.157_299_207_050_285_13),
            (2.0, 0.004_677_734_981_047_266),
            (3.0, 2.209_049_699_858_544e-5),
            (-1.0, 1.842_700_792_949_715),
        ];
        for (x, want) in cases {
            assert!((erfc(x) - want).abs() < 1e-15 + 1e-13 * want, "erfc({x})");
        }
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(sig6(0.965), "0.965000");
        assert_eq!(sig6(98.0 / 103.0), "0.951456");
        assert_eq!(sig6(1.0), "1.00000");
        assert_eq!(sig6(49.0 / 12.0), "4.08333");
        assert_eq!(sig6(0.0), "0.00000");
        assert_eq!(sig6(9.999_999_9), "10.0000");
        assert_eq!(sig6(0.043_3), "0.0433000");
    }

    proptest! {
        #[test]
        fn mcnemar_symmetric(a in prop::collection::vec(0u8..=1, 1..60), seed in any::<u64>()) {
            let b: Vec<u8> = a.iter().enumerate().map(|(i, &x)| x ^ ((seed >> (i % 64)) & 1) as u8).collect();
            let y: Vec<u8> = a.iter().enumerate().map(|(i, _)| ((seed >> ((i * 7) % 64)) & 1) as u8).collect();
            let ab = mcnemar(&a, &b, &y).unwrap();
            let ba = mcnemar(&b, &a, &y).unwrap();
            prop_assert_eq!((ab.b, ab.c), (ba.c, ba.b));
            prop_assert_eq!(ab.chi_square, ba.chi_square);
            prop_assert_eq!(ab.p_value, ba.p_value);
        }

        #[test]
        fn p_monotone_in_imbalance(total in 1u64..200) {
            let mut prev = f64::INFINITY;
            for b in total / 2 + total % 2..=total {
                let p = mcnemar_from_counts(b, total - b).p_value;
                prop_assert!(p <= prev);
                prev = p;
            }
        }

        #[test]
        fn f1_is_harmonic_mean(tp in 0u64..50, fn_ in 0u64..50, tn in 0u64..50, fp in 0u64..50) {
            let c = cm(tp, fn_, tn, fp);
            prop_assume!(c.total() > 0);
            let m = metrics(&c).unwrap();
            prop_assert_eq!(m.accuracy, (tp + tn) as f64 / c.total() as f64);
            if !m.f1_degenerate {
                prop_assert!((m.f1 - 2.0 * m.recall * m.precision / (m.recall + m.precision)).abs() < 1e-12);
            }
            let t = metrics(&c.transposed()).unwrap();
            prop_assert_eq!(t.accuracy, m.accuracy);
            if tn + fp > 0 {
                prop_assert_eq!(t.recall, tn as f64 / (tn + fp) as f64);
            }
        }
    }
}
