//! Classification metrics: balanced error rate and area under the
//! precision-recall curve.

use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn from_predictions(labels: &[bool], predictions: &[bool]) -> Result<Self> {
        if labels.len() != predictions.len() {
            return Err(Error::BadSeries("labels and predictions differ in length".to_string()));
        }
        let mut c = Confusion { tp: 0, fp: 0, tn: 0, fn_: 0 };
        for (&y, &p) in labels.iter().zip(predictions) {
            match (y, p) {
                (true, true) => c.tp += 1,
                (true, false) => c.fn_ += 1,
                (false, true) => c.fp += 1,
                (false, false) => c.tn += 1,
            }
        }
        if c.tp + c.fn_ == 0 || c.fp + c.tn == 0 {
            return Err(Error::SingleClass);
        }
        Ok(c)
    }

    pub fn positives(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> usize {
        self.fp + self.tn
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Balanced error rate: (FN/P + FP/N) / 2.
    pub fn ber(&self) -> f64 {
        0.5 * (self.fn_ as f64 / self.positives() as f64
            + self.fp as f64 / self.negatives() as f64)
    }
}

/// Balanced error rate of boolean predictions against labels. Errors if
/// the labels contain a single class.
pub fn ber(labels: &[bool], predictions: &[bool]) -> Result<f64> {
    Ok(Confusion::from_predictions(labels, predictions)?.ber())
}

/// Area under the precision-recall step curve: sweep the threshold over
/// distinct scores (ties grouped), accumulate precision times recall
/// increment. Equal scores everywhere therefore yield the positive
/// prevalence, and a perfect ranking yields 1.
pub fn auprc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::BadSeries("scores and labels differ in length".to_string()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("auprc scores".to_string()));
    }
    let total_pos = labels.iter().filter(|&&l| l).count();
    let total_neg = labels.len() - total_pos;
    if total_pos == 0 || total_neg == 0 {
        return Err(Error::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut area = 0.0;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut at = 0usize;
    while at < order.len() {
        // group ties: one PR point per distinct score
        let group_score = scores[order[at]];
        let mut group_tp = 0usize;
        let mut group_fp = 0usize;
        while at < order.len() && scores[order[at]] == group_score {
            if labels[order[at]] {
                group_tp += 1;
            } else {
                group_fp += 1;
            }
            at += 1;
        }
        tp += group_tp;
        fp += group_fp;
        if group_tp > 0 {
            let precision = tp as f64 / (tp + fp) as f64;
            let recall_gain = group_tp as f64 / total_pos as f64;
            area += precision * recall_gain;
        }
    }
    Ok(area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn ber_perfect_classifier_is_zero() {
        let labels = [true, true, false, false];
        assert_eq!(ber(&labels, &labels).unwrap(), 0.0);
    }

    #[test]
    fn ber_inverted_classifier_is_one() {
        let labels = [true, true, false, false];
        let preds = [false, false, true, true];
        assert_eq!(ber(&labels, &preds).unwrap(), 1.0);
    }

    #[test]
    fn ber_hand_case() {
        // 1 FN of 2 positives, 0 FP of 2 negatives: (0.5 + 0) / 2
        let labels = [true, true, false, false];
        let preds = [true, false, false, false];
        assert_eq!(ber(&labels, &preds).unwrap(), 0.25);
    }

    #[test]
    fn ber_single_class_errors() {
        let labels = [true, true];
        let preds = [true, false];
        assert!(matches!(ber(&labels, &preds), Err(Error::SingleClass)));
    }

    #[test]
    fn ber_matches_confusion_recomputation_bitwise() {
        let labels = [true, false, true, false, true, false, false];
        let preds = [true, true, false, false, true, false, true];
        let c = Confusion::from_predictions(&labels, &preds).unwrap();
        let direct = ber(&labels, &preds).unwrap();
        assert_eq!(direct.to_bits(), c.ber().to_bits());
        assert_eq!(c.positives(), 3);
        assert_eq!(c.total(), labels.len());
    }

    #[test]
    fn auprc_perfect_ranking_is_one() {
        let scores = [0.9, 0.8, 0.7, 0.2, 0.1];
        let labels = [true, true, true, false, false];
        assert_eq!(auprc(&scores, &labels).unwrap(), 1.0);
    }

    #[test]
    fn auprc_constant_scores_equal_prevalence() {
        let scores = [0.5; 5];
        let labels = [true, true, false, false, false];
        let got = auprc(&scores, &labels).unwrap();
        assert!((got - 0.4).abs() < 1e-12, "{got}");
    }

    #[test]
    fn auprc_one_positive_ranked_last() {
        let scores = [0.9, 0.8, 0.7, 0.6, 0.1];
        let labels = [false, false, false, false, true];
        let got = auprc(&scores, &labels).unwrap();
        assert!((got - 0.2).abs() < 1e-12, "{got}");
    }

    #[test]
    fn auprc_single_class_errors() {
        let scores = [0.4, 0.6];
        assert!(matches!(auprc(&scores, &[true, true]), Err(Error::SingleClass)));
    }

    #[test]
    fn auprc_is_order_independent() {
        let scores = vec![0.3, 0.9, 0.5, 0.5, 0.1, 0.7];
        let labels = vec![false, true, true, false, false, true];
        let a = auprc(&scores, &labels).unwrap();
        let perm = [5usize, 2, 0, 4, 1, 3];
        let ps: Vec<f64> = perm.iter().map(|&k| scores[k]).collect();
        let pl: Vec<bool> = perm.iter().map(|&k| labels[k]).collect();
        let b = auprc(&ps, &pl).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
