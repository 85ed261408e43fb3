//! Per-node predictive scores.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

use super::DataError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreConvention {
    /// `−((ŷ − y)/σ̂²)² − log σ̂²`
    #[default]
    Paper,
    /// `−(ŷ − y)²/σ̂² − log σ̂²`
    Gaussian,
}

impl std::str::FromStr for ScoreConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Self::Paper),
            "gaussian" => Ok(Self::Gaussian),
            other => Err(format!("unknown score convention {other:?} (expected paper or gaussian)")),
        }
    }
}

pub fn predictive_score<T: Real>(y_hat: T, sigma2_hat: T, y_true: T, convention: ScoreConvention) -> Result<T, DataError> {
    if !(sigma2_hat > T::zero()) {
        return Err(DataError::OutOfRange { value: sigma2_hat.as_f64(), what: "predictive variance must be positive" });
    }
    let e = y_hat - y_true;
    let fit = match convention {
        ScoreConvention::Paper => (e / sigma2_hat) * (e / sigma2_hat),
        ScoreConvention::Gaussian => e * e / sigma2_hat,
    };
    Ok(-fit - sigma2_hat.ln())
}

/// Root-mean-square difference.
pub fn rmse<T: Real>(pred: &[T], truth: &[T]) -> T {
    let n = T::from_count(pred.len().max(1));
    (pred.iter().zip(truth).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>() / n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        let p = ScoreConvention::Paper;
        assert_eq!(predictive_score(1.0, 1.0, 1.0, p).unwrap(), 0.0);
        assert!((predictive_score(1.0, std::f64::consts::E, 1.0, p).unwrap() + 1.0).abs() < 1e-15);
        assert!((predictive_score(3.0, 2.0, 1.0, p).unwrap() - (-1.0 - 2f64.ln())).abs() < 1e-15);
        assert!((predictive_score(3.0, 2.0, 1.0, ScoreConvention::Gaussian).unwrap() - (-2.0 - 2f64.ln())).abs() < 1e-15);
        assert!(predictive_score(0.0, 0.0, 0.0, p).is_err());
    }
}
