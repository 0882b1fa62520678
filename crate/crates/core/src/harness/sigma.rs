use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A minimum support threshold: an absolute count, or a fraction of the
/// transactions kept as an exact decimal `num / den`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sigma {
    Count(u32),
    Fraction { num: u64, den: u64, text: String },
}

impl Sigma {
    /// Absolute count: fractions resolve to `ceil(fraction * n_transactions)`.
    pub fn resolve(&self, n_transactions: usize) -> u32 {
        match self {
            Sigma::Count(c) => *c,
            Sigma::Fraction { num, den, .. } => {
                let scaled = u128::from(*num) * n_transactions as u128;
                let den = u128::from(*den);
                u32::try_from(scaled.div_ceil(den)).unwrap_or(u32::MAX)
            }
        }
    }
}

impl FromStr for Sigma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        let bad = || Error::InvalidArgument(format!("invalid minimum support {s:?}"));
        if let Some((whole, frac)) = text.split_once('.') {
            let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
            if !all_digits(whole) || !all_digits(frac) || (whole.is_empty() && frac.is_empty()) || frac.len() > 18 {
                return Err(bad());
            }
            let den = 10u64.pow(frac.len() as u32);
            let whole: u64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
            let part: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
            let num = whole.checked_mul(den).and_then(|w| w.checked_add(part)).ok_or_else(bad)?;
            if num == 0 || num > den {
                return Err(Error::InvalidArgument(format!(
                    "fractional minimum support {text} must lie in (0, 1]"
                )));
            }
            Ok(Sigma::Fraction {
                num,
                den,
                text: text.to_owned(),
            })
        } else {
            let c: u32 = text.parse().map_err(|_| bad())?;
            if c == 0 {
                return Err(Error::InvalidArgument("minimum support must be at least 1".into()));
            }
            Ok(Sigma::Count(c))
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::Count(c) => write!(f, "{c}"),
            Sigma::Fraction { text, .. } => f.write_str(text),
        }
    }
}
