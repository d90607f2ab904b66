use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Queueing model of the link: `1 / (1 - rho)^queueing_exponent` with the
/// utilization `rho` capped at `rho_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContentionParams {
    pub rho_max: f64,
    pub queueing_exponent: f64,
}

impl ContentionParams {
    /// Values fitted to the sensitivity anchors of the shipped fixtures.
    pub const fn calibrated() -> Self {
        Self {
            rho_max: 0.95,
            queueing_exponent: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho_max > 0.0 && self.rho_max < 1.0) {
            return Err(Error::field("rho_max", "must lie in (0, 1)"));
        }
        if !(self.queueing_exponent >= 1.0 && self.queueing_exponent.is_finite()) {
            return Err(Error::field("queueing_exponent", "must be at least 1"));
        }
        Ok(())
    }
}

impl Default for ContentionParams {
    fn default() -> Self {
        Self::calibrated()
    }
}

pub fn contention_factor(
    offered_bytes_per_s: f64,
    capacity: f64,
    p: &ContentionParams,
) -> Result<f64> {
    p.validate()?;
    if !(capacity > 0.0 && capacity.is_finite()) {
        return Err(Error::invalid("link capacity must be positive"));
    }
    if offered_bytes_per_s.is_nan() || offered_bytes_per_s < 0.0 {
        return Err(Error::invalid("offered traffic must be non-negative"));
    }
    let rho = (offered_bytes_per_s / capacity).min(p.rho_max);
    Ok(1.0 / (1.0 - rho).powf(p.queueing_exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LINEAR: ContentionParams = ContentionParams {
        rho_max: 0.95,
        queueing_exponent: 1.0,
    };

    #[test]
    fn examples() {
        assert_eq!(contention_factor(0.0, 10.0, &LINEAR).unwrap(), 1.0);
        assert_eq!(contention_factor(5.0, 10.0, &LINEAR).unwrap(), 2.0);
        let plateau = 1.0 / (1.0 - 0.95);
        assert_eq!(contention_factor(10.0, 10.0, &LINEAR).unwrap(), plateau);
        assert_eq!(contention_factor(1e6, 10.0, &LINEAR).unwrap(), plateau);
        let sq = ContentionParams {
            queueing_exponent: 2.0,
            ..LINEAR
        };
        assert_eq!(contention_factor(5.0, 10.0, &sq).unwrap(), 4.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(contention_factor(1.0, 0.0, &LINEAR).is_err());
        assert!(contention_factor(-1.0, 1.0, &LINEAR).is_err());
        assert!(contention_factor(
            1.0,
            1.0,
            &ContentionParams {
                rho_max: 1.0,
                ..LINEAR
            }
        )
        .is_err());
        assert!(contention_factor(
            1.0,
            1.0,
            &ContentionParams {
                queueing_exponent: 0.5,
                ..LINEAR
            }
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn monotone_and_bounded(a in 0.0f64..2e11, b in 0.0f64..2e11) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let flo = contention_factor(lo, 34e9, &LINEAR).unwrap();
            let fhi = contention_factor(hi, 34e9, &LINEAR).unwrap();
            prop_assert!(flo >= 1.0 && flo <= fhi);
            prop_assert!(fhi <= 1.0 / (1.0 - LINEAR.rho_max) + 1e-9);
        }
    }
}
