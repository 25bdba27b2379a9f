//! Binary Shannon entropy.

use crate::error::{Error, Result};

/// h(x) = -x log2(x) - (1-x) log2(1-x), extended continuously so that
/// h(0) = h(1) = 0.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain {
            name: "x",
            value: x,
            domain: "[0, 1]",
        });
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // h(0.11) = 0.4999159581645280, so 1 - 2h(0.11) is nearly zero
        assert!((binary_entropy(0.11).unwrap() - 0.49993).abs() < 1e-4);
        assert!((binary_entropy(0.11).unwrap() - 0.499_915_958_164_528).abs() < 1e-12);
    }

    #[test]
    fn symmetric() {
        for x in [0.01, 0.11, 0.3, 0.49] {
            let a = binary_entropy(x).unwrap();
            let b = binary_entropy(1.0 - x).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }
}
