use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient printed in the headland-width formula.
pub const STATED_COEFFICIENT: f64 = 1.85;
/// Coefficient that reproduces the 143.17 cm reference width.
pub const REPORTED_COEFFICIENT: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadlandRequirement {
    pub w_h_min: f64,
    pub coefficient: f64,
    pub l_robot: f64,
    pub e_abc_max: f64,
}

/// `W = (1 + R) L + E` with `R` the GNSS offset over robot length.
pub fn headland_requirement(l_robot: f64, e_abc_max: f64, gnss_ratio: f64) -> Result<HeadlandRequirement> {
    if !(gnss_ratio >= 0.0) {
        return Err(Error::Argument("gnss ratio must be non-negative".into()));
    }
    with_coefficient(l_robot, e_abc_max, 1.0 + gnss_ratio)
}

pub fn with_coefficient(l_robot: f64, e_abc_max: f64, coefficient: f64) -> Result<HeadlandRequirement> {
    if !(l_robot > 0.0 && e_abc_max > 0.0 && coefficient > 0.0) {
        return Err(Error::Argument("robot length, exit error and coefficient must be positive".into()));
    }
    Ok(HeadlandRequirement {
        w_h_min: coefficient * l_robot + e_abc_max,
        coefficient,
        l_robot,
        e_abc_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_ratio_is_length_plus_error() {
        let h = headland_requirement(0.5, 0.2, 0.0).unwrap();
        assert_eq!(h.w_h_min, 0.7);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(headland_requirement(0.0, 0.2, 0.5).is_err());
        assert!(headland_requirement(0.5, -0.2, 0.5).is_err());
        assert!(headland_requirement(0.5, 0.2, -0.5).is_err());
    }
}
