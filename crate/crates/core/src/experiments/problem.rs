use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::fem::Operator1D;

/// Differential operators available to experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OperatorChoice {
    /// `-u''` on `(0, 1)` with zero boundary values.
    #[default]
    Poisson,
}

impl OperatorChoice {
    pub fn build(self) -> Operator1D {
        match self {
            OperatorChoice::Poisson => Operator1D::poisson(),
        }
    }
}

/// Closed-form source / solution pairs for `-u'' = f_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    /// `u_t = sin(πx)/5 + sin(7πx)/50`.
    #[default]
    TwoMode,
    /// `u_t = sin(πx)/π²`.
    SingleMode,
}

impl Truth {
    pub fn source(self, x: f64) -> f64 {
        match self {
            Truth::TwoMode => {
                PI * PI / 5.0 * (PI * x).sin() + 49.0 * PI * PI / 50.0 * (7.0 * PI * x).sin()
            }
            Truth::SingleMode => (PI * x).sin(),
        }
    }

    pub fn solution(self, x: f64) -> f64 {
        match self {
            Truth::TwoMode => (PI * x).sin() / 5.0 + (7.0 * PI * x).sin() / 50.0,
            Truth::SingleMode => (PI * x).sin() / (PI * PI),
        }
    }
}
