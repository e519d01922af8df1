use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rotation angle, either a constant or an expression over parameter slots.
///
/// The serialized form is an object tagged by `"expr"`, e.g.
/// `{"expr":"scale","factor":2.0,"inner":{"expr":"var","index":1}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "expr", rename_all = "snake_case", deny_unknown_fields)]
pub enum AngleExpr {
    Const {
        value: f64,
    },
    Var {
        index: usize,
    },
    Scale {
        factor: f64,
        inner: Box<AngleExpr>,
    },
    Sum {
        terms: Vec<AngleExpr>,
    },
    Product {
        terms: Vec<AngleExpr>,
    },
    /// `π - params[index]`
    PiMinusVar {
        index: usize,
    },
}

impl AngleExpr {
    pub fn constant(value: f64) -> Self {
        AngleExpr::Const { value }
    }

    pub fn var(index: usize) -> Self {
        AngleExpr::Var { index }
    }

    pub fn pi_minus_var(index: usize) -> Self {
        AngleExpr::PiMinusVar { index }
    }

    pub fn scale(factor: f64, inner: AngleExpr) -> Self {
        AngleExpr::Scale {
            factor,
            inner: Box::new(inner),
        }
    }

    pub fn sum(terms: Vec<AngleExpr>) -> Self {
        AngleExpr::Sum { terms }
    }

    pub fn product(terms: Vec<AngleExpr>) -> Self {
        AngleExpr::Product { terms }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, AngleExpr::Const { .. })
    }

    /// Largest parameter slot referenced, if any.
    pub fn max_slot(&self) -> Option<usize> {
        match self {
            AngleExpr::Const { .. } => None,
            AngleExpr::Var { index } | AngleExpr::PiMinusVar { index } => Some(*index),
            AngleExpr::Scale { inner, .. } => inner.max_slot(),
            AngleExpr::Sum { terms } | AngleExpr::Product { terms } => {
                terms.iter().filter_map(AngleExpr::max_slot).max()
            }
        }
    }

    /// Evaluates the expression. Empty sums are 0 and empty products are 1.
    pub fn eval(&self, params: &[f64]) -> Result<f64> {
        let slot = |index: usize| {
            params.get(index).copied().ok_or_else(|| {
                Error::invalid(format!(
                    "parameter slot {index} out of range for {} values",
                    params.len()
                ))
            })
        };
        Ok(match self {
            AngleExpr::Const { value } => *value,
            AngleExpr::Var { index } => slot(*index)?,
            AngleExpr::PiMinusVar { index } => PI - slot(*index)?,
            AngleExpr::Scale { factor, inner } => factor * inner.eval(params)?,
            AngleExpr::Sum { terms } => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.eval(params)?;
                }
                acc
            }
            AngleExpr::Product { terms } => {
                let mut acc = 1.0;
                for t in terms {
                    acc *= t.eval(params)?;
                }
                acc
            }
        })
    }

    /// Rewrites every slot index `i` as `i + offset`.
    pub fn shift_slots(&self, offset: usize) -> Self {
        match self {
            AngleExpr::Const { value } => AngleExpr::Const { value: *value },
            AngleExpr::Var { index } => AngleExpr::Var {
                index: index + offset,
            },
            AngleExpr::PiMinusVar { index } => AngleExpr::PiMinusVar {
                index: index + offset,
            },
            AngleExpr::Scale { factor, inner } => {
                AngleExpr::scale(*factor, inner.shift_slots(offset))
            }
            AngleExpr::Sum { terms } => {
                AngleExpr::sum(terms.iter().map(|t| t.shift_slots(offset)).collect())
            }
            AngleExpr::Product { terms } => {
                AngleExpr::product(terms.iter().map(|t| t.shift_slots(offset)).collect())
            }
        }
    }
}

impl From<f64> for AngleExpr {
    fn from(value: f64) -> Self {
        AngleExpr::Const { value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zz_pair_angle_vanishes_at_pi() {
        let e = AngleExpr::scale(
            2.0,
            AngleExpr::product(vec![AngleExpr::pi_minus_var(0), AngleExpr::pi_minus_var(1)]),
        );
        assert_eq!(e.eval(&[PI, PI]).unwrap(), 0.0);
        assert!((e.eval(&[0.0, PI - 1.0]).unwrap() - 2.0 * PI).abs() < 1e-15);
        assert_eq!(e.max_slot(), Some(1));
    }

    #[test]
    fn out_of_range_slot_is_rejected() {
        assert!(AngleExpr::var(3).eval(&[0.0; 3]).is_err());
    }

    #[test]
    fn shift_moves_every_slot() {
        let e = AngleExpr::sum(vec![
            AngleExpr::var(0),
            AngleExpr::pi_minus_var(2),
            1.5.into(),
        ]);
        let s = e.shift_slots(3);
        assert_eq!(s.max_slot(), Some(5));
        let p = [0.0, 0.0, 0.0, 0.25, 0.0, 0.5];
        assert!((s.eval(&p).unwrap() - (0.25 + PI - 0.5 + 1.5)).abs() < 1e-15);
    }

    #[test]
    fn json_form_is_tagged() {
        let e = AngleExpr::scale(2.0, AngleExpr::var(1));
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(
            s,
            r#"{"expr":"scale","factor":2.0,"inner":{"expr":"var","index":1}}"#
        );
    }
}
