//! Closed-form runtime constants and leading-order round predictions.
//!
//! All logarithms are natural; `log_b n` is written out as `ln n / ln b`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::{check_q, Protocol};
use crate::error::{Error, Result};
use crate::graph::Family;

/// `c_P(q)`: `T_P ≈ c_P(q)·ln n` on expander sequences.
///
/// At `q = 1` the analytic limits are returned; the pull/pp second addends
/// vanish there because `−1/ln(1−q) → 0`.
pub fn protocol_constant(protocol: Protocol, q: f64) -> Result<f64> {
    check_q(q)?;
    let ln2 = std::f64::consts::LN_2;
    if q == 1.0 {
        return Ok(match protocol {
            Protocol::Push => 1.0 + 1.0 / ln2,
            Protocol::Pull => 1.0 / ln2,
            Protocol::Pp => 1.0 / 3f64.ln(),
        });
    }
    let growth = 1.0 / q.ln_1p();
    Ok(match protocol {
        Protocol::Push => growth + 1.0 / q,
        Protocol::Pull => growth - 1.0 / (-q).ln_1p(),
        Protocol::Pp => 1.0 / (2.0 * q).ln_1p() + 1.0 / (q - (-q).ln_1p()),
    })
}

/// Expected one-round growth matrix of `(|I ∩ A|, |I ∩ B|)` for push&pull
/// on the pp-adversary graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoBlockMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
}

impl TwoBlockMatrix {
    pub fn m21(&self) -> f64 {
        self.m12
    }

    /// Largest eigenvalue via the 2×2 characteristic polynomial.
    pub fn top_eigenvalue(&self) -> f64 {
        let mean = 0.5 * (self.m11 + self.m22);
        let half_gap = 0.5 * (self.m11 - self.m22);
        mean + half_gap.hypot(self.m12)
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        [
            self.m11 * x[0] + self.m12 * x[1],
            self.m12 * x[0] + self.m22 * x[1],
        ]
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..0.5).contains(&eps) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("eps must lie in [0, 1/2), got {eps}")))
    }
}

/// `ε = 0` is accepted and gives the formal limit `[[1+q, q], [q, 1+q]]`.
pub fn two_block_matrix(eps: f64, q: f64) -> Result<TwoBlockMatrix> {
    check_eps(eps)?;
    check_q(q)?;
    let tilt = eps / (2.0 - 2.0 * eps);
    Ok(TwoBlockMatrix {
        m11: 1.0 + q,
        m12: q * (1.0 + tilt),
        m22: 1.0 + q * (1.0 - 2.0 * tilt),
    })
}

/// Closed form of the top eigenvalue of [`two_block_matrix`]:
/// `1 + 2q + (2q(√(ε²/2 − ε + 1) − 1) + qε)/(2 − 2ε)`.
pub fn lambda_max_pp(eps: f64, q: f64) -> Result<f64> {
    check_eps(eps)?;
    check_q(q)?;
    let radical = (eps * eps / 2.0 - eps + 1.0).sqrt();
    Ok(1.0 + 2.0 * q + (2.0 * q * (radical - 1.0) + q * eps) / (2.0 - 2.0 * eps))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictionKind {
    Constant,
    Rounds,
}

/// Which closed form produced a prediction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaId {
    /// `c_P(q)·ln n` on complete graphs and expanders.
    ExpanderRuntime,
    /// `(c_push(q) + ε/(2q))·ln n`, a lower bound on the push adversary.
    PushAdversaryLowerBound,
    /// `ln n/ln λ_max + ln n/(q(1−1.5ε)/(1−ε) − ln(1−q))`.
    PpAdversaryRuntime,
    /// `ln n / ln(1+q)`: rounds to reach `n − n/ln n` informed under push.
    PushThreshold,
    /// `ln n / ln(1+2q)`: upper bound for the same threshold under pp.
    PpThreshold,
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = serde_json::to_value(self).expect("unit enum serialises");
        f.write_str(text.as_str().unwrap_or_default())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction {
    pub kind: PredictionKind,
    pub value: f64,
    pub formula_id: FormulaId,
    pub protocol: Protocol,
    pub q: f64,
    pub n: Option<f64>,
    pub eps: Option<f64>,
}

/// Leading-order prediction of the full runtime `T` for `n` vertices.
///
/// `n` is real so that exact powers of `e` can be probed.
pub fn predict_rounds(family: &Family, protocol: Protocol, n: f64, q: f64) -> Result<TheoryPrediction> {
    check_q(q)?;
    if n.is_nan() || n < 2.0 {
        return Err(Error::OutOfRange(format!("n must be at least 2, got {n}")));
    }
    let ln_n = n.ln();
    let prediction = |value, formula_id, eps| TheoryPrediction {
        kind: PredictionKind::Rounds,
        value,
        formula_id,
        protocol,
        q,
        n: Some(n),
        eps,
    };
    match (family, protocol) {
        (Family::Complete | Family::Regular { .. } | Family::Gnp { .. }, _) => Ok(prediction(
            protocol_constant(protocol, q)? * ln_n,
            FormulaId::ExpanderRuntime,
            None,
        )),
        (Family::PushAdversary { eps }, Protocol::Push) => {
            check_eps(*eps)?;
            let c = protocol_constant(Protocol::Push, q)? + eps / (2.0 * q);
            Ok(prediction(c * ln_n, FormulaId::PushAdversaryLowerBound, Some(*eps)))
        }
        (Family::PpAdversary { eps }, Protocol::Pp) if q < 1.0 => {
            let lambda = lambda_max_pp(*eps, q)?;
            let tail_rate = q * (1.0 - 1.5 * eps) / (1.0 - eps) - (-q).ln_1p();
            Ok(prediction(
                ln_n / lambda.ln() + ln_n / tail_rate,
                FormulaId::PpAdversaryRuntime,
                Some(*eps),
            ))
        }
        (family, protocol) => Err(Error::Unsupported(format!(
            "no runtime formula for {protocol} on {family} with q = {q}"
        ))),
    }
}

/// Rounds until at least `n − n/ln n` vertices are informed.
pub fn predict_tilde_rounds(protocol: Protocol, n: f64, q: f64) -> Result<TheoryPrediction> {
    check_q(q)?;
    if n.is_nan() || n < 2.0 {
        return Err(Error::OutOfRange(format!("n must be at least 2, got {n}")));
    }
    let (base, formula_id) = match protocol {
        Protocol::Push => (1.0 + q, FormulaId::PushThreshold),
        Protocol::Pp => (1.0 + 2.0 * q, FormulaId::PpThreshold),
        Protocol::Pull => {
            return Err(Error::Unsupported("no threshold formula for pull".into()));
        }
    };
    Ok(TheoryPrediction {
        kind: PredictionKind::Rounds,
        value: n.ln() / base.ln(),
        formula_id,
        protocol,
        q,
        n: Some(n),
        eps: None,
    })
}

/// `c_P(q)` wrapped as a prediction record.
pub fn constant_prediction(protocol: Protocol, q: f64) -> Result<TheoryPrediction> {
    Ok(TheoryPrediction {
        kind: PredictionKind::Constant,
        value: protocol_constant(protocol, q)?,
        formula_id: FormulaId::ExpanderRuntime,
        protocol,
        q,
        n: None,
        eps: None,
    })
}
