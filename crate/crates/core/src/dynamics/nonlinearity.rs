use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityKind {
    /// `f ≡ 0`.
    Zero,
    /// `f(y) = λ|y|^{p-1}y`.
    PowerOdd,
    /// `f(y) = λ·sin(y)`.
    BoundedLipschitz,
}

impl NonlinearityKind {
    pub fn name(&self) -> &'static str {
        match self {
            NonlinearityKind::Zero => "zero",
            NonlinearityKind::PowerOdd => "power_odd",
            NonlinearityKind::BoundedLipschitz => "bounded_lipschitz",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(NonlinearityKind::Zero),
            "power_odd" => Ok(NonlinearityKind::PowerOdd),
            "bounded_lipschitz" => Ok(NonlinearityKind::BoundedLipschitz),
            other => Err(invalid(format!("unknown nonlinearity kind '{other}'"))),
        }
    }
}

/// A reaction term with `f(0) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    pub kind: NonlinearityKind,
    pub lambda: f64,
    /// Exponent of `power_odd`; ignored by the other kinds.
    pub p: f64,
}

impl NonlinearitySpec {
    pub fn zero() -> Self {
        Self { kind: NonlinearityKind::Zero, lambda: 0.0, p: 1.0 }
    }

    pub fn power_odd(lambda: f64, p: f64) -> Result<Self> {
        let s = Self { kind: NonlinearityKind::PowerOdd, lambda, p };
        s.validate()?;
        Ok(s)
    }

    pub fn bounded_lipschitz(lambda: f64) -> Self {
        Self { kind: NonlinearityKind::BoundedLipschitz, lambda, p: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() {
            return Err(invalid("lambda must be finite"));
        }
        if self.kind == NonlinearityKind::PowerOdd && !(self.p > 1.0 && self.p.is_finite()) {
            return Err(invalid(format!("power_odd exponent p = {} must exceed 1", self.p)));
        }
        Ok(())
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Zero => 0.0,
            NonlinearityKind::PowerOdd => self.lambda * y.abs().powf(self.p - 1.0) * y,
            NonlinearityKind::BoundedLipschitz => self.lambda * y.sin(),
        }
    }

    pub fn derivative(&self, y: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Zero => 0.0,
            NonlinearityKind::PowerOdd => self.lambda * self.p * y.abs().powf(self.p - 1.0),
            NonlinearityKind::BoundedLipschitz => self.lambda * y.cos(),
        }
    }

    /// `L_M = sup_{|s|≤M} |f'(s)|`.
    pub fn lipschitz_on_ball(&self, m: f64) -> f64 {
        let m = m.max(0.0);
        match self.kind {
            NonlinearityKind::Zero => 0.0,
            NonlinearityKind::PowerOdd => self.lambda.abs() * self.p * m.powf(self.p - 1.0),
            NonlinearityKind::BoundedLipschitz => self.lambda.abs(),
        }
    }

    /// Constant `C` in `|f(a)-f(b)| ≤ C(|a|^{p-1}+|b|^{p-1})|a-b|`, for
    /// `power_odd` only.
    pub fn growth_constant(&self) -> Option<f64> {
        (self.kind == NonlinearityKind::PowerOdd).then(|| self.lambda.abs() * self.p)
    }

    /// Rejects `power_odd` exponents outside `p < 1 + 4/n`.
    pub fn check_subcritical(&self, n: usize) -> Result<()> {
        if self.kind != NonlinearityKind::PowerOdd {
            return Ok(());
        }
        let limit = 1.0 + 4.0 / n as f64;
        if self.p < limit {
            Ok(())
        } else {
            Err(Error::ExponentOutOfRange { p: self.p, limit })
        }
    }

    /// Flow of the pointwise ODE `y' = -f(y)` over time `t`. Power laws use
    /// the closed form and return `±∞` past the blow-up time.
    pub fn ode_flow(&self, y: f64, t: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Zero => y,
            NonlinearityKind::PowerOdd => {
                let q = self.p - 1.0;
                let base = 1.0 + q * self.lambda * y.abs().powf(q) * t;
                if base > 0.0 {
                    y * base.powf(-1.0 / q)
                } else {
                    f64::INFINITY.copysign(y)
                }
            }
            _ => {
                let stiff = self.lipschitz_on_ball(y.abs()) * t;
                let steps = ((stiff / 0.01).ceil() as usize).clamp(4, 100_000);
                let h = t / steps as f64;
                let rhs = |v: f64| -self.eval(v);
                let mut v = y;
                for _ in 0..steps {
                    let k1 = rhs(v);
                    let k2 = rhs(v + 0.5 * h * k1);
                    let k3 = rhs(v + 0.5 * h * k2);
                    let k4 = rhs(v + h * k3);
                    v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                }
                v
            }
        }
    }
}
