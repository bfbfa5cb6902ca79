//! Target functions on `[0,1]^2`: the named corpus and parsed expressions.

use std::f64::consts::PI;
use std::fmt;

use crate::convergence::LipschitzSpec;
use crate::error::{Error, Result};
use crate::expr::{EvalError, Expr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Const1,
    LinX,
    LinY,
    ProdXY,
    Quad,
    Ripple,
    Vee,
    LipHalf,
}

impl Builtin {
    pub const ALL: [Builtin; 8] = [
        Builtin::Const1,
        Builtin::LinX,
        Builtin::LinY,
        Builtin::ProdXY,
        Builtin::Quad,
        Builtin::Ripple,
        Builtin::Vee,
        Builtin::LipHalf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Const1 => "const1",
            Builtin::LinX => "linx",
            Builtin::LinY => "liny",
            Builtin::ProdXY => "prodxy",
            Builtin::Quad => "quad",
            Builtin::Ripple => "ripple",
            Builtin::Vee => "vee",
            Builtin::LipHalf => "lip_half",
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            Builtin::Const1 => "1",
            Builtin::LinX => "x",
            Builtin::LinY => "y",
            Builtin::ProdXY => "x*y",
            Builtin::Quad => "x^2+y^2",
            Builtin::Ripple => "sin(pi*x)*sin(pi*y)",
            Builtin::Vee => "abs(x-0.5)+abs(y-0.5)",
            Builtin::LipHalf => "sqrt(abs(x-0.5))*sqrt(abs(y-0.5))",
        }
    }

    fn eval(self, x: f64, y: f64) -> f64 {
        match self {
            Builtin::Const1 => 1.0,
            Builtin::LinX => x,
            Builtin::LinY => y,
            Builtin::ProdXY => x * y,
            Builtin::Quad => x * x + y * y,
            Builtin::Ripple => (PI * x).sin() * (PI * y).sin(),
            Builtin::Vee => (x - 0.5).abs() + (y - 0.5).abs(),
            Builtin::LipHalf => ((x - 0.5).abs() * (y - 0.5).abs()).sqrt(),
        }
    }

    fn gradient(self, x: f64, y: f64) -> Option<(f64, f64)> {
        Some(match self {
            Builtin::Const1 => (0.0, 0.0),
            Builtin::LinX => (1.0, 0.0),
            Builtin::LinY => (0.0, 1.0),
            Builtin::ProdXY => (y, x),
            Builtin::Quad => (2.0 * x, 2.0 * y),
            Builtin::Ripple => (
                PI * (PI * x).cos() * (PI * y).sin(),
                PI * (PI * x).sin() * (PI * y).cos(),
            ),
            Builtin::Vee | Builtin::LipHalf => return None,
        })
    }

    fn second_partials(self, x: f64, y: f64) -> Option<SecondPartials> {
        let zero = SecondPartials {
            xx: 0.0,
            yy: 0.0,
            xy: 0.0,
        };
        Some(match self {
            Builtin::Const1 | Builtin::LinX | Builtin::LinY => zero,
            Builtin::ProdXY => SecondPartials { xy: 1.0, ..zero },
            Builtin::Quad => SecondPartials {
                xx: 2.0,
                yy: 2.0,
                xy: 0.0,
            },
            Builtin::Ripple => {
                let v = self.eval(x, y);
                SecondPartials {
                    xx: -PI * PI * v,
                    yy: -PI * PI * v,
                    xy: PI * PI * (PI * x).cos() * (PI * y).cos(),
                }
            }
            Builtin::Vee | Builtin::LipHalf => return None,
        })
    }

    fn lipschitz(self) -> Option<LipschitzSpec> {
        match self {
            Builtin::Const1 => Some(LipschitzSpec {
                m: 1.0,
                alpha1: 1.0,
                alpha2: 1.0,
            }),
            Builtin::LipHalf => Some(LipschitzSpec {
                m: 1.0,
                alpha1: 0.5,
                alpha2: 0.5,
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondPartials {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

#[derive(Debug, Clone)]
enum Source {
    Builtin(Builtin),
    Expr(Expr),
}

#[derive(Debug, Clone)]
pub struct TargetFunction {
    name: String,
    source: Source,
}

impl TargetFunction {
    pub fn builtin(b: Builtin) -> Self {
        Self {
            name: b.name().to_string(),
            source: Source::Builtin(b),
        }
    }

    pub fn corpus() -> Vec<Self> {
        Builtin::ALL.into_iter().map(Self::builtin).collect()
    }

    pub fn by_name(name: &str) -> Option<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .map(Self::builtin)
    }

    pub fn from_expr(text: &str) -> Result<Self> {
        let expr = Expr::parse(text)?;
        Ok(Self {
            name: text.trim().to_string(),
            source: Source::Expr(expr),
        })
    }

    /// A corpus name, or else an expression in `x` and `y`.
    pub fn resolve(spec: &str) -> Result<Self> {
        match Self::by_name(spec.trim()) {
            Some(f) => Ok(f),
            None => Self::from_expr(spec),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn as_builtin(&self) -> Option<Builtin> {
        match self.source {
            Source::Builtin(b) => Some(b),
            Source::Expr(_) => None,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        match &self.source {
            Source::Builtin(b) => Ok(b.eval(x, y)),
            Source::Expr(e) => e.eval(x, y),
        }
    }

    /// Analytic gradient, when registered.
    pub fn gradient(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        self.as_builtin().and_then(|b| b.gradient(x, y))
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient(0.5, 0.5).is_some()
    }

    /// Analytic second partials, when registered.
    pub fn second_partials(&self, x: f64, y: f64) -> Option<SecondPartials> {
        self.as_builtin().and_then(|b| b.second_partials(x, y))
    }

    pub fn has_second_partials(&self) -> bool {
        self.second_partials(0.5, 0.5).is_some()
    }

    /// Registered Lipschitz constants, if the function claims membership.
    pub fn lipschitz_claim(&self) -> Option<LipschitzSpec> {
        self.as_builtin().and_then(Builtin::lipschitz)
    }

    /// Central-difference second partials with step `h`, stencils shifted
    /// inward near the boundary.
    pub fn fd_second_partials(&self, x: f64, y: f64, h: f64) -> Result<SecondPartials> {
        if !(h > 0.0 && h < 0.25) {
            return Err(Error::param(format!(
                "finite-difference step {h} outside (0, 0.25)"
            )));
        }
        let cx = x.clamp(h, 1.0 - h);
        let cy = y.clamp(h, 1.0 - h);
        let f = |a: f64, b: f64| self.eval(a, b);
        let c = f(cx, cy)?;
        let xx = (f(cx + h, cy)? - 2.0 * c + f(cx - h, cy)?) / (h * h);
        let yy = (f(cx, cy + h)? - 2.0 * c + f(cx, cy - h)?) / (h * h);
        let xy = (f(cx + h, cy + h)? - f(cx + h, cy - h)? - f(cx - h, cy + h)?
            + f(cx - h, cy - h)?)
            / (4.0 * h * h);
        Ok(SecondPartials { xx, yy, xy })
    }

    /// Central-difference gradient with the same inward shift.
    pub fn fd_gradient(&self, x: f64, y: f64, h: f64) -> Result<(f64, f64)> {
        let cx = x.clamp(h, 1.0 - h);
        let cy = y.clamp(h, 1.0 - h);
        let gx = (self.eval(cx + h, y)? - self.eval(cx - h, y)?) / (2.0 * h);
        let gy = (self.eval(x, cy + h)? - self.eval(x, cy - h)?) / (2.0 * h);
        Ok((gx, gy))
    }
}

impl fmt::Display for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
