//! Closed-form reference solutions for the verification cases.

use thiserror::Error;

use crate::geometry::Vec2;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("unknown exact solution '{0}'")]
    UnknownSolution(String),
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
}

/// Physical constants of the flow problems.
#[derive(Clone, Copy, Debug)]
pub struct FluidParams {
    pub rho: f64,
    pub nu: f64,
    pub kappa: f64,
    pub beta: f64,
    /// Gravity magnitude, acting along -y.
    pub g: f64,
}

impl Default for FluidParams {
    fn default() -> Self {
        Self {
            rho: 1.0,
            nu: 1.0,
            kappa: 0.0,
            beta: 0.0,
            g: 0.0,
        }
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        x0: 0.0,
        y0: 0.0,
        x1: 1.0,
        y1: 1.0,
    };

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

/// Parameters of the traveling-wave references, `xi = a x + b y + c t`.
#[derive(Clone, Copy, Debug)]
pub struct TravelParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub w: f64,
    pub u1: f64,
    pub theta1: f64,
    pub x0: f64,
}

impl TravelParams {
    pub fn lambda(&self) -> f64 {
        (self.c + self.w) / (self.a * self.a + self.b * self.b)
    }

    fn validate(&self) -> Result<(), ExactError> {
        if self.b == 0.0 {
            return Err(ExactError::ConstraintViolation("b must be nonzero".into()));
        }
        if self.w == -self.c {
            return Err(ExactError::ConstraintViolation("w must differ from -c".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum ExactSolution {
    /// `u = x^2 + y^2`, so `-lap u = -4`.
    PoissonQuadratic,
    /// Harmonic `u = sin(pi x) sinh(pi y)`, zero right-hand side.
    PoissonSinSinh,
    /// Plane channel flow `u = (U 4 y (1 - y), 0)` on the unit square.
    Poiseuille { u_max: f64, params: FluidParams },
    /// Steady vortex `u = (-cos x sin y, sin x cos y)` on `[-pi, pi]^2`,
    /// held steady by the body force `2 nu u`.
    TaylorGreen { params: FluidParams },
    /// Anisothermal traveling wave, distinct diffusivities.
    TravelingWave {
        params: FluidParams,
        wave: TravelParams,
        domain: Rect,
    },
    /// Anisothermal traveling wave in the resonant case `nu = kappa`.
    TravelingWaveEqualDiff {
        params: FluidParams,
        wave: TravelParams,
        domain: Rect,
    },
}

impl ExactSolution {
    /// Construct from the catalogue token with the reference constants.
    pub fn by_name(name: &str) -> Result<Self, ExactError> {
        match name {
            "poisson-quadratic" => Ok(ExactSolution::PoissonQuadratic),
            "poisson-sinsinh" => Ok(ExactSolution::PoissonSinSinh),
            "poiseuille" => Ok(ExactSolution::Poiseuille {
                u_max: 1.0,
                params: FluidParams {
                    rho: 1.0,
                    nu: 1.0,
                    kappa: 0.0,
                    beta: 0.0,
                    g: 0.0,
                },
            }),
            "taylor-green" => Ok(ExactSolution::TaylorGreen {
                params: FluidParams {
                    rho: 1.0,
                    nu: 1.0,
                    kappa: 0.0,
                    beta: 0.0,
                    g: 0.0,
                },
            }),
            "travel-nu-ne-kappa" => {
                let wave = TravelParams {
                    a: 1.0,
                    b: 1.0,
                    c: -1.0,
                    w: 2.0,
                    u1: 2.0 * (-5.0_f64).exp(),
                    theta1: (-5.0_f64).exp(),
                    x0: 0.0,
                };
                wave.validate()?;
                Ok(ExactSolution::TravelingWave {
                    params: FluidParams {
                        rho: 1.0,
                        nu: 0.2,
                        kappa: 0.1,
                        beta: 1.0,
                        g: 10.0,
                    },
                    wave,
                    domain: Rect {
                        x0: -0.5,
                        y0: -0.5,
                        x1: 0.5,
                        y1: 0.5,
                    },
                })
            }
            "travel-nu-eq-kappa" => {
                let wave = TravelParams {
                    a: 1.0,
                    b: 1.0,
                    c: -1.0,
                    w: 0.0,
                    u1: 0.0,
                    theta1: (-5.0_f64).exp(),
                    x0: 0.5,
                };
                wave.validate()?;
                Ok(ExactSolution::TravelingWaveEqualDiff {
                    params: FluidParams {
                        rho: 1.0,
                        nu: 0.1,
                        kappa: 0.1,
                        beta: 1.0,
                        g: 10.0,
                    },
                    wave,
                    domain: Rect {
                        x0: 0.0,
                        y0: -0.5,
                        x1: 1.0,
                        y1: 0.5,
                    },
                })
            }
            other => Err(ExactError::UnknownSolution(other.to_string())),
        }
    }

    pub fn fluid_params(&self) -> FluidParams {
        match self {
            ExactSolution::PoissonQuadratic | ExactSolution::PoissonSinSinh => FluidParams::default(),
            ExactSolution::Poiseuille { params, .. }
            | ExactSolution::TaylorGreen { params }
            | ExactSolution::TravelingWave { params, .. }
            | ExactSolution::TravelingWaveEqualDiff { params, .. } => *params,
        }
    }

    pub fn domain(&self) -> Rect {
        match self {
            ExactSolution::PoissonQuadratic | ExactSolution::PoissonSinSinh => Rect::UNIT,
            ExactSolution::Poiseuille { .. } => Rect::UNIT,
            ExactSolution::TaylorGreen { .. } => Rect {
                x0: -std::f64::consts::PI,
                y0: -std::f64::consts::PI,
                x1: std::f64::consts::PI,
                y1: std::f64::consts::PI,
            },
            ExactSolution::TravelingWave { domain, .. }
            | ExactSolution::TravelingWaveEqualDiff { domain, .. } => *domain,
        }
    }

    /// Reference end time for the traveling waves, from `|lambda c| T / kappa = 1`.
    pub fn reference_end_time(&self) -> Option<f64> {
        match self {
            ExactSolution::TravelingWave { params, wave, .. }
            | ExactSolution::TravelingWaveEqualDiff { params, wave, .. } => {
                Some(params.kappa / (wave.lambda() * wave.c).abs())
            }
            _ => None,
        }
    }

    /// Scalar potential for Poisson cases.
    pub fn poisson_u(&self, p: Vec2) -> f64 {
        match self {
            ExactSolution::PoissonQuadratic => p.x * p.x + p.y * p.y,
            ExactSolution::PoissonSinSinh => {
                (std::f64::consts::PI * p.x).sin() * (std::f64::consts::PI * p.y).sinh()
            }
            _ => panic!("not a Poisson reference"),
        }
    }

    /// Right-hand side of `-lap u = f` for Poisson cases.
    pub fn poisson_f(&self, _p: Vec2) -> f64 {
        match self {
            ExactSolution::PoissonQuadratic => -4.0,
            ExactSolution::PoissonSinSinh => 0.0,
            _ => panic!("not a Poisson reference"),
        }
    }

    pub fn psi(&self, p: Vec2, t: f64) -> f64 {
        match self {
            ExactSolution::Poiseuille { u_max, .. } => {
                u_max * (2.0 * p.y * p.y - 4.0 * p.y * p.y * p.y / 3.0)
            }
            ExactSolution::TaylorGreen { .. } => p.x.cos() * p.y.cos(),
            ExactSolution::TravelingWave { params, wave, .. } => {
                let xi = wave.a * p.x + wave.b * p.y + wave.c * t;
                let lam = wave.lambda();
                let g2 = self.travel_g2();
                (params.nu * wave.u1 / (lam * wave.b)) * (lam * xi / params.nu).exp()
                    + (params.kappa * g2 * wave.theta1 / (lam * wave.b))
                        * (lam * xi / params.kappa).exp()
                    - (wave.w / wave.b) * p.x
            }
            ExactSolution::TravelingWaveEqualDiff { params, wave, .. } => {
                let xi = wave.a * p.x + wave.b * p.y + wave.c * t;
                let lam = wave.lambda();
                let mu = lam / params.kappa;
                let cc = self.travel_c_eq();
                (cc / wave.b) * (mu * xi).exp() * ((wave.x0 - xi) / mu + 1.0 / (mu * mu))
                    - (wave.w / wave.b) * p.x
            }
            _ => panic!("not a flow reference"),
        }
    }

    pub fn theta(&self, p: Vec2, t: f64) -> f64 {
        match self {
            ExactSolution::TravelingWave { params, wave, .. }
            | ExactSolution::TravelingWaveEqualDiff { params, wave, .. } => {
                let xi = wave.a * p.x + wave.b * p.y + wave.c * t;
                wave.theta1 * (wave.lambda() * xi / params.kappa).exp()
            }
            _ => 0.0,
        }
    }

    pub fn velocity(&self, p: Vec2, t: f64) -> Vec2 {
        match self {
            ExactSolution::Poiseuille { u_max, .. } => {
                Vec2::new(u_max * 4.0 * p.y * (1.0 - p.y), 0.0)
            }
            ExactSolution::TaylorGreen { .. } => {
                Vec2::new(-p.x.cos() * p.y.sin(), p.x.sin() * p.y.cos())
            }
            ExactSolution::TravelingWave { params, wave, .. } => {
                let xi = wave.a * p.x + wave.b * p.y + wave.c * t;
                let lam = wave.lambda();
                let ux = wave.u1 * (lam * xi / params.nu).exp()
                    + self.travel_g2() * wave.theta1 * (lam * xi / params.kappa).exp();
                Vec2::new(ux, (wave.w - wave.a * ux) / wave.b)
            }
            ExactSolution::TravelingWaveEqualDiff { params, wave, .. } => {
                let xi = wave.a * p.x + wave.b * p.y + wave.c * t;
                let lam = wave.lambda();
                let ux = self.travel_c_eq() * (wave.x0 - xi) * (lam * xi / params.kappa).exp();
                Vec2::new(ux, (wave.w - wave.a * ux) / wave.b)
            }
            _ => panic!("not a flow reference"),
        }
    }

    /// Body force held by the steady Taylor-Green vortex (`f = 2 nu u`);
    /// zero for the other references.
    pub fn body_force(&self, p: Vec2, t: f64) -> Option<Vec2> {
        match self {
            ExactSolution::TaylorGreen { params } => Some(self.velocity(p, t) * (2.0 * params.nu)),
            _ => None,
        }
    }

    /// Whether the case is marched to steady state (otherwise to a fixed time).
    pub fn is_steady(&self) -> bool {
        matches!(
            self,
            ExactSolution::Poiseuille { .. } | ExactSolution::TaylorGreen { .. }
        )
    }

    pub fn has_temperature(&self) -> bool {
        matches!(
            self,
            ExactSolution::TravelingWave { .. } | ExactSolution::TravelingWaveEqualDiff { .. }
        )
    }

    /// Coupling constant of the second mode in the `nu != kappa` wave.
    fn travel_g2(&self) -> f64 {
        match self {
            ExactSolution::TravelingWave { params, wave, .. } => {
                params.kappa * params.kappa * params.beta * wave.a * wave.b * params.g
                    / ((wave.c + wave.w) * (wave.c + wave.w) * (params.kappa - params.nu))
            }
            _ => unreachable!(),
        }
    }

    /// Amplitude of the resonant mode in the `nu = kappa` wave.
    fn travel_c_eq(&self) -> f64 {
        match self {
            ExactSolution::TravelingWaveEqualDiff { params, wave, .. } => {
                params.beta * wave.a * wave.b * params.g * wave.theta1
                    / ((wave.c + wave.w) * (wave.a * wave.a + wave.b * wave.b))
            }
            _ => unreachable!(),
        }
    }
}
