use std::fmt;
use std::sync::Arc;

/// A material coefficient, constant or varying in space. 1D fields ignore `y`.
#[derive(Clone)]
pub enum Profile {
    Constant(f64),
    Varying(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl Profile {
    pub fn varying(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Profile::Varying(Arc::new(f))
    }

    pub fn at(&self, x: f64, y: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Varying(f) => f(x, y),
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            Profile::Constant(c) => Some(*c),
            Profile::Varying(_) => None,
        }
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(c) => write!(f, "Constant({c})"),
            Profile::Varying(_) => f.write_str("Varying(..)"),
        }
    }
}

impl From<f64> for Profile {
    fn from(c: f64) -> Self {
        Profile::Constant(c)
    }
}
