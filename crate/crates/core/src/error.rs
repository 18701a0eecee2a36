use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("contour is not closed: endpoint gap {gap} exceeds tolerance {tolerance}")]
    NotClosed { gap: f64, tolerance: f64 },

    #[error("contour self-intersects near t = {t1} and t = {t2}")]
    NonSimple { t1: f64, t2: f64 },

    #[error("contour orientation is clockwise; regions require counterclockwise boundaries")]
    OrientationError,

    #[error("evaluation point ({re}, {im}) lies on the contour (distance {dist} below tolerance)")]
    PointOnContour { re: f64, im: f64, dist: f64 },

    #[error("deformation crosses the exclusion zone of a singular point ({re}, {im})")]
    SingularityCrossed { re: f64, im: f64 },

    #[error("propagator kernel evaluated at coincident points")]
    Coincident,

    #[error("light-cone denominator modulus {modulus} below tolerance")]
    LightConeSingularity { modulus: f64 },

    #[error("chart point |z| = {modulus} exceeds chart radius bound {max}")]
    ChartOverflow { modulus: f64, max: f64 },

    #[error("unsupported group specification: {0}")]
    UnsupportedGroup(String),

    #[error("sum of squared basis elements deviates from a scalar matrix by {deviation}")]
    NotScalar { deviation: f64 },

    #[error("pairs do not form a perfect matching of {{1..2n}}: {0}")]
    BadMatching(String),

    #[error("order {requested} exceeds cap {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("diagram list is not a complete enumeration for its order")]
    InconsistentInput,

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("contour is not a chart-origin-centered circle")]
    NotACircle,

    #[error("surface density is not rotationally symmetric about the circle center")]
    NotSymmetricDensity,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("spec parse error: {0}")]
    Spec(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
