use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator index {index} out of range for a table of {count} generators")]
    GeneratorOutOfRange { index: usize, count: usize },
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("empty generator list")]
    EmptyGeneratorList,
    #[error("invalid generator name `{0}`")]
    BadGeneratorName(String),
    #[error("peripheral words must be nonempty")]
    EmptyPeripheral,
    #[error("presentation has no peripheral data")]
    NoPeripheralData,
    #[error("generator map has {images} images for {generators} source generators")]
    MapArity { images: usize, generators: usize },
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("invalid slope: {0}")]
    InvalidSlope(String),
    #[error("atlas entry failed validation: {0}")]
    AtlasValidation(String),
    #[error("no representation found: {0}")]
    NoRepresentationFound(String),
    #[error("certificate requires a certified representation (defect {defect:e} > {tolerance:e})")]
    UncertifiedRepresentation { defect: f64, tolerance: f64 },
    #[error("reports cover different windows or knots")]
    WindowMismatch,
    #[error("unknown atlas entry `{0}`")]
    UnknownKnot(String),
}

pub type Result<T> = std::result::Result<T, Error>;
