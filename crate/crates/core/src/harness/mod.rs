//! Point generators, the bundled map corpus and the property verifier.

pub mod corpus;
pub mod generator;
pub mod verify;

pub use corpus::{corpus, CorpusEntry};
pub use generator::{boundary_points, point_generator, PointGenerator, Strategy};
pub use verify::{verify, Margin, PropertyReport, VerifyConfig, VerifyReport};
