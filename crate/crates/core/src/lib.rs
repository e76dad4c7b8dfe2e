pub mod cli;
pub mod error;
pub mod freewords;
pub mod levels;
pub mod props;
pub mod text;
pub mod tower;
pub mod word;

pub use error::{GroupError, Result};
pub use word::{Letter, Rational, Syllable, Unit, Word};
