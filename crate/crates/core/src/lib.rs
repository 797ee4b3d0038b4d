pub mod cache;
pub mod localize;
pub mod refined;
pub mod series;
pub mod suite;
pub mod toric;
