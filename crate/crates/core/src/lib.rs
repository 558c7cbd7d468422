pub mod error;
pub mod geometry;
pub mod mask;
pub mod ranges;
pub mod generate;
pub mod planar;
pub mod delaunay;
pub mod pathcolor;
pub mod recolor;
pub mod lowerbound;
