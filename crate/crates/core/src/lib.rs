//! Headless engine for flexible unit visualizations: every data row is a
//! mark that can be positioned, colored, sized, labeled and grouped through
//! natural-language commands, direct manipulation, or both together.

pub mod color;
pub mod context;
pub mod dataset;
pub mod fusion;
pub mod geometry;
pub mod layout;
pub mod nl;
pub mod session;
pub mod text;
pub mod view_state;
