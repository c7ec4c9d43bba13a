pub mod cone;
pub mod error;
pub mod model;
pub mod quad;
pub mod warp;
pub mod collar;
pub mod cat;
pub mod filling;
pub mod glue;
pub mod io;
pub mod parallel;
