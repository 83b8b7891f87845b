pub mod error;
pub mod gpi;
pub mod linalg;
pub mod modgb;
pub mod fisolve;
pub mod cli;
pub mod io;
pub mod perm;
pub mod poly;
pub mod symmat;
