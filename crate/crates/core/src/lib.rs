pub mod asp;
pub mod exec;
pub mod gen;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod qbf;
pub mod reduction;
pub mod syntax;
