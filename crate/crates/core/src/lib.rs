pub mod catalog;
pub mod cli;
pub mod collation;
pub mod drawing;
pub mod geom;
pub mod pipeline;
pub mod po;
pub mod quantity;
pub mod rules;
pub mod service;
pub mod table;
