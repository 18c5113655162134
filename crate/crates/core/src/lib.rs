pub mod extract;
pub mod ir;
pub mod kb;
pub mod lexer;
pub mod parser;
pub mod pipeline;
pub mod query;
pub mod syntax;
mod xml;
