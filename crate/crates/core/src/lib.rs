pub mod error;
pub mod excursion;
pub mod lattice;
pub mod matrix;
pub mod rational;
pub mod repring;
pub mod sampling;
pub mod semisimplify;
pub mod tensor_word;
pub mod twisted;
