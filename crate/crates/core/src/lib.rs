//! Conley-Morse theory for combinatorial multivector fields on finite T0
//! spaces.

use thiserror::Error;

pub mod cli;
pub mod complex;
pub mod conley;
pub mod dynamics;
pub mod morse;
pub mod mvf;
pub mod snf;
pub mod space;

pub use complex::{HomologySignature, OrderComplex, PoincarePolynomial};
pub use mvf::{FlowDigraph, MultivectorField};
pub use space::{Cell, CellId, CellSet, FiniteSpace, IndexPoset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Space(#[from] space::SpaceError),
    #[error(transparent)]
    Field(#[from] mvf::FieldError),
    #[error(transparent)]
    Homology(#[from] complex::HomologyError),
    #[error(transparent)]
    Dynamics(#[from] dynamics::DynamicsError),
    #[error(transparent)]
    Conley(#[from] conley::ConleyError),
    #[error(transparent)]
    Morse(#[from] morse::MorseError),
}
