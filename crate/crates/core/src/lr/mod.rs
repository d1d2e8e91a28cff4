//! Littlewood-Richardson combinatorics for su(n).

pub mod bridge;
pub mod decompose;
pub mod ehrhart;
pub mod hive;
pub mod pictograph;
pub mod simplex;
pub mod tableau;

pub use decompose::{tensor_decomposition, triple_multiplicity};
pub use hive::{
    enumerate_hives, lr_coefficient, lr_coefficient_with, root_lattice_check, HivePattern,
};
pub use tableau::lr_tableau_oracle;
