#![allow(dead_code)]

pub mod cartpole_oracle;
pub mod instances;
pub mod invariant_checks;
