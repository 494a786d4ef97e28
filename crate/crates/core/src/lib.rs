pub mod data;
pub mod experiment;
pub mod gp;
pub mod imageops;
pub mod learners;
pub mod multitask;
