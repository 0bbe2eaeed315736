pub mod bits;
pub mod ctree;
pub mod diagram;
pub mod generator;
pub mod hypothesis;
pub mod learner;
pub mod oracles;
pub mod pipeline;
pub mod sweep;
