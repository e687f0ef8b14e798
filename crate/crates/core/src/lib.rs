//! Cartan-matrix tests for whether simple modules of a wild block lie at the
//! end of their stable Auslander–Reiten components, plus the rule engine that
//! turns those tests and structural reductions into per-group verdicts.

pub mod arith;
pub mod blockdata;
pub mod corpus;
pub mod exactmat;
pub mod kawata;
pub mod verdict;
