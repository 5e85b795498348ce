//! Numerical capacity: discretised channels, Blahut-Arimoto and the
//! timing-only baseline.

mod ba;
mod discrete;
mod timing;

pub use ba::{blahut_arimoto, mutual_information, BaOptions, CapacityResult};
pub use discrete::{
    discretize_cb, discretize_jtac, DiscreteChannel, InputSymbol, Truncation, DEFAULT_ALPHABET_CAP,
};
pub use timing::{tb_rate, TbRate, TimingInput};
