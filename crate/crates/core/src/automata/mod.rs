mod dot;
mod general;
mod ranked;
mod record;

pub use dot::{to_dot, DotOptions};
pub use general::{GeneralDfa, GeneralNfa};
pub use ranked::{equivalent, RankedAutomaton, RankedDfa, RankedNfa, StateId, WidthProfile};
pub use record::{validate, AutomatonRecord, StateRecord};
