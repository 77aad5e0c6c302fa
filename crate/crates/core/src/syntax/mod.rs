//! Text formats: EASP programs in both surface dialects and solver witness
//! documents.

mod easp;
mod witness;

pub use easp::{
    parse_easp, parse_easp_km, parse_easp_not, render_elp, Dialect, ParseError, ParseErrorKind, SourceSpan,
};
pub use witness::{parse_witness_json, render_witness_json, WitnessError, WitnessSet};
