//! Triple corpora, category maps and Resnik selectional typing.

mod io;
mod resnik;
mod types;
mod typing;

pub use io::{
    load_category_map, load_signatures, load_triples, load_typed_triples, parse_category_map,
    parse_triples, save_signatures, save_typed_triples, LineError, LoadReport,
};
pub use resnik::{resnik_associations, AssociationTable, Slot, SlotStats};
pub use types::{CategoryMap, Triple, TypedTriple, TypedVerb, VerbKey};
pub use typing::{
    assign_type, build_typed_triples, signature_counts, TypingConfig, TypingOutput,
};
