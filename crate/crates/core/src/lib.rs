//! Computing with random substitutions: languages, inflation word
//! decompositions, recognisability, and automorphisms of the associated
//! subshifts compiled down to executable sliding block codes.

pub mod automorphism;
pub mod bundled;
pub mod decomposition;
pub mod error;
pub mod groups;
pub mod language;
pub mod recognisability;
pub mod substitution;
pub mod word;

pub use automorphism::{
    compile_conveyor, compile_full_shift_embedding, compile_marker_automorphism, compile_shuffle,
    conveyor_replay, extensional_difference, find_markers, nontrivial_witness,
    verify_commute_sampled, verify_endomorphism, verify_inverse, verify_inverse_sampled,
    ConveyorSpec, CyclicConfiguration, IndexCode, MarkerReport, MarkerSpec, ShuffleSpec,
    SlidingBlockCode, Verdict,
};
pub use decomposition::{Decomposition, InducedDecomposition};
pub use error::{Error, Result};
pub use groups::{inflation_counts, shuffle_group_order, example5_count_check, GroupOrderReport};
pub use language::{Language, LanguageSlice};
pub use recognisability::{LocalVerdict, Witness, WordVerdict};
pub use substitution::{parse_substitution, RandomSubstitution, SubstitutionMatrix};
pub use word::{Alphabet, Letter, Word};
