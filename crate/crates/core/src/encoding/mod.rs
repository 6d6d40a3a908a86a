//! Anchored pairs of label sequences, their statistics, and the maps between
//! square permutations and pairs.

pub mod labels;
pub mod pair;
pub mod petrov;
pub mod reconstruct;

pub use labels::{labels_to_string, parse_labels, Label, LabelStats, XLabel, YLabel};
pub use pair::{margin_holds, margin_range, project, AnchoredPair};
pub use petrov::{petrov_check, petrov_check_label, satisfies_petrov, PetrovReport, Violation};
pub use reconstruct::{
    anchors, band_report, build_lambdas, check_matching, lambdas_unchecked, reconstruct,
    reconstruct_validated, record_structure_matches, Anchors, BandReport, LambdaFamilies,
};
