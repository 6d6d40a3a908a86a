//! Square permutations: records and patterns, the encoding by anchored
//! pairs of label sequences, approximate uniform sampling, and the
//! permuton, fluctuation and local limits of large uniform samples.

pub mod encoding;
pub mod enumeration;
pub mod error;
pub mod fluctuations;
pub mod local;
pub mod patterns;
pub mod perm;
pub mod permuton;
pub mod sampler;

pub use encoding::{project, reconstruct, AnchoredPair, LabelStats, XLabel, YLabel};
pub use enumeration::{count_good_pairs, count_square_formula, enumerate_square};
pub use error::{Error, Result};
pub use fluctuations::{endpoint_stats, extract_families, EndpointStats, Polyline};
pub use local::{limit_p, quenched_gamma, restrict, RootedPattern};
pub use patterns::{coc_proportion, occ_proportion, Proportion};
pub use perm::{is_square, records, Permutation, RecordKind, RecordSets};
pub use permuton::{box_distance_grid, GridCdf};
pub use sampler::{sample_regular, Regularity, SamplerConfig};

/// Serializes a ratio as the string `"p/q"`.
pub fn ser_ratio<T, S>(r: &num_rational::Ratio<T>, s: S) -> std::result::Result<S::Ok, S::Error>
where
    T: std::fmt::Display + Clone + num_integer::Integer,
    S: serde::Serializer,
{
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}
