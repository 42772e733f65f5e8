//! Finite structures, maps between them, and the brute-force checks.

pub mod ac;
pub mod io;
pub mod iso;
pub mod maps;
pub mod name;
pub mod ops;
pub mod structure;

pub use ac::{ac_check, ac_check_within, AcReport, AcScope};
pub use io::{from_json, to_dot, to_json};
pub use iso::{
    automorphisms, automorphisms_with_cap, count_automorphisms_with_cap, isomorphic,
    isomorphic_with_cap, isomorphism_with_cap, DEFAULT_ISO_CAP,
};
pub use maps::{check_embedding, check_homomorphism, homomorphism_defect, image, kernel, ImageReport, VertexMap};
pub use name::VertexName;
pub use ops::{
    bipartite_complement, complement, complete_bipartite, complete_digraph, complete_graph,
    disjoint_union, disjoint_union_paired, induced, path_graph, PartPairing,
};
pub use structure::{Kind, Part, Presentation, Structure};
