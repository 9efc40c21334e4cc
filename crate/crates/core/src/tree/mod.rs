//! The Cayley tree of `F_N`: an exact model of a hyperbolic space with its
//! Gromov boundary, horofunctions and the Busemann cocycle.

mod boundary;
mod estimates;
mod geometry;

pub use boundary::BoundaryPoint;
pub use estimates::{
    centering_check, h2_tail_estimate, psi_estimate, sample_hitting_measure, CenteringReport, CenteringRow,
    TailCurve, TailPoint,
};
pub use geometry::{
    boundary_action, busemann, busemann_by_distances, corollary_check, corollary_witness, gromov_product,
    gromov_product_by_distances, gromov_product_by_horofunctions, horofunction, lemma_identities_by_distances,
    lemma_identities_check, prefix_with_boundary, tracking_distance, tree_distance, GromovProduct,
    IdentityResiduals, Point, TreePoint,
};

#[cfg(test)]
mod properties;
