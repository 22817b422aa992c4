//! Pointwise tensor calculus in chart components: Schouten and Koszul
//! brackets, Nijenhuis torsion, the PN hierarchy, canonical hamiltonians and
//! eigenvalue residuals. Derivatives are central finite differences of
//! [`TensorField`] evaluators.

mod brackets;
mod hierarchy;
mod spectrum;
mod tensor;

pub use brackets::{
    koszul_bracket, koszul_scaled, lie_derivative_bivector, nijenhuis_torsion, nijenhuis_torsion_all, poisson_bracket,
    poisson_bracket_scaled, schouten_bivector_bivector, schouten_scaled, torsion_scaled, ScaledResidual,
};
pub use hierarchy::{
    canonical_hamiltonian, check_eigen_equation, check_lenart_canonical, check_logdet_extension, check_np_symmetry,
    hamiltonian_form_residual, hierarchy_bivector, logdet_shifted, trace_power, vandermonde_checks, HierarchyLevel,
    HIERARCHY_ASYM_TOL,
};
pub use spectrum::{nijenhuis_spectrum, SpectralCluster, DEFAULT_CLUSTER_TOL};
pub use tensor::{Bivector, Endomorphism, Jet, ScalarField, Tensor3, TensorField, TensorKind, TwoForm, VectorField};

#[cfg(test)]
mod tests;
