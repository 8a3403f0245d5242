//! Closed fluxes, the kinetic numerical flux and flux Jacobians.
//!
//! Entropy closures are parametrized by their multipliers `alpha`, linear
//! closures directly by the moment vector `u`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};

/// Precomputed matrices of a linear (Galerkin) closure `psi = b^T M^{-1} u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearClosure {
    /// `<mu b b^T> M^{-1}`.
    pub a: DMatrix<f64>,
    /// `<mu b b^T>_+ M^{-1}`.
    pub a_plus: DMatrix<f64>,
    /// `<mu b b^T>_- M^{-1}`.
    pub a_minus: DMatrix<f64>,
    /// `<mu b b^T>`, symmetric.
    pub a_sym: DMatrix<f64>,
    /// Mass matrix `<b b^T>`.
    pub mass: DMatrix<f64>,
}

impl LinearClosure {
    pub fn new(spec: &BasisSpec) -> Result<Self> {
        let n = spec.n();
        let mut full = DMatrix::zeros(n, n);
        let mut plus = DMatrix::zeros(n, n);
        let mut minus = DMatrix::zeros(n, n);
        for (q, node) in spec.nodes().iter().enumerate() {
            let vals = spec.node_values(q);
            for (a, &va) in vals.iter().enumerate() {
                for (b, &vb) in vals.iter().enumerate() {
                    let v = node.weight * node.mu * va * vb;
                    let (i, j) = (node.start + a, node.start + b);
                    full[(i, j)] += v;
                    if node.mu > 0.0 {
                        plus[(i, j)] += v;
                    } else if node.mu < 0.0 {
                        minus[(i, j)] += v;
                    }
                }
            }
        }
        let mass = spec.mass_matrix().clone();
        let inv = mass
            .clone()
            .cholesky()
            .ok_or_else(|| Error::DegenerateState("mass matrix is not positive definite".into()))?
            .inverse();
        Ok(Self {
            a: &full * &inv,
            a_plus: &plus * &inv,
            a_minus: &minus * &inv,
            a_sym: full,
            mass,
        })
    }

    /// `A u`, evaluated as `A_+ u + A_- u` so that it equals the kinetic flux of equal states bitwise.
    pub fn flux(&self, u: &[f64]) -> Vec<f64> {
        self.kinetic_flux(u, u)
    }

    pub fn kinetic_flux(&self, left: &[f64], right: &[f64]) -> Vec<f64> {
        let l = mat_vec(&self.a_plus, left);
        let r = mat_vec(&self.a_minus, right);
        l.iter().zip(&r).map(|(a, b)| a + b).collect()
    }

    /// Spectral radius of `A`, computed through the symmetric pair.
    pub fn spectral_radius(&self, spec: &BasisSpec) -> Result<f64> {
        let eig = EigenDecomposition::from_pair(&self.a_sym, &self.mass, spec.block_size())?;
        Ok(eig.lambdas.iter().fold(0.0f64, |m, l| m.max(l.abs())))
    }
}

fn mat_vec(a: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (a * DVector::from_column_slice(x)).iter().copied().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClosureKind {
    Entropy,
    Linear(LinearClosure),
}

impl ClosureKind {
    pub fn linear(spec: &BasisSpec) -> Result<Self> {
        Ok(Self::Linear(LinearClosure::new(spec)?))
    }

    pub fn is_entropy(&self) -> bool {
        matches!(self, ClosureKind::Entropy)
    }

    /// `F(u)`; `state` is `alpha` for entropy closures and `u` for linear ones.
    pub fn flux(&self, spec: &BasisSpec, state: &[f64]) -> Vec<f64> {
        match self {
            ClosureKind::Entropy => entropy_flux(spec, state),
            ClosureKind::Linear(l) => l.flux(state),
        }
    }

    /// Kinetic flux `<mu b psi_left>_+ + <mu b psi_right>_-`.
    pub fn kinetic_flux(&self, spec: &BasisSpec, left: &[f64], right: &[f64]) -> Vec<f64> {
        match self {
            ClosureKind::Entropy => entropy_kinetic_flux(spec, left, right),
            ClosureKind::Linear(l) => l.kinetic_flux(left, right),
        }
    }

    /// Flux Jacobian `dF/du`.
    pub fn jacobian(&self, spec: &BasisSpec, state: &[f64]) -> Result<DMatrix<f64>> {
        match self {
            ClosureKind::Entropy => {
                let (a_s, h) = entropy_pair(spec, state);
                let chol = h.cholesky().ok_or_else(|| {
                    Error::DegenerateState("Hessian is not positive definite".into())
                })?;
                // J = A_s H^{-1} = (H^{-1} A_s)^T since both are symmetric.
                Ok(chol.solve(&a_s).transpose())
            }
            ClosureKind::Linear(l) => Ok(l.a.clone()),
        }
    }

    /// Eigen-decomposition of the flux Jacobian at `state`.
    pub fn eigendecompose(&self, spec: &BasisSpec, state: &[f64]) -> Result<EigenDecomposition> {
        match self {
            ClosureKind::Entropy => {
                let (a_s, h) = entropy_pair(spec, state);
                EigenDecomposition::from_pair(&a_s, &h, spec.block_size())
            }
            ClosureKind::Linear(l) => {
                EigenDecomposition::from_pair(&l.a_sym, &l.mass, spec.block_size())
            }
        }
    }
}

/// `<mu b exp(b^T alpha)>`.
pub fn entropy_flux(spec: &BasisSpec, alpha: &[f64]) -> Vec<f64> {
    entropy_kinetic_flux(spec, alpha, alpha)
}

/// Kinetic flux of two entropy ansatzes.
pub fn entropy_kinetic_flux(spec: &BasisSpec, left: &[f64], right: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; spec.n()];
    for (q, node) in spec.nodes().iter().enumerate() {
        if node.mu == 0.0 {
            continue;
        }
        let alpha = if node.positive_half { left } else { right };
        let wpsi = node.weight * node.mu * spec.node_dot(q, alpha).exp();
        for (a, v) in spec.node_values(q).iter().enumerate() {
            out[node.start + a] += wpsi * v;
        }
    }
    out
}

/// Global Lax-Friedrichs flux from precomputed fluxes.
pub fn lax_friedrichs_flux(f1: &[f64], f2: &[f64], u1: &[f64], u2: &[f64], c: f64) -> Vec<f64> {
    (0..f1.len())
        .map(|i| 0.5 * (f1[i] + f2[i] - c * (u2[i] - u1[i])))
        .collect()
}

/// `(<mu b b^T exp(b^T alpha)>, <b b^T exp(b^T alpha)>)`.
pub fn entropy_pair(spec: &BasisSpec, alpha: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = spec.n();
    let mut a_s = DMatrix::zeros(n, n);
    let mut h = DMatrix::zeros(n, n);
    for (q, node) in spec.nodes().iter().enumerate() {
        let wpsi = node.weight * spec.node_dot(q, alpha).exp();
        let vals = spec.node_values(q);
        for (a, &va) in vals.iter().enumerate() {
            for (b, &vb) in vals.iter().enumerate() {
                let v = wpsi * va * vb;
                let (i, j) = (node.start + a, node.start + b);
                h[(i, j)] += v;
                a_s[(i, j)] += node.mu * v;
            }
        }
    }
    (a_s, h)
}

/// Real eigen-decomposition `J = V diag(lambdas) V^{-1}` of `J = A_s H^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub v: DMatrix<f64>,
    pub v_inv: DMatrix<f64>,
    pub lambdas: Vec<f64>,
}

impl EigenDecomposition {
    /// Solves `A_s x = lambda H x` by Cholesky reduction, independently on
    /// each diagonal block of size `block`.
    pub fn from_pair(a_s: &DMatrix<f64>, h: &DMatrix<f64>, block: usize) -> Result<Self> {
        let n = a_s.nrows();
        if h.nrows() != n || block == 0 || n % block != 0 {
            return Err(Error::InvalidArgument("inconsistent matrix pair".into()));
        }
        let mut v = DMatrix::zeros(n, n);
        let mut v_inv = DMatrix::zeros(n, n);
        let mut lambdas = vec![0.0; n];
        for start in (0..n).step_by(block) {
            let hb = h.view((start, start), (block, block)).into_owned();
            let ab = a_s.view((start, start), (block, block)).into_owned();
            let chol = hb.cholesky().ok_or_else(|| {
                Error::DegenerateState("Hessian is not positive definite".into())
            })?;
            let l = chol.l();
            let l_inv = l
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::DegenerateState("singular Cholesky factor".into()))?;
            let c = &l_inv * &ab * l_inv.transpose();
            let c = (&c + c.transpose()) * 0.5;
            let eig = SymmetricEigen::new(c);
            let vb = &l * &eig.eigenvectors;
            let vib = eig.eigenvectors.transpose() * &l_inv;
            v.view_mut((start, start), (block, block)).copy_from(&vb);
            v_inv.view_mut((start, start), (block, block)).copy_from(&vib);
            lambdas[start..start + block].copy_from_slice(eig.eigenvalues.as_slice());
        }
        if v.iter().chain(v_inv.iter()).any(|x| !x.is_finite()) {
            return Err(Error::DegenerateState("non-finite eigenvectors".into()));
        }
        Ok(Self { v, v_inv, lambdas })
    }

    /// Characteristic variables `V^{-1} u`.
    pub fn to_characteristic(&self, u: &[f64]) -> Vec<f64> {
        mat_vec(&self.v_inv, u)
    }

    /// Moments `V w` from characteristic variables.
    pub fn from_characteristic(&self, w: &[f64]) -> Vec<f64> {
        mat_vec(&self.v, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_first_order_flux() {
        let spec = BasisSpec::full_legendre(1, 15).unwrap();
        let lin = LinearClosure::new(&spec).unwrap();
        let f = lin.flux(&[1.0, 0.0]);
        assert!(f[0].abs() < 1e-15 && (f[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((lin.a[(0, 1)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn isotropic_entropy_flux() {
        let spec = BasisSpec::full_legendre(1, 15).unwrap();
        let rho = 2.5;
        let f = entropy_flux(&spec, &[(rho / 2.0f64).ln(), 0.0]);
        assert!(f[0].abs() < 1e-14);
        assert!((f[1] - rho / 3.0).abs() < 1e-14);
    }

    #[test]
    fn isotropic_jacobian_and_eigenvalues() {
        let spec = BasisSpec::full_legendre(1, 15).unwrap();
        let alpha = [0.0, 0.0];
        let j = ClosureKind::Entropy.jacobian(&spec, &alpha).unwrap();
        assert!(j[(0, 0)].abs() < 1e-14 && (j[(0, 1)] - 1.0).abs() < 1e-14);
        assert!((j[(1, 0)] - 1.0 / 3.0).abs() < 1e-14 && j[(1, 1)].abs() < 1e-14);
        let eig = ClosureKind::Entropy.eigendecompose(&spec, &alpha).unwrap();
        let mut l = eig.lambdas.clone();
        l.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let s = 1.0 / 3f64.sqrt();
        assert!((l[0] + s).abs() < 1e-14 && (l[1] - s).abs() < 1e-14);
    }

    #[test]
    fn kinetic_flux_half_range_density() {
        let spec = BasisSpec::full_legendre(2, 15).unwrap();
        let iso = [(0.5f64).ln(), 0.0, 0.0];
        let vac = [-60.0, 0.0, 0.0];
        let f = entropy_kinetic_flux(&spec, &iso, &vac);
        assert!((f[0] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn diagonal_pair_gives_identity_vectors() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, -0.25]));
        let h = DMatrix::identity(2, 2);
        let eig = EigenDecomposition::from_pair(&a, &h, 2).unwrap();
        // Columns are unit vectors, possibly permuted and with flipped signs.
        for x in eig.v.iter() {
            assert!(x.abs() < 1e-14 || (x.abs() - 1.0).abs() < 1e-14);
        }
        assert!((eig.v.determinant().abs() - 1.0).abs() < 1e-14);
    }
}
