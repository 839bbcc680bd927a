use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::group::{GroupSpec, Pt};
use super::linalg;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A homogeneous homomorphism given by a graded linear map in exponential
/// coordinates (`target.n()` rows, `source.n()` columns).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomHom {
    source: GroupSpec,
    target: GroupSpec,
    matrix: Vec<Vec<f64>>,
    surjective: bool,
}

/// A kernel direction and its grading weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelVector {
    pub coords: Vec<f64>,
    pub weight: u32,
}

impl HomHom {
    pub fn new(source: GroupSpec, target: GroupSpec, matrix: Vec<Vec<f64>>) -> Result<Self> {
        if matrix.len() != target.n() {
            return Err(Error::DimensionMismatch { expected: target.n(), got: matrix.len() });
        }
        for row in &matrix {
            if row.len() != source.n() {
                return Err(Error::DimensionMismatch { expected: source.n(), got: row.len() });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain("non-finite matrix entry".into()));
            }
        }
        for (i, row) in matrix.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 && target.weight(i) != source.weight(j) {
                    return Err(Error::Domain(format!(
                        "entry ({i},{j}) mixes layers of weight {} and {}",
                        target.weight(i),
                        source.weight(j)
                    )));
                }
            }
        }
        let surjective = linalg::rank(&matrix) == target.n();
        let hom = HomHom { source, target, matrix, surjective };
        hom.check_product_rule()?;
        Ok(hom)
    }

    /// Projection onto the given source coordinates, as a map to `R^k`.
    pub fn coordinate_projection(source: GroupSpec, indices: &[usize]) -> Result<Self> {
        let target = GroupSpec::euclidean(indices.len())?;
        let mut matrix = vec![vec![0.0; source.n()]; indices.len()];
        for (row, &i) in indices.iter().enumerate() {
            if i >= source.n() {
                return Err(Error::InvalidParameter { name: "indices", reason: format!("{i} out of range") });
            }
            matrix[row][i] = 1.0;
        }
        Self::new(source, target, matrix)
    }

    pub fn identity(g: GroupSpec) -> Self {
        let n = g.n();
        let matrix = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::new(g, g, matrix).expect("identity is a homomorphism")
    }

    pub fn source(&self) -> &GroupSpec {
        &self.source
    }

    pub fn target(&self) -> &GroupSpec {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn is_surjective(&self) -> bool {
        self.surjective
    }

    pub fn apply<T: Real>(&self, p: &[T]) -> Pt<T> {
        Pt(self
            .matrix
            .iter()
            .map(|row| row.iter().zip(p).fold(T::zero(), |acc, (&a, &x)| acc + T::lit(a) * x))
            .collect())
    }

    fn check_product_rule(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let n = self.source.n();
        for _ in 0..64 {
            let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let h: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lhs = self.apply(&self.source.product(&g, &h));
            let rhs = self.target.product(&self.apply(&g), &self.apply(&h));
            let scale = 1.0 + rhs.iter().map(|x| x.abs()).fold(0.0, f64::max);
            if lhs.iter().zip(rhs.iter()).any(|(a, b)| (a - b).abs() > 1e-9 * scale) {
                return Err(Error::Domain("matrix does not define a group homomorphism".into()));
            }
        }
        Ok(())
    }

    /// Graded orthonormal basis of `ker u` (a subgroup; linear in exponential coordinates).
    pub fn kernel_basis(&self) -> Vec<KernelVector> {
        let n = self.source.n();
        let mut out = Vec::new();
        for w in 1..=self.source.step() {
            let cols: Vec<usize> = (0..n).filter(|&j| self.source.weight(j) == w).collect();
            let rows: Vec<usize> = (0..self.target.n()).filter(|&i| self.target.weight(i) == w).collect();
            let block: Vec<Vec<f64>> =
                rows.iter().map(|&i| cols.iter().map(|&j| self.matrix[i][j]).collect()).collect();
            let null = if block.is_empty() {
                linalg::gram_schmidt(
                    (0..cols.len()).map(|k| (0..cols.len()).map(|l| if k == l { 1.0 } else { 0.0 }).collect()).collect(),
                )
            } else {
                linalg::null_space(&block, cols.len())
            };
            for v in null {
                let mut coords = vec![0.0; n];
                for (k, &j) in cols.iter().enumerate() {
                    coords[j] = v[k];
                }
                out.push(KernelVector { coords, weight: w });
            }
        }
        out
    }

    /// Homogeneous dimension of the kernel.
    pub fn kernel_homogeneous_dim(&self) -> usize {
        self.kernel_basis().iter().map(|k| k.weight as usize).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h1() -> GroupSpec {
        GroupSpec::heisenberg(1).unwrap()
    }

    #[test]
    fn x_projection_is_surjective_with_vertical_plane_kernel() {
        let u = HomHom::coordinate_projection(h1(), &[0]).unwrap();
        assert!(u.is_surjective());
        let k = u.kernel_basis();
        assert_eq!(k.len(), 2);
        assert_eq!(u.kernel_homogeneous_dim(), 3);
        for v in &k {
            assert!(v.coords[0].abs() < 1e-12);
        }
    }

    #[test]
    fn z_projection_is_not_a_homomorphism() {
        assert!(HomHom::coordinate_projection(h1(), &[2]).is_err());
    }

    #[test]
    fn rank_one_map_is_not_surjective() {
        let r3 = GroupSpec::euclidean(3).unwrap();
        let r2 = GroupSpec::euclidean(2).unwrap();
        let u = HomHom::new(r3, r2, vec![vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]]).unwrap();
        assert!(!u.is_surjective());
        let p = HomHom::coordinate_projection(r3, &[0, 1]).unwrap();
        assert!(p.is_surjective());
    }

    #[test]
    fn heisenberg_automorphism_respects_dilations_and_products() {
        // rotation-scaling by 2 on the horizontal layer, det = 4 on the center
        let a = vec![vec![0.0, -2.0, 0.0], vec![2.0, 0.0, 0.0], vec![0.0, 0.0, 4.0]];
        let u = HomHom::new(h1(), h1(), a).unwrap();
        let g = [0.3, -0.7, 0.2];
        for r in [0.5, 2.0] {
            let lhs: Pt<f64> = u.apply(&h1().dilate(r, &g));
            let rhs = h1().dilate(r, &u.apply(&g));
            for (x, y) in lhs.iter().zip(rhs.iter()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        // wrong center factor is rejected
        let bad = vec![vec![0.0, -2.0, 0.0], vec![2.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!(HomHom::new(h1(), h1(), bad).is_err());
    }

    #[test]
    fn layer_mixing_rejected() {
        let r1 = GroupSpec::euclidean(1).unwrap();
        assert!(HomHom::new(h1(), r1, vec![vec![0.0, 0.0, 1.0]]).is_err());
    }
}
