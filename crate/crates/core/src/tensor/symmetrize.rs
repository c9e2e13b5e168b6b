//! The symmetrization operator between the "raw" sixth-order space
//! (`D_ijhlmn = D_lmnijh = D_hjilmn = D_ijhnml`) and the Mindlin space.

use super::{Dense, GradElasticTensor, CONSTRUCTION_TOLERANCE};
use crate::{Error, Result};

/// Index symmetries of the raw (pre-symmetrization) tensor.
pub const RAW_SYMMETRIES: [[usize; 6]; 3] = [[3, 4, 5, 0, 1, 2], [2, 1, 0, 3, 4, 5], [0, 1, 2, 5, 4, 3]];

/// `A_ijhlmn = (D_ijhlmn + D_ijhmln + D_jihlmn + D_jihmln) / 4`.
pub fn symmetrize(d: &Dense<6>) -> Result<GradElasticTensor> {
    let deviation = d.symmetry_deviation(&RAW_SYMMETRIES);
    if deviation > CONSTRUCTION_TOLERANCE {
        return Err(Error::SymmetryViolation {
            what: "raw sixth-order tensor",
            deviation,
        });
    }
    let a = Dense::from_fn(d.dim(), |[i, j, h, l, m, n]| {
        0.25 * (d.get([i, j, h, l, m, n]) + d.get([i, j, h, m, l, n]) + d.get([j, i, h, l, m, n]) + d.get([j, i, h, m, l, n]))
    });
    GradElasticTensor::from_dense(a)
}

/// Inverse of [`symmetrize`]: a nine-term signed combination of index
/// permutations of `A`. The output satisfies [`RAW_SYMMETRIES`].
pub fn desymmetrize(a: &GradElasticTensor) -> Dense<6> {
    // (sign, source positions) with i=0 j=1 h=2 l=3 m=4 n=5.
    const TERMS: [(f64, [usize; 6]); 9] = [
        (1.0, [0, 1, 2, 3, 4, 5]),  // ijhlmn
        (1.0, [1, 2, 0, 4, 5, 3]),  // jhimnl
        (1.0, [2, 0, 1, 5, 3, 4]),  // hijnlm
        (-1.0, [0, 1, 2, 5, 3, 4]), // ijhnlm
        (-1.0, [2, 0, 1, 3, 4, 5]), // hijlmn
        (1.0, [0, 1, 2, 4, 5, 3]),  // ijhmnl
        (1.0, [1, 2, 0, 3, 4, 5]),  // jhilmn
        (-1.0, [1, 2, 0, 5, 3, 4]), // jhinlm
        (-1.0, [2, 0, 1, 4, 5, 3]), // hijmnl
    ];
    let a = a.dense();
    Dense::from_fn(a.dim(), |idx| {
        TERMS
            .iter()
            .map(|(sign, perm)| sign * a.get(perm.map(|p| idx[p])))
            .sum()
    })
}
