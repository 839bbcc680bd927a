use num_rational::Ratio;

use crate::carnot::GroupSpec;
use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// `(Q - Q'') / (Q' - Q'')`: the largest Hoelder exponent compatible with a
/// quasisymmetric map from a space of dimension `Q` onto one of dimension
/// `Q'`, with fibers of a submersion of dimension `Q''`.
pub fn exponent_bound(q: i64, q_target: i64, q_fiber: i64) -> Result<Rational> {
    if q_target <= q_fiber {
        return Err(Error::InvalidParameter { name: "Q'", reason: format!("need Q' > Q'', got {q_target} <= {q_fiber}") });
    }
    if q < q_fiber {
        return Err(Error::InvalidParameter { name: "Q", reason: format!("need Q >= Q'', got {q} < {q_fiber}") });
    }
    Ok(Rational::new(q - q_fiber, q_target - q_fiber))
}

/// `-alpha^2`, the sectional-curvature pinching of a negatively curved
/// space whose boundary has Hoelder exponent `alpha`.
pub fn pinching_bound(alpha: Rational) -> Rational {
    -(alpha * alpha)
}

/// `(n - 1) / (Q - 1)` for the topological dimension `n` and homogeneous
/// dimension `Q` of `g`, i.e. `2m / (2m + 1)` on `Heis^m`.
pub fn group_exponent_bound(g: &GroupSpec) -> Result<Rational> {
    if g.is_abelian() {
        return Ok(Rational::from_integer(1));
    }
    exponent_bound(g.n() as i64, g.q() as i64, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        let a = exponent_bound(3, 4, 1).unwrap();
        assert_eq!(a, Rational::new(2, 3));
        assert_eq!(pinching_bound(a), Rational::new(-4, 9));
        for m in 1..6 {
            let g = GroupSpec::heisenberg(m).unwrap();
            assert_eq!(group_exponent_bound(&g).unwrap(), Rational::new(2 * m as i64, 2 * m as i64 + 1));
        }
        assert!(exponent_bound(3, 1, 1).is_err());
    }
}
