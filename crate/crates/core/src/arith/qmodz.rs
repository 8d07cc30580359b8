use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Zero;

use super::{frac, Rational};

/// A rational number modulo 1, stored in [0, 1).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct QmodZ(Rational);

impl QmodZ {
    pub fn new(r: Rational) -> Self {
        QmodZ(frac(&r))
    }

    pub fn zero() -> Self {
        QmodZ(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_value(self) -> Rational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// True when `r` lies in this residue class.
    pub fn contains(&self, r: &Rational) -> bool {
        frac(r) == self.0
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        QmodZ::new(&self.0 * Rational::from_integer(s.clone()))
    }
}

impl fmt::Display for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for &QmodZ {
    type Output = QmodZ;
    fn add(self, o: &QmodZ) -> QmodZ {
        QmodZ::new(&self.0 + &o.0)
    }
}

impl Sub for &QmodZ {
    type Output = QmodZ;
    fn sub(self, o: &QmodZ) -> QmodZ {
        QmodZ::new(&self.0 - &o.0)
    }
}

impl Neg for &QmodZ {
    type Output = QmodZ;
    fn neg(self) -> QmodZ {
        QmodZ::new(-&self.0)
    }
}

impl Mul<&Rational> for &QmodZ {
    type Output = QmodZ;
    fn mul(self, o: &Rational) -> QmodZ {
        QmodZ::new(&self.0 * o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn reduces_into_unit_interval() {
        assert_eq!(QmodZ::new(rat(-1, 4)).value(), &rat(3, 4));
        assert_eq!(QmodZ::new(rat(7, 3)).value(), &rat(1, 3));
        assert!(QmodZ::new(rat(-2, 1)).is_zero());
    }

    #[test]
    fn group_operations() {
        let a = QmodZ::new(rat(2, 3));
        let b = QmodZ::new(rat(1, 2));
        assert_eq!((&a + &b).value(), &rat(1, 6));
        assert_eq!((&a - &b).value(), &rat(1, 6));
        assert_eq!((-&a).value(), &rat(1, 3));
        assert!(a.contains(&rat(-1, 3)));
    }
}
