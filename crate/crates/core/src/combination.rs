//! Formal linear combinations of same-signature partitions with
//! half-power scalar coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{PartitionError, ScalarError};
use crate::partition::SetPartition;
use crate::scalar::HalfPowerScalar;

/// A finite sum `sum_i s_i * p_i` where every `p_i` shares one
/// signature. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramCombination {
    upper_count: usize,
    lower_count: usize,
    terms: BTreeMap<SetPartition, HalfPowerScalar>,
}

impl DiagramCombination {
    pub fn zero(upper_count: usize, lower_count: usize) -> DiagramCombination {
        DiagramCombination {
            upper_count,
            lower_count,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_term(
        partition: SetPartition,
        scalar: HalfPowerScalar,
    ) -> DiagramCombination {
        let mut combo =
            DiagramCombination::zero(partition.upper_count(), partition.lower_count());
        // a fresh combination cannot hit an exponent clash
        combo.add_term(partition, scalar).unwrap();
        combo
    }

    pub fn upper_count(&self) -> usize {
        self.upper_count
    }

    pub fn lower_count(&self) -> usize {
        self.lower_count
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SetPartition, &HalfPowerScalar)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(
        &mut self,
        partition: SetPartition,
        scalar: HalfPowerScalar,
    ) -> Result<(), ScalarError> {
        assert_eq!(partition.upper_count(), self.upper_count);
        assert_eq!(partition.lower_count(), self.lower_count);
        if scalar.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&partition) {
            None => {
                self.terms.insert(partition, scalar);
            }
            Some(existing) => {
                let sum = existing.checked_add(&scalar)?;
                if !sum.is_zero() {
                    self.terms.insert(partition, sum);
                }
            }
        }
        Ok(())
    }

    pub fn scale(&self, factor: &HalfPowerScalar) -> DiagramCombination {
        let mut out = DiagramCombination::zero(self.upper_count, self.lower_count);
        for (p, s) in &self.terms {
            out.add_term(p.clone(), s.mul(factor)).unwrap();
        }
        out
    }

    pub fn tensor(&self, other: &DiagramCombination) -> Result<DiagramCombination, ScalarError> {
        let mut out = DiagramCombination::zero(
            self.upper_count + other.upper_count,
            self.lower_count + other.lower_count,
        );
        for (p, sp) in &self.terms {
            for (q, sq) in &other.terms {
                out.add_term(p.tensor(q), sp.mul(sq))?;
            }
        }
        Ok(out)
    }

    /// Stacks `q . p`; every closed loop contributes the factor
    /// `n^(loop_half_exponent/2)`, so the same partition composition
    /// serves categories whose loops count `n` or `n^2`.
    pub fn compose(
        q: &DiagramCombination,
        p: &DiagramCombination,
        loop_half_exponent: i64,
    ) -> Result<DiagramCombination, CombinationError> {
        if p.lower_count != q.upper_count {
            return Err(CombinationError::Partition(
                PartitionError::SignatureMismatch {
                    expected: p.lower_count,
                    found: q.upper_count,
                },
            ));
        }
        let mut out = DiagramCombination::zero(p.upper_count, q.lower_count);
        for (pp, sp) in &p.terms {
            for (qq, sq) in &q.terms {
                let (r, loops) =
                    SetPartition::compose(qq, pp).map_err(CombinationError::Partition)?;
                let factor =
                    HalfPowerScalar::half_power(loop_half_exponent * loops as i64);
                out.add_term(r, sq.mul(sp).mul(&factor))
                    .map_err(CombinationError::Scalar)?;
            }
        }
        Ok(out)
    }

    pub fn involute(&self) -> DiagramCombination {
        let mut out = DiagramCombination::zero(self.lower_count, self.upper_count);
        for (p, s) in &self.terms {
            out.add_term(p.involute(), s.clone()).unwrap();
        }
        out
    }
}

impl fmt::Display for DiagramCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 ({}|{})", self.upper_count, self.lower_count);
        }
        for (i, (p, s)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}) * ({})", s, p)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CombinationError {
    #[error(transparent)]
    Partition(PartitionError),
    #[error(transparent)]
    Scalar(ScalarError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;
    use num::Zero;

    #[test]
    fn zero_terms_are_dropped() {
        let mut combo = DiagramCombination::zero(0, 2);
        combo
            .add_term(SetPartition::pair(), HalfPowerScalar::zero())
            .unwrap();
        assert!(combo.is_zero());
        combo
            .add_term(SetPartition::pair(), HalfPowerScalar::one())
            .unwrap();
        combo
            .add_term(SetPartition::pair(), HalfPowerScalar::one().neg())
            .unwrap();
        assert!(combo.is_zero());
        assert!(combo
            .terms()
            .all(|(_, s)| !s.coefficient().is_zero()));
        let _ = BigRational::zero();
    }

    #[test]
    fn compose_tracks_loop_factors() {
        let cap = DiagramCombination::from_term(SetPartition::pair_upper(), HalfPowerScalar::one());
        let cup = DiagramCombination::from_term(SetPartition::pair(), HalfPowerScalar::one());
        // loops count n: factor half-exponent 2
        let closed = DiagramCombination::compose(&cap, &cup, 2).unwrap();
        let (p, s) = closed.terms().next().unwrap();
        assert_eq!(p, &SetPartition::empty());
        assert_eq!(s, &HalfPowerScalar::half_power(2));
        // loops count n^2: factor half-exponent 4
        let closed = DiagramCombination::compose(&cap, &cup, 4).unwrap();
        let (_, s) = closed.terms().next().unwrap();
        assert_eq!(s, &HalfPowerScalar::half_power(4));
    }
}
