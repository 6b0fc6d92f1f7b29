//! Integer vertex weights.
//!
//! Every algorithm in this crate is generic over the weight type. Only unsigned
//! primitive integers qualify: the reductions rely on exact comparisons, and
//! plateau transformations terminate because the committed offset grows by at
//! least one unit per application.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{PrimInt, Unsigned};

/// Scalar type usable as a vertex weight.
pub trait Weight:
    PrimInt + Unsigned + Sum + Hash + Debug + Display + FromStr + Default + Send + Sync + 'static
{
    /// Lossless widening used for serialization and for cross-multiplied ratio
    /// comparisons.
    fn to_u128(self) -> u128 {
        num_traits::ToPrimitive::to_u128(&self).expect("unsigned primitive fits in u128")
    }

    /// Narrowing conversion, `None` when the value does not fit.
    fn from_u64(value: u64) -> Option<Self> {
        num_traits::NumCast::from(value)
    }

    fn to_u64(self) -> u64 {
        num_traits::ToPrimitive::to_u64(&self).expect("weight exceeds u64")
    }
}

impl<T> Weight for T where
    T: PrimInt
        + Unsigned
        + Sum
        + Hash
        + Debug
        + Display
        + FromStr
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Sum of weights over an iterator.
pub(crate) fn total<W: Weight, I: IntoIterator<Item = W>>(it: I) -> W {
    it.into_iter().fold(W::zero(), |acc, w| acc + w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert_eq!(<u32 as Weight>::from_u64(7), Some(7u32));
        assert_eq!(<u8 as Weight>::from_u64(300), None);
        assert_eq!(Weight::to_u128(5u16), 5);
        assert_eq!(total([1u64, 2, 3]), 6);
    }
}
