//! Partial orders used by the fixpoint engine and the abstractions.

/// A partially ordered carrier, compared element-wise.
pub trait PartialOrder {
    fn leq(&self, other: &Self) -> bool;
}

/// Finite partial order given by an explicit index set `0..size()`.
pub trait FiniteOrder {
    fn size(&self) -> usize;
    fn le(&self, a: usize, b: usize) -> bool;

    fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.le(a, b)
    }
}
