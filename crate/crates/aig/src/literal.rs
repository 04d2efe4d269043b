use std::fmt;

/// A reference to a node with an optional inversion.
///
/// Packed as `node_index << 1 | complemented`, which makes the derived
/// ordering exactly (index, flag), the order used for canonical fanin
/// pairs. Node 0 is the constant-false node, so `Literal::FALSE` is the
/// uncomplemented literal of node 0 and `Literal::TRUE` its complement.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(u32);

impl Literal {
    pub const FALSE: Literal = Literal(0);
    pub const TRUE: Literal = Literal(1);

    pub fn new(node: usize, complemented: bool) -> Self {
        Literal(((node as u32) << 1) | complemented as u32)
    }

    pub fn node(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_complemented(self) -> bool {
        self.0 & 1 != 0
    }

    /// The same literal with the inversion flag toggled.
    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Literal(self.0 ^ 1)
    }

    /// Complements the literal when `c` is true.
    pub fn xor(self, c: bool) -> Self {
        Literal(self.0 ^ c as u32)
    }

    pub fn is_constant(self) -> bool {
        self.node() == 0
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;
    fn not(self) -> Literal {
        Literal(self.0 ^ 1)
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_complemented() {
            write!(f, "!n{}", self.node())
        } else {
            write!(f, "n{}", self.node())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_round_trips() {
        for node in [0usize, 1, 5, 1000] {
            for c in [false, true] {
                let lit = Literal::new(node, c);
                assert_eq!(lit.node(), node);
                assert_eq!(lit.is_complemented(), c);
            }
        }
    }

    #[test]
    fn order_is_index_then_flag() {
        let a = Literal::new(3, false);
        let b = Literal::new(3, true);
        let c = Literal::new(4, false);
        assert!(a < b);
        assert!(b < c);
    }

    #[test]
    fn constants() {
        assert_eq!(!Literal::FALSE, Literal::TRUE);
        assert!(Literal::TRUE.is_constant());
        assert!(Literal::TRUE.is_complemented());
    }
}
