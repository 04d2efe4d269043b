use std::fmt;

/// The transformation vocabulary. Ids are stable and dense; recipe
/// encodings depend on them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Action {
    Strash = 0,
    Balance = 1,
    Rewrite = 2,
    RewriteZero = 3,
    Refactor = 4,
    RefactorZero = 5,
    Sweep = 6,
}

impl Action {
    pub const ALL: [Action; 7] = [
        Action::Strash,
        Action::Balance,
        Action::Rewrite,
        Action::RewriteZero,
        Action::Refactor,
        Action::RefactorZero,
        Action::Sweep,
    ];

    /// Vocabulary size, a published constant consumed by recipe encoding.
    pub const VOCAB: usize = 7;

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Action> {
        Action::ALL.get(id as usize).copied()
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Action::Strash => "strash",
            Action::Balance => "balance",
            Action::Rewrite => "rw",
            Action::RewriteZero => "rwz",
            Action::Refactor => "rf",
            Action::RefactorZero => "rfz",
            Action::Sweep => "sweep",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Action> {
        Action::ALL.iter().copied().find(|a| a.mnemonic() == s)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_dense_and_stable() {
        for (i, a) in Action::ALL.iter().enumerate() {
            assert_eq!(a.id() as usize, i);
            assert_eq!(Action::from_id(a.id()), Some(*a));
        }
        assert_eq!(Action::ALL.len(), Action::VOCAB);
        assert_eq!(Action::from_id(7), None);
    }

    #[test]
    fn mnemonics_round_trip() {
        for a in Action::ALL {
            assert_eq!(Action::from_mnemonic(a.mnemonic()), Some(a));
        }
        assert_eq!(Action::from_mnemonic("resub"), None);
    }
}
