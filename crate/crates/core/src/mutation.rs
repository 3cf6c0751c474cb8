//! Process-wide switches: deliberately injected defects, used to confirm that
//! the law suites can tell a broken construction from a correct one, and the
//! paranoid flag that re-verifies induced maps by brute force.
//!
//! Both are global because the defects live deep inside constructions that
//! take no configuration. Flip them only from single-threaded drivers.

use std::sync::atomic::{AtomicBool, AtomicU8, Ordering};

/// A known defect that can be switched on at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Mutant {
    /// The dependent product forgets the last section it enumerates.
    DropPiSection = 1,
    /// Pullbacks along identities fall back to the pair-set apex.
    UnnormalizedIdentityPullback = 2,
    /// The associator reports its components in the wrong slots.
    SwapCartesianComponents = 3,
}

impl Mutant {
    pub const ALL: [Mutant; 3] =
        [Mutant::DropPiSection, Mutant::UnnormalizedIdentityPullback, Mutant::SwapCartesianComponents];

    pub fn name(self) -> &'static str {
        match self {
            Mutant::DropPiSection => "drop-pi-section",
            Mutant::UnnormalizedIdentityPullback => "unnormalized-identity-pullback",
            Mutant::SwapCartesianComponents => "swap-cartesian-components",
        }
    }

    pub fn from_name(name: &str) -> Option<Mutant> {
        Mutant::ALL.into_iter().find(|m| m.name() == name)
    }
}

static ACTIVE: AtomicU8 = AtomicU8::new(0);
static PARANOID: AtomicBool = AtomicBool::new(false);

pub fn set_active(m: Option<Mutant>) {
    ACTIVE.store(m.map_or(0, |m| m as u8), Ordering::SeqCst);
}

pub fn active() -> Option<Mutant> {
    match ACTIVE.load(Ordering::Relaxed) {
        0 => None,
        v => Mutant::ALL.into_iter().find(|m| *m as u8 == v),
    }
}

pub fn is_active(m: Mutant) -> bool {
    ACTIVE.load(Ordering::Relaxed) == m as u8
}

pub fn set_paranoid(on: bool) {
    PARANOID.store(on, Ordering::SeqCst);
}

pub fn paranoid() -> bool {
    PARANOID.load(Ordering::Relaxed)
}
