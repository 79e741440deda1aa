//! Time source abstraction so planners can enforce wall-clock budgets while
//! staying testable and `no_std`.

/// Monotonic elapsed-time source, in seconds since some fixed origin.
pub trait Clock {
    fn seconds(&self) -> f64;
}

/// Clock frozen at a constant; planners driven by it never hit their time
/// budget, which keeps tests deterministic.
#[derive(Clone, Copy, Debug, Default)]
pub struct FixedClock(pub f64);

impl Clock for FixedClock {
    fn seconds(&self) -> f64 {
        self.0
    }
}

impl<F: Fn() -> f64> Clock for F {
    fn seconds(&self) -> f64 {
        self()
    }
}
