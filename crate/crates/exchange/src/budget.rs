//! Wall-clock limits for the solver.

use std::time::{Duration, Instant};

use typed_exchange_core::sat::{Budget, Interrupt};

/// Stops the solver once a fixed instant has passed.
#[derive(Clone, Copy, Debug)]
pub struct Deadline {
    at: Option<Instant>,
}

impl Deadline {
    /// `None` never fires.
    pub fn after_ms(ms: Option<u64>) -> Self {
        Self {
            at: ms.map(|ms| Instant::now() + Duration::from_millis(ms)),
        }
    }

    pub fn never() -> Self {
        Self { at: None }
    }

    pub fn is_set(&self) -> bool {
        self.at.is_some()
    }

    /// A solver budget with this deadline and an optional conflict cap.
    pub fn budget(&self, conflicts: Option<u64>) -> Budget<'_> {
        let b = Budget {
            max_conflicts: conflicts,
            interrupt: None,
        };
        if self.is_set() {
            b.with_interrupt(self)
        } else {
            b
        }
    }
}

impl Interrupt for Deadline {
    fn should_stop(&self) -> bool {
        self.at.is_some_and(|at| Instant::now() >= at)
    }
}
