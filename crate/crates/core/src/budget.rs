use std::cell::Cell;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Optional wall-clock limit for long searches. The clock is sampled only
/// every few hundred calls to `tick`.
#[derive(Debug, Clone)]
pub struct Deadline {
    until: Option<Instant>,
    calls: Cell<u32>,
}

impl Deadline {
    pub fn none() -> Self {
        Deadline {
            until: None,
            calls: Cell::new(0),
        }
    }

    pub fn after(d: Duration) -> Self {
        Deadline {
            until: Some(Instant::now() + d),
            calls: Cell::new(0),
        }
    }

    pub fn at(until: Option<Instant>) -> Self {
        Deadline {
            until,
            calls: Cell::new(0),
        }
    }

    pub fn instant(&self) -> Option<Instant> {
        self.until
    }

    pub fn expired(&self) -> bool {
        self.until.is_some_and(|t| Instant::now() >= t)
    }

    #[inline]
    pub fn tick(&self) -> Result<()> {
        let Some(t) = self.until else { return Ok(()) };
        let c = self.calls.get().wrapping_add(1);
        self.calls.set(c);
        if c.is_multiple_of(256) && Instant::now() >= t {
            return Err(Error::Timeout);
        }
        Ok(())
    }
}

impl Default for Deadline {
    fn default() -> Self {
        Deadline::none()
    }
}
