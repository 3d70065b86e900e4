use std::collections::VecDeque;
use std::sync::Mutex;
use std::time::Duration;

use super::clock::Clock;

const WINDOW: Duration = Duration::from_secs(60);

/// Sliding-window limiter: at most `capacity` acquisitions in any 60 s window.
#[derive(Debug)]
pub struct RateLimiter {
    capacity: usize,
    issued: Mutex<VecDeque<Duration>>,
}

impl RateLimiter {
    /// Capacity is `requests_per_minute` rounded down, at least 1.
    pub fn new(requests_per_minute: f64) -> Self {
        Self {
            capacity: (requests_per_minute.floor() as usize).max(1),
            issued: Mutex::new(VecDeque::new()),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Block (on `clock`) until a request may be issued, then record it.
    /// Returns the issue time.
    pub fn acquire(&self, clock: &dyn Clock) -> Duration {
        loop {
            let wait = {
                let mut issued = self.issued.lock().unwrap();
                let now = clock.now();
                while issued.front().is_some_and(|&t| now >= t + WINDOW) {
                    issued.pop_front();
                }
                if issued.len() < self.capacity {
                    issued.push_back(now);
                    return now;
                }
                issued[0] + WINDOW - now
            };
            clock.sleep(wait);
        }
    }
}
