use std::collections::VecDeque;
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

/// Extra spacing added to the one-second window so that timestamps taken
/// slightly after a grant still respect the limit.
const WINDOW_GUARD: Duration = Duration::from_millis(10);

/// Sliding-window limiter shared by every download worker.
///
/// At most `per_second` grants are issued in any window of one second.
/// It is the only point of coordination between workers.
#[derive(Debug)]
pub struct RateLimiter {
    per_second: usize,
    window: Duration,
    grants: Mutex<VecDeque<Instant>>,
}

impl RateLimiter {
    pub fn new(per_second: u32) -> Self {
        let per_second = per_second.max(1) as usize;
        RateLimiter {
            per_second,
            window: Duration::from_secs(1) + WINDOW_GUARD,
            grants: Mutex::new(VecDeque::with_capacity(per_second)),
        }
    }

    /// Blocks until a request may be initiated and returns the grant time.
    pub fn acquire(&self) -> Instant {
        loop {
            let wait = {
                let mut grants = self.grants.lock().unwrap_or_else(|e| e.into_inner());
                let now = Instant::now();
                while grants.front().is_some_and(|&t| now.duration_since(t) >= self.window) {
                    grants.pop_front();
                }
                if grants.len() < self.per_second {
                    grants.push_back(now);
                    return now;
                }
                // Full window: wait until the oldest grant ages out.
                self.window - now.duration_since(grants[0])
            };
            thread::sleep(wait);
        }
    }

    pub fn per_second(&self) -> usize {
        self.per_second
    }
}
