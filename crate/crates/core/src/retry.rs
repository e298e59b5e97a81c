//! Bounded retry with exponential backoff, shared by network clients.

use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use tracing::warn;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    /// Total attempts including the first one. At least 1.
    pub max_attempts: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
    pub multiplier: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            initial_backoff_ms: 500,
            max_backoff_ms: 8_000,
            multiplier: 2.0,
        }
    }
}

impl RetryPolicy {
    pub fn none() -> Self {
        Self {
            max_attempts: 1,
            ..Self::default()
        }
    }

    /// Delay before attempt `n + 1` after `n` failures (`n >= 1`).
    pub fn backoff(&self, failures: u32) -> Duration {
        let exp = self.multiplier.max(1.0).powi(failures.saturating_sub(1) as i32);
        let ms = (self.initial_backoff_ms as f64 * exp).min(self.max_backoff_ms as f64);
        Duration::from_millis(ms as u64)
    }
}

/// Outcome of a retried operation: the value or the last error, plus the
/// number of attempts made.
#[derive(Debug)]
pub struct Attempted<T> {
    pub result: T,
    pub attempts: u32,
}

/// Runs `op` until it succeeds, returns a non-retryable error, or the
/// policy's attempts are exhausted. `op` receives the 1-based attempt number.
pub fn retry<T, E, F, R>(policy: &RetryPolicy, retryable: R, mut op: F) -> Attempted<Result<T, E>>
where
    F: FnMut(u32) -> Result<T, E>,
    R: Fn(&E) -> bool,
    E: std::fmt::Display,
{
    let max = policy.max_attempts.max(1);
    let mut attempt = 1;
    loop {
        match op(attempt) {
            Ok(v) => {
                return Attempted {
                    result: Ok(v),
                    attempts: attempt,
                }
            }
            Err(e) if attempt < max && retryable(&e) => {
                let wait = policy.backoff(attempt);
                warn!(attempt, max, error = %e, ?wait, "retrying");
                thread::sleep(wait);
                attempt += 1;
            }
            Err(e) => {
                return Attempted {
                    result: Err(e),
                    attempts: attempt,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast(max_attempts: u32) -> RetryPolicy {
        RetryPolicy {
            max_attempts,
            initial_backoff_ms: 1,
            max_backoff_ms: 2,
            multiplier: 2.0,
        }
    }

    #[test]
    fn backoff_grows_and_caps() {
        let p = RetryPolicy::default();
        assert_eq!(p.backoff(1), Duration::from_millis(500));
        assert_eq!(p.backoff(2), Duration::from_millis(1000));
        assert_eq!(p.backoff(10), Duration::from_millis(8000));
    }

    #[test]
    fn succeeds_after_transient_failures() {
        let out = retry(&fast(5), |_: &String| true, |n| if n < 3 { Err("boom".to_string()) } else { Ok(n) });
        assert_eq!(out.result.unwrap(), 3);
        assert_eq!(out.attempts, 3);
    }

    #[test]
    fn stops_on_permanent_error() {
        let out = retry(&fast(5), |e: &String| e != "fatal", |_| Err::<(), _>("fatal".to_string()));
        assert_eq!(out.attempts, 1);
    }

    #[test]
    fn exhausts_attempts() {
        let out = retry(&fast(3), |_: &String| true, |_| Err::<(), _>("x".to_string()));
        assert!(out.result.is_err());
        assert_eq!(out.attempts, 3);
    }
}
