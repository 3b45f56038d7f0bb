//! Thread CPU-time clock for benchmark timing. Wall clocks would fold in
//! scheduler noise; benchmarks here compare CPU work on a single thread.

/// CPU seconds consumed by the calling thread so far.
pub fn thread_cpu_seconds() -> f64 {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) };
    assert_eq!(rc, 0, "clock_gettime(CLOCK_THREAD_CPUTIME_ID) failed");
    ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
}

/// Reported resolution of the thread CPU clock, in seconds, at least 1 ns.
pub fn timer_resolution_seconds() -> f64 {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    let rc = unsafe { libc::clock_getres(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) };
    assert_eq!(rc, 0, "clock_getres(CLOCK_THREAD_CPUTIME_ID) failed");
    (ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9).max(1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clock_is_monotone_and_advances_under_load() {
        let t0 = thread_cpu_seconds();
        let mut acc = 0u64;
        for i in 0..5_000_000u64 {
            acc = acc.wrapping_mul(6364136223846793005).wrapping_add(i);
        }
        std::hint::black_box(acc);
        let t1 = thread_cpu_seconds();
        assert!(t1 >= t0);
        assert!(t1 > t0, "5M multiply-adds should consume measurable CPU time");
    }

    #[test]
    fn resolution_is_positive() {
        let res = timer_resolution_seconds();
        assert!(res > 0.0);
        assert!(res < 1.0, "a CPU-time clock coarser than 1s is unusable");
    }
}
