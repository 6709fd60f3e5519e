use std::sync::Once;

/// Environment variable bounding the worker pool.
pub const THREADS_VAR: &str = "VCREG_THREADS";

/// Sizes the global rayon pool from `VCREG_THREADS` (all cores when unset).
pub fn init() {
    static INIT: Once = Once::new();
    INIT.call_once(|| {
        let n = std::env::var(THREADS_VAR)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0);
        if let Some(n) = n {
            // Fails only if a pool already exists, which then stays in charge.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    });
}
