//! Library side of the `kr` command: property suites, reports and artifacts.

pub mod artifacts;
pub mod report;
pub mod suites;

/// Global worker pool sized by `KR_THREADS` when set; rayon's default
/// otherwise.
pub fn init_thread_pool() -> Result<(), String> {
    let Ok(value) = std::env::var("KR_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| format!("KR_THREADS must be a positive integer, got `{value}`"))?;
    if threads == 0 {
        return Err("KR_THREADS must be a positive integer, got `0`".into());
    }
    // a second initialization (tests) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}
