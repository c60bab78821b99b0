//! Command-line driver: configuration, orchestration and file I/O for the
//! `glparab` binary.

pub mod cli;
pub mod config;
pub mod io;
pub mod run;

/// Caps the worker pool at `GLPARAB_THREADS` when set.
pub fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("GLPARAB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("GLPARAB_THREADS must be a positive integer, got '{v}'"))?;
        if n == 0 {
            anyhow::bail!("GLPARAB_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
