//! Process memory readings from `/proc` (Linux only; `None` elsewhere).

use std::fs;

/// Environment variable holding the memory ceiling in MiB.
pub const MEM_LIMIT_ENV: &str = "REDUCED_RIPS_MEM_LIMIT_MB";

/// Memory ceiling from [`MEM_LIMIT_ENV`], if set to a positive integer.
pub fn mem_limit_from_env() -> Option<u64> {
    std::env::var(MEM_LIMIT_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&v: &u64| v > 0)
}

/// Resident set size in MiB.
pub fn current_rss_mb() -> Option<u64> {
    let statm = fs::read_to_string("/proc/self/statm").ok()?;
    let pages: u64 = statm.split_whitespace().nth(1)?.parse().ok()?;
    Some(pages * 4096 / (1024 * 1024))
}

/// Peak resident set size in MiB.
pub fn peak_rss_mb() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[cfg(target_os = "linux")]
    fn readings_exist() {
        let rss = current_rss_mb().unwrap();
        let peak = peak_rss_mb().unwrap();
        assert!(peak >= rss || peak + 1 >= rss);
    }
}
