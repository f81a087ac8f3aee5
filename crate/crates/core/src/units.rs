//! Unit conventions.
//!
//! Traffic is measured in bytes, bandwidth in bits per second, latency and
//! processing delay in seconds, and money in currency units. Prefixes are
//! decimal (1 KB = 1e3 bytes, 1 GB = 1e9 bytes).

pub const BITS_PER_BYTE: f64 = 8.0;

pub const KB: f64 = 1e3;
pub const MB: f64 = 1e6;
pub const GB: f64 = 1e9;

pub const KBPS: f64 = 1e3;
pub const MBPS: f64 = 1e6;
pub const GBPS: f64 = 1e9;

pub const MS: f64 = 1e-3;

/// Seconds per byte from a "milliseconds per megabyte" figure.
pub fn ms_per_mb(v: f64) -> f64 {
    v * MS / MB
}

/// Currency per byte from a "currency per gigabyte" figure.
pub fn per_gb(v: f64) -> f64 {
    v / GB
}

/// Traffic in bytes expressed in bits.
pub fn bits(bytes: f64) -> f64 {
    bytes * BITS_PER_BYTE
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert_eq!(ms_per_mb(25.0) * MB, 0.025);
        assert!((per_gb(0.155) * GB - 0.155).abs() < 1e-15);
        assert_eq!(bits(80.0 * KB), 640_000.0);
    }
}
