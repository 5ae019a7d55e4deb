use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use pclab_core::arith::cache;
use pclab_core::zerodata::riemann_siegel::compute_zeros;
use pclab_core::{LambdaTable, Origin, ZeroOrdinates};

pub const ZERO_COUNT: usize = 100_000;

/// `PCLAB_CACHE_DIR`, else a directory under cargo's per-target scratch space.
pub fn cache_dir() -> PathBuf {
    std::env::var_os("PCLAB_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_TARGET_TMPDIR")).join("pclab-cache"))
}

pub fn zeros_path() -> PathBuf {
    cache_dir().join(format!("zeros_{ZERO_COUNT}.txt"))
}

pub fn sieve_path(range_end: u64) -> PathBuf {
    cache_dir().join(format!("lambda_{range_end}.bin"))
}

/// The first [`ZERO_COUNT`] zeros, computed once and cached.
pub fn zeros() -> Result<ZeroOrdinates> {
    let path = zeros_path();
    if let Ok(z) = ZeroOrdinates::read(&path) {
        if z.len() == ZERO_COUNT {
            return Ok(z);
        }
    }
    std::fs::create_dir_all(cache_dir())?;
    let g = compute_zeros(ZERO_COUNT)?;
    let top = *g.last().context("no zeros")?;
    let z = ZeroOrdinates::new(g, top, Origin::RiemannFile)?;
    let staging = path.with_extension(format!("{}.part", std::process::id()));
    z.write(&staging)?;
    std::fs::rename(&staging, &path)?;
    Ok(z)
}

pub fn sieve(range_end: u64) -> Result<LambdaTable> {
    Ok(cache::load_or_sieve(sieve_path(range_end), range_end)?)
}
