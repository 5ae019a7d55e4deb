//! Binary sieve cache.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic   8 bytes  "PCLABLT1"
//! N       u64      sieve range end
//! count   u64      number of entries
//! entries count × { delta: LEB128 varint (n minus previous n, first from 0),
//!                   lambda: f64 }
//! ```

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{LabError, Result};

use super::LambdaTable;

pub const MAGIC: &[u8; 8] = b"PCLABLT1";

fn write_varint(out: &mut impl Write, mut v: u64) -> std::io::Result<()> {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            return out.write_all(&[byte]);
        }
        out.write_all(&[byte | 0x80])?;
    }
}

fn read_varint(input: &mut impl Read) -> std::io::Result<u64> {
    let mut v = 0u64;
    let mut shift = 0;
    loop {
        let mut b = [0u8];
        input.read_exact(&mut b)?;
        v |= ((b[0] & 0x7f) as u64) << shift;
        if b[0] & 0x80 == 0 {
            return Ok(v);
        }
        shift += 7;
        if shift > 63 {
            return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, "varint overflow"));
        }
    }
}

pub fn encode(table: &LambdaTable, out: &mut impl Write) -> std::io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&table.range_end().to_le_bytes())?;
    out.write_all(&(table.len() as u64).to_le_bytes())?;
    let mut prev = 0u64;
    for (n, l) in table.iter() {
        write_varint(out, n - prev)?;
        out.write_all(&l.to_le_bytes())?;
        prev = n;
    }
    Ok(())
}

pub fn decode(input: &mut impl Read) -> std::io::Result<(u64, Vec<u32>, Vec<f64>)> {
    let bad = |m: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, m.to_string());
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("not a sieve cache"));
    }
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let range_end = u64::from_le_bytes(word);
    input.read_exact(&mut word)?;
    let count = u64::from_le_bytes(word) as usize;
    if count as u64 > range_end {
        return Err(bad("entry count exceeds range"));
    }
    let mut n = Vec::with_capacity(count);
    let mut lambda = Vec::with_capacity(count);
    let mut prev = 0u64;
    for _ in 0..count {
        prev += read_varint(input)?;
        if prev > u32::MAX as u64 {
            return Err(bad("entry out of range"));
        }
        input.read_exact(&mut word)?;
        n.push(prev as u32);
        lambda.push(f64::from_le_bytes(word));
    }
    Ok((range_end, n, lambda))
}

pub fn save(table: &LambdaTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    // Written beside the target and renamed so readers never see a partial file.
    let mut staging = path.as_os_str().to_owned();
    staging.push(format!(".{}.part", std::process::id()));
    let staging = std::path::PathBuf::from(staging);
    let file = std::fs::File::create(&staging).map_err(|e| LabError::io(&staging, e))?;
    let mut out = BufWriter::new(file);
    encode(table, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| LabError::io(&staging, e))?;
    drop(out);
    std::fs::rename(&staging, path).map_err(|e| LabError::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<LambdaTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| LabError::io(path, e))?;
    let (range_end, n, lambda) = decode(&mut BufReader::new(file)).map_err(|e| LabError::io(path, e))?;
    LambdaTable::from_entries(range_end, n, lambda)
}

/// Load the cache at `path` when it covers `range_end`, otherwise sieve and
/// write it.
pub fn load_or_sieve(path: impl AsRef<Path>, range_end: u64) -> Result<LambdaTable> {
    let path = path.as_ref();
    if let Ok(table) = load(path) {
        if table.range_end() == range_end {
            return Ok(table);
        }
    }
    let table = super::sieve_lambda(range_end)?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    save(&table, path)?;
    Ok(table)
}
