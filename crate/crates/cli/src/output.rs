//! CSV, JSON and binary writers.

use crate::CliError;
use pmlbie::dense::CMat;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Magic bytes opening operators.bin.
pub const DUMP_MAGIC: &[u8; 8] = b"PMLBIEOP";
pub const DUMP_VERSION: u32 = 1;

/// 17 significant digits; non-finite values as `nan`, `inf`, `-inf`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub struct Csv {
    out: BufWriter<File>,
}

impl Csv {
    /// Opens `path` and writes the provenance comment and the header row.
    pub fn create(path: &Path, hash: &str, header: &[&str]) -> Result<Csv, CliError> {
        let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut out = BufWriter::new(f);
        writeln!(out, "# pmlbie {VERSION} config {hash}")?;
        writeln!(out, "{}", header.join(","))?;
        Ok(Csv { out })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        writeln!(self.out, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn comment(&mut self, text: &str) -> Result<(), CliError> {
        writeln!(self.out, "# {text}")?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush()?;
        Ok(())
    }
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Binary dump of named complex matrices, all little-endian:
/// magic, u32 version, u32 count, then per matrix u32 name length, the UTF-8
/// name, u64 rows, u64 cols and rows·cols (re, im) f64 pairs in row-major order.
pub fn write_dump(path: &Path, mats: &[(&str, &CMat)]) -> Result<(), CliError> {
    let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut out = BufWriter::new(f);
    out.write_all(DUMP_MAGIC)?;
    out.write_all(&DUMP_VERSION.to_le_bytes())?;
    out.write_all(&(mats.len() as u32).to_le_bytes())?;
    for (name, m) in mats {
        out.write_all(&(name.len() as u32).to_le_bytes())?;
        out.write_all(name.as_bytes())?;
        out.write_all(&(m.nrows() as u64).to_le_bytes())?;
        out.write_all(&(m.ncols() as u64).to_le_bytes())?;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                out.write_all(&z.re.to_le_bytes())?;
                out.write_all(&z.im.to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads back a dump written by [`write_dump`]: (name, rows, cols, row-major values).
pub fn read_dump(bytes: &[u8]) -> Result<Vec<(String, usize, usize, Vec<(f64, f64)>)>, CliError> {
    let bad = || CliError::Io("truncated or malformed operators.bin".into());
    let mut pos = 0usize;
    let mut take = |n: usize| -> Result<&[u8], CliError> {
        let s = bytes.get(pos..pos + n).ok_or_else(bad)?;
        pos += n;
        Ok(s)
    };
    if take(8)? != DUMP_MAGIC {
        return Err(CliError::Io("not an operators.bin file".into()));
    }
    let version = u32::from_le_bytes(take(4)?.try_into().unwrap());
    if version != DUMP_VERSION {
        return Err(CliError::Io(format!("unsupported dump version {version}")));
    }
    let count = u32::from_le_bytes(take(4)?.try_into().unwrap());
    let mut out = vec![];
    for _ in 0..count {
        let len = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
        let name = String::from_utf8(take(len)?.to_vec()).map_err(|_| bad())?;
        let rows = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
        let cols = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
        let mut vals = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let re = f64::from_le_bytes(take(8)?.try_into().unwrap());
            let im = f64::from_le_bytes(take(8)?.try_into().unwrap());
            vals.push((re, im));
        }
        out.push((name, rows, cols, vals));
    }
    Ok(out)
}
