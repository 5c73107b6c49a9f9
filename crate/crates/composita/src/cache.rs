//! On-disk persistence for enumeration results: one binary file per
//! (kind, parameters) under cache/{kind}/{params-hash}.bin, a JSON manifest
//! listing every entry, and CSV exports for external tooling.

use crate::abelian::ConductorRecord;
use crate::cubic::{BinaryCubicForm, FieldRecord, GaloisType, LocalDatum};
use crate::error::{Error, Result};
use crate::permgroup::TameInertia;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 4] = b"CPSA";
const VERSION: u32 = 1;

/// Stable 64-bit FNV-1a over the canonical parameter string; keys the cache
/// file name so distinct parameter sets never collide in practice and equal
/// ones always hit.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CacheParams {
    pub kind: String,
    pub params: BTreeMap<String, String>,
}

impl CacheParams {
    pub fn new(kind: &str, params: &[(&str, String)]) -> Self {
        CacheParams {
            kind: kind.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        }
    }

    pub fn hash(&self) -> String {
        let mut canon = self.kind.clone();
        for (k, v) in &self.params {
            canon.push(';');
            canon.push_str(k);
            canon.push('=');
            canon.push_str(v);
        }
        format!("{:016x}", fnv1a(canon.as_bytes()))
    }

    pub fn path(&self, root: &Path) -> PathBuf {
        root.join(&self.kind).join(format!("{}.bin", self.hash()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub kind: String,
    pub params: BTreeMap<String, String>,
    pub hash: String,
    pub file: String,
    pub count: u64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn load(root: &Path) -> Result<Manifest> {
        let path = root.join("manifest.json");
        if !path.exists() {
            return Ok(Manifest::default());
        }
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Cache(format!("manifest: {e}")))
    }

    pub fn record(root: &Path, params: &CacheParams, count: u64) -> Result<()> {
        let mut manifest = Manifest::load(root)?;
        let hash = params.hash();
        manifest.entries.retain(|e| e.hash != hash || e.kind != params.kind);
        manifest.entries.push(ManifestEntry {
            kind: params.kind.clone(),
            params: params.params.clone(),
            hash: hash.clone(),
            file: format!("{}/{}.bin", params.kind, hash),
            count,
        });
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::Cache(format!("manifest: {e}")))?;
        fs::write(root.join("manifest.json"), text)?;
        Ok(())
    }
}

fn write_u32(w: &mut impl Write, v: u32) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn write_u64(w: &mut impl Write, v: u64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn write_i64(w: &mut impl Write, v: i64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn read_exact<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    Ok(u32::from_le_bytes(read_exact::<4>(r)?))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    Ok(u64::from_le_bytes(read_exact::<8>(r)?))
}

fn read_i64(r: &mut impl Read) -> Result<i64> {
    Ok(i64::from_le_bytes(read_exact::<8>(r)?))
}

fn write_header(w: &mut impl Write, params: &CacheParams, count: u64) -> Result<()> {
    w.write_all(MAGIC)?;
    write_u32(w, VERSION)?;
    let canon = serde_json::to_string(params).map_err(|e| Error::Cache(e.to_string()))?;
    write_u32(w, canon.len() as u32)?;
    w.write_all(canon.as_bytes())?;
    write_u64(w, count)?;
    Ok(())
}

fn read_header(r: &mut impl Read, expect: &CacheParams) -> Result<u64> {
    if &read_exact::<4>(r)? != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(Error::Cache(format!("unsupported cache version {version}")));
    }
    let len = read_u32(r)? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    let params: CacheParams = serde_json::from_slice(&buf)
        .map_err(|e| Error::Cache(format!("header params: {e}")))?;
    if &params != expect {
        return Err(Error::Cache("cache parameter mismatch (hash collision?)".into()));
    }
    read_u64(r)
}

/// Record layout: sign byte, disc magnitude (u32 length + little-endian
/// bytes), galois tag, optional form coefficients.
pub fn write_cubic_cache(root: &Path, params: &CacheParams, records: &[FieldRecord]) -> Result<()> {
    let path = params.path(root);
    fs::create_dir_all(path.parent().unwrap())?;
    let mut w = std::io::BufWriter::new(fs::File::create(&path)?);
    write_header(&mut w, params, records.len() as u64)?;
    for rec in records {
        w.write_all(&[rec.sign as u8])?;
        let mag = rec.abs_disc.to_bytes_le();
        write_u32(&mut w, mag.len() as u32)?;
        w.write_all(&mag)?;
        let tag = match rec.galois {
            GaloisType::S3 => 0u8,
            GaloisType::C3 => 1,
            GaloisType::Cl(ell) => {
                return Err(Error::Cache(format!("C{ell} record in cubic cache")))
            }
        };
        w.write_all(&[tag])?;
        match &rec.form {
            Some(f) => {
                w.write_all(&[1])?;
                let (a, b, c, d) = f.coeffs();
                for v in [a, b, c, d] {
                    write_i64(&mut w, v)?;
                }
            }
            None => w.write_all(&[0])?,
        }
        write_u32(&mut w, rec.ram.len() as u32)?;
        for (&p, datum) in &rec.ram {
            write_u64(&mut w, p)?;
            // tag byte + two u32 payloads (zero where unused)
            let (tag, x, y) = match datum {
                LocalDatum::Tame(TameInertia::Unramified) => (0u8, 0u32, 0u32),
                LocalDatum::Tame(TameInertia::S3Partial) => (1, 0, 0),
                LocalDatum::Tame(TameInertia::S3Total) => (2, 0, 0),
                LocalDatum::Tame(TameInertia::AbelianElem { order }) => (3, *order, 0),
                LocalDatum::Wild { p, disc_exponent } => (4, *p, *disc_exponent),
            };
            w.write_all(&[tag])?;
            write_u32(&mut w, x)?;
            write_u32(&mut w, y)?;
        }
    }
    w.flush()?;
    Manifest::record(root, params, records.len() as u64)
}

pub fn read_cubic_cache(root: &Path, params: &CacheParams) -> Result<Vec<FieldRecord>> {
    let mut r = std::io::BufReader::new(fs::File::open(params.path(root))?);
    let count = read_header(&mut r, params)?;
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let sign = read_exact::<1>(&mut r)?[0] as i8;
        let len = read_u32(&mut r)? as usize;
        let mut mag = vec![0u8; len];
        r.read_exact(&mut mag)?;
        let abs_disc = BigUint::from_bytes_le(&mag);
        let galois = match read_exact::<1>(&mut r)?[0] {
            0 => GaloisType::S3,
            1 => GaloisType::C3,
            t => return Err(Error::Cache(format!("bad galois tag {t}"))),
        };
        let form = match read_exact::<1>(&mut r)?[0] {
            0 => None,
            1 => {
                let (a, b, c, d) =
                    (read_i64(&mut r)?, read_i64(&mut r)?, read_i64(&mut r)?, read_i64(&mut r)?);
                Some(BinaryCubicForm::new(a, b, c, d))
            }
            t => return Err(Error::Cache(format!("bad form tag {t}"))),
        };
        let ram_len = read_u32(&mut r)?;
        let mut ram = std::collections::BTreeMap::new();
        for _ in 0..ram_len {
            let p = read_u64(&mut r)?;
            let tag = read_exact::<1>(&mut r)?[0];
            let x = read_u32(&mut r)?;
            let y = read_u32(&mut r)?;
            let datum = match tag {
                0 => LocalDatum::Tame(TameInertia::Unramified),
                1 => LocalDatum::Tame(TameInertia::S3Partial),
                2 => LocalDatum::Tame(TameInertia::S3Total),
                3 => LocalDatum::Tame(TameInertia::AbelianElem { order: x }),
                4 => LocalDatum::Wild { p: x, disc_exponent: y },
                t => return Err(Error::Cache(format!("bad local datum tag {t}"))),
            };
            ram.insert(p, datum);
        }
        out.push(FieldRecord { abs_disc, sign, galois, ram, form });
    }
    Ok(out)
}

/// Record layout: conductor, disc, num_fields (u64 each).
pub fn write_abelian_cache(
    root: &Path,
    params: &CacheParams,
    records: &[ConductorRecord],
) -> Result<()> {
    let path = params.path(root);
    fs::create_dir_all(path.parent().unwrap())?;
    let mut w = std::io::BufWriter::new(fs::File::create(&path)?);
    write_header(&mut w, params, records.len() as u64)?;
    for rec in records {
        write_u64(&mut w, rec.conductor)?;
        write_u64(&mut w, rec.disc)?;
        write_u64(&mut w, rec.num_fields)?;
    }
    w.flush()?;
    Manifest::record(root, params, records.len() as u64)
}

pub fn read_abelian_cache(
    root: &Path,
    params: &CacheParams,
    ell: u32,
) -> Result<Vec<ConductorRecord>> {
    let mut r = std::io::BufReader::new(fs::File::open(params.path(root))?);
    let count = read_header(&mut r, params)?;
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        out.push(ConductorRecord {
            ell,
            conductor: read_u64(&mut r)?,
            disc: read_u64(&mut r)?,
            num_fields: read_u64(&mut r)?,
        });
    }
    Ok(out)
}

/// Columns: disc, a, b, c, d, galois_type. Missing forms (C3 records carry
/// one; caches round-trip it) leave the coefficient columns empty.
pub fn export_cubic_csv(w: impl Write, records: &[FieldRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["disc", "a", "b", "c", "d", "galois_type"])?;
    for rec in records {
        let disc = rec
            .signed_disc_i64()
            .map(|d| d.to_string())
            .unwrap_or_else(|| format!("{}{}", if rec.sign < 0 { "-" } else { "" }, rec.abs_disc));
        let galois = match rec.galois {
            GaloisType::S3 => "S3".to_string(),
            GaloisType::C3 => "C3".to_string(),
            GaloisType::Cl(ell) => format!("C{ell}"),
        };
        match &rec.form {
            Some(f) => {
                let (a, b, c, d) = f.coeffs();
                out.write_record([
                    disc,
                    a.to_string(),
                    b.to_string(),
                    c.to_string(),
                    d.to_string(),
                    galois,
                ])?;
            }
            None => out.write_record([disc, String::new(), String::new(), String::new(), String::new(), galois])?,
        }
    }
    out.flush()?;
    Ok(())
}

/// Columns: conductor, disc, num_fields.
pub fn export_abelian_csv(w: impl Write, records: &[ConductorRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["conductor", "disc", "num_fields"])?;
    for rec in records {
        out.write_record([
            rec.conductor.to_string(),
            rec.disc.to_string(),
            rec.num_fields.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::enumerate_conductors;
    use crate::cubic::enumerate_cubic_fields;

    #[test]
    fn cubic_cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let records = enumerate_cubic_fields(500).unwrap();
        let params = CacheParams::new("cubic", &[("max_disc", "500".into())]);
        write_cubic_cache(dir.path(), &params, &records).unwrap();
        let back = read_cubic_cache(dir.path(), &params).unwrap();
        assert_eq!(records.len(), back.len());
        for (a, b) in records.iter().zip(&back) {
            assert_eq!(a.abs_disc, b.abs_disc);
            assert_eq!(a.sign, b.sign);
            assert_eq!(a.galois, b.galois);
            assert_eq!(a.form, b.form);
            assert_eq!(a.ram, b.ram, "local data must round-trip at {}", a.abs_disc);
        }
        let manifest = Manifest::load(dir.path()).unwrap();
        assert_eq!(manifest.entries.len(), 1);
        assert_eq!(manifest.entries[0].count, records.len() as u64);
        // differing params never alias
        let other = CacheParams::new("cubic", &[("max_disc", "501".into())]);
        assert_ne!(params.hash(), other.hash());
        assert!(read_cubic_cache(dir.path(), &other).is_err());
    }

    #[test]
    fn abelian_cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let records = enumerate_conductors(5, 100_000_000).unwrap();
        let params = CacheParams::new(
            "abelian",
            &[("ell", "5".into()), ("max_disc", "100000000".into())],
        );
        write_abelian_cache(dir.path(), &params, &records).unwrap();
        let back = read_abelian_cache(dir.path(), &params, 5).unwrap();
        assert_eq!(records, back);
    }

    #[test]
    fn csv_schemas() {
        let records = enumerate_cubic_fields(100).unwrap();
        let mut buf = Vec::new();
        export_cubic_csv(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "disc,a,b,c,d,galois_type");
        assert_eq!(lines.count(), records.len());
        assert!(text.contains("-23,"));

        let conductors = enumerate_conductors(5, 20_000_000).unwrap();
        let mut buf = Vec::new();
        export_abelian_csv(&mut buf, &conductors).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "conductor,disc,num_fields");
        // single-prime conductor 11 carries one field, disc 11^4
        assert!(text.contains("11,14641,1"));
    }
}
