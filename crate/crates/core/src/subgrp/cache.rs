//! Line-based cache of enumerated class representatives.
//!
//! ```text
//! # cartanlg subgroup cache v1
//! ell,target,order,pgl_type,gen1,gen2,gen3
//! 13,Nsp,48,S4,0:1:12:0,0:12:1:12,
//! ```
//!
//! Matrices are written `a:b:c:d`; unused generator slots are empty.

use std::io::{BufRead, Write};

use super::{closure, pgl_type, PglType, Subgroup};
use crate::cartan::StandardTarget;
use crate::error::Error;
use crate::ff::PrimeField;
use crate::mat::Mat2;

pub const CACHE_HEADER: &str = "# cartanlg subgroup cache v1";
const COLUMNS: &str = "ell,target,order,pgl_type,gen1,gen2,gen3";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheRecord {
    pub ell: u32,
    pub target: StandardTarget,
    pub order: usize,
    pub pgl_type: PglType,
    pub generators: Vec<Mat2>,
}

impl CacheRecord {
    pub fn from_group(f: &PrimeField, t: StandardTarget, g: &Subgroup) -> Self {
        CacheRecord {
            ell: f.ell(),
            target: t,
            order: g.order(),
            pgl_type: pgl_type(f, g),
            generators: g.generators().to_vec(),
        }
    }

    pub fn to_line(&self) -> String {
        let mut gens: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        gens.resize(3, String::new());
        format!(
            "{},{},{},{},{}",
            self.ell,
            self.target,
            self.order,
            self.pgl_type,
            gens.join(",")
        )
    }

    pub fn parse_line(line: &str) -> Result<Self, Error> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Record(format!("expected 7 fields in `{line}`")));
        }
        let num = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| Error::Record(format!("bad number `{s}`")))
        };
        let generators = fields[4..]
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<Mat2>())
            .collect::<Result<Vec<_>, _>>()?;
        if generators.len() > 3 {
            return Err(Error::Record("more than three generators".into()));
        }
        Ok(CacheRecord {
            ell: num(fields[0])? as u32,
            target: fields[1].parse()?,
            order: num(fields[2])? as usize,
            pgl_type: fields[3].parse()?,
            generators,
        })
    }

    /// Regenerates the subgroup and checks the recorded order and type.
    pub fn to_group(&self, f: &PrimeField) -> Result<Subgroup, Error> {
        if self.ell != f.ell() {
            return Err(Error::Record(format!("record is for l = {}", self.ell)));
        }
        let g = closure(f, &self.generators)?;
        if g.order() != self.order || pgl_type(f, &g) != self.pgl_type {
            return Err(Error::Record(format!("stale record `{}`", self.to_line())));
        }
        Ok(g)
    }
}

pub fn write_cache<W: Write>(
    mut out: W,
    f: &PrimeField,
    t: StandardTarget,
    groups: &[Subgroup],
) -> std::io::Result<()> {
    writeln!(out, "{CACHE_HEADER}")?;
    writeln!(out, "{COLUMNS}")?;
    for g in groups {
        writeln!(out, "{}", CacheRecord::from_group(f, t, g).to_line())?;
    }
    Ok(())
}

/// Reads a cache written by [`write_cache`] and regenerates every group.
pub fn read_cache<R: BufRead>(
    input: R,
    f: &PrimeField,
    t: StandardTarget,
) -> Result<Vec<Subgroup>, Error> {
    let mut lines = input.lines();
    let mut next = || -> Result<Option<String>, Error> {
        lines
            .next()
            .transpose()
            .map_err(|e| Error::Record(e.to_string()))
    };
    if next()?.as_deref() != Some(CACHE_HEADER) {
        return Err(Error::Record("missing or unsupported cache header".into()));
    }
    if next()?.as_deref() != Some(COLUMNS) {
        return Err(Error::Record("missing column line".into()));
    }
    let mut groups = Vec::new();
    while let Some(line) = next()? {
        if line.trim().is_empty() {
            continue;
        }
        let rec = CacheRecord::parse_line(&line)?;
        if rec.target != t {
            return Err(Error::Record(format!(
                "record is for target {}",
                rec.target
            )));
        }
        groups.push(rec.to_group(f)?);
    }
    Ok(groups)
}
