//! The bundled test maps.

use crate::error::Result;
use crate::morphism::HomogeneousMap;
use crate::padic::PrimeContext;

pub const CORPUS_PRIMES: [u64; 4] = [2, 3, 5, 97];

pub const CORPUS_FORMS: [&str; 4] = [
    "X^2 : Y^2",
    "X^2 : 3*Y^2",
    "X^2 + 3*Y^2 : Y^2",
    "X^2 + X*Y : Y^2 + 3*X^2",
];

/// The one map on `P^2`, taken over `p = 3`.
pub const CORPUS_PLANE: (&str, u64) = ("X^2 : Y^2 : 3*Z^2", 3);

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub map: HomogeneousMap,
}

pub fn corpus() -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for forms in CORPUS_FORMS {
        for p in CORPUS_PRIMES {
            out.push(entry(forms, p)?);
        }
    }
    out.push(entry(CORPUS_PLANE.0, CORPUS_PLANE.1)?);
    Ok(out)
}

fn entry(forms: &str, p: u64) -> Result<CorpusEntry> {
    Ok(CorpusEntry {
        name: format!("({forms}) p={p}"),
        map: HomogeneousMap::parse_forms(PrimeContext::new(p)?, forms)?,
    })
}
