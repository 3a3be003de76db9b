//! Good reduction along orbits and Fatou certificates.

use std::collections::HashMap;

use num_bigint::BigInt;
use serde::Serialize;

use super::{green_hat_n, GreenEstimate, DEFAULT_DEPTH};
use crate::error::Result;
use crate::morphism::{reduce_point, HomogeneousMap};
use crate::projective::ProjectivePoint;

/// Where the residue orbit of `P` ends up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitClassification {
    /// Every orbit point has good reduction; the reduced orbit is
    /// eventually periodic with the given preperiod and period.
    OrbitalGood { preperiod: u64, period: u64 },
    /// `φ^n(P)` is the first orbit point with bad reduction.
    BadAtIterate(u64),
}

impl OrbitClassification {
    pub fn is_orbital_good(&self) -> bool {
        matches!(self, OrbitClassification::OrbitalGood { .. })
    }

    pub fn to_json(&self) -> serde_json::Value {
        match *self {
            OrbitClassification::OrbitalGood { preperiod, period } => serde_json::json!({
                "verdict": "orbital_good",
                "preperiod": preperiod,
                "period": period,
            }),
            OrbitClassification::BadAtIterate(n) => serde_json::json!({
                "verdict": "bad",
                "at_iterate": n,
            }),
        }
    }
}

impl Serialize for OrbitClassification {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// `||Φ_min(x)|| = 1` for the normalized lift `x` of `P`.
pub fn good_reduction_at(map: &HomogeneousMap, point: &ProjectivePoint) -> Result<bool> {
    Ok(map.image_norm_valuation(point)? == 0)
}

/// Follow `P̃, φ̃(P̃), ...` over `F_p` until a residue point repeats or the
/// reduced map vanishes at one.
///
/// While good reduction holds, reduction commutes with `φ`, so the residue
/// orbit is the reduction of the true orbit. The walk visits at most
/// `|P^N(F_p)|` points.
pub fn classify_orbit(map: &HomogeneousMap, point: &ProjectivePoint) -> Result<OrbitClassification> {
    map.evaluate_integral(point)?;
    let reduced = map.reduce();
    let mut seen = HashMap::new();
    let mut cur = reduce_point(point).normalized();
    for k in 0u64.. {
        if let Some(&j) = seen.get(&cur) {
            return Ok(OrbitClassification::OrbitalGood {
                preperiod: j,
                period: k - j,
            });
        }
        let image = reduced.evaluate(&cur);
        if image.is_zero() {
            return Ok(OrbitClassification::BadAtIterate(k));
        }
        seen.insert(cur, k);
        cur = image.normalized();
    }
    unreachable!("residue orbit is finite")
}

/// Sampled agreement of `ĝ` brackets around `P`. Finitely many samples
/// cannot prove local constancy on a disk, so this is evidence only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalConstancyEvidence {
    pub label: &'static str,
    pub samples: usize,
    pub agreeing: usize,
    pub depth: u32,
    /// Distance valuations `w` of the sampled neighbours.
    pub radii: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FatouCertificate {
    /// `P` has orbital good reduction, so every iterate is nonexpanding on
    /// the open disk of radius `p^-radius_valuation = |Res(φ)|` around `P`.
    CertifiedFatou {
        radius_valuation: u64,
        via: OrbitClassification,
    },
    /// Orbital good reduction fails. A strictly negative bracket proves
    /// `ĝ(P) < 0`, which does not by itself place `P` in the Julia set.
    Unknown {
        classification: OrbitClassification,
        bracket: GreenEstimate,
        evidence: LocalConstancyEvidence,
    },
}

impl FatouCertificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, FatouCertificate::CertifiedFatou { .. })
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            FatouCertificate::CertifiedFatou {
                radius_valuation,
                via,
            } => serde_json::json!({
                "verdict": "certified_fatou",
                "nonexpanding_radius_valuation": radius_valuation,
                "via": via.to_json(),
            }),
            FatouCertificate::Unknown {
                classification,
                bracket,
                evidence,
            } => serde_json::json!({
                "verdict": "unknown",
                "classification": classification.to_json(),
                "bracket": bracket,
                "strictly_negative": bracket.upper().is_negative(),
                "evidence": evidence,
            }),
        }
    }
}

const EVIDENCE_SAMPLES: u64 = 4;

pub fn certify_fatou(map: &HomogeneousMap, point: &ProjectivePoint) -> Result<FatouCertificate> {
    let classification = classify_orbit(map, point)?;
    if classification.is_orbital_good() {
        return Ok(FatouCertificate::CertifiedFatou {
            radius_valuation: map.v_res(),
            via: classification,
        });
    }
    let bracket = green_hat_n(map, point, DEFAULT_DEPTH)?;
    let mut radii = Vec::new();
    let mut agreeing = 0;
    if point.dimension() > 0 {
        let v = map.v_res();
        let pivot = point.unit_indices()[0];
        let free: Vec<usize> = (0..=point.dimension()).filter(|&j| j != pivot).collect();
        for k in 0..EVIDENCE_SAMPLES {
            let w = v + 1 + k;
            let j = free[k as usize % free.len()];
            let near = point.displaced(j, w as u32, &BigInt::from(1))?;
            radii.push(w);
            if green_hat_n(map, &near, DEFAULT_DEPTH)?.partial_sum == bracket.partial_sum {
                agreeing += 1;
            }
        }
    }
    Ok(FatouCertificate::Unknown {
        classification,
        bracket,
        evidence: LocalConstancyEvidence {
            label: "heuristic",
            samples: radii.len(),
            agreeing,
            depth: DEFAULT_DEPTH,
            radii,
        },
    })
}
