//! JSON data-transfer types: stable, strict (unknown fields rejected)
//! encodings of the core values.
//!
//! Schema notes: `valuation: null` encodes the canonical zero (valuation
//! `+inf`); Witt digits are coordinate vectors of residue-field elements
//! with respect to the shipped modulus; rationals are `[numerator,
//! denominator]` pairs; `"inf"` stands for the infinite radius.

use std::sync::Arc;

use perikos_core::actions::{Deformation, ODElem, TowerPoint, WeilElem};
use perikos_core::ff_curve::{AdicPoint, BundleFF, ExtRat, Locus, ModificationTriple};
use perikos_core::formal_groups::Height;
use perikos_core::isocrystals::{KottwitzClass, SlopeData};
use perikos_core::matrix::Mat;
use perikos_core::parith::{Coeff, FqElem, PSeries, Padic, WittElem, WittRing};
use perikos_core::period_map::ProjPoint;
use perikos_core::Rat;
use serde::{Deserialize, Serialize};

/// Conversion failures are schema-level errors.
pub type DtoResult<T> = Result<T, String>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PadicJson {
    pub prime: u64,
    /// `null` encodes valuation `+inf` (the canonical zero).
    pub valuation: Option<i64>,
    pub digits: Vec<u64>,
    pub abs_precision: i64,
}

impl PadicJson {
    pub fn from_core(x: &Padic) -> Self {
        PadicJson {
            prime: x.prime(),
            valuation: x.valuation(),
            digits: x.digits(),
            abs_precision: x.abs_prec(),
        }
    }

    pub fn to_core(&self) -> DtoResult<Padic> {
        match self.valuation {
            None => Ok(Padic::zero(self.prime, self.abs_precision)),
            Some(v) => {
                let x = Padic::from_digits(self.prime, v, &self.digits, self.abs_precision);
                Ok(x)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WittJson {
    pub prime: u64,
    pub m: u32,
    pub valuation: Option<i64>,
    /// Teichmuller digits as coordinate vectors over the prime field.
    pub teich_digits: Vec<Vec<u64>>,
    pub abs_precision: i64,
}

impl WittJson {
    pub fn from_core(x: &WittElem) -> Self {
        WittJson {
            prime: x.prime(),
            m: x.field_degree(),
            valuation: x.valuation(),
            teich_digits: x
                .teich_digits()
                .iter()
                .map(|d| d.coeffs().to_vec())
                .collect(),
            abs_precision: x.abs_prec(),
        }
    }

    pub fn to_core(&self, ring: &Arc<WittRing>) -> DtoResult<WittElem> {
        if self.prime != ring.p() || self.m != ring.m() {
            return Err(format!(
                "witt element over W(F_{}^{}) does not match ring W(F_{}^{})",
                self.prime,
                self.m,
                ring.p(),
                ring.m()
            ));
        }
        match self.valuation {
            None => Ok(WittElem::zero(ring.clone(), self.abs_precision)),
            Some(v) => {
                let digits: Vec<FqElem> = self
                    .teich_digits
                    .iter()
                    .map(|c| FqElem::new(ring.fq().clone(), c.clone()))
                    .collect::<Result<_, _>>()
                    .map_err(|e| e.to_string())?;
                WittElem::from_teich_digits(ring.clone(), v, &digits, self.abs_precision)
                    .map_err(|e| e.to_string())
            }
        }
    }
}

/// Matrix / division-algebra coefficients: a plain integer or a full Witt
/// element document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WittEntryJson {
    Int(i64),
    Witt(WittJson),
}

impl WittEntryJson {
    pub fn to_core(&self, ring: &Arc<WittRing>, prec: i64) -> DtoResult<WittElem> {
        match self {
            WittEntryJson::Int(n) => Ok(WittElem::from_integer(ring.clone(), *n, prec)),
            WittEntryJson::Witt(w) => w.to_core(ring),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub entries: Vec<Vec<WittEntryJson>>,
}

impl MatrixJson {
    pub fn from_core(m: &Mat<WittElem>) -> Self {
        let n = m.size();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| WittEntryJson::Witt(WittJson::from_core(m.at(i, j))))
                    .collect()
            })
            .collect();
        MatrixJson { entries }
    }

    pub fn to_core(&self, ring: &Arc<WittRing>, prec: i64) -> DtoResult<Mat<WittElem>> {
        let n = self.entries.len();
        if self.entries.iter().any(|row| row.len() != n) {
            return Err("matrix rows must all have the same length as the row count".into());
        }
        let mut data = Vec::with_capacity(n * n);
        for row in &self.entries {
            for e in row {
                data.push(e.to_core(ring, prec)?);
            }
        }
        Mat::new(n, data).map_err(|e| e.to_string())
    }
}

pub type RatJson = [i64; 2];

pub fn rat_from_json(r: RatJson) -> DtoResult<Rat> {
    if r[1] == 0 {
        return Err("rational with zero denominator".into());
    }
    Ok(Rat::new(r[0] as i128, r[1] as i128))
}

pub fn rat_to_json(r: Rat) -> RatJson {
    [*r.numer() as i64, *r.denom() as i64]
}

/// Slope data / bundles: `[numerator, denominator, multiplicity]` triples.
pub type SlopeTriple = [i64; 3];

pub fn slope_data_to_json(s: &SlopeData) -> Vec<SlopeTriple> {
    s.pairs()
        .iter()
        .map(|&(sl, m)| [*sl.numer() as i64, *sl.denom() as i64, m as i64])
        .collect()
}

pub fn slope_data_from_json(v: &[SlopeTriple]) -> DtoResult<SlopeData> {
    let pairs = v
        .iter()
        .map(|&[n, d, m]| {
            if d == 0 {
                return Err("slope with zero denominator".to_string());
            }
            if m < 0 {
                return Err("negative multiplicity".to_string());
            }
            Ok((Rat::new(n as i128, d as i128), m as u32))
        })
        .collect::<DtoResult<Vec<_>>>()?;
    SlopeData::new(pairs).map_err(|e| e.to_string())
}

pub fn bundle_to_json(b: &BundleFF) -> Vec<SlopeTriple> {
    b.summands()
        .iter()
        .map(|&(sl, m)| [*sl.numer() as i64, *sl.denom() as i64, m as i64])
        .collect()
}

pub fn bundle_from_json(v: &[SlopeTriple]) -> DtoResult<BundleFF> {
    let summands = v
        .iter()
        .map(|&[n, d, m]| {
            if d == 0 {
                return Err("slope with zero denominator".to_string());
            }
            if m < 0 {
                return Err("negative multiplicity".to_string());
            }
            Ok((Rat::new(n as i128, d as i128), m as u32))
        })
        .collect::<DtoResult<Vec<_>>>()?;
    BundleFF::new(summands).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KottwitzClassJson {
    pub h: u32,
    pub slopes: Vec<SlopeTriple>,
    pub in_b_prime: bool,
}

impl KottwitzClassJson {
    pub fn from_core(c: &KottwitzClass) -> Self {
        KottwitzClassJson {
            h: c.h(),
            slopes: slope_data_to_json(c.slope_data()),
            in_b_prime: c.in_b_prime(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffRingJson {
    pub kind: String,
    pub prime: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub c: PadicJson,
}

/// Truncated power series over `Q_p` (the CLI's coefficient surface).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub coeff_ring: CoeffRingJson,
    pub num_vars: usize,
    pub trunc_order: usize,
    pub coeffs: Vec<TermJson>,
}

impl SeriesJson {
    pub fn from_core(s: &PSeries<Padic>, prime: u64) -> Self {
        SeriesJson {
            coeff_ring: CoeffRingJson {
                kind: "padic".into(),
                prime,
                m: None,
            },
            num_vars: s.num_vars(),
            trunc_order: s.trunc_order(),
            coeffs: s
                .terms()
                .map(|(e, c)| TermJson {
                    exps: e.clone(),
                    c: PadicJson::from_core(c),
                })
                .collect(),
        }
    }

    pub fn to_core(&self) -> DtoResult<PSeries<Padic>> {
        if self.coeff_ring.kind != "padic" {
            return Err(format!(
                "unsupported coefficient ring kind {:?} (series documents use \"padic\")",
                self.coeff_ring.kind
            ));
        }
        let terms = self
            .coeffs
            .iter()
            .map(|t| {
                let c = t.c.to_core()?;
                if c.prime() != self.coeff_ring.prime {
                    return Err("series coefficient prime disagrees with coeff_ring".to_string());
                }
                Ok((t.exps.clone(), c))
            })
            .collect::<DtoResult<Vec<_>>>()?;
        PSeries::from_terms(self.num_vars, self.trunc_order, terms).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjPointJson {
    pub h: u32,
    pub pivot: usize,
    pub coords: Vec<PadicJson>,
}

impl ProjPointJson {
    pub fn from_core(p: &ProjPoint<Padic>) -> Self {
        ProjPointJson {
            h: p.h(),
            pivot: p.pivot(),
            coords: p.coords().iter().map(PadicJson::from_core).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExtRatJson {
    Fin(RatJson),
    Inf(String),
}

impl ExtRatJson {
    pub fn from_core(e: ExtRat) -> Self {
        match e {
            ExtRat::Fin(r) => ExtRatJson::Fin(rat_to_json(r)),
            ExtRat::Inf => ExtRatJson::Inf("inf".into()),
        }
    }

    pub fn to_core(&self) -> DtoResult<ExtRat> {
        match self {
            ExtRatJson::Fin(r) => Ok(ExtRat::Fin(rat_from_json(*r)?)),
            ExtRatJson::Inf(s) if s == "inf" => Ok(ExtRat::Inf),
            ExtRatJson::Inf(s) => Err(format!("expected \"inf\" or [num, den], got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdicPointJson {
    pub log_p: ExtRatJson,
    pub log_w: ExtRatJson,
}

impl AdicPointJson {
    pub fn from_core(x: &AdicPoint) -> Self {
        AdicPointJson {
            log_p: ExtRatJson::from_core(x.log_p()),
            log_w: ExtRatJson::from_core(x.log_w()),
        }
    }

    pub fn to_core(&self, prime: u64) -> DtoResult<AdicPoint> {
        AdicPoint::new(prime, self.log_p.to_core()?, self.log_w.to_core()?)
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ODElemJson {
    pub coeffs: Vec<WittEntryJson>,
}

impl ODElemJson {
    pub fn from_core(s: &ODElem) -> Self {
        ODElemJson {
            coeffs: s
                .coeffs()
                .iter()
                .map(|c| WittEntryJson::Witt(WittJson::from_core(c)))
                .collect(),
        }
    }

    pub fn to_core(&self, ring: &Arc<WittRing>, prec: i64) -> DtoResult<ODElem> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|e| e.to_core(ring, prec))
            .collect::<DtoResult<Vec<_>>>()?;
        ODElem::new(ring.clone(), coeffs).map_err(|e| e.to_string())
    }
}

fn default_frob_twist() -> i64 {
    0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationJson {
    pub label: String,
    #[serde(default = "default_frob_twist")]
    pub frob_twist: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerPointJson {
    pub deformation: DeformationJson,
    pub iota: MatrixJson,
    pub alpha: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adic_shadow: Option<AdicPointJson>,
}

impl TowerPointJson {
    pub fn from_core(x: &TowerPoint) -> DtoResult<Self> {
        let deformation = match x.deformation() {
            Deformation::Symbolic { label, frob_twist } => DeformationJson {
                label: label.clone(),
                frob_twist: *frob_twist,
            },
            Deformation::Rigid(_) => {
                return Err("only symbolic deformation labels cross the CLI boundary".into())
            }
        };
        Ok(TowerPointJson {
            deformation,
            iota: MatrixJson::from_core(x.iota()),
            alpha: MatrixJson::from_core(x.alpha()),
            adic_shadow: x.adic_shadow().map(AdicPointJson::from_core),
        })
    }

    pub fn to_core(&self, ring: &Arc<WittRing>, prec: i64) -> DtoResult<TowerPoint> {
        let shadow = match &self.adic_shadow {
            None => None,
            Some(a) => Some(a.to_core(ring.p())?),
        };
        let deformation = Deformation::Symbolic {
            label: self.deformation.label.clone(),
            frob_twist: self.deformation.frob_twist,
        };
        TowerPoint::new(
            ring.clone(),
            deformation,
            self.iota.to_core(ring, prec)?,
            self.alpha.to_core(ring, prec)?,
            shadow,
        )
        .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeilJson {
    pub n: i64,
    #[serde(default)]
    pub inertia_tag: String,
}

impl WeilJson {
    pub fn to_core(&self) -> WeilElem {
        WeilElem {
            n: self.n,
            inertia_tag: self.inertia_tag.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleJson {
    pub e: Vec<SlopeTriple>,
    pub f: Vec<SlopeTriple>,
    pub length: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locus: Option<String>,
}

impl TripleJson {
    pub fn from_core(t: &ModificationTriple) -> Self {
        TripleJson {
            e: bundle_to_json(t.leg_e()),
            f: bundle_to_json(t.leg_f()),
            length: t.length,
            locus: match &t.locus {
                Locus::Infinity => None,
                Locus::Labeled(s) => Some(s.clone()),
            },
        }
    }

    pub fn to_core(&self) -> DtoResult<ModificationTriple> {
        let mut t = ModificationTriple::new(
            bundle_from_json(&self.e)?,
            bundle_from_json(&self.f)?,
            self.length,
        );
        if let Some(l) = &self.locus {
            t.locus = Locus::Labeled(l.clone());
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeightJson {
    Finite(u32),
    Infinite,
    UndeterminedBeyond(u32),
}

impl HeightJson {
    pub fn from_core(h: Height) -> Self {
        match h {
            Height::Finite(v) => HeightJson::Finite(v),
            Height::Infinite => HeightJson::Infinite,
            Height::UndeterminedBeyond(v) => HeightJson::UndeterminedBeyond(v),
        }
    }
}
